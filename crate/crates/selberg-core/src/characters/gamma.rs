//! Gamma factors of local fields at unramified quasi-characters.
//!
//! Two independent implementations exist on purpose.  [`gamma_via_integral`]
//! sums the defining oscillatory integral shell by shell and knows nothing
//! about the closed form; [`gamma_padic`] is the closed form.  The test suite
//! pins them against each other on a grid of exponents and residue data, so
//! neither can drift without the other noticing.
//!
//! All formulas are expressed in the residue cardinality `q` of the field the
//! gamma factor belongs to and the exponent `d` of its different over the
//! base, with the self-dual measure (`vol(O) = q^{-d/2}`).

use num_complex::Complex;

use super::quasi::QuasiCharacter;
use crate::error::Error;
use crate::{Real, Result, C};

/// Hard cap on oracle shells; the geometric decay makes hitting this a bug.
const MAX_SHELLS: i64 = 5_000_000;

fn re<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// Integral of the additive character over the valuation shell `v(x) = v`.
///
/// With the self-dual measure and a character trivial on the inverse
/// different and nontrivial one step below it, the shell integral is
/// `q^{-v} (1 - 1/q) q^{-d/2}` down to `v = -d`, a single negative spike
/// `-q^{d/2}` at `v = -d - 1`, and zero below that (full root-of-unity
/// cancellation).
pub fn shell_psi_integral<T: Real>(q: u64, d: u32, v: i64) -> T {
    let q_t = T::from_u64(q).unwrap();
    let d_t = T::from_u32(d).unwrap();
    let half = T::from_f64(0.5).unwrap();
    if v >= -(d as i64) {
        let unit = T::one() - q_t.recip();
        let exponent = -T::from_i64(v).unwrap() - half * d_t;
        unit * (exponent * q_t.ln()).exp()
    } else if v == -(d as i64) - 1 {
        -(half * d_t * q_t.ln()).exp()
    } else {
        T::zero()
    }
}

/// Gamma factor computed directly from its defining integral,
/// `\int psi(x) chi(x) |x|^{-1} dx`, as a sum over valuation shells.
///
/// On the shell `v(x) = v` the factor `chi(x) |x|^{-1}` is the constant
/// `q^{-v(s-1)}`; one power of `q^{-v}` from the shell mass cancels against
/// the `|x|^{-1}`, and the cancellation is done inside the exponent so large
/// `v` cannot overflow.  The series converges for `re s > 0` and is summed
/// term by term until the increments fall below working precision.
pub fn gamma_via_integral<T: Real>(q: u64, d: u32, chi: &QuasiCharacter<T>) -> Result<C<T>> {
    let s = chi.exponent();
    if s.re <= T::zero() {
        return Err(Error::region(format!(
            "gamma integral diverges at re s = {} (needs re s > 0)",
            s.re
        )));
    }
    let q_t = T::from_u64(q).unwrap();
    let ln_q = q_t.ln();
    let half = T::from_f64(0.5).unwrap();
    let d_t = T::from_u32(d).unwrap();
    let unit_mass = T::one() - q_t.recip();
    let eps = T::epsilon();
    let one = re(T::one());

    // Spike shell v = -d - 1: mass -q^{d/2}, character factor q^{(d+1)(s-1)}.
    let spike_exp = (s - one) * ((d_t + T::one()) * ln_q) + half * d_t * ln_q;
    let mut acc = -spike_exp.exp();

    // Regular shells v >= -d: term = (1 - 1/q) q^{-d/2} q^{-v s}.
    let mut v = -(d as i64);
    loop {
        let exponent = -re(half * d_t * ln_q) - s * (T::from_i64(v).unwrap() * ln_q);
        let term = exponent.exp() * unit_mass;
        acc = acc + term;
        if term.norm() < eps * (T::one() + acc.norm()) {
            break;
        }
        v += 1;
        if v + (d as i64) > MAX_SHELLS {
            return Err(Error::budget(format!(
                "gamma shell sum did not settle within {MAX_SHELLS} shells at s = {s}"
            )));
        }
    }
    Ok(acc)
}

/// Gamma factor of a p-adic field in closed form:
/// `q^{d(s - 1/2)} (1 - q^{s-1}) / (1 - q^{-s})`.
///
/// This is the meromorphic continuation of [`gamma_via_integral`] and is
/// defined for every exponent away from the poles `q^{-s} = 1`.
pub fn gamma_padic<T: Real>(q: u64, d: u32, chi: &QuasiCharacter<T>) -> Result<C<T>> {
    let s = chi.exponent();
    let q_t = T::from_u64(q).unwrap();
    let ln_q = q_t.ln();
    let one = re(T::one());
    let denom = one - (-s * ln_q).exp();
    if denom.norm() < T::from_f64(1e-12).unwrap() {
        return Err(Error::pole(format!("s = {s} (q^-s = 1)")));
    }
    let half = T::from_f64(0.5).unwrap();
    let d_t = T::from_u32(d).unwrap();
    let prefactor = ((s - re(half)) * (d_t * ln_q)).exp();
    let numer = one - ((s - one) * ln_q).exp();
    Ok(prefactor * numer / denom)
}

/// Normalization constant of the functional equation for this character.
///
/// It differs from the gamma factor by `chi(-1)`, which is identically `1`
/// for the unramified characters modelled here, so this is an alias kept for
/// callers that are phrased in terms of the functional equation.
pub fn rho_padic<T: Real>(q: u64, d: u32, chi: &QuasiCharacter<T>) -> Result<C<T>> {
    gamma_padic(q, d, chi)
}

/// Gamma factor of the extension generated by one irreducible factor with
/// residue degree `f` and different exponent `d` over a base with residue
/// cardinality `base_q`.
///
/// An unramified character of the base pulls back through the norm to the
/// unramified character of the extension with the same exponent, because
/// `|N x| = |x|_E`; only the residue data changes.
pub fn gamma_ext<T: Real>(base_q: u64, f: u32, d: u32, chi: &QuasiCharacter<T>) -> Result<C<T>> {
    let q = base_q
        .checked_pow(f)
        .ok_or_else(|| Error::unsupported(format!("residue cardinality {base_q}^{f} overflows")))?;
    gamma_padic(q, d, chi)
}

/// Classical Euler gamma on the complex plane (Lanczos, `g = 7`, nine
/// terms), with the reflection formula for `re z < 1/2`.
///
/// Relative accuracy is around `1e-13`, which dominates every tolerance in
/// this crate that depends on it.
pub fn classical_gamma<T: Real>(z: C<T>) -> C<T> {
    const LANCZOS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let half = T::from_f64(0.5).unwrap();
    let one = re(T::one());
    if z.re < half {
        let pi = re(T::PI());
        return pi / ((pi * z).sin() * classical_gamma(one - z));
    }
    let z = z - one;
    let mut x = re(T::from_f64(LANCZOS[0]).unwrap());
    for (i, &coef) in LANCZOS.iter().enumerate().skip(1) {
        x = x + re(T::from_f64(coef).unwrap()) / (z + re(T::from_usize(i).unwrap()));
    }
    let g = T::from_f64(7.0).unwrap();
    let t = z + re(g + half);
    let sqrt_two_pi = (T::PI() + T::PI()).sqrt();
    re(sqrt_two_pi) * t.powc(z + re(half)) * (-t).exp() * x
}

/// Gamma factor of the complex field,
/// `(2 pi)^{1-s} Gamma(s) / ((2 pi)^s Gamma(1-s))`.
///
/// The reflection formula turns this into
/// `2^{1-2s} pi^{-2s} Gamma(s)^2 sin(pi s)`; both forms are evaluated and
/// must agree, which guards the Lanczos kernel against regressions on the
/// arguments this crate actually uses.  Poles sit at `s = 0, -1, -2, ..`.
pub fn gamma_complex<T: Real>(s: C<T>) -> Result<C<T>> {
    let tol = T::from_f64(1e-9).unwrap();
    let rounded = s.re.round();
    if (s.re - rounded).abs() < tol && s.im.abs() < tol && rounded <= T::zero() {
        return Err(Error::pole(format!("complex gamma factor at s = {s}")));
    }
    let one = re(T::one());
    let two_pi = re(T::PI() + T::PI());
    let direct =
        two_pi.powc(one - s) * classical_gamma(s) / (two_pi.powc(s) * classical_gamma(one - s));

    let two = re(T::from_f64(2.0).unwrap());
    let pi = re(T::PI());
    let reflected = two.powc(one - s - s)
        * pi.powc(-s - s)
        * classical_gamma(s)
        * classical_gamma(s)
        * (pi * s).sin();

    let agree =
        (direct - reflected).norm() <= T::from_f64(1e-10).unwrap() * (T::one() + direct.norm());
    if !agree {
        return Err(Error::precision(format!(
            "complex gamma forms disagree at s = {s}: {direct} vs {reflected}"
        )));
    }
    Ok(direct)
}
