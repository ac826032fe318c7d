//! Cell-certifiable factors of p-adic integrands.
//!
//! The certified engine integrates products of factors over anisotropic
//! boxes `center + prod_i p^{k_i} Z_p`. Each factor knows how to
//!
//! * certify that it is constant on a cell and produce the exact value,
//! * produce its exact cell mean in closed form when its zero locus
//!   crosses the cell (affine features and the degree-2 discriminant),
//! * produce the exact cell mean of a pair when its zero locus meets an
//!   affine partner's inside the cell, including tangentially,
//! * name the coordinates whose refinement can still resolve it,
//! * produce sound mean and sup bounds for the residual accounting at the
//!   depth cap.
//!
//! Soundness throughout rests on ultrametric facts only: an affine feature
//! whose value at the center has valuation below the cell contribution is
//! constant in absolute value, and otherwise its values sweep a ball
//! around zero uniformly, which makes cell means geometric series. No
//! rounding enters the certification decisions; they are made on exact
//! rationals.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::characters::{gamma_ext, gamma_padic, QuasiCharacter};
use crate::error::Error;
use crate::fields::{rational_valuation, FqElem, FqField};
use crate::polylab::{discriminant, factor_ff, splitting_type_padic, MonicPoly, SplittingType};
use crate::{C64, Result};

/// `p^e` for complex `e`.
pub(crate) fn qc(p: u64, e: C64) -> C64 {
    (e * (p as f64).ln()).exp()
}

/// `p^e` for real `e`.
pub(crate) fn qr(p: u64, e: f64) -> f64 {
    (e * (p as f64).ln()).exp()
}

/// Exact integral of `|u|^theta` over `{val u >= e}`: a geometric series
/// over shells. Needs `re theta > -1`.
pub fn ball_kernel(p: u64, e: i64, theta: C64) -> Result<C64> {
    if theta.re <= -1.0 {
        return Err(Error::region(format!(
            "|u|^{theta} is not integrable near u = 0"
        )));
    }
    let r = qc(p, -(theta + 1.0));
    let unit = 1.0 - 1.0 / p as f64;
    Ok(qc(p, -(theta + 1.0) * e as f64) * unit / (1.0 - r))
}

/// Real-exponent variant of [`ball_kernel`], used by residual bounds.
pub(crate) fn ball_kernel_real(p: u64, e: i64, t: f64) -> Result<f64> {
    if t <= -1.0 {
        return Err(Error::precision(format!(
            "residual bound needs an exponent above -1, got {t}"
        )));
    }
    let r = qr(p, -(t + 1.0));
    let unit = 1.0 - 1.0 / p as f64;
    Ok(qr(p, -(t + 1.0) * e as f64) * unit / (1.0 - r))
}

fn val(x: &BigRational, p: u64) -> Option<i64> {
    rational_valuation(x, p)
}

/// `max(0, -min val)` over the nonzero center coordinates: the uniform
/// power of `p` that rescales the center into the integers.
fn rescale_exponent(center: &[BigRational], p: u64) -> i64 {
    center
        .iter()
        .filter_map(|c| val(c, p))
        .min()
        .map_or(0, |m| (-m).max(0))
}

/// Residue of `x p^shift` in the prime field; needs `val(x) + shift >= 0`.
fn residue_shifted(x: &BigRational, shift: i64, field: &Arc<FqField>) -> Result<FqElem> {
    if x.is_zero() {
        return Ok(FqElem::from_residue(field, 0));
    }
    let pbig = BigInt::from(field.order());
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    let mut s = shift;
    while (&den % &pbig).is_zero() {
        den /= &pbig;
        s -= 1;
    }
    while s < 0 && (&num % &pbig).is_zero() {
        num /= &pbig;
        s += 1;
    }
    if s < 0 {
        return Err(Error::precision(
            "negative valuation where an integral coefficient was expected",
        ));
    }
    if s > 0 || (&num % &pbig).is_zero() {
        return Ok(FqElem::from_residue(field, 0));
    }
    let to_elem = |r: &BigInt| {
        FqElem::from_residue(field, r.mod_floor(&pbig).to_u64().expect("residue below p"))
    };
    Ok(to_elem(&num).mul(&to_elem(&den).inv()?))
}

fn legendre_is_square(u: u64, p: u64) -> bool {
    debug_assert!(u % p != 0);
    let mut acc: u64 = 1;
    let mut base = u % p;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc == 1
}

/// Whether the unit part `x / p^v` of a nonzero rational is a square in
/// `Z_p^*` (p odd: decided by the Legendre symbol of its residue).
fn unit_is_square(x: &BigRational, v: i64, p: u64) -> bool {
    let unit = if v >= 0 {
        x / BigRational::from_integer(BigInt::from(p).pow(v as u32))
    } else {
        x * BigRational::from_integer(BigInt::from(p).pow((-v) as u32))
    };
    let pb = BigInt::from(p);
    let num = unit.numer().mod_floor(&pb);
    let den = unit.denom().mod_floor(&pb);
    let den_inv = den.modinv(&pb).expect("denominator coprime to p");
    let r = (num * den_inv).mod_floor(&pb).to_u64().expect("residue fits");
    legendre_is_square(r, p)
}

/// Read-only affine structure a factor exposes: the engine combines
/// several into one exact change of variables, and the discriminant uses
/// one as the partner of its pair kernels.
#[derive(Debug, Clone, Copy)]
pub struct AffineView<'a> {
    pub w0: &'a BigRational,
    pub slopes: &'a [BigRational],
    pub theta: C64,
}

/// Closed-form data for exact outer tails of one-dimensional integrands:
/// on every shell `val y = -m` with `m >= threshold` the factor's absolute
/// value is exactly `p^{(m - v_base) * theta_eff}`.
#[derive(Debug, Clone, Copy)]
pub struct TailProfile {
    pub threshold: i64,
    pub v_base: i64,
    pub theta_eff: C64,
}

/// One certifiable factor of a p-adic integrand, over anisotropic cells
/// `center + prod_i p^{k_i} Z_p`.
pub trait CellFactor: Send + Sync {
    /// Exact value when the factor is provably constant on the cell.
    fn certify(&self, center: &[BigRational], ks: &[i64]) -> Result<Option<C64>>;

    /// Exact value at a single point (Monte Carlo path). Errors when the
    /// feature vanishes exactly or classification runs out of precision;
    /// the sampler counts such points as aborted.
    fn eval_point(&self, point: &[BigRational]) -> Result<C64>;

    /// Affine structure, when the factor has it.
    fn affine_view(&self) -> Option<AffineView<'_>> {
        None
    }

    /// Exact mean of the factor over the cell, when a closed form exists.
    /// Called only on cells where [`CellFactor::certify`] returned `None`.
    fn cell_kernel(&self, _center: &[BigRational], _ks: &[i64]) -> Result<Option<C64>> {
        Ok(None)
    }

    /// Exact mean of `self * |partner feature|^{partner theta}` over the
    /// cell, when a closed form exists; same contract as `cell_kernel`,
    /// with both factors unresolved.
    fn pair_kernel(
        &self,
        _partner: &AffineView<'_>,
        _center: &[BigRational],
        _ks: &[i64],
    ) -> Result<Option<C64>> {
        Ok(None)
    }

    /// Sound upper bound on the cell mean of the factor's absolute value.
    fn mean_bound(&self, center: &[BigRational], ks: &[i64]) -> Result<f64>;

    /// Sound upper bound on the sup of the factor's absolute value over
    /// the cell, assuming [`CellFactor::certify`] returned `None`.
    fn sup_bound(&self, center: &[BigRational], ks: &[i64]) -> Result<f64>;

    /// Coordinates whose refinement can still resolve the factor on this
    /// cell; the engine splits the union over the open factors.
    fn split_request(&self, _center: &[BigRational], ks: &[i64]) -> Vec<usize> {
        (0..ks.len()).collect()
    }

    /// Exact outer-shell behaviour for one-dimensional integrands.
    fn tail_profile(&self) -> Option<TailProfile> {
        None
    }
}

/// `|w_0 + sum_j w_j y_j|^theta`.
pub struct AffineFactor {
    p: u64,
    w0: BigRational,
    slopes: Vec<BigRational>,
    theta: C64,
}

impl AffineFactor {
    /// `weights` is `(w_0, w_1, .., w_dim)`. At least one slope must be
    /// nonzero and `re theta > -1` (otherwise the factor is not integrable
    /// across its zero hyperplane).
    pub fn new(p: u64, weights: Vec<BigRational>, theta: C64) -> Result<Self> {
        assert!(weights.len() >= 2, "affine factor needs a constant and a slope");
        if theta.re <= -1.0 {
            return Err(Error::region(format!(
                "affine factor exponent re {} <= -1 is not integrable",
                theta.re
            )));
        }
        let w0 = weights[0].clone();
        let slopes = weights[1..].to_vec();
        if slopes.iter().all(|w| w.is_zero()) {
            return Err(Error::config("affine factor with identically zero slope"));
        }
        Ok(AffineFactor { p, w0, slopes, theta })
    }

    fn feature(&self, y: &[BigRational]) -> BigRational {
        let mut g = self.w0.clone();
        for (w, c) in self.slopes.iter().zip(y) {
            g += w * c;
        }
        g
    }

    /// Valuation floor of the feature's movement over the cell: the image
    /// is exactly `g(center) + p^kappa Z_p`.
    fn kappa(&self, ks: &[i64]) -> i64 {
        self.slopes
            .iter()
            .zip(ks)
            .filter_map(|(w, &k)| val(w, self.p).map(|v| v + k))
            .min()
            .expect("nonzero slope")
    }

    fn sharpest_coord(&self, ks: &[i64]) -> usize {
        let kap = self.kappa(ks);
        self.slopes
            .iter()
            .zip(ks)
            .position(|(w, &k)| val(w, self.p).map(|v| v + k) == Some(kap))
            .expect("minimum attained")
    }
}

impl CellFactor for AffineFactor {
    fn certify(&self, center: &[BigRational], ks: &[i64]) -> Result<Option<C64>> {
        match val(&self.feature(center), self.p) {
            Some(v) if v < self.kappa(ks) => Ok(Some(qc(self.p, -self.theta * v as f64))),
            _ => Ok(None),
        }
    }

    fn eval_point(&self, point: &[BigRational]) -> Result<C64> {
        match val(&self.feature(point), self.p) {
            Some(v) => Ok(qc(self.p, -self.theta * v as f64)),
            None => Err(Error::singular("affine feature vanished at a sample")),
        }
    }

    fn affine_view(&self) -> Option<AffineView<'_>> {
        Some(AffineView {
            w0: &self.w0,
            slopes: &self.slopes,
            theta: self.theta,
        })
    }

    fn cell_kernel(&self, _center: &[BigRational], ks: &[i64]) -> Result<Option<C64>> {
        // Unresolved means val g(center) >= kappa, so the image is the
        // full ball p^kappa Z_p, uniformly: one geometric series.
        let kap = self.kappa(ks);
        Ok(Some(
            qc(self.p, -self.theta * kap as f64) * ball_kernel(self.p, 0, self.theta)?,
        ))
    }

    fn mean_bound(&self, _center: &[BigRational], ks: &[i64]) -> Result<f64> {
        let t = self.theta.re;
        let kap = self.kappa(ks);
        Ok(qr(self.p, -(kap as f64) * t) * ball_kernel_real(self.p, 0, t)?)
    }

    fn sup_bound(&self, _center: &[BigRational], ks: &[i64]) -> Result<f64> {
        if self.theta.re < 0.0 {
            // The zero sits inside an unresolved cell: no finite sup.
            return Ok(f64::INFINITY);
        }
        Ok(qr(self.p, -(self.kappa(ks) as f64) * self.theta.re))
    }

    fn split_request(&self, _center: &[BigRational], ks: &[i64]) -> Vec<usize> {
        vec![self.sharpest_coord(ks)]
    }

    fn tail_profile(&self) -> Option<TailProfile> {
        if self.slopes.len() != 1 {
            return None;
        }
        let v_slope = val(&self.slopes[0], self.p).expect("nonzero slope");
        let threshold = match val(&self.w0, self.p) {
            Some(v0) => (v_slope - v0 + 1).max(1),
            None => 1,
        };
        Some(TailProfile {
            threshold,
            v_base: v_slope,
            theta_eff: self.theta,
        })
    }
}

/// `|disc f|^{c - 1/2}` times the splitting-type correction
/// `prod_i Gamma_{h_i}(c) / Gamma(c)^{deg h_i}` over the irreducible
/// factors `h_i` of `f`, for `f = x^n + y_{n-1} x^{n-1} + .. + y_0` read
/// off the integration coordinates.
///
/// Only tame degrees are supported (`p > n`), which also keeps the leading
/// coefficient `+-n^n` of the discriminant in the constant-term direction
/// a unit; kernels and residual bounds lean on that. Degree 2 gets the
/// full treatment (sharp certification, solo and pair kernels); higher
/// degrees certify conservatively and otherwise subdivide.
pub struct DiscriminantFactor {
    p: u64,
    n: usize,
    theta: C64,
    chi: QuasiCharacter<f64>,
    base_gamma: C64,
    kappa_inert: C64,
    kappa_ram: C64,
    /// Correction of one unramified factor per residue degree 1..=n.
    kappa_unram: Vec<C64>,
    residue_field: Arc<FqField>,
    corr_sup: f64,
    guard: i64,
}

impl DiscriminantFactor {
    /// `gamma_exponent` is the exponent `c` of the splitting character;
    /// the discriminant itself is raised to `c - 1/2`. `guard` widens the
    /// conservative freeze criterion used above degree 2.
    pub fn new(p: u64, n: usize, gamma_exponent: C64, guard: i64) -> Result<Self> {
        if n < 2 || n > 4 || p <= n as u64 {
            return Err(Error::unsupported(format!(
                "discriminant factor supports 2 <= n <= 4 with p > n, got n = {n}, p = {p}"
            )));
        }
        let theta = gamma_exponent - 0.5;
        if theta.re <= -1.0 {
            return Err(Error::region(
                "discriminant exponent re c <= -1/2 is not integrable",
            ));
        }
        let chi = QuasiCharacter::unramified(gamma_exponent);
        let base_gamma = gamma_padic(p, 0, &chi)?;
        let kappa_inert = gamma_ext(p, 2, 0, &chi)? / (base_gamma * base_gamma);
        let kappa_ram = gamma_ext(p, 1, 1, &chi)? / (base_gamma * base_gamma);
        let mut kappa_unram = vec![C64::new(1.0, 0.0)];
        for d in 1..=n as u32 {
            let mut k = gamma_ext(p, d, 0, &chi)?;
            for _ in 0..d {
                k /= base_gamma;
            }
            kappa_unram.push(k);
        }
        let mut f = DiscriminantFactor {
            p,
            n,
            theta,
            chi,
            base_gamma,
            kappa_inert,
            kappa_ram,
            kappa_unram,
            residue_field: FqField::new(p, 1)?,
            corr_sup: 1.0,
            guard,
        };
        f.corr_sup = f.max_corr(n as u32)?;
        Ok(f)
    }

    fn corr_of(&self, st: &SplittingType) -> Result<C64> {
        let mut corr = C64::new(1.0, 0.0);
        for ft in st.factors() {
            corr *= gamma_ext(self.p, ft.f, ft.d, &self.chi)?;
            for _ in 0..ft.deg() {
                corr /= self.base_gamma;
            }
        }
        Ok(corr)
    }

    /// Max of |correction| over all splitting shapes of total degree `n`.
    fn max_corr(&self, n: u32) -> Result<f64> {
        fn shapes(n: u32, min_part: u32, acc: &mut Vec<(u32, u32)>, out: &mut Vec<Vec<(u32, u32)>>) {
            if n == 0 {
                out.push(acc.clone());
                return;
            }
            for e in 1..=n {
                for f in 1..=n / e {
                    if e * f < min_part || e * f > n {
                        continue;
                    }
                    acc.push((e, f));
                    shapes(n - e * f, e * f, acc, out);
                    acc.pop();
                }
            }
        }
        let mut out = Vec::new();
        shapes(n, 1, &mut Vec::new(), &mut out);
        let mut sup: f64 = 0.0;
        for shape in out {
            let mut corr = C64::new(1.0, 0.0);
            for (e, f) in shape {
                corr *= gamma_ext(self.p, f, e - 1, &self.chi)?;
                for _ in 0..e * f {
                    corr /= self.base_gamma;
                }
            }
            sup = sup.max(corr.norm());
        }
        Ok(sup)
    }

    fn poly(&self, y: &[BigRational]) -> MonicPoly<BigRational> {
        debug_assert_eq!(y.len(), self.n, "coordinates are the full coefficient vector");
        let mut coeffs: Vec<BigRational> = y.to_vec();
        coeffs.reverse();
        MonicPoly::new(coeffs, BigRational::from_integer(1.into()))
    }

    /// Valuation of the discriminant after the uniform rescale that makes
    /// the center integral, together with the rescale exponent.
    fn disc_val_rescaled(&self, center: &[BigRational]) -> Result<(Option<i64>, i64)> {
        let disc = discriminant(&self.poly(center))?;
        let m = rescale_exponent(center, self.p);
        let shift = (self.n * (self.n - 1)) as i64 * m;
        Ok((val(&disc, self.p).map(|v| v + shift), m))
    }

    /// Correction for a frozen discriminant of valuation `v` whose unit
    /// part has the given square class; degree 2, where the splitting type
    /// is exactly this data (odd v ramified, even v split or inert).
    fn corr2(&self, v: i64, square: bool) -> C64 {
        if v.rem_euclid(2) == 1 {
            self.kappa_ram
        } else if square {
            C64::new(1.0, 0.0)
        } else {
            self.kappa_inert
        }
    }

    /// Correction averaged over a full shell of discriminant values: odd
    /// valuations are ramified, even ones split the unit classes evenly.
    fn shell_avg(&self, v: i64) -> C64 {
        if v.rem_euclid(2) == 1 {
            self.kappa_ram
        } else {
            (C64::new(1.0, 0.0) + self.kappa_inert) / 2.0
        }
    }

    /// Lower bound on the valuation of `disc(y) - disc(center)` over the
    /// cell, degree 2: `b_1^2 - 4 b_0` moves by `-4 d_0 + 2 b_1 d_1 +
    /// d_1^2` with `val d_i >= k_i` and p odd.
    fn variation2(&self, center: &[BigRational], ks: &[i64]) -> i64 {
        let mut var = ks[0].min(2 * ks[1]);
        if let Some(vb) = val(&center[1], self.p) {
            var = var.min(ks[1] + vb);
        }
        var
    }

    /// Exact mean of `|u|^theta corr` for `u` sweeping `p^k Z_p` uniformly,
    /// the correction averaged per shell by parity.
    fn disc_ball_mean(&self, k: i64) -> C64 {
        let unit = 1.0 - 1.0 / self.p as f64;
        let x = qc(self.p, -(self.theta + 1.0));
        let lead = self.shell_avg(k) * qc(self.p, -(self.theta + 1.0) * k as f64)
            + self.shell_avg(k + 1) * qc(self.p, -(self.theta + 1.0) * (k + 1) as f64);
        qr(self.p, k as f64) * unit * lead / (1.0 - x * x)
    }

    /// Average of `p^{dd theta} |t - dhat|^theta corr(disc)` over `t`
    /// uniform on the shell `val t = dd`, where `dhat` has valuation `dd`
    /// and unit square class `sq`, and `disc = -4 (t - dhat)`. Writing
    /// `t = dhat w` with `w` a uniform unit, the difference redistributes
    /// over valuations `dd + t'` with explicit class statistics.
    fn collision_avg(&self, dd: i64, sq: bool) -> C64 {
        let pf = self.p as f64;
        let one = C64::new(1.0, 0.0);
        let rho = qc(self.p, -(self.theta + 1.0));
        // t' = 0: w - 1 sweeps the units except -1's class partner; for
        // even dd the class of -dhat(w-1) matches a square for exactly
        // (p-1)/2 - [dhat square] of the p-2 choices.
        let head = if dd.rem_euclid(2) == 1 {
            self.kappa_ram
        } else {
            let matches = (pf - 1.0) / 2.0 - if sq { 1.0 } else { 0.0 };
            (matches * one + (pf - 2.0 - matches) * self.kappa_inert) / (pf - 2.0)
        };
        // t' >= 1: w - 1 = p^{t'} e with e a uniform unit, classes even.
        let tail = (self.shell_avg(dd + 1) * rho + self.shell_avg(dd) * rho * rho)
            / (one - rho * rho);
        (pf - 2.0) / (pf - 1.0) * head + tail
    }

    /// Exact mean of `|t|^x |4 (t - dhat)|^theta corr` over `t` uniform in
    /// `p^{k0} Z_p`, for a separation `dhat` of frozen valuation `dd` and
    /// unit square class `sq`. Shells of `t` split into three regimes:
    /// below the separation scale (full class sweep), at it (collision),
    /// and above it (disc frozen at the separation).
    fn fiber_pair_mean(&self, k0: i64, dd: i64, sq: bool, x: C64) -> Result<C64> {
        let p = self.p;
        if x.re <= -1.0 {
            return Err(Error::region("pair exponent re <= -1 is not integrable"));
        }
        if dd < k0 {
            // Separation outside the ball: the disc part is constant.
            return Ok(qc(p, -x * k0 as f64)
                * ball_kernel(p, 0, x)?
                * qc(p, -self.theta * dd as f64)
                * self.corr2(dd, sq));
        }
        let unit = 1.0 - 1.0 / p as f64;
        let y = -(x + self.theta + 1.0);
        let rx = qc(p, -(x + 1.0));
        let mut near = C64::new(0.0, 0.0);
        for v in k0..dd {
            near += qc(p, y * v as f64) * self.shell_avg(v);
        }
        let collision = qc(p, y * dd as f64) * self.collision_avg(dd, sq);
        // p^{-theta dd} ball_kernel(dd + 1, x), exponents combined so deep
        // separations cannot overflow one power and underflow the other.
        let far = qc(p, y * dd as f64) * rx * self.corr2(dd, sq) * (unit / (1.0 - rx));
        Ok(qr(p, k0 as f64) * (unit * (near + collision) + far))
    }

    /// Exact mean over the whole cell when the affine partner's zero is
    /// tangent to the discriminant locus: the separation is the perfect
    /// square `((b_1 - b_tan)/2)^2` and the cell's `b_1` ball is centered
    /// on the tangent fiber, so the separation valuation ladder `2 sigma`,
    /// `sigma >= k_1`, is summed in closed form. Needs `k_0 <= 2 k_1`
    /// (checked by the caller) and `re(x + theta) > -3/2`, the exact
    /// integrability threshold of a tangential crossing.
    fn tangent_ladder_mean(&self, k0: i64, k1: i64, x: C64) -> Result<C64> {
        let p = self.p;
        let pf = p as f64;
        let one = C64::new(1.0, 0.0);
        if x.re <= -1.0 {
            return Err(Error::region("pair exponent re <= -1 is not integrable"));
        }
        let y = -(x + self.theta + 1.0);
        let ladder = qc(p, y * 2.0 - 1.0);
        if ladder.norm() >= 1.0 {
            return Err(Error::region(format!(
                "tangential crossing needs re(x + theta) > -3/2, got {}",
                x.re + self.theta.re
            )));
        }
        let unit = 1.0 - 1.0 / pf;
        let rx = qc(p, -(x + 1.0));
        // Fibers whose t shells lie below every reachable separation.
        let mut low = C64::new(0.0, 0.0);
        for v in k0..2 * k1 {
            low += qc(p, y * v as f64) * self.shell_avg(v);
        }
        let k2 = self.collision_avg(0, true);
        let a_even = (one + self.kappa_inert) / 2.0;
        let inner = (a_even + qc(p, y) * self.kappa_ram) / pf + unit * (k2 + rx / (one - rx));
        let h = qc(p, y * (2 * k1) as f64) / (one - ladder);
        Ok(qr(p, k0 as f64) * unit * (low + h * inner))
    }
}

impl CellFactor for DiscriminantFactor {
    fn certify(&self, center: &[BigRational], ks: &[i64]) -> Result<Option<C64>> {
        if self.n == 2 {
            // Sharp: once the movement valuation exceeds val disc(center),
            // the valuation and the unit square class are both frozen, and
            // for quadratics they determine the splitting type.
            let disc = discriminant(&self.poly(center))?;
            return Ok(match val(&disc, self.p) {
                Some(v) if self.variation2(center, ks) > v => {
                    let sq = v.rem_euclid(2) == 0 && unit_is_square(&disc, v, self.p);
                    Some(qc(self.p, -self.theta * v as f64) * self.corr2(v, sq))
                }
                _ => None,
            });
        }
        let (vdg, m) = self.disc_val_rescaled(center)?;
        let vdg = match vdg {
            Some(v) => v,
            None => return Ok(None),
        };
        debug_assert!(vdg >= 0, "rescaled discriminant must be integral");
        // Every coefficient of the integral rescaling moves by valuation
        // at least min k + m on this cell; the discriminant is an integer
        // polynomial in them, so both bounds below are exact ultrametric
        // statements (conservatively: square classes freeze only past
        // twice the valuation).
        let dev = ks.iter().min().copied().unwrap_or(0) + m;
        if dev > vdg && dev >= 2 * vdg + self.guard {
            let f = self.poly(center);
            let st = splitting_type_padic(&f, self.p)?;
            let vd = vdg - (self.n * (self.n - 1)) as i64 * m;
            return Ok(Some(qc(self.p, -self.theta * vd as f64) * self.corr_of(&st)?));
        }
        Ok(None)
    }

    fn eval_point(&self, point: &[BigRational]) -> Result<C64> {
        let f = self.poly(point);
        let disc = discriminant(&f)?;
        let vd = val(&disc, self.p)
            .ok_or_else(|| Error::singular("discriminant vanished at a sample"))?;
        // After the root rescale g(u) = p^{nm} f(u p^{-m}) the polynomial
        // is integral with the same splitting type and disc valuation
        // vd + n(n-1)m. A unit rescaled discriminant means a squarefree
        // reduction: the type is the residue factorization, no lifting.
        // This is the overwhelmingly common case under sampling.
        let m = rescale_exponent(point, self.p);
        let corr = if vd + (self.n * (self.n - 1)) as i64 * m == 0 {
            let mut coeffs = Vec::with_capacity(self.n);
            for i in (0..self.n).rev() {
                coeffs.push(residue_shifted(
                    f.coeff(i),
                    (self.n - i) as i64 * m,
                    &self.residue_field,
                )?);
            }
            let g = MonicPoly::new(coeffs, FqElem::one(&self.residue_field));
            let mut corr = C64::new(1.0, 0.0);
            for (h, _) in factor_ff(&g) {
                corr *= self.kappa_unram[h.degree()];
            }
            corr
        } else {
            self.corr_of(&splitting_type_padic(&f, self.p)?)?
        };
        Ok(qc(self.p, -self.theta * vd as f64) * corr)
    }

    fn cell_kernel(&self, center: &[BigRational], ks: &[i64]) -> Result<Option<C64>> {
        // Degree 2 only: disc = b_1^2 - 4 b_0 is affine in the constant
        // term with unit slope, so each b_1 fiber pushes forward onto the
        // exact ball disc(center fiber) + p^{k_0} Z_p. The kernel applies
        // when that ball is p^{k_0} Z_p itself on every fiber: the center
        // value must sit in it and stay there across the b_1 ball.
        if self.n != 2 {
            return Ok(None);
        }
        let k0 = ks[0];
        let mut trans = 2 * ks[1];
        if let Some(vb) = val(&center[1], self.p) {
            trans = trans.min(ks[1] + vb);
        }
        if trans < k0 {
            return Ok(None);
        }
        let disc = discriminant(&self.poly(center))?;
        if let Some(v) = val(&disc, self.p) {
            if v < k0 {
                return Ok(None);
            }
        }
        Ok(Some(self.disc_ball_mean(k0)))
    }

    fn pair_kernel(
        &self,
        partner: &AffineView<'_>,
        center: &[BigRational],
        ks: &[i64],
    ) -> Result<Option<C64>> {
        if self.n != 2 || partner.slopes.len() != 2 {
            return Ok(None);
        }
        let (k0, k1) = (ks[0], ks[1]);
        let r0 = &partner.slopes[0];
        if r0.is_zero() {
            return Ok(None);
        }
        let vr0 = val(r0, self.p).expect("nonzero");
        let x = partner.theta;
        // Both zero loci are parametrized over the b_1 ball by their b_0
        // positions; the pair integrates fiberwise in the coordinate
        // t = (partner feature) / r_0 once the partner's zero lies inside
        // every fiber's t ball.
        let gc = partner.w0 + r0 * &center[0] + &partner.slopes[1] * &center[1];
        if let Some(v) = val(&gc, self.p) {
            if v < k0 + vr0 {
                return Ok(None);
            }
        }
        if let Some(v1) = val(&partner.slopes[1], self.p) {
            if k1 + v1 - vr0 < k0 {
                return Ok(None);
            }
        }
        let scale = qc(self.p, -x * vr0 as f64);
        // Separation between the disc zero b_1^2/4 and the partner zero
        // along the fiber over b_1.
        let ratio1 = &partner.slopes[1] / r0;
        let quarter = BigRational::new(BigInt::from(1), BigInt::from(4));
        let sep_c = &center[1] * &center[1] * &quarter + (partner.w0 + &partner.slopes[1] * &center[1]) / r0;
        let mut sep_var = 2 * k1;
        if let Some(vb) = val(&center[1], self.p) {
            sep_var = sep_var.min(k1 + vb);
        }
        if let Some(vq) = val(&ratio1, self.p) {
            sep_var = sep_var.min(k1 + vq);
        }
        if let Some(dd) = val(&sep_c, self.p) {
            if sep_var > dd {
                let sq = dd.rem_euclid(2) == 0 && unit_is_square(&sep_c, dd, self.p);
                return Ok(Some(scale * self.fiber_pair_mean(k0, dd, sq, x)?));
            }
        }
        // Unfrozen separation: exactly solvable when the crossing is the
        // tangent family, where the separation is a perfect square in b_1.
        let tangent_defect = partner.w0 / r0 - &ratio1 * &ratio1;
        if !tangent_defect.is_zero() {
            return Ok(None);
        }
        let b_tan = &center[1] + BigRational::from_integer(2.into()) * &ratio1;
        if let Some(v) = val(&b_tan, self.p) {
            if v < k1 {
                return Ok(None);
            }
        }
        if k0 > 2 * k1 {
            return Ok(None);
        }
        Ok(Some(scale * self.tangent_ladder_mean(k0, k1, x)?))
    }

    fn mean_bound(&self, _center: &[BigRational], ks: &[i64]) -> Result<f64> {
        // Rearrangement along the constant-term direction: disc is a
        // degree n-1 polynomial there with unit leading coefficient, so
        // the fiber mean is bounded by the worst single-root kernel at
        // exponent (n-1) * re theta.
        let t = (self.n - 1) as f64 * self.theta.re;
        Ok(qr(self.p, -(ks[0] as f64) * t) * ball_kernel_real(self.p, 0, t)? * self.corr_sup)
    }

    fn sup_bound(&self, center: &[BigRational], ks: &[i64]) -> Result<f64> {
        if self.theta.re < 0.0 {
            // An uncertified cell may meet the zero locus, where a negative
            // power is unbounded. The mean bound is the usable one.
            return Ok(f64::INFINITY);
        }
        let w = if self.n == 2 {
            let disc = discriminant(&self.poly(center))?;
            let var = self.variation2(center, ks);
            val(&disc, self.p).map_or(var, |v| v.min(var))
        } else {
            let (vdg, m) = self.disc_val_rescaled(center)?;
            let dev = ks.iter().min().copied().unwrap_or(0) + m;
            vdg.map_or(dev, |v| v.min(dev)) - (self.n * (self.n - 1)) as i64 * m
        };
        Ok(qr(self.p, -(w as f64) * self.theta.re) * self.corr_sup)
    }

    fn split_request(&self, _center: &[BigRational], ks: &[i64]) -> Vec<usize> {
        if self.n == 2 {
            // Every unresolved quantity (valuation freeze, fiber reach,
            // separation freeze, ladder centering) sharpens with k_1.
            vec![1]
        } else {
            (0..ks.len()).collect()
        }
    }
}

/// `|x|_E^theta` for `x` ranging over an unramified extension of degree
/// `deg`, presented through `deg` affine coordinate maps in the ambient
/// integration variables. The extension valuation is the minimum of the
/// coordinate valuations in a power basis.
pub struct NormFactor {
    p: u64,
    deg: u32,
    theta: C64,
    coords: Vec<(BigRational, Vec<BigRational>)>,
}

impl NormFactor {
    pub fn new(
        p: u64,
        deg: u32,
        coords: Vec<(BigRational, Vec<BigRational>)>,
        theta: C64,
    ) -> Result<Self> {
        assert_eq!(coords.len(), deg as usize, "one map per basis coordinate");
        if theta.re <= -1.0 {
            return Err(Error::region(format!(
                "norm factor exponent re {} <= -1 is not integrable",
                theta.re
            )));
        }
        if coords
            .iter()
            .all(|(w0, ws)| w0.is_zero() && ws.iter().all(|w| w.is_zero()))
        {
            return Err(Error::config("norm factor of the identically zero element"));
        }
        Ok(NormFactor { p, deg, theta, coords })
    }

    fn coord_value(&self, i: usize, y: &[BigRational]) -> BigRational {
        let (w0, ws) = &self.coords[i];
        let mut g = w0.clone();
        for (w, c) in ws.iter().zip(y) {
            g += w * c;
        }
        g
    }

    /// Movement floor of coordinate map `i` over the cell, `None` for a
    /// constant map.
    fn kappa_of(&self, i: usize, ks: &[i64]) -> Option<i64> {
        self.coords[i]
            .1
            .iter()
            .zip(ks)
            .filter_map(|(w, &k)| val(w, self.p).map(|v| v + k))
            .min()
    }

    /// Per-coordinate status on a cell: exact valuation or a lower bound.
    fn coord_statuses(
        &self,
        center: &[BigRational],
        ks: &[i64],
    ) -> Vec<std::result::Result<Option<i64>, i64>> {
        (0..self.coords.len())
            .map(|i| match self.kappa_of(i, ks) {
                None => Ok(val(&self.coord_value(i, center), self.p)),
                Some(kap) => {
                    let v = val(&self.coord_value(i, center), self.p);
                    match v {
                        Some(v) if v < kap => Ok(Some(v)),
                        _ => Err(kap),
                    }
                }
            })
            .collect()
    }
}

impl CellFactor for NormFactor {
    fn certify(&self, center: &[BigRational], ks: &[i64]) -> Result<Option<C64>> {
        let mut known = i64::MAX;
        let mut floor = i64::MAX;
        for st in self.coord_statuses(center, ks) {
            match st {
                Ok(Some(v)) => known = known.min(v),
                Ok(None) => {}
                Err(l) => floor = floor.min(l),
            }
        }
        if known < floor {
            return Ok(Some(qc(self.p, -self.theta * (self.deg as i64 * known) as f64)));
        }
        Ok(None)
    }

    fn eval_point(&self, point: &[BigRational]) -> Result<C64> {
        let w = (0..self.coords.len())
            .filter_map(|i| val(&self.coord_value(i, point), self.p))
            .min()
            .ok_or_else(|| Error::singular("extension element vanished at a sample"))?;
        Ok(qc(self.p, -self.theta * (self.deg as i64 * w) as f64))
    }

    fn mean_bound(&self, center: &[BigRational], ks: &[i64]) -> Result<f64> {
        let t = self.theta.re;
        if t >= 0.0 {
            return self.sup_bound(center, ks);
        }
        // |x|^t <= prod over the moving coordinates of |g_j|^{t deg / s}:
        // the minimum valuation is at most the average over any subset.
        let statuses = self.coord_statuses(center, ks);
        let moving: Vec<usize> = (0..self.coords.len())
            .filter(|&i| self.kappa_of(i, ks).is_some())
            .collect();
        let s = moving.len();
        if s == 0 {
            return self.sup_bound(center, ks);
        }
        let e = t * self.deg as f64 / s as f64;
        let mut bound = 1.0;
        let mut mean_used = false;
        let mut taken = std::collections::HashSet::new();
        for &i in &moving {
            let kap = self.kappa_of(i, ks).expect("moving coordinate");
            match statuses[i] {
                Ok(Some(v)) => bound *= qr(self.p, -(v as f64) * e),
                Ok(None) | Err(_) => {
                    let pref = self.coords[i]
                        .1
                        .iter()
                        .zip(ks)
                        .position(|(w, &k)| val(w, self.p).map(|v| v + k) == Some(kap));
                    let fresh = pref.map_or(false, |j| taken.insert(j));
                    if !mean_used && fresh {
                        bound *= qr(self.p, -(kap as f64) * e) * ball_kernel_real(self.p, 0, e)?;
                        mean_used = true;
                    } else {
                        bound *= qr(self.p, -(kap as f64) * e);
                    }
                }
            }
        }
        Ok(bound)
    }

    fn sup_bound(&self, center: &[BigRational], ks: &[i64]) -> Result<f64> {
        let statuses = self.coord_statuses(center, ks);
        if self.theta.re < 0.0 {
            // |x|_E shrinks with the minimum valuation, which unresolved
            // coordinates can push arbitrarily high unless some coordinate
            // is pinned; the smallest pinned valuation caps it.
            let cap = statuses
                .iter()
                .filter_map(|st| match st {
                    Ok(Some(v)) => Some(*v),
                    _ => None,
                })
                .min();
            return Ok(match cap {
                Some(v) => qr(self.p, -((self.deg as i64 * v) as f64) * self.theta.re),
                None => f64::INFINITY,
            });
        }
        let mut w = i64::MAX;
        for st in statuses {
            match st {
                Ok(Some(v)) => w = w.min(v),
                Ok(None) => {}
                Err(l) => w = w.min(l),
            }
        }
        if w == i64::MAX {
            return Err(Error::precision("norm factor vanished on a whole cell"));
        }
        Ok(qr(self.p, -((self.deg as i64 * w) as f64) * self.theta.re))
    }

    fn split_request(&self, center: &[BigRational], ks: &[i64]) -> Vec<usize> {
        let mut wanted = Vec::new();
        for (i, st) in self.coord_statuses(center, ks).iter().enumerate() {
            if st.is_err() {
                let kap = self.kappa_of(i, ks).expect("unresolved map moves");
                if let Some(j) = self.coords[i]
                    .1
                    .iter()
                    .zip(ks)
                    .position(|(w, &k)| val(w, self.p).map(|v| v + k) == Some(kap))
                {
                    if !wanted.contains(&j) {
                        wanted.push(j);
                    }
                }
            }
        }
        wanted
    }

    fn tail_profile(&self) -> Option<TailProfile> {
        let moving: Vec<usize> = (0..self.coords.len())
            .filter(|&i| self.coords[i].1.iter().any(|w| !w.is_zero()))
            .collect();
        if moving.len() != 1 || self.coords[moving[0]].1.len() != 1 {
            return None;
        }
        let i = moving[0];
        let vs = val(&self.coords[i].1[0], self.p).expect("nonzero slope");
        let mut threshold: i64 = 1;
        if let Some(v0) = val(&self.coords[i].0, self.p) {
            threshold = threshold.max(vs - v0 + 1);
        }
        for (j, (w0, ws)) in self.coords.iter().enumerate() {
            if j != i && ws.iter().all(|w| w.is_zero()) {
                if let Some(vc) = val(w0, self.p) {
                    threshold = threshold.max(vs - vc + 1);
                }
            }
        }
        Some(TailProfile {
            threshold,
            v_base: vs,
            theta_eff: self.theta * self.deg as f64,
        })
    }
}

/// `|F(y)|^theta` for an exactly evaluable polynomial feature that the
/// caller promises factors over the algebraic integers into `continuity+1`
/// pieces (for a resultant against a fixed monic integral polynomial,
/// its degree). The factor certifies by valuation freezing and offers no
/// closed-form kernel; cells where its value never resolves surface as
/// precision errors rather than silent inaccuracy.
pub struct GeneralFactor {
    p: u64,
    feature: Box<dyn Fn(&[BigRational]) -> Result<BigRational> + Send + Sync>,
    theta: C64,
    continuity: i64,
    label: String,
}

impl GeneralFactor {
    pub fn new(
        p: u64,
        feature: Box<dyn Fn(&[BigRational]) -> Result<BigRational> + Send + Sync>,
        theta: C64,
        continuity: i64,
        label: impl Into<String>,
    ) -> Self {
        GeneralFactor {
            p,
            feature,
            theta,
            continuity: continuity.max(0),
            label: label.into(),
        }
    }

    fn dev(&self, center: &[BigRational], ks: &[i64]) -> i64 {
        let k = ks.iter().min().copied().unwrap_or(0);
        k - self.continuity * rescale_exponent(center, self.p)
    }
}

impl CellFactor for GeneralFactor {
    fn certify(&self, center: &[BigRational], ks: &[i64]) -> Result<Option<C64>> {
        let f = (self.feature)(center)?;
        match val(&f, self.p) {
            Some(v) if self.dev(center, ks) > v => Ok(Some(qc(self.p, -self.theta * v as f64))),
            _ => Ok(None),
        }
    }

    fn eval_point(&self, point: &[BigRational]) -> Result<C64> {
        let f = (self.feature)(point)?;
        match val(&f, self.p) {
            Some(v) => Ok(qc(self.p, -self.theta * v as f64)),
            None => Err(Error::singular(format!("{} vanished at a sample", self.label))),
        }
    }

    fn mean_bound(&self, _center: &[BigRational], _ks: &[i64]) -> Result<f64> {
        Err(Error::precision(format!(
            "no integrable residual bound for composite feature {}",
            self.label
        )))
    }

    fn sup_bound(&self, center: &[BigRational], ks: &[i64]) -> Result<f64> {
        if self.theta.re < 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(qr(self.p, -(self.dev(center, ks) as f64) * self.theta.re))
    }
}
