//! Integrand assembly for the left-hand sides: coefficient-space cell
//! integrands over `Q_p`, importance specs for the sampled variant, the
//! complex root-space weight, and the exhaustive finite-field sum.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::characters::MultCharacter;
use crate::error::Error;
use crate::fields::{complex_norm, FqElem, FqField};
use crate::integrators::{
    ff_enumerate_sum, AffineFactor, CellFactor, DiscriminantFactor, IntegralEstimate,
    NormFactor, PadicCoordDensity, PadicIntegrand, PadicMcSpec,
};
use crate::polylab::{discriminant, factor_ff, MonicPoly};
use crate::{C64, Result};

/// Valuation guard handed to the discriminant factor; matches the tame
/// reduction depth used throughout the cell engine tests.
const DISC_GUARD: i64 = 2;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Coefficient-space Selberg integrand on `M_n(Z_p)`: coordinates
/// `y_0 .. y_{n-1}` are the coefficients of `x^0 .. x^{n-1}`, so
/// `f(0) = y_0` and `f(1) = 1 + sum_j y_j`. The `n = 1` integrand has no
/// discriminant factor and never reads `c`.
pub(crate) fn theorem_integrand(p: u64, n: u32, a: C64, b: C64, c: C64) -> Result<PadicIntegrand> {
    let n = n as usize;
    let mut ig = PadicIntegrand::new(p, n);
    let mut w0 = vec![rat(0); n + 1];
    w0[1] = rat(1);
    ig.push(Box::new(AffineFactor::new(p, w0, a - 1.0)?));
    ig.push(Box::new(AffineFactor::new(p, vec![rat(1); n + 1], b - 1.0)?));
    if n >= 2 {
        ig.push(Box::new(DiscriminantFactor::new(p, n, c, DISC_GUARD)?));
    }
    Ok(ig)
}

/// Importance spec for sampling the coefficient-space integrand. The map
/// straightens both affine loci: `y_0 = u_0`, `y_j = u_j` for `j >= 2`,
/// `y_1 = u_1 - 1 - u_0 - sum_{j>=2} u_j`, so `f(0) = u_0` and
/// `f(1) = u_1` carry the singular mass on plain coordinates.
///
/// Rates are variance-checked for `n <= 3` only: along the one free
/// direction at `n = 3` the discriminant grows with degree 4, so any
/// outer rate below `2 - 8c` keeps the weight square-integrable; we take
/// half that margin. No such audit exists for `n = 4`.
pub(crate) fn theorem_mc_spec(n: u32, a: f64, b: f64, c: f64) -> Result<PadicMcSpec> {
    let n = n as usize;
    if !(2..=3).contains(&n) {
        return Err(Error::unsupported(format!(
            "sampling rates are only audited for n = 2, 3, got n = {n}"
        )));
    }
    let edge = 1.0 - 2.0 * (n as f64 - 1.0) * c;
    let mut densities = vec![
        PadicCoordDensity::balanced(a, edge - a)?,
        PadicCoordDensity::balanced(b, edge - b)?,
    ];
    for _ in 2..n {
        densities.push(PadicCoordDensity::balanced(1.0, (1.0 - 4.0 * c).min(1.0))?);
    }
    let mut spec = PadicMcSpec::new(densities).with_map(move |u| {
        let mut y = u.to_vec();
        let mut b1 = u[1].clone() - BigRational::one();
        b1 -= &u[0];
        for uj in &u[2..] {
            b1 -= uj;
        }
        y[1] = b1;
        y
    });
    // events below p^-16 have probability ~1e-11 per coordinate, far
    // under the statistical resolution; shorter digits keep the exact
    // arithmetic in the per-sample classification cheap
    spec.digits = 16;
    Ok(spec)
}

/// Reduce a p-integral rational to its residue in `F_p`.
fn residue_mod_p(x: &BigRational, field: &Arc<FqField>) -> Result<FqElem> {
    let p = field.order();
    let to_elem = |n: &num_bigint::BigInt| -> FqElem {
        let m = (n % p).abs();
        let r = u64::try_from(m).expect("|n mod p| < p fits in u64");
        let e = FqElem::from_residue(field, r);
        if n.is_negative() { e.neg() } else { e }
    };
    let den = to_elem(x.denom());
    if den.is_zero() {
        return Err(Error::unsupported(
            "polynomial coefficients must be p-integral".to_string(),
        ));
    }
    Ok(to_elem(x.numer()).mul(&den.inv()?))
}

/// Coordinate maps of `x^0, x^1, .., x^up_to` modulo `g` in the power
/// basis of `Q[x]/(g)`: entry `j` holds the basis coordinates of
/// `x^j mod g`.
fn power_maps(g: &MonicPoly<BigRational>, up_to: usize) -> Vec<Vec<BigRational>> {
    let m = g.degree();
    let mut maps = Vec::with_capacity(up_to + 1);
    let mut cur = vec![BigRational::zero(); m];
    cur[0] = BigRational::one();
    maps.push(cur.clone());
    for _ in 0..up_to {
        let top = cur[m - 1].clone();
        for k in (1..m).rev() {
            cur[k] = cur[k - 1].clone();
        }
        cur[0] = BigRational::zero();
        if !top.is_zero() {
            for k in 0..m {
                cur[k] -= &top * g.coeff(k);
            }
        }
        maps.push(cur.clone());
    }
    maps
}

/// Cell factor for `|R(G, f)|^theta = |f(theta_G)|_E^theta` over monic `f`
/// of degree `f_deg` in the coefficient coordinates `y_0 .. y_{f_deg-1}`.
///
/// Supported `G`: linear (the value lives in `Q_p` itself) or irreducible
/// in the residue field (the power basis is an unramified integral basis,
/// so the coordinate-minimum valuation of `NormFactor` is exact). Other
/// shapes would need factor-field arithmetic the engine does not model.
pub(crate) fn resultant_cell_factor(
    p: u64,
    g: &MonicPoly<BigRational>,
    f_deg: usize,
    theta: C64,
) -> Result<Box<dyn CellFactor>> {
    let m = g.degree();
    let maps = power_maps(g, f_deg);
    if m == 1 {
        let mut weights = vec![maps[f_deg][0].clone()];
        for j in 0..f_deg {
            weights.push(maps[j][0].clone());
        }
        return Ok(Box::new(AffineFactor::new(p, weights, theta)?));
    }
    let field = FqField::new(p, 1)?;
    let mut bar = Vec::with_capacity(m);
    for k in (0..m).rev() {
        bar.push(residue_mod_p(g.coeff(k), &field)?);
    }
    let gbar = MonicPoly::new(bar, FqElem::one(&field));
    let fac = factor_ff(&gbar);
    if fac.len() != 1 || fac[0].1 != 1 {
        return Err(Error::unsupported(format!(
            "G must be linear or irreducible mod p for the resultant factor, \
             got {} residue factors",
            fac.len()
        )));
    }
    let coords = (0..m)
        .map(|k| {
            let slopes = (0..f_deg).map(|j| maps[j][k].clone()).collect();
            (maps[f_deg][k].clone(), slopes)
        })
        .collect();
    Ok(Box::new(NormFactor::new(p, m as u32, coords, theta)?))
}

/// Integrand of the resultant-character identity: `|R(G, f)|^{s-1}` over
/// monic `f` of degree `deg G - 1`.
pub(crate) fn prop1_integrand(p: u64, g: &MonicPoly<BigRational>, s: f64) -> Result<PadicIntegrand> {
    let dim = g.degree() - 1;
    let mut ig = PadicIntegrand::new(p, dim);
    ig.push(resultant_cell_factor(p, g, dim, C64::new(s - 1.0, 0.0))?);
    Ok(ig)
}

/// Integrand of the three-character identity for `deg G = n - 1`:
/// `|f(0)|^{a-1} |f(1)|^{b-1} |R(G, f)|^{c-1}` over monic `f` of degree `n`.
pub(crate) fn prop2_integrand(
    p: u64,
    g: &MonicPoly<BigRational>,
    a: f64,
    b: f64,
    c: f64,
) -> Result<PadicIntegrand> {
    let dim = g.degree() + 1;
    let mut ig = PadicIntegrand::new(p, dim);
    let mut w0 = vec![rat(0); dim + 1];
    w0[1] = rat(1);
    ig.push(Box::new(AffineFactor::new(p, w0, C64::new(a - 1.0, 0.0))?));
    ig.push(Box::new(AffineFactor::new(
        p,
        vec![rat(1); dim + 1],
        C64::new(b - 1.0, 0.0),
    )?));
    ig.push(resultant_cell_factor(p, g, dim, C64::new(c - 1.0, 0.0))?);
    Ok(ig)
}

/// Root-space Selberg weight over the complex field:
/// `prod_i nsq(z_i)^{a-1} nsq(1 - z_i)^{b-1} prod_{i<j} nsq(z_i - z_j)^{2c}`
/// with `nsq` the square norm. Integrating this over `C^n` against
/// `complex_mc_integrate` gives `n!` times the coefficient-space value.
pub(crate) fn complex_selberg_integrand(a: f64, b: f64, c: f64) -> impl Fn(&[C64]) -> C64 + Sync {
    move |z: &[C64]| {
        let mut w = 1.0f64;
        for zi in z {
            w *= complex_norm(*zi).powf(a - 1.0);
            w *= complex_norm(C64::new(1.0, 0.0) - zi).powf(b - 1.0);
        }
        for i in 0..z.len() {
            for j in i + 1..z.len() {
                w *= complex_norm(z[i] - z[j]).powf(2.0 * c);
            }
        }
        C64::new(w, 0.0)
    }
}

/// Exhaustive finite-field Selberg sum,
/// `A(-1)^n sum_{f in M_n} A(f(0)) B(f(1)) C(Delta(f)) (-1)^{n - r(f)}`
/// with `r(f)` the number of distinct irreducible factors.
///
/// The factor-count sign is the splitting correction under the plain-sum
/// normalization `Gamma = +g`: each irreducible factor of degree `m`
/// contributes `(-1)^{m-1}` by the lifting relation for Gauss sums over
/// extensions, which collapses to `(-1)^{n - r(f)}`. Terms where any
/// character argument vanishes are dropped.
pub(crate) fn ff_selberg_sum(
    field: &Arc<FqField>,
    n: u32,
    ia: u64,
    ib: u64,
    ic: u64,
) -> Result<IntegralEstimate> {
    let cha = MultCharacter::new(field, ia);
    let chb = MultCharacter::new(field, ib);
    let chc = MultCharacter::new(field, ic);
    let est = ff_enumerate_sum(field, n, &|f| {
        let f0 = f.eval(&FqElem::from_residue(field, 0));
        let f1 = f.eval(&FqElem::one(field));
        let d = discriminant(f).expect("tame degree keeps the derivative nonzero");
        if f0.is_zero() || f1.is_zero() || d.is_zero() {
            return None;
        }
        let r = factor_ff(f).len() as u32;
        let mut v = cha.eval(&f0) * chb.eval(&f1) * chc.eval(&d);
        if (n - r) % 2 == 1 {
            v = -v;
        }
        Some(v)
    })?;
    let minus_one = FqElem::one(field).neg();
    Ok(est.scaled(cha.eval(&minus_one).powu(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::{padic_full_integrate, EngineConfig};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn power_maps_reduce_against_a_quadratic() {
        // g = x^2 + 1: x^2 = -1, x^3 = -x
        let g = MonicPoly::from_i64(&[0, 1]);
        let maps = power_maps(&g, 3);
        assert_eq!(maps[0], vec![rat(1), rat(0)]);
        assert_eq!(maps[1], vec![rat(0), rat(1)]);
        assert_eq!(maps[2], vec![rat(-1), rat(0)]);
        assert_eq!(maps[3], vec![rat(0), rat(-1)]);
    }

    #[test]
    fn linear_g_yields_the_evaluation_hyperplane() {
        // G = x - 2, f of degree 2: R(G, f) = f(2) = 4 + y_0 + 2 y_1
        let g = MonicPoly::from_i64(&[-2]);
        let f = resultant_cell_factor(5, &g, 2, c(-0.5)).unwrap();
        let y = [rat(1), rat(7)];
        let v = f.eval_point(&y).unwrap();
        // |4 + 1 + 14| = |19|_5 = 1
        assert!((v - c(1.0)).norm() < 1e-12);
        let sing = [rat(1), rat(-5)];
        // 4 + 1 - 10 = -5
        let w = f.eval_point(&sing).unwrap();
        assert!((w - c(5.0f64.powf(0.5))).norm() < 1e-12);
    }

    #[test]
    fn split_or_repeated_g_is_refused() {
        // x^2 - 1 splits mod 5; x^2 + 2x + 1 is a square everywhere
        for coeffs in [[0i64, -1], [2, 1]] {
            let g = MonicPoly::from_i64(&coeffs);
            assert!(matches!(
                resultant_cell_factor(5, &g, 1, c(0.5)),
                Err(Error::Unsupported { .. })
            ));
        }
    }

    #[test]
    fn sampling_spec_straightens_both_affine_loci() {
        use num_traits::ToPrimitive;
        let spec = theorem_mc_spec(3, 0.2, 0.2, 0.05).unwrap();
        let u = [rat(3), rat(11), rat(4)];
        let y = spec.to_y.as_ref().unwrap()(&u);
        // f(0) = y_0 = u_0 and f(1) = 1 + y_0 + y_1 + y_2 = u_1
        assert_eq!(y[0], rat(3));
        let f1: BigRational = BigRational::one() + &y[0] + &y[1] + &y[2];
        assert_eq!(f1.to_i64().unwrap(), 11);
        assert!(theorem_mc_spec(4, 0.1, 0.1, 0.02).is_err());
    }

    #[test]
    fn integrand_dimensions_follow_the_degree() {
        let ig = theorem_integrand(5, 1, c(0.3), c(0.4), c(9.0)).unwrap();
        assert_eq!(ig.dim(), 1);
        assert_eq!(ig.factors().len(), 2);
        let ig = theorem_integrand(5, 3, c(0.3), c(0.4), c(0.05)).unwrap();
        assert_eq!(ig.dim(), 3);
        assert_eq!(ig.factors().len(), 3);
        let g = MonicPoly::from_i64(&[0, 1]);
        assert_eq!(prop1_integrand(3, &g, 0.3).unwrap().dim(), 1);
        assert_eq!(prop2_integrand(5, &MonicPoly::from_i64(&[-2]), 0.25, 0.25, 0.1)
            .unwrap()
            .dim(), 2);
    }

    #[test]
    fn beta_via_the_degree_one_integrand() {
        // int |y|^{a-1} |1+y|^{b-1} dy = Gamma(a) Gamma(b) / Gamma(a+b)
        let ig = theorem_integrand(2, 1, c(0.3), c(0.4), c(123.0)).unwrap();
        let est = padic_full_integrate(&ig, &EngineConfig::default()).unwrap();
        let rhs = super::super::rhs::rhs_theorem_padic(2, 1, c(0.3), c(0.4), c(0.0)).unwrap();
        assert!((est.value - rhs).norm() <= est.certified_bound() + 1e-9);
    }

    #[test]
    fn ff_sum_is_exact_and_skips_singular_strata() {
        let field = FqField::new(5, 1).unwrap();
        let est = ff_selberg_sum(&field, 2, 2, 2, 1).unwrap();
        assert_eq!(est.cert_err, 0.0);
        assert_eq!(est.samples, 25);
        assert!(est.aborted > 0, "characters vanish somewhere");
    }
}
