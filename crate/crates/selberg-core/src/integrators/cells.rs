//! Certified stratified integration over p-adic coefficient space.
//!
//! The domain is cut into anisotropic ultrametric cells
//! `center + prod_i p^{k_i} Z_p`. On each cell every factor either
//! certifies an exact constant value or the cell is handled by a
//! closed-form kernel, subdivided, or (at the depth cap) charged to the
//! certified error through sound mean/sup bounds. All decisions run on
//! exact rationals; floating point only accumulates values whose shape is
//! already decided.
//!
//! Cells are refined only along the coordinates the open factors ask
//! for. That directional splitting is what keeps collision tubes cheap:
//! where two zero loci run close together, the transversal coordinate is
//! already resolved and each refinement step multiplies the cell count by
//! p instead of p^dim, until a pair kernel closes the whole tube in one
//! cell.
//!
//! Full-space integrals add valuation shells outward until the increments
//! fall below tolerance, then close the tail either exactly (geometric in
//! closed form, one-dimensional integrands whose factors all expose a tail
//! profile) or through a geometric fit with a safety factor, reported
//! separately so the caller can see what was modelled rather than proved.

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::Error;
use crate::fields::padic::p_power_rational;
use crate::fields::rational_valuation;
use crate::integrators::estimate::{IntegralEstimate, TailReport};
use crate::integrators::factors::{ball_kernel, qc, qr, AffineView, CellFactor};
use crate::polylab::determinant;
use crate::{C64, Result};

/// Product of certifiable factors with a constant prefactor.
pub struct PadicIntegrand {
    p: u64,
    dim: usize,
    factors: Vec<Box<dyn CellFactor>>,
    prefactor: C64,
}

impl PadicIntegrand {
    pub fn new(p: u64, dim: usize) -> Self {
        assert!(dim >= 1, "integrand needs at least one coordinate");
        PadicIntegrand {
            p,
            dim,
            factors: Vec::new(),
            prefactor: C64::new(1.0, 0.0),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn prefactor(&self) -> C64 {
        self.prefactor
    }

    pub fn scale_prefactor(&mut self, c: C64) {
        self.prefactor *= c;
    }

    pub fn push(&mut self, factor: Box<dyn CellFactor>) {
        self.factors.push(factor);
    }

    pub fn factors(&self) -> &[Box<dyn CellFactor>] {
        &self.factors
    }

    /// Exact pointwise value (Monte Carlo path). Includes the prefactor.
    pub fn eval_point(&self, y: &[BigRational]) -> Result<C64> {
        debug_assert_eq!(y.len(), self.dim);
        let mut v = self.prefactor;
        for f in &self.factors {
            v *= f.eval_point(y)?;
        }
        Ok(v)
    }
}

/// Knobs of the certified engine. Depths are relative to the starting
/// box; `base_depth + extra_depth` caps the subdivision, after which
/// unresolved cells are charged to the certified error. Splits are
/// directional, so depth measures refinement along the worst coordinate,
/// not cell count.
#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub base_depth: u32,
    pub extra_depth: u32,
    /// Total cells processed across one integral.
    pub cell_budget: u64,
    /// Outermost valuation shell for full-space integrals.
    pub max_shells: u32,
    /// Consecutive increments used for the geometric tail fit.
    pub tail_window: u32,
    /// The fitted decay exponent is only trusted up to this factor; the
    /// tail bound uses ratio^(1/tail_safety).
    pub tail_safety: f64,
    /// Shell loop stops once increments fall below this, relatively.
    pub rel_tol: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            base_depth: 6,
            extra_depth: 58,
            cell_budget: 4_000_000,
            max_shells: 200,
            tail_window: 3,
            tail_safety: 4.0,
            rel_tol: 1e-12,
        }
    }
}

struct TreeOutcome {
    value: C64,
    resid: f64,
    cells: u64,
}

/// Integrate over one cell by adaptive certification. Exact decisions,
/// closed-form kernels, and a sound residual at the depth cap.
fn integrate_tree(
    integrand: &PadicIntegrand,
    center: Vec<BigRational>,
    ks: Vec<i64>,
    cfg: &EngineConfig,
    budget: &mut u64,
) -> Result<TreeOutcome> {
    let p = integrand.p;
    let max_depth = cfg.base_depth + cfg.extra_depth;
    let mut stack: Vec<(Vec<BigRational>, Vec<i64>, u32)> = vec![(center, ks, 0)];
    let mut out = TreeOutcome {
        value: C64::new(0.0, 0.0),
        resid: 0.0,
        cells: 0,
    };

    while let Some((c, ks, depth)) = stack.pop() {
        if *budget == 0 {
            return Err(Error::budget(format!(
                "cell budget exhausted at depth {depth} (finest exponent {})",
                ks.iter().max().copied().unwrap_or(0)
            )));
        }
        *budget -= 1;
        out.cells += 1;

        let mut cert = C64::new(1.0, 0.0);
        let mut open: Vec<usize> = Vec::new();
        for (i, f) in integrand.factors.iter().enumerate() {
            match f.certify(&c, &ks)? {
                Some(v) => cert *= v,
                None => open.push(i),
            }
        }
        let mass = qr(p, -(ks.iter().sum::<i64>() as f64));
        if open.is_empty() {
            out.value += cert * mass;
            continue;
        }

        if let Some(mean) = kernel_value(integrand, &c, &ks, &open)? {
            out.value += cert * mean * mass;
            continue;
        }

        if depth < max_depth {
            let mut split: Vec<usize> = Vec::new();
            for &i in &open {
                for j in integrand.factors[i].split_request(&c, &ks) {
                    if !split.contains(&j) {
                        split.push(j);
                    }
                }
            }
            if split.is_empty() {
                split = (0..integrand.dim).collect();
            }
            split.sort_unstable();
            push_children(&mut stack, &c, &ks, depth, p, &split);
            continue;
        }

        out.resid += cert.norm() * mass * residual_mean(integrand, &c, &ks, &open)?;
    }
    Ok(out)
}

/// Closed-form mean of the open factors over the cell, when available:
/// a joint change of variables for affine factors whose normalized linear
/// parts form a unimodular minor, a single factor's own cell kernel, or a
/// pair kernel between a factor and an affine partner. The certified
/// constants are multiplied back in by the caller.
fn kernel_value(
    integrand: &PadicIntegrand,
    c: &[BigRational],
    ks: &[i64],
    open: &[usize],
) -> Result<Option<C64>> {
    let factors = integrand.factors();
    let views: Option<Vec<AffineView<'_>>> =
        open.iter().map(|&i| factors[i].affine_view()).collect();
    if let Some(views) = views {
        if let Some(v) = joint_affine_mean(integrand.p, &views, ks)? {
            return Ok(Some(v));
        }
    }
    if open.len() == 1 {
        if let Some(v) = factors[open[0]].cell_kernel(c, ks)? {
            return Ok(Some(v));
        }
    }
    if open.len() == 2 {
        for (host, partner) in [(open[0], open[1]), (open[1], open[0])] {
            if let Some(view) = factors[partner].affine_view() {
                if let Some(v) = factors[host].pair_kernel(&view, c, ks)? {
                    return Ok(Some(v));
                }
            }
        }
    }
    Ok(None)
}

/// Exact joint mean of open affine factors. Each image is the full ball
/// `p^{kappa_j} Z_p` (the factors did not certify); when the slope rows,
/// normalized to that scale, contain a unimodular minor, the features are
/// jointly uniform on the product of their balls and the mean splits into
/// one-dimensional kernels.
fn joint_affine_mean(p: u64, views: &[AffineView<'_>], ks: &[i64]) -> Result<Option<C64>> {
    let dim = ks.len();
    if views.len() > dim {
        return Ok(None);
    }
    let mut kappas = Vec::with_capacity(views.len());
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(views.len());
    for view in views {
        let kap = view
            .slopes
            .iter()
            .zip(ks)
            .filter_map(|(w, &k)| rational_valuation(w, p).map(|v| v + k))
            .min()
            .expect("affine factor has a nonzero slope");
        rows.push(
            view.slopes
                .iter()
                .zip(ks)
                .map(|(w, &k)| w * p_power_rational(p, k - kap))
                .collect(),
        );
        kappas.push(kap);
    }
    let mut taken = vec![false; dim];
    let mut assigned = Vec::with_capacity(rows.len());
    for row in &rows {
        let pivot = (0..dim).find(|&i| !taken[i] && rational_valuation(&row[i], p) == Some(0));
        match pivot {
            Some(i) => {
                taken[i] = true;
                assigned.push(i);
            }
            None => return Ok(None),
        }
    }
    let minor: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|row| assigned.iter().map(|&i| row[i].clone()).collect())
        .collect();
    let det = determinant(minor)?;
    if rational_valuation(&det, p) != Some(0) {
        return Ok(None);
    }
    let mut mean = C64::new(1.0, 0.0);
    for (view, kap) in views.iter().zip(kappas) {
        mean *= qc(p, -view.theta * kap as f64) * ball_kernel(p, 0, view.theta)?;
    }
    Ok(Some(mean))
}

fn push_children(
    stack: &mut Vec<(Vec<BigRational>, Vec<i64>, u32)>,
    c: &[BigRational],
    ks: &[i64],
    depth: u32,
    p: u64,
    split: &[usize],
) {
    let mut digits = vec![0u64; split.len()];
    loop {
        let mut child = c.to_vec();
        let mut child_ks = ks.to_vec();
        for (slot, &i) in split.iter().enumerate() {
            if digits[slot] != 0 {
                child[i] += p_power_rational(p, ks[i])
                    * BigRational::from_integer(digits[slot].into());
            }
            child_ks[i] += 1;
        }
        stack.push((child, child_ks, depth + 1));
        let mut slot = 0;
        loop {
            if slot == digits.len() {
                return;
            }
            digits[slot] += 1;
            if digits[slot] < p {
                break;
            }
            digits[slot] = 0;
            slot += 1;
        }
    }
}

/// Sound bound on the mean of the open factors over the cell: one factor
/// contributes its mean bound, the others their sup bounds; take the best
/// assignment, with the all-sup product as fallback. Infinite when nothing
/// integrable is known, which the caller reports rather than hides.
fn residual_mean(
    integrand: &PadicIntegrand,
    c: &[BigRational],
    ks: &[i64],
    open: &[usize],
) -> Result<f64> {
    let mut sups = Vec::with_capacity(open.len());
    for &i in open {
        sups.push(integrand.factors[i].sup_bound(c, ks)?);
    }
    let all_sup: f64 = sups.iter().product();
    let mut best = all_sup;
    for (pos, &i) in open.iter().enumerate() {
        if let Ok(mean) = integrand.factors[i].mean_bound(c, ks) {
            let others: f64 = sups
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != pos)
                .map(|(_, s)| s)
                .product();
            best = best.min(mean * others);
        }
    }
    if best.is_nan() {
        return Ok(f64::INFINITY);
    }
    Ok(best)
}

/// Integrate over the box `(p^{-m} Z_p)^dim`.
pub fn padic_box_integrate(
    integrand: &PadicIntegrand,
    m: u32,
    cfg: &EngineConfig,
) -> Result<IntegralEstimate> {
    let mut budget = cfg.cell_budget;
    let center = vec![BigRational::zero(); integrand.dim];
    let ks = vec![-(m as i64); integrand.dim];
    let out = integrate_tree(integrand, center, ks, cfg, &mut budget)?;
    let mut est = IntegralEstimate::exact(out.value);
    est.cert_err = out.resid;
    est.strata = out.cells;
    Ok(est.scaled(integrand.prefactor))
}

/// Top-level cells of the valuation shell `box(m) \ box(m-1)`: the
/// children of the larger box minus the one that is the smaller box.
fn shell_cells(p: u64, dim: usize, m: u32) -> Vec<Vec<BigRational>> {
    let step = p_power_rational(p, -(m as i64));
    let mut digits = vec![0u64; dim];
    let mut cells = Vec::new();
    loop {
        if digits.iter().any(|&d| d != 0) {
            cells.push(
                digits
                    .iter()
                    .map(|&d| &step * BigRational::from_integer(d.into()))
                    .collect(),
            );
        }
        let mut i = 0;
        loop {
            if i == dim {
                return cells;
            }
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Exact closed form for all shells `m >= threshold` of a one-dimensional
/// integrand whose factors all expose tail profiles.
struct ExactTail {
    threshold: i64,
    /// Increment of shell m is `unit * p^m * prod_i p^{(m - v_i) theta_i}`.
    profiles: Vec<(i64, C64)>,
}

impl ExactTail {
    fn of(integrand: &PadicIntegrand) -> Option<ExactTail> {
        if integrand.dim != 1 {
            return None;
        }
        let mut threshold = 1i64;
        let mut profiles = Vec::new();
        for f in &integrand.factors {
            let t = f.tail_profile()?;
            threshold = threshold.max(t.threshold);
            profiles.push((t.v_base, t.theta_eff));
        }
        Some(ExactTail { threshold, profiles })
    }

    fn increment(&self, p: u64, m: i64) -> C64 {
        let mut v = C64::new(1.0 - 1.0 / p as f64, 0.0) * qr(p, m as f64);
        for &(v_base, theta) in &self.profiles {
            v *= qc(p, theta * (m - v_base) as f64);
        }
        v
    }

    fn ratio(&self, p: u64) -> C64 {
        let total: C64 = self.profiles.iter().map(|&(_, t)| t).sum::<C64>() + 1.0;
        qc(p, total)
    }
}

/// Integrate over the whole coefficient space: unit box plus valuation
/// shells, closed off by an exact tail when the structure allows it and a
/// fitted, safety-padded geometric bound otherwise.
pub fn padic_full_integrate(
    integrand: &PadicIntegrand,
    cfg: &EngineConfig,
) -> Result<IntegralEstimate> {
    let p = integrand.p;
    let mut budget = cfg.cell_budget;
    let center = vec![BigRational::zero(); integrand.dim];
    let box0 = integrate_tree(integrand, center, vec![0; integrand.dim], cfg, &mut budget)?;

    let mut value = box0.value;
    let mut resid = box0.resid;
    let mut cells = box0.cells;
    let exact_tail = ExactTail::of(integrand);
    let mut increments: Vec<f64> = Vec::new();
    let mut tail: Option<TailReport> = None;
    let mut quiet = 0u32;

    for m in 1..=cfg.max_shells as i64 {
        if let Some(t) = &exact_tail {
            if m >= t.threshold {
                let ratio = t.ratio(p);
                if ratio.norm() >= 1.0 {
                    return Err(Error::tail(format!(
                        "outer shells grow by |ratio| = {} >= 1; the integral diverges",
                        ratio.norm()
                    )));
                }
                value += t.increment(p, m) / (C64::new(1.0, 0.0) - ratio);
                tail = Some(TailReport {
                    bound: 0.0,
                    shells: (m - 1) as u32,
                    ratio: ratio.norm(),
                    safety: 1.0,
                    exact: true,
                });
                break;
            }
        }

        let mut shell = C64::new(0.0, 0.0);
        for c in shell_cells(p, integrand.dim, m as u32) {
            let ks = vec![-m + 1; integrand.dim];
            let out = integrate_tree(integrand, c, ks, cfg, &mut budget)?;
            shell += out.value;
            resid += out.resid;
            cells += out.cells;
        }
        value += shell;
        increments.push(shell.norm());

        if shell.norm() <= cfg.rel_tol * value.norm() {
            quiet += 1;
            if quiet >= cfg.tail_window.max(1) {
                tail = Some(fit_tail(&increments, cfg, m as u32)?);
                break;
            }
        } else {
            quiet = 0;
        }
    }

    let tail = match tail {
        Some(t) => t,
        None => fit_tail(&increments, cfg, cfg.max_shells)?,
    };

    let mut est = IntegralEstimate::exact(value);
    est.cert_err = resid;
    est.strata = cells;
    est.tail = Some(tail);
    Ok(est.scaled(integrand.prefactor))
}

/// Geometric model of the unprocessed shells: decay ratio fitted over the
/// last window, padded by the safety factor. A model, not a proof, which
/// is why the bound is reported separately from the certified residual.
fn fit_tail(increments: &[f64], cfg: &EngineConfig, shells: u32) -> Result<TailReport> {
    let last = match increments.last() {
        Some(&l) => l,
        None => {
            return Ok(TailReport {
                bound: 0.0,
                shells,
                ratio: 0.0,
                safety: cfg.tail_safety,
                exact: false,
            })
        }
    };
    if last == 0.0 {
        return Ok(TailReport {
            bound: 0.0,
            shells,
            ratio: 0.0,
            safety: cfg.tail_safety,
            exact: false,
        });
    }
    let window = (cfg.tail_window as usize).min(increments.len().saturating_sub(1)).max(1);
    let mut ratio: f64 = 0.0;
    if increments.len() >= 2 {
        for w in increments.windows(2).rev().take(window) {
            ratio = ratio.max(w[1] / w[0]);
        }
    } else {
        ratio = 0.5;
    }
    if !(ratio < 1.0) {
        return Err(Error::tail(format!(
            "shell increments are not decreasing (fitted ratio {ratio:.4})"
        )));
    }
    let padded = ratio.powf(1.0 / cfg.tail_safety.max(1.0));
    Ok(TailReport {
        bound: last * padded / (1.0 - padded),
        shells,
        ratio,
        safety: cfg.tail_safety,
        exact: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{gamma_padic, QuasiCharacter};
    use crate::integrators::factors::{AffineFactor, DiscriminantFactor};
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn power_integrand(p: u64, s: f64) -> PadicIntegrand {
        let mut ig = PadicIntegrand::new(p, 1);
        ig.push(Box::new(
            AffineFactor::new(p, vec![rat(0, 1), rat(1, 1)], c(s - 1.0)).unwrap(),
        ));
        ig
    }

    #[test]
    fn unit_box_volume_is_exact() {
        // No factors: the constant 1 over Z_p^2.
        let ig = PadicIntegrand::new(5, 2);
        let est = padic_box_integrate(&ig, 0, &EngineConfig::default()).unwrap();
        assert_eq!(est.value, c(1.0));
        assert_eq!(est.cert_err, 0.0);
        assert_eq!(est.strata, 1);
    }

    #[test]
    fn box_scaling_tracks_the_measure() {
        let ig = PadicIntegrand::new(3, 2);
        let est = padic_box_integrate(&ig, 2, &EngineConfig::default()).unwrap();
        // (p^{-2} Z_3)^2 has mass p^4.
        assert!((est.value.re - 81.0).abs() < 1e-12);
    }

    #[test]
    fn power_integral_over_unit_ball_is_the_shell_series() {
        // int_{Z_p} |y|^{s-1} dy = (1 - 1/p) / (1 - p^{-s}), one kernel cell.
        let ig = power_integrand(5, 0.3);
        let est = padic_box_integrate(&ig, 0, &EngineConfig::default()).unwrap();
        let expect = (1.0 - 0.2) / (1.0 - 5f64.powf(-0.3));
        assert!((est.value.re - expect).abs() < 1e-14);
        assert_eq!(est.cert_err, 0.0);
        assert_eq!(est.strata, 1, "the kernel resolves the box in one cell");
    }

    #[test]
    fn shell_additivity_of_boxes() {
        // box(1) = box(0) + shell(1), exactly, cell by cell.
        let ig = power_integrand(7, 0.45);
        let cfg = EngineConfig::default();
        let b1 = padic_box_integrate(&ig, 1, &cfg).unwrap().value;
        let b0 = padic_box_integrate(&ig, 0, &cfg).unwrap().value;
        let mut budget = cfg.cell_budget;
        let mut shell = C64::new(0.0, 0.0);
        for cell in shell_cells(7, 1, 1) {
            shell += integrate_tree(&ig, cell, vec![0], &cfg, &mut budget)
                .unwrap()
                .value;
        }
        assert!((b1 - (b0 + shell)).norm() < 1e-15);
    }

    #[test]
    fn beta_factor_integral_matches_gamma_ratio() {
        // int_{Q_p} |y|^{a-1} |1-y|^{b-1} dy = Gamma(a) Gamma(b) / Gamma(a+b)
        // in the unramified quasi-character parametrization.
        let (a, b) = (0.3, 0.25);
        let p = 5u64;
        let mut ig = PadicIntegrand::new(p, 1);
        ig.push(Box::new(
            AffineFactor::new(p, vec![rat(0, 1), rat(1, 1)], c(a - 1.0)).unwrap(),
        ));
        ig.push(Box::new(
            AffineFactor::new(p, vec![rat(1, 1), rat(-1, 1)], c(b - 1.0)).unwrap(),
        ));
        let est = padic_full_integrate(&ig, &EngineConfig::default()).unwrap();
        let g = |s: f64| gamma_padic(p, 0, &QuasiCharacter::unramified(c(s))).unwrap();
        let expect = g(a) * g(b) / g(a + b);
        assert!(
            (est.value - expect).norm() < 1e-12,
            "engine {} vs gamma ratio {expect}",
            est.value
        );
        assert!(est.tail.unwrap().exact);
        assert_eq!(est.cert_err, 0.0, "all cells certify or integrate exactly");
    }

    #[test]
    fn joint_affine_kernel_keeps_the_error_at_zero() {
        // Two features vanishing at the same point with independent linear
        // parts: |y_0|^{a-1} |y_0 + y_1|^{b-1} over Z_p^2 resolves through
        // the joint change of variables, not subdivision.
        let p = 5u64;
        let mut ig = PadicIntegrand::new(p, 2);
        ig.push(Box::new(
            AffineFactor::new(p, vec![rat(0, 1), rat(1, 1), rat(0, 1)], c(-0.7)).unwrap(),
        ));
        ig.push(Box::new(
            AffineFactor::new(p, vec![rat(0, 1), rat(1, 1), rat(1, 1)], c(-0.75)).unwrap(),
        ));
        let est = padic_box_integrate(&ig, 0, &EngineConfig::default()).unwrap();
        assert_eq!(est.cert_err, 0.0);
        assert_eq!(est.strata, 1);
        // Separable after (u, v) = (y_0, y_0 + y_1): product of kernels.
        let k = |t: f64| (1.0 - 1.0 / p as f64) / (1.0 - (p as f64).powf(-(t + 1.0)));
        assert!((est.value.re - k(-0.7) * k(-0.75)).abs() < 1e-13);
    }

    #[test]
    fn quadratic_moment_matches_the_gamma_product() {
        // int over Q_p^2 of |b_0|^{a-1} |1 + b_1 + b_0|^{b-1}
        // |disc f|^{c-1/2} corr db for f = x^2 + b_1 x + b_0, with the
        // splitting correction of the discriminant factor. The closed form
        // is a two-step product of unramified gamma factors. This drives
        // every kernel at once: joint affine cells, solo discriminant
        // cells, frozen-separation pairs, and the tangent ladders where a
        // linear zero locus touches the discriminant parabola.
        let p = 5u64;
        let (a, b, cc) = (0.3, 0.25, 0.15);
        let mut ig = PadicIntegrand::new(p, 2);
        ig.push(Box::new(
            AffineFactor::new(p, vec![rat(0, 1), rat(1, 1), rat(0, 1)], c(a - 1.0)).unwrap(),
        ));
        ig.push(Box::new(
            AffineFactor::new(p, vec![rat(1, 1), rat(1, 1), rat(1, 1)], c(b - 1.0)).unwrap(),
        ));
        ig.push(Box::new(DiscriminantFactor::new(p, 2, c(cc), 2).unwrap()));
        let est = padic_full_integrate(&ig, &EngineConfig::default()).unwrap();
        let g = |s: f64| gamma_padic(p, 0, &QuasiCharacter::unramified(c(s))).unwrap();
        let expect = g(a) * g(b) / g(a + b + cc)
            * (g(a + cc) * g(b + cc) * g(2.0 * cc) / (g(a + b + 2.0 * cc) * g(cc)));
        assert!(
            (est.value - expect).norm() < 1e-9 * expect.norm(),
            "engine {} vs gamma product {expect}",
            est.value
        );
        assert!(est.cert_err < 1e-12, "every cell resolves through a kernel");
        assert!(est.strata < 100_000, "directional splitting stays linear");
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let ig = power_integrand(5, 0.3);
        let cfg = EngineConfig {
            cell_budget: 0,
            ..EngineConfig::default()
        };
        match padic_box_integrate(&ig, 0, &cfg) {
            Err(Error::BudgetExhausted { .. }) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn divergent_tail_is_an_error_not_a_number() {
        // |y|^{s-1} alone integrates near 0 for s > 0 but its outer shells
        // carry mass p^{ms}: divergent for every s, and the engine must say
        // so instead of truncating.
        let ig = power_integrand(5, 0.3);
        match padic_full_integrate(&ig, &EngineConfig::default()) {
            Err(Error::TailNotDecaying { .. }) => {}
            other => panic!("expected tail error, got {other:?}"),
        }
    }
}
