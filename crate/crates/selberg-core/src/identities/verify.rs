//! One entry point per case: admissibility check, engine run, closed-form
//! evaluation, and the gate that compares them with the combined error
//! budget.

use std::fmt;
use std::time::Instant;

use num_rational::BigRational;

use crate::characters::{gamma_padic, gamma_via_integral};
use crate::integrators::{
    complex_mc_integrate, padic_full_integrate, padic_mc_integrate, trace_hyperplane_integrate,
    ComplexMcSpec, EngineConfig, HyperplaneComponent, IntegralEstimate,
};
use crate::polylab::MonicPoly;
use crate::{C64, Result};

use super::case::{GenBetaComponent, IdentityCase, PadicMode};
use super::rhs::{labeled, unram};
use super::{lhs, rhs};

/// Slack added to every gate on top of the engine bounds; absorbs float
/// roundoff in the closed forms themselves.
const GATE_FLOOR: f64 = 1e-9;

/// Outcome of one verification run. `pass` means
/// `abs_dev <= cert_err + 3 mc_sigma + 1e-9`; everything feeding that
/// decision is carried alongside so reports never need a rerun.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub case: IdentityCase,
    pub lhs: C64,
    pub rhs: C64,
    /// Certified part of the error budget, including any propagated
    /// factor from a second engine run.
    pub cert_err: f64,
    /// Combined Monte Carlo standard error; zero for certified runs.
    pub mc_sigma: f64,
    pub abs_dev: f64,
    /// Deviation relative to `|rhs|` (absolute when the RHS vanishes).
    pub rel_dev: f64,
    /// Deviation in units of `mc_sigma`; zero when nothing was sampled.
    pub sigma_dist: f64,
    pub gate: f64,
    pub pass: bool,
    pub samples: u64,
    pub notes: Vec<String>,
    pub runtime_ms: u64,
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            w,
            "[{}] {} {} {} dev={:.3e} gate={:.3e}",
            if self.pass { "pass" } else { "FAIL" },
            self.case.id(),
            self.case.backend(),
            self.case.params(),
            self.abs_dev,
            self.gate,
        )
    }
}

/// Verify a case with the default engine configuration.
pub fn verify(case: &IdentityCase) -> Result<VerificationReport> {
    verify_with(case, &EngineConfig::default())
}

/// Verify a case. The region check runs first, so an inadmissible case
/// returns an error without touching any engine; engine failures
/// (budget, tail, unsupported shapes) propagate as errors rather than
/// being folded into `pass`.
pub fn verify_with(case: &IdentityCase, cfg: &EngineConfig) -> Result<VerificationReport> {
    case.region_check()?;
    let start = Instant::now();
    let (est, rhs_val, extra_cert, extra_sigma) = evaluate(case, cfg)?;
    let cert_err = est.certified_bound() + extra_cert;
    let mc_sigma = (est.mc_sigma.powi(2) + extra_sigma.powi(2)).sqrt();
    let abs_dev = (est.value - rhs_val).norm();
    let rel_dev = if rhs_val.norm() > 0.0 {
        abs_dev / rhs_val.norm()
    } else {
        abs_dev
    };
    let gate = cert_err + 3.0 * mc_sigma + GATE_FLOOR;
    Ok(VerificationReport {
        case: case.clone(),
        lhs: est.value,
        rhs: rhs_val,
        cert_err,
        mc_sigma,
        abs_dev,
        rel_dev,
        sigma_dist: if mc_sigma > 0.0 { abs_dev / mc_sigma } else { 0.0 },
        gate,
        pass: abs_dev <= gate,
        samples: est.samples,
        notes: est.notes.clone(),
        runtime_ms: start.elapsed().as_millis() as u64,
    })
}

fn c64(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn factorial(n: u32) -> f64 {
    (1..=n as u64).product::<u64>() as f64
}

fn to_hyperplane(comp: &GenBetaComponent) -> HyperplaneComponent {
    let base = HyperplaneComponent::new(comp.f, c64(comp.s));
    if comp.twist.is_empty() {
        base
    } else {
        base.twisted(
            comp.twist
                .iter()
                .map(|&t| BigRational::from_integer(t.into()))
                .collect(),
        )
    }
}

/// Engine estimate, closed-form value, and the certified / statistical
/// error carried over from any secondary run.
fn evaluate(
    case: &IdentityCase,
    cfg: &EngineConfig,
) -> Result<(IntegralEstimate, C64, f64, f64)> {
    match case {
        IdentityCase::GammaIntegral { q, d, s } => {
            let chi = unram(c64(*s));
            let est = IntegralEstimate::exact(gamma_via_integral(*q, *d, &chi)?);
            Ok((est, gamma_padic(*q, *d, &chi)?, 0.0, 0.0))
        }
        IdentityCase::Beta { p, a, b } => {
            let (ca, cb) = (c64(*a), c64(*b));
            let ig = lhs::theorem_integrand(*p, 1, ca, cb, c64(0.0))?;
            let est = padic_full_integrate(&ig, cfg)?;
            Ok((est, rhs::rhs_theorem_padic(*p, 1, ca, cb, c64(0.0))?, 0.0, 0.0))
        }
        IdentityCase::GenBeta { p, components } => {
            let comps: Vec<HyperplaneComponent> = components.iter().map(to_hyperplane).collect();
            let est = trace_hyperplane_integrate(*p, &comps, cfg)?;
            Ok((est, rhs::rhs_gen_beta(*p, &comps)?, 0.0, 0.0))
        }
        IdentityCase::Prop1 { p, g, s } => {
            let gp = MonicPoly::from_i64(g);
            let est = if gp.degree() == 1 {
                // degree-zero f: the domain is the single point f = 1 and
                // R(G, 1) = 1, so the integral is the mass of the point
                IntegralEstimate::exact(c64(1.0))
            } else {
                padic_full_integrate(&lhs::prop1_integrand(*p, &gp, *s)?, cfg)?
            };
            Ok((est, rhs::rhs_prop1(*p, &gp, *s)?, 0.0, 0.0))
        }
        IdentityCase::Prop2 { p, g, a, b, c } => {
            let gp = MonicPoly::from_i64(g);
            let est = padic_full_integrate(&lhs::prop2_integrand(*p, &gp, *a, *b, *c)?, cfg)?;
            Ok((est, rhs::rhs_prop2(*p, &gp, *a, *b, *c)?, 0.0, 0.0))
        }
        IdentityCase::Theorem { p, n, a, b, c, mode } => {
            let (ca, cb, cc) = (c64(*a), c64(*b), c64(*c));
            let ig = lhs::theorem_integrand(*p, *n, ca, cb, cc)?;
            let est = match mode {
                PadicMode::Certified => padic_full_integrate(&ig, cfg)?,
                PadicMode::Mc { samples, seed } => {
                    let spec = lhs::theorem_mc_spec(*n, *a, *b, *c)?;
                    padic_mc_integrate(&ig, &spec, *samples, *seed)?
                }
            };
            Ok((est, rhs::rhs_theorem_padic(*p, *n, ca, cb, cc)?, 0.0, 0.0))
        }
        IdentityCase::Recursion { p, n, a, b, c } => {
            let (ca, cb, cc) = (c64(*a), c64(*b), c64(*c));
            let top = padic_full_integrate(&lhs::theorem_integrand(*p, *n, ca, cb, cc)?, cfg)?;
            let down = padic_full_integrate(
                &lhs::theorem_integrand(*p, *n - 1, ca + cc, cb + cc, cc)?,
                cfg,
            )?;
            // S_n(a,b,c) = G(a) G(b) G(nc) / (G(a+b+(n-1)c) G(c))
            //            * S_{n-1}(a+c, b+c, c)
            let g = |z: C64, label: &str| labeled(gamma_padic(*p, 0, &unram(z)), label);
            let factor = g(ca, "Gamma(a)")? * g(cb, "Gamma(b)")?
                * g(cc * *n as f64, "Gamma(nc)")?
                / (g(ca + cb + cc * (*n as f64 - 1.0), "Gamma(a+b+(n-1)c)")?
                    * g(cc, "Gamma(c)")?);
            let rhs_val = down.value * factor;
            Ok((
                top,
                rhs_val,
                down.certified_bound() * factor.norm(),
                down.mc_sigma * factor.norm(),
            ))
        }
        IdentityCase::ComplexAomoto { n, a, b, c, samples, seed } => {
            let tail = 2.0 - a - b - 2.0 * (*n as f64 - 1.0) * c;
            let spec = ComplexMcSpec::new(*a, *b, tail)?;
            let f = lhs::complex_selberg_integrand(*a, *b, *c);
            let est = complex_mc_integrate(&f, *n as usize, &spec, *samples, *seed)?;
            // root coordinates overcount the coefficient space n! times
            let rhs_val = rhs::rhs_theorem_complex(*n, c64(*a), c64(*b), c64(*c))?
                * factorial(*n);
            Ok((est, rhs_val, 0.0, 0.0))
        }
        IdentityCase::FfSelberg { q, n, ia, ib, ic } => {
            let (p, k) = super::case::prime_power(*q)?;
            let field = crate::fields::FqField::new(p, k)?;
            let est = lhs::ff_selberg_sum(&field, *n, *ia, *ib, *ic)?;
            Ok((est, rhs::rhs_ff_selberg(&field, *n, *ia, *ib, *ic)?, 0.0, 0.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn gamma_integral_cases_agree_to_machine_precision() {
        for (q, d) in [(2, 0), (9, 1), (25, 2)] {
            let rep = verify(&IdentityCase::GammaIntegral { q, d, s: 0.35 }).unwrap();
            assert!(rep.pass, "{rep}");
            assert!(rep.abs_dev < 1e-12, "{rep}");
            assert_eq!(rep.mc_sigma, 0.0);
        }
    }

    #[test]
    fn beta_cases_close_the_certified_gate() {
        for (p, a, b) in [(2, 0.3, 0.4), (5, 0.2, 0.2)] {
            let rep = verify(&IdentityCase::Beta { p, a, b }).unwrap();
            assert!(rep.pass, "{rep}");
            assert_eq!(rep.mc_sigma, 0.0);
        }
    }

    #[test]
    fn theorem_at_n_one_reproduces_beta_bitwise() {
        let beta = verify(&IdentityCase::Beta { p: 5, a: 0.3, b: 0.4 }).unwrap();
        let thm = verify(&IdentityCase::Theorem {
            p: 5,
            n: 1,
            a: 0.3,
            b: 0.4,
            c: 7.5,
            mode: PadicMode::Certified,
        })
        .unwrap();
        assert_eq!(beta.lhs, thm.lhs);
        assert_eq!(beta.rhs, thm.rhs);
    }

    #[test]
    fn untwisted_components_close_the_gate() {
        let case = IdentityCase::GenBeta {
            p: 3,
            components: vec![GenBetaComponent::new(1, 0.3), GenBetaComponent::new(1, 0.4)],
        };
        let rep = verify(&case).unwrap();
        assert!(rep.pass, "{rep}");
    }

    #[test]
    fn trivial_resultant_case_is_exact() {
        let rep = verify(&IdentityCase::Prop1 { p: 5, g: vec![-7], s: 0.3 }).unwrap();
        assert!(rep.pass, "{rep}");
        assert_eq!(rep.cert_err, 0.0);
        assert!(rep.abs_dev < 1e-12, "{rep}");
    }

    #[test]
    fn recursion_step_balances_with_propagated_errors() {
        let rep = verify(&IdentityCase::Recursion {
            p: 3,
            n: 2,
            a: 0.2,
            b: 0.3,
            c: 0.1,
        })
        .unwrap();
        assert!(rep.pass, "{rep}");
        assert!(rep.cert_err > 0.0, "both runs contribute certified error");
    }

    #[test]
    fn pinned_finite_field_cases_are_exact() {
        for ic in [1, 3] {
            let rep = verify(&IdentityCase::FfSelberg { q: 5, n: 2, ia: 2, ib: 2, ic }).unwrap();
            assert!(rep.pass, "{rep}");
            assert!(rep.abs_dev < 1e-9, "{rep}");
        }
    }

    #[test]
    fn complex_beta_stays_within_three_sigma() {
        let rep = verify(&IdentityCase::ComplexAomoto {
            n: 1,
            a: 0.4,
            b: 0.4,
            c: 0.1,
            samples: 60_000,
            seed: 11,
        })
        .unwrap();
        assert!(rep.pass, "{rep}");
        assert!(rep.mc_sigma > 0.0);
        assert!(rep.sigma_dist <= 3.0, "{rep}");
    }

    #[test]
    fn inadmissible_cases_never_reach_an_engine() {
        let bad = IdentityCase::Theorem {
            p: 5,
            n: 2,
            a: 0.4,
            b: 0.4,
            c: 0.2,
            mode: PadicMode::Certified,
        };
        assert!(matches!(verify(&bad), Err(Error::RegionViolation { .. })));
    }
}
