//! Integral estimates and measure bookkeeping shared by every backend.

use num_rational::BigRational;

use crate::error::Error;
use crate::fields::{complex_norm, rational_valuation, LocalFieldDesc};
use crate::polylab::determinant;
use crate::{C64, Result};

/// Result of a numerical integration together with everything needed to
/// judge it: a certified error radius from the exact engine, a statistical
/// standard error from Monte Carlo, and a tail report when the domain was
/// truncated. Exactly one of `cert_err`, `mc_sigma` is nonzero in practice,
/// but both are carried so mixed pipelines can add them.
#[derive(Debug, Clone)]
pub struct IntegralEstimate {
    pub value: C64,
    /// Radius of the certified interval around `value` (residual cells,
    /// never floating-point rounding).
    pub cert_err: f64,
    /// Monte Carlo standard error; zero for certified runs.
    pub mc_sigma: f64,
    /// Samples drawn (Monte Carlo only).
    pub samples: u64,
    /// Samples discarded because a feature vanished exactly or a
    /// classification ran out of precision. Reported, never hidden.
    pub aborted: u64,
    /// Cells processed (certified) or chunks reduced (Monte Carlo).
    pub strata: u64,
    /// Tail handling for integrals over the full space.
    pub tail: Option<TailReport>,
    /// Human-readable warnings (heavy-tailed weights and similar).
    pub notes: Vec<String>,
}

impl IntegralEstimate {
    pub fn exact(value: C64) -> Self {
        IntegralEstimate {
            value,
            cert_err: 0.0,
            mc_sigma: 0.0,
            samples: 0,
            aborted: 0,
            strata: 0,
            tail: None,
            notes: Vec::new(),
        }
    }

    /// Certified part of the error budget: residuals plus the tail bound.
    pub fn certified_bound(&self) -> f64 {
        self.cert_err + self.tail.as_ref().map_or(0.0, |t| t.bound)
    }

    /// Multiply the estimate by an exact constant.
    pub fn scaled(mut self, c: C64) -> Self {
        let mag = c.norm();
        self.value *= c;
        self.cert_err *= mag;
        self.mc_sigma *= mag;
        if let Some(t) = &mut self.tail {
            t.bound *= mag;
        }
        self
    }
}

/// How the outer shells of a full-space integral were closed off.
#[derive(Debug, Clone)]
pub struct TailReport {
    /// Bound on the absolute value of everything beyond the last shell.
    /// Zero when the tail was summed in closed form.
    pub bound: f64,
    /// Shells that were integrated before closing off.
    pub shells: u32,
    /// Shell-to-shell decay ratio: exact when `exact`, otherwise the
    /// largest ratio observed over the fit window.
    pub ratio: f64,
    /// Multiplier applied to the fitted ratio; 1 for exact tails. Kept
    /// separate so reports show the raw fit and the safety margin.
    pub safety: f64,
    /// True when the tail was a closed-form geometric sum (the remaining
    /// shells contribute exactly, with no modelling step).
    pub exact: bool,
}

/// Measure normalization for one backend.
///
/// The p-adic backends use the self-dual additive measure: the integers of
/// a field with residue cardinality `q` and different exponent `d` carry
/// mass `q^{-d/2}`. The complex field carries twice Lebesgue measure, and
/// the square-norm `|z| = z conj(z)` is the module that scales it.
#[derive(Debug, Clone)]
pub struct MeasureSpec {
    pub field: LocalFieldDesc,
}

impl MeasureSpec {
    pub fn new(field: LocalFieldDesc) -> Self {
        MeasureSpec { field }
    }

    /// Mass of the ring of integers (p-adic backends).
    pub fn unit_mass(&self) -> Result<f64> {
        match self.field {
            LocalFieldDesc::Qp { d, .. } => {
                let q = self.field.residue_cardinality()? as f64;
                Ok(q.powf(-(d as f64) / 2.0))
            }
            _ => Err(Error::unsupported("unit mass is a p-adic notion")),
        }
    }

    /// Mass of the valuation shell `val = v` (p-adic backends).
    pub fn shell_mass(&self, v: i64) -> Result<f64> {
        let q = self.field.residue_cardinality()? as f64;
        Ok(self.unit_mass()? * q.powi(-(v as i32)) * (1.0 - 1.0 / q))
    }

    /// Scale factor `|det D|^{1/2}` that converts coordinate measure into
    /// the measure attached to a symmetric pairing with Gram matrix `D`
    /// (rational entries, p-adic absolute value).
    pub fn gram_scale_padic(&self, rows: &[Vec<BigRational>]) -> Result<f64> {
        let p = match self.field {
            LocalFieldDesc::Qp { p, .. } => p,
            _ => return Err(Error::unsupported("rational Gram matrix needs a p-adic field")),
        };
        let det = determinant(rows.to_vec())?;
        let v = rational_valuation(&det, p)
            .ok_or_else(|| Error::singular("degenerate pairing: det D = 0"))?;
        Ok((p as f64).powf(-(v as f64) / 2.0))
    }

    /// `|det D|^{1/2}` in the square-norm convention of the complex field.
    pub fn gram_scale_complex(&self, rows: &[Vec<C64>]) -> Result<f64> {
        if self.field != LocalFieldDesc::C {
            return Err(Error::unsupported("complex Gram matrix needs the complex field"));
        }
        let det = determinant(rows.to_vec())?;
        if det.norm() == 0.0 {
            return Err(Error::singular("degenerate pairing: det D = 0"));
        }
        Ok(complex_norm(det).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn unit_mass_reflects_the_different() {
        let base = MeasureSpec::new(LocalFieldDesc::qp(5));
        assert_eq!(base.unit_mass().unwrap(), 1.0);
        let ram = MeasureSpec::new(LocalFieldDesc::Qp { p: 5, f: 1, d: 1 });
        assert!((ram.unit_mass().unwrap() - 1.0 / 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn shell_masses_sum_to_the_unit_ball() {
        let spec = MeasureSpec::new(LocalFieldDesc::qp(3));
        let total: f64 = (0..60).map(|v| spec.shell_mass(v).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gram_scale_of_diagonal_matrix() {
        let spec = MeasureSpec::new(LocalFieldDesc::qp(5));
        let id = vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]];
        assert_eq!(spec.gram_scale_padic(&id).unwrap(), 1.0);
        let d = vec![vec![rat(5, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]];
        let s = spec.gram_scale_padic(&d).unwrap();
        assert!((s - 1.0 / 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn gram_scale_complex_uses_the_square_norm() {
        let spec = MeasureSpec::new(LocalFieldDesc::C);
        let rows = vec![
            vec![C64::new(2.0, 0.0), C64::new(0.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        ];
        // |2|_C = 4, square root is 2.
        assert!((spec.gram_scale_complex(&rows).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_gram_is_rejected() {
        let spec = MeasureSpec::new(LocalFieldDesc::qp(5));
        let d = vec![vec![rat(1, 1), rat(1, 1)], vec![rat(1, 1), rat(1, 1)]];
        assert!(spec.gram_scale_padic(&d).is_err());
    }
}
