//! Exhaustive sums over monic finite-field polynomials.
//!
//! The finite-field side of every identity is a finite sum, so the only
//! engine it needs is an enumerator: walk all monic polynomials of the
//! given degree, apply the summand, add exactly. Terms the summand
//! declines (a character argument vanished, so its value is zero by the
//! `chi(0) = 0` convention) are counted, not silently dropped, and the
//! outer coefficient is the stratum for deterministic parallel reduction.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::Error;
use crate::fields::{FqElem, FqField};
use crate::integrators::estimate::IntegralEstimate;
use crate::polylab::MonicPoly;
use crate::{C64, Result};

/// Largest number of polynomials an exhaustive sum may touch.
const ENUM_BUDGET: u64 = 10_000_000;

/// Sum `summand` over all monic polynomials of degree `n` over the field.
///
/// The summand returns `None` to skip a term whose character values vanish
/// exactly; skipped terms are reported in `aborted`. The estimate is exact:
/// `samples = q^n` terms, `strata = q` parallel strata over the top
/// coefficient, zero certified and statistical error.
pub fn ff_enumerate_sum(
    field: &Arc<FqField>,
    n: u32,
    summand: &(dyn Fn(&MonicPoly<FqElem>) -> Option<C64> + Sync),
) -> Result<IntegralEstimate> {
    if n == 0 {
        return Err(Error::config("degree zero leaves nothing to enumerate"));
    }
    let q = field.order();
    let total = q
        .checked_pow(n)
        .filter(|&t| t <= ENUM_BUDGET)
        .ok_or_else(|| {
            Error::budget(format!(
                "q^n = {q}^{n} exceeds the enumeration budget {ENUM_BUDGET}"
            ))
        })?;

    let parts: Vec<(C64, u64)> = (0..q)
        .into_par_iter()
        .map(|top| {
            let mut sum = C64::new(0.0, 0.0);
            let mut aborted = 0u64;
            let mut coeffs = vec![0u64; n as usize];
            coeffs[0] = top;
            loop {
                let f = MonicPoly::from_residues(field, &coeffs);
                match summand(&f) {
                    Some(v) => sum += v,
                    None => aborted += 1,
                }
                // Odometer over (b_{n-2}, .., b_0); the top digit is fixed.
                let mut i = n as usize - 1;
                loop {
                    if i == 0 {
                        return (sum, aborted);
                    }
                    coeffs[i] += 1;
                    if coeffs[i] < q {
                        break;
                    }
                    coeffs[i] = 0;
                    i -= 1;
                }
            }
        })
        .collect();

    let mut est = IntegralEstimate::exact(parts.iter().map(|(s, _)| s).sum());
    est.samples = total;
    est.aborted = parts.iter().map(|(_, a)| a).sum();
    est.strata = q;
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::MultCharacter;
    use crate::polylab::discriminant;

    #[test]
    fn constant_summand_counts_the_polynomials() {
        let field = FqField::new(5, 1).unwrap();
        let est = ff_enumerate_sum(&field, 3, &|_| Some(C64::new(1.0, 0.0))).unwrap();
        assert_eq!(est.value, C64::new(125.0, 0.0));
        assert_eq!(est.samples, 125);
        assert_eq!(est.aborted, 0);
        assert_eq!(est.strata, 5);
    }

    #[test]
    fn linear_polynomials_have_unit_discriminant() {
        // Degree 1: the discriminant is the empty product, so a character
        // of it contributes chi(1) = 1 at every one of the q terms.
        let field = FqField::new(7, 1).unwrap();
        let chi = MultCharacter::new(&field, 2);
        let est = ff_enumerate_sum(&field, 1, &|f| {
            let d = discriminant(f).unwrap();
            if d.is_zero() {
                None
            } else {
                Some(chi.eval(&d))
            }
        })
        .unwrap();
        assert_eq!(est.value, C64::new(7.0, 0.0));
        assert_eq!(est.aborted, 0);
    }

    #[test]
    fn quadratics_with_repeated_roots_are_skipped_and_counted() {
        // x^2 + bx + c has zero discriminant exactly when it is a square,
        // one choice of c per b.
        let field = FqField::new(5, 1).unwrap();
        let est = ff_enumerate_sum(&field, 2, &|f| {
            let d = discriminant(f).unwrap();
            if d.is_zero() {
                None
            } else {
                Some(C64::new(1.0, 0.0))
            }
        })
        .unwrap();
        assert_eq!(est.aborted, 5);
        assert_eq!(est.value, C64::new(20.0, 0.0));
    }

    #[test]
    fn enumeration_budget_is_enforced() {
        let field = FqField::new(7, 1).unwrap();
        assert!(matches!(
            ff_enumerate_sum(&field, 9, &|_| Some(C64::new(1.0, 0.0))),
            Err(Error::BudgetExhausted { .. })
        ));
    }

    #[test]
    fn strata_reduce_in_a_fixed_order() {
        // A summand with irrational phases detects any reordering of the
        // floating-point reduction.
        let field = FqField::new(5, 1).unwrap();
        let phase = |f: &MonicPoly<FqElem>| {
            let r = discriminant(f).map(|x| x.index()).unwrap_or(0);
            let t = (f.coeff(0).index() * 31 + r) as f64;
            Some(C64::new((t * 0.7).cos(), (t * 0.7).sin()))
        };
        let a = ff_enumerate_sum(&field, 3, &phase).unwrap();
        let b = ff_enumerate_sum(&field, 3, &phase).unwrap();
        assert_eq!(a.value, b.value);
    }
}
