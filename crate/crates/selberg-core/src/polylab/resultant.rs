//! Resultants by Sylvester matrix and fraction-free elimination.
//!
//! One code path serves every backend: the Bareiss recurrence only ever
//! divides by prior pivots, which is exact at the algebra level, so the
//! finite-field and rational backends stay exact and the p-adic backend
//! surfaces precision loss through pivot classification instead of
//! silently degrading.

use crate::error::Error;
use crate::polylab::poly::{MonicPoly, PivotClass, Poly, PolyScalar};
use crate::Result;

/// R(f, g): with f monic this is the product of g over the roots of f.
/// Scaled inputs follow the usual leading-coefficient powers.
pub fn resultant<S: PolyScalar>(f: &Poly<S>, g: &Poly<S>) -> Result<S> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::singular("resultant of the zero polynomial"));
    }
    let n = f.degree();
    let m = g.degree();
    let one = f.leading().one_like();
    let zero = one.zero_like();
    if n == 0 && m == 0 {
        return Ok(one);
    }
    // m rows of f's coefficients, n rows of g's, each shifted one column.
    let size = n + m;
    let mut mat = vec![vec![zero.clone(); size]; size];
    for (r, row) in mat.iter_mut().enumerate().take(m) {
        for (j, c) in f.coeffs().iter().enumerate() {
            row[r + j] = c.clone();
        }
    }
    for (r, row) in mat.iter_mut().enumerate().skip(m) {
        for (j, c) in g.coeffs().iter().enumerate() {
            row[r - m + j] = c.clone();
        }
    }
    bareiss_det(mat)
}

/// Fraction-free determinant of a square matrix given as rows.
/// Exact over exact scalars; p-adic pivots that cannot be classified
/// surface as precision errors.
pub fn determinant<S: PolyScalar>(rows: Vec<Vec<S>>) -> Result<S> {
    let n = rows.len();
    assert!(rows.iter().all(|r| r.len() == n), "determinant needs a square matrix");
    bareiss_det(rows)
}

/// Fraction-free determinant; consumes the matrix.
fn bareiss_det<S: PolyScalar>(mut m: Vec<Vec<S>>) -> Result<S> {
    let n = m.len();
    let one = m[0][0].one_like();
    if n == 0 {
        return Ok(one);
    }
    let mut negate = false;
    let mut prev = one;
    for k in 0..n - 1 {
        if m[k][k].pivot_class() != PivotClass::NonZero {
            let mut swap = None;
            let mut blocked = m[k][k].pivot_class() == PivotClass::Unknown;
            for (r, row) in m.iter().enumerate().skip(k + 1) {
                match row[k].pivot_class() {
                    PivotClass::NonZero => {
                        swap = Some(r);
                        break;
                    }
                    PivotClass::Unknown => blocked = true,
                    PivotClass::Zero => {}
                }
            }
            match swap {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None if blocked => {
                    return Err(Error::precision(
                        "elimination pivot not resolvable at working precision",
                    ));
                }
                None => return Ok(m[0][0].zero_like()),
            }
        }
        let pivot = m[k][k].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let t = pivot.mul_s(&m[i][j]).sub_s(&m[i][k].mul_s(&m[k][j]));
                m[i][j] = t.div_s(&prev)?;
            }
            m[i][k] = pivot.zero_like();
        }
        prev = pivot;
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if negate { det.neg_s() } else { det })
}

/// R(f, g) for monic inputs.
pub fn resultant_monic<S: PolyScalar>(f: &MonicPoly<S>, g: &MonicPoly<S>) -> Result<S> {
    resultant(&f.to_poly(), &g.to_poly())
}

/// Discriminant of a monic polynomial: (-1)^{n(n-1)/2} R(f, f').
/// Degree 1 yields 1 (the empty root-difference product).
pub fn discriminant<S: PolyScalar>(f: &MonicPoly<S>) -> Result<S> {
    let n = f.degree();
    assert!(n >= 1, "discriminant needs positive degree");
    let r = resultant(&f.to_poly(), &f.derivative())?;
    if (n * (n - 1) / 2) % 2 == 1 {
        Ok(r.neg_s())
    } else {
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polylab::poly::roots_to_coeffs;
    use crate::C64;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::One;
    use proptest::prelude::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn monic(coeffs: &[i64]) -> MonicPoly<BigRational> {
        MonicPoly::from_i64(coeffs)
    }

    #[test]
    fn constant_second_argument_gives_power() {
        // R(f, b) = b^{deg f}
        let f = monic(&[0, -2, 5]);
        let b = Poly::new(vec![rat(7)]);
        assert_eq!(resultant(&f.to_poly(), &b).unwrap(), rat(343));
    }

    #[test]
    fn quadratic_against_linear() {
        // R(x^2 + 1, x - 1) = (i - 1)(-i - 1) = 2
        let f = monic(&[0, 1]);
        let g = monic(&[-1]);
        assert_eq!(resultant_monic(&f, &g).unwrap(), rat(2));
    }

    #[test]
    fn discriminant_of_linear_is_one() {
        assert_eq!(discriminant(&monic(&[17])).unwrap(), rat(1));
    }

    #[test]
    fn discriminant_of_quadratic_is_b2_minus_4c() {
        let f = monic(&[5, 3]); // x^2 + 5x + 3
        assert_eq!(discriminant(&f).unwrap(), rat(13));
    }

    #[test]
    fn vandermonde_square_from_complex_roots() {
        // disc(prod (x - z_i)) = prod_{i<j} (z_i - z_j)^2
        let roots = [
            C64::new(0.3, 0.8),
            C64::new(-1.1, 0.2),
            C64::new(0.9, -0.5),
            C64::new(2.0, 1.5),
        ];
        let f = roots_to_coeffs(&roots);
        let d = discriminant(&f).unwrap();
        let mut direct = C64::one();
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                let diff = roots[i] - roots[j];
                direct *= diff * diff;
            }
        }
        assert!((d - direct).norm() <= 1e-9 * direct.norm());
    }

    proptest! {
        #[test]
        fn resultant_multiplicative_in_both_slots(
            a in proptest::collection::vec(-6i64..6, 1..3),
            b in proptest::collection::vec(-6i64..6, 1..3),
            c in proptest::collection::vec(-6i64..6, 1..3),
        ) {
            let fa = monic(&a);
            let fb = monic(&b);
            let fc = monic(&c);
            let left = resultant_monic(&fa.mul(&fb), &fc).unwrap();
            let right = resultant_monic(&fa, &fc).unwrap() * resultant_monic(&fb, &fc).unwrap();
            prop_assert_eq!(left, right);
            let left2 = resultant_monic(&fc, &fa.mul(&fb)).unwrap();
            let right2 = resultant_monic(&fc, &fa).unwrap() * resultant_monic(&fc, &fb).unwrap();
            prop_assert_eq!(left2, right2);
        }

        #[test]
        fn discriminant_sign_matches_root_product(
            re in proptest::collection::vec(-2.0f64..2.0, 2..6),
            im in proptest::collection::vec(-2.0f64..2.0, 2..6),
        ) {
            let n = re.len().min(im.len());
            let roots: Vec<C64> = (0..n).map(|i| C64::new(re[i], im[i])).collect();
            // keep roots separated so the comparison is well conditioned
            let mut ok = true;
            for i in 0..n {
                for j in i + 1..n {
                    if (roots[i] - roots[j]).norm() < 0.2 {
                        ok = false;
                    }
                }
            }
            prop_assume!(ok);
            let f = roots_to_coeffs(&roots);
            let d = discriminant(&f).unwrap();
            let mut direct = C64::one();
            for i in 0..n {
                for j in i + 1..n {
                    let diff = roots[i] - roots[j];
                    direct *= diff * diff;
                }
            }
            prop_assert!((d - direct).norm() <= 1e-8 * direct.norm().max(1.0));
        }

        #[test]
        fn root_scaling_covariance(
            coeffs in proptest::collection::vec(-5i64..5, 2..5),
            lambda in 1i64..6,
        ) {
            // f_len(x) = lam^n f(x/lam) monic: disc scales by lam^{n(n-1)}
            let f = monic(&coeffs);
            let n = f.degree();
            let lam = rat(lambda);
            let scaled: Vec<BigRational> = (0..n)
                .rev()
                .map(|i| f.coeff(i) * num_traits::pow::pow(lam.clone(), n - i))
                .collect();
            let flam = MonicPoly::new(scaled, BigRational::one());
            let d = discriminant(&f).unwrap();
            let dlam = discriminant(&flam).unwrap();
            prop_assert_eq!(dlam, d * num_traits::pow::pow(lam, n * (n - 1)));
        }
    }
}
