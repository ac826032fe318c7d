//! Unramified quasi-characters of a local field.
//!
//! A quasi-character here is `x -> |x|^s` for a complex exponent `s`; the
//! group they form under pointwise multiplication is just addition of
//! exponents.  Ramified characters never show up on the unramified side of
//! the story, so this type does not model them.

use num_complex::Complex;

use crate::{Real, C};

/// `x -> |x|^s`, stored by its exponent.
///
/// Evaluation only ever needs `|x|`, which for a p-adic field is `q^{-v(x)}`
/// and for the complex field is the square norm, so the two eval methods take
/// those directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiCharacter<T: Real> {
    s: C<T>,
}

impl<T: Real> QuasiCharacter<T> {
    /// The character `|.|^s`.
    pub fn unramified(s: C<T>) -> Self {
        QuasiCharacter { s }
    }

    /// Real exponent shortcut: `|.|^a`.
    pub fn from_re(a: T) -> Self {
        QuasiCharacter {
            s: Complex::new(a, T::zero()),
        }
    }

    /// The norm character `|.|` itself.
    pub fn norm() -> Self {
        Self::from_re(T::one())
    }

    pub fn exponent(&self) -> C<T> {
        self.s
    }

    /// Real part of the exponent; convergence regions are stated in terms of
    /// this.
    pub fn real_part(&self) -> T {
        self.s.re
    }

    /// Pointwise product of characters.
    pub fn mul(&self, other: &Self) -> Self {
        QuasiCharacter { s: self.s + other.s }
    }

    /// `k`-th pointwise power.
    pub fn pow(&self, k: i32) -> Self {
        QuasiCharacter {
            s: self.s * Complex::new(T::from_i32(k).unwrap(), T::zero()),
        }
    }

    /// Scale the exponent by a real factor (fractional powers of `|.|`).
    pub fn scale(&self, a: T) -> Self {
        QuasiCharacter {
            s: self.s * Complex::new(a, T::zero()),
        }
    }

    /// Value on an element of valuation `val` in a field with residue
    /// cardinality `q`: `q^{-val * s}`.
    pub fn eval_padic(&self, val: i64, q: T) -> C<T> {
        let minus_v = T::from_i64(-val).unwrap();
        (self.s * q.ln() * minus_v).exp()
    }

    /// Value on a complex number, `(z \bar z)^s`.
    ///
    /// The module of the complex field is the square norm, not the usual
    /// absolute value; zero is rejected by callers before they get here.
    pub fn eval_complex(&self, z: C<T>) -> C<T> {
        let n = z.norm_sqr();
        (self.s * n.ln()).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn products_add_exponents_and_values_multiply() {
        let a = QuasiCharacter::unramified(Complex64::new(0.3, 0.7));
        let b = QuasiCharacter::unramified(Complex64::new(0.2, -0.4));
        let ab = a.mul(&b);
        let q = 5.0;
        for val in [-3i64, 0, 2, 7] {
            let lhs = ab.eval_padic(val, q);
            let rhs = a.eval_padic(val, q) * b.eval_padic(val, q);
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn padic_value_is_q_to_minus_vs() {
        let chi = QuasiCharacter::from_re(0.5_f64);
        // |x| = q^{-v}, so chi(x) = q^{-v/2}.
        let got = chi.eval_padic(2, 9.0);
        assert!((got.re - 1.0 / 9.0).abs() < 1e-14);
        assert!(got.im.abs() < 1e-14);
    }

    #[test]
    fn complex_value_uses_square_norm() {
        let chi = QuasiCharacter::norm();
        let z = Complex64::new(3.0, 4.0);
        let got = chi.eval_complex(z);
        assert!((got.re - 25.0).abs() < 1e-12);
        assert!(got.im.abs() < 1e-12);
    }

    #[test]
    fn integer_power_matches_repeated_product() {
        let chi = QuasiCharacter::unramified(Complex64::new(0.21, 0.11));
        let cubed = chi.pow(3);
        let manual = chi.mul(&chi).mul(&chi);
        assert!((cubed.exponent() - manual.exponent()).norm() < 1e-15);
    }
}
