//! Dense polynomials over any backend scalar.
//!
//! `MonicPoly` is the public shape: the leading 1 is implicit and the stored
//! vector is (b_{n-1}, .., b_0). `Poly` is the general dense form used
//! internally by the resultant machinery (derivatives are not monic).

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt::Debug;
use std::sync::Arc;

use crate::error::Error;
use crate::fields::{FqElem, FqField, PAdicNum};
use crate::{Real, Result, C};

/// How a scalar behaves as a pivot candidate in exact elimination.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotClass {
    /// Certified zero.
    Zero,
    /// Cannot be certified either way at working precision.
    Unknown,
    /// Certified invertible.
    NonZero,
}

/// Ring operations the polynomial layer needs, with context carried by the
/// element itself (finite-field elements own their table, p-adics their
/// prime), so constants are derived from an exemplar.
pub trait PolyScalar: Clone + Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add_s(&self, rhs: &Self) -> Self;
    fn sub_s(&self, rhs: &Self) -> Self;
    fn mul_s(&self, rhs: &Self) -> Self;
    fn neg_s(&self) -> Self;
    /// Division that is exact at the algebra level (fraction-free
    /// elimination divides by prior pivots). Fails only for backends that
    /// cannot certify the divisor invertible.
    fn div_s(&self, rhs: &Self) -> Result<Self>;
    fn pivot_class(&self) -> PivotClass;
    fn is_zero_s(&self) -> bool {
        self.pivot_class() == PivotClass::Zero
    }
}

impl PolyScalar for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn add_s(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_s(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_s(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_s(&self) -> Self {
        -self
    }
    fn div_s(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::singular("rational division by zero"));
        }
        Ok(self / rhs)
    }
    fn pivot_class(&self) -> PivotClass {
        if self.is_zero() {
            PivotClass::Zero
        } else {
            PivotClass::NonZero
        }
    }
}

impl<T: Real> PolyScalar for Complex<T> {
    fn zero_like(&self) -> Self {
        Complex::zero()
    }
    fn one_like(&self) -> Self {
        Complex::one()
    }
    fn add_s(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_s(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_s(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_s(&self) -> Self {
        -self
    }
    fn div_s(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::singular("complex division by zero"));
        }
        Ok(self / rhs)
    }
    fn pivot_class(&self) -> PivotClass {
        if self.is_zero() {
            PivotClass::Zero
        } else {
            PivotClass::NonZero
        }
    }
}

impl PolyScalar for FqElem {
    fn zero_like(&self) -> Self {
        FqElem::zero(self.field())
    }
    fn one_like(&self) -> Self {
        FqElem::one(self.field())
    }
    fn add_s(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn sub_s(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn mul_s(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn neg_s(&self) -> Self {
        self.neg()
    }
    fn div_s(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inv()?))
    }
    fn pivot_class(&self) -> PivotClass {
        if self.is_zero() {
            PivotClass::Zero
        } else {
            PivotClass::NonZero
        }
    }
}

impl PolyScalar for PAdicNum {
    fn zero_like(&self) -> Self {
        PAdicNum::zero(self.prime())
    }
    fn one_like(&self) -> Self {
        let prec = self.precision().unwrap_or(crate::fields::padic::DEFAULT_PRECISION);
        PAdicNum::from_integer(1, self.prime(), prec)
    }
    fn add_s(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn sub_s(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn mul_s(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn neg_s(&self) -> Self {
        self.neg()
    }
    fn div_s(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inv()?))
    }
    fn pivot_class(&self) -> PivotClass {
        if self.is_exact_zero() {
            PivotClass::Zero
        } else if self.is_zero_like() {
            PivotClass::Unknown
        } else {
            PivotClass::NonZero
        }
    }
}

/// General dense polynomial, coefficients from the leading one downward.
/// The zero polynomial keeps a single zero coefficient so an exemplar
/// scalar is always available.
#[derive(Clone, Debug)]
pub struct Poly<S: PolyScalar> {
    coeffs: Vec<S>,
}

impl<S: PolyScalar> Poly<S> {
    /// Build from leading-first coefficients, trimming leading zeros.
    pub fn new(coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty(), "empty coefficient vector");
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs[0].is_zero_s() {
            coeffs.remove(0);
        }
        Poly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero_s()
    }

    pub fn leading(&self) -> &S {
        &self.coeffs[0]
    }

    /// Leading-first coefficient slice.
    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn eval(&self, x: &S) -> S {
        let mut acc = self.coeffs[0].clone();
        for c in &self.coeffs[1..] {
            acc = acc.mul_s(x).add_s(c);
        }
        acc
    }

    pub fn mul(&self, rhs: &Poly<S>) -> Poly<S> {
        let zero = self.coeffs[0].zero_like();
        if self.is_zero() || rhs.is_zero() {
            return Poly { coeffs: vec![zero] };
        }
        let mut out = vec![zero; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add_s(&a.mul_s(b));
            }
        }
        Poly::new(out)
    }

    pub fn derivative(&self) -> Poly<S> {
        let n = self.degree();
        if n == 0 {
            return Poly {
                coeffs: vec![self.coeffs[0].zero_like()],
            };
        }
        let one = self.coeffs[0].one_like();
        let mut mult = one.clone();
        // Descending powers: coefficient of x^{n-i} is scaled by n-i.
        let mut scales = vec![one];
        for _ in 1..n {
            mult = mult.add_s(&mult.one_like());
            scales.push(mult.clone());
        }
        scales.reverse();
        let coeffs = self.coeffs[..n]
            .iter()
            .zip(scales)
            .map(|(c, k)| c.mul_s(&k))
            .collect();
        Poly::new(coeffs)
    }
}

/// Monic dense polynomial; the leading 1 is implicit and `coeffs` stores
/// (b_{n-1}, .., b_0).
#[derive(Clone, Debug)]
pub struct MonicPoly<S: PolyScalar> {
    coeffs: Vec<S>,
    one: S,
}

impl<S: PolyScalar> MonicPoly<S> {
    /// Build from (b_{n-1}, .., b_0); `one` supplies backend context for
    /// degree-zero polynomials.
    pub fn new(coeffs: Vec<S>, one: S) -> Self {
        debug_assert!(!one.is_zero_s());
        MonicPoly { coeffs, one }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// b_i, the coefficient of x^i (i < degree).
    pub fn coeff(&self, i: usize) -> &S {
        &self.coeffs[self.coeffs.len() - 1 - i]
    }

    /// (b_{n-1}, .., b_0).
    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Replace b_i, the coefficient of x^i.
    pub fn with_coeff(&self, i: usize, v: S) -> Self {
        let mut out = self.clone();
        let n = out.coeffs.len();
        out.coeffs[n - 1 - i] = v;
        out
    }

    pub fn one_exemplar(&self) -> &S {
        &self.one
    }

    pub fn eval(&self, x: &S) -> S {
        let mut acc = self.one.clone();
        for c in &self.coeffs {
            acc = acc.mul_s(x).add_s(c);
        }
        acc
    }

    pub fn to_poly(&self) -> Poly<S> {
        let mut v = Vec::with_capacity(self.coeffs.len() + 1);
        v.push(self.one.clone());
        v.extend(self.coeffs.iter().cloned());
        Poly::new(v)
    }

    pub fn derivative(&self) -> Poly<S> {
        self.to_poly().derivative()
    }

    pub fn mul(&self, rhs: &MonicPoly<S>) -> MonicPoly<S> {
        let p = self.to_poly().mul(&rhs.to_poly());
        MonicPoly {
            coeffs: p.coeffs()[1..].to_vec(),
            one: self.one.clone(),
        }
    }

    /// Expand from linear factors x - r_i.
    pub fn from_roots(roots: &[S], one: S) -> Self {
        let mut acc = MonicPoly {
            coeffs: Vec::new(),
            one: one.clone(),
        };
        for r in roots {
            let lin = MonicPoly {
                coeffs: vec![r.neg_s()],
                one: one.clone(),
            };
            acc = acc.mul(&lin);
        }
        acc
    }
}

/// Monic polynomial with the given complex roots.
pub fn roots_to_coeffs<T: Real>(roots: &[C<T>]) -> MonicPoly<C<T>> {
    MonicPoly::from_roots(roots, Complex::one())
}

/// Convenience constructors for the concrete backends.
impl MonicPoly<BigRational> {
    pub fn from_i64(coeffs: &[i64]) -> Self {
        MonicPoly::new(
            coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect(),
            BigRational::one(),
        )
    }
}

impl MonicPoly<FqElem> {
    pub fn from_residues(field: &Arc<FqField>, coeffs: &[u64]) -> Self {
        MonicPoly::new(
            coeffs.iter().map(|&c| FqElem::from_residue(field, c)).collect(),
            FqElem::one(field),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn eval_matches_horner_by_hand() {
        // x^3 - 2x + 5 at x = 3: 27 - 6 + 5 = 26
        let f = MonicPoly::from_i64(&[0, -2, 5]);
        assert_eq!(f.eval(&rat(3)), rat(26));
    }

    #[test]
    fn monic_product_expands() {
        // (x - 1)(x + 1) = x^2 - 1
        let a = MonicPoly::from_i64(&[-1]);
        let b = MonicPoly::from_i64(&[1]);
        let ab = a.mul(&b);
        assert_eq!(ab.coeffs(), &[rat(0), rat(-1)]);
    }

    #[test]
    fn derivative_drops_degree_with_scaling() {
        // d/dx (x^3 + 4x^2 + x + 7) = 3x^2 + 8x + 1
        let f = MonicPoly::from_i64(&[4, 1, 7]);
        let d = f.derivative();
        assert_eq!(d.coeffs(), &[rat(3), rat(8), rat(1)]);
    }

    #[test]
    fn roots_to_coeffs_small_cases() {
        let z = roots_to_coeffs::<f64>(&[C::new(0.0, 0.0)]);
        assert_eq!(z.degree(), 1);
        assert!(z.coeff(0).norm() < 1e-15);

        let f = roots_to_coeffs::<f64>(&[C::new(1.0, 0.0), C::new(-1.0, 0.0)]);
        assert!((f.coeff(0) + C::new(1.0, 0.0)).norm() < 1e-15);
        assert!(f.coeff(1).norm() < 1e-15);
    }

    #[test]
    fn with_coeff_replaces_the_addressed_power() {
        let f = MonicPoly::from_i64(&[1, 2, 3]); // x^3 + x^2 + 2x + 3
        let g = f.with_coeff(0, rat(9));
        assert_eq!(g.coeff(0), &rat(9));
        assert_eq!(g.coeff(1), &rat(2));
        assert_eq!(g.coeff(2), &rat(1));
    }
}
