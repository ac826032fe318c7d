//! p-adic numbers with explicit valuation, unit digits and precision.
//!
//! A nonzero value is stored as `p^v * u` with `u` a unit known modulo
//! `p^k`; `k` is the relative precision in base-`p` digits. Arithmetic
//! follows the minimum-precision rule, and additive cancellation converts
//! lost digits into lost precision rather than fabricating zeros: a sum
//! whose known digits all cancel becomes an *inexact zero* carrying only an
//! absolute precision. Absolute values of inexact zeros are refused.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{error::Error, Result};

/// Default relative precision in base-p digits.
pub const DEFAULT_PRECISION: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    /// Exact zero (valuation +infinity).
    ExactZero,
    /// Indistinguishable from zero: known only to be divisible by
    /// `p^abs_prec`.
    InexactZero { abs_prec: i64 },
    /// `p^val * unit`, `unit` coprime to `p`, known modulo `p^prec`.
    Unit { val: i64, unit: BigUint, prec: u32 },
}

/// A p-adic number at finite working precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdicNum {
    p: u64,
    repr: Repr,
}

fn pow_biguint(p: u64, e: u32) -> BigUint {
    BigUint::from(p).pow(e)
}

/// Valuation of a nonzero big integer at `p`.
fn int_valuation(n: &BigUint, p: u64) -> u64 {
    debug_assert!(!n.is_zero());
    let bp = BigUint::from(p);
    let mut v = 0u64;
    let mut m = n.clone();
    loop {
        let (q, r) = num_integer::Integer::div_rem(&m, &bp);
        if r.is_zero() {
            v += 1;
            m = q;
        } else {
            return v;
        }
    }
}

/// p-adic valuation of a rational number; `None` for zero.
pub fn rational_valuation(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let num = x.numer().abs().to_biguint().unwrap();
    let den = x.denom().abs().to_biguint().unwrap();
    Some(int_valuation(&num, p) as i64 - int_valuation(&den, p) as i64)
}

/// `p^e` as an exact rational, for signed `e`.
pub fn p_power_rational(p: u64, e: i64) -> BigRational {
    let mag = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

impl PAdicNum {
    pub fn zero(p: u64) -> Self {
        PAdicNum {
            p,
            repr: Repr::ExactZero,
        }
    }

    /// Construct from an integer at the given relative precision.
    pub fn from_integer(n: i64, p: u64, prec: u32) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)), p, prec)
    }

    /// Construct from an exact rational at the given relative precision.
    pub fn from_rational(x: &BigRational, p: u64, prec: u32) -> Self {
        assert!(prec >= 1, "relative precision must be at least 1 digit");
        if x.is_zero() {
            return Self::zero(p);
        }
        let num = x.numer().abs().to_biguint().unwrap();
        let den = x.denom().abs().to_biguint().unwrap();
        let vn = int_valuation(&num, p);
        let vd = int_valuation(&den, p);
        let modulus = pow_biguint(p, prec);
        let nu = (num / pow_biguint(p, vn as u32)) % &modulus;
        let du = den / pow_biguint(p, vd as u32);
        let dinv = du
            .modinv(&modulus)
            .expect("denominator unit is invertible modulo p^k");
        let mut unit = (nu * dinv) % &modulus;
        if x.is_negative() {
            unit = (&modulus - unit) % &modulus;
        }
        PAdicNum {
            p,
            repr: Repr::Unit {
                val: vn as i64 - vd as i64,
                unit,
                prec,
            },
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// True for the exact zero and for inexact zeros alike.
    pub fn is_zero_like(&self) -> bool {
        !matches!(self.repr, Repr::Unit { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::ExactZero)
    }

    /// Valuation; `None` when the value is (exactly or inexactly) zero.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Unit { val, .. } => Some(*val),
            _ => None,
        }
    }

    /// Relative precision in digits; `None` for zeros.
    pub fn precision(&self) -> Option<u32> {
        match &self.repr {
            Repr::Unit { prec, .. } => Some(*prec),
            _ => None,
        }
    }

    /// Base-p digits of the unit part, least significant first.
    /// The leading digit is nonzero by construction.
    pub fn unit_digits(&self) -> Vec<u64> {
        match &self.repr {
            Repr::Unit { unit, prec, .. } => {
                let mut digits = Vec::with_capacity(*prec as usize);
                let bp = BigUint::from(self.p);
                let mut m = unit.clone();
                for _ in 0..*prec {
                    let (q, r) = num_integer::Integer::div_rem(&m, &bp);
                    digits.push(r.to_u64().unwrap());
                    m = q;
                }
                digits
            }
            _ => Vec::new(),
        }
    }

    /// Absolute value `p^{-v}` as an exact rational.
    ///
    /// Exact zero gives 0; an inexact zero is refused because its valuation
    /// is only bounded below by the lost precision.
    pub fn abs(&self) -> Result<BigRational> {
        match &self.repr {
            Repr::ExactZero => Ok(BigRational::zero()),
            Repr::InexactZero { abs_prec } => Err(Error::precision(format!(
                "absolute value of a value only known to be divisible by p^{abs_prec}"
            ))),
            Repr::Unit { val, .. } => Ok(p_power_rational(self.p, -*val)),
        }
    }

    /// Absolute precision: index of the first unknown digit.
    fn abs_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::ExactZero => None,
            Repr::InexactZero { abs_prec } => Some(*abs_prec),
            Repr::Unit { val, prec, .. } => Some(val + *prec as i64),
        }
    }

    fn assert_same_prime(&self, other: &Self) {
        assert_eq!(self.p, other.p, "mixed-prime p-adic arithmetic");
    }

    /// Build from a known valuation and integer unit representative.
    fn from_parts(p: u64, val: i64, raw: BigUint, abs_prec: i64) -> Self {
        if raw.is_zero() {
            return PAdicNum {
                p,
                repr: Repr::InexactZero { abs_prec },
            };
        }
        let shift = int_valuation(&raw, p) as i64;
        let v = val + shift;
        let prec = abs_prec - v;
        if prec <= 0 {
            return PAdicNum {
                p,
                repr: Repr::InexactZero { abs_prec },
            };
        }
        let prec = prec as u32;
        let unit = (raw / pow_biguint(p, shift as u32)) % pow_biguint(p, prec);
        if unit.is_zero() {
            // Unit representative collapsed under the modulus; all digits
            // in range are zero.
            return PAdicNum {
                p,
                repr: Repr::InexactZero { abs_prec },
            };
        }
        PAdicNum {
            p,
            repr: Repr::Unit { val: v, unit, prec },
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_prime(other);
        match (&self.repr, &other.repr) {
            (Repr::ExactZero, _) => other.clone(),
            (_, Repr::ExactZero) => self.clone(),
            _ => {
                let a0 = self.abs_precision().unwrap();
                let a1 = other.abs_precision().unwrap();
                let abs_prec = a0.min(a1);
                let base = match (&self.repr, &other.repr) {
                    (Repr::Unit { val: v0, .. }, Repr::Unit { val: v1, .. }) => {
                        (*v0).min(*v1).min(abs_prec)
                    }
                    (Repr::Unit { val, .. }, _) | (_, Repr::Unit { val, .. }) => {
                        (*val).min(abs_prec)
                    }
                    _ => abs_prec,
                };
                let window = (abs_prec - base).max(0) as u32;
                let modulus = pow_biguint(self.p, window);
                let lift = |x: &PAdicNum| -> BigUint {
                    match &x.repr {
                        Repr::Unit { val, unit, .. } => {
                            (unit * pow_biguint(x.p, (val - base) as u32)) % &modulus
                        }
                        _ => BigUint::zero(),
                    }
                };
                let sum = (lift(self) + lift(other)) % &modulus;
                Self::from_parts(self.p, base, sum, abs_prec)
            }
        }
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Unit { val, unit, prec } => {
                let modulus = pow_biguint(self.p, *prec);
                PAdicNum {
                    p: self.p,
                    repr: Repr::Unit {
                        val: *val,
                        unit: (&modulus - unit) % &modulus,
                        prec: *prec,
                    },
                }
            }
            _ => self.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_prime(other);
        match (&self.repr, &other.repr) {
            (Repr::ExactZero, _) | (_, Repr::ExactZero) => Self::zero(self.p),
            (Repr::Unit { val: v0, unit: u0, prec: k0 }, Repr::Unit { val: v1, unit: u1, prec: k1 }) => {
                let prec = (*k0).min(*k1);
                let modulus = pow_biguint(self.p, prec);
                let unit = (u0 * u1) % &modulus;
                PAdicNum {
                    p: self.p,
                    repr: Repr::Unit {
                        val: v0 + v1,
                        unit,
                        prec,
                    },
                }
            }
            // Zero of bounded valuation times a unit-scale value.
            (Repr::InexactZero { abs_prec }, Repr::Unit { val, .. })
            | (Repr::Unit { val, .. }, Repr::InexactZero { abs_prec }) => PAdicNum {
                p: self.p,
                repr: Repr::InexactZero {
                    abs_prec: abs_prec + val,
                },
            },
            (Repr::InexactZero { abs_prec: a0 }, Repr::InexactZero { abs_prec: a1 }) => PAdicNum {
                p: self.p,
                repr: Repr::InexactZero { abs_prec: a0 + a1 },
            },
        }
    }

    /// Multiplicative inverse; zeros (exact or inexact) are refused.
    pub fn inv(&self) -> Result<Self> {
        match &self.repr {
            Repr::Unit { val, unit, prec } => {
                let modulus = pow_biguint(self.p, *prec);
                let inv = unit
                    .modinv(&modulus)
                    .expect("unit is invertible modulo p^k");
                Ok(PAdicNum {
                    p: self.p,
                    repr: Repr::Unit {
                        val: -val,
                        unit: inv,
                        prec: *prec,
                    },
                })
            }
            Repr::ExactZero => Err(Error::singular("inverse of zero")),
            Repr::InexactZero { abs_prec } => Err(Error::precision(format!(
                "inverse of a value indistinguishable from zero (divisible by p^{abs_prec})"
            ))),
        }
    }

    /// Do the two values agree on every digit both claim to know?
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.assert_same_prime(other);
        let diff = self.sub(other);
        match diff.repr {
            Repr::Unit { .. } => false,
            _ => true,
        }
    }
}
