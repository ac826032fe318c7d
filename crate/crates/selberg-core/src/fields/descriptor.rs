//! Backend descriptor for local fields.

use crate::{error::Error, Result};

/// A local field as the numeric layers see it.
///
/// For the p-adic backend the descriptor names an unramified-data pair
/// `(q, d)`: residue cardinality `q = p^f` and different exponent `d` of the
/// additive character in play. Gamma factors and shell masses depend on the
/// field only through `(q, d)`, so ramified extension data can be described
/// without element arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalFieldDesc {
    /// p-adic field with residue cardinality `p^f` and different exponent `d`.
    Qp { p: u64, f: u32, d: u32 },
    /// The complex field with the square-norm convention.
    C,
    /// Finite field with `p^f` elements.
    Fq { p: u64, f: u32 },
}

impl LocalFieldDesc {
    /// Base p-adic field `Q_p` (residue degree 1, conductor exponent 0).
    pub fn qp(p: u64) -> Self {
        LocalFieldDesc::Qp { p, f: 1, d: 0 }
    }

    /// Residue cardinality for the discrete backends.
    pub fn residue_cardinality(&self) -> Result<u64> {
        match *self {
            LocalFieldDesc::Qp { p, f, .. } | LocalFieldDesc::Fq { p, f } => {
                p.checked_pow(f).ok_or_else(|| {
                    Error::unsupported(format!("residue cardinality {p}^{f} overflows"))
                })
            }
            LocalFieldDesc::C => Err(Error::unsupported(
                "complex field has no residue cardinality",
            )),
        }
    }

    /// Different exponent of the additive character (0 unless overridden).
    pub fn different_exponent(&self) -> u32 {
        match *self {
            LocalFieldDesc::Qp { d, .. } => d,
            _ => 0,
        }
    }

    pub fn is_padic(&self) -> bool {
        matches!(self, LocalFieldDesc::Qp { .. })
    }
}

/// Check that `p` is prime. Descriptor constructors in the verification
/// layer call this once per run; fields are small enough for trial division.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_cardinality_of_extension() {
        let e = LocalFieldDesc::Qp { p: 3, f: 2, d: 0 };
        assert_eq!(e.residue_cardinality().unwrap(), 9);
    }

    #[test]
    fn primality() {
        assert!(is_prime(2) && is_prime(7) && is_prime(97));
        assert!(!is_prime(1) && !is_prime(9) && !is_prime(91));
    }
}
