//! Exact arithmetic substrates for the three backends.
//!
//! * [`padic`] — single p-adic numbers with explicit valuation, unit digits
//!   and relative-precision tracking;
//! * [`unram`] — integral elements of unramified extensions of `Qp`, with
//!   root search used by splitting-type detection;
//! * [`ramquad`] — root detection in the two tame ramified quadratic
//!   extensions, the only ramified arithmetic anything here needs;
//! * [`ff`] — small finite fields with discrete-log tables;
//! * [`descriptor`] — the backend descriptor shared across the crate.
//!
//! Beyond that, ramified extensions stay data: the integral identities
//! consume only residue cardinality and different exponent, which the
//! descriptor carries.

pub mod descriptor;
pub mod ff;
pub mod padic;
pub mod ramquad;
pub mod unram;

pub use descriptor::LocalFieldDesc;
pub use ff::{FqElem, FqField};
pub use padic::{rational_valuation, PAdicNum};
pub use unram::{OElem, UnramExt};

use crate::{Real, C};

/// Square-norm of a complex number: `|z|_C = z * conj(z)`.
///
/// This is the module norm of the complex field (the absolute value that
/// scales additive Haar measure), not the Euclidean modulus.
pub fn complex_norm<T: Real>(z: C<T>) -> T {
    z.norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_norm_is_square_modulus() {
        let z = C::new(3.0_f64, 4.0);
        assert_eq!(complex_norm(z), 25.0);
    }
}
