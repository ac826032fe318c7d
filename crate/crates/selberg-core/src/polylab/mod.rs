//! Monic polynomials over every backend: evaluation, resultants by
//! fraction-free elimination, discriminants, factorization over `F_q`,
//! and p-adic splitting-type detection in the tame degree-<= 4 range.

pub mod factor_ff;
pub mod poly;
pub mod resultant;
pub mod splitting;

pub use factor_ff::factor_ff;
pub use poly::{roots_to_coeffs, MonicPoly, PivotClass, Poly, PolyScalar};
pub use resultant::{determinant, discriminant, resultant, resultant_monic};
pub use splitting::{splitting_type_padic, FactorType, SplittingType};
