//! Gamma factors and Selberg-type integral identities over local fields.
//!
//! The crate evaluates both sides of a family of integral identities over
//! three backends and reports certified or statistical agreement:
//!
//! * `Qp` — the p-adic numbers and their unramified extensions, with exact
//!   big-rational arithmetic underneath a stratified, certified cubature
//!   engine ([`integrators`]);
//! * `C` — the complex numbers with the square-norm convention, driven by
//!   importance-sampled Monte Carlo;
//! * `Fq` — finite fields, where every sum is finite and evaluated exactly.
//!
//! Supporting layers: [`fields`] (p-adic numbers, unramified extension
//! arithmetic, finite fields), [`characters`] (quasi-characters, gamma
//! factors, Gauss sums), [`polylab`] (resultants, discriminants, splitting
//! types), [`identities`] (left/right hand sides and the verification gate).
//!
//! Floating-point work is generic over [`Real`]; `f64` is the default used
//! by the CLI and the aliases at the crate root.

pub mod characters;
pub mod error;
pub mod fields;
pub mod identities;
pub mod integrators;
pub mod polylab;

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

pub use error::Error;

/// Floating-point scalar used on the analytic side of every backend.
///
/// Exact objects (p-adic digits, finite-field elements, rational cell
/// centres) stay exact; this trait only governs the accumulated values,
/// error bounds and gamma factors.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// Complex number over a [`Real`] scalar.
pub type C<T> = num_complex::Complex<T>;

/// Default complex scalar.
pub type C64 = C<f64>;

/// Default real scalar.
pub type R64 = f64;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
