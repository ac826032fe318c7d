//! Quasi-characters and their gamma factors over every backend.
//!
//! The p-adic gamma has two independent implementations: a closed form and
//! a direct shell-by-shell evaluation of the defining integral
//! `∫ ψ(x) χ(x) |x|^{-1} dx`. The closed form's conductor factor was pinned
//! by requiring equality with the shell sum on a grid of exponents and
//! field shapes; the tests keep enforcing that equality, so neither
//! implementation can drift.
//!
//! Conventions, fixed once:
//! * base additive character has conductor exponent 0 (trivial on `Z_p`,
//!   not on `p^{-1} Z_p`);
//! * an extension with residue cardinality `q` and different exponent `d`
//!   composes with the trace, so its conductor exponent is `-d` and the
//!   self-dual measure gives `vol(O) = q^{-d/2}`;
//! * on the complex backend `ψ(z) = e^{4πi re z}` and `|z|` is the square
//!   norm, with the measure twice Lebesgue.

pub mod gamma;
pub mod gauss;
pub mod quasi;

pub use gamma::{
    classical_gamma, gamma_complex, gamma_ext, gamma_padic, gamma_via_integral, rho_padic,
};
pub use gauss::{all_mult_characters, gamma_ff, gauss_sum, jacobi_sum, MultCharacter};
pub use quasi::QuasiCharacter;
