//! Numerical backends for local zeta integrals.
//!
//! Three regimes share one report type. The certified engine
//! ([`padic_box_integrate`], [`padic_full_integrate`]) decomposes p-adic
//! coefficient space into ultrametric cells and only ever adds exactly
//! evaluated contributions, pushing everything unresolved into an explicit
//! error budget. Monte Carlo samplers cover dimensions the certified
//! engine cannot reach. Finite-field sums are plain enumerations.
//! [`trace_hyperplane_integrate`] is a front end that parameterizes a
//! trace-form hyperplane in a product of unramified extensions and hands
//! the result to the certified engine.

mod cells;
mod estimate;
mod factors;
mod ff;
mod hyperplane;
mod mc;

pub use cells::{padic_box_integrate, padic_full_integrate, EngineConfig, PadicIntegrand};
pub use estimate::{IntegralEstimate, MeasureSpec, TailReport};
pub use factors::{
    ball_kernel, AffineFactor, AffineView, CellFactor, DiscriminantFactor, GeneralFactor,
    NormFactor, TailProfile,
};
pub use ff::ff_enumerate_sum;
pub use hyperplane::{inverse_twist_character, trace_hyperplane_integrate, HyperplaneComponent};
pub use mc::{
    complex_mc_integrate, padic_mc_integrate, ComplexMcSpec, PadicCoordDensity, PadicMcSpec,
};
