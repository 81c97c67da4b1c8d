//! Convergence rates of Laguerre and Hermite spectral expansions for
//! functions with algebraic–logarithmic singularities.
//!
//! - [`specfun`]: `ln Γ`, digamma, Bessel `J_ν`.
//! - [`orthopoly`]: orthonormal weighted Laguerre and Hermite functions.
//! - [`quadrature`]: Gauss rules and graded composite quadrature.
//! - [`coefficients`]: expansion coefficients and closed-form oracles.
//! - [`asymptotics`]: predicted rates, rate fits, oscillatory-integral decay.
//! - [`projection`]: truncation errors in weighted `L²`, sup and Sobolev norms.

// Guards are written as `!(x > lo)` so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::type_complexity)]

pub mod asymptotics;
pub mod coefficients;
mod error;
pub mod orthopoly;
pub mod projection;
pub mod quadrature;
pub mod specfun;

pub use asymptotics::{FitResult, RatePrediction, Target, TheoremTag};
pub use coefficients::{
    Basis, CoefficientSeries, SingularFunctionSpec, SingularityKind, SmoothFactor,
};
pub use error::{Error, Result};
pub use projection::{ErrorCurve, NormKind};
pub use quadrature::{QuadratureRule, RuleKind, SingularOscillatoryPlan};
