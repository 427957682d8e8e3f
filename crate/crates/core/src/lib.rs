//! Berry-Esseen simulation toolkit for sample quantiles of associated
//! sequences.
//!
//! The model is a finite Gaussian moving average with positive weights,
//! which is an associated stationary sequence with standard normal
//! marginals. The crate provides:
//!
//! * [`normal_math`]: univariate and bivariate normal numerics,
//! * [`assoc_model`]: the moving-average model, its exact autocovariance and
//!   path simulation,
//! * [`empirical`]: empirical distribution function and sample quantile,
//! * [`theory`]: exact long-run variances and the quantile normalizer `a_p`,
//! * [`montecarlo`]: the distance `sup_t |P(A_n <= t) - Phi(t)|` by simulation,
//! * [`bounds`]: numerical checks of the inequalities behind the rates.

pub mod assoc_model;
pub mod bounds;
pub mod empirical;
pub mod error;
pub mod montecarlo;
pub mod normal_math;
mod quadrature;
pub mod rng;
pub mod theory;

pub use assoc_model::{build_model, CoefficientScheme, DecayFit, DecayKind, ModelSpec, MovingAverageModel};
pub use bounds::BoundCheckReport;
pub use empirical::Sample;
pub use error::{Error, Result};
pub use montecarlo::{BerryEsseenEstimate, ExperimentConfig, ExperimentOutcome, RateFit, TGrid};
pub use rng::RandomStream;
pub use theory::{QuantileSpec, RateParameters, ShiftedVariance};

/// First simulated model: `a_j = 0.1^j`, `m = 100`.
pub fn exponential_case() -> MovingAverageModel {
    build_model(CoefficientScheme::Exponential { rho: 0.1 }, 100).expect("valid model")
}

/// Second simulated model: `a_j = j^-7`, `m = 100`.
pub fn polynomial_case() -> MovingAverageModel {
    build_model(CoefficientScheme::Polynomial { s: 7.0 }, 100).expect("valid model")
}
