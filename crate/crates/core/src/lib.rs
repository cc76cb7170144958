//! Metric sparsification, finite-propagation operators and operator norm
//! localization on finite metric spaces.
//!
//! The numerical core is generic over the scalar: spaces, measures and
//! sparsifiers over any [`Scalar`] (floats or exact rationals), operators
//! and spectra over any [`Real`] (`f32`, `f64`). Concrete aliases below fix
//! the common choices.

pub mod cli;
pub mod error;
pub mod expanders;
pub mod io;
pub mod lp;
pub mod operators;
pub mod scalar;
pub mod space;
pub mod sparsify;

use num_rational::BigRational;

pub use error::{Error, Result};
pub use expanders::Multigraph;
pub use scalar::{Real, Scalar};
pub use space::{Measure, Subset};

pub type MetricSpace = space::FiniteMetricSpace<f64>;
pub type ExactMetricSpace = space::FiniteMetricSpace<BigRational>;
pub type Decomposition = sparsify::ClusterDecomposition<f64>;
pub type ExactDecomposition = sparsify::ClusterDecomposition<BigRational>;
pub type Operator = operators::FiberedOperator<f64>;
pub type Operator32 = operators::FiberedOperator<f32>;
pub type State = operators::StateVector<f64>;
pub type Report = operators::LocalizationReport<f64>;
