//! Risk-measure vectors on exactly represented loss distributions.
//!
//! The crate computes Value at Risk, tail conditional expectation and
//! maximum loss at several confidence levels, checks risk measures against
//! the coherence axioms, builds families of distinct loss distributions
//! that share a whole measure vector, and evaluates Basel I/II capital
//! ratios. See the `examples/` directory for one runnable program per
//! capability.

pub mod basel;
pub mod cli;
pub mod coherence;
pub mod distributions;
pub mod error;
pub mod family;
pub mod measures;

pub use distributions::{LossDistribution, Position, QuantileConvention, Segment};
pub use error::{Result, RiskError};
pub use measures::{
    is_var_acceptable, max_loss, measure_vector, measure_vector_with, tce, tce_with, var, var_with,
    MeasureEntry, MeasureVector, RiskMeasure, ScenarioMeasure, StatePayoffs,
};
