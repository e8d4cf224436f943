//! Reference coefficients, error metrics and coefficient-decay bounds.

mod bounds;
mod coefficients;
mod metrics;

pub use bounds::{
    coeff_decay_bound, shots_bound, truncation_error_bound, BoundInputs, PiecewiseData,
};
pub use coefficients::{continuous_coefficients, dft_oracle, extended_coefficients, CoefficientSet};
pub use metrics::{l2ns, rmse};
