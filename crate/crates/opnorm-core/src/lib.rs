//! Computation of q↦p matrix operator norms `max ‖Ax‖_p / ‖x‖_q`.
//!
//! For nonnegative matrices and finite `1 < p <= q` the norm is computed to
//! a requested tolerance by a fixed-point iteration whose potentials give
//! certified two-sided bounds at every step ([`fixed_point`]). Independent
//! ground truth at small sizes comes from multistart projected-gradient
//! search, exact sign enumeration for ∞↦p norms, and an interpolation
//! baseline for general matrices ([`oracle`]). First- and second-order
//! optimality checks live in [`analysis`], and [`instances`] generates the
//! cut-gadget / tensor-amplification verification corpus with known
//! witnesses.

pub mod analysis;
pub mod bounds;
pub mod error;
pub mod fixed_point;
pub mod instances;
pub mod io;
pub mod matrix;
pub mod norms;
pub mod oracle;
pub mod params;

pub use bounds::{BoundsMethod, CertifiedBounds};
pub use error::{Error, Result};
pub use fixed_point::{
    compute_norm, compute_norm_with, iteration_map, potentials, ConvergenceReport,
    IterationOptions, IterationState, Potentials, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
pub use matrix::{positivity_shift, DenseMatrix, PositiveMatrix, UnitVector, DEFAULT_SHIFT_DELTA};
pub use norms::{dualize, lp_norm, norm_ratio};
pub use oracle::{
    brute_norm, brute_norm_seeded, interpolation_estimate, longest_vector, OracleMethod,
    OracleResult, DEFAULT_RESTARTS,
};
pub use params::{parse_exponent, NormParams};
