//! Default numerical thresholds. Exact backends ignore all of these and
//! compare with zero.

/// Max-abs coefficient tolerance for the complex backend.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Relative singular-value cutoff for numerical rank decisions.
pub const RANK_TOL: f64 = 1e-8;

/// Distance from a kernel pole below which evaluation is refused.
pub const KERNEL_POLE_TOL: f64 = 1e-6;

/// Bound on the integer exponents searched by the solvability predicate.
pub const DEFAULT_EXPONENT_BOUND: u32 = 8;

/// Tolerance on `sum a_i ln|lambda_i|` when searching for multiplicative relations.
pub const RELATION_TOL: f64 = 1e-9;

/// Eigenvalues closer than this are evaluated together in the Schur-Parlett
/// recurrence.
pub const PARLETT_CLUSTER_DELTA: f64 = 0.1;

/// Eigenvalues closer than this (relative) are grouped when reading off
/// Jordan structure numerically.
pub const JORDAN_CLUSTER_TOL: f64 = 1e-3;
