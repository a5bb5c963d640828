//! Numerical tolerances shared across the crate.

/// Structural identities: commutators, Hermiticity, Casimir proportionality.
pub const STRUCTURAL: f64 = 1e-10;
/// Inequality margins: a relation counts as satisfied when `lhs - bound >= -MARGIN`.
pub const MARGIN: f64 = 1e-9;
/// Optimizer tightness gap.
pub const OPTIMIZER: f64 = 1e-6;
/// Allowed deviation of `sum |psi_m|^2` from one.
pub const NORM: f64 = 1e-12;
/// Negative variances above `-VARIANCE_CLIP` are treated as round-off.
pub const VARIANCE_CLIP: f64 = 1e-12;
/// Probability mass allowed in the top decile of a truncated ladder.
pub const TAIL_MASS: f64 = 1e-8;
/// Eigenpair residual accepted from the Hermitian eigensolver.
pub const EIGEN_RESIDUAL: f64 = 1e-8;
