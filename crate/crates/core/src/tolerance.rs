//! Numerical tolerances shared by every module.
//!
//! All comparisons are absolute and element-wise (max norm); states are
//! normalized so every magnitude is O(1).

/// Normalization of states and unit trace of density operators.
pub const EPS_NORM: f64 = 1e-10;
/// Hermiticity of density operators and projectors.
pub const EPS_HERM: f64 = 1e-10;
/// Idempotency of projectors.
pub const EPS_IDEM: f64 = 1e-10;
/// Unitarity of local evolutions and basis changes.
pub const EPS_UNIT: f64 = 1e-10;
/// Smallest eigenvalue accepted for a positive operator is `-EPS_PSD`.
pub const EPS_PSD: f64 = 1e-10;
/// Default comparison tolerance between two computed results.
pub const EPS_CMP: f64 = 1e-9;
/// Events with probability at or below this value are treated as impossible.
pub const EPS_PROB: f64 = 1e-12;
