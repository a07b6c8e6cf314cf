//! Numerical tolerances shared by every module.
//!
//! Exact-real predicates are replaced by one scale-aware policy: an absolute
//! tolerance of `1e-9 * (1 + magnitude)` where magnitude is the size of the
//! coordinates involved.

/// Relative factor of the scale-aware absolute tolerance.
pub const REL: f64 = 1e-9;

/// A simplex is degenerate when its height is at most this fraction of its diameter.
pub const DEGENERATE: f64 = 1e-9;

/// Orthonormality tolerance for flat bases.
pub const ORTHONORMAL: f64 = 1e-10;

/// Chain coefficients below this magnitude are pruned.
pub const CHAIN_ZERO: f64 = 1e-12;

/// Slack added to closed-ball membership tests.
pub const BALL_SLACK: f64 = 1e-12;

/// Relative slack (times R^2) for strict-inside-circumsphere tests.
pub const POWER: f64 = 1e-9;

/// Barycentric margin below which a load hit is considered borderline.
pub const GENERIC_MARGIN: f64 = 1e-6;

/// Distance between a snapped coefficient and its integer target.
pub const SNAP: f64 = 1e-6;

/// Scale-aware absolute tolerance.
#[inline]
pub fn abs(magnitude: f64) -> f64 {
    REL * (1.0 + magnitude.abs())
}
