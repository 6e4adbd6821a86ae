//! Constants measured once and frozen.

/// Constant in `A(n, w) ≤ C(ηᵏ|w| + 2ᵏ)`, `1 ≤ k ≤ n − 2`.
pub const A_CONTRACT_C: f64 = 1.4233;

/// Constant of the two-sided volume bound for diagonal products, calibrated
/// on the reference plans (largest observed ratio ln 8 ≈ 2.0794, at radius 1).
pub const GROWTH_C: f64 = 2.08;
