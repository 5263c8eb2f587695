use serde::Serialize;

use segspace::orbifold::{CONJUGATION_TOL, INCLUSION_TOL, KERNEL_TOL};
use segspace::DEFAULT_TOL;

pub const DEFAULT_MAX_N: usize = 40;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_T_FINAL: f64 = 1.0;

/// Thresholds used by the verification suites. `membership` is the only one
/// exposed as a flag (`--tol`); the rest are fixed and reported for the record.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    pub membership: f64,
    pub round_trip: f64,
    pub frame_orthogonality: f64,
    pub ruling_gram: f64,
    pub rank: f64,
    pub eigen_relation: f64,
    pub conjugation: f64,
    pub rotation_orthogonality: f64,
    pub kernel: f64,
    pub inclusion: f64,
    pub phase: f64,
    pub straight_drift: f64,
    pub drift: f64,
}

impl Tolerances {
    pub fn with_membership(membership: f64) -> Self {
        Self {
            membership,
            round_trip: 1e-12,
            frame_orthogonality: 1e-12,
            ruling_gram: 1e-10,
            rank: 1e-10,
            eigen_relation: 1e-10,
            conjugation: CONJUGATION_TOL,
            rotation_orthogonality: 1e-12,
            kernel: KERNEL_TOL,
            inclusion: INCLUSION_TOL,
            phase: 1e-12,
            straight_drift: 1e-12,
            drift: 1e-7,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::with_membership(DEFAULT_TOL)
    }
}
