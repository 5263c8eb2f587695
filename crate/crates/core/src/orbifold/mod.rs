//! The cyclic re-enumeration of vertices acting on `𝕊ⁿ⁻²`: the shift matrix
//! `ℳ`, its rotation normal form `ℛₙ`, the group `⟨ℛₙ, ν⟩` with `ν = −I`,
//! lens-space parameters and the fixed-point stratification of the quotient.

mod exact;
mod rotation;
mod strata;

pub use exact::{char_poly, gcd, shift_matrix, IntMatrix, ShiftMatrix};
pub use rotation::{
    basis_matrix, eigen_pairs, eigen_vector, group_structure, lens_params_odd, literal_basis_matrix, rotation2,
    rotation_form, rotation_matrix, EigenData, GroupStructure, LensParams, OddLens, RotationNormalForm,
    CONJUGATION_TOL, GROUP_CAP_FACTOR,
};
pub use strata::{
    block_count_dims, containment_defect, fixed_sets, freeness_check, inclusion_angle, kernel_basis, numeric_dims,
    stratification, stratum_quotient, FreenessReport, Quotient, Stratification, Stratum, INCLUSION_TOL, KERNEL_TOL,
};
