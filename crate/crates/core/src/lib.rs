//! Explicit bases for the solution spaces of `X*J ± JX = 0` and sampling of the
//! automorphism group `{G : G*JG = J}` for real and complex, singular or nonsingular `J`.

pub mod basis;
pub mod eigen;
pub mod error;
pub mod group;
pub mod linalg;
pub mod mat;
pub mod options;
pub mod pencil;
mod spectrum;

pub use basis::{
    basis_with, cosol_basis, dim_from_structure, dim_report, oracle_basis, sol_basis, span_equal, DimReport,
    SolutionBasis, Space,
};
pub use error::{Error, Result};
pub use group::{
    classify_2x2, exp_map, membership_residual, profile_4x4, project_cloud, sample_group, Case2x2,
    Classification2x2, Cloud, Profile4x4, ProjectMode, SampleConfig,
};
pub use mat::{Field, Involution, Mat, C64};
pub use options::{Representative, SolveOptions, Tolerances};
