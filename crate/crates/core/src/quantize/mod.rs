//! Physical operators on a surface and the quantization-condition checks.

mod checks;
mod config;
mod nullspace;
mod ops;
mod report;

pub use checks::{
    dqc_operators, dqc_residual, fcc_check, hermiticity_check, pp_commutator_check,
    pp_commutator_operators, tangency_check, tangency_operator, tangency_without_curvature,
    wedge_operator, CheckContext, Sample, DEFAULT_SAMPLES, DEFAULT_SEED, DQC_TOL, FCC_TOL,
    HERMITICITY_TOL, PPC_TOL, TANGENCY_TOL,
};
pub use config::{GammaRep, PhysicsConfig, VGAnsatz};
pub use nullspace::{
    companion_seed, generator_wedges, label, nullspace, principal_angle, vg_constraint_map,
    vg_nullspace_solve, ConstraintMap, Nullspace, ANGLE_TOL, GENERATORS, NULLSPACE_TOL,
    SINGULAR_FLOOR,
};
pub use ops::{
    build_geometry, covariant_momentum, curved_gammas, dirac_hamiltonian, geometric_momentum,
    geometric_momentum_with, normal_ops, position_ops,
};
pub use report::{CheckReport, NullspaceReport};
