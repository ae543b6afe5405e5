//! Time-dependent reduced spaces: basis construction, offline precomputation
//! and the dimension-independent online phase.

mod basis;
mod offline;
mod online;

pub use basis::{
    build_time_dependent_basis, build_time_independent_basis, BasisStorage, TimeDependentBasis,
};
pub use offline::{
    compute_offline_quantities, InitialData, OfflineQuantities, SamplingPlan, StepBlocks,
    StepStorage,
};
pub use offline::StepMatrixStorage;
pub use online::{
    reconstruct, reconstruct_trajectory, residual_norm_online, solve_reduced, step_coefficients,
    ReducedTrajectory,
};
