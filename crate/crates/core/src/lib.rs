//! Dense integrators for Lindblad master equations.
//!
//! Four interchangeable steppers evolve a density matrix under a Markovian
//! generator: a truncated-series method applied directly to the matrix, two
//! vectorization (superoperator) methods, and fixed-step RK4. Around them:
//! truncation-error bounds with adaptive order selection, quantum-jump
//! trajectory unraveling with thermal initial-state sampling, and builders
//! for the model systems used by the benchmark harness.
//!
//! Everything is deterministic: stochastic components draw from splittable
//! seeded streams, so equal seeds give bit-identical results.

pub mod error;
pub mod integrators;
pub mod linalg;
pub mod lindblad;
pub mod memory;
pub mod streams;
pub mod systems;
pub mod trajectories;

pub use error::CoreError;
pub use integrators::{
    applies_per_step, choose_order, evolve, rk4_step, taylor_step, truncation_error_bound,
    vec_full_step, vec_taylor_step, ErrorBound, EvolutionSample, IntegratorSpec, Method,
    OrderChoice, StepReport, VecFullPropagator,
};
pub use linalg::{
    expm, hermitian_eigenvalues, spectral_norm, ComplexMatrix, ExpmConfig, ExpmMethod,
    SpectralNormEstimate,
};
pub use lindblad::{
    devectorize, vectorize, DensityMatrix, LindbladModel, NormStrategy, VectorizedState,
};
pub use memory::MemoryBudget;
pub use num_complex::Complex64;
pub use systems::{
    basis_product_state, heisenberg_model, neel_pattern, spin_operator, thermal_state,
    two_level_model, Spin, SpinAxis, SpinChainSpec, TwoLevelSpec,
};
pub use trajectories::{
    effective_hamiltonian, ensemble_density, mcwf_ensemble, mcwf_trajectory, metts_sample,
    nh_propagate, CollapseBasis, JumpEvent, MettsConfig, PureState, Trajectory, TrajectoryConfig,
};
