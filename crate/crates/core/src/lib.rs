//! Field dynamics of the resonant intensity-dependent (Buck-Sukumar)
//! Jaynes-Cummings model in a truncated Fock space.
//!
//! The crate is split along the lines of the physics:
//!
//! - [`fock`]: state vectors, density matrices, coherent and cat states.
//! - [`dynamics`]: the reduced field map `ρ → AρA† + BρB†` for an atom
//!   prepared in a definite state, in intensity-dependent or ordinary coupling.
//! - [`oracles`]: closed-form series used to cross-check the matrix engine.
//! - [`phase_space`]: Husimi Q-function evaluation on points and grids.
//!
//! Everything is immutable after construction; all operations are pure and
//! safe to call from several threads at once.

pub mod dynamics;
pub mod error;
pub mod fock;
pub mod oracles;
pub mod phase_space;
mod special;

pub use num_complex::Complex64 as C64;

pub use dynamics::{
    atomic_inversion, evolve_field, excited_population, joint_state_blocks, op_a, op_b, AtomInit,
    CouplingMode, DiagonalOp, EvolutionParams, JointState, LadderAction, LadderKind, ShiftOp,
};
pub use error::{Error, Result};
pub use fock::{
    default_dim, fidelity_with_pure, make_cat, make_coherent, mix, photon_distribution,
    pure_density, purity_defect, CatSpec, DensityMatrix, StateVector, DEFAULT_TAIL_TOL,
};
