//! Exact recoupling symbols, lattice spin networks and Wilson loop identities.
//!
//! The crate evaluates Wigner 3j and 6j symbols and 3nj brackets of the second
//! kind exactly (as [`surd::SurdSum`]) or in floating point, builds the
//! tetrahedron, cube and 2x2 torus spin networks with their ground-state
//! amplitudes, evaluates Wilson loop matrix elements between spin-network
//! states and checks the resulting eigenvalue identities over ranges of spins.

pub mod cache;
pub mod error;
pub mod lattice;
pub mod second_kind;
pub mod verify;
pub mod wigner;
pub mod wilson;

pub use cache::{load_cache, prefill_6j_cache, save_cache};
pub use error::{Result, SpinError};
pub use lattice::{
    admissible, amplitude, amplitude_bracket, amplitude_symbol, build_lattice, enumerate_assignments,
    sample_assignments, sector_sign, LatticeGraph, LatticeKind, LinkClass, SectorPhase, SpinAssignment,
    TopologicalSector,
};
pub use second_kind::{second_kind, single_x_reduction, SecondKindBracket};
pub use wigner::{
    clebsch_gordan, pi_factor, pi_squared, triangle, wigner_3j, wigner_6j, SixJKey,
};
pub use wilson::{
    bracket_form, identity_overlap, matrix_element, matrix_element_term, BracketForm, LoopName, LoopSpec,
    MatrixElementExact, MatrixElementF64, MatrixElementResult,
};
pub use verify::{
    phase_cancellation_check, residual, verify, verify_with, Failure, IdentityId, IdentityReport, Mode, ReportParams,
    Sample, VerifyParams,
};

/// Exact scalar type.
pub type Exact = surd::SurdSum;
