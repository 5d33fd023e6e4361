//! Brute-force magnetic-quantum-number oracles.
//!
//! Clebsch-Gordan coefficients come from building coupled states explicitly,
//! 6j symbols from the four-3j m-sum, and spin-network amplitudes and loop
//! matrix elements from contracting explicit 3j and link-operator tensors.
//! Nothing here evaluates a closed-form recoupling formula, so these values
//! serve as an independent check on the production evaluators.

mod cg;
mod error;
mod network;
mod sixj;

pub use cg::{oracle_3j, oracle_cg, CgContext};
pub use error::{OracleError, Result};
pub use network::{
    oracle_amplitude, oracle_amplitude_with, oracle_loop_matrix_element, oracle_loop_matrix_element_with,
    oracle_overlap, OracleLimits, OrientedGraph,
};
pub use sixj::oracle_6j;
