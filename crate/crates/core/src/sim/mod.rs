//! Exact simulation backends.
//!
//! After the leading Hadamard layer a QTV circuit only permutes basis states
//! (plus resets of classically determined bits), so it is simulated by
//! propagating every coordinate branch as a classical bit string. A dense
//! statevector backend covers small circuits for cross-checking.

mod branchwise;
mod lanes;
mod measure;
mod statevector;

use thiserror::Error;

pub use branchwise::{run_branches, run_branchwise, BranchState, ReadoutEntry, ReadoutTable};
pub use lanes::{run_truth_table, LaneState};
pub use measure::{measure_sampled, sample_readout};
pub use statevector::{run_statevector, run_statevector_with_cap, Statevector, DEFAULT_QUBIT_CAP};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("Hadamard on qubit {0} outside the leading coordinate layer")]
    UnexpectedHadamard(usize),
    #[error("leading Hadamard layer must cover exactly the coordinate registers")]
    HadamardLayer,
    #[error("circuit has {circuit} qubits but the state holds {state}")]
    QubitCount { circuit: usize, state: usize },
    #[error("{qubits} qubits exceed the statevector cap of {cap}")]
    QubitCap { qubits: usize, cap: usize },
    #[error("reset of qubit {0} would merge two nonzero amplitudes")]
    ResetInSuperposition(usize),
    #[error("shots must be at least 1")]
    ZeroShots,
}
