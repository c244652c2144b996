//! Circuit IR, benchmark builders, structural statistics and the
//! region-constrained transpiler.

mod builders;
mod ir;
mod stats;
mod transpile;

use thiserror::Error;

use crate::topology::Qubit;

pub use builders::{
    benchmark_circuit, benchmark_suite, build_grover, build_qaoa_maxcut, build_qft, build_qpe, build_zzfeaturemap,
    grover_iterations,
};
pub use ir::{Circuit, Family, Gate, GateKind};
pub use stats::{circuit_stats, CircuitStats};
pub use transpile::{transpile, PhysicalCircuit};

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("{gate} acts on {expected} qubit(s), got {got}")]
    Arity { gate: &'static str, expected: usize, got: usize },
    #[error("two-qubit gate repeats qubit {0}")]
    RepeatedQubit(Qubit),
    #[error("non-finite angle on {0}")]
    NonFiniteAngle(&'static str),
    #[error("gate {0} requires an angle")]
    MissingAngle(String),
    #[error("unknown gate kind `{0}`")]
    UnknownGate(String),
    #[error("unknown circuit family `{0}`")]
    UnknownFamily(String),
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit circuit")]
    QubitOutOfRange { qubit: Qubit, num_qubits: usize },
    #[error("{what}: expected length {expected}, got {got}")]
    ParameterMismatch { what: &'static str, expected: usize, got: usize },
    #[error("invalid bitstring `{value}` (expected {expected_len} binary digits)")]
    InvalidBitstring { value: String, expected_len: usize },
    #[error("{0}")]
    InvalidParameter(String),
    #[error("region has {got} qubits but the circuit needs {needed}")]
    RegionTooSmall { needed: usize, got: usize },
    #[error("region qubit {0} is repeated or outside the coupling map")]
    InvalidRegionQubit(Qubit),
    #[error("region does not induce a connected subgraph")]
    DisconnectedRegion,
}
