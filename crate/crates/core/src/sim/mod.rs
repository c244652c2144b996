//! Statevector execution of zipped multi-tenant jobs with a coherent ZZ
//! crosstalk model, sampled depolarizing noise, and readout flips.

mod counts;
mod engine;
mod profile;
mod statevector;

use thiserror::Error;

use crate::topology::Qubit;

pub use counts::{CountsRecord, Distribution};
pub use engine::{
    execute, ideal_distribution, ideal_distribution_logical, transpiled_zip, ZippedJob, MIN_TRAJECTORIES,
    TRAJECTORY_BUDGET,
};
pub use profile::CrosstalkProfile;
pub use statevector::StateVector;

/// Largest register the dense simulator accepts.
pub const MAX_SIMULATED_QUBITS: usize = 20;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("tenant regions overlap on qubit {qubit} (tenants {first} and {second})")]
    OverlappingRegions { qubit: Qubit, first: usize, second: usize },
    #[error("tenant qubit {0} is not in the coupling map")]
    QubitNotInMap(Qubit),
    #[error("{requested} simulated qubits exceeds the limit of {limit}")]
    TooManyQubits { requested: usize, limit: usize },
    #[error("shots must be at least 1")]
    ZeroShots,
    #[error("crosstalk profile field {field} has invalid value {value}")]
    InvalidProfile { field: &'static str, value: f64 },
}
