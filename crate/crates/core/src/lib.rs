//! Crosstalk characterization for multi-tenant quantum processors.
//!
//! The pipeline: allocate disjoint padded regions ([`mapping`]), route the
//! benchmark circuits into them ([`circuits`]), execute zipped jobs on a
//! noisy statevector backend ([`sim`]) under the sandwiched campaign
//! protocol ([`protocol`]), reduce fidelities to impact matrices and
//! affinity tables ([`analysis`]), and pick low-interference cohorts
//! ([`scheduler`]).

pub mod analysis;
pub mod archive;
pub mod backend;
pub mod circuits;
pub mod mapping;
pub mod protocol;
pub mod scheduler;
pub mod sim;
pub mod topology;

pub use analysis::{AffinityTable, ImpactMatrix, SimilarityReport};
pub use backend::BackendProfile;
pub use circuits::{Circuit, Family, Gate, GateKind, PhysicalCircuit};
pub use mapping::MappingSet;
pub use protocol::{CampaignResult, StressOrder, StressResult};
pub use scheduler::{Cohort, JobQueue};
pub use sim::{CountsRecord, CrosstalkProfile, Distribution};
pub use topology::{CouplingMap, Qubit};

/// Derives an independent stream seed from a master seed and a path of
/// indices (trial, job, ...). SplitMix64 finalizer applied per component.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    path.iter().fold(mix(master), |acc, &p| mix(acc ^ mix(p)))
}
