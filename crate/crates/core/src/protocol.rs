//! Campaign orchestration: the sandwiched pairwise campaign and the
//! cumulative stress sequence.
//!
//! Every trial and job draws its RNG stream from [`derive_seed`], so the
//! parallel schedule produces the same bytes as a serial one.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::BackendProfile;
use crate::circuits::{transpile, Circuit, CircuitError, Family, PhysicalCircuit};
use crate::derive_seed;
use crate::mapping::{get_maps_for_circuits, MappingError, MappingSet};
use crate::sim::{execute, ideal_distribution_logical, transpiled_zip, CountsRecord, Distribution, SimError};

/// Default shots per job.
pub const DEFAULT_SHOTS: u64 = 4096;

const STRESS_STREAM: u64 = 0x5757;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("invalid protocol configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    PreSolo,
    Cotenant,
    PostSolo,
}

/// Position of one job in the campaign queue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobLabel {
    pub phase: Phase,
    pub target: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cotenant: Option<usize>,
}

/// Campaign job queue: pre-solos, then all ordered pairs grouped by
/// target, then post-solos.
pub fn campaign_job_order(m: usize) -> Vec<JobLabel> {
    let solo = |phase, target| JobLabel { phase, target, cotenant: None };
    (0..m)
        .map(|i| solo(Phase::PreSolo, i))
        .chain(
            (0..m).flat_map(|i| (0..m).map(move |j| JobLabel { phase: Phase::Cotenant, target: i, cotenant: Some(j) })),
        )
        .chain((0..m).map(|i| solo(Phase::PostSolo, i)))
        .collect()
}

/// One sandwiched trial on one backend at one padding depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub backend: String,
    pub backend_family: String,
    pub padding: usize,
    pub trial: usize,
    pub shots: u64,
    /// Master seed of the campaign the trial belongs to.
    pub seed: u64,
    pub families: Vec<Family>,
    /// `mappings[0]` is the target region M₀, `mappings[1]` the cotenant region M₁.
    pub mapping: MappingSet,
    pub job_order: Vec<JobLabel>,
    /// ρ_{i,0}
    pub pre_solo: Vec<CountsRecord>,
    /// `cotenant[i][j]`: target `i` measured while cotenant `j` ran, ρ_{i,j}.
    pub cotenant: Vec<Vec<CountsRecord>>,
    /// `cotenant_records[i][j]`: the cotenant's own counts in that job.
    pub cotenant_records: Vec<Vec<CountsRecord>>,
    /// ρ_{i,m+1}
    pub post_solo: Vec<CountsRecord>,
}

impl CampaignResult {
    pub fn num_circuits(&self) -> usize {
        self.families.len()
    }

    pub fn num_jobs(&self) -> usize {
        self.pre_solo.len() + self.cotenant.iter().map(Vec::len).sum::<usize>() + self.post_solo.len()
    }
}

fn check_common(circuits: &[Circuit], trials: usize, shots: u64) -> Result<(), ProtocolError> {
    if circuits.is_empty() {
        return Err(ProtocolError::Config("at least one circuit is required".into()));
    }
    if trials == 0 {
        return Err(ProtocolError::Config("trials must be at least 1".into()));
    }
    if shots == 0 {
        return Err(ProtocolError::Config("shots must be at least 1".into()));
    }
    Ok(())
}

/// Runs `trials` sandwiched pairwise trials (in parallel).
pub fn run_pairwise_campaign(
    circuits: &[Circuit],
    backend: &BackendProfile,
    p: usize,
    trials: usize,
    shots: u64,
    seed: u64,
) -> Result<Vec<CampaignResult>, ProtocolError> {
    check_common(circuits, trials, shots)?;
    (0..trials).into_par_iter().map(|t| run_campaign_trial(circuits, backend, p, t, shots, seed)).collect()
}

/// One trial: fresh M₀/M₁ allocation, then the 2m + m² job queue.
pub fn run_campaign_trial(
    circuits: &[Circuit],
    backend: &BackendProfile,
    p: usize,
    trial: usize,
    shots: u64,
    seed: u64,
) -> Result<CampaignResult, ProtocolError> {
    check_common(circuits, 1, shots)?;
    let m = circuits.len();
    let map = &backend.coupling_map;
    let trial_seed = derive_seed(seed, &[trial as u64]);
    let width = circuits.iter().map(|c| c.num_qubits).max().unwrap_or(1);
    let mapping = get_maps_for_circuits(&[width, width], map, p, derive_seed(trial_seed, &[0]))?;

    let on = |region: &[usize]| -> Result<Vec<PhysicalCircuit>, ProtocolError> {
        circuits.iter().map(|c| Ok(transpile(c, map, region, 42)?)).collect()
    };
    let targets = on(&mapping.mappings[0])?;
    let cotenants = on(&mapping.mappings[1])?;

    let order = campaign_job_order(m);
    let records: Vec<Vec<CountsRecord>> = order
        .par_iter()
        .enumerate()
        .map(|(k, job)| {
            let mut tenants = vec![targets[job.target].clone()];
            if let Some(j) = job.cotenant {
                tenants.push(cotenants[j].clone());
            }
            let zipped = transpiled_zip(tenants)?;
            Ok(execute(&zipped, &backend.crosstalk, map, shots, derive_seed(trial_seed, &[1, k as u64]))?)
        })
        .collect::<Result<_, ProtocolError>>()?;

    let mut pre_solo = Vec::with_capacity(m);
    let mut post_solo = Vec::with_capacity(m);
    let mut cotenant = vec![Vec::with_capacity(m); m];
    let mut cotenant_records = vec![Vec::with_capacity(m); m];
    for (job, mut recs) in order.iter().zip(records) {
        match job.phase {
            Phase::PreSolo => pre_solo.push(recs.swap_remove(0)),
            Phase::PostSolo => post_solo.push(recs.swap_remove(0)),
            Phase::Cotenant => {
                let other = recs.pop().expect("two tenants");
                cotenant[job.target].push(recs.pop().expect("two tenants"));
                cotenant_records[job.target].push(other);
            }
        }
    }

    Ok(CampaignResult {
        backend: backend.label.clone(),
        backend_family: backend.family.clone(),
        padding: p,
        trial,
        shots,
        seed,
        families: circuits.iter().map(|c| c.family).collect(),
        mapping,
        job_order: order,
        pre_solo,
        cotenant,
        cotenant_records,
        post_solo,
    })
}

/// Order in which stress cotenants are added.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StressOrder {
    /// Strongest aggressor first.
    #[serde(rename = "STW")]
    StrongToWeak,
    /// Weakest aggressor first.
    #[serde(rename = "WTS")]
    WeakToStrong,
}

impl StressOrder {
    pub fn label(self) -> &'static str {
        match self {
            StressOrder::StrongToWeak => "STW",
            StressOrder::WeakToStrong => "WTS",
        }
    }
}

impl std::str::FromStr for StressOrder {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "STW" => Ok(StressOrder::StrongToWeak),
            "WTS" => Ok(StressOrder::WeakToStrong),
            other => Err(ProtocolError::Config(format!("unknown stress order `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressStep {
    /// Number of concurrently running circuits, target included.
    pub load: usize,
    pub counts: CountsRecord,
}

/// One stress trial: loads 1..=k+1 (load 1 is the target alone), then a
/// closing target solo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressResult {
    pub order: StressOrder,
    pub backend: String,
    pub backend_family: String,
    pub padding: usize,
    pub trial: usize,
    pub shots: u64,
    pub seed: u64,
    pub target: Family,
    /// Cotenant families in the order they were added.
    pub cotenants: Vec<Family>,
    /// `mappings[0]` is the target; `mappings[k]` hosts `cotenants[k - 1]`.
    pub mapping: MappingSet,
    pub steps: Vec<StressStep>,
    pub post_solo: CountsRecord,
    /// Noiseless output distribution of the target, the fidelity reference.
    pub target_ideal: Distribution,
}

/// Cumulative stress on `target`. `ranking` lists the cotenant families
/// from strongest to weakest aggressor; each must have a circuit in `pool`.
#[allow(clippy::too_many_arguments)]
pub fn run_stress(
    target: &Circuit,
    pool: &[Circuit],
    ranking: &[Family],
    order: StressOrder,
    backend: &BackendProfile,
    p: usize,
    trials: usize,
    shots: u64,
    seed: u64,
) -> Result<Vec<StressResult>, ProtocolError> {
    check_common(std::slice::from_ref(target), trials, shots)?;
    let mut sequence: Vec<&Circuit> = ranking
        .iter()
        .map(|f| {
            pool.iter()
                .find(|c| c.family == *f)
                .ok_or_else(|| ProtocolError::Config(format!("no circuit of family {f} in the stress pool")))
        })
        .collect::<Result<_, _>>()?;
    if sequence.is_empty() {
        return Err(ProtocolError::Config("stress ranking is empty".into()));
    }
    if order == StressOrder::WeakToStrong {
        sequence.reverse();
    }
    let ideal = ideal_distribution_logical(target)?;
    (0..trials)
        .into_par_iter()
        .map(|trial| stress_trial(target, &sequence, order, backend, p, trial, shots, seed, &ideal))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn stress_trial(
    target: &Circuit,
    sequence: &[&Circuit],
    order: StressOrder,
    backend: &BackendProfile,
    p: usize,
    trial: usize,
    shots: u64,
    seed: u64,
    ideal: &Distribution,
) -> Result<StressResult, ProtocolError> {
    let map = &backend.coupling_map;
    let trial_seed = derive_seed(seed, &[STRESS_STREAM, trial as u64]);
    let sizes: Vec<usize> = std::iter::once(target.num_qubits).chain(sequence.iter().map(|c| c.num_qubits)).collect();
    // Allocated once for the full load; smaller loads use a prefix.
    let mapping = get_maps_for_circuits(&sizes, map, p, derive_seed(trial_seed, &[0]))?;
    let placed_target = transpile(target, map, &mapping.mappings[0], 42)?;
    let placed: Vec<PhysicalCircuit> = sequence
        .iter()
        .zip(&mapping.mappings[1..])
        .map(|(c, region)| transpile(c, map, region, 42))
        .collect::<Result<_, _>>()?;

    // Loads 1..=k+1, then the post-solo (load 1 again).
    let loads: Vec<usize> = (1..=sequence.len() + 1).chain(std::iter::once(1)).collect();
    let records: Vec<CountsRecord> = loads
        .par_iter()
        .enumerate()
        .map(|(k, &load)| {
            let tenants: Vec<PhysicalCircuit> =
                std::iter::once(placed_target.clone()).chain(placed[..load - 1].iter().cloned()).collect();
            let job = transpiled_zip(tenants)?;
            let mut recs = execute(&job, &backend.crosstalk, map, shots, derive_seed(trial_seed, &[1, k as u64]))?;
            Ok(recs.swap_remove(0))
        })
        .collect::<Result<_, ProtocolError>>()?;

    let mut records = records;
    let post_solo = records.pop().expect("post-solo job");
    let steps = loads.iter().zip(records).map(|(&load, counts)| StressStep { load, counts }).collect();
    Ok(StressResult {
        order,
        backend: backend.label.clone(),
        backend_family: backend.family.clone(),
        padding: p,
        trial,
        shots,
        seed,
        target: target.family,
        cotenants: sequence.iter().map(|c| c.family).collect(),
        mapping,
        steps,
        post_solo,
        target_ideal: ideal.clone(),
    })
}
