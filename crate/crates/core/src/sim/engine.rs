use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::counts::bitstring;
use super::{CountsRecord, CrosstalkProfile, Distribution, SimError, StateVector, MAX_SIMULATED_QUBITS};
use crate::circuits::{Circuit, Gate, PhysicalCircuit};
use crate::topology::{CouplingMap, Qubit};

/// Every shot that suffers a gate error gets its own trajectory while the
/// total work (amplitudes × ops × trajectories) stays within this budget.
pub const TRAJECTORY_BUDGET: usize = 1 << 28;

/// Trajectory floor when the budget cannot cover every erroneous shot.
pub const MIN_TRAJECTORIES: usize = 64;

/// Several tenants' physical circuits merged into one job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZippedJob {
    pub tenants: Vec<PhysicalCircuit>,
    /// `(tenant, gate index)` in execution order.
    pub schedule: Vec<(usize, usize)>,
}

/// Merges tenants with pairwise-disjoint regions into one job. Gates are
/// interleaved by moment index, keeping each tenant's own order.
pub fn transpiled_zip(tenants: Vec<PhysicalCircuit>) -> Result<ZippedJob, SimError> {
    let mut owner: BTreeMap<Qubit, usize> = BTreeMap::new();
    for (t, pc) in tenants.iter().enumerate() {
        for &q in &pc.region {
            if let Some(&other) = owner.get(&q) {
                return Err(SimError::OverlappingRegions { qubit: q, first: other, second: t });
            }
            owner.insert(q, t);
        }
    }
    let mut events: Vec<(usize, usize, usize)> = Vec::new();
    let moments: Vec<Vec<usize>> = tenants.iter().map(|pc| pc.circuit.moments()).collect();
    for (t, ms) in moments.iter().enumerate() {
        for (i, &m) in ms.iter().enumerate() {
            events.push((m, t, i));
        }
    }
    events.sort_unstable();
    Ok(ZippedJob { schedule: events.into_iter().map(|(_, t, i)| (t, i)).collect(), tenants })
}

/// One scheduled operation with local (simulation) qubit indices.
struct Op {
    gate: Gate,
    /// `(u, v, ε)` crosstalk kicks fired after the gate.
    kicks: Vec<(usize, usize, f64)>,
}

/// Job compiled against a device and profile.
struct Compiled {
    /// Physical qubit at each local index.
    physical: Vec<Qubit>,
    ops: Vec<Op>,
    /// Local positions of each tenant's logical qubits (final layout).
    readout: Vec<Vec<usize>>,
}

impl ZippedJob {
    /// Simulated qubits: the sorted union of tenant regions.
    pub fn qubits(&self) -> Vec<Qubit> {
        let set: BTreeSet<Qubit> = self.tenants.iter().flat_map(|t| t.region.iter().copied()).collect();
        set.into_iter().collect()
    }

    fn compile(&self, profile: &CrosstalkProfile, map: &CouplingMap) -> Result<Compiled, SimError> {
        let physical = self.qubits();
        if let Some(&q) = physical.iter().find(|&&q| q >= map.num_qubits()) {
            return Err(SimError::QubitNotInMap(q));
        }
        if physical.len() > MAX_SIMULATED_QUBITS {
            return Err(SimError::TooManyQubits { requested: physical.len(), limit: MAX_SIMULATED_QUBITS });
        }
        let mut local = vec![usize::MAX; map.num_qubits()];
        let mut owner = vec![0usize; physical.len()];
        for (i, &q) in physical.iter().enumerate() {
            local[q] = i;
        }
        for (t, pc) in self.tenants.iter().enumerate() {
            for &q in &pc.region {
                owner[local[q]] = t;
            }
        }
        let dist: Vec<Vec<Option<usize>>> = if profile.zz_strength > 0.0 {
            physical.iter().map(|&q| map.distances_from(q).expect("checked range")).collect()
        } else {
            Vec::new()
        };

        let mut ops = Vec::with_capacity(self.schedule.len());
        for &(t, i) in &self.schedule {
            let gate = self.tenants[t].circuit.gates()[i];
            let mut kicks = Vec::new();
            if let ([a, b], false) = (gate.qubits(), dist.is_empty()) {
                let (la, lb) = (local[*a], local[*b]);
                for v in 0..physical.len() {
                    if owner[v] == t {
                        continue;
                    }
                    let (da, db) = (dist[la][physical[v]], dist[lb][physical[v]]);
                    let (u, d) = match (da, db) {
                        (Some(x), Some(y)) if x < y || (x == y && a < b) => (la, x),
                        (_, Some(y)) => (lb, y),
                        (Some(x), None) => (la, x),
                        (None, None) => continue,
                    };
                    if let Some(eps) = profile.kick_angle(d) {
                        kicks.push((u, v, eps));
                    }
                }
            }
            ops.push(Op { gate: gate.remap(|q| local[q]), kicks });
        }
        let readout = self.tenants.iter().map(|pc| pc.final_layout.iter().map(|&q| local[q]).collect()).collect();
        Ok(Compiled { physical, ops, readout })
    }

    /// Noise-free evolution including coherent crosstalk. Returns the state
    /// over [`ZippedJob::qubits`] (local index `k` ↔ `qubits()[k]`).
    pub fn coherent_state(&self, profile: &CrosstalkProfile, map: &CouplingMap) -> Result<StateVector, SimError> {
        let compiled = self.compile(profile, map)?;
        let mut state = StateVector::new(compiled.physical.len());
        for op in &compiled.ops {
            apply_op(&mut state, op);
        }
        Ok(state)
    }

    /// Exact per-tenant marginals of [`ZippedJob::coherent_state`]
    /// (depolarizing and readout noise are not included).
    pub fn coherent_marginals(
        &self,
        profile: &CrosstalkProfile,
        map: &CouplingMap,
    ) -> Result<Vec<Distribution>, SimError> {
        let compiled = self.compile(profile, map)?;
        let probs = self.coherent_state(profile, map)?.probabilities();
        Ok(compiled.readout.iter().map(|pos| marginal(&probs, pos)).collect())
    }
}

pub(crate) fn marginal(probs: &[f64], positions: &[usize]) -> Distribution {
    let mut out = Distribution::new();
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            *out.entry(bitstring(i, positions)).or_insert(0.0) += p;
        }
    }
    out
}

const TWO_QUBIT_PAULIS: usize = 15;

const CHECKPOINT_BYTES: usize = 64 << 20;

/// Runs `job` for `shots` shots and returns one record per tenant.
///
/// Depolarizing noise is sampled per shot: each shot is error-free with the
/// probability that no gate fails, and those shots draw from one shared
/// noise-free state. Each remaining shot gets its own Pauli trajectory,
/// conditioned on at least one error, unless that would exceed
/// [`TRAJECTORY_BUDGET`]; then the shots are split evenly over as many
/// trajectories as the budget allows (at least [`MIN_TRAJECTORIES`]).
/// Readout flips are applied per shot and bit.
pub fn execute(
    job: &ZippedJob,
    profile: &CrosstalkProfile,
    map: &CouplingMap,
    shots: u64,
    seed: u64,
) -> Result<Vec<CountsRecord>, SimError> {
    if shots == 0 {
        return Err(SimError::ZeroShots);
    }
    profile.validate()?;
    let compiled = job.compile(profile, map)?;
    let n = compiled.physical.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let fail: Vec<f64> = compiled
        .ops
        .iter()
        .map(|op| if op.gate.is_two_qubit() { profile.depol_2q } else { profile.depol_1q })
        .collect();
    // clean_before[g]: probability that gates 0..g all succeed.
    let mut clean_before = Vec::with_capacity(fail.len() + 1);
    clean_before.push(1.0);
    for &f in &fail {
        clean_before.push(clean_before.last().unwrap() * (1.0 - f));
    }
    let p_clean = *clean_before.last().unwrap();
    let noisy_shots = (0..shots).filter(|_| rng.random::<f64>() >= p_clean).count() as u64;

    let ops = compiled.ops.len().max(1);
    // Checkpoints let trajectories skip their error-free prefix; about √ops
    // of them, capped at CHECKPOINT_BYTES in total.
    let max_checkpoints = (CHECKPOINT_BYTES >> (n + 4)).max(1);
    let stride =
        if noisy_shots == 0 { ops } else { ((ops as f64).sqrt().ceil() as usize).max(ops.div_ceil(max_checkpoints)) };
    let (clean, checkpoints) = run_clean(&compiled, n, stride);
    let mut batches: Vec<(StateVector, u64)> = Vec::new();
    if noisy_shots > 0 {
        // First failing gate g has weight clean_before[g] * fail[g].
        let mut first_cdf = Vec::with_capacity(fail.len());
        let mut acc = 0.0;
        for (g, &f) in fail.iter().enumerate() {
            acc += clean_before[g] * f;
            first_cdf.push(acc);
        }
        let affordable = (TRAJECTORY_BUDGET >> n) / ops;
        let trajectories = (noisy_shots as usize).min(affordable.max(MIN_TRAJECTORIES)) as u64;
        for traj in 0..trajectories {
            let r = rng.random::<f64>() * acc;
            let first = first_cdf.partition_point(|&c| c <= r).min(fail.len() - 1);
            let start = first / stride;
            let state = run_noisy(&compiled, checkpoints[start].clone(), start * stride, first, &fail, &mut rng);
            let batch = noisy_shots / trajectories + u64::from(traj < noisy_shots % trajectories);
            batches.push((state, batch));
        }
    }
    if noisy_shots < shots {
        batches.push((clean, shots - noisy_shots));
    }

    let mut counts: Vec<BTreeMap<String, u64>> = vec![BTreeMap::new(); job.tenants.len()];
    let mut cdf = vec![0.0; 1 << n];
    for (state, batch) in batches {
        let mut acc = 0.0;
        for (c, p) in cdf.iter_mut().zip(state.probabilities()) {
            acc += p;
            *c = acc;
        }
        for _ in 0..batch {
            let r = rng.random::<f64>() * acc;
            let mut outcome = cdf.partition_point(|&c| c <= r).min(cdf.len() - 1);
            if profile.readout_flip > 0.0 {
                for q in 0..n {
                    if rng.random::<f64>() < profile.readout_flip {
                        outcome ^= 1 << q;
                    }
                }
            }
            for (tenant, pos) in compiled.readout.iter().enumerate() {
                *counts[tenant].entry(bitstring(outcome, pos)).or_insert(0) += 1;
            }
        }
    }
    Ok(counts
        .into_iter()
        .zip(&job.tenants)
        .map(|(counts, pc)| CountsRecord { counts, shots, qubits: pc.final_layout.clone() })
        .collect())
}

fn apply_op(state: &mut StateVector, op: &Op) {
    state.apply(&op.gate);
    for &(u, v, eps) in &op.kicks {
        state.apply_zz(u, v, eps);
    }
}

/// Error-free evolution, keeping the state before every `stride`-th op.
fn run_clean(compiled: &Compiled, n: usize, stride: usize) -> (StateVector, Vec<StateVector>) {
    let mut state = StateVector::new(n);
    let mut checkpoints = Vec::new();
    for (g, op) in compiled.ops.iter().enumerate() {
        if g % stride == 0 {
            checkpoints.push(state.clone());
        }
        apply_op(&mut state, op);
    }
    if checkpoints.is_empty() {
        checkpoints.push(state.clone());
    }
    (state, checkpoints)
}

/// Continues from `state` (taken before op `from`): ops before `first` are
/// error-free, op `first` always fails and later op `g` fails with
/// probability `fail[g]`.
fn run_noisy(
    compiled: &Compiled,
    mut state: StateVector,
    from: usize,
    first: usize,
    fail: &[f64],
    rng: &mut ChaCha8Rng,
) -> StateVector {
    for (g, op) in compiled.ops.iter().enumerate().skip(from) {
        apply_op(&mut state, op);
        if g < first || (g > first && rng.random::<f64>() >= fail[g]) {
            continue;
        }
        match op.gate.qubits() {
            [q] => state.apply_pauli(*q, rng.random_range(1..=3)),
            [a, b] => {
                let k = rng.random_range(1..=TWO_QUBIT_PAULIS) as u8;
                state.apply_pauli(*a, k & 3);
                state.apply_pauli(*b, k >> 2);
            }
            _ => unreachable!("gates act on one or two qubits"),
        }
    }
    state
}

/// Exact noiseless output distribution of a physical circuit over its
/// logical qubits.
pub fn ideal_distribution(pc: &PhysicalCircuit) -> Result<Distribution, SimError> {
    let job = transpiled_zip(vec![pc.clone()])?;
    let n = pc.region.len();
    if n > MAX_SIMULATED_QUBITS {
        return Err(SimError::TooManyQubits { requested: n, limit: MAX_SIMULATED_QUBITS });
    }
    let mut local = BTreeMap::new();
    for (i, q) in job.qubits().into_iter().enumerate() {
        local.insert(q, i);
    }
    let mut state = StateVector::new(n);
    for g in pc.circuit.gates() {
        state.apply(&g.remap(|q| local[&q]));
    }
    let positions: Vec<usize> = pc.final_layout.iter().map(|q| local[q]).collect();
    Ok(marginal(&state.probabilities(), &positions))
}

/// Exact noiseless output distribution of a logical circuit.
pub fn ideal_distribution_logical(c: &Circuit) -> Result<Distribution, SimError> {
    if c.num_qubits > MAX_SIMULATED_QUBITS {
        return Err(SimError::TooManyQubits { requested: c.num_qubits, limit: MAX_SIMULATED_QUBITS });
    }
    let mut state = StateVector::new(c.num_qubits);
    state.apply_all(c.gates());
    Ok(marginal(&state.probabilities(), &(0..c.num_qubits).collect::<Vec<_>>()))
}
