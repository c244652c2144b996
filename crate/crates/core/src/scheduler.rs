//! Interference-aware cohort selection.
//!
//! Costs use the sign opposite to Î: a pairing that lowers fidelity below
//! the solo baseline has negative Î and therefore positive cost. The solvers
//! minimize cost, i.e. maximize the summed impact.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::AffinityTable;
use crate::backend::BackendProfile;
use crate::circuits::Family;
use crate::mapping::{get_maps_for_circuits, MappingSet};

/// Allocation seed used for every feasibility check.
pub const FEASIBILITY_SEED: u64 = 0;

/// Largest queue the exhaustive solver accepts.
pub const MAX_EXHAUSTIVE_QUEUE: usize = 24;

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("family {0} is not in the affinity table")]
    UnknownFamily(Family),
    #[error("duplicate job id `{0}`")]
    DuplicateId(String),
    #[error("job `{0}` requests zero qubits")]
    ZeroQubits(String),
    #[error("the queue is empty")]
    EmptyQueue,
    #[error("cohort size bounds {min}..={max} are invalid")]
    BadCohortSize { min: usize, max: usize },
    #[error("exhaustive search supports at most {MAX_EXHAUSTIVE_QUEUE} queued jobs, got {0}")]
    QueueTooLarge(usize),
    #[error("no feasible cohort: no admissible subset of the queue can be placed on the device")]
    Infeasible,
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueEntry {
    pub id: String,
    pub family: Family,
    pub qubits: usize,
    /// Rank 0 is the most urgent.
    #[serde(default)]
    pub priority: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "QueueFile", into = "QueueFile")]
pub struct JobQueue {
    entries: Vec<QueueEntry>,
}

#[derive(Serialize, Deserialize)]
struct QueueFile {
    entries: Vec<QueueEntry>,
}

impl TryFrom<QueueFile> for JobQueue {
    type Error = ScheduleError;

    fn try_from(f: QueueFile) -> Result<Self, Self::Error> {
        JobQueue::new(f.entries)
    }
}

impl From<JobQueue> for QueueFile {
    fn from(q: JobQueue) -> Self {
        QueueFile { entries: q.entries }
    }
}

impl JobQueue {
    pub fn new(entries: Vec<QueueEntry>) -> Result<Self, ScheduleError> {
        let mut seen = BTreeSet::new();
        for e in &entries {
            if !seen.insert(e.id.as_str()) {
                return Err(ScheduleError::DuplicateId(e.id.clone()));
            }
            if e.qubits == 0 {
                return Err(ScheduleError::ZeroQubits(e.id.clone()));
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[QueueEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScheduleError> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    /// Queue without the entries of `family`.
    pub fn without_family(&self, family: Family) -> Self {
        Self { entries: self.entries.iter().filter(|e| e.family != family).cloned().collect() }
    }
}

/// Summed Î over ordered pairs of distinct job instances. Same-family pairs
/// count in both directions; an instance is never paired with itself.
pub fn objective(families: &[Family], table: &AffinityTable) -> Result<f64, ScheduleError> {
    // Accumulate from per-family counts so that equal multisets give
    // bit-identical sums regardless of order.
    let mut counts = vec![0.0f64; table.families.len()];
    for &f in families {
        counts[table.index_of(f).ok_or(ScheduleError::UnknownFamily(f))?] += 1.0;
    }
    let mut total = 0.0;
    for (a, &ca) in counts.iter().enumerate() {
        if ca == 0.0 {
            continue;
        }
        for (b, &cb) in counts.iter().enumerate() {
            let pairs = if a == b { ca * (ca - 1.0) } else { ca * cb };
            if pairs > 0.0 {
                total += pairs * table.impact[a][b];
            }
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Exhaustive,
    Greedy,
}

impl std::str::FromStr for Solver {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exhaustive" => Ok(Solver::Exhaustive),
            "greedy" => Ok(Solver::Greedy),
            other => Err(format!("unknown solver `{other}` (expected exhaustive or greedy)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cohort {
    /// Selected job ids in queue order.
    pub ids: Vec<String>,
    pub families: Vec<Family>,
    /// Σ Î over ordered distinct pairs.
    pub objective: f64,
    /// `-objective`, the minimized quantity.
    pub cost: f64,
    /// `mappings[k]` hosts `ids[k]`.
    pub mapping: MappingSet,
    pub solver: Solver,
}

/// Admissible cohort sizes, inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CohortSize {
    pub min: usize,
    pub max: usize,
}

impl CohortSize {
    pub fn up_to(max: usize) -> Self {
        Self { min: 1, max }
    }
}

/// Regions for jobs of the given sizes, or `None` if the allocator fails.
pub fn feasible(sizes: &[usize], backend: &BackendProfile, p: usize) -> Option<MappingSet> {
    get_maps_for_circuits(sizes, &backend.coupling_map, p, FEASIBILITY_SEED).ok()
}

struct Ctx<'a> {
    queue: &'a JobQueue,
    table: &'a AffinityTable,
    backend: &'a BackendProfile,
    p: usize,
    cache: HashMap<Vec<usize>, Option<MappingSet>>,
}

impl Ctx<'_> {
    fn cost(&self, members: &[usize]) -> Result<f64, ScheduleError> {
        let fams: Vec<Family> = members.iter().map(|&i| self.queue.entries[i].family).collect();
        Ok(-objective(&fams, self.table)?)
    }

    fn placement(&mut self, members: &[usize]) -> Option<MappingSet> {
        let sizes: Vec<usize> = members.iter().map(|&i| self.queue.entries[i].qubits).collect();
        let (backend, p) = (self.backend, self.p);
        self.cache.entry(sizes).or_insert_with_key(|s| feasible(s, backend, p)).clone()
    }

    fn cohort(&mut self, members: Vec<usize>, cost: f64, solver: Solver) -> Result<Cohort, ScheduleError> {
        let mapping = self.placement(&members).ok_or(ScheduleError::Infeasible)?;
        let entries = &self.queue.entries;
        Ok(Cohort {
            ids: members.iter().map(|&i| entries[i].id.clone()).collect(),
            families: members.iter().map(|&i| entries[i].family).collect(),
            objective: -cost,
            cost,
            mapping,
            solver,
        })
    }
}

/// Picks up to `max_cohort` jobs to co-execute.
pub fn select_cohort(
    queue: &JobQueue,
    table: &AffinityTable,
    backend: &BackendProfile,
    p: usize,
    max_cohort: usize,
    solver: Solver,
) -> Result<Cohort, ScheduleError> {
    select_cohort_sized(queue, table, backend, p, CohortSize::up_to(max_cohort), solver)
}

/// [`select_cohort`] with a lower bound on the cohort size as well.
pub fn select_cohort_sized(
    queue: &JobQueue,
    table: &AffinityTable,
    backend: &BackendProfile,
    p: usize,
    size: CohortSize,
    solver: Solver,
) -> Result<Cohort, ScheduleError> {
    if queue.is_empty() {
        return Err(ScheduleError::EmptyQueue);
    }
    if size.min == 0 || size.min > size.max {
        return Err(ScheduleError::BadCohortSize { min: size.min, max: size.max });
    }
    for e in queue.entries() {
        table.index_of(e.family).ok_or(ScheduleError::UnknownFamily(e.family))?;
    }
    let mut ctx = Ctx { queue, table, backend, p, cache: HashMap::new() };
    match solver {
        Solver::Exhaustive => exhaustive(&mut ctx, size),
        Solver::Greedy => greedy(&mut ctx, size),
    }
}

struct Candidate {
    members: Vec<usize>,
    cost: f64,
    priority: u64,
    ids: Vec<String>,
}

/// Total order: cost, then larger size, then lower priority sum, then
/// lexicographically smaller sorted id list.
fn rank(a: &Candidate, b: &Candidate) -> Ordering {
    a.cost
        .total_cmp(&b.cost)
        .then(b.members.len().cmp(&a.members.len()))
        .then(a.priority.cmp(&b.priority))
        .then_with(|| a.ids.cmp(&b.ids))
}

fn candidate(ctx: &Ctx<'_>, members: Vec<usize>) -> Result<Candidate, ScheduleError> {
    let entries = &ctx.queue.entries;
    let mut ids: Vec<String> = members.iter().map(|&i| entries[i].id.clone()).collect();
    ids.sort();
    Ok(Candidate {
        cost: ctx.cost(&members)?,
        priority: members.iter().map(|&i| entries[i].priority as u64).sum(),
        ids,
        members,
    })
}

fn exhaustive(ctx: &mut Ctx<'_>, size: CohortSize) -> Result<Cohort, ScheduleError> {
    let n = ctx.queue.len();
    if n > MAX_EXHAUSTIVE_QUEUE {
        return Err(ScheduleError::QueueTooLarge(n));
    }
    let mut all = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let k = mask.count_ones() as usize;
        if k < size.min || k > size.max {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        all.push(candidate(ctx, members)?);
    }
    all.sort_by(rank);
    for c in all {
        if ctx.placement(&c.members).is_some() {
            return ctx.cohort(c.members, c.cost, Solver::Exhaustive);
        }
    }
    Err(ScheduleError::Infeasible)
}

fn greedy(ctx: &mut Ctx<'_>, size: CohortSize) -> Result<Cohort, ScheduleError> {
    let n = ctx.queue.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| ctx.queue.entries[i].priority);
    let start = order.into_iter().find(|&i| ctx.placement(&[i]).is_some()).ok_or(ScheduleError::Infeasible)?;
    let mut members = vec![start];
    let mut cost = 0.0;
    while members.len() < size.max {
        let mut options = Vec::new();
        for j in (0..n).filter(|j| !members.contains(j)) {
            let mut next = members.clone();
            next.push(j);
            next.sort_unstable();
            options.push(candidate(ctx, next)?);
        }
        options.sort_by(rank);
        let Some(best) = options.into_iter().find(|c| ctx.placement(&c.members).is_some()) else {
            break;
        };
        // Past the minimum size, only keep growing while it does not hurt.
        if members.len() >= size.min && best.cost > cost {
            break;
        }
        cost = best.cost;
        members = best.members;
    }
    if members.len() < size.min {
        return Err(ScheduleError::Infeasible);
    }
    ctx.cohort(members, cost, Solver::Greedy)
}
