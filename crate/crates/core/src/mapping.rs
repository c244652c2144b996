//! Greedy allocation of disjoint, contiguous physical regions with a
//! padding buffer between tenants.
//!
//! Each circuit gets a BFS-grown region seeded at a random residual qubit.
//! When the seed's component is too small the allocator retries from the
//! frontier (unreserved neighbors of everything reserved so far), drawn in
//! seeded-random order without replacement. After placement, every residual
//! qubit within graph distance `p` of the new region is reserved as padding.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::{CouplingMap, Qubit};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MappingError {
    #[error("seed qubit {0} is not in the residual graph")]
    SeedNotInResidual(Qubit),
    #[error("allocation exhausted: no contiguous region of {size} qubits for circuit {circuit}")]
    AllocationExhausted { circuit: usize, size: usize },
    #[error("circuit {0} requests an empty region")]
    EmptyRequest(usize),
}

/// The still-unreserved part of a coupling map.
#[derive(Debug, Clone)]
pub struct Residual<'a> {
    map: &'a CouplingMap,
    available: Vec<bool>,
}

impl<'a> Residual<'a> {
    pub fn full(map: &'a CouplingMap) -> Self {
        Self { map, available: vec![true; map.num_qubits()] }
    }

    /// Residual containing only `qubits`.
    pub fn only(map: &'a CouplingMap, qubits: impl IntoIterator<Item = Qubit>) -> Self {
        let mut available = vec![false; map.num_qubits()];
        for q in qubits {
            available[q] = true;
        }
        Self { map, available }
    }

    pub fn map(&self) -> &'a CouplingMap {
        self.map
    }

    pub fn contains(&self, q: Qubit) -> bool {
        self.available.get(q).copied().unwrap_or(false)
    }

    pub fn remove(&mut self, qubits: impl IntoIterator<Item = Qubit>) {
        for q in qubits {
            self.available[q] = false;
        }
    }

    pub fn qubits(&self) -> Vec<Qubit> {
        (0..self.available.len()).filter(|&q| self.available[q]).collect()
    }
}

/// First `size` qubits reached by BFS from `seed` over the residual graph,
/// visiting neighbors in ascending index order. `Ok(None)` when the seed's
/// residual component is smaller than `size`.
pub fn bfs_set(seed: Qubit, residual: &Residual<'_>, size: usize) -> Result<Option<Vec<Qubit>>, MappingError> {
    if !residual.contains(seed) {
        return Err(MappingError::SeedNotInResidual(seed));
    }
    let mut visited = vec![false; residual.map.num_qubits()];
    visited[seed] = true;
    let mut order = Vec::with_capacity(size);
    let mut queue = VecDeque::from([seed]);
    while let Some(q) = queue.pop_front() {
        if order.len() == size {
            break;
        }
        order.push(q);
        for &n in residual.map.neighbors(q) {
            if residual.contains(n) && !visited[n] {
                visited[n] = true;
                queue.push_back(n);
            }
        }
    }
    Ok((order.len() == size).then_some(order))
}

/// Residual qubits within `p - 1` hops of `boundary` (so within `p` hops of
/// the region the boundary surrounds). Hops are counted on the full
/// coupling map; only residual qubits are claimed.
pub fn bfs_pad(boundary: &BTreeSet<Qubit>, residual: &Residual<'_>, p: usize) -> BTreeSet<Qubit> {
    let mut padding = BTreeSet::new();
    if p == 0 {
        return padding;
    }
    let map = residual.map;
    let mut depth = vec![usize::MAX; map.num_qubits()];
    let mut queue = VecDeque::new();
    for &b in boundary {
        depth[b] = 0;
        queue.push_back(b);
    }
    while let Some(q) = queue.pop_front() {
        if residual.contains(q) {
            padding.insert(q);
        }
        if depth[q] + 1 >= p {
            continue;
        }
        for &n in map.neighbors(q) {
            if depth[n] == usize::MAX {
                depth[n] = depth[q] + 1;
                queue.push_back(n);
            }
        }
    }
    padding
}

/// Output of the allocator: per-circuit regions plus padding reservations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingSet {
    /// Region of circuit `i`, in BFS visit order (logical `k` ↦ `mappings[i][k]`).
    pub mappings: Vec<Vec<Qubit>>,
    pub padding: BTreeSet<Qubit>,
    #[serde(rename = "p")]
    pub padding_depth: usize,
    pub seed: u64,
}

impl MappingSet {
    /// Union of all regions and padding.
    pub fn reserved(&self) -> BTreeSet<Qubit> {
        self.mappings.iter().flatten().copied().chain(self.padding.iter().copied()).collect()
    }

    /// Smallest hop distance between any two distinct regions (`None` with
    /// fewer than two regions or when some pair is disconnected).
    pub fn min_separation(&self, map: &CouplingMap) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, a) in self.mappings.iter().enumerate() {
            let dists: Vec<Vec<Option<usize>>> =
                a.iter().map(|&q| map.distances_from(q).expect("mapped qubit in range")).collect();
            for b in &self.mappings[i + 1..] {
                for row in &dists {
                    for &q in b {
                        let d = row[q]?;
                        best = Some(best.map_or(d, |x| x.min(d)));
                    }
                }
            }
        }
        best
    }
}

/// An allocation together with the seed qubits tried for each circuit.
#[derive(Debug, Clone)]
pub struct Allocation {
    pub set: MappingSet,
    /// `seeds_tried[i]` lists every seed attempted for circuit `i`; the last
    /// one succeeded.
    pub seeds_tried: Vec<Vec<Qubit>>,
}

/// Allocates a region of `sizes[i]` qubits for each circuit in order.
pub fn allocate(sizes: &[usize], map: &CouplingMap, p: usize, seed: u64) -> Result<Allocation, MappingError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut residual = Residual::full(map);
    let mut reserved = vec![false; map.num_qubits()];
    // The frontier starts as the whole device.
    let mut frontier: Vec<Qubit> = (0..map.num_qubits()).collect();
    let mut mappings = Vec::with_capacity(sizes.len());
    let mut padding = BTreeSet::new();
    let mut seeds_tried = Vec::with_capacity(sizes.len());

    for (idx, &size) in sizes.iter().enumerate() {
        if size == 0 {
            return Err(MappingError::EmptyRequest(idx));
        }
        let exhausted = MappingError::AllocationExhausted { circuit: idx, size };
        let pool = residual.qubits();
        if pool.is_empty() {
            return Err(exhausted);
        }
        let first = pool[rng.random_range(0..pool.len())];
        let mut tried = vec![first];
        let mut region = bfs_set(first, &residual, size)?;
        if region.is_none() {
            let mut retry: Vec<Qubit> =
                frontier.iter().copied().filter(|&q| q != first && residual.contains(q)).collect();
            retry.shuffle(&mut rng);
            for q in retry {
                tried.push(q);
                region = bfs_set(q, &residual, size)?;
                if region.is_some() {
                    break;
                }
            }
        }
        let region = region.ok_or(exhausted)?;

        let boundary: BTreeSet<Qubit> =
            region.iter().flat_map(|&q| map.neighbors(q).iter().copied()).filter(|n| !region.contains(n)).collect();
        residual.remove(region.iter().copied());
        let pad = bfs_pad(&boundary, &residual, p);
        residual.remove(pad.iter().copied());
        for &q in region.iter().chain(pad.iter()) {
            reserved[q] = true;
        }
        frontier =
            (0..map.num_qubits()).filter(|&q| !reserved[q] && map.neighbors(q).iter().any(|&n| reserved[n])).collect();
        padding.extend(pad);
        mappings.push(region);
        seeds_tried.push(tried);
    }
    Ok(Allocation { set: MappingSet { mappings, padding, padding_depth: p, seed }, seeds_tried })
}

/// Allocates regions for circuits of the given sizes; see [`allocate`].
pub fn get_maps_for_circuits(
    sizes: &[usize],
    map: &CouplingMap,
    p: usize,
    seed: u64,
) -> Result<MappingSet, MappingError> {
    allocate(sizes, map, p, seed).map(|a| a.set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::grid_topology;

    #[test]
    fn bfs_set_examples() {
        let g = grid_topology(2, 2);
        let r = Residual::full(&g);
        assert_eq!(bfs_set(0, &r, 2).unwrap(), Some(vec![0, 1]));
        assert_eq!(bfs_set(3, &r, 1).unwrap(), Some(vec![3]));
        let isolated = Residual::only(&g, [0]);
        assert_eq!(bfs_set(0, &isolated, 2).unwrap(), None);
        assert_eq!(bfs_set(1, &isolated, 1), Err(MappingError::SeedNotInResidual(1)));
    }

    #[test]
    fn bfs_pad_examples() {
        let g = grid_topology(1, 5);
        let mut r = Residual::full(&g);
        r.remove([0]);
        let boundary = BTreeSet::from([1]);
        assert!(bfs_pad(&boundary, &r, 0).is_empty());
        assert_eq!(bfs_pad(&boundary, &r, 1), BTreeSet::from([1]));
        assert_eq!(bfs_pad(&boundary, &r, 2), BTreeSet::from([1, 2]));
        assert!(!bfs_pad(&boundary, &r, 4).contains(&0));
    }

    #[test]
    fn two_pairs_on_grid() {
        let g = grid_topology(3, 4);
        let set = get_maps_for_circuits(&[2, 2], &g, 0, 11).unwrap();
        assert_eq!(set.mappings.len(), 2);
        let a: BTreeSet<_> = set.mappings[0].iter().collect();
        assert!(set.mappings[1].iter().all(|q| !a.contains(q)));
        for m in &set.mappings {
            assert_eq!(m.len(), 2);
            assert!(g.induces_connected(m));
        }
    }

    #[test]
    fn exact_fit_uses_whole_device() {
        let g = grid_topology(3, 4);
        for seed in 0..10 {
            let set = get_maps_for_circuits(&[12], &g, 0, seed).unwrap();
            let used: BTreeSet<_> = set.mappings[0].iter().copied().collect();
            assert_eq!(used, (0..12).collect());
        }
    }

    #[test]
    fn padded_sixes_do_not_fit() {
        let g = grid_topology(3, 4);
        for seed in 0..20 {
            assert_eq!(
                get_maps_for_circuits(&[6, 6], &g, 2, seed),
                Err(MappingError::AllocationExhausted { circuit: 1, size: 6 })
            );
        }
    }

    #[test]
    fn json_shape() {
        let g = grid_topology(3, 4);
        let set = get_maps_for_circuits(&[2, 2], &g, 1, 3).unwrap();
        let v = serde_json::to_value(&set).unwrap();
        assert!(v.get("mappings").is_some() && v.get("padding").is_some());
        assert_eq!(v["p"], 1);
        assert_eq!(v["seed"], 3);
        let back: MappingSet = serde_json::from_value(v).unwrap();
        assert_eq!(back, set);
    }
}
