//! Reference implementations shared by the integration tests. Everything
//! here is written from textbook definitions and shares no code with the
//! crate's simulator.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_complex::Complex64 as C;
use xtalk_core::{Gate, GateKind};

const I: C = C::new(0.0, 1.0);

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

/// Dense single-qubit matrix.
pub fn matrix_1q(kind: GateKind) -> [[C; 2]; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match kind {
        GateKind::H => [[c(h), c(h)], [c(h), c(-h)]],
        GateKind::X => [[c(0.0), c(1.0)], [c(1.0), c(0.0)]],
        GateKind::SX => [[(c(1.0) + I) / 2.0, (c(1.0) - I) / 2.0], [(c(1.0) - I) / 2.0, (c(1.0) + I) / 2.0]],
        GateKind::RX(t) => {
            let (s, co) = (t / 2.0).sin_cos();
            [[c(co), -I * s], [-I * s, c(co)]]
        }
        GateKind::RY(t) => {
            let (s, co) = (t / 2.0).sin_cos();
            [[c(co), c(-s)], [c(s), c(co)]]
        }
        GateKind::RZ(t) => [[C::from_polar(1.0, -t / 2.0), c(0.0)], [c(0.0), C::from_polar(1.0, t / 2.0)]],
        GateKind::P(t) => [[c(1.0), c(0.0)], [c(0.0), C::from_polar(1.0, t)]],
        other => panic!("{other:?} is not a single-qubit gate"),
    }
}

/// Dense two-qubit matrix in the basis `k = bit(first) + 2·bit(second)`.
pub fn matrix_2q(kind: GateKind) -> [[C; 4]; 4] {
    let mut m = [[c(0.0); 4]; 4];
    let diag = |m: &mut [[C; 4]; 4], d: [C; 4]| {
        for k in 0..4 {
            m[k][k] = d[k];
        }
    };
    match kind {
        GateKind::CX => {
            m[0][0] = c(1.0);
            m[2][2] = c(1.0);
            m[3][1] = c(1.0);
            m[1][3] = c(1.0);
        }
        GateKind::SWAP => {
            m[0][0] = c(1.0);
            m[3][3] = c(1.0);
            m[1][2] = c(1.0);
            m[2][1] = c(1.0);
        }
        GateKind::CZ => diag(&mut m, [c(1.0), c(1.0), c(1.0), c(-1.0)]),
        GateKind::CP(t) => diag(&mut m, [c(1.0), c(1.0), c(1.0), C::from_polar(1.0, t)]),
        GateKind::RZZ(t) => {
            let (e, o) = (C::from_polar(1.0, -t / 2.0), C::from_polar(1.0, t / 2.0));
            diag(&mut m, [e, o, o, e]);
        }
        other => panic!("{other:?} is not a two-qubit gate"),
    }
    m
}

/// Minimal dense state vector; qubit `k` is bit `k` of the index.
#[derive(Clone, Debug)]
pub struct Dense {
    pub n: usize,
    pub amps: Vec<C>,
}

impl Dense {
    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![c(0.0); 1 << n];
        amps[index] = c(1.0);
        Self { n, amps }
    }

    pub fn apply(&mut self, g: &Gate) {
        match *g.qubits() {
            [q] => {
                let m = matrix_1q(g.kind());
                for i in 0..self.amps.len() {
                    if i >> q & 1 == 0 {
                        let j = i | 1 << q;
                        let (a0, a1) = (self.amps[i], self.amps[j]);
                        self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                        self.amps[j] = m[1][0] * a0 + m[1][1] * a1;
                    }
                }
            }
            [a, b] => {
                let m = matrix_2q(g.kind());
                for i in 0..self.amps.len() {
                    if i >> a & 1 == 0 && i >> b & 1 == 0 {
                        let idx = [i, i | 1 << a, i | 1 << b, i | 1 << a | 1 << b];
                        let v: Vec<C> = idx.iter().map(|&k| self.amps[k]).collect();
                        for r in 0..4 {
                            self.amps[idx[r]] = (0..4).map(|k| m[r][k] * v[k]).sum();
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
    }

    pub fn run<'a>(mut self, gates: impl IntoIterator<Item = &'a Gate>) -> Self {
        for g in gates {
            self.apply(g);
        }
        self
    }

    pub fn probs(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// ⟨X_q⟩.
    pub fn expect_x(&self, q: usize) -> f64 {
        let mut s = 0.0;
        for i in 0..self.amps.len() {
            if i >> q & 1 == 0 {
                s += 2.0 * (self.amps[i].conj() * self.amps[i | 1 << q]).re;
            }
        }
        s
    }
}

/// Distribution over bitstrings of `positions` (first position rightmost).
pub fn marginal(probs: &[f64], positions: &[usize]) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            let key: String = positions.iter().rev().map(|&q| if i >> q & 1 == 1 { '1' } else { '0' }).collect();
            *out.entry(key).or_insert(0.0) += p;
        }
    }
    out
}

/// Output distribution of a logical circuit started in |0…0⟩.
pub fn distribution(c: &xtalk_core::Circuit) -> BTreeMap<String, f64> {
    let s = Dense::basis(c.num_qubits, 0).run(c.gates());
    marginal(&s.probs(), &(0..c.num_qubits).collect::<Vec<_>>())
}

pub fn total_variation(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let keys: std::collections::BTreeSet<&String> = a.keys().chain(b.keys()).collect();
    keys.into_iter().map(|k| (a.get(k).unwrap_or(&0.0) - b.get(k).unwrap_or(&0.0)).abs()).sum::<f64>() / 2.0
}

/// Σ √(p q) over the union of supports.
pub fn bhattacharyya(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    a.iter().map(|(k, p)| (p * b.get(k).unwrap_or(&0.0)).sqrt()).sum()
}

/// Breadth-first hop distances from `src` over an edge list.
pub fn bfs(n: usize, edges: &[(usize, usize)], src: usize) -> Vec<Option<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut dist = vec![None; n];
    dist[src] = Some(0);
    let mut queue = std::collections::VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(dist[u].unwrap() + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// `|Tr(U_logical† U_routed)| / 2ⁿ` over the logical subspace, with every
/// spare region qubit starting and ending in |0⟩ and logical outputs read
/// at the final layout.
pub fn routing_fidelity(logical: &xtalk_core::Circuit, pc: &xtalk_core::PhysicalCircuit) -> f64 {
    let n = logical.num_qubits;
    let r = pc.region.len();
    let local = |q: usize| pc.region.iter().position(|&x| x == q).expect("gate inside region");
    let gates: Vec<Gate> = pc.circuit.gates().iter().map(|g| g.remap(local)).collect();
    let out_pos: Vec<usize> = pc.final_layout.iter().map(|&q| local(q)).collect();
    let mut overlap = c(0.0);
    for x in 0..1usize << n {
        let want = Dense::basis(n, x).run(logical.gates());
        let got = Dense::basis(r, x).run(&gates);
        for (y, a) in want.amps.iter().enumerate() {
            let k: usize = (0..n).filter(|&i| y >> i & 1 == 1).map(|i| 1 << out_pos[i]).sum();
            overlap += a.conj() * got.amps[k];
        }
    }
    overlap.norm() / (1usize << n) as f64
}

/// Checks disjointness, region sizes, connectivity and separation of an
/// allocation; returns a description of the first violation.
pub fn check_allocation(
    set: &xtalk_core::MappingSet,
    sizes: &[usize],
    map: &xtalk_core::CouplingMap,
    p: usize,
) -> Result<(), String> {
    let edges: Vec<(usize, usize)> = map.edges().collect();
    if set.mappings.len() != sizes.len() {
        return Err(format!("{} regions for {} requests", set.mappings.len(), sizes.len()));
    }
    let mut owner = vec![None; map.num_qubits()];
    for (i, region) in set.mappings.iter().enumerate() {
        if region.len() != sizes[i] {
            return Err(format!("region {i} has {} qubits, wanted {}", region.len(), sizes[i]));
        }
        for &q in region {
            if owner[q].replace(i).is_some() {
                return Err(format!("qubit {q} assigned twice"));
            }
        }
        // Connectivity inside the region, by BFS over induced edges.
        let induced: Vec<(usize, usize)> =
            edges.iter().copied().filter(|(a, b)| region.contains(a) && region.contains(b)).collect();
        let reach = bfs(map.num_qubits(), &induced, region[0]);
        if region.iter().any(|&q| reach[q].is_none()) {
            return Err(format!("region {i} is disconnected"));
        }
    }
    if let Some(&q) = set.padding.iter().find(|&&q| owner[q].is_some()) {
        return Err(format!("padding qubit {q} is also in a region"));
    }
    for (i, a) in set.mappings.iter().enumerate() {
        for &qa in a {
            let dist = bfs(map.num_qubits(), &edges, qa);
            for b in &set.mappings[i + 1..] {
                for &qb in b {
                    if let Some(d) = dist[qb] {
                        if d < p + 1 {
                            return Err(format!("qubits {qa} and {qb} are {d} hops apart with p = {p}"));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Reference cohort choice by plain subset enumeration: maximal summed Î
/// over ordered distinct pairs, then larger size, lower priority sum and
/// the lexicographically smaller sorted id list. Returns sorted ids and
/// the objective.
pub fn oracle_cohort(
    queue: &xtalk_core::scheduler::JobQueue,
    table: &xtalk_core::AffinityTable,
    map: &xtalk_core::CouplingMap,
    p: usize,
    min: usize,
    max: usize,
) -> Option<(Vec<String>, f64)> {
    let jobs = queue.entries();
    let mut best: Option<(f64, usize, u64, Vec<String>)> = None;
    for mask in 1u32..1 << jobs.len() {
        let members: Vec<usize> = (0..jobs.len()).filter(|i| mask >> i & 1 == 1).collect();
        if members.len() < min || members.len() > max {
            continue;
        }
        let sizes: Vec<usize> = members.iter().map(|&i| jobs[i].qubits).collect();
        if xtalk_core::mapping::get_maps_for_circuits(&sizes, map, p, 0).is_err() {
            continue;
        }
        let mut objective = 0.0;
        for &i in &members {
            for &j in &members {
                if i != j {
                    let t = table.families.iter().position(|&f| f == jobs[i].family).unwrap();
                    let o = table.families.iter().position(|&f| f == jobs[j].family).unwrap();
                    objective += table.impact[t][o];
                }
            }
        }
        let priority: u64 = members.iter().map(|&i| jobs[i].priority as u64).sum();
        let mut ids: Vec<String> = members.iter().map(|&i| jobs[i].id.clone()).collect();
        ids.sort();
        let better = match &best {
            None => true,
            Some((bo, bs, bp, bi)) => objective
                .total_cmp(bo)
                .then(members.len().cmp(bs))
                .then(bp.cmp(&priority))
                .then_with(|| bi.cmp(&ids))
                .is_gt(),
        };
        if better {
            best = Some((objective, members.len(), priority, ids));
        }
    }
    best.map(|(o, _, _, ids)| (ids, o))
}

pub mod gen {
    use rand::seq::{IndexedRandom, SliceRandom};
    use rand::Rng;
    use xtalk_core::circuits::Family;
    use xtalk_core::scheduler::{JobQueue, QueueEntry};
    use xtalk_core::{AffinityTable, Circuit, CouplingMap, Gate, GateKind};

    pub fn circuit(rng: &mut impl Rng, n: usize, len: usize) -> Circuit {
        let mut c = Circuit::new(Family::Custom, n);
        for _ in 0..len {
            let t = rng.random_range(-3.2..3.2);
            let one = [
                GateKind::H,
                GateKind::X,
                GateKind::SX,
                GateKind::RX(t),
                GateKind::RY(t),
                GateKind::RZ(t),
                GateKind::P(t),
            ];
            let two = [GateKind::CX, GateKind::CZ, GateKind::CP(t), GateKind::RZZ(t), GateKind::SWAP];
            if n >= 2 && rng.random_bool(0.5) {
                let mut qs: Vec<usize> = (0..n).collect();
                qs.shuffle(rng);
                c.push(Gate::new(*two.choose(rng).unwrap(), &qs[..2]).unwrap());
            } else {
                c.push(Gate::new(*one.choose(rng).unwrap(), &[rng.random_range(0..n)]).unwrap());
            }
        }
        c
    }

    /// Connected region of `size` qubits grown from a random seed through a
    /// random frontier, returned in shuffled order.
    pub fn region(rng: &mut impl Rng, map: &CouplingMap, size: usize) -> Vec<usize> {
        let mut region = vec![rng.random_range(0..map.num_qubits())];
        while region.len() < size {
            let frontier: Vec<usize> =
                region.iter().flat_map(|&q| map.neighbors(q).iter().copied()).filter(|q| !region.contains(q)).collect();
            region.push(*frontier.choose(rng).expect("map is large enough"));
        }
        region.shuffle(rng);
        region
    }

    /// Table with dyadic entries so that sums are exact in any order.
    pub fn table(rng: &mut impl Rng) -> AffinityTable {
        let fams = Family::BENCHMARKS.to_vec();
        let impact = (0..fams.len())
            .map(|_| (0..fams.len()).map(|_| rng.random_range(-32i32..=16) as f64 / 16.0).collect())
            .collect();
        AffinityTable::from_impact(fams, impact).unwrap()
    }

    pub fn queue(rng: &mut impl Rng, len: usize) -> JobQueue {
        let entries = (0..len)
            .map(|i| QueueEntry {
                id: format!("job{i}"),
                family: *Family::BENCHMARKS.choose(rng).unwrap(),
                qubits: rng.random_range(1..=4),
                priority: rng.random_range(0..3),
            })
            .collect();
        JobQueue::new(entries).unwrap()
    }
}
