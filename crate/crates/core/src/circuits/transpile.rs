//! Region-constrained transpilation: greedy shortest-path SWAP routing
//! followed by decomposition into the `{RZ, SX, X, CX}` hardware basis.

use std::collections::{BTreeSet, VecDeque};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use super::{Circuit, CircuitError, Gate, GateKind};
use crate::topology::{CouplingMap, Qubit};

/// A circuit expressed on physical qubits of a device, confined to `region`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalCircuit {
    /// Gates on physical indices; `num_qubits` is the device size.
    pub circuit: Circuit,
    /// The allocated physical qubits; logical `i` starts on `region[i]`.
    pub region: Vec<Qubit>,
    /// Physical position of each logical qubit at measurement time.
    pub final_layout: Vec<Qubit>,
    pub seed: u64,
}

impl PhysicalCircuit {
    pub fn num_logical(&self) -> usize {
        self.final_layout.len()
    }

    pub fn initial_layout(&self) -> &[Qubit] {
        &self.region[..self.num_logical()]
    }
}

/// Routes `c` onto `region` of `map` and lowers it to the hardware basis.
///
/// Logical qubit `i` starts on `region[i]`. A two-qubit gate whose operands
/// are not coupled moves its first operand along the shortest path (inside
/// the region, lowest-index tie-breaking) until adjacent. Routing is fully
/// deterministic; `seed` is carried for provenance only.
pub fn transpile(c: &Circuit, map: &CouplingMap, region: &[Qubit], seed: u64) -> Result<PhysicalCircuit, CircuitError> {
    if region.len() < c.num_qubits {
        return Err(CircuitError::RegionTooSmall { needed: c.num_qubits, got: region.len() });
    }
    let mut seen = BTreeSet::new();
    for &q in region {
        if q >= map.num_qubits() || !seen.insert(q) {
            return Err(CircuitError::InvalidRegionQubit(q));
        }
    }
    if !map.induces_connected(region) {
        return Err(CircuitError::DisconnectedRegion);
    }

    let mut layout: Vec<Qubit> = region[..c.num_qubits].to_vec();
    let mut routed = Vec::with_capacity(c.len());
    for gate in c.gates() {
        if let [a, b] = *gate.qubits() {
            let (pa, pb) = (layout[a], layout[b]);
            if !map.has_edge(pa, pb) {
                let path = region_path(map, &seen, pa, pb);
                // Walk the first operand forward until it neighbors pb.
                for w in path[..path.len() - 1].windows(2) {
                    routed.push(Gate::swap(w[0], w[1]));
                    for slot in layout.iter_mut() {
                        if *slot == w[0] {
                            *slot = w[1];
                        } else if *slot == w[1] {
                            *slot = w[0];
                        }
                    }
                }
            }
        }
        routed.push(gate.remap(|q| layout[q]));
    }

    let mut lowered = Vec::with_capacity(routed.len() * 3);
    for g in &routed {
        lower(g, &mut lowered);
    }
    let mut out = Circuit::new(c.family, map.num_qubits());
    out.params = c.params.clone();
    out.extend(merge_rz(lowered));
    Ok(PhysicalCircuit { circuit: out, region: region.to_vec(), final_layout: layout, seed })
}

/// Shortest path from `from` to `to` through `region`, BFS over ascending
/// neighbor indices.
fn region_path(map: &CouplingMap, region: &BTreeSet<Qubit>, from: Qubit, to: Qubit) -> Vec<Qubit> {
    let mut parent = vec![usize::MAX; map.num_qubits()];
    parent[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(q) = queue.pop_front() {
        if q == to {
            break;
        }
        for &n in map.neighbors(q) {
            if region.contains(&n) && parent[n] == usize::MAX {
                parent[n] = q;
                queue.push_back(n);
            }
        }
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = parent[cur];
        path.push(cur);
    }
    path.reverse();
    path
}

/// Appends `g` rewritten over `{RZ, SX, X, CX}` (up to global phase).
fn lower(g: &Gate, out: &mut Vec<Gate>) {
    let q = g.qubits();
    match g.kind() {
        GateKind::X | GateKind::SX | GateKind::RZ(_) | GateKind::CX => out.push(*g),
        GateKind::H => out.extend([Gate::rz(FRAC_PI_2, q[0]), Gate::sx(q[0]), Gate::rz(FRAC_PI_2, q[0])]),
        GateKind::P(t) => out.push(Gate::rz(t, q[0])),
        GateKind::RX(t) => {
            lower(&Gate::h(q[0]), out);
            out.push(Gate::rz(t, q[0]));
            lower(&Gate::h(q[0]), out);
        }
        GateKind::RY(t) => {
            out.push(Gate::rz(-FRAC_PI_2, q[0]));
            lower(&Gate::rx(t, q[0]), out);
            out.push(Gate::rz(FRAC_PI_2, q[0]));
        }
        GateKind::CZ => {
            lower(&Gate::h(q[1]), out);
            out.push(Gate::cx(q[0], q[1]));
            lower(&Gate::h(q[1]), out);
        }
        GateKind::CP(t) => {
            out.push(Gate::rz(t / 2.0, q[0]));
            out.push(Gate::cx(q[0], q[1]));
            out.push(Gate::rz(-t / 2.0, q[1]));
            out.push(Gate::cx(q[0], q[1]));
            out.push(Gate::rz(t / 2.0, q[1]));
        }
        GateKind::RZZ(t) => {
            out.extend([Gate::cx(q[0], q[1]), Gate::rz(t, q[1]), Gate::cx(q[0], q[1])]);
        }
        GateKind::SWAP => {
            out.extend([Gate::cx(q[0], q[1]), Gate::cx(q[1], q[0]), Gate::cx(q[0], q[1])]);
        }
    }
}

/// Angle reduced to `(-π, π]`.
fn wrap(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t > PI {
        t - TAU
    } else {
        t
    }
}

/// Fuses consecutive RZ rotations on the same qubit and drops identities.
fn merge_rz(gates: Vec<Gate>) -> Vec<Gate> {
    let mut out: Vec<Option<Gate>> = Vec::with_capacity(gates.len());
    // Index in `out` of the last live gate touching each qubit.
    let mut last: Vec<Option<usize>> = Vec::new();
    for g in gates {
        let max_q = g.qubits().iter().copied().max().unwrap_or(0);
        if last.len() <= max_q {
            last.resize(max_q + 1, None);
        }
        if let GateKind::RZ(t) = g.kind() {
            let q = g.qubits()[0];
            if let Some(idx) = last[q] {
                if let Some(prev) = out[idx] {
                    if let GateKind::RZ(s) = prev.kind() {
                        out[idx] = Some(Gate::rz(wrap(s + t), q));
                        continue;
                    }
                }
            }
        }
        out.push(Some(g));
        for &q in g.qubits() {
            last[q] = Some(out.len() - 1);
        }
    }
    out.into_iter().flatten().filter(|g| !matches!(g.kind(), GateKind::RZ(t) if wrap(t).abs() < 1e-12)).collect()
}
