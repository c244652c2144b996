//! Device coupling maps: construction, presets, and graph queries.
//!
//! A [`CouplingMap`] is an undirected graph over dense, zero-based physical
//! qubit indices. Edges are stored canonically as `(low, high)` so two maps
//! with the same coupler set compare equal regardless of input order.

use std::collections::{BTreeSet, VecDeque};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Physical or logical qubit index.
pub type Qubit = usize;

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit map")]
    QubitOutOfRange { qubit: Qubit, num_qubits: usize },
    #[error("self-loop on qubit {0}")]
    SelfLoop(Qubit),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(Qubit, Qubit),
    #[error("coupling map must have at least one qubit")]
    Empty,
    #[error("unknown topology preset `{0}`")]
    UnknownPreset(String),
    #[error("failed to parse coupling map: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// On-disk layout: `{"name": str, "num_qubits": int, "edges": [[int,int], ...]}`.
#[derive(Serialize, Deserialize)]
struct CouplingMapFile {
    name: String,
    num_qubits: usize,
    edges: Vec<[Qubit; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CouplingMapFile", into = "CouplingMapFile")]
pub struct CouplingMap {
    name: String,
    num_qubits: usize,
    edges: BTreeSet<(Qubit, Qubit)>,
    adjacency: Vec<Vec<Qubit>>,
}

impl TryFrom<CouplingMapFile> for CouplingMap {
    type Error = TopologyError;

    fn try_from(file: CouplingMapFile) -> Result<Self, Self::Error> {
        CouplingMap::new(file.name, file.num_qubits, file.edges.iter().map(|e| (e[0], e[1])))
    }
}

impl From<CouplingMap> for CouplingMapFile {
    fn from(map: CouplingMap) -> Self {
        CouplingMapFile {
            edges: map.edges.iter().map(|&(a, b)| [a, b]).collect(),
            name: map.name,
            num_qubits: map.num_qubits,
        }
    }
}

impl CouplingMap {
    /// Builds a validated map. Rejects self-loops, out-of-range endpoints and
    /// duplicate edges (in either orientation).
    pub fn new(
        name: impl Into<String>,
        num_qubits: usize,
        edges: impl IntoIterator<Item = (Qubit, Qubit)>,
    ) -> Result<Self, TopologyError> {
        if num_qubits == 0 {
            return Err(TopologyError::Empty);
        }
        let mut set = BTreeSet::new();
        let mut adjacency = vec![Vec::new(); num_qubits];
        for (a, b) in edges {
            for q in [a, b] {
                if q >= num_qubits {
                    return Err(TopologyError::QubitOutOfRange { qubit: q, num_qubits });
                }
            }
            if a == b {
                return Err(TopologyError::SelfLoop(a));
            }
            let edge = (a.min(b), a.max(b));
            if !set.insert(edge) {
                return Err(TopologyError::DuplicateEdge(a, b));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self { name: name.into(), num_qubits, edges: set, adjacency })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Canonical `(low, high)` edges in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (Qubit, Qubit)> + '_ {
        self.edges.iter().copied()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of `q` in ascending index order.
    pub fn neighbors(&self, q: Qubit) -> &[Qubit] {
        &self.adjacency[q]
    }

    pub fn degree(&self, q: Qubit) -> usize {
        self.adjacency[q].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: Qubit, b: Qubit) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn contains(&self, q: Qubit) -> bool {
        q < self.num_qubits
    }

    fn check(&self, q: Qubit) -> Result<(), TopologyError> {
        if q < self.num_qubits {
            Ok(())
        } else {
            Err(TopologyError::QubitOutOfRange { qubit: q, num_qubits: self.num_qubits })
        }
    }

    /// BFS hop counts from `source` to every qubit; `None` when unreachable.
    pub fn distances_from(&self, source: Qubit) -> Result<Vec<Option<usize>>, TopologyError> {
        self.check(source)?;
        let mut dist = vec![None; self.num_qubits];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(q) = queue.pop_front() {
            let next = dist[q].map(|d| d + 1);
            for &n in &self.adjacency[q] {
                if dist[n].is_none() {
                    dist[n] = next;
                    queue.push_back(n);
                }
            }
        }
        Ok(dist)
    }

    /// Shortest-path length in edges, or `None` if `a` and `b` lie in
    /// different components.
    pub fn distance(&self, a: Qubit, b: Qubit) -> Result<Option<usize>, TopologyError> {
        self.check(b)?;
        Ok(self.distances_from(a)?[b])
    }

    /// All-pairs hop counts (one BFS per qubit).
    pub fn distance_matrix(&self) -> Vec<Vec<Option<usize>>> {
        (0..self.num_qubits).map(|q| self.distances_from(q).expect("in range")).collect()
    }

    pub fn is_connected(&self) -> bool {
        self.distances_from(0).expect("non-empty").iter().all(Option::is_some)
    }

    /// Whether the subgraph induced by `qubits` is connected. The empty set
    /// counts as connected.
    pub fn induces_connected(&self, qubits: &[Qubit]) -> bool {
        let Some(&start) = qubits.first() else {
            return true;
        };
        let members: BTreeSet<Qubit> = qubits.iter().copied().collect();
        if members.iter().any(|&q| q >= self.num_qubits) {
            return false;
        }
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(q) = queue.pop_front() {
            for &n in &self.adjacency[q] {
                if members.contains(&n) && seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        seen.len() == members.len()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TopologyError> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), TopologyError> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// Square lattice with row-major indexing (`q = row * cols + col`).
pub fn grid_topology(rows: usize, cols: usize) -> CouplingMap {
    assert!(rows >= 1 && cols >= 1, "grid dimensions must be positive");
    let mut edges = Vec::with_capacity(rows * (cols - 1) + cols * (rows - 1));
    for r in 0..rows {
        for c in 0..cols {
            let q = r * cols + c;
            if c + 1 < cols {
                edges.push((q, q + 1));
            }
            if r + 1 < rows {
                edges.push((q, q + cols));
            }
        }
    }
    CouplingMap::new(format!("grid-{rows}x{cols}"), rows * cols, edges).expect("valid grid")
}

/// 27-qubit heavy-hex lattice (the Falcon-class layout).
const HEAVYHEX_27: &[(Qubit, Qubit)] = &[
    (0, 1),
    (1, 2),
    (1, 4),
    (2, 3),
    (3, 5),
    (4, 7),
    (5, 8),
    (6, 7),
    (7, 10),
    (8, 9),
    (8, 11),
    (10, 12),
    (11, 14),
    (12, 13),
    (12, 15),
    (13, 14),
    (14, 16),
    (15, 18),
    (16, 19),
    (17, 18),
    (18, 21),
    (19, 20),
    (19, 22),
    (21, 23),
    (22, 25),
    (23, 24),
    (24, 25),
    (25, 26),
];

pub const HEAVY_HEX_PRESETS: &[&str] = &["heavyhex-27"];

pub fn heavy_hex_preset(name: &str) -> Result<CouplingMap, TopologyError> {
    match name {
        "heavyhex-27" => CouplingMap::new(name, 27, HEAVYHEX_27.iter().copied()),
        other => Err(TopologyError::UnknownPreset(other.to_string())),
    }
}

/// Resolves a topology name: a heavy-hex preset or `grid-RxC`.
pub fn topology_by_name(name: &str) -> Result<CouplingMap, TopologyError> {
    if let Some(dims) = name.strip_prefix("grid-") {
        let parsed = dims.split_once('x').and_then(|(r, c)| Some((r.parse::<usize>().ok()?, c.parse::<usize>().ok()?)));
        return match parsed {
            Some((r, c)) if r > 0 && c > 0 => Ok(grid_topology(r, c)),
            _ => Err(TopologyError::UnknownPreset(name.to_string())),
        };
    }
    heavy_hex_preset(name)
}
