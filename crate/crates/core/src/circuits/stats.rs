use serde::{Deserialize, Serialize};

use super::Circuit;

/// Structural summary of a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitStats {
    /// Number of moments after greedy packing.
    pub depth: usize,
    pub gate_count: usize,
    pub two_qubit_count: usize,
    /// `two_qubit_count / gate_count`; 0 for an empty circuit.
    pub two_qubit_ratio: f64,
}

pub fn circuit_stats(c: &Circuit) -> CircuitStats {
    let depth = c.moments().iter().max().map_or(0, |m| m + 1);
    let two_qubit_count = c.two_qubit_count();
    let two_qubit_ratio = if c.is_empty() { 0.0 } else { two_qubit_count as f64 / c.len() as f64 };
    CircuitStats { depth, gate_count: c.len(), two_qubit_count, two_qubit_ratio }
}
