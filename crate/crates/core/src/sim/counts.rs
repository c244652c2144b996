use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::topology::Qubit;

/// Outcome probabilities keyed by bitstring (qubit 0 rightmost).
pub type Distribution = BTreeMap<String, f64>;

/// Measured shot counts for one tenant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsRecord {
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
    /// Physical qubit read for each logical bit, logical 0 first.
    pub qubits: Vec<Qubit>,
}

impl CountsRecord {
    /// Empirical distribution (counts / shots).
    pub fn distribution(&self) -> Distribution {
        let total = self.counts.values().sum::<u64>().max(1) as f64;
        self.counts.iter().map(|(k, &v)| (k.clone(), v as f64 / total)).collect()
    }

    pub fn is_consistent(&self) -> bool {
        self.counts.values().sum::<u64>() == self.shots && self.counts.keys().all(|k| k.len() == self.qubits.len())
    }
}

/// Renders the bits of `index` at `positions` as a bitstring, with
/// `positions[0]` as the rightmost character.
pub(crate) fn bitstring(index: usize, positions: &[usize]) -> String {
    positions.iter().rev().map(|&p| if index >> p & 1 == 1 { '1' } else { '0' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstring_is_little_endian() {
        assert_eq!(bitstring(0b001, &[0, 1, 2]), "001");
        assert_eq!(bitstring(0b110, &[0, 1, 2]), "110");
        assert_eq!(bitstring(0b100, &[2]), "1");
    }

    #[test]
    fn distribution_normalizes() {
        let rec = CountsRecord {
            counts: BTreeMap::from([("0".to_string(), 3), ("1".to_string(), 1)]),
            shots: 4,
            qubits: vec![5],
        };
        assert!(rec.is_consistent());
        assert_eq!(rec.distribution()["0"], 0.75);
        let json = serde_json::to_value(&rec).unwrap();
        assert_eq!(json, serde_json::json!({"counts": {"0": 3, "1": 1}, "shots": 4, "qubits": [5]}));
    }
}
