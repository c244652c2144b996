use std::io;

use serde::{Deserialize, Serialize};

use super::{counts_fidelity, AnalysisError};
use crate::circuits::Family;
use crate::protocol::CampaignResult;

/// Per-backend standardized interference matrix.
///
/// Column `j < m` holds target `i` under cotenant `j`; column `m` is the
/// post-stress solo baseline. Each row is standardized with its own mean and
/// the `1/m` deviation taken over all `m + 1` columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactMatrix {
    pub backend: String,
    #[serde(default)]
    pub backend_family: String,
    pub families: Vec<Family>,
    pub trials: usize,
    /// F̄[i][j], mean fidelity to the pre-stress solo over trials.
    pub mean_fidelity: Vec<Vec<f64>>,
    pub row_mean: Vec<f64>,
    pub row_std: Vec<f64>,
    /// H[i][j].
    pub values: Vec<Vec<f64>>,
}

impl ImpactMatrix {
    /// Standardizes an `m × (m+1)` table of mean fidelities.
    pub fn from_mean_fidelities(
        backend: impl Into<String>,
        families: Vec<Family>,
        mean_fidelity: Vec<Vec<f64>>,
        trials: usize,
    ) -> Result<Self, AnalysisError> {
        let m = families.len();
        if m == 0 || mean_fidelity.len() != m || mean_fidelity.iter().any(|r| r.len() != m + 1) {
            return Err(AnalysisError::ShapeMismatch);
        }
        let mut row_mean = Vec::with_capacity(m);
        let mut row_std = Vec::with_capacity(m);
        let mut values = Vec::with_capacity(m);
        for (i, row) in mean_fidelity.iter().enumerate() {
            let mu = row.iter().sum::<f64>() / (m + 1) as f64;
            let sigma = (row.iter().map(|f| (f - mu).powi(2)).sum::<f64>() / m as f64).sqrt();
            if sigma.is_nan() || sigma <= 0.0 {
                return Err(AnalysisError::DegenerateRow(families[i]));
            }
            values.push(row.iter().map(|f| (f - mu) / sigma).collect());
            row_mean.push(mu);
            row_std.push(sigma);
        }
        Ok(Self {
            backend: backend.into(),
            backend_family: String::new(),
            families,
            trials,
            mean_fidelity,
            row_mean,
            row_std,
            values,
        })
    }

    pub fn m(&self) -> usize {
        self.families.len()
    }

    /// Î[i][j] = H[i][j] − H[i][m], including the (zero) baseline column.
    pub fn pairwise_impact(&self) -> Vec<Vec<f64>> {
        let m = self.m();
        self.values.iter().map(|row| row.iter().map(|h| h - row[m]).collect()).collect()
    }

    /// CSV with a `target` column and one column per cotenant plus `baseline`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), AnalysisError> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["target".to_string()];
        header.extend(self.families.iter().map(|f| f.label().to_string()));
        header.push("baseline".into());
        w.write_record(&header)?;
        for (f, row) in self.families.iter().zip(&self.values) {
            let mut rec = vec![f.label().to_string()];
            rec.extend(row.iter().map(|v| format!("{v:?}")));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Parses the H values and family labels written by [`write_csv`](Self::write_csv).
    pub fn read_csv<R: io::Read>(input: R) -> Result<(Vec<Family>, Vec<Vec<f64>>), AnalysisError> {
        let mut r = csv::Reader::from_reader(input);
        let mut families = Vec::new();
        let mut values = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let mut fields = rec.iter();
            let label = fields.next().ok_or(AnalysisError::ShapeMismatch)?;
            families.push(label.parse().map_err(|_| AnalysisError::Inconsistent(format!("bad label {label}")))?);
            values.push(
                fields
                    .map(|v| v.parse::<f64>().map_err(|e| AnalysisError::Inconsistent(e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        Ok((families, values))
    }
}

/// Builds the impact matrix of one backend from its campaign trials.
pub fn impact_matrix(results: &[CampaignResult]) -> Result<ImpactMatrix, AnalysisError> {
    let first = results.first().ok_or(AnalysisError::NoTrials)?;
    let m = first.num_circuits();
    for r in results {
        if r.families != first.families || r.backend != first.backend {
            return Err(AnalysisError::Inconsistent(format!(
                "trial {} of {} does not match trial {} of {}",
                r.trial, r.backend, first.trial, first.backend
            )));
        }
    }
    let mut sums = vec![vec![0.0; m + 1]; m];
    for r in results {
        for (i, row) in sums.iter_mut().enumerate() {
            for (j, cell) in row[..m].iter_mut().enumerate() {
                *cell += counts_fidelity(&r.pre_solo[i], &r.cotenant[i][j])?;
            }
            row[m] += counts_fidelity(&r.pre_solo[i], &r.post_solo[i])?;
        }
    }
    let n = results.len() as f64;
    let fbar = sums.into_iter().map(|row| row.into_iter().map(|s| s / n).collect()).collect();
    let mut h = ImpactMatrix::from_mean_fidelities(first.backend.clone(), first.families.clone(), fbar, results.len())?;
    h.backend_family = first.backend_family.clone();
    Ok(h)
}

/// Aggregated pairwise impact Î with aggression and sensitivity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinityTable {
    pub families: Vec<Family>,
    /// Î[i][j]: impact of cotenant `j` on target `i`.
    pub impact: Vec<Vec<f64>>,
    /// N[j]: mean impact emitted by `j` (column mean).
    pub aggression: Vec<f64>,
    /// S[i]: mean impact absorbed by `i` (row mean).
    pub sensitivity: Vec<f64>,
    pub backends: Vec<String>,
    pub total_weight: f64,
}

impl AffinityTable {
    /// Wraps an `m × m` impact table, deriving aggression and sensitivity.
    pub fn from_impact(families: Vec<Family>, impact: Vec<Vec<f64>>) -> Result<Self, AnalysisError> {
        let m = families.len();
        if m == 0 || impact.len() != m || impact.iter().any(|r| r.len() != m) {
            return Err(AnalysisError::ShapeMismatch);
        }
        let aggression = (0..m).map(|j| impact.iter().map(|row| row[j]).sum::<f64>() / m as f64).collect();
        let sensitivity = impact.iter().map(|row| row.iter().sum::<f64>() / m as f64).collect();
        Ok(Self { families, impact, aggression, sensitivity, backends: Vec::new(), total_weight: 0.0 })
    }

    pub fn index_of(&self, family: Family) -> Option<usize> {
        self.families.iter().position(|&f| f == family)
    }

    /// Î(target, cotenant).
    pub fn get(&self, target: Family, cotenant: Family) -> Option<f64> {
        Some(self.impact[self.index_of(target)?][self.index_of(cotenant)?])
    }

    /// Table with `family` removed from both axes (metrics recomputed).
    pub fn without(&self, family: Family) -> Result<Self, AnalysisError> {
        let keep: Vec<usize> = (0..self.families.len()).filter(|&i| self.families[i] != family).collect();
        let impact = keep.iter().map(|&i| keep.iter().map(|&j| self.impact[i][j]).collect()).collect();
        let mut t = Self::from_impact(keep.iter().map(|&i| self.families[i]).collect(), impact)?;
        t.backends = self.backends.clone();
        t.total_weight = self.total_weight;
        Ok(t)
    }

    /// Families ordered from strongest to weakest aggressor. Stronger means
    /// more negative N (larger fidelity loss than the solo baseline).
    pub fn aggression_ranking(&self) -> Vec<Family> {
        let mut idx: Vec<usize> = (0..self.families.len()).collect();
        idx.sort_by(|&a, &b| self.aggression[a].total_cmp(&self.aggression[b]));
        idx.into_iter().map(|i| self.families[i]).collect()
    }
}

/// Combines per-backend matrices into one affinity table, averaging Î with
/// the given weights (typically trial counts).
pub fn affinity(matrices: &[ImpactMatrix], weights: &[f64]) -> Result<AffinityTable, AnalysisError> {
    let first = matrices.first().ok_or(AnalysisError::NoTrials)?;
    if weights.len() != matrices.len() {
        return Err(AnalysisError::ShapeMismatch);
    }
    if matrices.iter().any(|h| h.families != first.families) {
        return Err(AnalysisError::LabelMismatch);
    }
    let total: f64 = weights.iter().sum();
    if total.is_nan() || total <= 0.0 || weights.iter().any(|&w| w < 0.0) {
        return Err(AnalysisError::Inconsistent("weights must be non-negative with a positive sum".into()));
    }
    let m = first.m();
    let mut acc = vec![vec![0.0; m]; m];
    for (h, &w) in matrices.iter().zip(weights) {
        for (row_acc, row) in acc.iter_mut().zip(h.pairwise_impact()) {
            for (a, v) in row_acc.iter_mut().zip(&row[..m]) {
                *a += w * v;
            }
        }
    }
    for row in &mut acc {
        for v in row.iter_mut() {
            *v /= total;
        }
    }
    let mut table = AffinityTable::from_impact(first.families.clone(), acc)?;
    table.backends = matrices.iter().map(|h| h.backend.clone()).collect();
    table.total_weight = total;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_row() {
        let fbar = vec![vec![0.9; 6]; 5];
        let err = ImpactMatrix::from_mean_fidelities("b", Family::BENCHMARKS.to_vec(), fbar, 1).unwrap_err();
        assert!(matches!(err, AnalysisError::DegenerateRow(Family::Qaoa)));
    }

    #[test]
    fn single_family_by_hand() {
        let h = ImpactMatrix::from_mean_fidelities("b", vec![Family::Qft], vec![vec![0.8, 1.0]], 1).unwrap();
        assert!((h.row_mean[0] - 0.9).abs() < 1e-15);
        assert!((h.row_std[0] - 0.02f64.sqrt()).abs() < 1e-15);
        assert!((h.values[0][0] + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((h.values[0][1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn affinity_by_hand() {
        // H row (-0.7, +0.7), baseline +0.7.
        let h = ImpactMatrix {
            backend: "b".into(),
            backend_family: String::new(),
            families: vec![Family::Qft],
            trials: 1,
            mean_fidelity: vec![vec![0.0, 0.0]],
            row_mean: vec![0.0],
            row_std: vec![1.0],
            values: vec![vec![-0.7, 0.7]],
        };
        let t = affinity(&[h], &[1.0]).unwrap();
        assert!((t.impact[0][0] + 1.4).abs() < 1e-15);
    }

    #[test]
    fn baseline_equal_rows_are_zero() {
        let h = ImpactMatrix {
            backend: "b".into(),
            backend_family: String::new(),
            families: vec![Family::Qft, Family::Grover],
            trials: 1,
            mean_fidelity: vec![vec![0.0; 3]; 2],
            row_mean: vec![0.0; 2],
            row_std: vec![1.0; 2],
            values: vec![vec![0.3, 0.3, 0.3], vec![1.0, -2.0, 0.5]],
        };
        let t = affinity(&[h], &[1.0]).unwrap();
        assert_eq!(t.impact[0], vec![0.0, 0.0]);
        assert_eq!(t.sensitivity[0], 0.0);
    }

    #[test]
    fn aggression_and_sensitivity_by_brute_force() {
        // Hand-built 2 × 3 H (two families plus baseline column).
        let values = vec![vec![-1.2, 0.4, 0.8], vec![0.9, -1.3, 0.4]];
        let h = ImpactMatrix {
            backend: "b".into(),
            backend_family: String::new(),
            families: vec![Family::Grover, Family::Qft],
            trials: 3,
            mean_fidelity: vec![vec![0.0; 3]; 2],
            row_mean: vec![0.0; 2],
            row_std: vec![1.0; 2],
            values: values.clone(),
        };
        let t = affinity(&[h], &[3.0]).unwrap();
        // Spreadsheet-style recomputation.
        let i_hat = |i: usize, j: usize| values[i][j] - values[i][2];
        let n0 = (i_hat(0, 0) + i_hat(1, 0)) / 2.0;
        let n1 = (i_hat(0, 1) + i_hat(1, 1)) / 2.0;
        let s0 = (i_hat(0, 0) + i_hat(0, 1)) / 2.0;
        let s1 = (i_hat(1, 0) + i_hat(1, 1)) / 2.0;
        for (got, want) in t.aggression.iter().zip([n0, n1]).chain(t.sensitivity.iter().zip([s0, s1])) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(t.aggression_ranking(), vec![Family::Qft, Family::Grover]);
    }

    #[test]
    fn label_mismatch() {
        let a = ImpactMatrix::from_mean_fidelities("a", vec![Family::Qft], vec![vec![0.8, 1.0]], 1).unwrap();
        let b = ImpactMatrix::from_mean_fidelities("b", vec![Family::Qpe], vec![vec![0.8, 1.0]], 1).unwrap();
        assert!(matches!(affinity(&[a, b], &[1.0, 1.0]), Err(AnalysisError::LabelMismatch)));
    }

    #[test]
    fn csv_round_trip() {
        let fbar = vec![vec![0.91, 0.95, 0.99], vec![0.7, 0.75, 0.72]];
        let h = ImpactMatrix::from_mean_fidelities("b", vec![Family::Grover, Family::Qft], fbar, 2).unwrap();
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("target,GA,QFT,baseline"));
        let (fams, vals) = ImpactMatrix::read_csv(buf.as_slice()).unwrap();
        assert_eq!(fams, h.families);
        for (a, b) in vals.iter().flatten().zip(h.values.iter().flatten()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn without_family() {
        let t = AffinityTable::from_impact(
            vec![Family::Grover, Family::Qft, Family::Qpe],
            vec![vec![-1.0, -2.0, -3.0], vec![-4.0, -5.0, -6.0], vec![-7.0, -8.0, -9.0]],
        )
        .unwrap();
        let r = t.without(Family::Grover).unwrap();
        assert_eq!(r.families, vec![Family::Qft, Family::Qpe]);
        assert_eq!(r.impact, vec![vec![-5.0, -6.0], vec![-8.0, -9.0]]);
        assert_eq!(r.sensitivity, vec![-5.5, -8.5]);
    }
}
