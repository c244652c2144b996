use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AnalysisError, ImpactMatrix};

/// Stabilizer coefficients of the luminance and contrast terms.
pub const K1: f64 = 0.01;
pub const K2: f64 = 0.03;

/// Default window edge.
pub const WINDOW: usize = 3;

/// Mean SSIM over every fully-contained `window × window` patch, with
/// uniform weights and sample (n − 1) variances and covariance.
/// `dynamic_range` is L in `c1 = (K1·L)²`, `c2 = (K2·L)²`.
pub fn ssim(a: &[Vec<f64>], b: &[Vec<f64>], window: usize, dynamic_range: f64) -> Result<f64, AnalysisError> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    if b.len() != rows || a.iter().chain(b).any(|r| r.len() != cols) {
        return Err(AnalysisError::ShapeMismatch);
    }
    if window == 0 || rows < window || cols < window {
        return Err(AnalysisError::SmallerThanWindow { rows, cols, window });
    }
    let range = if dynamic_range > 0.0 { dynamic_range } else { 1.0 };
    let c1 = (K1 * range).powi(2);
    let c2 = (K2 * range).powi(2);
    let n = (window * window) as f64;
    let dof = if window > 1 { n - 1.0 } else { 1.0 };

    let mut total = 0.0;
    let mut count = 0usize;
    for r0 in 0..=rows - window {
        for c0 in 0..=cols - window {
            let patch = |m: &[Vec<f64>]| -> Vec<f64> {
                (r0..r0 + window).flat_map(|r| m[r][c0..c0 + window].iter().copied()).collect()
            };
            let (x, y) = (patch(a), patch(b));
            let mx = x.iter().sum::<f64>() / n;
            let my = y.iter().sum::<f64>() / n;
            let vx = x.iter().map(|v| (v - mx).powi(2)).sum::<f64>() / dof;
            let vy = y.iter().map(|v| (v - my).powi(2)).sum::<f64>() / dof;
            let cxy = x.iter().zip(&y).map(|(p, q)| (p - mx) * (q - my)).sum::<f64>() / dof;
            total += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            count += 1;
        }
    }
    Ok(total / count as f64)
}

/// Translation `|g|` that makes every entry non-negative (0 if already so).
pub fn global_shift<'a>(matrices: impl IntoIterator<Item = &'a [Vec<f64>]>) -> f64 {
    let min = matrices.into_iter().flat_map(|m| m.iter().flatten().copied()).fold(f64::INFINITY, f64::min);
    if min < 0.0 {
        -min
    } else {
        0.0
    }
}

fn shifted(m: &[Vec<f64>], shift: f64) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.iter().map(|v| v + shift).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupScore {
    pub a: String,
    pub b: String,
    pub mean_ssim: f64,
    /// Number of backend pairs averaged.
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub backends: Vec<String>,
    /// Group of each backend, parallel to `backends`.
    pub groups: Vec<String>,
    /// `pairwise[a][b]` = SSIM(H′_a, H′_b).
    pub pairwise: Vec<Vec<f64>>,
    pub group_scores: Vec<GroupScore>,
    /// |g|.
    pub shift: f64,
    pub dynamic_range: f64,
    pub window: usize,
}

impl SimilarityReport {
    pub fn group_score(&self, a: &str, b: &str) -> Option<f64> {
        self.group_scores.iter().find(|s| (s.a == a && s.b == b) || (s.a == b && s.b == a)).map(|s| s.mean_ssim)
    }

    /// Mean over all same-group and all cross-group backend pairs.
    pub fn within_and_between(&self) -> (Option<f64>, Option<f64>) {
        let (mut within, mut between) = (Vec::new(), Vec::new());
        for a in 0..self.backends.len() {
            for b in a + 1..self.backends.len() {
                let bucket = if self.groups[a] == self.groups[b] { &mut within } else { &mut between };
                bucket.push(self.pairwise[a][b]);
            }
        }
        let mean = |v: Vec<f64>| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
        (mean(within), mean(between))
    }
}

/// Pairwise SSIM between backends on globally shifted H matrices, plus
/// group-averaged scores. `groups` maps backend label to group; backends
/// missing from it form their own group.
pub fn similarity_report(
    matrices: &[ImpactMatrix],
    groups: &BTreeMap<String, String>,
) -> Result<SimilarityReport, AnalysisError> {
    if matrices.len() < 2 {
        return Err(AnalysisError::TooFewBackends(matrices.len()));
    }
    let shift = global_shift(matrices.iter().map(|h| h.values.as_slice()));
    let shifted: Vec<Vec<Vec<f64>>> = matrices.iter().map(|h| shifted(&h.values, shift)).collect();
    let dynamic_range = shifted.iter().flatten().flatten().copied().fold(0.0, f64::max);

    let k = matrices.len();
    let mut pairwise = vec![vec![1.0; k]; k];
    for a in 0..k {
        for b in a + 1..k {
            let s = ssim(&shifted[a], &shifted[b], WINDOW, dynamic_range)?;
            pairwise[a][b] = s;
            pairwise[b][a] = s;
        }
    }
    let backends: Vec<String> = matrices.iter().map(|h| h.backend.clone()).collect();
    let group_of: Vec<String> = backends.iter().map(|b| groups.get(b).cloned().unwrap_or_else(|| b.clone())).collect();
    let mut names: Vec<String> = group_of.clone();
    names.sort();
    names.dedup();

    let mut group_scores = Vec::new();
    for (gi, ga) in names.iter().enumerate() {
        for gb in &names[gi..] {
            let mut vals = Vec::new();
            for a in 0..k {
                for b in 0..k {
                    let ordered = if ga == gb { a < b } else { true };
                    if ordered && &group_of[a] == ga && &group_of[b] == gb {
                        vals.push(pairwise[a][b]);
                    }
                }
            }
            if !vals.is_empty() {
                group_scores.push(GroupScore {
                    a: ga.clone(),
                    b: gb.clone(),
                    mean_ssim: vals.iter().sum::<f64>() / vals.len() as f64,
                    pairs: vals.len(),
                });
            }
        }
    }
    Ok(SimilarityReport { backends, groups: group_of, pairwise, group_scores, shift, dynamic_range, window: WINDOW })
}
