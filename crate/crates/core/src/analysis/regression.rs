use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{bhattacharyya_fidelity, AnalysisError};
use crate::protocol::StressResult;

/// Ordinary least squares fit with a two-sided slope test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regression {
    pub slope: f64,
    pub intercept: f64,
    pub slope_std_error: f64,
    /// Two-sided p-value for `slope ≠ 0` (Student t, n − 2 dof).
    pub p_value: f64,
    pub n: usize,
}

pub fn ols(points: &[(f64, f64)]) -> Result<Regression, AnalysisError> {
    let n = points.len();
    if n < 3 {
        return Err(AnalysisError::TooFewPoints(n));
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx.is_nan() || sxx <= 0.0 {
        return Err(AnalysisError::ZeroLoadVariance);
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let dof = nf - 2.0;
    let se = (sse / dof / sxx).sqrt();
    // Exact fits: a perfect line is maximally significant, a flat one not at all.
    let p_value = if se > 1e-300 {
        let t = slope / se;
        let dist = StudentsT::new(0.0, 1.0, dof).expect("dof >= 1");
        2.0 * (1.0 - dist.cdf(t.abs()))
    } else if slope.abs() > 0.0 {
        0.0
    } else {
        1.0
    };
    let p_value = if p_value.is_nan() { 1.0 } else { p_value.clamp(0.0, 1.0) };
    Ok(Regression { slope, intercept, slope_std_error: se, p_value, n })
}

/// `(load, fidelity to the noiseless target distribution)` for every step
/// of every stress trial.
pub fn stress_points(results: &[StressResult]) -> Result<Vec<(f64, f64)>, AnalysisError> {
    let mut points = Vec::new();
    for r in results {
        for step in &r.steps {
            let f = bhattacharyya_fidelity(&r.target_ideal, &step.counts.distribution())?;
            points.push((step.load as f64, f));
        }
    }
    Ok(points)
}

pub fn stress_regression(results: &[StressResult]) -> Result<Regression, AnalysisError> {
    let points = stress_points(results)?;
    let mut loads: Vec<f64> = points.iter().map(|p| p.0).collect();
    loads.sort_by(f64::total_cmp);
    loads.dedup();
    if loads.len() < 3 {
        return Err(AnalysisError::TooFewPoints(loads.len()));
    }
    ols(&points)
}
