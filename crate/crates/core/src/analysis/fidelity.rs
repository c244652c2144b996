use super::AnalysisError;
use crate::sim::{CountsRecord, Distribution};

/// Classical (Bhattacharyya) fidelity `Σ_x √(p(x) q(x))`. Outcomes missing
/// from either side contribute zero.
pub fn bhattacharyya_fidelity(p: &Distribution, q: &Distribution) -> Result<f64, AnalysisError> {
    let width = check(p)?;
    if check(q)? != width {
        return Err(AnalysisError::LengthMismatch);
    }
    let sum: f64 = p.iter().filter_map(|(k, &pv)| q.get(k).map(|&qv| (pv * qv).sqrt())).sum();
    Ok(sum.min(1.0))
}

fn check(d: &Distribution) -> Result<usize, AnalysisError> {
    let mut keys = d.keys();
    let width = keys.next().ok_or(AnalysisError::EmptyDistribution)?.len();
    if keys.any(|k| k.len() != width) {
        return Err(AnalysisError::LengthMismatch);
    }
    let total: f64 = d.values().sum();
    if (total - 1.0).abs() > 1e-6 || d.values().any(|&v| v < 0.0) {
        return Err(AnalysisError::NotNormalized(total));
    }
    Ok(width)
}

/// Fidelity between two measured records (normalized first).
pub fn counts_fidelity(a: &CountsRecord, b: &CountsRecord) -> Result<f64, AnalysisError> {
    bhattacharyya_fidelity(&a.distribution(), &b.distribution())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(pairs: &[(&str, f64)]) -> Distribution {
        pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
    }

    #[test]
    fn identity_and_disjoint() {
        let p = dist(&[("00", 0.25), ("01", 0.75)]);
        assert!((bhattacharyya_fidelity(&p, &p).unwrap() - 1.0).abs() < 1e-15);
        let q = dist(&[("10", 0.5), ("11", 0.5)]);
        assert_eq!(bhattacharyya_fidelity(&p, &q).unwrap(), 0.0);
    }

    #[test]
    fn half_against_point_mass() {
        let p = dist(&[("0", 0.5), ("1", 0.5)]);
        let q = dist(&[("0", 1.0)]);
        assert!((bhattacharyya_fidelity(&p, &q).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        let p = dist(&[("0", 1.0)]);
        assert!(matches!(bhattacharyya_fidelity(&p, &dist(&[("00", 1.0)])), Err(AnalysisError::LengthMismatch)));
        assert!(matches!(bhattacharyya_fidelity(&p, &Distribution::new()), Err(AnalysisError::EmptyDistribution)));
        assert!(matches!(bhattacharyya_fidelity(&p, &dist(&[("1", 0.5)])), Err(AnalysisError::NotNormalized(_))));
    }
}
