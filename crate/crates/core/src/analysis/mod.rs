//! Fidelity, impact matrices, affinity metrics, cross-backend SSIM and
//! stress-test regression. Everything here consumes archived campaign
//! records only, so analyses replay without re-simulating.

mod fidelity;
mod impact;
mod regression;
mod ssim;

use thiserror::Error;

use crate::circuits::Family;

pub use fidelity::{bhattacharyya_fidelity, counts_fidelity};
pub use impact::{affinity, impact_matrix, AffinityTable, ImpactMatrix};
pub use regression::{ols, stress_points, stress_regression, Regression};
pub use ssim::{global_shift, similarity_report, ssim, GroupScore, SimilarityReport, K1, K2, WINDOW};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("distributions are over bitstrings of different lengths")]
    LengthMismatch,
    #[error("empty distribution")]
    EmptyDistribution,
    #[error("distribution sums to {0}, not 1")]
    NotNormalized(f64),
    #[error("row {0} has zero standard deviation")]
    DegenerateRow(Family),
    #[error("no trials or matrices to analyze")]
    NoTrials,
    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),
    #[error("matrix shapes do not match")]
    ShapeMismatch,
    #[error("family labels differ between matrices")]
    LabelMismatch,
    #[error("{rows}x{cols} matrix is smaller than the {window}x{window} window")]
    SmallerThanWindow { rows: usize, cols: usize, window: usize },
    #[error("similarity needs at least 2 backends, got {0}")]
    TooFewBackends(usize),
    #[error("regression needs at least 3 points/levels, got {0}")]
    TooFewPoints(usize),
    #[error("load has zero variance")]
    ZeroLoadVariance,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
