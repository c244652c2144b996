use serde::{Deserialize, Serialize};

use super::SimError;

/// Inter-tenant crosstalk and generic noise parameters.
///
/// Every two-qubit gate on edge `(a, b)` kicks each other-tenant qubit `v`
/// within `distance_cutoff` hops with `exp(-i ε Z_u Z_v)`, where `u` is the
/// nearer endpoint, `d` its distance to `v`, and `ε = zz_strength · distance_decay^(d-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkProfile {
    /// ε₀, radians per triggering two-qubit gate.
    pub zz_strength: f64,
    /// λ ∈ (0, 1].
    pub distance_decay: f64,
    pub distance_cutoff: usize,
    pub depol_1q: f64,
    pub depol_2q: f64,
    pub readout_flip: f64,
}

impl Default for CrosstalkProfile {
    fn default() -> Self {
        Self {
            zz_strength: 0.1,
            distance_decay: 0.5,
            distance_cutoff: 3,
            depol_1q: 0.0005,
            depol_2q: 0.005,
            readout_flip: 0.01,
        }
    }
}

impl CrosstalkProfile {
    /// No crosstalk and no noise of any kind.
    pub fn noiseless() -> Self {
        Self { zz_strength: 0.0, depol_1q: 0.0, depol_2q: 0.0, readout_flip: 0.0, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |field: &'static str, value: f64| Err(SimError::InvalidProfile { field, value });
        if !self.zz_strength.is_finite() || self.zz_strength < 0.0 {
            return bad("zz_strength", self.zz_strength);
        }
        if !(self.distance_decay > 0.0 && self.distance_decay <= 1.0) {
            return bad("distance_decay", self.distance_decay);
        }
        if self.distance_cutoff < 1 {
            return bad("distance_cutoff", self.distance_cutoff as f64);
        }
        for (field, value) in
            [("depol_1q", self.depol_1q), ("depol_2q", self.depol_2q), ("readout_flip", self.readout_flip)]
        {
            if !(0.0..=0.1).contains(&value) {
                return bad(field, value);
            }
        }
        Ok(())
    }

    pub fn has_stochastic_gate_noise(&self) -> bool {
        self.depol_1q > 0.0 || self.depol_2q > 0.0
    }

    /// Kick angle at hop distance `d`, or `None` beyond the cutoff.
    pub fn kick_angle(&self, d: usize) -> Option<f64> {
        (d >= 1 && d <= self.distance_cutoff && self.zz_strength > 0.0)
            .then(|| self.zz_strength * self.distance_decay.powi(d as i32 - 1))
    }
}
