//! Parameters, state and the exponential mesh of scaling factors.

use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

/// Tuning parameters of the order and scaling adaptation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdaptiveParams {
    pub n_min: u32,
    pub n_max: u32,
    pub delta_n: u32,
    /// Relative floor for updating the order reference indicator.
    pub eta0_p: f64,
    pub etal_p: f64,
    pub etah_p: f64,
    /// Absolute floor of the lower order threshold.
    pub f_l0: f64,
    /// Absolute floor of the upper order threshold.
    pub f_h0: f64,
    pub etal_s: f64,
    pub etah_s: f64,
    /// Ratio of neighbouring scaling factors on the mesh.
    pub q: f64,
    pub beta_min: f64,
    pub beta_max: f64,
}

impl Default for AdaptiveParams {
    fn default() -> Self {
        AdaptiveParams {
            n_min: 2,
            n_max: 24,
            delta_n: 1,
            eta0_p: 0.01,
            etal_p: 0.3,
            etah_p: 1.5,
            f_l0: 1e-9,
            f_h0: 1e-6,
            etal_s: 0.9995,
            etah_s: 1.0005,
            q: 0.9995,
            beta_min: 0.15,
            beta_max: 2.0,
        }
    }
}

impl AdaptiveParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_min < 2 {
            return invalid("n_min must be at least 2 to keep mass, momentum and energy");
        }
        if self.n_max < self.n_min {
            return invalid("n_max must not be below n_min");
        }
        if self.delta_n == 0 {
            return invalid("delta_n must be positive");
        }
        if !(self.eta0_p >= 0.0) {
            return invalid("eta0_p must be non-negative");
        }
        if !(self.etal_p > 0.0 && self.etal_p <= 1.0 && self.etah_p >= 1.0) {
            return invalid("order thresholds need 0 < etal_p <= 1 <= etah_p");
        }
        if !(self.etal_s > 0.0 && self.etal_s <= 1.0 && self.etah_s >= 1.0) {
            return invalid("scaling thresholds need 0 < etal_s <= 1 <= etah_s");
        }
        if !(self.f_l0 >= 0.0 && self.f_h0 >= 0.0) {
            return invalid("threshold floors must be non-negative");
        }
        if !(self.q > 0.0 && self.q < 1.0) {
            return invalid("mesh ratio q must lie in (0, 1)");
        }
        if !(self.beta_min > 0.0 && self.beta_min < self.beta_max && self.beta_max.is_finite()) {
            return invalid("need 0 < beta_min < beta_max");
        }
        Ok(())
    }

    pub fn mesh(&self) -> Result<ScalingMesh> {
        ScalingMesh::new(self.q, self.beta_min, self.beta_max)
    }
}

/// What an adjustment changed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdjustmentKind {
    Scale,
    Order,
}

/// One accepted change of scaling factor or order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Adjustment {
    pub time: f64,
    pub kind: AdjustmentKind,
    pub old: f64,
    pub new: f64,
    pub indicator_before: f64,
    pub indicator_after: f64,
}

/// Reference indicators and the log of adjustments.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AdaptiveState {
    pub f_ref_p: f64,
    pub f_ref_s: f64,
    pub log: Vec<Adjustment>,
}

impl AdaptiveState {
    pub fn new(initial_indicator: f64) -> Self {
        AdaptiveState { f_ref_p: initial_indicator, f_ref_s: initial_indicator, log: Vec::new() }
    }
}

/// Admissible scaling factors `q^m` within `[beta_min, beta_max]`, addressed
/// by the integer exponent `m`. Larger `m` means smaller `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingMesh {
    q: f64,
    m_lo: i32,
    m_hi: i32,
}

impl ScalingMesh {
    pub fn new(q: f64, beta_min: f64, beta_max: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) || !(beta_min > 0.0 && beta_min < beta_max) {
            return invalid("mesh needs 0 < q < 1 and 0 < beta_min < beta_max");
        }
        let lq = q.ln();
        let mut m_lo = (beta_max.ln() / lq).ceil() as i32;
        let mut m_hi = (beta_min.ln() / lq).floor() as i32;
        // guard against rounding at the bounds
        while q.powi(m_lo) > beta_max {
            m_lo += 1;
        }
        while q.powi(m_hi) < beta_min {
            m_hi -= 1;
        }
        if m_lo > m_hi {
            return invalid(format!("no mesh point q^m in [{beta_min}, {beta_max}] for q = {q}"));
        }
        Ok(ScalingMesh { q, m_lo, m_hi })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Exponent of the largest admissible scaling factor.
    pub fn first(&self) -> i32 {
        self.m_lo
    }

    /// Exponent of the smallest admissible scaling factor.
    pub fn last(&self) -> i32 {
        self.m_hi
    }

    pub fn len(&self) -> usize {
        (self.m_hi - self.m_lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn beta(&self, m: i32) -> f64 {
        self.q.powi(m)
    }

    pub fn contains(&self, m: i32) -> bool {
        (self.m_lo..=self.m_hi).contains(&m)
    }

    /// Exponent of the mesh point nearest to `beta` (may lie outside the
    /// admissible range).
    pub fn nearest(&self, beta: f64) -> i32 {
        (beta.ln() / self.q.ln()).round() as i32
    }
}
