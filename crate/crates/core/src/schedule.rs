//! Learning-rate schedules. Steps are 1-based.

use serde::{Deserialize, Serialize};

/// How the base learning rate evolves with the step counter.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LrSchedule {
    #[default]
    Constant,
    /// `alpha / sqrt(t)`.
    InverseSqrt,
    /// Multiply by `factor` once for every milestone step already reached.
    Milestone { milestones: Vec<u64>, factor: f64 },
}

impl LrSchedule {
    /// Learning rate for step `t` (clamped to `t >= 1`).
    pub fn lr_at(&self, alpha: f64, t: u64) -> f64 {
        let t = t.max(1);
        match self {
            LrSchedule::Constant => alpha,
            LrSchedule::InverseSqrt => alpha / (t as f64).sqrt(),
            LrSchedule::Milestone { milestones, factor } => {
                let passed = milestones.iter().filter(|&&m| t >= m).count();
                alpha * factor.powi(passed as i32)
            }
        }
    }
}
