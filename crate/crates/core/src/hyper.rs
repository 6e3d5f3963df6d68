//! Hyperparameters, ablation switches and their validation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lookahead::{EtaSchedule, SlowInit};
use crate::schedule::LrSchedule;

/// When AdmetaR refreshes its second-moment estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VUpdatePolicy {
    /// Every step, as in RAdam.
    #[default]
    Always,
    /// Only while the variance is tractable (`rho_t > 4`).
    TractableOnly,
}

impl std::str::FromStr for VUpdatePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "always" => Ok(Self::Always),
            "tractable-only" => Ok(Self::TractableOnly),
            other => Err(Error::Unknown { what: "v-update policy", name: other.into() }),
        }
    }
}

impl fmt::Display for VUpdatePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Always => "always",
            Self::TractableOnly => "tractable-only",
        })
    }
}

/// Switches reproducing the ablation variants of the Admeta optimizers.
///
/// * `use_dema = false`: plain EMA of the raw gradient ("-DEMA").
/// * `use_backward = false`: no outer moving average, `m_t = h_t` ("-LB").
/// * `use_forward = false`: no lookahead wrapper ("-LF").
/// * `forward_constant = true`: lookahead with a constant `eta` ("w/ constant LF").
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AblationFlags {
    pub use_dema: bool,
    pub use_backward: bool,
    pub use_forward: bool,
    pub forward_constant: bool,
}

impl Default for AblationFlags {
    fn default() -> Self {
        Self::FULL
    }
}

impl AblationFlags {
    pub const FULL: Self =
        Self { use_dema: true, use_backward: true, use_forward: true, forward_constant: false };

    /// The six rows of the ablation table, in table order.
    pub fn table_variants() -> [AblationFlags; 6] {
        let full = Self::FULL;
        [
            full,
            Self { use_dema: false, ..full },
            Self { use_backward: false, ..full },
            Self { use_forward: false, ..full },
            Self { use_backward: false, use_forward: false, ..full },
            Self { forward_constant: true, ..full },
        ]
    }

    /// Parse a comma list of `dema`, `lb`, `lf`, `const-lf`.
    pub fn from_ablate_list(list: &str) -> Result<Self> {
        let mut flags = Self::FULL;
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item.to_ascii_lowercase().as_str() {
                "dema" => flags.use_dema = false,
                "lb" => flags.use_backward = false,
                "lf" => flags.use_forward = false,
                "const-lf" => flags.forward_constant = true,
                other => return Err(Error::Unknown { what: "ablation", name: other.into() }),
            }
        }
        Ok(flags)
    }

    /// Inverse of [`AblationFlags::from_ablate_list`].
    pub fn to_ablate_list(&self) -> String {
        let mut items = Vec::new();
        if !self.use_dema {
            items.push("dema");
        }
        if !self.use_backward {
            items.push("lb");
        }
        if !self.use_forward {
            items.push("lf");
        }
        if self.forward_constant {
            items.push("const-lf");
        }
        items.join(",")
    }

    fn removed_tags(&self) -> Vec<&'static str> {
        let mut tags = Vec::new();
        if !self.use_dema {
            tags.push("-DEMA");
        }
        if !self.use_backward {
            tags.push("-LB");
        }
        if !self.use_forward {
            tags.push("-LF");
        }
        tags
    }

    /// Row label in ablation-table style: `full`, `-DEMA`, `-LB-LF`, `w/ constant LF`, ...
    pub fn row_label(&self) -> String {
        let mut label = self.removed_tags().concat();
        if self.forward_constant && self.use_forward {
            if !label.is_empty() {
                label.push(' ');
            }
            label.push_str("w/ constant LF");
        }
        if label.is_empty() {
            "full".into()
        } else {
            label
        }
    }

    /// Bracket suffix used in optimizer names, e.g. `[-DEMA,-LF]`; empty for the full variant.
    pub fn name_suffix(&self) -> String {
        let mut tags: Vec<&str> = self.removed_tags();
        if self.forward_constant && self.use_forward {
            tags.push("const-LF");
        }
        if tags.is_empty() {
            String::new()
        } else {
            format!("[{}]", tags.join(","))
        }
    }
}

/// Every tunable of every optimizer in the crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    /// Base learning rate.
    pub alpha: f64,
    /// Inner accumulator coefficient of DEMA.
    pub lambda: f64,
    /// Momentum for SGDM and AdmetaS.
    pub beta: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Lookahead synchronization period.
    pub k: u64,
    pub eta_schedule: EtaSchedule,
    pub slow_init: SlowInit,
    pub nesterov: bool,
    /// Decoupled weight decay, scaled by the step learning rate.
    pub weight_decay: f64,
    pub lr_schedule: LrSchedule,
    pub v_update_policy: VUpdatePolicy,
    pub ablation: AblationFlags,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self {
            alpha: 1e-3,
            lambda: 0.9,
            beta: 0.9,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            k: 6,
            eta_schedule: EtaSchedule::Dyn08,
            slow_init: SlowInit::Initial,
            nesterov: false,
            weight_decay: 0.0,
            lr_schedule: LrSchedule::Constant,
            v_update_policy: VUpdatePolicy::Always,
            ablation: AblationFlags::FULL,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> ValidationReport {
        validate_hyperparams(self)
    }

    /// `beta1^2 / beta2`; the convergence analysis needs it below one.
    pub fn gamma(&self) -> f64 {
        self.beta1 * self.beta1 / self.beta2
    }

    /// The lookahead schedule after applying `forward_constant`: a dynamic
    /// schedule is replaced by a constant at its asymptote.
    pub fn effective_eta(&self) -> EtaSchedule {
        if self.ablation.forward_constant {
            EtaSchedule::Const(self.eta_schedule.limit())
        } else {
            self.eta_schedule
        }
    }
}

/// Outcome of [`validate_hyperparams`]. Never aborts; callers decide.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    /// Convert to a `Result`, logging warnings.
    pub fn into_result(self) -> Result<()> {
        for w in &self.warnings {
            log::warn!("{w}");
        }
        if self.errors.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidHyperParams(self.errors.join("; ")))
        }
    }
}

pub fn validate_hyperparams(hp: &HyperParams) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut err = |cond: bool, msg: &str| {
        if cond {
            report.errors.push(msg.to_string());
        }
    };
    err(!(hp.lambda > 0.0 && hp.lambda < 1.0), "lambda out of (0,1)");
    err(!(hp.alpha > 0.0 && hp.alpha.is_finite()), "alpha must be > 0");
    err(!(hp.epsilon > 0.0), "epsilon must be > 0");
    err(hp.k < 1, "k must be >= 1");
    err(!(0.0..1.0).contains(&hp.beta), "beta out of [0,1)");
    err(!(0.0..1.0).contains(&hp.beta1), "beta1 out of [0,1)");
    err(!(0.0..1.0).contains(&hp.beta2), "beta2 out of [0,1)");
    err(!(hp.weight_decay >= 0.0), "weight_decay must be >= 0");
    if let EtaSchedule::Const(eta) = hp.eta_schedule {
        err(!(eta > 0.0 && eta <= 1.0), "constant eta out of (0,1]");
    }
    if let LrSchedule::Milestone { factor, .. } = &hp.lr_schedule {
        err(!(*factor > 0.0 && *factor <= 1.0), "milestone factor out of (0,1]");
    }
    if hp.beta2 > 0.0 && hp.gamma() >= 1.0 {
        report
            .warnings
            .push(format!("γ ≥ 1: beta1^2/beta2 = {:.4} violates the convergence condition", hp.gamma()));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_clean() {
        let r = validate_hyperparams(&HyperParams::default());
        assert!(r.errors.is_empty() && r.warnings.is_empty(), "{r:?}");
    }

    #[test]
    fn lambda_zero_is_error() {
        let hp = HyperParams { lambda: 0.0, ..Default::default() };
        let r = validate_hyperparams(&hp);
        assert_eq!(r.errors, vec!["lambda out of (0,1)".to_string()]);
        assert!(hp.validate().into_result().is_err());
    }

    #[test]
    fn gamma_warning() {
        let hp = HyperParams { beta1: 0.999, beta2: 0.9, ..Default::default() };
        let r = validate_hyperparams(&hp);
        assert!(r.errors.is_empty());
        assert_eq!(r.warnings.len(), 1);
        assert!(r.warnings[0].starts_with("γ ≥ 1"));
    }

    #[test]
    fn other_errors() {
        let hp = HyperParams { alpha: 0.0, epsilon: 0.0, k: 0, ..Default::default() };
        assert_eq!(validate_hyperparams(&hp).errors.len(), 3);
    }

    #[test]
    fn ablate_list_round_trip() {
        for flags in AblationFlags::table_variants() {
            let list = flags.to_ablate_list();
            assert_eq!(AblationFlags::from_ablate_list(&list).unwrap(), flags);
        }
        assert!(AblationFlags::from_ablate_list("dema,bogus").is_err());
    }

    #[test]
    fn table_labels() {
        let labels: Vec<String> =
            AblationFlags::table_variants().iter().map(|f| f.row_label()).collect();
        assert_eq!(labels, ["full", "-DEMA", "-LB", "-LF", "-LB-LF", "w/ constant LF"]);
        let f = AblationFlags::from_ablate_list("dema,lf").unwrap();
        assert_eq!(f.name_suffix(), "[-DEMA,-LF]");
    }
}
