//! Step rules and a uniform stateful optimizer over all of them.

mod admeta;
mod basic;
mod radam;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use admeta::{AdmetaRInfo, AdmetaRState, AdmetaSState, ForwardInfo};
pub use basic::{sgd_step, AdamState, SgdmState};
pub use radam::{rectifier, rho_inf, rho_t, RadamState, RectifiedStep};

use crate::error::{check_dim, Error, Result};
use crate::hyper::HyperParams;
use crate::params::BoxConstraint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Sgd,
    Sgdm,
    Adam,
    Radam,
    AdmetaS,
    AdmetaR,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 6] = [
        OptimizerKind::Sgd,
        OptimizerKind::Sgdm,
        OptimizerKind::Adam,
        OptimizerKind::Radam,
        OptimizerKind::AdmetaS,
        OptimizerKind::AdmetaR,
    ];

    pub fn is_admeta(self) -> bool {
        matches!(self, OptimizerKind::AdmetaS | OptimizerKind::AdmetaR)
    }

    /// Display name, e.g. `AdmetaS`.
    pub fn display_name(self) -> &'static str {
        match self {
            OptimizerKind::Sgd => "SGD",
            OptimizerKind::Sgdm => "SGDM",
            OptimizerKind::Adam => "Adam",
            OptimizerKind::Radam => "RAdam",
            OptimizerKind::AdmetaS => "AdmetaS",
            OptimizerKind::AdmetaR => "AdmetaR",
        }
    }

    /// Lowercase identifier used on the command line.
    pub fn id(self) -> &'static str {
        match self {
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::Sgdm => "sgdm",
            OptimizerKind::Adam => "adam",
            OptimizerKind::Radam => "radam",
            OptimizerKind::AdmetaS => "admetas",
            OptimizerKind::AdmetaR => "admetar",
        }
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|k| k.id() == lower)
            .ok_or_else(|| Error::Unknown { what: "optimizer", name: s.into() })
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Per-step diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    /// 1-based index of the step just taken.
    pub t: u64,
    pub lr: f64,
    /// Lookahead weight, when a lookahead wrapper is active.
    pub eta: Option<f64>,
    pub synced: bool,
    /// `rho_t` for the rectified rules.
    pub rho_t: Option<f64>,
    /// `r_t` when the rectified adaptive branch ran.
    pub rectifier: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
enum Rule {
    Sgd,
    Sgdm(SgdmState),
    Adam(AdamState),
    Radam(RadamState),
    AdmetaS(AdmetaSState),
    AdmetaR(AdmetaRState),
}

/// A stateful optimizer for one parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimizer {
    kind: OptimizerKind,
    hp: HyperParams,
    dim: usize,
    bounds: BoxConstraint,
    rule: Rule,
    t: u64,
}

/// Build an optimizer of `kind` for `dim` parameters.
pub fn make_optimizer(kind: OptimizerKind, hp: HyperParams, dim: usize) -> Result<Optimizer> {
    Optimizer::new(kind, hp, dim)
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, hp: HyperParams, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be >= 1".into()));
        }
        hp.validate().into_result()?;
        let rule = match kind {
            OptimizerKind::Sgd => Rule::Sgd,
            OptimizerKind::Sgdm => Rule::Sgdm(SgdmState::new(dim)),
            OptimizerKind::Adam => Rule::Adam(AdamState::new(dim)),
            OptimizerKind::Radam => Rule::Radam(RadamState::new(dim, hp.beta2)),
            OptimizerKind::AdmetaS => Rule::AdmetaS(AdmetaSState::new(dim, &hp)?),
            OptimizerKind::AdmetaR => Rule::AdmetaR(AdmetaRState::new(dim, &hp)?),
        };
        Ok(Self { kind, hp, dim, bounds: BoxConstraint::unbounded(), rule, t: 0 })
    }

    /// Feasible box for the projected rule (AdmetaR). Other rules ignore it.
    pub fn with_bounds(mut self, bounds: BoxConstraint) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn kind(&self) -> OptimizerKind {
        self.kind
    }

    pub fn hyperparams(&self) -> &HyperParams {
        &self.hp
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Steps taken so far.
    pub fn steps(&self) -> u64 {
        self.t
    }

    /// Whether a lookahead wrapper is active for this configuration.
    pub fn has_lookahead(&self) -> bool {
        self.kind.is_admeta() && self.hp.ablation.use_forward
    }

    /// Name including ablation tags, e.g. `AdmetaS[-DEMA,-LF]`.
    pub fn name(&self) -> String {
        optimizer_name(self.kind, &self.hp)
    }

    pub fn admetas_state(&self) -> Option<&AdmetaSState> {
        match &self.rule {
            Rule::AdmetaS(s) => Some(s),
            _ => None,
        }
    }

    pub fn admetar_state(&self) -> Option<&AdmetaRState> {
        match &self.rule {
            Rule::AdmetaR(s) => Some(s),
            _ => None,
        }
    }

    /// Apply one step in place: learning-rate schedule, decoupled weight
    /// decay, the step rule, projection and lookahead where applicable.
    pub fn step(&mut self, theta: &mut [f64], g: &[f64]) -> Result<StepInfo> {
        check_dim(self.dim, theta.len())?;
        check_dim(self.dim, g.len())?;
        let t = self.t + 1;
        let hp = &self.hp;
        let lr = hp.lr_schedule.lr_at(hp.alpha, t);
        if hp.weight_decay > 0.0 {
            let shrink = lr * hp.weight_decay;
            for th in theta.iter_mut() {
                *th -= shrink * *th;
            }
        }
        let mut info = StepInfo { t, lr, eta: None, synced: false, rho_t: None, rectifier: None };
        match &mut self.rule {
            Rule::Sgd => sgd_step(theta, g, lr)?,
            Rule::Sgdm(s) => s.step(theta, g, lr, hp.beta, hp.nesterov)?,
            Rule::Adam(s) => s.step(theta, g, lr, hp.beta1, hp.beta2, hp.epsilon, true)?,
            Rule::Radam(s) => {
                let r = s.step(theta, g, lr, hp.beta1, hp.beta2, hp.epsilon)?;
                info.rho_t = Some(r.rho_t);
                info.rectifier = r.rectifier;
            }
            Rule::AdmetaS(s) => {
                let f = s.step(theta, g, lr, hp)?;
                info.eta = f.eta;
                info.synced = f.synced;
            }
            Rule::AdmetaR(s) => {
                let r = s.step(theta, g, lr, hp, &self.bounds)?;
                info.rho_t = Some(r.rho_t);
                info.rectifier = r.rectifier;
                info.eta = r.forward.eta;
                info.synced = r.forward.synced;
            }
        }
        self.t = t;
        if theta.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { step: t });
        }
        Ok(info)
    }
}

/// Name of an optimizer configuration, with ablation tags for the Admeta rules.
pub fn optimizer_name(kind: OptimizerKind, hp: &HyperParams) -> String {
    if kind.is_admeta() {
        format!("{}{}", kind.display_name(), hp.ablation.name_suffix())
    } else {
        kind.display_name().to_string()
    }
}
