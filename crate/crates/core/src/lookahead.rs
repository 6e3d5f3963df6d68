//! Forward-looking wrapper: slow weights pulled toward the fast weights every
//! `k` steps with an interpolation weight `eta_t`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Interpolation weight schedule for synchronization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaSchedule {
    Const(f64),
    /// `0.5 * (1 + 1 / (0.01 sqrt(t) + 1))`, from 1 toward 0.5.
    Dyn05,
    /// `0.8 * (1 + 1 / (0.1 sqrt(t) + 3.8))`, from about 1 toward 0.8.
    Dyn08,
}

impl EtaSchedule {
    /// Evaluate at the global fast-step counter `t`. Not clamped: `Dyn08`
    /// is slightly above 1 for `t < 4`.
    pub fn eta_at(&self, t: u64) -> f64 {
        let root = (t as f64).sqrt();
        match *self {
            EtaSchedule::Const(eta) => eta,
            EtaSchedule::Dyn05 => 0.5 * (1.0 + 1.0 / (0.01 * root + 1.0)),
            EtaSchedule::Dyn08 => 0.8 * (1.0 + 1.0 / (0.1 * root + 3.8)),
        }
    }

    /// Value approached as `t` grows.
    pub fn limit(&self) -> f64 {
        match *self {
            EtaSchedule::Const(eta) => eta,
            EtaSchedule::Dyn05 => 0.5,
            EtaSchedule::Dyn08 => 0.8,
        }
    }
}

impl FromStr for EtaSchedule {
    type Err = Error;

    /// `dyn05`, `dyn08` or `const:<value>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dyn05" => Ok(Self::Dyn05),
            "dyn08" => Ok(Self::Dyn08),
            other => other
                .strip_prefix("const:")
                .and_then(|v| v.parse::<f64>().ok())
                .map(Self::Const)
                .ok_or_else(|| Error::Unknown { what: "eta schedule", name: other.into() }),
        }
    }
}

impl fmt::Display for EtaSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Const(eta) => write!(f, "const:{eta}"),
            Self::Dyn05 => f.write_str("dyn05"),
            Self::Dyn08 => f.write_str("dyn08"),
        }
    }
}

/// Starting value of the slow weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlowInit {
    /// Copy of the parameters seen at the first step.
    #[default]
    Initial,
    /// All zeros.
    Zero,
}

impl FromStr for SlowInit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "initial" => Ok(Self::Initial),
            "zero" => Ok(Self::Zero),
            other => Err(Error::Unknown { what: "slow-weight init", name: other.into() }),
        }
    }
}

impl fmt::Display for SlowInit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Initial => "initial",
            Self::Zero => "zero",
        })
    }
}

/// Slow weights and synchronization bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct LookaheadState {
    slow: Option<Vec<f64>>,
    init: SlowInit,
    k: u64,
    sync_count: u64,
}

impl LookaheadState {
    pub fn new(k: u64, init: SlowInit) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("synchronization period k must be >= 1".into()));
        }
        Ok(Self { slow: None, init, k, sync_count: 0 })
    }

    /// Start from explicit slow weights.
    pub fn with_slow_weights(k: u64, slow: Vec<f64>) -> Result<Self> {
        let mut s = Self::new(k, SlowInit::Initial)?;
        s.slow = Some(slow);
        Ok(s)
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn sync_count(&self) -> u64 {
        self.sync_count
    }

    pub fn slow_weights(&self) -> Option<&[f64]> {
        self.slow.as_deref()
    }

    /// Capture the starting slow weights if not done yet. Call with the
    /// parameters before the first fast step.
    pub fn init_from(&mut self, theta: &[f64]) {
        if self.slow.is_none() {
            self.slow = Some(match self.init {
                SlowInit::Initial => theta.to_vec(),
                SlowInit::Zero => vec![0.0; theta.len()],
            });
        }
    }

    pub fn is_sync_step(&self, t: u64) -> bool {
        t > 0 && t % self.k == 0
    }

    /// After completed fast step `t`: on a sync step set
    /// `phi <- eta_t theta + (1 - eta_t) phi` and overwrite `theta` with it.
    /// Returns whether a synchronization happened.
    pub fn maybe_sync(&mut self, theta: &mut [f64], t: u64, schedule: &EtaSchedule) -> Result<bool> {
        self.init_from(theta);
        let slow = self.slow.as_mut().expect("initialized above");
        check_dim(slow.len(), theta.len())?;
        if !(t > 0 && t % self.k == 0) {
            return Ok(false);
        }
        let eta = schedule.eta_at(t);
        for (phi, th) in slow.iter_mut().zip(theta.iter_mut()) {
            *phi = eta * *th + (1.0 - eta) * *phi;
            *th = *phi;
        }
        self.sync_count += 1;
        Ok(true)
    }
}
