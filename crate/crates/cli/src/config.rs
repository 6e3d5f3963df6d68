//! Run configuration and its flat `key = value` file format.
//!
//! Keys are the long command-line flag names without the leading dashes.
//! Values are applied in order, so later pairs (command-line flags) override
//! earlier ones (the config file). A `preset` key is applied first, before
//! any explicit hyperparameter.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use admeta_core::{
    preset, AblationFlags, HyperParams, LrSchedule, OnlineQuadraticStream, OptimizerKind, Problem,
    QuadraticValley, Rosenbrock, TinyMlp,
};

use crate::error::{CliError, Result};

/// Test problem identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemId {
    Valley,
    Rosenbrock,
    TinyMlp,
    Stream,
}

impl ProblemId {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemId::Valley => "valley",
            ProblemId::Rosenbrock => "rosenbrock",
            ProblemId::TinyMlp => "tinymlp",
            ProblemId::Stream => "stream",
        }
    }
}

impl FromStr for ProblemId {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "valley" => Ok(Self::Valley),
            "rosenbrock" => Ok(Self::Rosenbrock),
            "tinymlp" => Ok(Self::TinyMlp),
            "stream" => Ok(Self::Stream),
            other => Err(CliError::Config(format!("unknown problem `{other}`"))),
        }
    }
}

/// A constructed problem together with how the runner samples gradients.
pub enum ProblemInstance {
    Valley(QuadraticValley),
    Rosenbrock(Rosenbrock),
    TinyMlp(TinyMlp),
    Stream(OnlineQuadraticStream),
}

impl ProblemInstance {
    pub fn as_problem(&self) -> &dyn Problem {
        match self {
            ProblemInstance::Valley(p) => p,
            ProblemInstance::Rosenbrock(p) => p,
            ProblemInstance::TinyMlp(p) => p,
            ProblemInstance::Stream(p) => p,
        }
    }
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemId,
    /// Dimension for valley, rosenbrock and stream.
    pub dim: usize,
    /// Valley condition number.
    pub cond: f64,
    /// TinyMlp dataset size.
    pub samples: usize,
    pub hidden: usize,
    /// TinyMlp mini-batch size; 0 means full batch.
    pub batch_size: usize,
    pub optimizer: OptimizerKind,
    pub preset: Option<String>,
    pub hp: HyperParams,
    pub steps: u64,
    pub seed: u64,
    pub seeds: u64,
    /// Record parameters every this many steps; 0 disables snapshots.
    pub snapshot_stride: u64,
    /// Radius of the ball around the optimum used for first-hit times.
    pub hit_eps: f64,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemId::Valley,
            dim: 2,
            cond: 100.0,
            samples: 1000,
            hidden: 16,
            batch_size: 32,
            optimizer: OptimizerKind::AdmetaS,
            preset: None,
            hp: HyperParams::default(),
            steps: 1000,
            seed: 0,
            seeds: 1,
            snapshot_stride: 10,
            hit_eps: 0.01,
            out: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(CliError::Config(format!("invalid boolean `{value}` for `{key}`"))),
    }
}

/// `constant`, `inv-sqrt` or `milestone:<s1>,<s2>,...@<factor>`.
pub fn parse_lr_schedule(value: &str) -> Result<LrSchedule> {
    match value {
        "constant" => Ok(LrSchedule::Constant),
        "inv-sqrt" => Ok(LrSchedule::InverseSqrt),
        other => {
            let bad = || CliError::Config(format!("invalid lr schedule `{other}`"));
            let body = other.strip_prefix("milestone:").ok_or_else(bad)?;
            let (steps, factor) = body.split_once('@').ok_or_else(bad)?;
            let milestones = steps
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| s.trim().parse::<u64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            let factor = factor.parse::<f64>().map_err(|_| bad())?;
            Ok(LrSchedule::Milestone { milestones, factor })
        }
    }
}

pub fn format_lr_schedule(s: &LrSchedule) -> String {
    match s {
        LrSchedule::Constant => "constant".into(),
        LrSchedule::InverseSqrt => "inv-sqrt".into(),
        LrSchedule::Milestone { milestones, factor } => {
            let steps: Vec<String> = milestones.iter().map(u64::to_string).collect();
            format!("milestone:{}@{factor}", steps.join(","))
        }
    }
}

fn core_err(e: admeta_core::Error) -> CliError {
    CliError::Config(e.to_string())
}

impl RunConfig {
    /// Set one field from its flag name and textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let hp = &mut self.hp;
        match key {
            "problem" => self.problem = value.parse()?,
            "dim" => self.dim = parse(key, value)?,
            "cond" => self.cond = parse(key, value)?,
            "samples" => self.samples = parse(key, value)?,
            "hidden" => self.hidden = parse(key, value)?,
            "batch-size" => self.batch_size = parse(key, value)?,
            "optimizer" => self.optimizer = value.parse().map_err(core_err)?,
            "preset" => {
                let p = preset(value).ok_or_else(|| CliError::Config(format!("unknown preset `{value}`")))?;
                self.optimizer = p.kind;
                self.hp = p.hp;
                self.preset = Some(value.to_string());
            }
            "lr" => hp.alpha = parse(key, value)?,
            "lambda" => hp.lambda = parse(key, value)?,
            "beta" => hp.beta = parse(key, value)?,
            "beta1" => hp.beta1 = parse(key, value)?,
            "beta2" => hp.beta2 = parse(key, value)?,
            "eps" => hp.epsilon = parse(key, value)?,
            "k" => hp.k = parse(key, value)?,
            "eta-schedule" => hp.eta_schedule = value.parse().map_err(core_err)?,
            "slow-init" => hp.slow_init = value.parse().map_err(core_err)?,
            "ablate" => hp.ablation = AblationFlags::from_ablate_list(value).map_err(core_err)?,
            "v-update" => hp.v_update_policy = value.parse().map_err(core_err)?,
            "nesterov" => hp.nesterov = parse_bool(key, value)?,
            "weight-decay" => hp.weight_decay = parse(key, value)?,
            "lr-schedule" => hp.lr_schedule = parse_lr_schedule(value)?,
            "steps" => self.steps = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "seeds" => self.seeds = parse(key, value)?,
            "snapshot-stride" => self.snapshot_stride = parse(key, value)?,
            "hit-eps" => self.hit_eps = parse(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            other => return Err(CliError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Build from ordered `(key, value)` pairs on top of the defaults.
    pub fn from_pairs<'a, I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let pairs: Vec<(&str, &str)> = pairs.into_iter().collect();
        let mut cfg = Self::default();
        if let Some((_, name)) = pairs.iter().rev().find(|(k, _)| *k == "preset") {
            cfg.set("preset", name)?;
        }
        for (k, v) in pairs.iter().filter(|(k, _)| *k != "preset") {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    /// Parse the flat text format: one `key = value` per line, `#` comments.
    pub fn parse_kv(text: &str) -> Result<Vec<(String, String)>> {
        let mut pairs = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", no + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(pairs)
    }

    pub fn from_kv_str(text: &str) -> Result<Self> {
        let pairs = Self::parse_kv(text)?;
        Self::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
    }

    /// Serialize every field; `from_kv_str(to_kv_string())` reproduces `self`.
    pub fn to_kv_string(&self) -> String {
        let hp = &self.hp;
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        if let Some(p) = &self.preset {
            line("preset", p.clone());
        }
        line("problem", self.problem.as_str().into());
        line("dim", self.dim.to_string());
        line("cond", self.cond.to_string());
        line("samples", self.samples.to_string());
        line("hidden", self.hidden.to_string());
        line("batch-size", self.batch_size.to_string());
        line("optimizer", self.optimizer.id().into());
        line("lr", hp.alpha.to_string());
        line("lambda", hp.lambda.to_string());
        line("beta", hp.beta.to_string());
        line("beta1", hp.beta1.to_string());
        line("beta2", hp.beta2.to_string());
        line("eps", hp.epsilon.to_string());
        line("k", hp.k.to_string());
        line("eta-schedule", hp.eta_schedule.to_string());
        line("slow-init", hp.slow_init.to_string());
        line("ablate", hp.ablation.to_ablate_list());
        line("v-update", hp.v_update_policy.to_string());
        line("nesterov", hp.nesterov.to_string());
        line("weight-decay", hp.weight_decay.to_string());
        line("lr-schedule", format_lr_schedule(&hp.lr_schedule));
        line("steps", self.steps.to_string());
        line("seed", self.seed.to_string());
        line("seeds", self.seeds.to_string());
        line("snapshot-stride", self.snapshot_stride.to_string());
        line("hit-eps", self.hit_eps.to_string());
        if let Some(out) = &self.out {
            line("out", out.display().to_string());
        }
        s
    }

    /// Optimizer display name with ablation tags.
    pub fn optimizer_name(&self) -> String {
        admeta_core::optimizer_name(self.optimizer, &self.hp)
    }

    pub fn build_problem(&self) -> Result<ProblemInstance> {
        Ok(match self.problem {
            ProblemId::Valley => {
                if self.dim == 2 && self.cond == 100.0 {
                    ProblemInstance::Valley(QuadraticValley::default())
                } else {
                    ProblemInstance::Valley(QuadraticValley::with_condition(self.dim, self.cond).map_err(core_err)?)
                }
            }
            ProblemId::Rosenbrock => ProblemInstance::Rosenbrock(Rosenbrock::new(self.dim).map_err(core_err)?),
            ProblemId::TinyMlp => {
                let data = admeta_core::gen_synthetic_dataset(self.seed, self.samples).map_err(core_err)?;
                let batch = (self.batch_size > 0).then_some(self.batch_size);
                ProblemInstance::TinyMlp(TinyMlp::new(data, self.hidden, batch).map_err(core_err)?)
            }
            ProblemId::Stream => ProblemInstance::Stream(
                OnlineQuadraticStream::new(self.dim, self.steps.max(1) as usize, self.seed).map_err(core_err)?,
            ),
        })
    }

    /// Check everything that can be checked before running.
    pub fn validate(&self) -> Result<()> {
        let report = self.hp.validate();
        if !report.errors.is_empty() {
            return Err(CliError::Config(report.errors.join("; ")));
        }
        for w in &report.warnings {
            log::warn!("{w}");
        }
        if self.seeds == 0 {
            return Err(CliError::Config("seeds must be >= 1".into()));
        }
        if !(self.hit_eps > 0.0) {
            return Err(CliError::Config("hit-eps must be > 0".into()));
        }
        self.build_problem().map(|_| ())
    }
}
