//! Single runs: drive an optimizer on a problem and record a trace.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use admeta_core::{seeded_rng, Optimizer, Params, Problem, RunTrace, StepRecord};
use rand::RngCore;
use serde::Serialize;

use crate::config::{ProblemInstance, RunConfig};
use crate::error::Result;

/// Stream used for mini-batch sampling, kept apart from the initial-point draw.
const NOISE_STREAM: u64 = 0x5EED_0F_BA7C;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub optimizer: String,
    pub problem: String,
    pub seed: u64,
    pub steps: u64,
    pub initial_loss: f64,
    pub final_loss: f64,
    pub final_grad_norm: f64,
    /// First step inside the `hit_eps` ball around the known optimum.
    pub first_hit: Option<u64>,
    pub hit_eps: f64,
    pub distance_to_optimum: Option<f64>,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub trace: RunTrace,
    pub summary: RunSummary,
    pub final_params: Params,
    pub has_lookahead: bool,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Execute one run as described by `cfg`.
pub fn execute(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let instance = cfg.build_problem()?;
    let start = {
        let mut rng = seeded_rng(cfg.seed);
        instance.as_problem().initial_point(&mut rng)
    };
    execute_from(cfg, &instance, start)
}

/// Execute from a given starting point on an already built problem.
pub fn execute_from(cfg: &RunConfig, instance: &ProblemInstance, start: Params) -> Result<RunOutcome> {
    let clock = Instant::now();
    let problem = instance.as_problem();
    let mut opt = Optimizer::new(cfg.optimizer, cfg.hp.clone(), problem.dim())?;
    if let ProblemInstance::Stream(s) = instance {
        opt = opt.with_bounds(s.bounds().clone());
    }
    let optimum = problem.optimum();
    let mut noise = seeded_rng(cfg.seed);
    noise.set_stream(NOISE_STREAM);

    let mut theta = start.clone();
    let initial_loss = problem.loss(&theta)?;
    let mut trace = RunTrace::new(start, initial_loss);
    let mut first_hit = None;
    let mut last_grad_norm = norm(&problem.grad(&theta)?);

    for t in 1..=cfg.steps {
        let g = sample_grad(instance, &theta, t, &mut noise)?;
        let info = opt.step(&mut theta, &g)?;
        let loss = problem.loss(&theta)?;
        last_grad_norm = norm(&problem.grad(&theta)?);
        if let (None, Some(x)) = (first_hit, &optimum) {
            if dist(&theta, x) < cfg.hit_eps {
                first_hit = Some(t);
            }
        }
        let snap = cfg.snapshot_stride > 0 && t % cfg.snapshot_stride == 0;
        trace.push(StepRecord {
            step: t,
            lr: info.lr,
            loss,
            grad_norm: last_grad_norm,
            eta: info.eta,
            synced: info.synced,
            params: snap.then(|| theta.to_vec()),
        })?;
    }

    let summary = RunSummary {
        optimizer: opt.name(),
        problem: problem.name().to_string(),
        seed: cfg.seed,
        steps: cfg.steps,
        initial_loss,
        final_loss: trace.final_loss(),
        final_grad_norm: last_grad_norm,
        first_hit,
        hit_eps: cfg.hit_eps,
        distance_to_optimum: optimum.as_ref().map(|x| dist(&theta, x)),
        wall_time_secs: clock.elapsed().as_secs_f64(),
    };
    Ok(RunOutcome { trace, summary, final_params: theta, has_lookahead: opt.has_lookahead() })
}

/// Deterministic problems use the exact gradient, TinyMlp a mini-batch and
/// the stream the gradient of round `t`.
fn sample_grad(instance: &ProblemInstance, theta: &[f64], t: u64, rng: &mut dyn RngCore) -> Result<Vec<f64>> {
    Ok(match instance {
        ProblemInstance::Valley(p) => p.grad(theta)?,
        ProblemInstance::Rosenbrock(p) => p.grad(theta)?,
        ProblemInstance::TinyMlp(p) => p.stochastic_grad(theta, rng)?,
        ProblemInstance::Stream(p) => p.round_grad(t, theta)?,
    })
}

/// CSV with `step,lr,loss,grad_norm[,eta],synced,param_0..`; parameter cells
/// are empty on steps without a snapshot.
pub fn write_trace_csv<W: Write>(mut w: W, trace: &RunTrace, with_eta: bool) -> std::io::Result<()> {
    let dim = trace.initial.len();
    write!(w, "step,lr,loss,grad_norm")?;
    if with_eta {
        write!(w, ",eta")?;
    }
    write!(w, ",synced")?;
    for i in 0..dim {
        write!(w, ",param_{i}")?;
    }
    writeln!(w)?;
    for r in trace.records() {
        write!(w, "{},{},{},{}", r.step, r.lr, r.loss, r.grad_norm)?;
        if with_eta {
            match r.eta {
                Some(e) => write!(w, ",{e}")?,
                None => write!(w, ",")?,
            }
        }
        write!(w, ",{}", u8::from(r.synced))?;
        match &r.params {
            Some(p) => p.iter().try_for_each(|x| write!(w, ",{x}"))?,
            None => (0..dim).try_for_each(|_| write!(w, ","))?,
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Write `trace.csv`, `summary.json` and `config.txt` into `dir`.
pub fn write_outputs(dir: &Path, cfg: &RunConfig, outcome: &RunOutcome) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = BufWriter::new(File::create(dir.join("trace.csv"))?);
    write_trace_csv(&mut w, &outcome.trace, outcome.has_lookahead)?;
    w.flush()?;
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&outcome.summary)?)?;
    fs::write(dir.join("config.txt"), cfg.to_kv_string())?;
    Ok(())
}
