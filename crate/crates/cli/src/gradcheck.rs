//! Finite-difference gradient checks over random points.

use admeta_core::{grad_check, seeded_rng};
use serde::Serialize;

use crate::config::{ProblemInstance, RunConfig};
use crate::error::Result;

pub const DEFAULT_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradCheckReport {
    pub problem: String,
    pub points: usize,
    pub step: f64,
    pub max_error: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Check `points` random points of the problem described by `cfg`.
pub fn run_gradcheck(cfg: &RunConfig, points: usize, h: f64, threshold: f64) -> Result<GradCheckReport> {
    let instance: ProblemInstance = cfg.build_problem()?;
    let problem = instance.as_problem();
    let mut rng = seeded_rng(cfg.seed);
    let mut max_error: f64 = 0.0;
    for _ in 0..points {
        let theta = problem.random_point(&mut rng);
        max_error = max_error.max(grad_check(problem, &theta, h)?);
    }
    Ok(GradCheckReport {
        problem: problem.name().to_string(),
        points,
        step: h,
        max_error,
        threshold,
        passed: max_error < threshold,
    })
}
