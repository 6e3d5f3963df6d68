//! Multi-seed comparison of several optimizer variants.

use admeta_core::{AblationFlags, HyperParams, OptimizerKind};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::runner::execute;

/// One row of a comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub label: String,
    pub kind: OptimizerKind,
    pub hp: HyperParams,
}

/// Row label for an ablation setting of `kind`.
pub fn ablation_label(kind: OptimizerKind, flags: &AblationFlags) -> String {
    match flags.row_label().as_str() {
        "full" => kind.display_name().to_string(),
        "w/ constant LF" => format!("{} w/ constant LF", kind.display_name()),
        other => other.to_string(),
    }
}

/// The six ablation rows for an Admeta optimizer built from `base`.
pub fn ablation_grid(kind: OptimizerKind, base: &HyperParams) -> Vec<Variant> {
    AblationFlags::table_variants()
        .into_iter()
        .map(|flags| Variant {
            label: ablation_label(kind, &flags),
            kind,
            hp: HyperParams { ablation: flags, ..base.clone() },
        })
        .collect()
}

/// One variant per optimizer kind, all sharing `base`.
pub fn optimizer_grid(kinds: &[OptimizerKind], base: &HyperParams) -> Vec<Variant> {
    kinds
        .iter()
        .map(|&kind| Variant { label: kind.display_name().to_string(), kind, hp: base.clone() })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub label: String,
    pub optimizer: String,
    /// Final loss per seed; `None` marks a failed (diverged) cell.
    pub final_losses: Vec<Option<f64>>,
    pub first_hits: Vec<Option<u64>>,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub problem: String,
    pub steps: u64,
    pub seeds: Vec<u64>,
    pub rows: Vec<CompareRow>,
}

fn mean_sd(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (Some(mean), Some(sd))
}

/// Run every variant for seeds `base.seed .. base.seed + base.seeds` in parallel.
pub fn compare(base: &RunConfig, variants: &[Variant]) -> Result<CompareReport> {
    if variants.is_empty() {
        return Err(CliError::Config("nothing to compare".into()));
    }
    base.validate()?;
    let seeds: Vec<u64> = (0..base.seeds).map(|i| base.seed + i).collect();
    let cells: Vec<(usize, u64)> =
        (0..variants.len()).flat_map(|v| seeds.iter().map(move |&s| (v, s))).collect();

    let results: Vec<Result<(f64, Option<u64>)>> = cells
        .par_iter()
        .map(|&(v, seed)| {
            let cfg = RunConfig {
                optimizer: variants[v].kind,
                hp: variants[v].hp.clone(),
                seed,
                snapshot_stride: 0,
                ..base.clone()
            };
            let out = execute(&cfg)?;
            Ok((out.summary.final_loss, out.summary.first_hit))
        })
        .collect();

    let mut rows = Vec::with_capacity(variants.len());
    for (v, variant) in variants.iter().enumerate() {
        let mut final_losses = Vec::new();
        let mut first_hits = Vec::new();
        let mut failures = Vec::new();
        for (i, &seed) in seeds.iter().enumerate() {
            match &results[v * seeds.len() + i] {
                Ok((loss, hit)) => {
                    final_losses.push(Some(*loss));
                    first_hits.push(*hit);
                }
                Err(e @ CliError::Core(admeta_core::Error::NonFinite { .. })) => {
                    final_losses.push(None);
                    first_hits.push(None);
                    failures.push(format!("seed {seed}: {e}"));
                }
                Err(e) => return Err(CliError::Config(e.to_string())),
            }
        }
        let ok: Vec<f64> = final_losses.iter().flatten().copied().collect();
        let (mean, sd) = mean_sd(&ok);
        rows.push(CompareRow {
            label: variant.label.clone(),
            optimizer: admeta_core::optimizer_name(variant.kind, &variant.hp),
            final_losses,
            first_hits,
            mean,
            sd,
            failures,
        });
    }
    Ok(CompareReport { problem: base.problem.as_str().to_string(), steps: base.steps, seeds, rows })
}

impl CompareReport {
    pub fn row(&self, label: &str) -> Option<&CompareRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    /// Plain-text table; failed cells show as `FAILED`.
    pub fn to_table(&self) -> String {
        let mut s = format!("{:<26} {:>14} {:>12}  per-seed final loss\n", "variant", "mean", "sd");
        for r in &self.rows {
            let fmt = |x: Option<f64>| x.map_or("FAILED".to_string(), |v| format!("{v:.6e}"));
            let cells: Vec<String> = r.final_losses.iter().map(|x| fmt(*x)).collect();
            s.push_str(&format!(
                "{:<26} {:>14} {:>12}  {}\n",
                r.label,
                fmt(r.mean),
                r.sd.map_or("-".to_string(), |v| format!("{v:.2e}")),
                cells.join(" ")
            ));
        }
        s
    }
}
