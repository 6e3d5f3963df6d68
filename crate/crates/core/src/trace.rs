//! Per-step run records.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Params;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based step index.
    pub step: u64,
    pub lr: f64,
    /// Objective at the parameters after this step.
    pub loss: f64,
    /// Euclidean norm of the full gradient after this step.
    pub grad_norm: f64,
    pub eta: Option<f64>,
    pub synced: bool,
    pub params: Option<Vec<f64>>,
}

/// An ordered sequence of [`StepRecord`]s plus the starting point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub initial: Params,
    pub initial_loss: f64,
    records: Vec<StepRecord>,
}

impl RunTrace {
    pub fn new(initial: Params, initial_loss: f64) -> Self {
        Self { initial, initial_loss, records: Vec::new() }
    }

    /// Append a record; steps must be consecutive starting at 1.
    pub fn push(&mut self, record: StepRecord) -> Result<()> {
        let expected = self.records.len() as u64 + 1;
        if record.step != expected {
            return Err(Error::InvalidArgument(format!(
                "trace step {} out of order, expected {expected}",
                record.step
            )));
        }
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[StepRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn final_loss(&self) -> f64 {
        self.records.last().map_or(self.initial_loss, |r| r.loss)
    }

    /// Parameter snapshots of every step, or an error if any is missing.
    pub fn param_series(&self) -> Result<Vec<&[f64]>> {
        self.records
            .iter()
            .map(|r| r.params.as_deref().ok_or(Error::MissingSnapshots))
            .collect()
    }
}
