//! Experiment runner for the Admeta optimizers: single runs, multi-seed
//! comparisons, the EMA/DEMA demo and gradient checks.

pub mod compare;
pub mod config;
pub mod demo;
pub mod error;
pub mod gradcheck;
pub mod runner;

pub use compare::{ablation_grid, compare, optimizer_grid, CompareReport, CompareRow, Variant};
pub use config::{ProblemId, ProblemInstance, RunConfig};
pub use demo::{run_demo, write_demo, DemoConfig, DemoOutcome, Verdict};
pub use error::{CliError, Result};
pub use gradcheck::{run_gradcheck, GradCheckReport};
pub use runner::{execute, execute_from, write_outputs, write_trace_csv, RunOutcome, RunSummary};
