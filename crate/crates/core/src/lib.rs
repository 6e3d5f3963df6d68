//! Admeta optimizers (AdmetaS, AdmetaR) with their DEMA backward-looking
//! transform and dynamic lookahead, the SGD/SGDM/Adam/RAdam baselines, small
//! test problems and the metrics used to check convergence behaviour.

pub mod dema;
pub mod error;
pub mod hyper;
pub mod lookahead;
pub mod metrics;
pub mod optim;
pub mod params;
pub mod presets;
pub mod problems;
pub mod schedule;
pub mod trace;

pub use dema::{dema_coeffs, steady_state_gain, DemaCoeffs, DemaState};
pub use error::{Error, Result};
pub use hyper::{validate_hyperparams, AblationFlags, HyperParams, ValidationReport, VUpdatePolicy};
pub use lookahead::{EtaSchedule, LookaheadState, SlowInit};
pub use metrics::{
    first_hit_time, fit_power_law, grad_check, min_grad_norm_series, regret, PowerFit, RateReport,
    RegretReport,
};
pub use optim::{make_optimizer, optimizer_name, Optimizer, OptimizerKind, StepInfo};
pub use params::{project, BoxConstraint, Params};
pub use presets::{preset, presets, Preset};
pub use problems::{
    gen_synthetic_dataset, seeded_rng, Dataset, OnlineQuadraticStream, Problem, QuadraticValley,
    Rosenbrock, SeededRng, TinyMlp,
};
pub use schedule::LrSchedule;
pub use trace::{RunTrace, StepRecord};
