use std::path::PathBuf;
use std::process::ExitCode;

use admeta_cli::{
    ablation_grid, compare, execute, optimizer_grid, run_demo, run_gradcheck, write_demo, write_outputs,
    CliError, DemoConfig, Result, RunConfig,
};
use admeta_core::{presets, OptimizerKind};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "admeta", version, about = "Run and compare Admeta optimizers on small problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one optimizer and write trace.csv, summary.json and config.txt.
    Run(RunArgs),
    /// Multi-seed comparison: the ablation grid or a list of optimizers.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        /// Comma list of optimizers to compare instead of the ablation grid.
        #[arg(long, value_delimiter = ',')]
        optimizers: Option<Vec<String>>,
    },
    /// EMA versus DEMA momentum on the 2-D valley.
    DemoEmaDema {
        #[arg(long, default_value_t = 2000)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = admeta_cli::demo::DEFAULT_BETA)]
        beta: f64,
        #[arg(long, default_value_t = 0.9)]
        lambda: f64,
        #[arg(long, default_value_t = 0.01)]
        hit_eps: f64,
        #[arg(long, value_delimiter = ',')]
        lr_grid: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite-difference gradient check; exits 1 when the error exceeds the threshold.
    Gradcheck {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        dim: Option<String>,
        /// TinyMlp dataset size.
        #[arg(long)]
        samples: Option<String>,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 1e-6)]
        h: f64,
        #[arg(long, default_value_t = admeta_cli::gradcheck::DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List the built-in hyperparameter presets.
    Presets,
}

/// Flags shared by `run` and `compare`; each maps to one config key.
#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    optimizer: Option<String>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    lr: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    beta1: Option<String>,
    #[arg(long)]
    beta2: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    k: Option<String>,
    /// `dyn05`, `dyn08` or `const:<eta>`.
    #[arg(long)]
    eta_schedule: Option<String>,
    #[arg(long)]
    slow_init: Option<String>,
    /// Comma list of `dema`, `lb`, `lf`, `const-lf`.
    #[arg(long)]
    ablate: Option<String>,
    /// `always` or `tractable-only`.
    #[arg(long)]
    v_update: Option<String>,
    #[arg(long)]
    nesterov: Option<String>,
    #[arg(long)]
    weight_decay: Option<String>,
    /// `constant`, `inv-sqrt` or `milestone:80,120@0.1`.
    #[arg(long)]
    lr_schedule: Option<String>,
    #[arg(long)]
    dim: Option<String>,
    #[arg(long)]
    cond: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    hidden: Option<String>,
    #[arg(long)]
    batch_size: Option<String>,
    #[arg(long)]
    snapshot_stride: Option<String>,
    #[arg(long)]
    hit_eps: Option<String>,
    #[arg(long)]
    out: Option<String>,
}

impl RunArgs {
    /// `base` pairs come first, then the config file, then explicit flags.
    fn into_config(self, base: &[(&str, &str)]) -> Result<RunConfig> {
        let mut pairs: Vec<(String, String)> = base.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        if let Some(path) = &self.config {
            pairs.extend(RunConfig::parse_kv(&std::fs::read_to_string(path)?)?);
        }
        let flags = [
            ("problem", self.problem),
            ("optimizer", self.optimizer),
            ("preset", self.preset),
            ("steps", self.steps),
            ("seed", self.seed),
            ("seeds", self.seeds),
            ("lr", self.lr),
            ("lambda", self.lambda),
            ("beta", self.beta),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("eps", self.eps),
            ("k", self.k),
            ("eta-schedule", self.eta_schedule),
            ("slow-init", self.slow_init),
            ("ablate", self.ablate),
            ("v-update", self.v_update),
            ("nesterov", self.nesterov),
            ("weight-decay", self.weight_decay),
            ("lr-schedule", self.lr_schedule),
            ("dim", self.dim),
            ("cond", self.cond),
            ("samples", self.samples),
            ("hidden", self.hidden),
            ("batch-size", self.batch_size),
            ("snapshot-stride", self.snapshot_stride),
            ("hit-eps", self.hit_eps),
            ("out", self.out),
        ];
        pairs.extend(flags.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))));
        RunConfig::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run(args) => {
            let cfg = args.into_config(&[])?;
            let out = execute(&cfg)?;
            if let Some(dir) = &cfg.out {
                write_outputs(dir, &cfg, &out)?;
            }
            println!("{}", serde_json::to_string_pretty(&out.summary)?);
        }
        Command::Compare { run, optimizers } => {
            let cfg = run.into_config(&[("seeds", "5")])?;
            let variants = match optimizers {
                Some(list) => {
                    let kinds = list
                        .iter()
                        .map(|s| s.parse::<OptimizerKind>())
                        .collect::<admeta_core::Result<Vec<_>>>()
                        .map_err(|e| CliError::Config(e.to_string()))?;
                    optimizer_grid(&kinds, &cfg.hp)
                }
                None if cfg.optimizer.is_admeta() => ablation_grid(cfg.optimizer, &cfg.hp),
                None => {
                    return Err(CliError::Config("the ablation grid needs an Admeta optimizer".into()));
                }
            };
            let report = compare(&cfg, &variants)?;
            print!("{}", report.to_table());
            if let Some(dir) = &cfg.out {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join("compare.json"), serde_json::to_string_pretty(&report)?)?;
            }
        }
        Command::DemoEmaDema { steps, seed, beta, lambda, hit_eps, lr_grid, out } => {
            let mut cfg = DemoConfig { steps, seed, beta, lambda, hit_eps, ..DemoConfig::default() };
            if let Some(grid) = lr_grid {
                cfg.lr_grid = grid;
            }
            let outcome = run_demo(&cfg)?;
            if let Some(dir) = &out {
                write_demo(dir, &outcome)?;
            }
            println!("{}", serde_json::to_string_pretty(&outcome.verdict)?);
        }
        Command::Gradcheck { problem, dim, samples, points, h, threshold, seed } => {
            let mut pairs = vec![("problem", problem.as_str())];
            if let Some(d) = &dim {
                pairs.push(("dim", d.as_str()));
            }
            if let Some(n) = &samples {
                pairs.push(("samples", n.as_str()));
            }
            let mut cfg = RunConfig::from_pairs(pairs)?;
            cfg.seed = seed;
            let report = run_gradcheck(&cfg, points, h, threshold)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            if !report.passed {
                return Err(CliError::Threshold(format!(
                    "max relative error {:.3e} >= {threshold:.1e}",
                    report.max_error
                )));
            }
        }
        Command::Presets => {
            for p in presets() {
                println!("{:<30} {:<8} lr={:<8} {}", p.name, p.kind.display_name(), p.hp.alpha, p.note);
            }
        }
    }
    Ok(())
}
