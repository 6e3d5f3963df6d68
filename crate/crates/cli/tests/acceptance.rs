//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

use std::fs;
use std::time::{Duration, Instant};

use admeta_cli::{ablation_grid, compare, execute, run_demo, write_outputs, DemoConfig, RunConfig};
use admeta_core::optim::{rectifier, rho_inf, rho_t, RadamState};
use admeta_core::{
    dema_coeffs, gen_synthetic_dataset, grad_check, min_grad_norm_series, regret, seeded_rng, AblationFlags, DemaState, EtaSchedule,
    HyperParams, LrSchedule, OnlineQuadraticStream, Optimizer, OptimizerKind, Params, Problem, TinyMlp,
    VUpdatePolicy,
};
use rand::Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn c1_coefficients() -> Check {
    let mut rng = seeded_rng(11);
    let mut worst_coef: f64 = 0.0;
    let mut worst_gain: f64 = 0.0;
    for _ in 0..10_000 {
        let lam: f64 = rng.gen_range(1e-6..1.0 - 1e-6);
        let c = dema_coeffs(lam).map_err(|e| e.to_string())?;
        let kappa = 10.0 / lam - 9.0;
        let mu = 25.0 - 10.0 * (lam + 1.0 / lam);
        worst_coef = worst_coef
            .max(((c.kappa - kappa) / kappa.abs().max(f64::MIN_POSITIVE)).abs())
            .max(((c.mu - mu) / mu.abs().max(f64::MIN_POSITIVE)).abs());
        let gain = c.kappa + c.mu / (1.0 - lam);
        let want = (6.0 - lam) / (1.0 - lam);
        worst_gain = worst_gain.max(((gain - want) / want).abs());
    }
    ensure(worst_coef <= 1e-12, format!("coefficient rel err {worst_coef:.2e}"))?;
    ensure(worst_gain <= 1e-10, format!("gain identity rel err {worst_gain:.2e}"))?;
    Ok(format!("max rel err coeffs {worst_coef:.1e}, gain {worst_gain:.1e}"))
}

fn c2_steady_state_gain() -> Check {
    let mut d = DemaState::new(1, 0.9).map_err(|e| e.to_string())?;
    let mut h = 0.0;
    for _ in 0..2000 {
        h = d.step(&[1.0]).map_err(|e| e.to_string())?[0];
    }
    ensure(((h - 51.0) / 51.0).abs() < 0.01, format!("h/g = {h}"))?;
    Ok(format!("h/g = {h:.6} at step 2000"))
}

fn collapse(kind: OptimizerKind, ablated: HyperParams, base: OptimizerKind, plain: HyperParams) -> Result<f64, String> {
    let mlp = TinyMlp::standard(3).map_err(|e| e.to_string())?;
    let start = mlp.initial_point(&mut seeded_rng(4));
    let mut a = Optimizer::new(kind, ablated, mlp.dim()).map_err(|e| e.to_string())?;
    let mut b = Optimizer::new(base, plain, mlp.dim()).map_err(|e| e.to_string())?;
    let (mut ta, mut tb) = (start.clone(), start);
    let (mut ra, mut rb) = (seeded_rng(5), seeded_rng(5));
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let ga = mlp.stochastic_grad(&ta, &mut ra).map_err(|e| e.to_string())?;
        let gb = mlp.stochastic_grad(&tb, &mut rb).map_err(|e| e.to_string())?;
        a.step(&mut ta, &ga).map_err(|e| e.to_string())?;
        b.step(&mut tb, &gb).map_err(|e| e.to_string())?;
        for (x, y) in ta.iter().zip(tb.iter()) {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(worst)
}

fn c3_baseline_collapse() -> Check {
    let flags = AblationFlags { use_dema: false, use_forward: false, ..AblationFlags::FULL };
    let hp = HyperParams { alpha: 0.05, ablation: flags, ..HyperParams::default() };
    let s = collapse(OptimizerKind::AdmetaS, hp.clone(), OptimizerKind::Sgdm, HyperParams { alpha: 0.05, ..HyperParams::default() })?;
    let hp_r = HyperParams { alpha: 0.01, v_update_policy: VUpdatePolicy::Always, ..hp };
    let r = collapse(OptimizerKind::AdmetaR, hp_r, OptimizerKind::Radam, HyperParams { alpha: 0.01, ..HyperParams::default() })?;
    ensure(s <= 1e-12, format!("AdmetaS vs SGDM max diff {s:.2e}"))?;
    ensure(r <= 1e-12, format!("AdmetaR vs RAdam max diff {r:.2e}"))?;
    Ok(format!("max abs diff SGDM {s:.1e}, RAdam {r:.1e} over 500 steps"))
}

fn c4_radam_branch() -> Check {
    let beta2 = 0.999;
    let mut st = RadamState::new(1, beta2);
    let mut theta = [0.0];
    let mut unadapted = Vec::new();
    let mut worst_r = (f64::INFINITY, f64::NEG_INFINITY);
    for t in 1..=10_000u64 {
        let info = st.step(&mut theta, &[1.0], 1e-3, 0.9, beta2, 1e-8).map_err(|e| e.to_string())?;
        match info.rectifier {
            None => unadapted.push(t),
            Some(r) => worst_r = (worst_r.0.min(r), worst_r.1.max(r)),
        }
    }
    let r_big = rectifier(rho_t(beta2, 1_000_000), rho_inf(beta2))
        .ok_or("no rectifier at t=1e6")?;
    ensure(unadapted == [1, 2, 3], format!("un-adapted steps {unadapted:?}, expected [1, 2, 3]"))?;
    ensure(worst_r.0 > 0.0 && worst_r.1 < 1.0, format!("r_t range {worst_r:?}"))?;
    ensure((r_big - 1.0).abs() < 1e-3, format!("r_t(1e6) = {r_big}"))?;
    Ok(format!("un-adapted {unadapted:?}, r_t in [{:.3e}, {:.6}], r_t(1e6) = {r_big}", worst_r.0, worst_r.1))
}

fn c5_lookahead_schedules() -> Check {
    let (d5, d8) = (EtaSchedule::Dyn05, EtaSchedule::Dyn08);
    ensure(d5.eta_at(0) == 1.0, format!("Dyn05(0) = {}", d5.eta_at(0)))?;
    ensure(d8.eta_at(4) == 1.0, format!("Dyn08(4) = {}", d8.eta_at(4)))?;
    for s in [d5, d8] {
        let mut prev = s.eta_at(4);
        for t in 5..=100_000u64 {
            let e = s.eta_at(t);
            ensure(e < prev, format!("{s} not strictly decreasing at t={t}"))?;
            prev = e;
        }
    }
    let (e5, e8) = (d5.eta_at(100_000_000), d8.eta_at(100_000_000));
    ensure((e8 - 0.8).abs() < 1e-3, format!("|Dyn08(1e8) - 0.8| = {:.3e}", (e8 - 0.8).abs()))?;
    ensure((e5 - 0.5).abs() < 1e-3, format!("|Dyn05(1e8) - 0.5| = {:.3e}", (e5 - 0.5).abs()))?;
    Ok(format!("Dyn05(1e8) = {e5:.6}, Dyn08(1e8) = {e8:.6}"))
}

/// Regret exponent of one online run with `alpha / sqrt(t)` steps.
fn regret_exponent(kind: OptimizerKind, hp: &HyperParams, seed: u64, rounds: usize) -> Result<Option<f64>, String> {
    let stream = OnlineQuadraticStream::new(2, rounds, seed).map_err(|e| e.to_string())?;
    let mut opt = Optimizer::new(kind, hp.clone(), 2).map_err(|e| e.to_string())?.with_bounds(stream.bounds().clone());
    let mut theta = Params::zeros(2);
    let mut played = Vec::with_capacity(rounds);
    for t in 1..=rounds as u64 {
        played.push(theta.to_vec());
        let g = stream.round_grad(t, &theta).map_err(|e| e.to_string())?;
        opt.step(&mut theta, &g).map_err(|e| e.to_string())?;
    }
    let comparator = stream.comparator(rounds).map_err(|e| e.to_string())?;
    Ok(regret(&played, &stream, &comparator).map_err(|e| e.to_string())?.exponent)
}

fn c6_regret() -> Check {
    let mut lines = Vec::new();
    let mut ok = true;
    for (kind, beta) in [(OptimizerKind::AdmetaS, 0.2), (OptimizerKind::AdmetaR, HyperParams::default().beta)] {
        let hp = HyperParams { alpha: 0.03, beta, lr_schedule: LrSchedule::InverseSqrt, ..HyperParams::default() };
        let ps = (0..5u64).map(|s| regret_exponent(kind, &hp, s, 5000)).collect::<Result<Vec<_>, _>>()?;
        let good = ps.iter().filter(|p| p.is_some_and(|p| p <= 0.75)).count();
        ok &= good >= 4;
        let shown: Vec<String> = ps.iter().map(|p| p.map_or("none".into(), |p| format!("{p:.3}"))).collect();
        lines.push(format!("{} p = [{}] ({good}/5 <= 0.75)", kind.display_name(), shown.join(", ")));
    }
    ensure(ok, lines.join("; "))?;
    Ok(lines.join("; "))
}

fn c7_rosenbrock() -> Check {
    let cfg = RunConfig::from_pairs([
        ("problem", "rosenbrock"),
        ("dim", "2"),
        ("optimizer", "admetas"),
        ("beta", "0.2"),
        ("lr", "1e-4"),
        ("steps", "20000"),
        ("snapshot-stride", "1"),
    ])
    .map_err(|e| e.to_string())?;
    let out = execute(&cfg).map_err(|e| e.to_string())?;
    let problem = cfg.build_problem().map_err(|e| e.to_string())?;
    let report = min_grad_norm_series(&out.trace, problem.as_problem()).map_err(|e| e.to_string())?;
    ensure(report.series.windows(2).all(|w| w[1] <= w[0]), "running minimum increased")?;
    let last = report.final_min();
    ensure(last < 1e-2, format!("min ||grad||^2 = {last:.3e}"))?;
    Ok(format!("min ||grad||^2 = {last:.3e} after 2e4 steps"))
}

fn c8_demo() -> Check {
    let mut lines = Vec::new();
    let mut wins = 0;
    for seed in 0..5 {
        let out = run_demo(&DemoConfig { seed, ..DemoConfig::default() }).map_err(|e| e.to_string())?;
        let v = &out.verdict;
        if v.dema_not_slower == Some(true) {
            wins += 1;
        }
        lines.push(format!("seed {seed}: DEMA {:?} vs EMA {:?}", v.dema.first_hit, v.ema.first_hit));
    }
    ensure(wins == 5, format!("{wins}/5; {}", lines.join("; ")))?;
    Ok(format!("5/5; {}", lines.join("; ")))
}

fn c9_gradcheck() -> Check {
    // 250 samples keep 16k full-batch loss evaluations inside the time budget
    // on one core; the network is the standard 2-16-2 one.
    let data = gen_synthetic_dataset(0, 250).map_err(|e| e.to_string())?;
    let mlp = TinyMlp::new(data, 16, Some(32)).map_err(|e| e.to_string())?;
    let mut rng = seeded_rng(9);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let theta = mlp.random_point(&mut rng);
        worst = worst.max(grad_check(&mlp, &theta, 1e-6).map_err(|e| e.to_string())?);
    }
    ensure(worst < 1e-4, format!("max rel err {worst:.3e}"))?;
    Ok(format!("max rel err {worst:.2e} over 100 points"))
}

fn c10_determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut traces = Vec::new();
    for (problem, optimizer) in [("tinymlp", "admetar"), ("tinymlp", "admetas"), ("stream", "admetar"), ("rosenbrock", "adam")] {
        let mut files = Vec::new();
        for rep in 0..2 {
            let cfg = RunConfig::from_pairs([
                ("problem", problem),
                ("optimizer", optimizer),
                ("lr", "0.001"),
                ("steps", "200"),
                ("seed", "17"),
                ("snapshot-stride", "7"),
            ])
            .map_err(|e| e.to_string())?;
            let out_dir = dir.path().join(format!("{problem}-{optimizer}-{rep}"));
            let out = execute(&cfg).map_err(|e| e.to_string())?;
            write_outputs(&out_dir, &cfg, &out).map_err(|e| e.to_string())?;
            files.push(fs::read(out_dir.join("trace.csv")).map_err(|e| e.to_string())?);
        }
        ensure(files[0] == files[1], format!("{problem}/{optimizer} traces differ"))?;
        traces.push(format!("{problem}/{optimizer}"));
    }
    Ok(format!("byte-identical traces for {}", traces.join(", ")))
}

fn c11_ablation_grid() -> Check {
    let base = RunConfig::from_pairs([
        ("preset", "admetas-cifar10-resnet"),
        ("problem", "valley"),
        ("steps", "2000"),
        ("seeds", "5"),
    ])
    .map_err(|e| e.to_string())?;
    let variants = ablation_grid(OptimizerKind::AdmetaS, &base.hp);
    let report = compare(&base, &variants).map_err(|e| e.to_string())?;
    let labels: Vec<&str> = report.rows.iter().map(|r| r.label.as_str()).collect();
    let want = ["AdmetaS", "-DEMA", "-LB", "-LF", "-LB-LF", "AdmetaS w/ constant LF"];
    ensure(labels == want, format!("labels {labels:?}"))?;
    let full = &report.rows[0];
    // A diverged full run never wins; a diverged ablated run loses to any finite full run.
    let wins = (0..report.seeds.len())
        .filter(|&i| {
            full.final_losses[i].is_some_and(|f| {
                report.rows[1..].iter().all(|r| r.final_losses[i].map_or(true, |l| f <= l))
            })
        })
        .count();
    let failed: usize = report.rows.iter().map(|r| r.failures.len()).sum();
    ensure(wins >= 3, format!("full variant best in {wins}/5 seeds; {failed}/30 runs diverged"))?;
    Ok(format!("six labels present; full variant best in {wins}/5 seeds"))
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 11] = [
        ("coefficient identities", c1_coefficients, Duration::from_secs(1)),
        ("steady-state gain", c2_steady_state_gain, Duration::from_secs(1)),
        ("baseline-collapse oracles", c3_baseline_collapse, Duration::from_secs(5)),
        ("RAdam branch check", c4_radam_branch, Duration::from_secs(1)),
        ("dynamic lookahead schedules", c5_lookahead_schedules, Duration::from_secs(1)),
        ("regret sublinearity", c6_regret, Duration::from_secs(30)),
        ("non-convex decay", c7_rosenbrock, Duration::from_secs(10)),
        ("EMA vs DEMA demo", c8_demo, Duration::from_secs(10)),
        ("gradient oracle", c9_gradcheck, Duration::from_secs(5)),
        ("determinism", c10_determinism, Duration::from_secs(5)),
        ("ablation grid", c11_ablation_grid, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let clock = Instant::now();
        let result = check();
        let took = clock.elapsed();
        let result = match result {
            Ok(msg) if took > *limit => Err(format!("{msg}; took {took:?} > {limit:?}")),
            other => other,
        };
        match result {
            Ok(msg) => println!("[PASS] criterion {:>2} {name}: {msg} ({took:.2?})", i + 1),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] criterion {:>2} {name}: {msg} ({took:.2?})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
