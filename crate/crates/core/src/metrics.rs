//! Regret, gradient-norm decay, first-hit times and finite-difference checks.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::problems::{OnlineQuadraticStream, Problem};
use crate::trace::RunTrace;

/// Least-squares fit `y ≈ coefficient * t^exponent` in log-log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub coefficient: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
}

/// Ordinary least squares `y = a + b x`; returns `(a, b, rms residual)`.
fn ols(xs: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    Some((a, b, (rss / n).sqrt()))
}

/// 0-based index where the trailing 90% of a length-`n` series starts.
fn window_start(n: usize) -> usize {
    (n / 10).saturating_sub(1)
}

/// Fit a power law to `series[t-1]` over `t` in the trailing 90% of the
/// series. `None` when any value in the window is non-positive.
pub fn fit_power_law(series: &[f64]) -> Option<PowerFit> {
    let start = window_start(series.len());
    let window = &series[start..];
    if window.iter().any(|y| !(*y > 0.0)) {
        return None;
    }
    let xs: Vec<f64> = (start + 1..=series.len()).map(|t| (t as f64).ln()).collect();
    let ys: Vec<f64> = window.iter().map(|y| y.ln()).collect();
    let (a, b, residual) = ols(&xs, &ys)?;
    Some(PowerFit { exponent: b, coefficient: a.exp(), residual })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    /// `R(T)` for `T = 1..=len`.
    pub series: Vec<f64>,
    /// `None` when the series is not strictly positive over the fit window
    /// (for example a zero-regret trace).
    pub exponent: Option<f64>,
    pub coefficient: Option<f64>,
    pub residual: Option<f64>,
    pub series_length: usize,
}

impl RegretReport {
    pub fn final_regret(&self) -> f64 {
        self.series.last().copied().unwrap_or(0.0)
    }
}

/// Cumulative regret `R(T) = sum_{t<=T} f_t(theta_t) - f_t(comparator)` of the
/// points `played[t-1]` against a fixed comparator.
pub fn regret<P: AsRef<[f64]>>(
    played: &[P],
    stream: &OnlineQuadraticStream,
    comparator: &[f64],
) -> Result<RegretReport> {
    if played.len() != stream.rounds() {
        return Err(Error::DimensionMismatch { expected: stream.rounds(), got: played.len() });
    }
    let mut series = Vec::with_capacity(played.len());
    let mut total = 0.0;
    for (i, theta) in played.iter().enumerate() {
        let t = i as u64 + 1;
        total += stream.round_loss(t, theta.as_ref())? - stream.round_loss(t, comparator)?;
        series.push(total);
    }
    let fit = fit_power_law(&series);
    Ok(RegretReport {
        exponent: fit.map(|f| f.exponent),
        coefficient: fit.map(|f| f.coefficient),
        residual: fit.map(|f| f.residual),
        series_length: series.len(),
        series,
    })
}

/// Smallest 1-based `t` with `||theta_t - target|| < eps`.
pub fn first_hit_time<P: AsRef<[f64]>>(trace: &[P], target: &[f64], eps: f64) -> Option<u64> {
    trace.iter().position(|theta| {
        let d2: f64 = theta.as_ref().iter().zip(target).map(|(a, b)| (a - b).powi(2)).sum();
        d2.sqrt() < eps
    })
    .map(|i| i as u64 + 1)
}

/// Worst coordinate relative error between central differences with step `h`
/// and the analytic gradient, relative to `max(|analytic|, 1e-8)`.
pub fn grad_check(problem: &dyn Problem, theta: &[f64], h: f64) -> Result<f64> {
    check_dim(problem.dim(), theta.len())?;
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("finite-difference step must be > 0".into()));
    }
    let analytic = problem.grad(theta)?;
    let mut x = theta.to_vec();
    let mut worst: f64 = 0.0;
    for i in 0..x.len() {
        let orig = x[i];
        x[i] = orig + h;
        let fp = problem.loss(&x)?;
        x[i] = orig - h;
        let fm = problem.loss(&x)?;
        x[i] = orig;
        let numeric = (fp - fm) / (2.0 * h);
        let err = (numeric - analytic[i]).abs() / analytic[i].abs().max(1e-8);
        worst = worst.max(err);
    }
    Ok(worst)
}

/// Running minimum of `||grad f(theta_t)||^2` and its
/// `(q1 + q2 log t) / sqrt(t)` envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub series: Vec<f64>,
    pub q1: Option<f64>,
    pub q2: Option<f64>,
    pub residual: Option<f64>,
    pub series_length: usize,
}

impl RateReport {
    pub fn final_min(&self) -> f64 {
        self.series.last().copied().unwrap_or(f64::INFINITY)
    }
}

pub fn min_grad_norm_series(trace: &RunTrace, problem: &dyn Problem) -> Result<RateReport> {
    let snapshots = trace.param_series()?;
    let mut series = Vec::with_capacity(snapshots.len());
    let mut best = f64::INFINITY;
    for theta in snapshots {
        let g = problem.grad(theta)?;
        best = best.min(g.iter().map(|x| x * x).sum());
        series.push(best);
    }
    Ok(rate_report(series))
}

/// Envelope fit for an already computed running-minimum series.
pub fn rate_report(series: Vec<f64>) -> RateReport {
    let start = window_start(series.len());
    let xs: Vec<f64> = (start + 1..=series.len()).map(|t| (t as f64).ln()).collect();
    let ys: Vec<f64> = series[start..]
        .iter()
        .zip(start + 1..)
        .map(|(y, t)| y * (t as f64).sqrt())
        .collect();
    let fit = ols(&xs, &ys);
    RateReport {
        q1: fit.map(|f| f.0),
        q2: fit.map(|f| f.1),
        residual: fit.map(|f| f.2),
        series_length: series.len(),
        series,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Params;
    use crate::problems::{seeded_rng, QuadraticValley, Rosenbrock, TinyMlp};
    use crate::trace::StepRecord;

    struct Zero;

    impl Problem for Zero {
        fn name(&self) -> &str {
            "zero"
        }
        fn dim(&self) -> usize {
            3
        }
        fn loss(&self, _: &[f64]) -> Result<f64> {
            Ok(0.0)
        }
        fn grad(&self, _: &[f64]) -> Result<Vec<f64>> {
            Ok(vec![0.0; 3])
        }
        fn initial_point(&self, _: &mut dyn rand::RngCore) -> Params {
            Params::zeros(3)
        }
    }

    #[test]
    fn power_law_recovered() {
        let series: Vec<f64> = (1..=1000).map(|t| 3.0 * (t as f64).powf(0.5)).collect();
        let fit = fit_power_law(&series).unwrap();
        assert!((fit.exponent - 0.5).abs() < 1e-12);
        assert!((fit.coefficient - 3.0).abs() < 1e-9);
        assert!(fit.residual < 1e-12);
        assert!(fit_power_law(&[0.0; 50]).is_none());
    }

    #[test]
    fn comparator_trace_has_zero_regret() {
        let s = OnlineQuadraticStream::new(2, 200, 4).unwrap();
        let c = s.comparator(200).unwrap();
        let played = vec![c.to_vec(); 200];
        let r = regret(&played, &s, &c).unwrap();
        assert!(r.series.iter().all(|&x| x == 0.0));
        assert!(r.exponent.is_none());
    }

    #[test]
    fn frozen_suboptimal_point_is_linear() {
        let s = OnlineQuadraticStream::new(2, 2000, 4).unwrap();
        let c = s.comparator(2000).unwrap();
        let frozen: Vec<f64> = c.iter().map(|x| if *x > 0.0 { x - 0.8 } else { x + 0.8 }).collect();
        let played = vec![frozen; 2000];
        let r = regret(&played, &s, &c).unwrap();
        assert!((r.exponent.unwrap() - 1.0).abs() < 0.05, "{:?}", r.exponent);
    }

    #[test]
    fn regret_length_mismatch() {
        let s = OnlineQuadraticStream::new(2, 10, 4).unwrap();
        assert!(regret(&vec![vec![0.0, 0.0]; 9], &s, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn hit_times() {
        let trace = vec![vec![0.005, 0.0], vec![1.0, 1.0]];
        assert_eq!(first_hit_time(&trace, &[0.0, 0.0], 0.01), Some(1));
        let far = vec![vec![5.0, 5.0]; 10];
        assert_eq!(first_hit_time(&far, &[0.0, 0.0], 0.01), None);
        let approach: Vec<Vec<f64>> = (0..20).map(|k| vec![1.0 / (k + 1) as f64]).collect();
        let mut prev = u64::MAX;
        for eps in [0.06, 0.1, 0.2, 0.5, 2.0] {
            let t = first_hit_time(&approach, &[0.0], eps).unwrap();
            assert!(t <= prev);
            prev = t;
        }
    }

    #[test]
    fn gradient_checks() {
        let mut rng = seeded_rng(0);
        let valley = QuadraticValley::default();
        let theta = valley.initial_point(&mut rng);
        assert!(grad_check(&valley, &theta, 1e-6).unwrap() < 1e-7);
        assert_eq!(grad_check(&Zero, &[1.0, 2.0, 3.0], 1e-6).unwrap(), 0.0);
        let mlp = TinyMlp::standard(1).unwrap();
        let theta = mlp.random_point(&mut rng);
        assert!(grad_check(&mlp, &theta, 1e-6).unwrap() < 1e-4);
        assert!(grad_check(&valley, &[0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn central_difference_is_second_order() {
        let r = Rosenbrock::default();
        let theta = [0.7, -0.3];
        let e4 = grad_check(&r, &theta, 1e-4).unwrap();
        let e5 = grad_check(&r, &theta, 1e-5).unwrap();
        let ratio = e4 / e5;
        assert!(ratio > 20.0 && ratio < 500.0, "ratio {ratio}");
    }

    #[test]
    fn running_min_is_monotone() {
        let r = Rosenbrock::default();
        let mut trace = RunTrace::new(Params::from(vec![0.0, 0.0]), 1.0);
        for (i, p) in [[0.0, 0.0], [1.0, 1.0], [0.5, 0.1], [1.0, 1.0]].iter().enumerate() {
            trace
                .push(StepRecord {
                    step: i as u64 + 1,
                    lr: 0.1,
                    loss: 0.0,
                    grad_norm: 0.0,
                    eta: None,
                    synced: false,
                    params: Some(p.to_vec()),
                })
                .unwrap();
        }
        let rep = min_grad_norm_series(&trace, &r).unwrap();
        assert_eq!(rep.series[1], 0.0);
        assert!(rep.series.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn missing_snapshots_rejected() {
        let mut trace = RunTrace::new(Params::from(vec![0.0, 0.0]), 1.0);
        trace
            .push(StepRecord { step: 1, lr: 0.1, loss: 0.0, grad_norm: 0.0, eta: None, synced: false, params: None })
            .unwrap();
        assert_eq!(min_grad_norm_series(&trace, &Rosenbrock::default()), Err(Error::MissingSnapshots));
    }
}
