use rand::{Rng, RngCore};
use rand_distr::{Distribution, Normal};

use super::{check_theta, seeded_rng, Problem};
use crate::error::{Error, Result};
use crate::params::{BoxConstraint, Params};

/// A seeded sequence of convex diagonal quadratics
/// `f_t(theta) = sum_i 1/2 a_ti theta_i^2 + b_ti theta_i` on the box `[-1, 1]^d`.
///
/// As a static problem it is the average of all rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct OnlineQuadraticStream {
    dim: usize,
    seed: u64,
    /// Row-major `rounds x dim`.
    curv: Vec<f64>,
    lin: Vec<f64>,
    bounds: BoxConstraint,
}

impl OnlineQuadraticStream {
    pub const NOISE: f64 = 0.5;

    pub fn new(dim: usize, rounds: usize, seed: u64) -> Result<Self> {
        if dim == 0 || rounds == 0 {
            return Err(Error::InvalidArgument("stream needs dim >= 1 and rounds >= 1".into()));
        }
        let mut rng = seeded_rng(seed);
        let centers: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let noise = Normal::new(0.0, Self::NOISE).expect("valid normal");
        let mut curv = Vec::with_capacity(rounds * dim);
        let mut lin = Vec::with_capacity(rounds * dim);
        for _ in 0..rounds {
            for c in &centers {
                let a: f64 = rng.gen_range(0.5..2.0);
                let z = c + noise.sample(&mut rng);
                curv.push(a);
                lin.push(-a * z);
            }
        }
        Ok(Self { dim, seed, curv, lin, bounds: BoxConstraint::uniform(dim, -1.0, 1.0)? })
    }

    pub fn rounds(&self) -> usize {
        self.curv.len() / self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn bounds(&self) -> &BoxConstraint {
        &self.bounds
    }

    fn row(&self, t: u64) -> Result<usize> {
        if t == 0 {
            return Err(Error::InvalidArgument("rounds are 1-based".into()));
        }
        Ok(((t - 1) as usize % self.rounds()) * self.dim)
    }

    /// `f_t(theta)`; rounds past the end wrap around.
    pub fn round_loss(&self, t: u64, theta: &[f64]) -> Result<f64> {
        check_theta(self, theta)?;
        let r = self.row(t)?;
        Ok((0..self.dim)
            .map(|i| 0.5 * self.curv[r + i] * theta[i] * theta[i] + self.lin[r + i] * theta[i])
            .sum())
    }

    pub fn round_grad(&self, t: u64, theta: &[f64]) -> Result<Vec<f64>> {
        check_theta(self, theta)?;
        let r = self.row(t)?;
        Ok((0..self.dim).map(|i| self.curv[r + i] * theta[i] + self.lin[r + i]).collect())
    }

    /// `argmin_{theta in box} sum_{t <= horizon} f_t(theta)`, exact per coordinate.
    pub fn comparator(&self, horizon: usize) -> Result<Params> {
        if horizon == 0 || horizon > self.rounds() {
            return Err(Error::InvalidArgument(format!("horizon {horizon} outside 1..={}", self.rounds())));
        }
        let mut sa = vec![0.0; self.dim];
        let mut sb = vec![0.0; self.dim];
        for r in 0..horizon {
            for i in 0..self.dim {
                sa[i] += self.curv[r * self.dim + i];
                sb[i] += self.lin[r * self.dim + i];
            }
        }
        let mut x: Vec<f64> = sa.iter().zip(&sb).map(|(a, b)| -b / a).collect();
        self.bounds.clamp_in_place(&mut x)?;
        Ok(Params::from(x))
    }
}

impl Problem for OnlineQuadraticStream {
    fn name(&self) -> &str {
        "stream"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn loss(&self, theta: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for t in 1..=self.rounds() as u64 {
            total += self.round_loss(t, theta)?;
        }
        Ok(total / self.rounds() as f64)
    }

    fn grad(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let mut g = vec![0.0; self.dim];
        for t in 1..=self.rounds() as u64 {
            for (gi, ri) in g.iter_mut().zip(self.round_grad(t, theta)?) {
                *gi += ri;
            }
        }
        g.iter_mut().for_each(|x| *x /= self.rounds() as f64);
        Ok(g)
    }

    /// Gradient of one uniformly drawn round.
    fn stochastic_grad(&self, theta: &[f64], rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        let t = rng.gen_range(1..=self.rounds() as u64);
        self.round_grad(t, theta)
    }

    fn optimum(&self) -> Option<Params> {
        self.comparator(self.rounds()).ok()
    }

    fn initial_point(&self, rng: &mut dyn RngCore) -> Params {
        Params::from((0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>())
    }
}
