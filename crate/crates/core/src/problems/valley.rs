use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};

use super::{check_theta, Problem};
use crate::error::{Error, Result};
use crate::params::Params;

/// `f(theta) = 1/2 sum a_i theta_i^2` with positive curvatures `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticValley {
    diag: Vec<f64>,
}

impl Default for QuadraticValley {
    /// Two dimensions, condition number 100.
    fn default() -> Self {
        Self { diag: vec![1.0, 100.0] }
    }
}

impl QuadraticValley {
    pub fn new(diag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || diag.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(Error::InvalidArgument("valley curvatures must be positive".into()));
        }
        Ok(Self { diag })
    }

    /// Curvatures spaced geometrically from 1 to `condition`.
    pub fn with_condition(dim: usize, condition: f64) -> Result<Self> {
        if dim == 0 || !(condition >= 1.0) {
            return Err(Error::InvalidArgument("need dim >= 1 and condition >= 1".into()));
        }
        let diag = (0..dim)
            .map(|i| if dim == 1 { 1.0 } else { condition.powf(i as f64 / (dim - 1) as f64) })
            .collect();
        Self::new(diag)
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn condition_number(&self) -> f64 {
        let max = self.diag.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.diag.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }
}

impl Problem for QuadraticValley {
    fn name(&self) -> &str {
        "valley"
    }

    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn loss(&self, theta: &[f64]) -> Result<f64> {
        check_theta(self, theta)?;
        Ok(0.5 * self.diag.iter().zip(theta).map(|(a, x)| a * x * x).sum::<f64>())
    }

    fn grad(&self, theta: &[f64]) -> Result<Vec<f64>> {
        check_theta(self, theta)?;
        Ok(self.diag.iter().zip(theta).map(|(a, x)| a * x).collect())
    }

    fn optimum(&self) -> Option<Params> {
        Some(Params::zeros(self.dim()))
    }

    /// Uniform direction, radius uniform in `[1, 2]`.
    fn initial_point(&self, rng: &mut dyn RngCore) -> Params {
        let mut dir: Vec<f64> = (0..self.dim()).map(|_| StandardNormal.sample(rng)).collect();
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
        let radius = rng.gen_range(1.0..2.0);
        dir.iter_mut().for_each(|x| *x *= radius / norm);
        Params::from(dir)
    }
}
