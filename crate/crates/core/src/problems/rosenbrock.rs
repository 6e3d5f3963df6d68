use rand::{Rng, RngCore};

use super::{check_theta, Problem};
use crate::error::{Error, Result};
use crate::params::Params;

/// Sum of independent 2-D Rosenbrock blocks
/// `100 (y - x^2)^2 + (1 - x)^2` over consecutive coordinate pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Rosenbrock {
    dim: usize,
}

impl Default for Rosenbrock {
    fn default() -> Self {
        Self { dim: 2 }
    }
}

impl Rosenbrock {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::InvalidArgument("rosenbrock dimension must be even and positive".into()));
        }
        Ok(Self { dim })
    }
}

impl Problem for Rosenbrock {
    fn name(&self) -> &str {
        "rosenbrock"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn loss(&self, theta: &[f64]) -> Result<f64> {
        check_theta(self, theta)?;
        Ok(theta
            .chunks_exact(2)
            .map(|p| {
                let (x, y) = (p[0], p[1]);
                100.0 * (y - x * x).powi(2) + (1.0 - x).powi(2)
            })
            .sum())
    }

    fn grad(&self, theta: &[f64]) -> Result<Vec<f64>> {
        check_theta(self, theta)?;
        let mut g = vec![0.0; self.dim];
        for (gp, p) in g.chunks_exact_mut(2).zip(theta.chunks_exact(2)) {
            let (x, y) = (p[0], p[1]);
            let r = y - x * x;
            gp[0] = -400.0 * x * r - 2.0 * (1.0 - x);
            gp[1] = 200.0 * r;
        }
        Ok(g)
    }

    fn optimum(&self) -> Option<Params> {
        Some(Params::from(vec![1.0; self.dim]))
    }

    /// The classic `(-1.2, 1)` start per block, jittered by up to 0.1.
    fn initial_point(&self, rng: &mut dyn RngCore) -> Params {
        let v = (0..self.dim)
            .map(|i| if i % 2 == 0 { -1.2 } else { 1.0 } + rng.gen_range(-0.1..0.1))
            .collect::<Vec<_>>();
        Params::from(v)
    }

    fn random_point(&self, rng: &mut dyn RngCore) -> Params {
        Params::from((0..self.dim).map(|_| rng.gen_range(-2.0..2.0)).collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optimum_is_critical() {
        let r = Rosenbrock::default();
        assert_eq!(r.loss(&[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(r.grad(&[1.0, 1.0]).unwrap(), vec![0.0, 0.0]);
        let r4 = Rosenbrock::new(4).unwrap();
        assert_eq!(r4.loss(&r4.optimum().unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn known_value() {
        let r = Rosenbrock::default();
        // 100 * (1 - 0)^2 + (1 - 0)^2
        assert_eq!(r.loss(&[0.0, 1.0]).unwrap(), 101.0);
        assert_eq!(r.grad(&[0.0, 1.0]).unwrap(), vec![-2.0, 200.0]);
    }

    #[test]
    fn odd_dimension_rejected() {
        assert!(Rosenbrock::new(3).is_err());
        assert!(Rosenbrock::new(0).is_err());
    }
}
