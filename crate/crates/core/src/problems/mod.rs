//! Differentiable test objectives.

mod mlp;
mod rosenbrock;
mod stream;
mod valley;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;

pub use mlp::{gen_synthetic_dataset, gen_two_clusters, Dataset, TinyMlp};
pub use rosenbrock::Rosenbrock;
pub use stream::OnlineQuadraticStream;
pub use valley::QuadraticValley;

use crate::error::{Error, Result};
use crate::params::Params;

/// Deterministic RNG used throughout the crate.
pub type SeededRng = rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// An objective `f: R^d -> R` with an analytic gradient.
pub trait Problem: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn loss(&self, theta: &[f64]) -> Result<f64>;

    fn grad(&self, theta: &[f64]) -> Result<Vec<f64>>;

    /// Unbiased gradient estimate from one random mini-batch.
    fn stochastic_grad(&self, _theta: &[f64], _rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        Err(Error::Unsupported(format!("{} has no stochastic gradient", self.name())))
    }

    /// Closed-form minimizer when one is known.
    fn optimum(&self) -> Option<Params> {
        None
    }

    /// A starting point drawn from `rng`.
    fn initial_point(&self, rng: &mut dyn RngCore) -> Params;

    /// A random point for gradient checks.
    fn random_point(&self, rng: &mut dyn RngCore) -> Params {
        self.initial_point(rng)
    }
}

pub(crate) fn check_theta(p: &(impl Problem + ?Sized), theta: &[f64]) -> Result<()> {
    crate::error::check_dim(p.dim(), theta.len())
}
