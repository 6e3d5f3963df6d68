//! Double exponential moving average variant used for the backward-looking part.
//!
//! The transform keeps an un-normalized inner accumulator
//! `I_t = lambda * I_{t-1} + g_t` and emits
//! `h_t = kappa * g_t + mu * I_t + nu_t`, with `nu_t = lambda^t * g_1` a bias
//! term that decays to zero. The outer moving average applied to `h_t` is
//! owned by the optimizer that consumes it.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Mixing coefficients derived from `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemaCoeffs {
    pub kappa: f64,
    pub mu: f64,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("lambda {lambda} out of (0,1)")))
    }
}

/// `kappa = 10/lambda - 9`, `mu = 25 - 10 (lambda + 1/lambda)`.
pub fn dema_coeffs(lambda: f64) -> Result<DemaCoeffs> {
    check_lambda(lambda)?;
    Ok(DemaCoeffs {
        kappa: 10.0 / lambda - 9.0,
        mu: 25.0 - 10.0 * (lambda + 1.0 / lambda),
    })
}

/// Limit of `h_t / g` under a constant gradient: `(6 - lambda) / (1 - lambda)`.
pub fn steady_state_gain(lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok((6.0 - lambda) / (1.0 - lambda))
}

/// Per-tensor DEMA state.
#[derive(Debug, Clone, PartialEq)]
pub struct DemaState {
    lambda: f64,
    coeffs: DemaCoeffs,
    inner: Vec<f64>,
    first_grad: Option<Vec<f64>>,
    /// `lambda^t` for the current step.
    lambda_pow: f64,
    t: u64,
}

impl DemaState {
    pub fn new(dim: usize, lambda: f64) -> Result<Self> {
        let coeffs = dema_coeffs(lambda)?;
        Ok(Self {
            lambda,
            coeffs,
            inner: vec![0.0; dim],
            first_grad: None,
            lambda_pow: 1.0,
            t: 0,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn coeffs(&self) -> DemaCoeffs {
        self.coeffs
    }

    /// The inner accumulator `I_t`.
    pub fn inner(&self) -> &[f64] {
        &self.inner
    }

    pub fn first_grad(&self) -> Option<&[f64]> {
        self.first_grad.as_deref()
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    /// Current bias term `nu_t = lambda^t g_1` for coordinate `i`.
    pub fn bias(&self, i: usize) -> f64 {
        self.first_grad.as_ref().map_or(0.0, |g1| self.lambda_pow * g1[i])
    }

    /// Advance one step and write `h_t` into `out`.
    pub fn step_into(&mut self, g: &[f64], out: &mut [f64]) -> Result<()> {
        check_dim(self.inner.len(), g.len())?;
        check_dim(self.inner.len(), out.len())?;
        self.t += 1;
        self.lambda_pow *= self.lambda;
        // lambda * (smallest subnormal) rounds back to itself, so without the
        // flush every later step would multiply by a subnormal.
        if self.lambda_pow < f64::MIN_POSITIVE {
            self.lambda_pow = 0.0;
        }
        let g1 = self.first_grad.get_or_insert_with(|| g.to_vec());
        let DemaCoeffs { kappa, mu } = self.coeffs;
        for (((h, acc), &gi), &g1i) in out.iter_mut().zip(&mut self.inner).zip(g).zip(g1.iter()) {
            *acc = self.lambda * *acc + gi;
            *h = kappa * gi + mu * *acc + self.lambda_pow * g1i;
        }
        Ok(())
    }

    pub fn step(&mut self, g: &[f64]) -> Result<Vec<f64>> {
        let mut h = vec![0.0; g.len()];
        self.step_into(g, &mut h)?;
        Ok(h)
    }
}
