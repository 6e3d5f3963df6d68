//! SGD, SGD with momentum and Adam.

use crate::error::{check_dim, Result};

/// `theta <- theta - alpha * g`.
pub fn sgd_step(theta: &mut [f64], g: &[f64], alpha: f64) -> Result<()> {
    check_dim(theta.len(), g.len())?;
    for (th, gi) in theta.iter_mut().zip(g) {
        *th -= alpha * gi;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgdmState {
    m: Vec<f64>,
    t: u64,
}

impl SgdmState {
    pub fn new(dim: usize) -> Self {
        Self { m: vec![0.0; dim], t: 0 }
    }

    pub fn momentum(&self) -> &[f64] {
        &self.m
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    /// `m <- beta m + (1 - beta) g`, then `theta <- theta - alpha m`. With
    /// `nesterov` the applied direction is `beta m + (1 - beta) g` on the
    /// updated `m`.
    pub fn step(&mut self, theta: &mut [f64], g: &[f64], alpha: f64, beta: f64, nesterov: bool) -> Result<()> {
        check_dim(self.m.len(), theta.len())?;
        check_dim(self.m.len(), g.len())?;
        self.t += 1;
        for ((th, m), &gi) in theta.iter_mut().zip(&mut self.m).zip(g) {
            *m = beta * *m + (1.0 - beta) * gi;
            let dir = if nesterov { beta * *m + (1.0 - beta) * gi } else { *m };
            *th -= alpha * dir;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(dim: usize) -> Self {
        Self { m: vec![0.0; dim], v: vec![0.0; dim], t: 0 }
    }

    pub fn first_moment(&self) -> &[f64] {
        &self.m
    }

    pub fn second_moment(&self) -> &[f64] {
        &self.v
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    #[allow(clippy::too_many_arguments)]
    pub fn step(
        &mut self,
        theta: &mut [f64],
        g: &[f64],
        alpha: f64,
        beta1: f64,
        beta2: f64,
        epsilon: f64,
        bias_correct: bool,
    ) -> Result<()> {
        check_dim(self.m.len(), theta.len())?;
        check_dim(self.m.len(), g.len())?;
        self.t += 1;
        let (c1, c2) = if bias_correct {
            (1.0 - beta1.powf(self.t as f64), 1.0 - beta2.powf(self.t as f64))
        } else {
            (1.0, 1.0)
        };
        for (((th, m), v), &gi) in theta.iter_mut().zip(&mut self.m).zip(&mut self.v).zip(g) {
            *m = beta1 * *m + (1.0 - beta1) * gi;
            *v = beta2 * *v + (1.0 - beta2) * gi * gi;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *th -= alpha * m_hat / (v_hat.sqrt() + epsilon);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sgd_arithmetic() {
        let mut theta = [1.0, 2.0];
        sgd_step(&mut theta, &[0.5, -1.0], 0.1).unwrap();
        assert_eq!(theta, [0.95, 2.1]);
        sgd_step(&mut theta, &[0.0, 0.0], 0.1).unwrap();
        assert_eq!(theta, [0.95, 2.1]);
        sgd_step(&mut theta, &[3.0, 3.0], 0.0).unwrap();
        assert_eq!(theta, [0.95, 2.1]);
        assert!(sgd_step(&mut theta, &[1.0], 0.1).is_err());
    }

    #[test]
    fn sgdm_without_momentum_is_sgd() {
        let mut a = [0.3, -0.7];
        let mut b = a;
        let mut s = SgdmState::new(2);
        for k in 0..20 {
            let g = [(k as f64).sin(), (k as f64 * 0.3).cos()];
            s.step(&mut a, &g, 0.05, 0.0, false).unwrap();
            sgd_step(&mut b, &g, 0.05).unwrap();
        }
        assert_eq!(a, b);
    }

    #[test]
    fn sgdm_first_step() {
        let mut s = SgdmState::new(1);
        let mut theta = [0.0];
        s.step(&mut theta, &[1.0], 0.1, 0.9, false).unwrap();
        assert!((s.momentum()[0] - 0.1).abs() < 1e-15);
        assert!((theta[0] + 0.01).abs() < 1e-15);
    }

    #[test]
    fn sgdm_momentum_converges_to_gradient() {
        let mut s = SgdmState::new(1);
        let mut theta = [0.0];
        for _ in 0..200 {
            s.step(&mut theta, &[2.5], 0.01, 0.9, false).unwrap();
        }
        assert!((s.momentum()[0] - 2.5).abs() < 1e-6 * 2.5 + 1e-6);
    }

    #[test]
    fn nesterov_direction() {
        let mut s = SgdmState::new(1);
        let mut theta = [0.0];
        s.step(&mut theta, &[1.0], 1.0, 0.5, true).unwrap();
        // m = 0.5, direction = 0.5*0.5 + 0.5*1
        assert_eq!(theta[0], -0.75);
    }

    #[test]
    fn adam_first_step_is_sign_like() {
        for g in [3.0, -0.02, 1e-3] {
            let mut s = AdamState::new(1);
            let mut theta = [1.0];
            s.step(&mut theta, &[g], 0.1, 0.9, 0.999, 1e-8, true).unwrap();
            let expected = 1.0 - 0.1 * g / (g.abs() + 1e-8);
            assert!((theta[0] - expected).abs() < 1e-12, "{g}");
        }
    }

    #[test]
    fn adam_zero_stream() {
        let mut s = AdamState::new(3);
        let mut theta = [1.0, -2.0, 0.5];
        for _ in 0..100 {
            s.step(&mut theta, &[0.0; 3], 0.1, 0.9, 0.999, 1e-8, true).unwrap();
        }
        assert_eq!(theta, [1.0, -2.0, 0.5]);
    }

    #[test]
    fn adam_scale_invariance() {
        let mut a = AdamState::new(2);
        let mut b = AdamState::new(2);
        let mut ta = [0.4, -0.2];
        let mut tb = ta;
        for k in 0..300 {
            let g = [(k as f64 * 0.7).sin() + 0.2, (k as f64 * 0.13).cos()];
            let gs = [1000.0 * g[0], 1000.0 * g[1]];
            a.step(&mut ta, &g, 0.01, 0.9, 0.999, 1e-12, true).unwrap();
            b.step(&mut tb, &gs, 0.01, 0.9, 0.999, 1e-12, true).unwrap();
        }
        for (x, y) in ta.iter().zip(&tb) {
            assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
    }
}
