//! Rectified Adam.

use crate::error::{check_dim, Result};

/// `rho_inf = 2 / (1 - beta2) - 1`.
pub fn rho_inf(beta2: f64) -> f64 {
    2.0 / (1.0 - beta2) - 1.0
}

/// Length of the approximated simple moving average at step `t`.
pub fn rho_t(beta2: f64, t: u64) -> f64 {
    let b = beta2.powf(t as f64);
    rho_inf(beta2) - 2.0 * t as f64 * b / (1.0 - b)
}

/// Variance rectifier `r_t`, defined only while the variance is tractable
/// (`rho_t > 4`).
pub fn rectifier(rho_t: f64, rho_inf: f64) -> Option<f64> {
    (rho_t > 4.0).then(|| {
        ((rho_t - 4.0) * (rho_t - 2.0) * rho_inf / ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t)).sqrt()
    })
}

/// Which update a rectified step applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectifiedStep {
    pub rho_t: f64,
    /// `Some(r_t)` when the adaptive branch ran.
    pub rectifier: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
    rho_inf: f64,
}

impl RadamState {
    pub fn new(dim: usize, beta2: f64) -> Self {
        Self { m: vec![0.0; dim], v: vec![0.0; dim], t: 0, rho_inf: rho_inf(beta2) }
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

    pub fn rho_inf(&self) -> f64 {
        self.rho_inf
    }

    /// One step. While `rho_t <= 4` the update is `theta - alpha * m_hat`;
    /// afterwards `theta - alpha * r_t * m_hat / (sqrt(v_hat) + eps)`.
    pub fn step(
        &mut self,
        theta: &mut [f64],
        g: &[f64],
        alpha: f64,
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    ) -> Result<RectifiedStep> {
        check_dim(self.m.len(), theta.len())?;
        check_dim(self.m.len(), g.len())?;
        self.t += 1;
        let t = self.t as f64;
        let c1 = 1.0 - beta1.powf(t);
        let c2 = 1.0 - beta2.powf(t);
        let rho = rho_t(beta2, self.t);
        let r = rectifier(rho, self.rho_inf);
        for (((th, m), v), &gi) in theta.iter_mut().zip(&mut self.m).zip(&mut self.v).zip(g) {
            *m = beta1 * *m + (1.0 - beta1) * gi;
            *v = beta2 * *v + (1.0 - beta2) * gi * gi;
            let m_hat = *m / c1;
            match r {
                Some(r) => {
                    let v_hat = *v / c2;
                    *th -= alpha * r * m_hat / (v_hat.sqrt() + epsilon);
                }
                None => *th -= alpha * m_hat,
            }
        }
        Ok(RectifiedStep { rho_t: rho, rectifier: r })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_rho() {
        assert!((rho_t(0.999, 1) - 1.0).abs() < 1e-9);
        assert!(rectifier(rho_t(0.999, 1), rho_inf(0.999)).is_none());
    }

    #[test]
    fn first_tractable_step_is_five() {
        // rho_4 = 3.99749..., just short of the threshold
        let first = (1..=10).find(|&t| rho_t(0.999, t) > 4.0).unwrap();
        assert_eq!(first, 5);
        assert!((rho_t(0.999, 4) - 3.997_498_749_875_438).abs() < 1e-9);
    }

    #[test]
    fn rectifier_tends_to_one() {
        let r = rectifier(rho_t(0.999, 1_000_000), rho_inf(0.999)).unwrap();
        assert!((r - 1.0).abs() < 1e-3);
        assert!(r <= 1.0);
        for t in 5..=10_000 {
            let r = rectifier(rho_t(0.999, t), rho_inf(0.999)).unwrap();
            assert!(r > 0.0 && r < 1.0, "t={t}");
        }
    }

    #[test]
    fn branch_is_monotone() {
        for beta2 in [0.9, 0.99, 0.999] {
            let mut seen = false;
            for t in 1..=10_000 {
                let tractable = rho_t(beta2, t) > 4.0;
                assert!(!(seen && !tractable), "beta2={beta2} t={t}");
                seen |= tractable;
            }
            assert!(seen);
        }
    }

    #[test]
    fn early_steps_are_momentum_sgd() {
        let mut s = RadamState::new(1, 0.999);
        let mut theta = [1.0];
        let info = s.step(&mut theta, &[2.0], 0.1, 0.9, 0.999, 1e-8).unwrap();
        assert!(info.rectifier.is_none());
        // m_hat == g on the first step
        assert!((theta[0] - 0.8).abs() < 1e-12);
    }
}
