//! AdmetaS and AdmetaR: DEMA in the backward-looking part, dynamic lookahead
//! in the forward-looking part, on top of SGDM and RAdam respectively.

use crate::dema::DemaState;
use crate::error::{check_dim, Result};
use crate::hyper::{HyperParams, VUpdatePolicy};
use crate::lookahead::LookaheadState;
use crate::params::{project, BoxConstraint};

use super::radam::{rectifier, rho_inf, rho_t};

/// What the forward-looking part did on a step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ForwardInfo {
    /// `eta_t` when lookahead is active.
    pub eta: Option<f64>,
    pub synced: bool,
}

/// Shared backward-looking front end: produces `h_t` (DEMA or raw gradient).
#[derive(Debug, Clone, PartialEq)]
struct Backward {
    dema: Option<DemaState>,
    h: Vec<f64>,
}

impl Backward {
    fn new(dim: usize, hp: &HyperParams) -> Result<Self> {
        let dema = if hp.ablation.use_dema { Some(DemaState::new(dim, hp.lambda)?) } else { None };
        Ok(Self { dema, h: vec![0.0; dim] })
    }

    fn signal(&mut self, g: &[f64]) -> Result<&[f64]> {
        check_dim(self.h.len(), g.len())?;
        match &mut self.dema {
            Some(d) => d.step_into(g, &mut self.h)?,
            None => self.h.copy_from_slice(g),
        }
        Ok(&self.h)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Forward(Option<LookaheadState>);

impl Forward {
    fn new(hp: &HyperParams) -> Result<Self> {
        Ok(Self(if hp.ablation.use_forward {
            Some(LookaheadState::new(hp.k, hp.slow_init)?)
        } else {
            None
        }))
    }

    fn before_step(&mut self, theta: &[f64]) {
        if let Some(la) = &mut self.0 {
            la.init_from(theta);
        }
    }

    fn after_step(&mut self, theta: &mut [f64], t: u64, hp: &HyperParams) -> Result<ForwardInfo> {
        match &mut self.0 {
            Some(la) => {
                let schedule = hp.effective_eta();
                let synced = la.maybe_sync(theta, t, &schedule)?;
                Ok(ForwardInfo { eta: Some(schedule.eta_at(t)), synced })
            }
            None => Ok(ForwardInfo::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmetaSState {
    backward: Backward,
    forward: Forward,
    m: Vec<f64>,
    t: u64,
}

impl AdmetaSState {
    pub fn new(dim: usize, hp: &HyperParams) -> Result<Self> {
        Ok(Self {
            backward: Backward::new(dim, hp)?,
            forward: Forward::new(hp)?,
            m: vec![0.0; dim],
            t: 0,
        })
    }

    pub fn momentum(&self) -> &[f64] {
        &self.m
    }

    pub fn dema(&self) -> Option<&DemaState> {
        self.backward.dema.as_ref()
    }

    pub fn lookahead(&self) -> Option<&LookaheadState> {
        self.forward.0.as_ref()
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    /// `h <- DEMA(g)`, `m <- beta m + (1 - beta) h`, `theta <- theta - alpha m`,
    /// then synchronize with the slow weights every `k` steps.
    pub fn step(&mut self, theta: &mut [f64], g: &[f64], alpha: f64, hp: &HyperParams) -> Result<ForwardInfo> {
        check_dim(self.m.len(), theta.len())?;
        self.forward.before_step(theta);
        let h = self.backward.signal(g)?;
        self.t += 1;
        let beta = hp.beta;
        let outer = hp.ablation.use_backward;
        for ((th, m), &hi) in theta.iter_mut().zip(&mut self.m).zip(h) {
            *m = if outer { beta * *m + (1.0 - beta) * hi } else { hi };
            *th -= alpha * *m;
        }
        self.forward.after_step(theta, self.t, hp)
    }
}

/// Result of one AdmetaR step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmetaRInfo {
    pub rho_t: f64,
    pub rectifier: Option<f64>,
    pub forward: ForwardInfo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmetaRState {
    backward: Backward,
    forward: Forward,
    m: Vec<f64>,
    v: Vec<f64>,
    rho_inf: f64,
    /// Scratch for the metric handed to the projection.
    metric: Vec<f64>,
    t: u64,
}

impl AdmetaRState {
    pub fn new(dim: usize, hp: &HyperParams) -> Result<Self> {
        Ok(Self {
            backward: Backward::new(dim, hp)?,
            forward: Forward::new(hp)?,
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            rho_inf: rho_inf(hp.beta2),
            metric: vec![0.0; dim],
            t: 0,
        })
    }

    pub fn first_moment(&self) -> &[f64] {
        &self.m
    }

    pub fn second_moment(&self) -> &[f64] {
        &self.v
    }

    pub fn dema(&self) -> Option<&DemaState> {
        self.backward.dema.as_ref()
    }

    pub fn lookahead(&self) -> Option<&LookaheadState> {
        self.forward.0.as_ref()
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    /// One AdmetaR step, projected onto `bounds` under the `sqrt(v_hat)` metric.
    pub fn step(
        &mut self,
        theta: &mut [f64],
        g: &[f64],
        alpha: f64,
        hp: &HyperParams,
        bounds: &BoxConstraint,
    ) -> Result<AdmetaRInfo> {
        check_dim(self.m.len(), theta.len())?;
        self.forward.before_step(theta);
        let h = self.backward.signal(g)?;
        self.t += 1;
        let t = self.t as f64;
        let (beta1, beta2, eps) = (hp.beta1, hp.beta2, hp.epsilon);
        let outer = hp.ablation.use_backward;
        let c1 = if outer { 1.0 - beta1.powf(t) } else { 1.0 };
        let c2 = 1.0 - beta2.powf(t);
        let rho = rho_t(beta2, self.t);
        let r = rectifier(rho, self.rho_inf);
        let update_v = r.is_some() || hp.v_update_policy == VUpdatePolicy::Always;
        for ((((th, m), v), &hi), w) in theta
            .iter_mut()
            .zip(&mut self.m)
            .zip(&mut self.v)
            .zip(h)
            .zip(&mut self.metric)
        {
            *m = if outer { beta1 * *m + (1.0 - beta1) * hi } else { hi };
            if update_v {
                *v = beta2 * *v + (1.0 - beta2) * hi * hi;
            }
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *w = v_hat.sqrt();
            match r {
                Some(r) => *th -= alpha * r * m_hat / (v_hat.sqrt() + eps),
                None => *th -= alpha * m_hat,
            }
        }
        if !bounds.is_unbounded() {
            let projected = project(theta, &self.metric, bounds)?;
            theta.copy_from_slice(&projected);
        }
        let forward = self.forward.after_step(theta, self.t, hp)?;
        Ok(AdmetaRInfo { rho_t: rho, rectifier: r, forward })
    }
}
