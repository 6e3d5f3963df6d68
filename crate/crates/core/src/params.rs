//! Parameter vectors, box feasible sets and the diagonal-metric projection.

use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Dense parameter vector being optimized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Params(Vec<f64>);

impl Params {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("parameter vector must be non-empty".into()));
        }
        Ok(Self(values))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Params {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Params {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for Params {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

impl From<&[f64]> for Params {
    fn from(values: &[f64]) -> Self {
        Self(values.to_vec())
    }
}

/// Per-coordinate bounds. `None` on either side means unbounded.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BoxConstraint {
    lower: Option<Vec<f64>>,
    upper: Option<Vec<f64>>,
}

impl BoxConstraint {
    /// The whole space; projection is the identity.
    pub fn unbounded() -> Self {
        Self::default()
    }

    pub fn new(lower: Option<Vec<f64>>, upper: Option<Vec<f64>>) -> Result<Self> {
        if let (Some(lo), Some(hi)) = (&lower, &upper) {
            check_dim(lo.len(), hi.len())?;
            if lo.iter().zip(hi).any(|(l, h)| !(l <= h)) {
                return Err(Error::InvalidArgument("box lower bound exceeds upper bound".into()));
            }
        }
        Ok(Self { lower, upper })
    }

    /// `[lo, hi]^dim`.
    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(Some(vec![lo; dim]), Some(vec![hi; dim]))
    }

    pub fn is_unbounded(&self) -> bool {
        self.lower.is_none() && self.upper.is_none()
    }

    pub fn lower(&self) -> Option<&[f64]> {
        self.lower.as_deref()
    }

    pub fn upper(&self) -> Option<&[f64]> {
        self.upper.as_deref()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let lo_ok = self
            .lower
            .as_ref()
            .map_or(true, |lo| x.iter().zip(lo).all(|(v, l)| v >= l));
        let hi_ok = self
            .upper
            .as_ref()
            .map_or(true, |hi| x.iter().zip(hi).all(|(v, h)| v <= h));
        lo_ok && hi_ok
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if let Some(lo) = &self.lower {
            check_dim(dim, lo.len())?;
        }
        if let Some(hi) = &self.upper {
            check_dim(dim, hi.len())?;
        }
        Ok(())
    }

    /// Clamp `x` into the box in place.
    pub fn clamp_in_place(&self, x: &mut [f64]) -> Result<()> {
        self.check_dim(x.len())?;
        if let Some(lo) = &self.lower {
            for (v, l) in x.iter_mut().zip(lo) {
                *v = v.max(*l);
            }
        }
        if let Some(hi) = &self.upper {
            for (v, h) in x.iter_mut().zip(hi) {
                *v = v.min(*h);
            }
        }
        Ok(())
    }
}

/// Minimizer of `||diag(metric)^{1/2} (x - y)||` over the box.
///
/// A box is separable and the metric is diagonal, so the problem splits per
/// coordinate and the answer is the clamp of `y`, whatever the (nonnegative)
/// weights are.
pub fn project(y: &[f64], metric_diag: &[f64], bounds: &BoxConstraint) -> Result<Params> {
    check_dim(y.len(), metric_diag.len())?;
    if metric_diag.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::InvalidArgument("metric weights must be nonnegative".into()));
    }
    let mut out = y.to_vec();
    bounds.clamp_in_place(&mut out)?;
    Ok(Params(out))
}
