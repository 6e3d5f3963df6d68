use std::io::{self, Write};

use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};

use super::{check_theta, seeded_rng, Problem};
use crate::error::{Error, Result};
use crate::params::Params;

/// Labelled points for classification.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// Row-major `n x features`.
    features: Vec<f64>,
    labels: Vec<usize>,
    n_features: usize,
}

impl Dataset {
    pub fn new(features: Vec<f64>, labels: Vec<usize>, n_features: usize) -> Result<Self> {
        if n_features == 0 || labels.is_empty() || features.len() != labels.len() * n_features {
            return Err(Error::InvalidArgument("dataset shape is inconsistent".into()));
        }
        Ok(Self { features, labels, n_features })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// CSV with columns `x0..x{f-1},label`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let header: Vec<String> = (0..self.n_features).map(|j| format!("x{j}")).collect();
        writeln!(w, "{},label", header.join(","))?;
        for i in 0..self.len() {
            for x in self.point(i) {
                write!(w, "{x},")?;
            }
            writeln!(w, "{}", self.labels[i])?;
        }
        Ok(())
    }
}

/// Two unit-variance Gaussian clusters in the plane centred at
/// `±(separation/2, separation/2)`, labels drawn as fair coin flips.
pub fn gen_two_clusters(seed: u64, n: usize, separation: f64) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::InvalidArgument("dataset needs at least two points".into()));
    }
    let mut rng = seeded_rng(seed);
    let mut features = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let label = usize::from(rng.gen_bool(0.5));
        let centre = if label == 1 { separation / 2.0 } else { -separation / 2.0 };
        for _ in 0..2 {
            let noise: f64 = StandardNormal.sample(&mut rng);
            features.push(centre + noise);
        }
        labels.push(label);
    }
    Dataset::new(features, labels, 2)
}

/// [`gen_two_clusters`] with the default separation of 3.
pub fn gen_synthetic_dataset(seed: u64, n: usize) -> Result<Dataset> {
    gen_two_clusters(seed, n, 3.0)
}

/// One-hidden-layer tanh network with softmax cross-entropy, trained on a
/// fixed dataset. Gradients are hand-derived backprop.
///
/// Parameter layout: `W1 (hidden x in)`, `b1`, `W2 (out x hidden)`, `b2`,
/// all row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TinyMlp {
    data: Dataset,
    hidden: usize,
    classes: usize,
    batch_size: Option<usize>,
}

struct Grads<'a> {
    w1: &'a mut [f64],
    b1: &'a mut [f64],
    w2: &'a mut [f64],
    b2: &'a mut [f64],
}

impl TinyMlp {
    pub fn new(data: Dataset, hidden: usize, batch_size: Option<usize>) -> Result<Self> {
        if hidden == 0 {
            return Err(Error::InvalidArgument("hidden layer must be non-empty".into()));
        }
        if batch_size == Some(0) {
            return Err(Error::InvalidArgument("batch size must be >= 1".into()));
        }
        let classes = data.labels().iter().max().map_or(2, |m| (m + 1).max(2));
        Ok(Self { data, hidden, classes, batch_size })
    }

    /// 2-16-2 network on 1000 points of the default two-cluster data, batch 32.
    pub fn standard(seed: u64) -> Result<Self> {
        Self::new(gen_synthetic_dataset(seed, 1000)?, 16, Some(32))
    }

    pub fn dataset(&self) -> &Dataset {
        &self.data
    }

    pub fn batch_size(&self) -> Option<usize> {
        self.batch_size
    }

    pub fn layer_sizes(&self) -> [usize; 3] {
        [self.data.n_features(), self.hidden, self.classes]
    }

    fn offsets(&self) -> [usize; 4] {
        let [i, h, o] = self.layer_sizes();
        let w1 = 0;
        let b1 = w1 + h * i;
        let w2 = b1 + h;
        let b2 = w2 + o * h;
        [w1, b1, w2, b2]
    }

    /// Loss (and optionally accumulated gradient) over `indices`, averaged.
    fn eval(&self, theta: &[f64], indices: &mut dyn Iterator<Item = usize>, grad: Option<&mut [f64]>) -> f64 {
        let [n_in, n_h, n_out] = self.layer_sizes();
        let [o_w1, o_b1, o_w2, o_b2] = self.offsets();
        let w1 = &theta[o_w1..o_b1];
        let b1 = &theta[o_b1..o_w2];
        let w2 = &theta[o_w2..o_b2];
        let b2 = &theta[o_b2..];
        let mut grads = grad.map(|g| {
            g.iter_mut().for_each(|x| *x = 0.0);
            let (gw1, rest) = g.split_at_mut(o_b1);
            let (gb1, rest) = rest.split_at_mut(n_h);
            let (gw2, gb2) = rest.split_at_mut(n_out * n_h);
            Grads { w1: gw1, b1: gb1, w2: gw2, b2: gb2 }
        });

        let mut a1 = vec![0.0; n_h];
        let mut z2 = vec![0.0; n_out];
        let mut dz1 = vec![0.0; n_h];
        // Neumaier-compensated sum: finite-difference checks divide loss
        // differences by 2h, so summation noise must stay near one ulp.
        let mut total = 0.0;
        let mut carry = 0.0;
        let mut count = 0usize;
        for idx in indices {
            count += 1;
            let x = self.data.point(idx);
            let y = self.data.label(idx);
            for ((a, row), b) in a1.iter_mut().zip(w1.chunks_exact(n_in)).zip(b1) {
                *a = (b + row.iter().zip(x).map(|(w, x)| w * x).sum::<f64>()).tanh();
            }
            for ((z, row), b) in z2.iter_mut().zip(w2.chunks_exact(n_h)).zip(b2) {
                *z = b + row.iter().zip(&a1).map(|(w, a)| w * a).sum::<f64>();
            }
            let zmax = z2.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let sum_exp: f64 = z2.iter().map(|z| (z - zmax).exp()).sum();
            let log_norm = zmax + sum_exp.ln();
            let term = log_norm - z2[y];
            let next = total + term;
            carry += if total.abs() >= term.abs() { (total - next) + term } else { (term - next) + total };
            total = next;

            if let Some(g) = grads.as_mut() {
                dz1.iter_mut().for_each(|d| *d = 0.0);
                for k in 0..n_out {
                    let p = (z2[k] - log_norm).exp();
                    let dz2 = p - if k == y { 1.0 } else { 0.0 };
                    g.b2[k] += dz2;
                    for j in 0..n_h {
                        g.w2[k * n_h + j] += dz2 * a1[j];
                        dz1[j] += dz2 * w2[k * n_h + j];
                    }
                }
                for j in 0..n_h {
                    let d = dz1[j] * (1.0 - a1[j] * a1[j]);
                    g.b1[j] += d;
                    for c in 0..n_in {
                        g.w1[j * n_in + c] += d * x[c];
                    }
                }
            }
        }
        let scale = 1.0 / count.max(1) as f64;
        if let Some(g) = grads {
            for part in [g.w1, g.b1, g.w2, g.b2] {
                part.iter_mut().for_each(|x| *x *= scale);
            }
        }
        (total + carry) * scale
    }

    /// Loss and gradient on an explicit batch of sample indices.
    pub fn batch_loss_grad(&self, theta: &[f64], indices: &[usize]) -> Result<(f64, Vec<f64>)> {
        check_theta(self, theta)?;
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.data.len()) {
            return Err(Error::InvalidArgument(format!("sample index {bad} out of range")));
        }
        let mut g = vec![0.0; self.dim()];
        let loss = self.eval(theta, &mut indices.iter().copied(), Some(&mut g));
        Ok((loss, g))
    }

    /// Fraction of training points classified correctly.
    pub fn accuracy(&self, theta: &[f64]) -> Result<f64> {
        check_theta(self, theta)?;
        let [n_in, n_h, n_out] = self.layer_sizes();
        let [o_w1, o_b1, o_w2, o_b2] = self.offsets();
        let mut correct = 0usize;
        let mut a1 = vec![0.0; n_h];
        for i in 0..self.data.len() {
            let x = self.data.point(i);
            for j in 0..n_h {
                let z = theta[o_b1 + j] + (0..n_in).map(|c| theta[o_w1 + j * n_in + c] * x[c]).sum::<f64>();
                a1[j] = z.tanh();
            }
            let pred = (0..n_out)
                .map(|k| theta[o_b2 + k] + (0..n_h).map(|j| theta[o_w2 + k * n_h + j] * a1[j]).sum::<f64>())
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (k, z)| if z > best.1 { (k, z) } else { best })
                .0;
            correct += usize::from(pred == self.data.label(i));
        }
        Ok(correct as f64 / self.data.len() as f64)
    }
}

impl Problem for TinyMlp {
    fn name(&self) -> &str {
        "tinymlp"
    }

    fn dim(&self) -> usize {
        let [i, h, o] = self.layer_sizes();
        h * i + h + o * h + o
    }

    fn loss(&self, theta: &[f64]) -> Result<f64> {
        check_theta(self, theta)?;
        Ok(self.eval(theta, &mut (0..self.data.len()), None))
    }

    fn grad(&self, theta: &[f64]) -> Result<Vec<f64>> {
        check_theta(self, theta)?;
        let mut g = vec![0.0; self.dim()];
        self.eval(theta, &mut (0..self.data.len()), Some(&mut g));
        Ok(g)
    }

    /// Mini-batch drawn uniformly with replacement; the full dataset when no
    /// batch size is set.
    fn stochastic_grad(&self, theta: &[f64], rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        check_theta(self, theta)?;
        let Some(b) = self.batch_size else {
            return self.grad(theta);
        };
        let n = self.data.len();
        let indices: Vec<usize> = (0..b).map(|_| rng.gen_range(0..n)).collect();
        Ok(self.batch_loss_grad(theta, &indices)?.1)
    }

    /// Weights uniform in `±1/sqrt(fan_in)`, zero biases.
    fn initial_point(&self, rng: &mut dyn RngCore) -> Params {
        let [n_in, n_h, _] = self.layer_sizes();
        let [o_w1, o_b1, o_w2, o_b2] = self.offsets();
        let mut theta = vec![0.0; self.dim()];
        let s1 = 1.0 / (n_in as f64).sqrt();
        let s2 = 1.0 / (n_h as f64).sqrt();
        theta[o_w1..o_b1].iter_mut().for_each(|w| *w = rng.gen_range(-s1..s1));
        theta[o_w2..o_b2].iter_mut().for_each(|w| *w = rng.gen_range(-s2..s2));
        Params::from(theta)
    }

    fn random_point(&self, rng: &mut dyn RngCore) -> Params {
        Params::from((0..self.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>())
    }
}
