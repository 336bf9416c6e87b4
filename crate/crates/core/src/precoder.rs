//! The linear precoder `x̄ = θ_P x` with `θ_P = [[Re G, -Im G], [Im G, Re G]]`,
//! its trace-power projection, and the Gaussian relaxation that yields a
//! score-function gradient without differentiating the channel.

use alloc::vec::Vec;

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::complex::{real_embed, trace_gram, ComplexMatrix, RealEmbedding, RealMatrix};
use crate::math::sqrt;
use crate::optimizer::AdamState;
use crate::rng::{self, Rng};
use crate::{Error, Result};

pub const DEFAULT_LEARNING_RATE: f64 = 1e-4;

/// Standard deviation of the relaxation density
/// `π̂(x̃) = N(√(1-σ_π²)·x̄, σ_π² I)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationSpec {
    sigma_pi: f64,
}

impl RelaxationSpec {
    pub fn new(sigma_pi: f64) -> Result<Self> {
        if !(sigma_pi > 0.0 && sigma_pi < 1.0) {
            return Err(Error::InvalidConfig("sigma_pi must lie in (0, 1)"));
        }
        Ok(Self { sigma_pi })
    }

    pub fn sigma_pi(&self) -> f64 {
        self.sigma_pi
    }

    /// Mean scale `√(1-σ_π²)`.
    pub fn shrink(&self) -> f64 {
        sqrt(1.0 - self.sigma_pi * self.sigma_pi)
    }
}

/// Precoder state. The free parameters are `Re G` and `Im G` (row-major,
/// in that order); the embedding is rebuilt from them after every change, so
/// the block tie holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderParams {
    n_t: usize,
    free: Vec<f64>,
    theta: RealEmbedding,
    adam: AdamState,
}

impl PrecoderParams {
    pub fn from_complex(g: &ComplexMatrix) -> Result<Self> {
        if g.rows() != g.cols() || g.rows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: g.rows(),
                got: g.cols(),
            });
        }
        let n_t = g.rows();
        let mut free = Vec::with_capacity(2 * n_t * n_t);
        free.extend_from_slice(g.re());
        free.extend_from_slice(g.im());
        Ok(Self {
            n_t,
            free,
            theta: real_embed(g),
            adam: AdamState::new(2 * n_t * n_t, DEFAULT_LEARNING_RATE),
        })
    }

    pub fn identity(n_t: usize) -> Self {
        Self::from_complex(&ComplexMatrix::identity(n_t)).expect("square identity")
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn g(&self) -> ComplexMatrix {
        let n2 = self.n_t * self.n_t;
        ComplexMatrix::from_parts(
            self.n_t,
            self.n_t,
            self.free[..n2].to_vec(),
            self.free[n2..].to_vec(),
        )
        .expect("free parameters stay finite")
    }

    pub fn theta(&self) -> &RealEmbedding {
        &self.theta
    }

    /// `[Re G | Im G]`, row-major.
    pub fn free_params(&self) -> &[f64] {
        &self.free
    }

    pub fn trace_power(&self) -> f64 {
        self.free.iter().map(|v| v * v).sum()
    }

    pub fn step_count(&self) -> u64 {
        self.adam.step_count()
    }

    pub fn adam(&self) -> &AdamState {
        &self.adam
    }

    pub fn set_learning_rate(&mut self, lr: f64) {
        self.adam.lr = lr;
    }

    /// Restores a saved state: parameters plus the optimizer step count.
    /// Optimizer moments restart from zero.
    pub fn restore(g: &ComplexMatrix, step_count: u64) -> Result<Self> {
        let mut p = Self::from_complex(g)?;
        p.adam = AdamState::resumed(p.adam.len(), p.adam.lr, step_count);
        Ok(p)
    }

    fn sync(&mut self) {
        let n = self.n_t;
        let mut m = RealMatrix::zeros(2 * n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                let a = self.free[r * n + c];
                let b = self.free[n * n + r * n + c];
                m.set(r, c, a);
                m.set(r, c + n, -b);
                m.set(r + n, c, b);
                m.set(r + n, c + n, a);
            }
        }
        self.theta = RealEmbedding::from_matrix(m).expect("even shape");
    }

    /// `θ_P X` for a batch `X` of shape `2N_t × S`.
    pub fn precode(&self, x: &RealMatrix) -> Result<RealMatrix> {
        self.theta.apply(x)
    }

    /// One Adam step on the free parameters using a gradient in the layout of
    /// [`free_params`](Self::free_params).
    pub fn apply_gradient(&mut self, grad: &[f64]) -> Result<()> {
        self.adam.step(&mut self.free, grad)?;
        self.sync();
        Ok(())
    }

    /// Scales `G` down onto `Tr{GᴴG} = N_t` if it lies outside the budget.
    pub fn project_power(&mut self) {
        let power = self.trace_power();
        let budget = self.n_t as f64;
        if power > budget {
            let s = sqrt(budget / power);
            self.free.iter_mut().for_each(|v| *v *= s);
            self.sync();
        }
    }
}

/// `G` with i.i.d. `N(0, 1/(2N_t))` real and imaginary parts, projected onto
/// the power budget.
pub fn init_precoder(n_t: usize, seed: u64) -> Result<PrecoderParams> {
    if n_t == 0 {
        return Err(Error::InvalidConfig("precoder needs at least one antenna"));
    }
    let mut rng = rng::seeded(seed, rng::stream::PRECODER_INIT);
    let mut p = PrecoderParams::from_complex(&random_g(n_t, &mut rng))?;
    p.project_power();
    Ok(p)
}

fn random_g(n_t: usize, rng: &mut Rng) -> ComplexMatrix {
    let std = sqrt(1.0 / (2.0 * n_t as f64));
    let n2 = n_t * n_t;
    let mut draw = || -> Vec<f64> {
        (0..n2)
            .map(|_| std * rng.sample::<f64, _>(StandardNormal))
            .collect()
    };
    let re = draw();
    let im = draw();
    ComplexMatrix::from_parts(n_t, n_t, re, im).expect("finite draws")
}

/// Functional projection: returns the projected copy.
pub fn power_project(params: &PrecoderParams) -> PrecoderParams {
    let mut p = params.clone();
    p.project_power();
    p
}

/// Check used by tests and the training loop.
pub fn within_budget(g: &ComplexMatrix) -> bool {
    trace_gram(g) <= g.cols() as f64 + 1e-9
}

/// A relaxed batch and the perturbation that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Relaxed {
    pub tilde: RealMatrix,
    pub noise: RealMatrix,
}

/// `x̃ = √(1-σ_π²)·x̄ + w`, `w ~ N(0, σ_π² I)`, entrywise.
pub fn relax(x_bar: &RealMatrix, spec: &RelaxationSpec, rng: &mut Rng) -> Relaxed {
    let a = spec.shrink();
    let sigma = spec.sigma_pi;
    let mut tilde = x_bar.clone();
    let mut noise = RealMatrix::zeros(x_bar.rows(), x_bar.cols());
    for (t, w) in tilde.as_mut_slice().iter_mut().zip(noise.as_mut_slice()) {
        *w = sigma * rng.sample::<f64, _>(StandardNormal);
        *t = a * *t + *w;
    }
    Relaxed { tilde, noise }
}

/// `∇_{x̄} log π̂(x̃) = (√(1-σ_π²)/σ_π²)·(x̃ - √(1-σ_π²)·x̄)`, per column.
pub fn score_log_density_grad(x_bar: &RealMatrix, x_tilde: &RealMatrix, spec: &RelaxationSpec) -> Result<RealMatrix> {
    x_bar.check_same_shape(x_tilde)?;
    let a = spec.shrink();
    let k = a / (spec.sigma_pi * spec.sigma_pi);
    let data = x_bar
        .as_slice()
        .iter()
        .zip(x_tilde.as_slice())
        .map(|(xb, xt)| k * (xt - a * xb))
        .collect();
    RealMatrix::from_vec(x_bar.rows(), x_bar.cols(), data)
}

/// Folds a gradient on the full `2n × 2n` embedding onto the free parameters
/// `[Re G | Im G]`: `∂/∂A = F₁₁ + F₂₂`, `∂/∂B = F₂₁ - F₁₂`.
pub fn tied_gradient(full: &RealMatrix) -> Result<Vec<f64>> {
    if full.rows() != full.cols() || !full.rows().is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            expected: full.rows(),
            got: full.cols(),
        });
    }
    let n = full.rows() / 2;
    let mut grad = alloc::vec![0.0; 2 * n * n];
    for r in 0..n {
        for c in 0..n {
            grad[r * n + c] = full.get(r, c) + full.get(r + n, c + n);
            grad[n * n + r * n + c] = full.get(r + n, c) - full.get(r, c + n);
        }
    }
    Ok(grad)
}

/// `Σ_i w_i · u_i x_iᵀ` over the columns of `left` and `x` (`w_i = 1` when
/// no weights are given).
fn outer_sum(weights: Option<&[f64]>, left: &RealMatrix, x: &RealMatrix) -> Result<RealMatrix> {
    left.check_same_shape(x)?;
    if let Some(w) = weights {
        if w.len() != x.cols() {
            return Err(Error::DimensionMismatch {
                expected: x.cols(),
                got: w.len(),
            });
        }
    }
    let dim = x.rows();
    let mut full = RealMatrix::zeros(dim, dim);
    let mut scaled = alloc::vec![0.0; x.cols()];
    for i in 0..dim {
        match weights {
            Some(w) => {
                for ((s, a), b) in scaled.iter_mut().zip(left.row(i)).zip(w) {
                    *s = a * b;
                }
            }
            None => scaled.copy_from_slice(left.row(i)),
        }
        for j in 0..dim {
            let v: f64 = scaled.iter().zip(x.row(j)).map(|(a, b)| a * b).sum();
            full.set(i, j, v);
        }
    }
    Ok(full)
}

/// Exact gradient on `[Re G | Im G]` given `∂L/∂x̄` per column (already
/// carrying any batch-mean factor) and the unprecoded inputs.
pub fn precoder_exact_grad(grad_xbar: &RealMatrix, x: &RealMatrix) -> Result<Vec<f64>> {
    tied_gradient(&outer_sum(None, grad_xbar, x)?)
}

/// Score-function estimate of `∇_{θ_P} E{l}` from one relaxed batch:
/// `(1/S)·Σ_i (l_i - b)·∇_{x̄} log π̂(x̃_i)·x_iᵀ`, tied onto `[Re G | Im G]`.
pub fn precoder_grad_estimate(
    per_sample_loss: &[f64],
    x: &RealMatrix,
    grad_logpi: &RealMatrix,
    baseline: f64,
) -> Result<Vec<f64>> {
    let weights: Vec<f64> = per_sample_loss.iter().map(|l| l - baseline).collect();
    let full = outer_sum(Some(&weights), grad_logpi, x)?;
    tied_gradient(&full.scale(1.0 / x.cols() as f64))
}
