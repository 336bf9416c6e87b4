//! The channel `y = Σ_u H_u x̄_u + n` behind two views.
//!
//! [`ChannelOracle`] can only be asked for forward samples: it exposes no
//! channel matrix, no noise variance and no gradient. [`PrivilegedChannel`]
//! shares the same model and is what evaluation code (mutual information,
//! genie detection, baselines) uses.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::complex::{matmul_into, real_embed, trace_gram, ComplexMatrix, RealMatrix};
use crate::constellation::MessageSpace;
use crate::math::{exp, pow, sqrt};
use crate::rng::{self, Rng};
use crate::{Error, Result};

#[derive(Debug)]
struct ChannelModel {
    users: Vec<ComplexMatrix>,
    embedded: Vec<RealMatrix>,
    noise_var: f64,
    snr_db: f64,
    n_r: usize,
    n_t: usize,
}

/// Forward-only sampling access to a channel.
#[derive(Debug, Clone)]
pub struct ChannelOracle {
    model: Arc<ChannelModel>,
    rng: Rng,
}

/// Full access to the channel behind an oracle.
#[derive(Debug, Clone)]
pub struct PrivilegedChannel {
    model: Arc<ChannelModel>,
}

/// `σ² = Tr{HᴴH} / (N_t · 10^{snr/10})`.
pub fn make_channel(h: ComplexMatrix, snr_db: f64, seed: u64) -> Result<(ChannelOracle, PrivilegedChannel)> {
    make_mac_channel(vec![h], snr_db, seed)
}

/// Multiple-access variant: `K` transmitters with `N_t` antennas each into a
/// shared `N_r`-antenna receiver. The SNR is taken over the aggregate
/// channel `[H_1 … H_K]`, i.e. `σ² = Σ Tr{H_uᴴH_u} / (K·N_t · 10^{snr/10})`.
pub fn make_mac_channel(
    users: Vec<ComplexMatrix>,
    snr_db: f64,
    seed: u64,
) -> Result<(ChannelOracle, PrivilegedChannel)> {
    let first = users
        .first()
        .ok_or(Error::InvalidConfig("channel needs at least one user"))?;
    let (n_r, n_t) = (first.rows(), first.cols());
    for h in &users {
        if h.rows() != n_r {
            return Err(Error::DimensionMismatch {
                expected: n_r,
                got: h.rows(),
            });
        }
        if h.cols() != n_t {
            return Err(Error::DimensionMismatch {
                expected: n_t,
                got: h.cols(),
            });
        }
    }
    if !snr_db.is_finite() {
        return Err(Error::InvalidConfig("snr must be finite"));
    }
    let power: f64 = users.iter().map(trace_gram).sum();
    if power == 0.0 {
        return Err(Error::ZeroChannel);
    }
    let noise_var = power / ((users.len() * n_t) as f64 * pow(10.0, snr_db / 10.0));
    let model = Arc::new(ChannelModel {
        embedded: users.iter().map(|h| real_embed(h).into_matrix()).collect(),
        users,
        noise_var,
        snr_db,
        n_r,
        n_t,
    });
    let privileged = PrivilegedChannel { model };
    Ok((privileged.oracle(seed), privileged))
}

fn sample_model(model: &ChannelModel, rng: &mut Rng, x: &RealMatrix) -> Result<RealMatrix> {
    let k = model.users.len();
    let per_user = 2 * model.n_t;
    if x.rows() != k * per_user {
        return Err(Error::DimensionMismatch {
            expected: k * per_user,
            got: x.rows(),
        });
    }
    if x.cols() == 0 {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    let s = x.cols();
    let mut y = RealMatrix::zeros(2 * model.n_r, s);
    let mut part = RealMatrix::zeros(2 * model.n_r, s);
    for (u, e) in model.embedded.iter().enumerate() {
        let xu = RealMatrix::from_vec(
            per_user,
            s,
            x.as_slice()[u * per_user * s..(u + 1) * per_user * s].to_vec(),
        )?;
        matmul_into(e, &xu, &mut part);
        for (a, b) in y.as_mut_slice().iter_mut().zip(part.as_slice()) {
            *a += b;
        }
    }
    let std = sqrt(model.noise_var / 2.0);
    for col in 0..s {
        for r in 0..2 * model.n_r {
            let n: f64 = rng.sample(StandardNormal);
            let v = y.get(r, col) + std * n;
            y.set(r, col, v);
        }
    }
    Ok(y)
}

impl ChannelOracle {
    /// Length of the stacked real input, `2·N_t·K`.
    pub fn input_dim(&self) -> usize {
        2 * self.model.n_t * self.model.users.len()
    }

    /// Length of the stacked real output, `2·N_r`.
    pub fn output_dim(&self) -> usize {
        2 * self.model.n_r
    }

    pub fn users(&self) -> usize {
        self.model.users.len()
    }

    pub fn antennas_per_user(&self) -> usize {
        self.model.n_t
    }

    /// Sends the columns of `x` (stacked `(Re x̄; Im x̄)` per user) through the
    /// channel and returns the noisy outputs, one column per input column.
    pub fn sample(&mut self, x: &RealMatrix) -> Result<RealMatrix> {
        sample_model(&self.model, &mut self.rng, x)
    }
}

impl PrivilegedChannel {
    /// Channel matrix of the first (for single-user links, the only) user.
    pub fn h(&self) -> &ComplexMatrix {
        &self.model.users[0]
    }

    pub fn user_channels(&self) -> &[ComplexMatrix] {
        &self.model.users
    }

    /// `[[Re H, -Im H], [Im H, Re H]]` of the first user.
    pub fn embedded_h(&self) -> &RealMatrix {
        &self.model.embedded[0]
    }

    pub fn noise_var(&self) -> f64 {
        self.model.noise_var
    }

    pub fn snr_db(&self) -> f64 {
        self.model.snr_db
    }

    pub fn n_t(&self) -> usize {
        self.model.n_t
    }

    pub fn n_r(&self) -> usize {
        self.model.n_r
    }

    pub fn users(&self) -> usize {
        self.model.users.len()
    }

    /// A fresh sampler over the same channel.
    pub fn oracle(&self, seed: u64) -> ChannelOracle {
        ChannelOracle {
            model: Arc::clone(&self.model),
            rng: rng::seeded(seed, rng::stream::CHANNEL),
        }
    }

    /// Same channel at a different SNR.
    pub fn with_snr(&self, snr_db: f64) -> Result<PrivilegedChannel> {
        make_mac_channel(self.model.users.clone(), snr_db, 0).map(|(_, p)| p)
    }

    fn single_user(&self) -> Result<()> {
        if self.model.users.len() != 1 {
            return Err(Error::InvalidConfig("operation is defined for single-user links"));
        }
        Ok(())
    }

    /// Noiseless received images `HG·x_m` of every message, `2N_r × |M|`.
    pub fn images(&self, g: &ComplexMatrix, space: &MessageSpace) -> Result<RealMatrix> {
        self.single_user()?;
        if g.rows() != self.model.n_t || g.cols() != self.model.n_t {
            return Err(Error::DimensionMismatch {
                expected: self.model.n_t,
                got: g.rows().max(g.cols()),
            });
        }
        if space.n_streams() != self.model.n_t {
            return Err(Error::DimensionMismatch {
                expected: self.model.n_t,
                got: space.n_streams(),
            });
        }
        let hg = real_embed(&self.h().matmul(g)?).into_matrix();
        hg.matmul(&space.all_symbols())
    }

    /// `p(x_m | y) ∝ exp(-‖y - HG x_m‖² / σ²)`, normalised.
    pub fn exact_posterior(&self, g: &ComplexMatrix, space: &MessageSpace, y: &[f64]) -> Result<Vec<f64>> {
        let images = self.images(g, space)?;
        posterior_from_images(&images, self.model.noise_var, y)
    }
}

/// Posterior over the columns of `images` given `y`, max-shifted before the
/// exponentials.
pub fn posterior_from_images(images: &RealMatrix, noise_var: f64, y: &[f64]) -> Result<Vec<f64>> {
    if y.len() != images.rows() {
        return Err(Error::DimensionMismatch {
            expected: images.rows(),
            got: y.len(),
        });
    }
    let logits: Vec<f64> = (0..images.cols())
        .map(|m| {
            let d: f64 = (0..images.rows())
                .map(|r| {
                    let e = y[r] - images.get(r, m);
                    e * e
                })
                .sum();
            -d / noise_var
        })
        .collect();
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = logits.iter().map(|l| exp(l - max)).collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= total);
    Ok(p)
}
