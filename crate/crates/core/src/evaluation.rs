//! Ground-truth metrics. Everything here may look inside the channel.
//!
//! Mutual information is computed from
//! `I = N_t log₂M − (1/|M|) Σ_m E_n{ log₂ Σ_k exp(−d_mk) }`,
//! `d_mk = σ⁻² (‖HG(x_m − x_k) + n‖² − ‖n‖²)`, with both alphabet sums
//! exhaustive and the noise expectation estimated by Monte Carlo. Each noise
//! draw is shared by all `m` (common random numbers).

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix};
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::channel::{ChannelOracle, PrivilegedChannel};
use crate::complex::{ComplexMatrix, RealMatrix};
use crate::constellation::{MessageSpace, EXHAUSTIVE_LIMIT};
use crate::math::{ln, log_sum_exp, sqrt, LN_2};
use crate::precoder::PrecoderParams;
use crate::receiver::{argmax, detect, receiver_forward, ReceiverParams};
use crate::rng::{self, Rng};
use crate::{Error, Result};

pub const MIN_NOISE_DRAWS: usize = 100;
const FRAME_CHUNK: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiEstimate {
    pub value_bits: f64,
    pub std_error_bits: f64,
    pub n_noise_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detector {
    GenieMap,
    TrainedReceiver,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerResult {
    pub bit_errors: u64,
    pub bits_total: u64,
    pub ber: f64,
    pub detector: Detector,
}

impl BerResult {
    fn new(bit_errors: u64, bits_total: u64, detector: Detector) -> Self {
        Self {
            bit_errors,
            bits_total,
            ber: if bits_total == 0 { 0.0 } else { bit_errors as f64 / bits_total as f64 },
            detector,
        }
    }

    /// Binomial standard error `√(p(1−p)/n)`.
    pub fn std_error(&self) -> f64 {
        if self.bits_total == 0 {
            return 0.0;
        }
        sqrt(self.ber * (1.0 - self.ber) / self.bits_total as f64)
    }

    /// Wilson score interval at normal quantile `z` (1.96 for 95%).
    pub fn wilson_interval(&self, z: f64) -> (f64, f64) {
        let n = self.bits_total as f64;
        if n == 0.0 {
            return (0.0, 1.0);
        }
        let p = self.ber;
        let z2 = z * z;
        let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
        let half = z * sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
        ((centre - half).max(0.0), (centre + half).min(1.0))
    }
}

fn check_alphabet(space: &MessageSpace) -> Result<()> {
    if space.size() > EXHAUSTIVE_LIMIT {
        return Err(Error::AlphabetTooLarge {
            size: space.size(),
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    Ok(())
}

/// Monte-Carlo estimate of `I(x; y)` in bits for precoder `g`.
pub fn mutual_information(
    channel: &PrivilegedChannel,
    g: &ComplexMatrix,
    space: &MessageSpace,
    n_noise: usize,
    seed: u64,
) -> Result<MiEstimate> {
    check_alphabet(space)?;
    let images = channel.images(g, space)?;
    let mut rng = rng::seeded(seed, rng::stream::EVALUATION);
    mi_from_images(&images, channel.noise_var(), space, n_noise, &mut rng)
}

/// Same estimator on precomputed noiseless images `HG x_m` (columns).
pub fn mi_from_images(
    images: &RealMatrix,
    noise_var: f64,
    space: &MessageSpace,
    n_noise: usize,
    rng: &mut Rng,
) -> Result<MiEstimate> {
    if n_noise < MIN_NOISE_DRAWS {
        return Err(Error::InvalidConfig("mutual information needs at least 100 noise draws"));
    }
    if images.cols() != space.size() {
        return Err(Error::DimensionMismatch {
            expected: space.size(),
            got: images.cols(),
        });
    }
    let size = space.size();
    let dim = images.rows();
    let columns: Vec<Vec<f64>> = (0..size).map(|m| images.column(m)).collect();
    // ‖a_m − a_k‖²
    let mut dist = vec![0.0; size * size];
    for m in 0..size {
        for k in 0..size {
            dist[m * size + k] = columns[m]
                .iter()
                .zip(&columns[k])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
        }
    }
    let noise_std = sqrt(noise_var / 2.0);
    let entropy = space.n_bits() as f64;
    let mut noise = vec![0.0; dim];
    let mut proj = vec![0.0; size];
    let mut exponents = vec![0.0; size];
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for draw in 0..n_noise {
        for v in noise.iter_mut() {
            *v = noise_std * rng.sample::<f64, _>(StandardNormal);
        }
        for (p, a) in proj.iter_mut().zip(&columns) {
            *p = a.iter().zip(&noise).map(|(x, n)| x * n).sum();
        }
        let mut acc = 0.0;
        for m in 0..size {
            // d_mk = (‖a_m − a_k‖² + 2 (a_m − a_k)·n) / σ²
            for k in 0..size {
                exponents[k] = -(dist[m * size + k] + 2.0 * (proj[m] - proj[k])) / noise_var;
            }
            acc += log_sum_exp(&exponents) / LN_2;
        }
        let sample = acc / size as f64;
        // Welford
        let delta = sample - mean;
        mean += delta / (draw + 1) as f64;
        m2 += delta * (sample - mean);
    }
    let var = m2 / (n_noise - 1) as f64;
    Ok(MiEstimate {
        value_bits: entropy - mean,
        std_error_bits: sqrt(var / n_noise as f64),
        n_noise_samples: n_noise,
    })
}

/// Mean of `−log₂ p(x|y)` under the exact posterior, i.e. the cross-entropy a
/// perfect receiver would reach. Returns `(mean_bits, std_error_bits)`.
pub fn exact_posterior_cross_entropy(
    channel: &PrivilegedChannel,
    g: &ComplexMatrix,
    space: &MessageSpace,
    n_samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    check_alphabet(space)?;
    if n_samples < 2 {
        return Err(Error::InvalidConfig("need at least two samples"));
    }
    let images = channel.images(g, space)?;
    let mut oracle = channel.oracle(seed);
    let mut rng = rng::seeded(seed, rng::stream::EVALUATION);
    let precoder = PrecoderParams::from_complex(g)?;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    let mut done = 0;
    while done < n_samples {
        let chunk = FRAME_CHUNK.min(n_samples - done);
        let idx: Vec<usize> = (0..chunk).map(|_| rng.random_range(0..space.size())).collect();
        let y = oracle.sample(&precoder.precode(&space.symbols_matrix(&idx)?)?)?;
        for (c, &m) in idx.iter().enumerate() {
            let p = crate::channel::posterior_from_images(&images, channel.noise_var(), &y.column(c))?;
            let ce = -ln(p[m].max(f64::MIN_POSITIVE)) / LN_2;
            sum += ce;
            sum_sq += ce * ce;
        }
        done += chunk;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let var = (sum_sq - n * mean * mean) / (n - 1.0);
    Ok((mean, sqrt(var.max(0.0) / n)))
}

fn count_bit_errors(space: &MessageSpace, sent: usize, decided: &[u8]) -> Result<u64> {
    Ok(space
        .index_to_bits(sent)?
        .iter()
        .zip(decided)
        .filter(|(a, b)| a != b)
        .count() as u64)
}

/// Uncoded BER of the maximum a posteriori detector that knows `H`, `G`
/// and `σ²`. Ties go to the lowest message index.
pub fn genie_map_ber(
    channel: &PrivilegedChannel,
    g: &ComplexMatrix,
    space: &MessageSpace,
    n_frames: usize,
    seed: u64,
) -> Result<BerResult> {
    check_alphabet(space)?;
    let images = channel.images(g, space)?;
    let mut oracle = channel.oracle(seed);
    let mut rng = rng::seeded(seed, rng::stream::EVALUATION);
    let precoder = PrecoderParams::from_complex(g)?;
    let columns: Vec<Vec<f64>> = (0..space.size()).map(|m| images.column(m)).collect();
    let mut errors = 0;
    let mut done = 0;
    while done < n_frames {
        let chunk = FRAME_CHUNK.min(n_frames - done);
        let idx: Vec<usize> = (0..chunk).map(|_| rng.random_range(0..space.size())).collect();
        let y = oracle.sample(&precoder.precode(&space.symbols_matrix(&idx)?)?)?;
        for (c, &sent) in idx.iter().enumerate() {
            let yc = y.column(c);
            // equiprobable messages: MAP = minimum distance
            let decided = argmax(columns.iter().map(|a| {
                -a.iter().zip(&yc).map(|(p, q)| (p - q) * (p - q)).sum::<f64>()
            }));
            errors += count_bit_errors(space, sent, &space.index_to_bits(decided)?)?;
        }
        done += chunk;
    }
    Ok(BerResult::new(errors, (n_frames * space.n_bits()) as u64, Detector::GenieMap))
}

/// Uncoded BER of a trained precoder/receiver pair, observed only through the
/// channel oracle.
pub fn receiver_ber(
    oracle: &mut ChannelOracle,
    precoder: &PrecoderParams,
    receiver: &ReceiverParams,
    space: &MessageSpace,
    n_frames: usize,
    seed: u64,
) -> Result<BerResult> {
    let mut rng = rng::seeded(seed, rng::stream::EVALUATION);
    let mut errors = 0;
    let mut done = 0;
    while done < n_frames {
        let chunk = FRAME_CHUNK.min(n_frames - done);
        let idx: Vec<usize> = (0..chunk).map(|_| rng.random_range(0..space.size())).collect();
        let y = oracle.sample(&precoder.precode(&space.symbols_matrix(&idx)?)?)?;
        let (probs, _) = receiver_forward(receiver, &y)?;
        let bits = detect(&probs, receiver.head()).into_bits(space)?;
        for (&sent, decided) in idx.iter().zip(&bits) {
            errors += count_bit_errors(space, sent, decided)?;
        }
        done += chunk;
    }
    Ok(BerResult::new(errors, (n_frames * space.n_bits()) as u64, Detector::TrainedReceiver))
}

/// Search settings for [`diag_power_baseline`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagSearch {
    /// Grid divisions of the total power in the first round.
    pub divisions: usize,
    /// Step shrink factor between rounds.
    pub refine: usize,
    pub rounds: usize,
    /// Noise draws per MI evaluation during the search.
    pub search_noise: usize,
    /// Noise draws for the reported estimate.
    pub final_noise: usize,
    pub seed: u64,
}

impl Default for DiagSearch {
    fn default() -> Self {
        Self {
            divisions: 10,
            refine: 10,
            rounds: 3,
            search_noise: 1000,
            final_noise: 5000,
            seed: 0,
        }
    }
}

/// Right singular vectors `V` of `H` (from the Hermitian `HᴴH`).
pub fn right_singular_vectors(h: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<f64>)> {
    let gram = h.conj_transpose().matmul(h)?;
    let n = gram.rows();
    let m = DMatrix::from_fn(n, n, |r, c| {
        let (a, b) = gram.get(r, c);
        Complex::new(a, b)
    });
    let svd = nalgebra::SVD::try_new(m, true, false, f64::EPSILON, 10_000).ok_or(Error::SvdFailure)?;
    let u = svd.u.ok_or(Error::SvdFailure)?;
    let mut v = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let z = u[(r, c)];
            v.set(r, c, (z.re, z.im));
        }
    }
    let gains = svd.singular_values.iter().map(|s| sqrt(s.max(0.0))).collect();
    Ok((v, gains))
}

/// `V · diag(√p)`.
pub fn diag_precoder(v: &ComplexMatrix, powers: &[f64]) -> Result<ComplexMatrix> {
    let d: Vec<(f64, f64)> = powers.iter().map(|&p| (sqrt(p.max(0.0)), 0.0)).collect();
    v.matmul(&ComplexMatrix::diagonal(&d))
}

/// Power-allocation baseline: `G = V·diag(√p)` with `V` the right singular
/// vectors of `H`, `p ≥ 0`, `Σp = N_t`, and `p` chosen to maximise the
/// mutual information by pairwise power transfers on a grid that is refined
/// between rounds.
pub fn diag_power_baseline(
    channel: &PrivilegedChannel,
    space: &MessageSpace,
    search: &DiagSearch,
) -> Result<(ComplexMatrix, MiEstimate)> {
    check_alphabet(space)?;
    if search.divisions == 0 || search.refine < 2 {
        return Err(Error::InvalidConfig("grid search needs divisions ≥ 1 and refine ≥ 2"));
    }
    let n = channel.n_t();
    let (v, _) = right_singular_vectors(channel.h())?;
    let total = n as f64;
    let score = |p: &[f64]| -> Result<f64> {
        let g = diag_precoder(&v, p)?;
        Ok(mutual_information(channel, &g, space, search.search_noise, search.seed)?.value_bits)
    };
    let mut powers = vec![1.0; n];
    let mut best = score(&powers)?;
    let mut step = total / search.divisions as f64;
    for _ in 0..search.rounds {
        loop {
            let mut candidate: Option<(Vec<f64>, f64)> = None;
            for to in 0..n {
                for from in 0..n {
                    if to == from {
                        continue;
                    }
                    for k in 1..=search.divisions {
                        let amount = (k as f64 * step).min(powers[from]);
                        if amount <= 0.0 {
                            break;
                        }
                        let mut p = powers.clone();
                        p[from] -= amount;
                        p[to] += amount;
                        let s = score(&p)?;
                        if s > candidate.as_ref().map_or(best, |c| c.1) {
                            candidate = Some((p, s));
                        }
                        if amount >= powers[from] {
                            break;
                        }
                    }
                }
            }
            match candidate {
                Some((p, s)) if s > best + 1e-12 => {
                    powers = p;
                    best = s;
                }
                _ => break,
            }
        }
        step /= search.refine as f64;
    }
    let g = diag_precoder(&v, &powers)?;
    let estimate = mutual_information(channel, &g, space, search.final_noise, search.seed)?;
    Ok((g, estimate))
}
