//! Alternating autoencoder training.
//!
//! Each outer iteration runs a receiver epoch (exact gradients through the
//! receiver only) followed by a precoder epoch. The model-free trainers in
//! [`model_free`] and [`mac`] only ever hold a
//! [`ChannelOracle`](crate::channel::ChannelOracle); the model-aware
//! reference in [`model_aware`] differentiates through the true channel.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::complex::RealMatrix;
use crate::constellation::{Constellation, MessageSpace, EXHAUSTIVE_LIMIT};
use crate::precoder::{init_precoder, PrecoderParams, RelaxationSpec};
use crate::receiver::{ce_loss, init_receiver, receiver_forward, Head, ReceiverArch, ReceiverParams, Targets};
use crate::rng::{self, Rng};
use crate::{Error, Result};

pub mod mac;
pub mod model_aware;
pub mod model_free;

pub use mac::{train_mac, MacState};
pub use model_aware::{precoder_loss_gradient, train_model_aware};
pub use model_free::{train_alternating, train_alternating_probed, train_precoder_epoch, train_receiver_epoch};

/// Early stop when the best validation loss improved by less than
/// `min_improvement` over the last `window` outer iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub window: usize,
    pub min_improvement: f64,
}

impl Default for Plateau {
    fn default() -> Self {
        Self {
            window: 500,
            min_improvement: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub constellation: Constellation,
    pub head: Head,
    pub batch: usize,
    pub outer_iters: usize,
    pub rx_inner: usize,
    pub tx_inner: usize,
    pub lr_rx: f64,
    pub lr_tx: f64,
    pub sigma_pi: f64,
    /// Subtract the batch-mean loss in the score-function estimate.
    pub baseline: bool,
    pub seed: u64,
    pub eq_hidden: usize,
    pub dec_hidden: usize,
    pub validate_every: usize,
    pub validation_size: usize,
    pub plateau: Option<Plateau>,
    /// Capacity of the receiver-loss ring buffer kept in [`TrainState`].
    pub loss_window: usize,
    /// Outer-iteration period of the optional MI probe.
    pub probe_every: usize,
}

impl TrainConfig {
    /// Batch 32, learning rates 1e-4, 5000 outer iterations of 10 receiver
    /// and 10 precoder steps, σ_π = 0.1.
    pub fn new(constellation: Constellation, head: Head) -> Self {
        Self {
            constellation,
            head,
            batch: 32,
            outer_iters: 5000,
            rx_inner: 10,
            tx_inner: 10,
            lr_rx: 1e-4,
            lr_tx: 1e-4,
            sigma_pi: 0.1,
            baseline: false,
            seed: 0,
            eq_hidden: crate::receiver::DEFAULT_EQ_HIDDEN,
            dec_hidden: crate::receiver::DEFAULT_DEC_HIDDEN,
            validate_every: 100,
            validation_size: 1024,
            plateau: None,
            loss_window: 1000,
            probe_every: 100,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch == 0 {
            return Err(Error::InvalidConfig("batch size must be at least 1"));
        }
        RelaxationSpec::new(self.sigma_pi)?;
        if !(self.lr_rx > 0.0 && self.lr_tx > 0.0) {
            return Err(Error::InvalidConfig("learning rates must be positive"));
        }
        if self.validate_every == 0 || self.validation_size == 0 || self.probe_every == 0 {
            return Err(Error::InvalidConfig("validation and probe periods must be positive"));
        }
        if self.eq_hidden == 0 || self.dec_hidden == 0 {
            return Err(Error::InvalidConfig("hidden layers must be non-empty"));
        }
        Ok(())
    }

    pub(crate) fn space(&self, streams: usize) -> Result<MessageSpace> {
        let space = MessageSpace::new(self.constellation.clone(), streams)?;
        if self.head == Head::Softmax && space.size() > EXHAUSTIVE_LIMIT {
            return Err(Error::AlphabetTooLarge {
                size: space.size(),
                limit: EXHAUSTIVE_LIMIT,
            });
        }
        Ok(space)
    }
}

/// Mutable state of a training run.
#[derive(Debug, Clone)]
pub struct TrainState {
    pub precoders: Vec<PrecoderParams>,
    pub receiver: ReceiverParams,
    pub relaxation: RelaxationSpec,
    pub space: MessageSpace,
    pub baseline: bool,
    pub outer: usize,
    rng: Rng,
    recent: VecDeque<f64>,
    loss_window: usize,
}

impl TrainState {
    /// Fresh state for `users` transmitters with `n_t` antennas each and a
    /// receiver with `n_r` antennas.
    pub fn new(config: &TrainConfig, users: usize, n_t: usize, n_r: usize) -> Result<Self> {
        config.validate()?;
        if users == 0 {
            return Err(Error::InvalidConfig("at least one user is required"));
        }
        let space = config.space(users * n_t)?;
        let mut precoders = Vec::with_capacity(users);
        for u in 0..users {
            let mut p = init_precoder(n_t, config.seed.wrapping_add(u as u64))?;
            p.set_learning_rate(config.lr_tx);
            precoders.push(p);
        }
        let arch = ReceiverArch::for_space(n_r, &space, config.head).with_hidden(config.eq_hidden, config.dec_hidden);
        let mut receiver = init_receiver(arch, config.seed)?;
        receiver.set_learning_rate(config.lr_rx);
        Ok(Self {
            precoders,
            receiver,
            relaxation: RelaxationSpec::new(config.sigma_pi)?,
            space,
            baseline: config.baseline,
            outer: 0,
            rng: rng::seeded(config.seed, rng::stream::TRAINING),
            recent: VecDeque::with_capacity(config.loss_window),
            loss_window: config.loss_window,
        })
    }

    pub fn users(&self) -> usize {
        self.precoders.len()
    }

    /// Most recent receiver-step losses, oldest first.
    pub fn recent_receiver_losses(&self) -> impl Iterator<Item = &f64> {
        self.recent.iter()
    }

    pub(crate) fn record_receiver_loss(&mut self, loss: f64) {
        if self.loss_window == 0 {
            return;
        }
        if self.recent.len() == self.loss_window {
            self.recent.pop_front();
        }
        self.recent.push_back(loss);
    }

    pub(crate) fn draw_messages(&mut self, count: usize) -> Vec<usize> {
        let size = self.space.size();
        (0..count).map(|_| self.rng.random_range(0..size)).collect()
    }

    pub(crate) fn rng(&mut self) -> &mut Rng {
        &mut self.rng
    }

    /// Per-user symbol blocks and their precoded versions for `indices`.
    pub(crate) fn transmit(&self, indices: &[usize]) -> Result<(Vec<RealMatrix>, Vec<RealMatrix>)> {
        let x = self.space.user_symbols(indices, self.users())?;
        let x_bar = x
            .iter()
            .zip(&self.precoders)
            .map(|(xu, p)| p.precode(xu))
            .collect::<Result<Vec<_>>>()?;
        Ok((x, x_bar))
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            precoders: self.precoders.clone(),
            receiver: self.receiver.clone(),
            iteration: self.outer,
        }
    }
}

/// Stacks per-user blocks vertically into the oracle input layout.
pub(crate) fn stack_users(blocks: &[RealMatrix]) -> Result<RealMatrix> {
    let cols = blocks.first().map_or(0, |b| b.cols());
    let mut data = Vec::new();
    let mut rows = 0;
    for b in blocks {
        if b.cols() != cols {
            return Err(Error::DimensionMismatch {
                expected: cols,
                got: b.cols(),
            });
        }
        rows += b.rows();
        data.extend_from_slice(b.as_slice());
    }
    RealMatrix::from_vec(rows, cols, data)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub precoders: Vec<PrecoderParams>,
    pub receiver: ReceiverParams,
    pub iteration: usize,
}

/// One row per outer iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryRow {
    pub iteration: usize,
    /// Mean receiver-step loss (nats) of the epoch, if it ran.
    pub rx_loss: Option<f64>,
    /// Mean precoder-step loss (nats) of the epoch, if it ran.
    pub tx_loss: Option<f64>,
    /// `Σ_u Tr{G_uᴴG_u}` after the epoch.
    pub trace_power: f64,
    pub val_loss: Option<f64>,
    pub mi_probe: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    /// Best snapshot by validation loss.
    pub best: Snapshot,
    /// State after the last outer iteration.
    pub last: Snapshot,
    pub best_val_loss: Option<f64>,
    pub history: Vec<HistoryRow>,
}

impl TrainOutcome {
    /// Best precoder of the first (for single-user links, the only) user.
    pub fn precoder(&self) -> &PrecoderParams {
        &self.best.precoders[0]
    }

    pub fn receiver(&self) -> &ReceiverParams {
        &self.best.receiver
    }
}

/// Optional per-iteration mutual-information probe supplied by the caller.
pub type Probe<'a> = &'a mut dyn FnMut(&[PrecoderParams]) -> Result<f64>;

/// The two phases of an outer iteration plus held-out scoring.
pub(crate) trait Phases {
    fn receiver_epoch(&mut self, state: &mut TrainState, iters: usize, batch: usize) -> Result<Option<f64>>;
    fn precoder_epoch(&mut self, state: &mut TrainState, iters: usize, batch: usize, user: usize) -> Result<Option<f64>>;
    /// Precode (no relaxation), send, and return the received batch.
    fn observe(&mut self, state: &TrainState, x_bar: &RealMatrix) -> Result<RealMatrix>;
}

fn validation_loss(phases: &mut impl Phases, state: &TrainState, indices: &[usize]) -> Result<f64> {
    let (_, x_bar) = state.transmit(indices)?;
    let y = phases.observe(state, &stack_users(&x_bar)?)?;
    let (probs, _) = receiver_forward(&state.receiver, &y)?;
    let targets = Targets::for_head(state.receiver.head(), &state.space, indices)?;
    Ok(ce_loss(&probs, &targets)?.0)
}

pub(crate) fn run_outer_loop(
    config: &TrainConfig,
    mut state: TrainState,
    phases: &mut impl Phases,
    mut probe: Option<Probe<'_>>,
) -> Result<TrainOutcome> {
    let mut history = Vec::with_capacity(config.outer_iters);
    if config.outer_iters == 0 {
        let snap = state.snapshot();
        return Ok(TrainOutcome {
            best: snap.clone(),
            last: snap,
            best_val_loss: None,
            history,
        });
    }
    let val_indices: Vec<usize> = {
        let mut r = rng::seeded(config.seed, rng::stream::VALIDATION);
        let size = state.space.size();
        (0..config.validation_size).map(|_| r.random_range(0..size)).collect()
    };
    let mut best = state.snapshot();
    let mut best_val = validation_loss(phases, &state, &val_indices)?;
    // (iteration, best validation loss so far) at each validation point
    let mut best_trace: Vec<(usize, f64)> = alloc::vec![(0, best_val)];

    for it in 0..config.outer_iters {
        let rx_loss = phases.receiver_epoch(&mut state, config.rx_inner, config.batch)?;
        let user = it % state.users();
        let tx_loss = phases.precoder_epoch(&mut state, config.tx_inner, config.batch, user)?;
        state.outer = it + 1;

        let mut row = HistoryRow {
            iteration: it + 1,
            rx_loss,
            tx_loss,
            trace_power: state.precoders.iter().map(|p| p.trace_power()).sum(),
            val_loss: None,
            mi_probe: None,
        };
        if let Some(p) = probe.as_mut() {
            if (it + 1) % config.probe_every == 0 {
                row.mi_probe = Some(p(&state.precoders)?);
            }
        }
        let last = it + 1 == config.outer_iters;
        let mut stop = false;
        if (it + 1) % config.validate_every == 0 || last {
            let v = validation_loss(phases, &state, &val_indices)?;
            row.val_loss = Some(v);
            if v < best_val {
                best_val = v;
                best = state.snapshot();
            }
            best_trace.push((it + 1, best_val));
            if let Some(plateau) = config.plateau {
                if it + 1 >= plateau.window {
                    let cutoff = it + 1 - plateau.window;
                    let earlier = best_trace
                        .iter()
                        .rev()
                        .find(|(i, _)| *i <= cutoff)
                        .map(|&(_, v)| v);
                    if let Some(earlier) = earlier {
                        stop = earlier - best_val < plateau.min_improvement;
                    }
                }
            }
        }
        history.push(row);
        if stop {
            break;
        }
    }
    Ok(TrainOutcome {
        best,
        last: state.snapshot(),
        best_val_loss: Some(best_val),
        history,
    })
}
