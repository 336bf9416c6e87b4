//! Model-free phases: the channel is reached only through a
//! [`ChannelOracle`], which returns forward samples and nothing else.

use crate::channel::ChannelOracle;
use crate::complex::RealMatrix;
use crate::precoder::{precoder_grad_estimate, relax, score_log_density_grad};
use crate::receiver::{ce_loss, receiver_backward, receiver_forward, Targets};
use crate::{Error, Result};

use super::{run_outer_loop, stack_users, Phases, Probe, TrainConfig, TrainOutcome, TrainState};

/// `iters` receiver steps: draw messages, precode, sample the channel,
/// back-propagate the cross-entropy through the receiver and take one Adam
/// step on its parameters. The precoders are not touched. Returns the mean
/// step loss.
pub fn train_receiver_epoch(
    state: &mut TrainState,
    oracle: &mut ChannelOracle,
    iters: usize,
    batch: usize,
) -> Result<Option<f64>> {
    if batch == 0 {
        return Err(Error::InvalidConfig("batch size must be at least 1"));
    }
    let mut total = 0.0;
    for _ in 0..iters {
        let indices = state.draw_messages(batch);
        let (_, x_bar) = state.transmit(&indices)?;
        let y = oracle.sample(&stack_users(&x_bar)?)?;
        let (probs, tape) = receiver_forward(&state.receiver, &y)?;
        let targets = Targets::for_head(state.receiver.head(), &state.space, &indices)?;
        let (loss, _) = ce_loss(&probs, &targets)?;
        let grad = receiver_backward(&state.receiver, &tape, &targets)?;
        state.receiver.apply_gradient(&grad)?;
        state.record_receiver_loss(loss);
        total += loss;
    }
    Ok((iters > 0).then(|| total / iters as f64))
}

/// `iters` precoder steps for `user`: precode, relax that user's signal,
/// sample the channel, score the receiver's per-sample losses and apply the
/// score-function gradient, then project onto the power budget. The receiver
/// is only evaluated. Returns the mean step loss.
pub fn train_precoder_epoch(
    state: &mut TrainState,
    oracle: &mut ChannelOracle,
    iters: usize,
    batch: usize,
    user: usize,
) -> Result<Option<f64>> {
    if batch == 0 {
        return Err(Error::InvalidConfig("batch size must be at least 1"));
    }
    if user >= state.users() {
        return Err(Error::IndexOutOfRange {
            index: user,
            size: state.users(),
        });
    }
    let mut total = 0.0;
    for _ in 0..iters {
        let indices = state.draw_messages(batch);
        let (x, mut x_bar) = state.transmit(&indices)?;
        let spec = state.relaxation;
        let relaxed = relax(&x_bar[user], &spec, state.rng());
        let grad_logpi = score_log_density_grad(&x_bar[user], &relaxed.tilde, &spec)?;
        x_bar[user] = relaxed.tilde;
        let y = oracle.sample(&stack_users(&x_bar)?)?;
        let (probs, _) = receiver_forward(&state.receiver, &y)?;
        let targets = Targets::for_head(state.receiver.head(), &state.space, &indices)?;
        let (loss, per_sample) = ce_loss(&probs, &targets)?;
        let baseline = if state.baseline { loss } else { 0.0 };
        let grad = precoder_grad_estimate(&per_sample, &x[user], &grad_logpi, baseline)?;
        let p = &mut state.precoders[user];
        p.apply_gradient(&grad)?;
        p.project_power();
        total += loss;
    }
    Ok((iters > 0).then(|| total / iters as f64))
}

pub(crate) struct ModelFree<'a> {
    pub oracle: &'a mut ChannelOracle,
}

impl Phases for ModelFree<'_> {
    fn receiver_epoch(&mut self, state: &mut TrainState, iters: usize, batch: usize) -> Result<Option<f64>> {
        train_receiver_epoch(state, self.oracle, iters, batch)
    }

    fn precoder_epoch(&mut self, state: &mut TrainState, iters: usize, batch: usize, user: usize) -> Result<Option<f64>> {
        train_precoder_epoch(state, self.oracle, iters, batch, user)
    }

    fn observe(&mut self, _state: &TrainState, x_bar: &RealMatrix) -> Result<RealMatrix> {
        self.oracle.sample(x_bar)
    }
}

pub(crate) fn check_single_user(oracle: &ChannelOracle) -> Result<()> {
    if oracle.users() != 1 {
        return Err(Error::InvalidConfig("single-user training needs a single-user channel"));
    }
    if oracle.output_dim() != oracle.input_dim() {
        return Err(Error::InvalidConfig("the equalizing receiver needs as many receive as transmit antennas"));
    }
    Ok(())
}

/// Model-free alternating training of one precoder and its receiver.
pub fn train_alternating(config: &TrainConfig, oracle: &mut ChannelOracle) -> Result<TrainOutcome> {
    train_alternating_probed(config, oracle, None)
}

/// [`train_alternating`] with a caller-supplied probe evaluated every
/// `config.probe_every` outer iterations (e.g. a mutual-information estimate
/// computed by code that owns the privileged channel).
pub fn train_alternating_probed(
    config: &TrainConfig,
    oracle: &mut ChannelOracle,
    probe: Option<Probe<'_>>,
) -> Result<TrainOutcome> {
    check_single_user(oracle)?;
    let n = oracle.antennas_per_user();
    let state = TrainState::new(config, 1, n, oracle.output_dim() / 2)?;
    run_outer_loop(config, state, &mut ModelFree { oracle }, probe)
}
