//! Model-aware reference trainer: same alternating loop, but the precoder
//! gradient is back-propagated through the receiver and the true channel
//! `[[Re H, -Im H], [Im H, Re H]]` instead of being estimated.

use alloc::vec::Vec;

use crate::channel::{ChannelOracle, PrivilegedChannel};
use crate::complex::RealMatrix;
use crate::precoder::precoder_exact_grad;
use crate::receiver::{ce_loss, receiver_backward, receiver_forward, ReceiverParams, Targets};
use crate::{Error, Result};

use super::model_free::{check_single_user, train_receiver_epoch};
use super::{run_outer_loop, stack_users, Phases, TrainConfig, TrainOutcome, TrainState};

/// Mean cross-entropy of `receiver` on the received batch `y` and its exact
/// gradient with respect to `[Re G | Im G]`, given that `y = H G x + n` with
/// `n` independent of `G`.
pub fn precoder_loss_gradient(
    receiver: &ReceiverParams,
    embedded_h: &RealMatrix,
    y: &RealMatrix,
    x: &RealMatrix,
    targets: &Targets,
) -> Result<(f64, Vec<f64>)> {
    let (probs, tape) = receiver_forward(receiver, y)?;
    let (loss, _) = ce_loss(&probs, targets)?;
    let grad = receiver_backward(receiver, &tape, targets)?;
    let grad_xbar = embedded_h.transpose().matmul(&grad.input)?;
    Ok((loss, precoder_exact_grad(&grad_xbar, x)?))
}

struct ModelAware {
    oracle: ChannelOracle,
    embedded_h: RealMatrix,
}

impl Phases for ModelAware {
    fn receiver_epoch(&mut self, state: &mut TrainState, iters: usize, batch: usize) -> Result<Option<f64>> {
        train_receiver_epoch(state, &mut self.oracle, iters, batch)
    }

    fn precoder_epoch(&mut self, state: &mut TrainState, iters: usize, batch: usize, user: usize) -> Result<Option<f64>> {
        if batch == 0 {
            return Err(Error::InvalidConfig("batch size must be at least 1"));
        }
        let mut total = 0.0;
        for _ in 0..iters {
            let indices = state.draw_messages(batch);
            let (x, x_bar) = state.transmit(&indices)?;
            let y = self.oracle.sample(&stack_users(&x_bar)?)?;
            let targets = Targets::for_head(state.receiver.head(), &state.space, &indices)?;
            let (loss, grad) = precoder_loss_gradient(&state.receiver, &self.embedded_h, &y, &x[user], &targets)?;
            let p = &mut state.precoders[user];
            p.apply_gradient(&grad)?;
            p.project_power();
            total += loss;
        }
        Ok((iters > 0).then(|| total / iters as f64))
    }

    fn observe(&mut self, _state: &TrainState, x_bar: &RealMatrix) -> Result<RealMatrix> {
        self.oracle.sample(x_bar)
    }
}

/// Alternating training with exact precoder gradients (needs the channel).
pub fn train_model_aware(config: &TrainConfig, channel: &PrivilegedChannel) -> Result<TrainOutcome> {
    let oracle = channel.oracle(config.seed);
    check_single_user(&oracle)?;
    let state = TrainState::new(config, 1, channel.n_t(), channel.n_r())?;
    let mut phases = ModelAware {
        oracle,
        embedded_h: channel.embedded_h().clone(),
    };
    run_outer_loop(config, state, &mut phases, None)
}
