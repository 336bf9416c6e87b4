//! K-user multiple-access training. All users share one receiver with a
//! sigmoid head over every user's bits; precoder epochs rotate over the
//! users, relaxing only the active user's signal while the others transmit
//! their current precoded symbols.

use crate::channel::ChannelOracle;
use crate::complex::RealMatrix;
use crate::receiver::Head;
use crate::{Error, Result};

use super::model_free::ModelFree;
use super::{run_outer_loop, TrainConfig, TrainOutcome, TrainState};

#[derive(Debug, Clone, PartialEq)]
pub struct MacState {
    pub outcome: TrainOutcome,
    /// User whose precoder the next precoder epoch would train.
    pub next_user: usize,
}

impl MacState {
    pub fn users(&self) -> usize {
        self.outcome.best.precoders.len()
    }

    /// `Bdiag(θ_P1, …, θ_PK)` of the best snapshot.
    pub fn composite_theta(&self) -> RealMatrix {
        let blocks: alloc::vec::Vec<&RealMatrix> =
            self.outcome.best.precoders.iter().map(|p| p.theta().matrix()).collect();
        let dim: usize = blocks.iter().map(|b| b.rows()).sum();
        let mut m = RealMatrix::zeros(dim, dim);
        let mut off = 0;
        for b in blocks {
            for r in 0..b.rows() {
                for c in 0..b.cols() {
                    m.set(off + r, off + c, b.get(r, c));
                }
            }
            off += b.rows();
        }
        m
    }
}

pub fn train_mac(config: &TrainConfig, oracle: &mut ChannelOracle) -> Result<MacState> {
    if config.head != Head::Sigmoid {
        return Err(Error::InvalidConfig("multiple-access training uses the sigmoid head"));
    }
    let users = oracle.users();
    let state = TrainState::new(config, users, oracle.antennas_per_user(), oracle.output_dim() / 2)?;
    let outcome = run_outer_loop(config, state, &mut ModelFree { oracle }, None)?;
    let next_user = outcome.history.len() % users;
    Ok(MacState { outcome, next_user })
}
