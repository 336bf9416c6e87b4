//! Linear MIMO precoder design for finite-alphabet inputs without a channel model.
//!
//! The transmitter (a linear precoder `G`) and the receiver (a small dense
//! network) form an autoencoder around a channel that can only be sampled.
//! The receiver is trained with exact back-propagated gradients; the precoder
//! is trained with a score-function estimate obtained by relaxing its output
//! with a known Gaussian density, so no derivative of the channel is needed.
//!
//! Evaluation code (mutual information, genie MAP detection, a diagonal power
//! allocation baseline) is allowed to look inside the channel through
//! [`channel::PrivilegedChannel`]; the training loop only ever receives a
//! [`channel::ChannelOracle`].
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::needless_range_loop)]
#![allow(clippy::too_many_arguments)]

extern crate alloc;

pub mod channel;
pub mod complex;
pub mod constellation;
mod error;
pub mod evaluation;
mod math;
pub mod optimizer;
pub mod precoder;
pub mod receiver;
pub mod rng;
pub mod training;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::channel::{make_channel, make_mac_channel, ChannelOracle, PrivilegedChannel};
    pub use crate::complex::{ComplexMatrix, RealEmbedding, RealMatrix};
    pub use crate::constellation::{Constellation, ConstellationKind, MessageSpace};
    pub use crate::evaluation::{BerResult, Detector, MiEstimate};
    pub use crate::precoder::{PrecoderParams, RelaxationSpec};
    pub use crate::receiver::{Head, ReceiverArch, ReceiverParams, Targets};
    pub use crate::training::{TrainConfig, TrainOutcome};
    pub use crate::{Error, Result};
}
