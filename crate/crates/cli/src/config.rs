//! Experiment configuration, stored as TOML.
//!
//! ```toml
//! mode = "model_free"        # model_free | model_aware | mac
//! seed = 0
//! head = "softmax"           # softmax | sigmoid
//! snr_db = 4.0               # or a list: [0.0, 4.0, 8.0]
//! sigma_pi = 0.1
//! batch = 32
//! outer_iters = 5000
//! rx_inner = 10
//! tx_inner = 10
//! lr_rx = 1e-4
//! lr_tx = 1e-4
//! baseline = false
//! sweep = "retrain"          # retrain | pivot
//!
//! [constellation]
//! kind = "psk"               # psk | qam
//! order = 2
//!
//! [channel]
//! name = "H1"                # H1 | H2 | identity (needs `size`)
//! # or an inline matrix, row-major (re, im) pairs:
//! # rows = 2
//! # cols = 2
//! # entries = [[2.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0, 0.0]]
//!
//! # mode = "mac" reads one channel per user instead:
//! # [[mac.users]]
//! # name = "identity"
//! # size = 1
//! ```
//!
//! Every key except `snr_db`, `[constellation]` and the channel has a
//! default. Unknown keys are rejected.

use std::path::Path;

use freeprecode_core::constellation::{make_constellation, EXHAUSTIVE_LIMIT};
use freeprecode_core::prelude::*;
use freeprecode_core::training::{Plateau, TrainConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    ModelFree,
    ModelAware,
    Mac,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::ModelFree => "model_free",
            Mode::ModelAware => "model_aware",
            Mode::Mac => "mac",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "model_free" => Some(Mode::ModelFree),
            "model_aware" => Some(Mode::ModelAware),
            "mac" => Some(Mode::Mac),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadChoice {
    #[default]
    Softmax,
    Sigmoid,
}

impl From<HeadChoice> for Head {
    fn from(h: HeadChoice) -> Head {
        match h {
            HeadChoice::Softmax => Head::Softmax,
            HeadChoice::Sigmoid => Head::Sigmoid,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Train afresh at every SNR of the grid.
    #[default]
    Retrain,
    /// Train once at `pivot_snr_db` and evaluate across the grid.
    Pivot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SnrSpec {
    Scalar(f64),
    Grid(Vec<f64>),
}

impl SnrSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            SnrSpec::Scalar(v) => vec![*v],
            SnrSpec::Grid(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindChoice {
    Psk,
    Qam,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationSpec {
    pub kind: KindChoice,
    pub order: usize,
}

/// A named channel or an inline row-major matrix of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Dimension of the `identity` channel.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<[f64; 2]>>,
}

pub fn h1() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, vec![2.0, 1.0, 1.0, 1.0]).expect("2x2")
}

pub fn h2() -> ComplexMatrix {
    #[rustfmt::skip]
    let pairs = [
        (1.0, 0.0), (0.0, 0.5), (0.3, 0.0),
        (0.0, -0.5), (1.5, 0.0), (0.0, -0.1),
        (0.3, 0.0), (0.0, 0.1), (0.5, 0.0),
    ];
    ComplexMatrix::from_pairs(3, 3, &pairs).expect("3x3")
}

impl ChannelSpec {
    pub fn named(name: &str) -> Self {
        Self {
            name: Some(name.to_string()),
            ..Self::default()
        }
    }

    pub fn inline(h: &ComplexMatrix) -> Self {
        let mut entries = Vec::with_capacity(h.rows() * h.cols());
        for r in 0..h.rows() {
            for c in 0..h.cols() {
                let (a, b) = h.get(r, c);
                entries.push([a, b]);
            }
        }
        Self {
            rows: Some(h.rows()),
            cols: Some(h.cols()),
            entries: Some(entries),
            ..Self::default()
        }
    }

    pub fn matrix(&self) -> Result<ComplexMatrix> {
        let inline = self.rows.is_some() || self.cols.is_some() || self.entries.is_some();
        match (&self.name, inline) {
            (Some(_), true) => Err(CliError::field(
                "channel",
                "give either `name` or `rows`/`cols`/`entries`, not both",
            )),
            (Some(name), false) => match name.as_str() {
                "H1" => Ok(h1()),
                "H2" => Ok(h2()),
                "identity" => {
                    let n = self
                        .size
                        .ok_or_else(|| CliError::field("channel.size", "the identity channel needs a size"))?;
                    if n == 0 {
                        return Err(CliError::field("channel.size", "must be at least 1"));
                    }
                    Ok(ComplexMatrix::identity(n))
                }
                other => Err(CliError::field(
                    "channel.name",
                    format!("unknown channel `{other}` (known: H1, H2, identity)"),
                )),
            },
            (None, false) => Err(CliError::field("channel", "needs `name` or an inline matrix")),
            (None, true) => {
                let rows = self.rows.ok_or_else(|| CliError::field("channel.rows", "missing"))?;
                let cols = self.cols.ok_or_else(|| CliError::field("channel.cols", "missing"))?;
                let entries = self
                    .entries
                    .as_ref()
                    .ok_or_else(|| CliError::field("channel.entries", "missing"))?;
                if rows == 0 || cols == 0 {
                    return Err(CliError::field("channel", "dimensions must be positive"));
                }
                if entries.len() != rows * cols {
                    return Err(CliError::field(
                        "channel.entries",
                        format!("expected {} entries for a {rows}x{cols} matrix, found {}", rows * cols, entries.len()),
                    ));
                }
                let pairs: Vec<(f64, f64)> = entries.iter().map(|e| (e[0], e[1])).collect();
                ComplexMatrix::from_pairs(rows, cols, &pairs)
                    .map_err(|e| CliError::field("channel.entries", e.to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacSpec {
    pub users: Vec<ChannelSpec>,
}

fn d_sigma_pi() -> f64 {
    0.1
}
fn d_batch() -> usize {
    32
}
fn d_outer() -> usize {
    5000
}
fn d_inner() -> usize {
    10
}
fn d_lr() -> f64 {
    1e-4
}
fn d_validate_every() -> usize {
    100
}
fn d_validation_size() -> usize {
    1024
}
fn d_probe_every() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub head: HeadChoice,
    pub snr_db: SnrSpec,
    #[serde(default = "d_sigma_pi")]
    pub sigma_pi: f64,
    #[serde(default = "d_batch")]
    pub batch: usize,
    #[serde(default = "d_outer")]
    pub outer_iters: usize,
    #[serde(default = "d_inner")]
    pub rx_inner: usize,
    #[serde(default = "d_inner")]
    pub tx_inner: usize,
    #[serde(default = "d_lr")]
    pub lr_rx: f64,
    #[serde(default = "d_lr")]
    pub lr_tx: f64,
    #[serde(default)]
    pub baseline: bool,
    #[serde(default = "d_validate_every")]
    pub validate_every: usize,
    #[serde(default = "d_validation_size")]
    pub validation_size: usize,
    /// Stop early once the best validation loss improves by less than 1e-4
    /// over 500 outer iterations.
    #[serde(default)]
    pub early_stop: bool,
    /// Noise draws for the mutual-information probe written to the history;
    /// no probe when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_noise: Option<usize>,
    #[serde(default = "d_probe_every")]
    pub probe_every: usize,
    #[serde(default)]
    pub sweep: SweepMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pivot_snr_db: Option<f64>,
    pub constellation: ConstellationSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mac: Option<MacSpec>,
}

pub const SIGMA_PI_RANGE: (f64, f64) = (0.01, 0.15);

impl ExperimentConfig {
    /// H₁, BPSK, softmax head, 4 dB, all other keys at their defaults.
    pub fn example() -> Self {
        Self::parse(
            "snr_db = 4.0\n[constellation]\nkind = \"psk\"\norder = 2\n[channel]\nname = \"H1\"\n",
        )
        .expect("built-in example parses")
    }

    /// Parses and validates. Parse errors carry the line, column and key.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical serialization, in hex.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn constellation(&self) -> Result<Constellation> {
        let kind = match self.constellation.kind {
            KindChoice::Psk => ConstellationKind::Psk,
            KindChoice::Qam => ConstellationKind::Qam,
        };
        make_constellation(kind, self.constellation.order)
            .map_err(|e| CliError::field("constellation", e.to_string()))
    }

    /// Channel matrices, one per user.
    pub fn channels(&self) -> Result<Vec<ComplexMatrix>> {
        match self.mode {
            Mode::Mac => {
                let mac = self
                    .mac
                    .as_ref()
                    .ok_or_else(|| CliError::field("mac", "mode `mac` needs a [mac] table with users"))?;
                if mac.users.is_empty() {
                    return Err(CliError::field("mac.users", "at least one user is required"));
                }
                mac.users.iter().map(ChannelSpec::matrix).collect()
            }
            _ => {
                let spec = self
                    .channel
                    .as_ref()
                    .ok_or_else(|| CliError::field("channel", "missing [channel] table"))?;
                Ok(vec![spec.matrix()?])
            }
        }
    }

    /// Messages carried per channel use across all users.
    pub fn space(&self) -> Result<MessageSpace> {
        let channels = self.channels()?;
        let streams: usize = channels.iter().map(|h| h.cols()).sum();
        Ok(MessageSpace::new(self.constellation()?, streams)?)
    }

    pub fn train_config(&self) -> Result<TrainConfig> {
        let mut c = TrainConfig::new(self.constellation()?, self.head.into());
        c.batch = self.batch;
        c.outer_iters = self.outer_iters;
        c.rx_inner = self.rx_inner;
        c.tx_inner = self.tx_inner;
        c.lr_rx = self.lr_rx;
        c.lr_tx = self.lr_tx;
        c.sigma_pi = self.sigma_pi;
        c.baseline = self.baseline;
        c.seed = self.seed;
        c.validate_every = self.validate_every;
        c.validation_size = self.validation_size;
        c.probe_every = self.probe_every;
        c.plateau = self.early_stop.then(Plateau::default);
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        if self.batch == 0 {
            return Err(CliError::field("batch", "must be at least 1"));
        }
        if !(self.sigma_pi > 0.0 && self.sigma_pi < 1.0) {
            return Err(CliError::field("sigma_pi", "must lie in (0, 1)"));
        }
        for (name, lr) in [("lr_rx", self.lr_rx), ("lr_tx", self.lr_tx)] {
            if !(lr > 0.0 && lr.is_finite()) {
                return Err(CliError::field(name, "must be positive"));
            }
        }
        if self.validate_every == 0 || self.validation_size == 0 {
            return Err(CliError::field("validate_every", "validation period and size must be positive"));
        }
        if self.probe_every == 0 {
            return Err(CliError::field("probe_every", "must be positive"));
        }
        let snrs = self.snr_db.values();
        if snrs.is_empty() || snrs.iter().any(|s| !s.is_finite()) {
            return Err(CliError::field("snr_db", "needs at least one finite value"));
        }
        if let Some(p) = self.pivot_snr_db {
            if !p.is_finite() {
                return Err(CliError::field("pivot_snr_db", "must be finite"));
            }
        }
        let channels = self.channels()?;
        let space = self.space()?;
        if self.head == HeadChoice::Softmax && space.size() > EXHAUSTIVE_LIMIT {
            return Err(CliError::field(
                "head",
                format!(
                    "softmax over {} messages exceeds the limit of {EXHAUSTIVE_LIMIT}; use the sigmoid head",
                    space.size()
                ),
            ));
        }
        match self.mode {
            Mode::Mac => {
                if self.head != HeadChoice::Sigmoid {
                    return Err(CliError::field("head", "mode `mac` uses the sigmoid head"));
                }
                let (n_r, n_t) = (channels[0].rows(), channels[0].cols());
                if channels.iter().any(|h| h.rows() != n_r || h.cols() != n_t) {
                    return Err(CliError::field("mac.users", "all users need channels of the same shape"));
                }
            }
            _ => {
                if self.mac.is_some() {
                    return Err(CliError::field("mac", "only valid with mode `mac`"));
                }
                if channels[0].rows() != channels[0].cols() {
                    return Err(CliError::field("channel", "needs as many receive as transmit antennas"));
                }
            }
        }
        Ok(())
    }

    /// Human-readable warnings for settings outside the recommended range.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        let (lo, hi) = SIGMA_PI_RANGE;
        if self.sigma_pi < lo || self.sigma_pi > hi {
            w.push(format!("sigma_pi = {} lies outside the recommended [{lo}, {hi}]", self.sigma_pi));
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::example();
        assert_eq!(c.mode, Mode::ModelFree);
        assert_eq!(c.batch, 32);
        assert_eq!(c.outer_iters, 5000);
        assert_eq!(c.lr_rx, 1e-4);
        assert_eq!(c.sweep, SweepMode::Retrain);
        assert_eq!(c.channels().unwrap()[0], h1());
    }

    #[test]
    fn round_trip_is_idempotent() {
        let mut c = ExperimentConfig::example();
        c.snr_db = SnrSpec::Grid(vec![0.0, 4.5, 8.0]);
        c.channel = Some(ChannelSpec::inline(&h2()));
        c.probe_noise = Some(200);
        let text = c.to_toml();
        let back = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_toml(), text);
        assert_eq!(back.hash(), c.hash());
    }

    #[test]
    fn integer_snr_accepted() {
        let c = ExperimentConfig::parse(
            "snr_db = [0, 4, 8]\n[constellation]\nkind = \"psk\"\norder = 2\n[channel]\nname = \"H1\"\n",
        )
        .unwrap();
        assert_eq!(c.snr_db.values(), vec![0.0, 4.0, 8.0]);
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = ExperimentConfig::parse(
            "snr_db = 4.0\nbatchsize = 3\n[constellation]\nkind = \"psk\"\norder = 2\n[channel]\nname = \"H1\"\n",
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2") && msg.contains("batchsize"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn semantic_errors_name_the_field() {
        let base = "snr_db = 4.0\n[constellation]\nkind = \"psk\"\norder = 2\n";
        let cases = [
            (format!("batch = 0\n{base}[channel]\nname = \"H1\"\n"), "batch"),
            (format!("sigma_pi = 1.5\n{base}[channel]\nname = \"H1\"\n"), "sigma_pi"),
            (format!("{base}[channel]\nname = \"H9\"\n"), "channel.name"),
            (format!("{base}[channel]\nrows = 2\ncols = 2\nentries = [[1.0, 0.0]]\n"), "channel.entries"),
            (format!("{base}[channel]\nrows = 2\ncols = 3\nentries = [[1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0, 0.0]]\n"), "channel"),
            (format!("mode = \"mac\"\n{base}[[mac.users]]\nname = \"H1\"\n"), "head"),
        ];
        for (text, field) in cases {
            match ExperimentConfig::parse(&text) {
                Err(CliError::Field { field: f, .. }) => assert_eq!(f, field, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn softmax_alphabet_limit() {
        let text = "snr_db = 4.0\n[constellation]\nkind = \"qam\"\norder = 64\n[channel]\nname = \"H2\"\n";
        assert!(matches!(ExperimentConfig::parse(text), Err(CliError::Field { field: "head", .. })));
        let text = format!("head = \"sigmoid\"\n{text}");
        assert!(ExperimentConfig::parse(&text).is_ok());
    }

    #[test]
    fn sigma_pi_warning() {
        let mut c = ExperimentConfig::example();
        assert!(c.warnings().is_empty());
        c.sigma_pi = 0.3;
        assert_eq!(c.warnings().len(), 1);
    }

    #[test]
    fn mac_users() {
        let c = ExperimentConfig::parse(
            "mode = \"mac\"\nhead = \"sigmoid\"\nsnr_db = 3.0\n[constellation]\nkind = \"psk\"\norder = 2\n\
             [[mac.users]]\nname = \"identity\"\nsize = 1\n[[mac.users]]\nrows = 1\ncols = 1\nentries = [[0.5, 0.5]]\n",
        )
        .unwrap();
        assert_eq!(c.channels().unwrap().len(), 2);
        assert_eq!(c.space().unwrap().n_streams(), 2);
        assert_eq!(ExperimentConfig::parse(&c.to_toml()).unwrap(), c);
    }
}
