//! The four subcommands as library functions.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use freeprecode_core::evaluation::{
    diag_power_baseline, genie_map_ber, mutual_information, receiver_ber, DiagSearch,
};
use freeprecode_core::prelude::*;
use freeprecode_core::training::{
    train_alternating_probed, train_mac, train_model_aware, HistoryRow, Snapshot,
};
use rayon::prelude::*;

use crate::checkpoint::Checkpoint;
use crate::config::{ExperimentConfig, Mode, SnrSpec, SweepMode};
use crate::error::{CliError, Result};
use crate::output::{write_history, write_rows, EvalRow, SweepRow};

pub const CHECKPOINT_FILE: &str = "checkpoint.txt";
pub const HISTORY_FILE: &str = "history.csv";
pub const DEFAULT_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    MiModelFree,
    MiNoPrecoder,
    MiDiagBaseline,
    BerMap,
    BerReceiver,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::MiModelFree,
        Metric::MiNoPrecoder,
        Metric::MiDiagBaseline,
        Metric::BerMap,
        Metric::BerReceiver,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::MiModelFree => "mi_model_free",
            Metric::MiNoPrecoder => "mi_no_precoder",
            Metric::MiDiagBaseline => "mi_diag_baseline",
            Metric::BerMap => "ber_map",
            Metric::BerReceiver => "ber_receiver",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| CliError::field("metrics", format!("unknown metric `{s}`")))
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub snr_db: Option<Vec<f64>>,
    pub mode: Option<Mode>,
}

impl Overrides {
    pub fn apply(&self, config: &mut ExperimentConfig) {
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(snr) = &self.snr_db {
            config.snr_db = match snr.as_slice() {
                [one] => SnrSpec::Scalar(*one),
                many => SnrSpec::Grid(many.to_vec()),
            };
        }
        if let Some(mode) = self.mode {
            config.mode = mode;
        }
    }
}

/// Trains `config` at `snr_db` and returns the best snapshot as a checkpoint
/// together with the per-iteration history.
pub fn train(config: &ExperimentConfig, snr_db: f64) -> Result<(Checkpoint, Vec<HistoryRow>)> {
    let tc = config.train_config()?;
    let mut channels = config.channels()?;
    let (best, history): (Snapshot, Vec<HistoryRow>) = match config.mode {
        Mode::ModelFree => {
            let (mut oracle, privileged) = make_channel(channels.remove(0), snr_db, config.seed)?;
            let space = config.space()?;
            let outcome = match config.probe_noise {
                Some(n) => {
                    let seed = config.seed;
                    let mut probe = |p: &[PrecoderParams]| -> freeprecode_core::Result<f64> {
                        Ok(mutual_information(&privileged, &p[0].g(), &space, n, seed)?.value_bits)
                    };
                    train_alternating_probed(&tc, &mut oracle, Some(&mut probe))?
                }
                None => train_alternating_probed(&tc, &mut oracle, None)?,
            };
            (outcome.best, outcome.history)
        }
        Mode::ModelAware => {
            let (_, privileged) = make_channel(channels.remove(0), snr_db, config.seed)?;
            let outcome = train_model_aware(&tc, &privileged)?;
            (outcome.best, outcome.history)
        }
        Mode::Mac => {
            let (mut oracle, _) = make_mac_channel(channels, snr_db, config.seed)?;
            let state = train_mac(&tc, &mut oracle)?;
            (state.outcome.best, state.outcome.history)
        }
    };
    let mut stored = config.clone();
    stored.snr_db = SnrSpec::Scalar(snr_db);
    let checkpoint = Checkpoint {
        config: stored,
        seed: config.seed,
        iteration: best.iteration,
        precoders: best.precoders,
        receiver: best.receiver,
    };
    Ok((checkpoint, history))
}

fn single_snr(config: &ExperimentConfig) -> Result<f64> {
    match config.snr_db.values().as_slice() {
        [one] => Ok(*one),
        _ => Err(CliError::field(
            "snr_db",
            "training needs a single SNR; pass --snr-db or use `sweep`",
        )),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// `train`: writes `checkpoint.txt` and `history.csv` into `out_dir`.
pub fn cmd_train(config_path: &Path, out_dir: &Path, overrides: &Overrides) -> Result<PathBuf> {
    let mut config = ExperimentConfig::load(config_path)?;
    overrides.apply(&mut config);
    let config = ExperimentConfig::parse(&config.to_toml())?;
    for w in config.warnings() {
        eprintln!("warning: {w}");
    }
    let snr = single_snr(&config)?;
    let (checkpoint, history) = train(&config, snr)?;
    create_dir(out_dir)?;
    let path = out_dir.join(CHECKPOINT_FILE);
    checkpoint.save(&path)?;
    write_history(&out_dir.join(HISTORY_FILE), &history)?;
    Ok(path)
}

fn hstack(channels: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let rows = channels[0].rows();
    let cols: usize = channels.iter().map(|h| h.cols()).sum();
    let mut out = ComplexMatrix::zeros(rows, cols);
    let mut off = 0;
    for h in channels {
        for r in 0..rows {
            for c in 0..h.cols() {
                out.set(r, off + c, h.get(r, c));
            }
        }
        off += h.cols();
    }
    Ok(out)
}

/// Evaluates a checkpoint on an SNR grid. A multiple-access checkpoint is
/// evaluated as the equivalent single link `[H_1 … H_K]` with the
/// block-diagonal precoder, which has the same noise level and outputs.
pub fn evaluate(
    checkpoint: &Checkpoint,
    snr_grid: &[f64],
    metrics: &[Metric],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<EvalRow>> {
    let h = hstack(&checkpoint.config.channels()?)?;
    let space = checkpoint.config.space()?;
    let g = checkpoint.composite_precoder();
    let precoder = PrecoderParams::from_complex(&g)?;
    let identity = ComplexMatrix::identity(g.rows());
    let cells: Vec<Result<Vec<EvalRow>>> = snr_grid
        .par_iter()
        .map(|&snr| {
            let (_, privileged) = make_channel(h.clone(), snr, seed)?;
            let mut rows = Vec::with_capacity(metrics.len());
            for &metric in metrics {
                let (value, std_err, count) = match metric {
                    Metric::MiModelFree | Metric::MiNoPrecoder => {
                        let gm = if metric == Metric::MiModelFree { &g } else { &identity };
                        let e = mutual_information(&privileged, gm, &space, n_samples, seed)?;
                        (e.value_bits, e.std_error_bits, n_samples as u64)
                    }
                    Metric::MiDiagBaseline => {
                        let search = DiagSearch {
                            search_noise: n_samples.min(1000),
                            final_noise: n_samples,
                            seed,
                            ..DiagSearch::default()
                        };
                        let (_, e) = diag_power_baseline(&privileged, &space, &search)?;
                        (e.value_bits, e.std_error_bits, n_samples as u64)
                    }
                    Metric::BerMap => {
                        let r = genie_map_ber(&privileged, &g, &space, n_samples, seed)?;
                        (r.ber, r.std_error(), r.bits_total)
                    }
                    Metric::BerReceiver => {
                        let mut oracle = privileged.oracle(seed);
                        let r = receiver_ber(&mut oracle, &precoder, &checkpoint.receiver, &space, n_samples, seed)?;
                        (r.ber, r.std_error(), r.bits_total)
                    }
                };
                rows.push(EvalRow {
                    snr_db: snr,
                    metric: metric.name().to_string(),
                    value,
                    std_err,
                    count,
                });
            }
            Ok(rows)
        })
        .collect();
    let mut out = Vec::new();
    for c in cells {
        out.extend(c?);
    }
    Ok(out)
}

/// `eval`: writes `results.csv` rows for every (SNR, metric) pair. The grid
/// defaults to the SNR the checkpoint was trained at.
pub fn cmd_eval(
    checkpoint_path: &Path,
    out: &Path,
    snr_grid: Option<&[f64]>,
    metrics: &[Metric],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<EvalRow>> {
    let checkpoint = Checkpoint::load(checkpoint_path)?;
    let grid = match snr_grid {
        Some(g) => g.to_vec(),
        None => checkpoint.config.snr_db.values(),
    };
    let rows = evaluate(&checkpoint, &grid, metrics, n_samples, seed)?;
    write_rows(out, &rows)?;
    Ok(rows)
}

pub const SWEEP_METHODS: [&str; 4] = ["model_free", "model_aware", "diag_baseline", "no_precoder"];

/// Mutual information of the four methods at every SNR of the config grid.
pub fn sweep(config: &ExperimentConfig, n_samples: usize) -> Result<Vec<SweepRow>> {
    if config.mode == Mode::Mac {
        return Err(CliError::field("mode", "sweep compares single-link methods; `mac` is not supported"));
    }
    let grid = config.snr_db.values();
    let h = config.channels()?.remove(0);
    let space = config.space()?;
    let seed = config.seed;
    let with_mode = |mode: Mode| {
        let mut c = config.clone();
        c.mode = mode;
        c
    };
    let (free_cfg, aware_cfg) = (with_mode(Mode::ModelFree), with_mode(Mode::ModelAware));
    let train_pair = |snr: f64| -> Result<(ComplexMatrix, ComplexMatrix)> {
        let (a, b) = rayon::join(|| train(&free_cfg, snr), || train(&aware_cfg, snr));
        Ok((a?.0.composite_precoder(), b?.0.composite_precoder()))
    };
    let pivot = match config.sweep {
        SweepMode::Pivot => Some(train_pair(config.pivot_snr_db.unwrap_or(grid[0]))?),
        SweepMode::Retrain => None,
    };
    let cells: Vec<Result<Vec<SweepRow>>> = grid
        .par_iter()
        .map(|&snr| {
            let (g_free, g_aware) = match &pivot {
                Some(p) => p.clone(),
                None => train_pair(snr)?,
            };
            let (_, privileged) = make_channel(h.clone(), snr, seed)?;
            let search = DiagSearch {
                search_noise: n_samples.min(1000),
                final_noise: n_samples,
                seed,
                ..DiagSearch::default()
            };
            let (_, diag) = diag_power_baseline(&privileged, &space, &search)?;
            let mi = |g: &ComplexMatrix| mutual_information(&privileged, g, &space, n_samples, seed);
            let estimates = [
                mi(&g_free)?,
                mi(&g_aware)?,
                diag,
                mi(&ComplexMatrix::identity(h.cols()))?,
            ];
            Ok(SWEEP_METHODS
                .iter()
                .zip(estimates)
                .map(|(m, e)| SweepRow {
                    snr_db: snr,
                    method: m.to_string(),
                    mi_bits: e.value_bits,
                    std_err: e.std_error_bits,
                })
                .collect())
        })
        .collect();
    let mut out = Vec::new();
    for c in cells {
        out.extend(c?);
    }
    Ok(out)
}

/// `sweep`: writes `sweep.csv`.
pub fn cmd_sweep(config_path: &Path, out: &Path, overrides: &Overrides, n_samples: usize) -> Result<Vec<SweepRow>> {
    let mut config = ExperimentConfig::load(config_path)?;
    overrides.apply(&mut config);
    let config = ExperimentConfig::parse(&config.to_toml())?;
    for w in config.warnings() {
        eprintln!("warning: {w}");
    }
    let rows = sweep(&config, n_samples)?;
    write_rows(out, &rows)?;
    Ok(rows)
}

/// `inspect-checkpoint`: a human-readable summary.
pub fn inspect(checkpoint: &Checkpoint) -> String {
    let mut s = String::new();
    let c = &checkpoint.config;
    let _ = writeln!(s, "format version   {}", crate::checkpoint::FORMAT_VERSION);
    let _ = writeln!(s, "config hash      {}", c.hash());
    let _ = writeln!(s, "mode             {}", c.mode.name());
    let _ = writeln!(s, "seed             {}", checkpoint.seed);
    let _ = writeln!(s, "iteration        {}", checkpoint.iteration);
    let _ = writeln!(s, "snr_db           {:?}", c.snr_db.values());
    let _ = writeln!(
        s,
        "constellation    {:?} {}",
        c.constellation.kind, c.constellation.order
    );
    for (u, p) in checkpoint.precoders.iter().enumerate() {
        let g = p.g();
        let _ = writeln!(
            s,
            "precoder {u}       N_t {}  Tr(GᴴG) {:.6}  steps {}",
            p.n_t(),
            p.trace_power(),
            p.step_count()
        );
        for r in 0..g.rows() {
            let row: Vec<String> = (0..g.cols())
                .map(|col| {
                    let (a, b) = g.get(r, col);
                    format!("{a:+.4}{b:+.4}j")
                })
                .collect();
            let _ = writeln!(s, "  [{}]", row.join("  "));
        }
    }
    let rx = &checkpoint.receiver;
    let _ = writeln!(s, "receiver         head {}  params {}", rx.head(), rx.num_params());
    for (name, layer) in freeprecode_core::receiver::LAYER_NAMES.iter().zip(rx.layers()) {
        let _ = writeln!(
            s,
            "  {name:<5} {:>4} -> {:<4} {}",
            layer.inputs(),
            layer.outputs(),
            layer.activation().name()
        );
    }
    s
}
