//! CSV schemas. One header row, rows in a fixed order, empty cells for
//! missing values.
//!
//! * `history.csv`: `iteration,rx_loss,tx_loss,trace_power,val_loss,mi_probe`
//!   (cross-entropies converted from nats to bits), one row per outer
//!   iteration.
//! * `results.csv`: `snr_db,metric,value,std_err,count`, grouped by SNR in
//!   grid order and by metric in the requested order. `count` is the number
//!   of noise draws for MI metrics and the number of bits for BER metrics.
//! * `sweep.csv`: `snr_db,method,mi_bits,std_err`, grouped by SNR, methods
//!   in the order `model_free, model_aware, diag_baseline, no_precoder`.

use std::io::Write;
use std::path::Path;

use freeprecode_core::training::HistoryRow;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub snr_db: f64,
    pub metric: String,
    pub value: f64,
    pub std_err: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub snr_db: f64,
    pub method: String,
    pub mi_bits: f64,
    pub std_err: f64,
}

#[derive(Serialize)]
struct HistoryRecord {
    iteration: usize,
    rx_loss: Option<f64>,
    tx_loss: Option<f64>,
    trace_power: f64,
    val_loss: Option<f64>,
    mi_probe: Option<f64>,
}

pub const HISTORY_HEADER: &str = "iteration,rx_loss,tx_loss,trace_power,val_loss,mi_probe";

fn create(path: &Path) -> Result<std::fs::File> {
    std::fs::File::create(path).map_err(|e| CliError::io(path, e))
}

pub fn write_history(path: &Path, rows: &[HistoryRow]) -> Result<()> {
    let mut file = create(path)?;
    // header written by hand so an empty history still has one
    writeln!(file, "{HISTORY_HEADER}").map_err(|e| CliError::io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    let bits = |v: Option<f64>| v.map(|l| l / std::f64::consts::LN_2);
    for r in rows {
        w.serialize(HistoryRecord {
            iteration: r.iteration,
            rx_loss: bits(r.rx_loss),
            tx_loss: bits(r.tx_loss),
            trace_power: r.trace_power,
            val_loss: bits(r.val_loss),
            mi_probe: r.mi_probe,
        })?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_rows<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<Vec<T>, _>>()?)
}
