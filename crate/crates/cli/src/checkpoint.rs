//! Versioned plain-text checkpoints.
//!
//! ```text
//! freeprecode-checkpoint
//! version 1
//! config_hash <sha256 of the embedded config>
//! seed <u64>
//! iteration <outer iterations run>
//! mode <model_free|model_aware|mac>
//! config <n>
//! <n lines of TOML>
//! precoders <K>
//! precoder <u> n_t <N_t> step_count <steps>
//! array G.re <len>
//! <values>
//! array G.im <len>
//! <values>
//! receiver input_dim <d> eq_hidden <h> dec_hidden <h> outputs <o> head <softmax|sigmoid> step_count <steps>
//! layer <name> <activation> <inputs> <outputs>
//! array <name>.weight <len>
//! <values, row-major out×in>
//! array <name>.bias <len>
//! <values>
//! end
//! ```
//!
//! Values are written with 17 significant digits, so every `f64` reads back
//! bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use freeprecode_core::complex::RealMatrix;
use freeprecode_core::prelude::*;
use freeprecode_core::receiver::{Activation, DenseLayer, LAYER_NAMES};

use crate::config::{ExperimentConfig, Mode};
use crate::error::{CliError, Result};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "freeprecode-checkpoint";

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub iteration: usize,
    pub precoders: Vec<PrecoderParams>,
    pub receiver: ReceiverParams,
}

fn push_array(out: &mut String, name: &str, values: &[f64]) {
    let _ = writeln!(out, "array {name} {}", values.len());
    let line: Vec<String> = values.iter().map(|v| format!("{v:.16e}")).collect();
    out.push_str(&line.join(" "));
    out.push('\n');
}

impl Checkpoint {
    pub fn mode(&self) -> Mode {
        self.config.mode
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let config = self.config.to_toml();
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "version {FORMAT_VERSION}");
        let _ = writeln!(out, "config_hash {}", self.config.hash());
        let _ = writeln!(out, "seed {}", self.seed);
        let _ = writeln!(out, "iteration {}", self.iteration);
        let _ = writeln!(out, "mode {}", self.config.mode.name());
        let _ = writeln!(out, "config {}", config.lines().count());
        for line in config.lines() {
            let _ = writeln!(out, "{line}");
        }
        let _ = writeln!(out, "precoders {}", self.precoders.len());
        for (u, p) in self.precoders.iter().enumerate() {
            let _ = writeln!(out, "precoder {u} n_t {} step_count {}", p.n_t(), p.step_count());
            let g = p.g();
            push_array(&mut out, "G.re", g.re());
            push_array(&mut out, "G.im", g.im());
        }
        let a = self.receiver.arch();
        let _ = writeln!(
            out,
            "receiver input_dim {} eq_hidden {} dec_hidden {} outputs {} head {} step_count {}",
            a.input_dim,
            a.eq_hidden,
            a.dec_hidden,
            a.outputs,
            a.head.name(),
            self.receiver.step_count()
        );
        for (name, layer) in LAYER_NAMES.iter().zip(self.receiver.layers()) {
            let _ = writeln!(
                out,
                "layer {name} {} {} {}",
                layer.activation().name(),
                layer.inputs(),
                layer.outputs()
            );
            push_array(&mut out, &format!("{name}.weight"), layer.weight().as_slice());
            push_array(&mut out, &format!("{name}.bias"), layer.bias());
        }
        out.push_str("end\n");
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut r = Reader::new(text);
        if r.line()? != MAGIC {
            return Err(r.err("not a freeprecode checkpoint"));
        }
        let version = r.keyed("version")?;
        if version != FORMAT_VERSION.to_string() {
            return Err(CliError::CheckpointVersion {
                found: version,
                supported: FORMAT_VERSION,
            });
        }
        let hash = r.keyed("config_hash")?;
        let seed = r.keyed_num("seed")?;
        let iteration = r.keyed_num("iteration")?;
        let mode_name = r.keyed("mode")?;
        let n_config: usize = r.keyed_num("config")?;
        let mut config_text = String::new();
        for _ in 0..n_config {
            config_text.push_str(r.line()?);
            config_text.push('\n');
        }
        let config = ExperimentConfig::parse(&config_text)
            .map_err(|e| r.err(format!("embedded config: {e}")))?;
        if config.hash() != hash {
            return Err(r.err("config hash does not match the embedded config"));
        }
        if config.mode.name() != mode_name {
            return Err(r.err("mode does not match the embedded config"));
        }

        let n_precoders: usize = r.keyed_num("precoders")?;
        let mut precoders = Vec::with_capacity(n_precoders);
        for u in 0..n_precoders {
            let f = r.fields("precoder", &["n_t", "step_count"])?;
            if f[0] != u.to_string() {
                return Err(r.err(format!("expected precoder {u}")));
            }
            let n_t: usize = r.num(&f[1])?;
            let steps: u64 = r.num(&f[2])?;
            let re = r.array("G.re", n_t * n_t)?;
            let im = r.array("G.im", n_t * n_t)?;
            let g = ComplexMatrix::from_parts(n_t, n_t, re, im).map_err(|e| r.err(e.to_string()))?;
            precoders.push(PrecoderParams::restore(&g, steps).map_err(|e| r.err(e.to_string()))?);
        }

        let f = r.fields(
            "receiver",
            &["input_dim", "eq_hidden", "dec_hidden", "outputs", "head", "step_count"],
        )?;
        let head = Head::from_name(&f[4]).ok_or_else(|| r.err(format!("unknown head `{}`", f[4])))?;
        let arch = ReceiverArch {
            input_dim: r.num(&f[0])?,
            eq_hidden: r.num(&f[1])?,
            dec_hidden: r.num(&f[2])?,
            outputs: r.num(&f[3])?,
            head,
        };
        let mut layers = Vec::with_capacity(LAYER_NAMES.len());
        for name in LAYER_NAMES {
            let line = r.line()?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 5 || parts[0] != "layer" || parts[1] != name {
                return Err(r.err(format!("expected `layer {name} <activation> <inputs> <outputs>`")));
            }
            let act = Activation::from_name(parts[2])
                .ok_or_else(|| r.err(format!("unknown activation `{}`", parts[2])))?;
            let inputs: usize = r.num(parts[3])?;
            let outputs: usize = r.num(parts[4])?;
            let w = r.array(&format!("{name}.weight"), inputs * outputs)?;
            let b = r.array(&format!("{name}.bias"), outputs)?;
            let weight = RealMatrix::from_vec(outputs, inputs, w).map_err(|e| r.err(e.to_string()))?;
            layers.push(DenseLayer::new(weight, b, act).map_err(|e| r.err(e.to_string()))?);
        }
        let mut receiver = ReceiverParams::from_layers(arch, layers).map_err(|e| r.err(e.to_string()))?;
        receiver.resume_at(r.num(&f[5])?);
        if r.line()? != "end" {
            return Err(r.err("expected `end`"));
        }
        Ok(Self {
            config,
            seed,
            iteration,
            precoders,
            receiver,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| CliError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_text(&text)
    }

    /// Combined precoder `Bdiag(G_1, …, G_K)`.
    pub fn composite_precoder(&self) -> ComplexMatrix {
        let n: usize = self.precoders.iter().map(|p| p.n_t()).sum();
        let mut g = ComplexMatrix::zeros(n, n);
        let mut off = 0;
        for p in &self.precoders {
            let gu = p.g();
            for r in 0..gu.rows() {
                for c in 0..gu.cols() {
                    g.set(off + r, off + c, gu.get(r, c));
                }
            }
            off += gu.rows();
        }
        g
    }
}

struct Reader<'a> {
    lines: std::str::Lines<'a>,
    line_no: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines(),
            line_no: 0,
        }
    }

    fn err(&self, message: impl Into<String>) -> CliError {
        CliError::Checkpoint {
            line: self.line_no,
            message: message.into(),
        }
    }

    fn line(&mut self) -> Result<&'a str> {
        self.line_no += 1;
        self.lines.next().ok_or_else(|| self.err("unexpected end of file"))
    }

    fn num<T: std::str::FromStr>(&self, s: &str) -> Result<T> {
        s.parse().map_err(|_| self.err(format!("invalid number `{s}`")))
    }

    /// `key value` line.
    fn keyed(&mut self, key: &str) -> Result<String> {
        let line = self.line()?;
        match line.split_once(' ') {
            Some((k, v)) if k == key => Ok(v.trim().to_string()),
            _ => Err(self.err(format!("expected `{key} <value>`"))),
        }
    }

    fn keyed_num<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.keyed(key)?;
        self.num(&v)
    }

    /// `head <first> k1 v1 k2 v2 …` or `head k1 v1 …`; returns the values.
    fn fields(&mut self, head: &str, keys: &[&str]) -> Result<Vec<String>> {
        let line = self.line()?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        let lead = if parts.len() == 2 * keys.len() + 2 { 1 } else { 0 };
        if parts.first() != Some(&head) || parts.len() != 1 + lead + 2 * keys.len() {
            return Err(self.err(format!("malformed `{head}` line")));
        }
        let mut out: Vec<String> = parts[1..1 + lead].iter().map(|s| s.to_string()).collect();
        for (i, key) in keys.iter().enumerate() {
            let k = parts[1 + lead + 2 * i];
            if k != *key {
                return Err(self.err(format!("expected `{key}`, found `{k}`")));
            }
            out.push(parts[2 + lead + 2 * i].to_string());
        }
        Ok(out)
    }

    fn array(&mut self, name: &str, expected: usize) -> Result<Vec<f64>> {
        let header = self.line()?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 3 || parts[0] != "array" || parts[1] != name {
            return Err(self.err(format!("expected `array {name} <len>`")));
        }
        let len: usize = self.num(parts[2])?;
        if len != expected {
            return Err(self.err(format!("array {name} has {len} values, expected {expected}")));
        }
        let body = self.line()?;
        let values = body
            .split_whitespace()
            .map(|v| self.num::<f64>(v))
            .collect::<Result<Vec<_>>>()?;
        if values.len() != len {
            return Err(self.err(format!("array {name} lists {} values, header says {len}", values.len())));
        }
        Ok(values)
    }
}
