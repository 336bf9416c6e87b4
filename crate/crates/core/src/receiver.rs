//! Neural receiver: an "equalization" subnet that proposes an implicit
//! per-antenna channel `ĥ`, the conjugate product `z_i = conj(ĥ_i)·y_i / ‖ĥ‖²`,
//! and a decision subnet ending in a softmax (one class per message) or a
//! sigmoid (one output per bit). Forward and backward passes are written
//! out by hand.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng as _;

use crate::complex::RealMatrix;
use crate::constellation::MessageSpace;
use crate::math::{exp, ln, sqrt, tanh};
use crate::optimizer::AdamState;
use crate::rng;
use crate::{Error, Result};

pub const DEFAULT_EQ_HIDDEN: usize = 64;
pub const DEFAULT_DEC_HIDDEN: usize = 128;
pub const DEFAULT_LEARNING_RATE: f64 = 1e-4;

/// Probabilities are clamped to `[ε, 1-ε]` before taking logs.
pub const PROB_CLAMP: f64 = 1e-12;
const MIN_EQ_NORM: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Activation {
    Tanh,
    Relu,
    Softmax,
    Sigmoid,
    Identity,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Relu => "relu",
            Activation::Softmax => "softmax",
            Activation::Sigmoid => "sigmoid",
            Activation::Identity => "identity",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [Self::Tanh, Self::Relu, Self::Softmax, Self::Sigmoid, Self::Identity]
            .into_iter()
            .find(|a| a.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Head {
    /// Categorical cross-entropy over all `|M|` messages.
    Softmax,
    /// Binary cross-entropy over the `N_t·log₂M` bits.
    Sigmoid,
}

impl Head {
    pub fn name(self) -> &'static str {
        match self {
            Head::Softmax => "softmax",
            Head::Sigmoid => "sigmoid",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [Self::Softmax, Self::Sigmoid].into_iter().find(|h| h.name() == name)
    }

    pub fn activation(self) -> Activation {
        match self {
            Head::Softmax => Activation::Softmax,
            Head::Sigmoid => Activation::Sigmoid,
        }
    }

    pub fn outputs(self, space: &MessageSpace) -> usize {
        match self {
            Head::Softmax => space.size(),
            Head::Sigmoid => space.n_bits(),
        }
    }
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    weight: RealMatrix,
    bias: Vec<f64>,
    activation: Activation,
}

impl DenseLayer {
    pub fn new(weight: RealMatrix, bias: Vec<f64>, activation: Activation) -> Result<Self> {
        if bias.len() != weight.rows() {
            return Err(Error::DimensionMismatch {
                expected: weight.rows(),
                got: bias.len(),
            });
        }
        if !weight.is_finite() || bias.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            weight,
            bias,
            activation,
        })
    }

    fn glorot(inputs: usize, outputs: usize, activation: Activation, rng: &mut rng::Rng) -> Self {
        let limit = sqrt(6.0 / (inputs + outputs) as f64);
        let data = (0..inputs * outputs)
            .map(|_| rng.random_range(-limit..limit))
            .collect();
        Self {
            weight: RealMatrix::from_vec(outputs, inputs, data).expect("sized"),
            bias: vec![0.0; outputs],
            activation,
        }
    }

    pub fn weight(&self) -> &RealMatrix {
        &self.weight
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn inputs(&self) -> usize {
        self.weight.cols()
    }

    pub fn outputs(&self) -> usize {
        self.weight.rows()
    }

    /// `act(W x + b)` column by column.
    pub fn forward(&self, x: &RealMatrix) -> Result<RealMatrix> {
        if x.rows() != self.inputs() {
            return Err(Error::DimensionMismatch {
                expected: self.inputs(),
                got: x.rows(),
            });
        }
        let mut out = RealMatrix::zeros(self.outputs(), x.cols());
        crate::complex::matmul_into(&self.weight, x, &mut out);
        for (o, &b) in self.bias.iter().enumerate() {
            out.row_mut(o).iter_mut().for_each(|v| *v += b);
        }
        activate(self.activation, &mut out);
        Ok(out)
    }
}

fn activate(act: Activation, m: &mut RealMatrix) {
    match act {
        Activation::Identity => {}
        Activation::Tanh => m.as_mut_slice().iter_mut().for_each(|v| *v = tanh(*v)),
        Activation::Relu => m.as_mut_slice().iter_mut().for_each(|v| *v = v.max(0.0)),
        Activation::Sigmoid => m.as_mut_slice().iter_mut().for_each(|v| *v = sigmoid(*v)),
        Activation::Softmax => {
            for c in 0..m.cols() {
                let max = (0..m.rows()).map(|r| m.get(r, c)).fold(f64::NEG_INFINITY, f64::max);
                let mut total = 0.0;
                for r in 0..m.rows() {
                    let e = exp(m.get(r, c) - max);
                    m.set(r, c, e);
                    total += e;
                }
                for r in 0..m.rows() {
                    let v = m.get(r, c) / total;
                    m.set(r, c, v);
                }
            }
        }
    }
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + exp(-x))
    } else {
        let e = exp(x);
        e / (1.0 + e)
    }
}

/// Layer sizes of a receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReceiverArch {
    /// Stacked real input length `2N_r`.
    pub input_dim: usize,
    pub eq_hidden: usize,
    pub dec_hidden: usize,
    pub outputs: usize,
    pub head: Head,
}

impl ReceiverArch {
    /// Default sizes for a receiver with `n_r` antennas decoding `space`.
    pub fn for_space(n_r: usize, space: &MessageSpace, head: Head) -> Self {
        Self {
            input_dim: 2 * n_r,
            eq_hidden: DEFAULT_EQ_HIDDEN,
            dec_hidden: DEFAULT_DEC_HIDDEN,
            outputs: head.outputs(space),
            head,
        }
    }

    pub fn with_hidden(mut self, eq_hidden: usize, dec_hidden: usize) -> Self {
        self.eq_hidden = eq_hidden;
        self.dec_hidden = dec_hidden;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || !self.input_dim.is_multiple_of(2) {
            return Err(Error::InvalidConfig("receiver input must be a stacked complex vector"));
        }
        if self.eq_hidden == 0 || self.dec_hidden == 0 || self.outputs == 0 {
            return Err(Error::InvalidConfig("receiver layers must be non-empty"));
        }
        if self.head == Head::Softmax && self.outputs < 2 {
            return Err(Error::InvalidConfig("softmax head needs at least two classes"));
        }
        Ok(())
    }
}

/// Equalizer layers `0..2`, decision layers `2..5`.
const EQ_IN: usize = 0;
const EQ_OUT: usize = 1;
const DEC_0: usize = 2;
const DEC_1: usize = 3;
const DEC_OUT: usize = 4;
pub const LAYER_NAMES: [&str; 5] = ["eq0", "eq1", "dec0", "dec1", "dec2"];

#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverParams {
    arch: ReceiverArch,
    layers: Vec<DenseLayer>,
    adam: Vec<AdamState>,
}

/// Everything the backward pass needs from a forward pass.
#[derive(Debug, Clone)]
pub struct ForwardTape {
    y: RealMatrix,
    eq_hidden: RealMatrix,
    h_hat: RealMatrix,
    norm: Vec<f64>,
    z: RealMatrix,
    dec0: RealMatrix,
    dec1: RealMatrix,
    probs: RealMatrix,
}

impl ForwardTape {
    pub fn probabilities(&self) -> &RealMatrix {
        &self.probs
    }

    /// Equalizer output `ĥ` (stacked real/imag), one column per sample.
    pub fn h_hat(&self) -> &RealMatrix {
        &self.h_hat
    }

    pub fn equalized(&self) -> &RealMatrix {
        &self.z
    }
}

/// Gradient of the mean batch loss. `tensors` follows
/// [`ReceiverParams::tensor`] ordering; `input` is `∂L/∂Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverGrad {
    pub tensors: Vec<Vec<f64>>,
    pub input: RealMatrix,
}

/// Training targets for one batch.
#[derive(Debug, Clone, PartialEq)]
pub enum Targets {
    /// Message index per sample (one-hot classes).
    Classes(Vec<usize>),
    /// Bit matrix `n_bits × S` with entries 0.0 / 1.0.
    Bits(RealMatrix),
}

impl Targets {
    pub fn for_head(head: Head, space: &MessageSpace, indices: &[usize]) -> Result<Self> {
        Ok(match head {
            Head::Softmax => Targets::Classes(indices.to_vec()),
            Head::Sigmoid => Targets::Bits(space.bits_matrix(indices)?),
        })
    }

    pub fn len(&self) -> usize {
        match self {
            Targets::Classes(c) => c.len(),
            Targets::Bits(b) => b.cols(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn init_receiver(arch: ReceiverArch, seed: u64) -> Result<ReceiverParams> {
    arch.validate()?;
    let mut rng = rng::seeded(seed, rng::stream::RECEIVER_INIT);
    let d = arch.input_dim;
    let layers = vec![
        DenseLayer::glorot(d, arch.eq_hidden, Activation::Tanh, &mut rng),
        DenseLayer::glorot(arch.eq_hidden, d, Activation::Identity, &mut rng),
        DenseLayer::glorot(d, arch.dec_hidden, Activation::Relu, &mut rng),
        DenseLayer::glorot(arch.dec_hidden, arch.dec_hidden, Activation::Relu, &mut rng),
        DenseLayer::glorot(arch.dec_hidden, arch.outputs, arch.head.activation(), &mut rng),
    ];
    Ok(ReceiverParams::assemble(arch, layers, DEFAULT_LEARNING_RATE))
}

impl ReceiverParams {
    fn assemble(arch: ReceiverArch, layers: Vec<DenseLayer>, lr: f64) -> Self {
        let adam = layers
            .iter()
            .flat_map(|l| [AdamState::new(l.weight.rows() * l.weight.cols(), lr), AdamState::new(l.bias.len(), lr)])
            .collect();
        Self { arch, layers, adam }
    }

    /// Rebuilds a receiver from stored layers (e.g. a checkpoint). Shapes and
    /// activations must match `arch`.
    pub fn from_layers(arch: ReceiverArch, layers: Vec<DenseLayer>) -> Result<Self> {
        arch.validate()?;
        let d = arch.input_dim;
        let expected = [
            (d, arch.eq_hidden, Activation::Tanh),
            (arch.eq_hidden, d, Activation::Identity),
            (d, arch.dec_hidden, Activation::Relu),
            (arch.dec_hidden, arch.dec_hidden, Activation::Relu),
            (arch.dec_hidden, arch.outputs, arch.head.activation()),
        ];
        if layers.len() != expected.len() {
            return Err(Error::DimensionMismatch {
                expected: expected.len(),
                got: layers.len(),
            });
        }
        for (layer, &(i, o, act)) in layers.iter().zip(&expected) {
            if layer.inputs() != i || layer.outputs() != o {
                return Err(Error::DimensionMismatch {
                    expected: i * o,
                    got: layer.inputs() * layer.outputs(),
                });
            }
            if layer.activation != act {
                return Err(Error::InvalidConfig("layer activation does not match the receiver layout"));
            }
        }
        Ok(Self::assemble(arch, layers, DEFAULT_LEARNING_RATE))
    }

    pub fn arch(&self) -> &ReceiverArch {
        &self.arch
    }

    pub fn head(&self) -> Head {
        self.arch.head
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn set_learning_rate(&mut self, lr: f64) {
        self.adam.iter_mut().for_each(|a| a.lr = lr);
    }

    pub fn step_count(&self) -> u64 {
        self.adam[0].step_count()
    }

    /// Sets the optimizer step count of a restored receiver. Optimizer
    /// moments restart from zero.
    pub fn resume_at(&mut self, step_count: u64) {
        for a in self.adam.iter_mut() {
            *a = AdamState::resumed(a.len(), a.lr, step_count);
        }
    }

    pub fn num_tensors(&self) -> usize {
        2 * self.layers.len()
    }

    /// Tensor `2l` is the weight of layer `l` (row-major), `2l+1` its bias.
    pub fn tensor(&self, i: usize) -> &[f64] {
        let layer = &self.layers[i / 2];
        if i.is_multiple_of(2) {
            layer.weight.as_slice()
        } else {
            &layer.bias
        }
    }

    pub fn tensor_mut(&mut self, i: usize) -> &mut [f64] {
        let layer = &mut self.layers[i / 2];
        if i.is_multiple_of(2) {
            layer.weight.as_mut_slice()
        } else {
            &mut layer.bias
        }
    }

    pub fn num_params(&self) -> usize {
        (0..self.num_tensors()).map(|i| self.tensor(i).len()).sum()
    }

    /// One Adam step per tensor. The gradient is checked in full before any
    /// parameter moves.
    pub fn apply_gradient(&mut self, grad: &ReceiverGrad) -> Result<()> {
        if grad.tensors.len() != self.num_tensors() {
            return Err(Error::ShapeMismatch {
                expected: self.num_tensors(),
                got: grad.tensors.len(),
            });
        }
        let mut offset = 0;
        for (i, g) in grad.tensors.iter().enumerate() {
            if g.len() != self.tensor(i).len() {
                return Err(Error::ShapeMismatch {
                    expected: self.tensor(i).len(),
                    got: g.len(),
                });
            }
            if let Some(p) = g.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteGradient { index: offset + p });
            }
            offset += g.len();
        }
        for i in 0..self.num_tensors() {
            let mut adam = core::mem::replace(&mut self.adam[i], AdamState::new(0, 0.0));
            let res = adam.step(self.tensor_mut(i), &grad.tensors[i]);
            self.adam[i] = adam;
            res?;
        }
        Ok(())
    }
}

/// Forward pass over a batch `Y` of shape `2N_r × S`.
pub fn receiver_forward(params: &ReceiverParams, y: &RealMatrix) -> Result<(RealMatrix, ForwardTape)> {
    let d = params.arch.input_dim;
    if y.rows() != d {
        return Err(Error::DimensionMismatch { expected: d, got: y.rows() });
    }
    if y.cols() == 0 {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    let n = d / 2;
    let s = y.cols();
    let eq_hidden = params.layers[EQ_IN].forward(y)?;
    let h_hat = params.layers[EQ_OUT].forward(&eq_hidden)?;

    let mut norm = vec![0.0; s];
    for r in 0..d {
        for (acc, v) in norm.iter_mut().zip(h_hat.row(r)) {
            *acc += v * v;
        }
    }
    if let Some(&bad) = norm.iter().find(|&&v| v.is_nan() || v < MIN_EQ_NORM) {
        return Err(Error::DegenerateEqualizer { norm_sq: bad });
    }
    let mut z = RealMatrix::zeros(d, s);
    for i in 0..n {
        for c in 0..s {
            let (hr, hi) = (h_hat.get(i, c), h_hat.get(i + n, c));
            let (yr, yi) = (y.get(i, c), y.get(i + n, c));
            z.set(i, c, (hr * yr + hi * yi) / norm[c]);
            z.set(i + n, c, (hr * yi - hi * yr) / norm[c]);
        }
    }
    let dec0 = params.layers[DEC_0].forward(&z)?;
    let dec1 = params.layers[DEC_1].forward(&dec0)?;
    let probs = params.layers[DEC_OUT].forward(&dec1)?;
    let tape = ForwardTape {
        y: y.clone(),
        eq_hidden,
        h_hat,
        norm,
        z,
        dec0,
        dec1,
        probs: probs.clone(),
    };
    Ok((probs, tape))
}

fn check_targets(probs: &RealMatrix, targets: &Targets) -> Result<()> {
    match targets {
        Targets::Classes(c) => {
            if c.len() != probs.cols() {
                return Err(Error::DimensionMismatch {
                    expected: probs.cols(),
                    got: c.len(),
                });
            }
            if let Some(&bad) = c.iter().find(|&&k| k >= probs.rows()) {
                return Err(Error::IndexOutOfRange {
                    index: bad,
                    size: probs.rows(),
                });
            }
        }
        Targets::Bits(b) => probs.check_same_shape(b)?,
    }
    Ok(())
}

/// Cross-entropy in nats: categorical for class targets, summed binary over
/// bits for bit targets. Returns the batch mean and the per-sample values.
pub fn ce_loss(probs: &RealMatrix, targets: &Targets) -> Result<(f64, Vec<f64>)> {
    check_targets(probs, targets)?;
    let clamp = |p: f64| p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
    let per_sample: Vec<f64> = match targets {
        Targets::Classes(c) => c
            .iter()
            .enumerate()
            .map(|(col, &k)| -ln(clamp(probs.get(k, col))))
            .collect(),
        Targets::Bits(bits) => (0..probs.cols())
            .map(|col| {
                (0..probs.rows())
                    .map(|r| {
                        let p = clamp(probs.get(r, col));
                        let t = bits.get(r, col);
                        -(t * ln(p) + (1.0 - t) * ln(1.0 - p))
                    })
                    .sum()
            })
            .collect(),
    };
    let total = per_sample.iter().sum::<f64>() / per_sample.len() as f64;
    Ok((total, per_sample))
}

/// `∂L/∂W = δ Aᵀ`, `∂L/∂b = Σ_s δ`, returned as `(weight, bias)`.
fn layer_grads(delta: &RealMatrix, input: &RealMatrix) -> (Vec<f64>, Vec<f64>) {
    let (out, inp) = (delta.rows(), input.rows());
    let mut w = vec![0.0; out * inp];
    for o in 0..out {
        let dr = delta.row(o);
        for k in 0..inp {
            w[o * inp + k] = dr.iter().zip(input.row(k)).map(|(a, b)| a * b).sum();
        }
    }
    let b = (0..out).map(|o| delta.row(o).iter().sum()).collect();
    (w, b)
}

/// `Wᵀ δ`.
fn back_through(weight: &RealMatrix, delta: &RealMatrix) -> RealMatrix {
    let mut out = RealMatrix::zeros(weight.cols(), delta.cols());
    for o in 0..weight.rows() {
        let dr = delta.row(o);
        for k in 0..weight.cols() {
            let w = weight.get(o, k);
            if w == 0.0 {
                continue;
            }
            for (a, b) in out.row_mut(k).iter_mut().zip(dr) {
                *a += w * b;
            }
        }
    }
    out
}

/// Exact gradient of the mean batch cross-entropy with respect to every
/// receiver parameter and to the received signal.
pub fn receiver_backward(params: &ReceiverParams, tape: &ForwardTape, targets: &Targets) -> Result<ReceiverGrad> {
    check_targets(&tape.probs, targets)?;
    let s = tape.probs.cols();
    let inv_s = 1.0 / s as f64;
    let d = params.arch.input_dim;
    let n = d / 2;

    // softmax + CE and sigmoid + BCE share ∂L/∂logits = p - t
    let mut delta = tape.probs.clone();
    match targets {
        Targets::Classes(c) => {
            for (col, &k) in c.iter().enumerate() {
                let v = delta.get(k, col) - 1.0;
                delta.set(k, col, v);
            }
        }
        Targets::Bits(bits) => {
            for (v, t) in delta.as_mut_slice().iter_mut().zip(bits.as_slice()) {
                *v -= t;
            }
        }
    }
    delta.as_mut_slice().iter_mut().for_each(|v| *v *= inv_s);

    let mut tensors = vec![Vec::new(); params.num_tensors()];
    let mut store = |layer: usize, (w, b): (Vec<f64>, Vec<f64>)| {
        tensors[2 * layer] = w;
        tensors[2 * layer + 1] = b;
    };

    store(DEC_OUT, layer_grads(&delta, &tape.dec1));
    let mut delta = back_through(&params.layers[DEC_OUT].weight, &delta);
    relu_mask(&mut delta, &tape.dec1);
    store(DEC_1, layer_grads(&delta, &tape.dec0));
    let mut delta = back_through(&params.layers[DEC_1].weight, &delta);
    relu_mask(&mut delta, &tape.dec0);
    store(DEC_0, layer_grads(&delta, &tape.z));
    let dz = back_through(&params.layers[DEC_0].weight, &delta);

    // z_r = (h_r y_r + h_i y_i)/N, z_i = (h_r y_i - h_i y_r)/N, N = Σ h_r² + h_i²
    let y = &tape.y;
    let h = &tape.h_hat;
    let mut dh = RealMatrix::zeros(d, s);
    let mut dy = RealMatrix::zeros(d, s);
    for c in 0..s {
        let norm = tape.norm[c];
        let mut dot = 0.0;
        for i in 0..n {
            dot += dz.get(i, c) * tape.z.get(i, c) + dz.get(i + n, c) * tape.z.get(i + n, c);
        }
        // ∂L/∂N = -dot / N
        for i in 0..n {
            let (hr, hi) = (h.get(i, c), h.get(i + n, c));
            let (yr, yi) = (y.get(i, c), y.get(i + n, c));
            let (gr, gi) = (dz.get(i, c), dz.get(i + n, c));
            dh.set(i, c, (gr * yr + gi * yi) / norm - 2.0 * hr * dot / norm);
            dh.set(i + n, c, (gr * yi - gi * yr) / norm - 2.0 * hi * dot / norm);
            dy.set(i, c, (gr * hr - gi * hi) / norm);
            dy.set(i + n, c, (gr * hi + gi * hr) / norm);
        }
    }

    store(EQ_OUT, layer_grads(&dh, &tape.eq_hidden));
    let mut delta = back_through(&params.layers[EQ_OUT].weight, &dh);
    for (v, a) in delta.as_mut_slice().iter_mut().zip(tape.eq_hidden.as_slice()) {
        *v *= 1.0 - a * a;
    }
    store(EQ_IN, layer_grads(&delta, y));
    let dy_eq = back_through(&params.layers[EQ_IN].weight, &delta);
    let input = dy.add(&dy_eq)?;
    Ok(ReceiverGrad { tensors, input })
}

fn relu_mask(delta: &mut RealMatrix, activation: &RealMatrix) {
    for (v, a) in delta.as_mut_slice().iter_mut().zip(activation.as_slice()) {
        if *a <= 0.0 {
            *v = 0.0;
        }
    }
}

/// Hard decisions from receiver outputs.
#[derive(Debug, Clone, PartialEq)]
pub enum Decisions {
    Classes(Vec<usize>),
    /// One bit vector per sample.
    Bits(Vec<Vec<u8>>),
}

impl Decisions {
    /// Bit vectors per sample; class decisions are mapped through the
    /// message labels.
    pub fn into_bits(self, space: &MessageSpace) -> Result<Vec<Vec<u8>>> {
        match self {
            Decisions::Bits(b) => Ok(b),
            Decisions::Classes(c) => c.into_iter().map(|k| space.index_to_bits(k)).collect(),
        }
    }
}

/// Index of the largest entry; the lowest index wins ties.
pub fn argmax(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v > best_v {
            best = i;
            best_v = v;
        }
    }
    best
}

/// Argmax per column for a softmax head, per-bit threshold at 0.5 for a
/// sigmoid head.
pub fn detect(probs: &RealMatrix, head: Head) -> Decisions {
    match head {
        Head::Softmax => Decisions::Classes(
            (0..probs.cols())
                .map(|c| argmax((0..probs.rows()).map(|r| probs.get(r, c))))
                .collect(),
        ),
        Head::Sigmoid => Decisions::Bits(
            (0..probs.cols())
                .map(|c| (0..probs.rows()).map(|r| (probs.get(r, c) > 0.5) as u8).collect())
                .collect(),
        ),
    }
}
