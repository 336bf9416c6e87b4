//! PSK / square-QAM alphabets with Gray labels, and the message space of
//! symbol vectors drawn from them.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::complex::RealMatrix;
use crate::math::{cos, sin, sqrt};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstellationKind {
    Psk,
    Qam,
}

impl ConstellationKind {
    pub fn name(self) -> &'static str {
        match self {
            ConstellationKind::Psk => "psk",
            ConstellationKind::Qam => "qam",
        }
    }
}

impl fmt::Display for ConstellationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    kind: ConstellationKind,
    points: Vec<(f64, f64)>,
    labels: Vec<u32>,
    bits_per_symbol: usize,
}

#[inline]
fn gray(i: usize) -> u32 {
    (i ^ (i >> 1)) as u32
}

pub fn make_constellation(kind: ConstellationKind, order: usize) -> Result<Constellation> {
    let unsupported = Error::UnsupportedOrder {
        kind: kind.name(),
        order,
    };
    if !matches!(order, 2 | 4 | 8 | 16 | 64) {
        return Err(unsupported);
    }
    let bits = order.trailing_zeros() as usize;
    let (points, labels) = match kind {
        ConstellationKind::Psk => {
            // QPSK sits on the diagonals; other orders start at angle 0.
            let offset = if order == 4 { PI / 4.0 } else { 0.0 };
            let points = (0..order)
                .map(|i| {
                    let phase = offset + 2.0 * PI * i as f64 / order as f64;
                    (cos(phase), sin(phase))
                })
                .collect();
            (points, (0..order).map(gray).collect())
        }
        ConstellationKind::Qam => {
            if !bits.is_multiple_of(2) {
                return Err(unsupported);
            }
            let side = 1usize << (bits / 2);
            let norm = sqrt(2.0 * (order as f64 - 1.0) / 3.0);
            let level = |i: usize| (2.0 * i as f64 - (side as f64 - 1.0)) / norm;
            let mut points = Vec::with_capacity(order);
            let mut labels = Vec::with_capacity(order);
            for d in 0..order {
                let (i_re, i_im) = (d / side, d % side);
                points.push((level(i_re), level(i_im)));
                labels.push((gray(i_re) << (bits / 2)) | gray(i_im));
            }
            (points, labels)
        }
    };
    Ok(Constellation {
        kind,
        points,
        labels,
        bits_per_symbol: bits,
    })
}

impl Constellation {
    pub fn kind(&self) -> ConstellationKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn average_energy(&self) -> f64 {
        self.points.iter().map(|(a, b)| a * a + b * b).sum::<f64>() / self.order() as f64
    }

    /// Index of the point nearest to `s` (lowest index on ties).
    pub fn nearest(&self, s: (f64, f64)) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (p.0 - s.0) * (p.0 - s.0) + (p.1 - s.1) * (p.1 - s.1);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }
}

/// Largest message space the exhaustive routines will enumerate.
pub const EXHAUSTIVE_LIMIT: usize = 4096;

/// All `M^n` symbol vectors over `n` independent streams.
///
/// Message `idx` is written in base `M` with stream 0 as the most
/// significant digit; digit `d` selects `points[d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageSpace {
    n_streams: usize,
    alphabet: Constellation,
    size: usize,
}

impl MessageSpace {
    pub fn new(alphabet: Constellation, n_streams: usize) -> Result<Self> {
        if n_streams == 0 {
            return Err(Error::InvalidConfig("message space needs at least one stream"));
        }
        if n_streams * alphabet.bits_per_symbol() >= usize::BITS as usize - 1 {
            return Err(Error::InvalidConfig("message space too large to index"));
        }
        let size = 1usize << (n_streams * alphabet.bits_per_symbol());
        Ok(Self {
            n_streams,
            alphabet,
            size,
        })
    }

    pub fn n_streams(&self) -> usize {
        self.n_streams
    }

    pub fn alphabet(&self) -> &Constellation {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn n_bits(&self) -> usize {
        self.n_streams * self.alphabet.bits_per_symbol()
    }

    fn check(&self, idx: usize) -> Result<()> {
        if idx >= self.size {
            return Err(Error::IndexOutOfRange {
                index: idx,
                size: self.size,
            });
        }
        Ok(())
    }

    fn digit(&self, idx: usize, stream: usize) -> usize {
        let bits = self.alphabet.bits_per_symbol();
        let shift = (self.n_streams - 1 - stream) * bits;
        (idx >> shift) & (self.alphabet.order() - 1)
    }

    pub fn index_to_symbols(&self, idx: usize) -> Result<Vec<(f64, f64)>> {
        self.check(idx)?;
        Ok((0..self.n_streams)
            .map(|s| self.alphabet.points[self.digit(idx, s)])
            .collect())
    }

    /// Inverse of [`index_to_symbols`](Self::index_to_symbols); each entry is
    /// mapped to its nearest constellation point.
    pub fn index_from_symbols(&self, symbols: &[(f64, f64)]) -> Result<usize> {
        if symbols.len() != self.n_streams {
            return Err(Error::DimensionMismatch {
                expected: self.n_streams,
                got: symbols.len(),
            });
        }
        let bits = self.alphabet.bits_per_symbol();
        Ok(symbols
            .iter()
            .fold(0usize, |acc, &s| (acc << bits) | self.alphabet.nearest(s)))
    }

    pub fn index_to_bits(&self, idx: usize) -> Result<Vec<u8>> {
        self.check(idx)?;
        let bits = self.alphabet.bits_per_symbol();
        let mut out = Vec::with_capacity(self.n_bits());
        for s in 0..self.n_streams {
            let label = self.alphabet.labels[self.digit(idx, s)];
            for b in (0..bits).rev() {
                out.push(((label >> b) & 1) as u8);
            }
        }
        Ok(out)
    }

    pub fn one_hot(&self, idx: usize) -> Result<Vec<f64>> {
        self.check(idx)?;
        let mut v = vec![0.0; self.size];
        v[idx] = 1.0;
        Ok(v)
    }

    /// Stacked real columns `(Re x; Im x)` for a batch of messages,
    /// shape `2n × S`.
    pub fn symbols_matrix(&self, indices: &[usize]) -> Result<RealMatrix> {
        let n = self.n_streams;
        let s = indices.len();
        let mut m = RealMatrix::zeros(2 * n, s);
        for (col, &idx) in indices.iter().enumerate() {
            self.check(idx)?;
            for stream in 0..n {
                let (re, im) = self.alphabet.points[self.digit(idx, stream)];
                m.set(stream, col, re);
                m.set(stream + n, col, im);
            }
        }
        Ok(m)
    }

    /// Bit targets for a batch, shape `n_bits × S` with 0.0/1.0 entries.
    pub fn bits_matrix(&self, indices: &[usize]) -> Result<RealMatrix> {
        let mut m = RealMatrix::zeros(self.n_bits(), indices.len());
        for (col, &idx) in indices.iter().enumerate() {
            for (r, b) in self.index_to_bits(idx)?.into_iter().enumerate() {
                m.set(r, col, b as f64);
            }
        }
        Ok(m)
    }

    /// Symbols of every message, as the columns of a `2n × size` matrix.
    pub fn all_symbols(&self) -> RealMatrix {
        let all: Vec<usize> = (0..self.size).collect();
        self.symbols_matrix(&all).expect("indices are in range")
    }

    /// Splits the space of `users · n_per_user` streams: the symbols of user
    /// `u` occupy streams `u·n .. (u+1)·n` of each message.
    pub fn user_symbols(&self, indices: &[usize], users: usize) -> Result<Vec<RealMatrix>> {
        if users == 0 || !self.n_streams.is_multiple_of(users) {
            return Err(Error::InvalidConfig("streams are not divisible among users"));
        }
        let per = self.n_streams / users;
        let full = self.symbols_matrix(indices)?;
        let n = self.n_streams;
        Ok((0..users)
            .map(|u| {
                let mut m = RealMatrix::zeros(2 * per, indices.len());
                for k in 0..per {
                    m.row_mut(k).copy_from_slice(full.row(u * per + k));
                    m.row_mut(k + per).copy_from_slice(full.row(n + u * per + k));
                }
                m
            })
            .collect())
    }
}
