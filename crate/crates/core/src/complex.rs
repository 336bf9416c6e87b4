//! Dense real and complex matrices, and the real embedding
//! `A + jB  ↦  [[A, -B], [B, A]]` that lets complex linear maps act on
//! stacked `(Re x, Im x)` vectors.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Row-major dense real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    got: col.len(),
                });
            }
            for r in 0..rows {
                m.data[r * m.cols + c] = col[r];
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &RealMatrix) -> Result<RealMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        matmul_into(self, rhs, &mut out);
        Ok(out)
    }

    pub fn add(&self, rhs: &RealMatrix) -> Result<RealMatrix> {
        self.check_same_shape(rhs)?;
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, s: f64) -> RealMatrix {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub(crate) fn check_same_shape(&self, rhs: &RealMatrix) -> Result<()> {
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: rhs.rows,
            });
        }
        if self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: rhs.cols,
            });
        }
        Ok(())
    }
}

/// `out = a * b`, shapes assumed conformant.
pub(crate) fn matmul_into(a: &RealMatrix, b: &RealMatrix, out: &mut RealMatrix) {
    debug_assert_eq!(a.cols, b.rows);
    debug_assert_eq!(out.rows, a.rows);
    debug_assert_eq!(out.cols, b.cols);
    let n = b.cols;
    out.data.iter_mut().for_each(|v| *v = 0.0);
    for i in 0..a.rows {
        let out_row = &mut out.data[i * n..(i + 1) * n];
        for k in 0..a.cols {
            let w = a.data[i * a.cols + k];
            if w == 0.0 {
                continue;
            }
            let b_row = &b.data[k * n..(k + 1) * n];
            for (o, &x) in out_row.iter_mut().zip(b_row) {
                *o += w * x;
            }
        }
    }
}

/// Dense complex matrix with real and imaginary parts stored separately,
/// both row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            re: vec![0.0; rows * cols],
            im: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.re[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_parts(rows: usize, cols: usize, re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        for part in [&re, &im] {
            if part.len() != rows * cols {
                return Err(Error::DimensionMismatch {
                    expected: rows * cols,
                    got: part.len(),
                });
            }
        }
        if re.iter().chain(&im).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, re, im })
    }

    /// Row-major `(re, im)` pairs.
    pub fn from_pairs(rows: usize, cols: usize, pairs: &[(f64, f64)]) -> Result<Self> {
        let re = pairs.iter().map(|p| p.0).collect();
        let im = pairs.iter().map(|p| p.1).collect();
        Self::from_parts(rows, cols, re, im)
    }

    pub fn from_real(rows: usize, cols: usize, re: Vec<f64>) -> Result<Self> {
        Self::from_parts(rows, cols, re, vec![0.0; rows * cols])
    }

    pub fn diagonal(values: &[(f64, f64)]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &(r, c)) in values.iter().enumerate() {
            m.re[i * n + i] = r;
            m.im[i * n + i] = c;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn re(&self) -> &[f64] {
        &self.re
    }

    #[inline]
    pub fn im(&self) -> &[f64] {
        &self.im
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> (f64, f64) {
        let i = r * self.cols + c;
        (self.re[i], self.im[i])
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: (f64, f64)) {
        let i = r * self.cols + c;
        self.re[i] = value.0;
        self.im[i] = value.1;
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let (ar, ai) = self.get(i, k);
                for j in 0..rhs.cols {
                    let (br, bi) = rhs.get(k, j);
                    let o = i * rhs.cols + j;
                    out.re[o] += ar * br - ai * bi;
                    out.im[o] += ar * bi + ai * br;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                got: rhs.rows * rhs.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            re: self.re.iter().zip(&rhs.re).map(|(a, b)| a + b).collect(),
            im: self.im.iter().zip(&rhs.im).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, s: f64) -> ComplexMatrix {
        Self {
            rows: self.rows,
            cols: self.cols,
            re: self.re.iter().map(|v| v * s).collect(),
            im: self.im.iter().map(|v| v * s).collect(),
        }
    }

    pub fn conj_transpose(&self) -> ComplexMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let (a, b) = self.get(r, c);
                t.set(c, r, (a, -b));
            }
        }
        t
    }

    pub fn frobenius_norm(&self) -> f64 {
        crate::math::sqrt(trace_gram(self))
    }

    pub fn is_zero(&self) -> bool {
        self.re.iter().chain(&self.im).all(|&v| v == 0.0)
    }

    /// Columns of `self` applied to a vector given as `(re, im)` slices.
    pub fn mul_vec(&self, re: &[f64], im: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut out_re = vec![0.0; self.rows];
        let mut out_im = vec![0.0; self.rows];
        for r in 0..self.rows {
            for c in 0..self.cols {
                let (a, b) = self.get(r, c);
                out_re[r] += a * re[c] - b * im[c];
                out_im[r] += a * im[c] + b * re[c];
            }
        }
        (out_re, out_im)
    }
}

/// Real `2a × 2b` matrix `[[A, -B], [B, A]]` standing for the complex
/// `a × b` matrix `A + jB`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealEmbedding {
    mat: RealMatrix,
}

impl RealEmbedding {
    /// Wraps a real matrix without checking the block tie; the check happens
    /// in [`complex_extract`].
    pub fn from_matrix(mat: RealMatrix) -> Result<Self> {
        if !mat.rows.is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                expected: mat.rows + 1,
                got: mat.rows,
            });
        }
        if !mat.cols.is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                expected: mat.cols + 1,
                got: mat.cols,
            });
        }
        Ok(Self { mat })
    }

    #[inline]
    pub fn matrix(&self) -> &RealMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.mat
    }

    /// Complex row count.
    pub fn complex_rows(&self) -> usize {
        self.mat.rows / 2
    }

    /// Complex column count.
    pub fn complex_cols(&self) -> usize {
        self.mat.cols / 2
    }

    /// Largest absolute violation of the `[[A, -B], [B, A]]` tie.
    pub fn block_deviation(&self) -> f64 {
        let (a, b) = (self.complex_rows(), self.complex_cols());
        let mut dev: f64 = 0.0;
        for r in 0..a {
            for c in 0..b {
                let tl = self.mat.get(r, c);
                let tr = self.mat.get(r, c + b);
                let bl = self.mat.get(r + a, c);
                let br = self.mat.get(r + a, c + b);
                dev = dev.max((tl - br).abs()).max((tr + bl).abs());
            }
        }
        dev
    }

    pub fn apply(&self, x: &RealMatrix) -> Result<RealMatrix> {
        self.mat.matmul(x)
    }
}

pub fn real_embed(g: &ComplexMatrix) -> RealEmbedding {
    let (a, b) = (g.rows, g.cols);
    let mut m = RealMatrix::zeros(2 * a, 2 * b);
    for r in 0..a {
        for c in 0..b {
            let (re, im) = g.get(r, c);
            m.set(r, c, re);
            m.set(r, c + b, -im);
            m.set(r + a, c, im);
            m.set(r + a, c + b, re);
        }
    }
    RealEmbedding { mat: m }
}

const BLOCK_TOLERANCE: f64 = 1e-12;

pub fn complex_extract(e: &RealEmbedding) -> Result<ComplexMatrix> {
    let scale = e.mat.as_slice().iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let deviation = e.block_deviation();
    if deviation.is_nan() || deviation > BLOCK_TOLERANCE * scale {
        return Err(Error::BlockStructureViolation { deviation });
    }
    let (a, b) = (e.complex_rows(), e.complex_cols());
    let mut g = ComplexMatrix::zeros(a, b);
    for r in 0..a {
        for c in 0..b {
            g.set(r, c, (e.mat.get(r, c), e.mat.get(r + a, c)));
        }
    }
    Ok(g)
}

/// `Tr{GᴴG} = Σ |g_ij|²`.
pub fn trace_gram(g: &ComplexMatrix) -> f64 {
    g.re.iter().chain(&g.im).map(|v| v * v).sum()
}

/// Stacks complex column vectors as real columns `(Re x; Im x)`.
pub fn stack_complex_columns(re: &RealMatrix, im: &RealMatrix) -> Result<RealMatrix> {
    re.check_same_shape(im)?;
    let (n, s) = (re.rows, re.cols);
    let mut out = RealMatrix::zeros(2 * n, s);
    out.data[..n * s].copy_from_slice(&re.data);
    out.data[n * s..].copy_from_slice(&im.data);
    Ok(out)
}
