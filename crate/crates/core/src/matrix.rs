//! Dense real matrices, block partitions and norms.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Row-major `f64` matrix. Entries are finite at construction and the matrix
/// is immutable afterwards.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows.checked_mul(cols) != Some(data.len()) {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} values, got {}",
                rows.saturating_mul(cols),
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { rows: n, cols: n, data }
    }

    /// Internal constructor for results of arithmetic on finite inputs.
    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(rows * cols, data.len());
        Self { rows, cols, data }
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
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.frobenius_norm_sq())
    }

    /// `self - other`.
    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self::from_raw(self.rows, self.cols, data))
    }

    pub fn scale(&self, factor: f64) -> DenseMatrix {
        Self::from_raw(
            self.rows,
            self.cols,
            self.data.iter().map(|v| v * factor).collect(),
        )
    }

    /// `‖self − reference‖_F / ‖reference‖_F`; the absolute error when the
    /// reference is zero.
    pub fn relative_error(&self, reference: &DenseMatrix) -> Result<f64> {
        let diff = self.sub(reference)?.frobenius_norm();
        let norm = reference.frobenius_norm();
        Ok(if norm > 0.0 { diff / norm } else { diff })
    }

    fn check_same_shape(&self, other: &DenseMatrix) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

/// Exact product `A·B` (i-k-j loop order, deterministic).
pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let (l, n, m) = (a.rows, a.cols, b.cols);
    let mut out = vec![0.0; l * m];
    for i in 0..l {
        let out_row = &mut out[i * m..(i + 1) * m];
        for k in 0..n {
            let aik = a.data[i * n + k];
            if aik == 0.0 {
                continue;
            }
            let b_row = &b.data[k * m..(k + 1) * m];
            for (o, bv) in out_row.iter_mut().zip(b_row) {
                *o += aik * bv;
            }
        }
    }
    Ok(DenseMatrix::from_raw(l, m, out))
}

pub fn frobenius_norm(m: &DenseMatrix) -> f64 {
    m.frobenius_norm()
}

/// Which dimension a [`BlockPartition`] slices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// `K` column blocks `Ã_i` of shape `L×τ`.
    Columns,
    /// `K` row blocks `B̃_i` of shape `τ×M`.
    Rows,
}

/// A view of a matrix as `K` disjoint blocks of `τ = N/K` columns or rows.
/// Blocks are read in place; nothing is copied until a sketch is built.
#[derive(Clone, Copy, Debug)]
pub struct BlockPartition<'a> {
    source: &'a DenseMatrix,
    blocks: usize,
    tau: usize,
    axis: Axis,
}

impl<'a> BlockPartition<'a> {
    /// Partitions `source` into `blocks` pieces along `axis`. The sliced
    /// dimension must be an exact multiple of `blocks`.
    pub fn new(source: &'a DenseMatrix, blocks: usize, axis: Axis) -> Result<Self> {
        let dim = match axis {
            Axis::Columns => source.cols,
            Axis::Rows => source.rows,
        };
        if blocks == 0 {
            return Err(Error::InvalidPartition("block count must be positive".into()));
        }
        if dim % blocks != 0 {
            return Err(Error::InvalidPartition(format!(
                "K={blocks} does not divide the shared dimension {dim}"
            )));
        }
        Ok(Self {
            source,
            blocks,
            tau: dim / blocks,
            axis,
        })
    }

    pub fn columns(source: &'a DenseMatrix, blocks: usize) -> Result<Self> {
        Self::new(source, blocks, Axis::Columns)
    }

    pub fn rows(source: &'a DenseMatrix, blocks: usize) -> Result<Self> {
        Self::new(source, blocks, Axis::Rows)
    }

    #[inline]
    pub fn source(&self) -> &'a DenseMatrix {
        self.source
    }

    #[inline]
    pub fn num_blocks(&self) -> usize {
        self.blocks
    }

    #[inline]
    pub fn tau(&self) -> usize {
        self.tau
    }

    #[inline]
    pub fn axis(&self) -> Axis {
        self.axis
    }

    /// Copies block `i` out as its own matrix.
    pub fn block(&self, i: usize) -> DenseMatrix {
        let m = self.source;
        let lo = i * self.tau;
        match self.axis {
            Axis::Columns => {
                let mut data = Vec::with_capacity(m.rows * self.tau);
                for r in 0..m.rows {
                    data.extend_from_slice(&m.row(r)[lo..lo + self.tau]);
                }
                DenseMatrix::from_raw(m.rows, self.tau, data)
            }
            Axis::Rows => DenseMatrix::from_raw(
                self.tau,
                m.cols,
                m.data[lo * m.cols..(lo + self.tau) * m.cols].to_vec(),
            ),
        }
    }

    pub fn block_norm_sq(&self, i: usize) -> f64 {
        let m = self.source;
        let lo = i * self.tau;
        match self.axis {
            Axis::Columns => (0..m.rows)
                .map(|r| m.row(r)[lo..lo + self.tau].iter().map(|v| v * v).sum::<f64>())
                .sum(),
            Axis::Rows => m.data[lo * m.cols..(lo + self.tau) * m.cols]
                .iter()
                .map(|v| v * v)
                .sum(),
        }
    }

    pub fn block_norm(&self, i: usize) -> f64 {
        libm::sqrt(self.block_norm_sq(i))
    }
}

/// Checks that `a` is a column partition and `b` the matching row partition.
pub(crate) fn check_pair(a: &BlockPartition<'_>, b: &BlockPartition<'_>) -> Result<()> {
    if a.axis != Axis::Columns || b.axis != Axis::Rows {
        return Err(Error::InvalidPartition(
            "expected a column partition of A and a row partition of B".into(),
        ));
    }
    if a.blocks != b.blocks || a.tau != b.tau {
        return Err(Error::InvalidPartition(format!(
            "K/τ mismatch: ({}, {}) vs ({}, {})",
            a.blocks, a.tau, b.blocks, b.tau
        )));
    }
    Ok(())
}

/// `out += scale · Ã_i B̃_i` where `out` is the row-major `L×M` buffer.
pub(crate) fn accumulate_block_product(
    out: &mut [f64],
    a: &BlockPartition<'_>,
    b: &BlockPartition<'_>,
    i: usize,
    scale: f64,
) {
    let (am, bm) = (a.source, b.source);
    let (l, m, tau) = (am.rows, bm.cols, a.tau);
    debug_assert_eq!(out.len(), l * m);
    if scale == 0.0 {
        return;
    }
    let lo = i * tau;
    for r in 0..l {
        let a_row = &am.row(r)[lo..lo + tau];
        let out_row = &mut out[r * m..(r + 1) * m];
        for (k, &av) in a_row.iter().enumerate() {
            let coeff = scale * av;
            if coeff == 0.0 {
                continue;
            }
            for (o, bv) in out_row.iter_mut().zip(bm.row(lo + k)) {
                *o += coeff * bv;
            }
        }
    }
}

/// `Σ_{l=1}^{K} Ã_l B̃_l`, which equals `A·B`.
pub fn block_outer_sum(a: &BlockPartition<'_>, b: &BlockPartition<'_>) -> Result<DenseMatrix> {
    check_pair(a, b)?;
    let (l, m) = (a.source.rows, b.source.cols);
    let mut out = vec![0.0; l * m];
    for i in 0..a.blocks {
        accumulate_block_product(&mut out, a, b, i, 1.0);
    }
    Ok(DenseMatrix::from_raw(l, m, out))
}
