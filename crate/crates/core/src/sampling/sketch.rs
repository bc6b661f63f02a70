use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::SampleMultiset;
use crate::matrix::{check_pair, matmul, BlockPartition, DenseMatrix};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SketchKind {
    /// One block per draw, repeats included: `C̃ = A·S`, `R̃ = Sᵀ·B`.
    Unweighted,
    /// One block per distinct index, scaled by `√w̃_j`: `C_w`, `R_w`.
    Weighted,
}

/// Materialized sketches `C` (L × b·τ) and `R` (b·τ × M) where `b` is the
/// number of retained blocks. Column block `j` of `C` and row block `j` of
/// `R` are `Ã_{blocks[j]}` and `B̃_{blocks[j]}` times `factors[j]`.
#[derive(Clone, Debug)]
pub struct SketchPair {
    c: DenseMatrix,
    r: DenseMatrix,
    kind: SketchKind,
    blocks: Vec<usize>,
    factors: Vec<f64>,
}

impl SketchPair {
    pub fn c(&self) -> &DenseMatrix {
        &self.c
    }

    pub fn r(&self) -> &DenseMatrix {
        &self.r
    }

    pub fn kind(&self) -> SketchKind {
        self.kind
    }

    /// Source block index of each sketch block.
    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    /// Rescaling factor of each sketch block.
    pub fn factors(&self) -> &[f64] {
        &self.factors
    }

    /// Entries stored across both sketches.
    pub fn stored_entries(&self) -> usize {
        self.c.data().len() + self.r.data().len()
    }
}

fn check_plan(a: &BlockPartition<'_>, pi: &[f64], sample: &SampleMultiset) -> Result<()> {
    let k = a.num_blocks();
    if pi.len() != k || sample.num_blocks() != k {
        return Err(Error::DimensionMismatch(format!(
            "partition has {k} blocks, distribution {}, sample {}",
            pi.len(),
            sample.num_blocks()
        )));
    }
    if let Some(&i) = sample.distinct().iter().find(|&&i| !(pi[i] > 0.0)) {
        return Err(Error::InvalidSample(format!(
            "block {i} was drawn but has probability {}",
            pi[i]
        )));
    }
    Ok(())
}

fn materialize(
    a: &BlockPartition<'_>,
    b: &BlockPartition<'_>,
    kind: SketchKind,
    blocks: Vec<usize>,
    factors: Vec<f64>,
) -> SketchPair {
    let (am, bm) = (a.source(), b.source());
    let tau = a.tau();
    let width = blocks.len() * tau;
    let (l, m) = (am.rows(), bm.cols());

    let mut c = vec![0.0; l * width];
    for r in 0..l {
        let src = am.row(r);
        let dst = &mut c[r * width..(r + 1) * width];
        for (j, (&blk, &f)) in blocks.iter().zip(&factors).enumerate() {
            for k in 0..tau {
                dst[j * tau + k] = f * src[blk * tau + k];
            }
        }
    }

    let mut rr = Vec::with_capacity(width * m);
    for (&blk, &f) in blocks.iter().zip(&factors) {
        for k in 0..tau {
            rr.extend(bm.row(blk * tau + k).iter().map(|v| f * v));
        }
    }

    SketchPair {
        c: DenseMatrix::from_raw(l, width, c),
        r: DenseMatrix::from_raw(width, m, rr),
        kind,
        blocks,
        factors,
    }
}

/// `C̃, R̃`: every draw contributes its block scaled by `1/√(|S̄|·Π_i)`.
pub fn build_unweighted_sketch(
    a: &BlockPartition<'_>,
    b: &BlockPartition<'_>,
    pi: &[f64],
    sample: &SampleMultiset,
) -> Result<SketchPair> {
    check_pair(a, b)?;
    check_plan(a, pi, sample)?;
    let draws = sample.total_draws() as f64;
    let blocks = sample.draws().to_vec();
    let factors = blocks
        .iter()
        .map(|&i| 1.0 / libm::sqrt(draws * pi[i]))
        .collect();
    Ok(materialize(a, b, SketchKind::Unweighted, blocks, factors))
}

/// `C_w, R_w`: each distinct block once, scaled by `√w̃_j / √(|S̄|·Π_i)`.
pub fn build_weighted_sketch(
    a: &BlockPartition<'_>,
    b: &BlockPartition<'_>,
    pi: &[f64],
    sample: &SampleMultiset,
) -> Result<SketchPair> {
    check_pair(a, b)?;
    check_plan(a, pi, sample)?;
    let draws = sample.total_draws() as f64;
    let blocks = sample.distinct().to_vec();
    let factors = blocks
        .iter()
        .map(|&i| libm::sqrt(sample.weights()[i] as f64 / (draws * pi[i])))
        .collect();
    Ok(materialize(a, b, SketchKind::Weighted, blocks, factors))
}

/// `Y = C·R`.
pub fn estimate_product(sketch: &SketchPair) -> DenseMatrix {
    matmul(&sketch.c, &sketch.r).expect("sketch factors have matching inner dimension")
}
