//! The weighted block-pair list both coded schemes distribute.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::{accumulate_block_product, check_pair, matmul, BlockPartition, DenseMatrix};
use crate::sampling::SampleMultiset;
use crate::{Error, Result};

/// `t` block pairs with weights `w̃_j` and CR rescalings `c_j`.
///
/// Task `j` stands for `X_j = c_j · Ã_{blocks[j]} B̃_{blocks[j]}` and the
/// recovery target is `Y_w̃ = Σ_j w̃_j X_j`. When built from a sample,
/// `c_j = 1/(|S̄|·Π_{𝓘_j})`, so `Y_w̃` equals the weighted sketch product
/// `C_w R_w`.
#[derive(Clone, Debug)]
pub struct WeightedBlocks<'a> {
    a: BlockPartition<'a>,
    b: BlockPartition<'a>,
    blocks: Vec<usize>,
    weights: Vec<f64>,
    scales: Vec<f64>,
}

impl<'a> WeightedBlocks<'a> {
    pub fn new(
        a: BlockPartition<'a>,
        b: BlockPartition<'a>,
        blocks: Vec<usize>,
        weights: Vec<f64>,
        scales: Vec<f64>,
    ) -> Result<Self> {
        check_pair(&a, &b)?;
        if blocks.is_empty() || blocks.len() != weights.len() || blocks.len() != scales.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} blocks, {} weights, {} scales",
                blocks.len(),
                weights.len(),
                scales.len()
            )));
        }
        if let Some(&i) = blocks.iter().find(|&&i| i >= a.num_blocks()) {
            return Err(Error::InvalidSample(format!("block {i} out of range")));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidSample("weights must be finite and nonnegative".into()));
        }
        if scales.iter().any(|c| !c.is_finite() || *c <= 0.0) {
            return Err(Error::InvalidSample("scales must be finite and positive".into()));
        }
        Ok(Self {
            a,
            b,
            blocks,
            weights,
            scales,
        })
    }

    /// Raw block products with the given weights and no rescaling.
    pub fn unscaled(
        a: BlockPartition<'a>,
        b: BlockPartition<'a>,
        blocks: Vec<usize>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let scales = vec![1.0; blocks.len()];
        Self::new(a, b, blocks, weights, scales)
    }

    /// Every block once with weight 1; the target is `AB`.
    pub fn exhaustive(a: BlockPartition<'a>, b: BlockPartition<'a>) -> Result<Self> {
        let k = a.num_blocks();
        Self::unscaled(a, b, (0..k).collect(), vec![1.0; k])
    }

    /// The distinct sampled blocks with `w̃` and `1/(|S̄|·Π)` folded in.
    pub fn from_sample(
        a: BlockPartition<'a>,
        b: BlockPartition<'a>,
        pi: &[f64],
        sample: &SampleMultiset,
    ) -> Result<Self> {
        if pi.len() != a.num_blocks() || sample.num_blocks() != a.num_blocks() {
            return Err(Error::DimensionMismatch(format!(
                "partition has {} blocks, distribution {}, sample {}",
                a.num_blocks(),
                pi.len(),
                sample.num_blocks()
            )));
        }
        let draws = sample.total_draws() as f64;
        let blocks = sample.distinct().to_vec();
        let weights = sample.restricted_weights().iter().map(|&w| w as f64).collect();
        let scales = blocks.iter().map(|&i| 1.0 / (draws * pi[i])).collect();
        Self::new(a, b, blocks, weights, scales)
    }

    /// Number of tasks `t`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn partitions(&self) -> (&BlockPartition<'a>, &BlockPartition<'a>) {
        (&self.a, &self.b)
    }

    /// Output shape `L×M`.
    pub fn output_shape(&self) -> (usize, usize) {
        (self.a.source().rows(), self.b.source().cols())
    }

    /// `Ã_{blocks[j]}` and `B̃_{blocks[j]}` each times `√(w̃_j c_j)`.
    pub fn balanced_factors(&self, j: usize) -> (DenseMatrix, DenseMatrix) {
        let f = libm::sqrt(self.weights[j] * self.scales[j]);
        let i = self.blocks[j];
        (self.a.block(i).scale(f), self.b.block(i).scale(f))
    }

    /// `out += coeff · X_j`.
    pub(crate) fn accumulate(&self, out: &mut [f64], j: usize, coeff: f64) {
        accumulate_block_product(out, &self.a, &self.b, self.blocks[j], coeff * self.scales[j]);
    }

    /// `Y_w̃ = Σ_j w̃_j X_j`, computed serially.
    pub fn target(&self) -> DenseMatrix {
        let (l, m) = self.output_shape();
        let mut out = vec![0.0; l * m];
        for j in 0..self.len() {
            self.accumulate(&mut out, j, self.weights[j]);
        }
        DenseMatrix::from_raw(l, m, out)
    }

    /// The exact product `AB` of the underlying matrices.
    pub fn exact_product(&self) -> DenseMatrix {
        matmul(self.a.source(), self.b.source()).expect("partitions share the inner dimension")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{build_weighted_sketch, compute_distribution, estimate_product};

    #[test]
    fn exhaustive_target_is_product() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0, 3.0, 4.0], [0.5, -1.0, 2.0, 0.0]]).unwrap();
        let b = DenseMatrix::from_rows(&[[1.0], [2.0], [-1.0], [0.25]]).unwrap();
        let tasks = WeightedBlocks::exhaustive(
            BlockPartition::columns(&a, 2).unwrap(),
            BlockPartition::rows(&b, 2).unwrap(),
        )
        .unwrap();
        assert_eq!(tasks.target(), matmul(&a, &b).unwrap());
    }

    #[test]
    fn sampled_target_equals_weighted_sketch_product() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], [6.0, 5.0, 4.0, 3.0, 2.0, 1.0]])
            .unwrap();
        let b = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, 0.5], [0.0, 3.0], [1.0, -1.0]])
            .unwrap();
        let (pa, pb) = (
            BlockPartition::columns(&a, 3).unwrap(),
            BlockPartition::rows(&b, 3).unwrap(),
        );
        let dist = compute_distribution(&pa, &pb).unwrap();
        let sample = SampleMultiset::from_draws(3, vec![2, 0, 2, 2]).unwrap();
        let tasks = WeightedBlocks::from_sample(pa, pb, dist.pi(), &sample).unwrap();
        let y = estimate_product(&build_weighted_sketch(&pa, &pb, dist.pi(), &sample).unwrap());
        assert!(tasks.target().relative_error(&y).unwrap() <= 1e-14);
    }

    #[test]
    fn rejects_bad_inputs() {
        let a = DenseMatrix::identity(2);
        let (pa, pb) = (
            BlockPartition::columns(&a, 2).unwrap(),
            BlockPartition::rows(&a, 2).unwrap(),
        );
        assert!(WeightedBlocks::unscaled(pa, pb, vec![], vec![]).is_err());
        assert!(WeightedBlocks::unscaled(pa, pb, vec![2], vec![1.0]).is_err());
        assert!(WeightedBlocks::unscaled(pa, pb, vec![0], vec![-1.0]).is_err());
        assert!(WeightedBlocks::new(pa, pb, vec![0], vec![1.0], vec![0.0]).is_err());
    }
}
