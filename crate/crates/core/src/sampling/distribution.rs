use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::{check_pair, BlockPartition};
use crate::{Error, Result};

/// Block-sampling distribution `Π_i ∝ ‖Ã_i‖_F ‖B̃_i‖_F`.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingDistribution {
    pi: Vec<f64>,
    norm_products: Vec<f64>,
}

impl SamplingDistribution {
    /// The variance-minimizing distribution for the block pairs of `a`, `b`.
    pub fn optimal(a: &BlockPartition<'_>, b: &BlockPartition<'_>) -> Result<Self> {
        check_pair(a, b)?;
        let norm_products: Vec<f64> = (0..a.num_blocks())
            .map(|i| a.block_norm(i) * b.block_norm(i))
            .collect();
        let total: f64 = norm_products.iter().sum();
        if total <= 0.0 {
            return Err(Error::DegenerateDistribution);
        }
        let pi = norm_products.iter().map(|p| p / total).collect();
        Ok(Self { pi, norm_products })
    }

    #[inline]
    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    /// `‖Ã_i‖_F · ‖B̃_i‖_F` per block.
    #[inline]
    pub fn norm_products(&self) -> &[f64] {
        &self.norm_products
    }

    pub fn num_blocks(&self) -> usize {
        self.pi.len()
    }

    /// Number of blocks with positive probability.
    pub fn support(&self) -> usize {
        self.pi.iter().filter(|&&p| p > 0.0).count()
    }

    /// `f(Π) = Σ_l ‖Ã_l‖²‖B̃_l‖² / Π_l` at the optimum, `(Σ_l ‖Ã_l‖‖B̃_l‖)²`.
    pub fn optimal_variance_functional(&self) -> f64 {
        let s: f64 = self.norm_products.iter().sum();
        s * s
    }
}

pub fn compute_distribution(
    a: &BlockPartition<'_>,
    b: &BlockPartition<'_>,
) -> Result<SamplingDistribution> {
    SamplingDistribution::optimal(a, b)
}

/// Uniform probabilities over `k` blocks.
pub fn uniform_probabilities(k: usize) -> Vec<f64> {
    vec![1.0 / k as f64; k]
}

/// `f(q) = Σ_l (‖Ã_l‖_F ‖B̃_l‖_F)² / q_l`; `Var(X) = f(q) − ‖AB‖²_F`.
///
/// Blocks with a zero norm product contribute nothing regardless of `q_l`.
pub fn variance_functional(q: &[f64], norm_products: &[f64]) -> Result<f64> {
    if q.len() != norm_products.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} probabilities for {} blocks",
            q.len(),
            norm_products.len()
        )));
    }
    let mut f = 0.0;
    for (l, (&ql, &c)) in q.iter().zip(norm_products).enumerate() {
        if !(ql >= 0.0) {
            return Err(Error::InvalidProbabilities(format!("q[{l}] = {ql}")));
        }
        if c == 0.0 {
            continue;
        }
        if ql == 0.0 {
            return Err(Error::InfiniteVariance(l));
        }
        f += c * c / ql;
    }
    Ok(f)
}
