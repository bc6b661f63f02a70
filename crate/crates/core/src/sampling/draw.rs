use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::{rng, Error, Result};

/// Default cap on the number of draws for [`StoppingRule::UntilDistinct`].
pub const DEFAULT_DRAW_CAP: u64 = 1_000_000_000;

/// When to stop drawing block indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoppingRule {
    /// Draw until `t` distinct blocks have appeared; error after `max_draws`.
    UntilDistinct { t: usize, max_draws: u64 },
    /// Draw exactly `m` times.
    Fixed { m: usize },
}

impl StoppingRule {
    pub fn until_distinct(t: usize) -> Self {
        Self::UntilDistinct {
            t,
            max_draws: DEFAULT_DRAW_CAP,
        }
    }
}

/// The sampled multiset `S̄`, its distinct index set `𝓘` (in order of first
/// appearance) and the per-block draw counts `𝐰 ∈ ℕ₀^K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleMultiset {
    draws: Vec<usize>,
    distinct: Vec<usize>,
    weights: Vec<u64>,
}

impl SampleMultiset {
    /// Builds the multiset from an ordered list of draws over `k` blocks.
    pub fn from_draws(k: usize, draws: Vec<usize>) -> Result<Self> {
        if draws.is_empty() {
            return Err(Error::InvalidSample("no draws".into()));
        }
        let mut weights = vec![0u64; k];
        let mut distinct = Vec::new();
        for &d in &draws {
            if d >= k {
                return Err(Error::InvalidSample(format!(
                    "draw {d} out of range for {k} blocks"
                )));
            }
            if weights[d] == 0 {
                distinct.push(d);
            }
            weights[d] += 1;
        }
        Ok(Self {
            draws,
            distinct,
            weights,
        })
    }

    /// The multiset `S̄` in draw order.
    pub fn draws(&self) -> &[usize] {
        &self.draws
    }

    /// `𝓘`, without repetitions.
    pub fn distinct(&self) -> &[usize] {
        &self.distinct
    }

    /// `𝐰` over all `K` blocks.
    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn num_blocks(&self) -> usize {
        self.weights.len()
    }

    /// `t = |𝓘|`.
    pub fn t(&self) -> usize {
        self.distinct.len()
    }

    /// `|S̄|`.
    pub fn total_draws(&self) -> usize {
        self.draws.len()
    }

    /// `w̃ = 𝐰|_𝓘`, aligned with [`Self::distinct`].
    pub fn restricted_weights(&self) -> Vec<u64> {
        self.distinct.iter().map(|&i| self.weights[i]).collect()
    }

    /// `‖w̃‖₁ / ‖w̃‖₀`, the factor by which the weighted sketch has fewer
    /// blocks than the unweighted one.
    pub fn compression_gain(&self) -> f64 {
        self.total_draws() as f64 / self.t() as f64
    }

    /// `(‖w̃‖₁ / ‖w̃‖₀)²`, the reduction in stored sketch entries and in
    /// multiplication work.
    pub fn storage_ratio(&self) -> f64 {
        let g = self.compression_gain();
        g * g
    }
}

/// Inverse-CDF sampler over a probability vector.
#[derive(Clone, Debug)]
pub struct BlockSampler {
    cdf: Vec<f64>,
    last_positive: usize,
    support: usize,
}

impl BlockSampler {
    /// Accepts any nonnegative, finite, not-all-zero weight vector; it is
    /// normalized internally.
    pub fn new(pi: &[f64]) -> Result<Self> {
        let mut cdf = Vec::with_capacity(pi.len());
        let mut acc = 0.0;
        let mut last_positive = None;
        let mut support = 0;
        for (i, &p) in pi.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidProbabilities(format!("pi[{i}] = {p}")));
            }
            if p > 0.0 {
                last_positive = Some(i);
                support += 1;
            }
            acc += p;
            cdf.push(acc);
        }
        let last_positive = last_positive.ok_or(Error::DegenerateDistribution)?;
        Ok(Self {
            cdf,
            last_positive,
            support,
        })
    }

    pub fn support(&self) -> usize {
        self.support
    }

    pub fn num_blocks(&self) -> usize {
        self.cdf.len()
    }

    /// One draw with replacement. Zero-probability blocks are never returned.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> usize {
        let total = self.cdf[self.cdf.len() - 1];
        let u = rng.random::<f64>() * total;
        let i = self.cdf.partition_point(|&c| c <= u);
        i.min(self.last_positive)
    }

    pub fn draw<R: RngCore + ?Sized>(
        &self,
        rule: StoppingRule,
        rng: &mut R,
    ) -> Result<SampleMultiset> {
        let k = self.cdf.len();
        match rule {
            StoppingRule::Fixed { m } => {
                if m == 0 {
                    return Err(Error::InvalidSample("fixed draw count must be positive".into()));
                }
                let draws = (0..m).map(|_| self.sample(rng)).collect();
                SampleMultiset::from_draws(k, draws)
            }
            StoppingRule::UntilDistinct { t, max_draws } => {
                if t == 0 {
                    return Err(Error::InvalidSample("t must be positive".into()));
                }
                if t > self.support {
                    return Err(Error::SupportTooSmall {
                        requested: t,
                        support: self.support,
                    });
                }
                let mut seen = vec![false; k];
                let mut distinct = 0;
                let mut draws = Vec::new();
                while distinct < t {
                    if draws.len() as u64 >= max_draws {
                        return Err(Error::DrawCapExceeded(max_draws));
                    }
                    let i = self.sample(rng);
                    if !seen[i] {
                        seen[i] = true;
                        distinct += 1;
                    }
                    draws.push(i);
                }
                SampleMultiset::from_draws(k, draws)
            }
        }
    }
}

/// Draws i.i.d. from `pi` until `t` distinct blocks appear, seeded.
pub fn draw_until_distinct(pi: &[f64], t: usize, seed: u64) -> Result<SampleMultiset> {
    BlockSampler::new(pi)?.draw(StoppingRule::until_distinct(t), &mut rng::seeded(seed))
}

/// Draws exactly `m` i.i.d. samples from `pi`, seeded.
pub fn draw_fixed(pi: &[f64], m: usize, seed: u64) -> Result<SampleMultiset> {
    BlockSampler::new(pi)?.draw(StoppingRule::Fixed { m }, &mut rng::seeded(seed))
}
