//! Block-wise CR sampling: the optimal distribution, draws with replacement,
//! the one-pass selector, and the unweighted/weighted sketches.
//!
//! The sketch matrices `𝐒 = S ⊗ I_τ` and `𝐒_w = S_w ⊗ I_τ` are never formed;
//! their Kronecker structure means each sketch block is a scaled copy of one
//! source block, which is how [`build_unweighted_sketch`] and
//! [`build_weighted_sketch`] build them.

mod distribution;
mod draw;
mod plan;
mod select;
mod sketch;

pub use distribution::{
    compute_distribution, uniform_probabilities, variance_functional, SamplingDistribution,
};
pub use draw::{
    draw_fixed, draw_until_distinct, BlockSampler, SampleMultiset, StoppingRule, DEFAULT_DRAW_CAP,
};
pub use plan::SamplingPlan;
pub use select::select_stream;
pub use sketch::{
    build_unweighted_sketch, build_weighted_sketch, estimate_product, SketchKind, SketchPair,
};
