use rand::{Rng, RngCore};

use crate::{Error, Result};

/// One-pass weighted selection with O(1) extra state.
///
/// Keeps a running total `D`; on seeing value `v_i > 0` it adds `v_i` to `D`
/// and replaces the retained index with `i` with probability `v_i / D`. The
/// index returned is `i` with probability `v_i / Σ v`.
pub fn select_stream<I, R>(values: I, rng: &mut R) -> Result<usize>
where
    I: IntoIterator<Item = f64>,
    R: RngCore + ?Sized,
{
    let mut total = 0.0;
    let mut chosen = None;
    for (i, v) in values.into_iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidProbabilities(alloc::format!("value[{i}] = {v}")));
        }
        if v == 0.0 {
            continue;
        }
        total += v;
        if rng.random::<f64>() * total < v {
            chosen = Some(i);
        }
    }
    chosen.ok_or(Error::EmptyStream)
}
