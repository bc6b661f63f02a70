use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::SampleMultiset;
use crate::{Error, Result};

/// Serializable record of one sampling run: the distribution, the draws and
/// the seed that produced them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub pi: Vec<f64>,
    pub draws: Vec<usize>,
    pub distinct: Vec<usize>,
    pub weights: Vec<u64>,
    pub seed: Option<u64>,
}

impl SamplingPlan {
    pub fn new(pi: &[f64], sample: &SampleMultiset, seed: Option<u64>) -> Self {
        Self {
            pi: pi.to_vec(),
            draws: sample.draws().to_vec(),
            distinct: sample.distinct().to_vec(),
            weights: sample.weights().to_vec(),
            seed,
        }
    }

    /// Rebuilds the multiset from `draws`, checking that the stored
    /// `distinct` and `weights` agree with it.
    pub fn sample(&self) -> Result<SampleMultiset> {
        let sample = SampleMultiset::from_draws(self.pi.len(), self.draws.clone())?;
        if sample.distinct() != self.distinct.as_slice() || sample.weights() != self.weights.as_slice() {
            return Err(Error::InvalidSample(
                "distinct/weights disagree with draws".into(),
            ));
        }
        Ok(sample)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn json_round_trip_and_validation() {
        let sample = SampleMultiset::from_draws(3, vec![2, 2, 0]).unwrap();
        let plan = SamplingPlan::new(&[0.25, 0.25, 0.5], &sample, Some(42));
        let json = serde_json::to_string(&plan).unwrap();
        assert!(json.contains("\"weights\":[1,0,2]"));
        let back: SamplingPlan = serde_json::from_str(&json).unwrap();
        assert_eq!(back.sample().unwrap(), sample);

        let mut bad = back;
        bad.weights = vec![0, 0, 3];
        assert!(bad.sample().is_err());
    }
}
