//! Weighted MatDot code over the reals.
//!
//! With coefficient blocks `Ã'_j = √(w̃_j c_j)·Ã_{𝓘_j}` and
//! `B̃'_j = √(w̃_j c_j)·B̃_{𝓘_j}` the encoders are
//!
//! ```text
//! p̃_A(x) = Σ_j Ã'_j x^(j−1)      p̃_B(x) = Σ_j B̃'_j x^(t−j)
//! ```
//!
//! and `p̃_A(x)·p̃_B(x)` has degree `2(t−1)` with `x^(t−1)` coefficient
//! `Σ_j w̃_j c_j Ã_{𝓘_j} B̃_{𝓘_j}`. Any `2t − 1` evaluations determine it.

use alloc::format;
use alloc::vec::Vec;

use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::interp::{chebyshev_points, coefficient_weights};
use crate::matrix::{matmul, DenseMatrix};
use crate::tasks::WeightedBlocks;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct MatDotCode {
    n: usize,
    t: usize,
    eval_points: Vec<f64>,
    rho: usize,
}

impl Serialize for MatDotCode {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("MatDotCode", 5)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("t", &self.t)?;
        st.serialize_field("rho", &self.rho)?;
        st.serialize_field("eval_points", &self.eval_points)?;
        st.serialize_field("recovery_threshold", &self.recovery_threshold())?;
        st.end()
    }
}

/// `2t − 1`.
fn threshold_of(t: usize) -> usize {
    2 * t - 1
}

impl MatDotCode {
    /// `n` workers on Chebyshev nodes, `t` block pairs.
    pub fn new(n: usize, t: usize) -> Result<Self> {
        Self::with_points(chebyshev_points(n), t)
    }

    pub fn with_points(eval_points: Vec<f64>, t: usize) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidScheme("t must be positive".into()));
        }
        let n = eval_points.len();
        if n < threshold_of(t) {
            return Err(Error::InsufficientWorkers {
                workers: n,
                threshold: threshold_of(t),
            });
        }
        if eval_points.iter().any(|x| !x.is_finite() || x.abs() > 1.0) {
            return Err(Error::InvalidScheme("evaluation points must lie in [-1, 1]".into()));
        }
        let mut sorted = eval_points.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidScheme("evaluation points must be distinct".into()));
        }
        Ok(Self {
            n,
            t,
            eval_points,
            rho: 1,
        })
    }

    /// Same workers and points over `t/ρ` block pairs.
    pub fn compressed(&self, rho: usize) -> Result<Self> {
        let t = compressed_threshold(self.t, rho).map(|_| self.t / rho)?;
        Ok(Self {
            n: self.n,
            t,
            eval_points: self.eval_points.clone(),
            rho: self.rho * rho,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn rho(&self) -> usize {
        self.rho
    }

    pub fn eval_points(&self) -> &[f64] {
        &self.eval_points
    }

    /// `2t − 1`.
    pub fn recovery_threshold(&self) -> usize {
        threshold_of(self.t)
    }

    /// Evaluates `p̃_A` and `p̃_B` at every worker's point.
    pub fn encode(&self, tasks: &WeightedBlocks<'_>) -> Result<Vec<WorkerEncoding>> {
        self.encode_workers(tasks, 0..self.n)
    }

    /// Like [`Self::encode`] for a subset of workers.
    pub fn encode_workers(
        &self,
        tasks: &WeightedBlocks<'_>,
        workers: impl IntoIterator<Item = usize>,
    ) -> Result<Vec<WorkerEncoding>> {
        if tasks.len() != self.t {
            return Err(Error::DimensionMismatch(format!(
                "code has t={} but {} tasks were given",
                self.t,
                tasks.len()
            )));
        }
        let (a_coeffs, b_coeffs): (Vec<_>, Vec<_>) =
            (0..self.t).map(|j| tasks.balanced_factors(j)).unzip();
        // p̃_B is ascending in B̃'_{t-1}, ..., B̃'_0
        let b_ascending: Vec<&DenseMatrix> = b_coeffs.iter().rev().collect();
        let a_ascending: Vec<&DenseMatrix> = a_coeffs.iter().collect();
        workers
            .into_iter()
            .map(|w| {
                let x = *self
                    .eval_points
                    .get(w)
                    .ok_or_else(|| Error::InvalidScheme(format!("worker {w} out of range")))?;
                Ok(WorkerEncoding {
                    worker: w,
                    point: x,
                    pa: horner(&a_ascending, x),
                    pb: horner(&b_ascending, x),
                })
            })
            .collect()
    }

    /// Interpolates through the `2t − 1` lowest-id responders and returns the
    /// `x^(t−1)` coefficient.
    pub fn decode(&self, responses: &[WorkerResponse]) -> Result<DenseMatrix> {
        let threshold = self.recovery_threshold();
        let mut picked: Vec<&WorkerResponse> = responses.iter().collect();
        picked.sort_by_key(|r| r.worker);
        picked.dedup_by_key(|r| r.worker);
        let mut selected: Vec<&WorkerResponse> = Vec::with_capacity(threshold);
        for r in picked {
            if selected.len() == threshold {
                break;
            }
            if !selected.iter().any(|s| s.point == r.point) {
                selected.push(r);
            }
        }
        if selected.len() < threshold {
            return Err(Error::BelowThreshold {
                received: selected.len(),
                threshold,
            });
        }
        let points: Vec<f64> = selected.iter().map(|r| r.point).collect();
        let lambda = coefficient_weights(&points, self.t - 1)?;
        let (l, m) = selected[0].value.shape();
        let mut out = alloc::vec![0.0; l * m];
        for (r, &lam) in selected.iter().zip(&lambda) {
            if r.value.shape() != (l, m) {
                return Err(Error::DimensionMismatch("responses differ in shape".into()));
            }
            for (o, v) in out.iter_mut().zip(r.value.data()) {
                *o += lam * v;
            }
        }
        Ok(DenseMatrix::from_raw(l, m, out))
    }
}

/// `Σ_k coeffs[k] x^k` by Horner's rule.
fn horner(coeffs: &[&DenseMatrix], x: f64) -> DenseMatrix {
    let (last, rest) = coeffs.split_last().expect("at least one coefficient");
    let (rows, cols) = last.shape();
    let mut acc = last.data().to_vec();
    for c in rest.iter().rev() {
        for (a, v) in acc.iter_mut().zip(c.data()) {
            *a = *a * x + v;
        }
    }
    DenseMatrix::from_raw(rows, cols, acc)
}

/// Recovery threshold `2(t/ρ) − 1` after compressing by `ρ`.
pub fn compressed_threshold(t: usize, rho: usize) -> Result<usize> {
    if rho == 0 || t == 0 || !t.is_multiple_of(rho) {
        return Err(Error::InvalidScheme(format!("rho={rho} does not divide t={t}")));
    }
    Ok(threshold_of(t / rho))
}

/// `p̃_A(x_i)` and `p̃_B(x_i)` for worker `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct WorkerEncoding {
    pub worker: usize,
    pub point: f64,
    pub pa: DenseMatrix,
    pub pb: DenseMatrix,
}

/// `C_w̃(x_i) = p̃_A(x_i)·p̃_B(x_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WorkerResponse {
    pub worker: usize,
    pub point: f64,
    pub value: DenseMatrix,
}

pub fn worker_multiply(enc: &WorkerEncoding) -> WorkerResponse {
    WorkerResponse {
        worker: enc.worker,
        point: enc.point,
        value: matmul(&enc.pa, &enc.pb).expect("encodings share the block width"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::BlockPartition;
    use alloc::vec;

    fn scalar_pair() -> (DenseMatrix, DenseMatrix) {
        (
            DenseMatrix::from_rows(&[[1.0, 2.0]]).unwrap(),
            DenseMatrix::from_rows(&[[3.0], [4.0]]).unwrap(),
        )
    }

    fn code_at(points: Vec<f64>, t: usize) -> MatDotCode {
        MatDotCode::with_points(points, t).unwrap()
    }

    #[test]
    fn scalar_encoding_at_zero() {
        let (a, b) = scalar_pair();
        let tasks = WeightedBlocks::unscaled(
            BlockPartition::columns(&a, 2).unwrap(),
            BlockPartition::rows(&b, 2).unwrap(),
            vec![0, 1],
            vec![1.0, 1.0],
        )
        .unwrap();
        let code = code_at(vec![0.0, 1.0, -1.0], 2);
        let enc = code.encode(&tasks).unwrap();
        assert_eq!(enc[0].pa.data(), &[1.0]);
        assert_eq!(enc[0].pb.data(), &[4.0]);
        // x = 1: (1 + 2)(3 + 4)
        assert_eq!(worker_multiply(&enc[1]).value.data(), &[21.0]);
    }

    #[test]
    fn sqrt_weighting_of_coefficients() {
        let (a, b) = scalar_pair();
        let (pa, pb) = (
            BlockPartition::columns(&a, 2).unwrap(),
            BlockPartition::rows(&b, 2).unwrap(),
        );
        let code = code_at(vec![0.0, 0.5, -0.5], 2);
        let plain = WeightedBlocks::unscaled(pa, pb, vec![0, 1], vec![1.0, 1.0]).unwrap();
        let heavy = WeightedBlocks::unscaled(pa, pb, vec![0, 1], vec![4.0, 1.0]).unwrap();
        // p̃_A(0) is the constant coefficient √w̃₁·a₁
        assert_eq!(code.encode(&plain).unwrap()[0].pa.data(), &[1.0]);
        assert_eq!(code.encode(&heavy).unwrap()[0].pa.data(), &[2.0]);
        // p̃_B(0) is √w̃₂·b₂
        assert_eq!(code.encode(&heavy).unwrap()[0].pb.data(), &[4.0]);
    }

    #[test]
    fn single_block_every_worker_identical() {
        let (a, b) = scalar_pair();
        let tasks = WeightedBlocks::unscaled(
            BlockPartition::columns(&a, 2).unwrap(),
            BlockPartition::rows(&b, 2).unwrap(),
            vec![1],
            vec![3.0],
        )
        .unwrap();
        let code = MatDotCode::new(4, 1).unwrap();
        for enc in code.encode(&tasks).unwrap() {
            assert!((worker_multiply(&enc).value.data()[0] - 24.0).abs() < 1e-12);
        }
    }

    #[test]
    fn decode_scalar_examples() {
        let (a, b) = scalar_pair();
        let (pa, pb) = (
            BlockPartition::columns(&a, 2).unwrap(),
            BlockPartition::rows(&b, 2).unwrap(),
        );
        let code = MatDotCode::new(3, 2).unwrap();
        for (weights, expected) in [([1.0, 1.0], 11.0), ([2.0, 1.0], 14.0)] {
            let tasks = WeightedBlocks::unscaled(pa, pb, vec![0, 1], weights.to_vec()).unwrap();
            let responses: Vec<_> = code.encode(&tasks).unwrap().iter().map(worker_multiply).collect();
            let y = code.decode(&responses).unwrap();
            assert!((y.data()[0] - expected).abs() < 1e-12, "{:?}", y);
        }
    }

    #[test]
    fn insufficient_workers() {
        assert_eq!(
            MatDotCode::new(4, 3),
            Err(Error::InsufficientWorkers {
                workers: 4,
                threshold: 5
            })
        );
    }

    #[test]
    fn rejects_bad_points() {
        assert!(MatDotCode::with_points(vec![0.1, 0.1, 0.2], 2).is_err());
        assert!(MatDotCode::with_points(vec![0.1, 1.5, 0.2], 2).is_err());
    }

    #[test]
    fn below_threshold_refuses() {
        let (a, b) = scalar_pair();
        let tasks = WeightedBlocks::unscaled(
            BlockPartition::columns(&a, 2).unwrap(),
            BlockPartition::rows(&b, 2).unwrap(),
            vec![0, 1],
            vec![1.0, 1.0],
        )
        .unwrap();
        let code = MatDotCode::new(5, 2).unwrap();
        let responses: Vec<_> = code.encode(&tasks).unwrap().iter().map(worker_multiply).collect();
        // duplicates of one worker do not count twice
        let dup = vec![responses[0].clone(), responses[0].clone(), responses[3].clone()];
        assert_eq!(
            code.decode(&dup),
            Err(Error::BelowThreshold {
                received: 2,
                threshold: 3
            })
        );
    }

    #[test]
    fn compressed_threshold_formula() {
        assert_eq!(compressed_threshold(7, 1), Ok(13));
        assert_eq!(compressed_threshold(8, 2), Ok(7));
        assert_eq!(compressed_threshold(500, 20), Ok(49));
        assert!(compressed_threshold(8, 3).is_err());
        assert!(compressed_threshold(8, 0).is_err());
        let code = MatDotCode::new(20, 8).unwrap().compressed(4).unwrap();
        assert_eq!((code.n(), code.t(), code.recovery_threshold()), (20, 2, 3));
    }
}
