//! Straggler simulation: per-worker completion times decide who responds,
//! the chosen codec decodes from the fastest responders.
//!
//! Only worker compute durations count; encoding, communication and decoding
//! latency are not modeled.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::gc::{worker_compute, GcScheme};
use crate::matdot::{worker_multiply, MatDotCode};
use crate::matrix::DenseMatrix;
use crate::tasks::WeightedBlocks;
use crate::{rng, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceSource {
    Csv { path: String },
    Synthetic { shift: f64, rate: f64, seed: u64 },
    Inline,
}

/// Completion durations (seconds) of `n` workers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorkerTrace {
    times: Vec<f64>,
    source: TraceSource,
}

impl WorkerTrace {
    pub fn new(times: Vec<f64>, source: TraceSource) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidTrace("trace is empty".into()));
        }
        if let Some(i) = times.iter().position(|t| !t.is_finite() || *t <= 0.0) {
            return Err(Error::InvalidTrace(format!(
                "worker {i} has non-positive duration {}",
                times[i]
            )));
        }
        Ok(Self { times, source })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn source(&self) -> &TraceSource {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Indices of the `f` fastest workers, ties broken by lower index.
    pub fn fastest(&self, f: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.times.len()).collect();
        order.sort_by(|&a, &b| self.times[a].total_cmp(&self.times[b]).then(a.cmp(&b)));
        order.truncate(f);
        order
    }

    /// The `f`-th smallest duration (1-based).
    pub fn order_statistic(&self, f: usize) -> f64 {
        let mut sorted = self.times.clone();
        sorted.sort_by(f64::total_cmp);
        sorted[f - 1]
    }
}

/// `times_i = shift + Exp(rate)`, i.i.d. and seeded.
pub fn synth_trace(n: usize, shift: f64, rate: f64, seed: u64) -> Result<WorkerTrace> {
    if !(shift >= 0.0) || !shift.is_finite() || !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::InvalidTrace(format!(
            "need shift >= 0 and rate > 0, got shift={shift}, rate={rate}"
        )));
    }
    let mut r = rng::seeded(seed);
    let times = (0..n)
        .map(|_| {
            let u: f64 = rand::Rng::random(&mut r);
            let t = shift - libm::log1p(-u) / rate;
            // a zero exponential draw with zero shift is not a valid duration
            if t > 0.0 { t } else { f64::MIN_POSITIVE }
        })
        .collect();
    WorkerTrace::new(times, TraceSource::Synthetic { shift, rate, seed })
}

/// Either coded scheme, as the simulator sees it.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum Codec {
    Gc(GcScheme),
    MatDot(MatDotCode),
}

impl Codec {
    pub fn n(&self) -> usize {
        match self {
            Codec::Gc(s) => s.n(),
            Codec::MatDot(c) => c.n(),
        }
    }

    pub fn t(&self) -> usize {
        match self {
            Codec::Gc(s) => s.t(),
            Codec::MatDot(c) => c.t(),
        }
    }

    /// Responses the server waits for.
    pub fn recovery_threshold(&self) -> usize {
        match self {
            Codec::Gc(s) => s.recovery_threshold(),
            Codec::MatDot(c) => c.recovery_threshold(),
        }
    }

    /// Runs the workers in `responders` and decodes from their replies.
    pub fn run(&self, tasks: &WeightedBlocks<'_>, responders: &[usize]) -> Result<DenseMatrix> {
        match self {
            Codec::Gc(scheme) => {
                let assignments = scheme.encode_tasks(tasks)?;
                let replies: Vec<_> = responders
                    .iter()
                    .map(|&w| worker_compute(&assignments[w], tasks))
                    .collect();
                scheme.decode(&replies)
            }
            Codec::MatDot(code) => {
                let replies: Vec<_> = code
                    .encode_workers(tasks, responders.iter().copied())?
                    .iter()
                    .map(worker_multiply)
                    .collect();
                code.decode(&replies)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimOutcome {
    pub responders: Vec<usize>,
    pub recovery_threshold: usize,
    /// The `f`-th order statistic of the trace.
    pub completion_time: f64,
    /// `‖AB − Y‖²_F / (‖A‖²_F ‖B‖²_F)`.
    pub rel_error: f64,
    pub baseline_time: Option<f64>,
    pub speedup: Option<f64>,
    #[serde(skip)]
    pub decoded: DenseMatrix,
}

impl SimOutcome {
    /// Records `baseline`'s completion time and the resulting time ratio.
    pub fn with_baseline(mut self, baseline: &SimOutcome) -> Self {
        self.baseline_time = Some(baseline.completion_time);
        self.speedup = Some(speedup_report(&self, baseline));
        self
    }
}

/// `‖AB − Y‖²_F / (‖A‖²_F ‖B‖²_F)`.
pub fn relative_sq_error(exact: &DenseMatrix, approx: &DenseMatrix, norm_product_sq: f64) -> Result<f64> {
    Ok(exact.sub(approx)?.frobenius_norm_sq() / norm_product_sq)
}

/// Waits for the `f` fastest workers of `trace` and decodes with `codec`.
pub fn simulate(codec: &Codec, trace: &WorkerTrace, tasks: &WeightedBlocks<'_>) -> Result<SimOutcome> {
    if trace.len() != codec.n() {
        return Err(Error::InvalidTrace(format!(
            "trace has {} workers, scheme has {}",
            trace.len(),
            codec.n()
        )));
    }
    let f = codec.recovery_threshold();
    let responders = trace.fastest(f);
    let completion_time = responders
        .iter()
        .map(|&w| trace.times()[w])
        .fold(0.0, f64::max);
    let decoded = codec.run(tasks, &responders)?;
    let (pa, pb) = tasks.partitions();
    let norm_sq = pa.source().frobenius_norm_sq() * pb.source().frobenius_norm_sq();
    let rel_error = relative_sq_error(&tasks.exact_product(), &decoded, norm_sq)?;
    Ok(SimOutcome {
        responders,
        recovery_threshold: f,
        completion_time,
        rel_error,
        baseline_time: None,
        speedup: None,
        decoded,
    })
}

/// Completion-time ratio `outcome / baseline`.
pub fn speedup_report(outcome: &SimOutcome, baseline: &SimOutcome) -> f64 {
    outcome.completion_time / baseline.completion_time
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::BlockPartition;
    use alloc::vec;

    #[test]
    fn trace_validation() {
        assert!(WorkerTrace::new(vec![], TraceSource::Inline).is_err());
        assert!(WorkerTrace::new(vec![1.0, 0.0], TraceSource::Inline).is_err());
        assert!(WorkerTrace::new(vec![1.0, -2.0], TraceSource::Inline).is_err());
    }

    #[test]
    fn fastest_with_ties() {
        let t = WorkerTrace::new(vec![3.0, 1.0, 2.0, 1.0], TraceSource::Inline).unwrap();
        assert_eq!(t.fastest(3), vec![1, 3, 2]);
        assert_eq!(t.order_statistic(3), 2.0);
    }

    #[test]
    fn synthetic_trace_degenerate_and_deterministic() {
        let t = synth_trace(50, 2.0, 1e9, 3).unwrap();
        assert!(t.times().iter().all(|x| (x - 2.0).abs() < 1e-6));
        assert_eq!(synth_trace(20, 1.0, 2.0, 9), synth_trace(20, 1.0, 2.0, 9));
        assert!(synth_trace(5, -1.0, 1.0, 0).is_err());
        assert!(synth_trace(5, 1.0, 0.0, 0).is_err());
    }

    #[test]
    fn synthetic_trace_mean() {
        let n = 10_000;
        let t = synth_trace(n, 1.0, 1.0, 17).unwrap();
        let mean = t.times().iter().sum::<f64>() / n as f64;
        // Exp(1) has unit variance
        assert!((mean - 2.0).abs() <= 3.0 / libm::sqrt(n as f64), "mean {mean}");
    }

    #[test]
    fn three_worker_trace() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0, 3.0]]).unwrap();
        let b = DenseMatrix::from_rows(&[[1.0], [1.0], [2.0]]).unwrap();
        let tasks = WeightedBlocks::exhaustive(
            BlockPartition::columns(&a, 3).unwrap(),
            BlockPartition::rows(&b, 3).unwrap(),
        )
        .unwrap();
        let codec = Codec::Gc(GcScheme::with_tasks(3, 1, 3).unwrap());
        let trace = WorkerTrace::new(vec![1.0, 2.0, 3.0], TraceSource::Inline).unwrap();
        let out = simulate(&codec, &trace, &tasks).unwrap();
        assert_eq!(out.responders, vec![0, 1]);
        assert_eq!(out.completion_time, 2.0);
        assert!(out.rel_error <= 1e-12);
        assert_eq!(speedup_report(&out, &out), 1.0);
    }

    #[test]
    fn trace_length_must_match() {
        let a = DenseMatrix::identity(2);
        let tasks = WeightedBlocks::exhaustive(
            BlockPartition::columns(&a, 2).unwrap(),
            BlockPartition::rows(&a, 2).unwrap(),
        )
        .unwrap();
        let codec = Codec::Gc(GcScheme::new(2, 1).unwrap());
        let trace = WorkerTrace::new(vec![1.0, 2.0, 3.0], TraceSource::Inline).unwrap();
        assert!(simulate(&codec, &trace, &tasks).is_err());
    }
}
