//! Block-wise weighted CR approximate matrix multiplication and two
//! straggler-robust weighted coded matrix multiplication (WCMM) schemes.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, experiment
//! drivers and the command-line front end live in the `wcmm` crate.
//!
//! The pipeline:
//!
//! ```text
//!  A (L×N), B (N×M)
//!       │  BlockPartition (K blocks of width τ = N/K)
//!       ▼
//!  SamplingDistribution  Π_i ∝ ‖Ã_i‖_F ‖B̃_i‖_F
//!       │  draw (until t distinct | fixed count)
//!       ▼
//!  SampleMultiset ──► SketchPair (C̃, R̃) or (C_w, R_w) ──► Y = C R
//!       │
//!       ▼
//!  WeightedBlocks  Σ_j w̃_j X_j ──► GcScheme / MatDotCode ──► simulate(trace)
//! ```
#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` style checks deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
pub mod gc;
pub mod interp;
pub mod matdot;
pub mod matrix;
pub mod rng;
pub mod sampling;
pub mod sim;
pub mod tasks;

pub use error::{Error, Result};
pub use gc::{GcScheme, TaskAssignment, WeightedTask};
pub use matdot::{MatDotCode, WorkerEncoding, WorkerResponse};
pub use matrix::{block_outer_sum, frobenius_norm, matmul, Axis, BlockPartition, DenseMatrix};
pub use sampling::{
    BlockSampler, SampleMultiset, SamplingDistribution, SamplingPlan, SketchKind, SketchPair,
    StoppingRule,
};
pub use sim::{Codec, SimOutcome, TraceSource, WorkerTrace};
pub use tasks::WeightedBlocks;
