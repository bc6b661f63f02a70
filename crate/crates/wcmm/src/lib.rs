//! File formats, experiment drivers and the `wcmm` command-line harness on
//! top of [`wcmm_core`].
//!
//! Matrices are stored either as CRMM1 binary (`"CRMM1"`, rows and cols as
//! `u64` LE, then row-major `f64` LE) or as headerless CSV; the format is
//! chosen by file extension. Worker traces are one positive duration per CSV
//! row with an optional header.

pub mod config;
pub mod error;
pub mod experiment;
pub mod io;

pub use config::{ExperimentConfig, ExperimentKind, SchemeKind, TraceSpec};
pub use error::{Error, Result};
pub use experiment::{
    gen_instance, run_straggler_experiment, run_variance_experiment, Instance, StragglerRow,
    VarianceRow,
};
