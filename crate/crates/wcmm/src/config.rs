//! Experiment configuration: JSON files with per-experiment defaults, every
//! field overridable from the command line.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Gc,
    Matdot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    /// Instance generation only; the sweep fields are not checked.
    Instance,
    /// Sampling error of weighted vs uniform block sampling over a ρ sweep.
    Variance,
    /// Coded computation against a worker trace, compressed vs exact.
    Straggler,
}

/// Where worker completion times come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceSpec {
    Csv { path: PathBuf },
    /// Shifted exponential, seeded from the experiment seed.
    Synthetic { shift: f64, rate: f64 },
}

impl Default for TraceSpec {
    fn default() -> Self {
        TraceSpec::Synthetic {
            shift: 1.0,
            rate: 1.0,
        }
    }
}

/// `A` is `rows × inner`, `B` is `inner × cols`, split into `blocks` block
/// pairs. Each `rho` selects `t = blocks / rho` distinct blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub rows: usize,
    pub inner: usize,
    pub cols: usize,
    pub blocks: usize,
    pub rhos: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Power-law exponent of the per-block energies; 0 gives uniform blocks.
    pub exponent: f64,
    pub scheme: SchemeKind,
    pub workers: usize,
    pub stragglers: usize,
    pub trace: TraceSpec,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::preset(ExperimentKind::Variance, false)
    }
}

impl ExperimentConfig {
    /// Desk-scale defaults finish in seconds; `full_scale` selects the
    /// large published configuration.
    pub fn preset(kind: ExperimentKind, full_scale: bool) -> Self {
        let base = Self {
            rows: 64,
            inner: 960,
            cols: 64,
            blocks: 96,
            rhos: vec![2, 4, 8, 16],
            trials: 10,
            seed: 0,
            exponent: 2.0,
            scheme: SchemeKind::Gc,
            workers: 50,
            stragglers: 1,
            trace: TraceSpec::default(),
            output: None,
        };
        match (kind, full_scale) {
            (ExperimentKind::Variance | ExperimentKind::Instance, false) => base,
            (ExperimentKind::Variance | ExperimentKind::Instance, true) => Self {
                rows: 260,
                inner: 9600,
                cols: 280,
                blocks: 480,
                rhos: vec![2, 3, 4, 5, 6, 8, 10, 12, 15, 16],
                ..base
            },
            (ExperimentKind::Straggler, false) => Self {
                rows: 32,
                inner: 200,
                cols: 32,
                blocks: 50,
                rhos: vec![5],
                trials: 1,
                ..base
            },
            (ExperimentKind::Straggler, true) => Self {
                rows: 260,
                inner: 10_000,
                cols: 280,
                blocks: 500,
                rhos: vec![2, 20],
                trials: 1,
                workers: 500,
                stragglers: 19,
                ..base
            },
        }
    }

    /// Fields missing from `path` fall back to `base` rather than to the
    /// variance preset.
    pub fn load(path: &Path, base: &Self) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        let patch: serde_json::Value = serde_json::from_str(&text)?;
        let mut merged = serde_json::to_value(base)?;
        match (&mut merged, patch) {
            (serde_json::Value::Object(m), serde_json::Value::Object(p)) => m.extend(p),
            _ => return Err(Error::Config("config file must hold a JSON object".into())),
        }
        Ok(serde_json::from_value(merged)?)
    }

    pub fn tau(&self) -> usize {
        self.inner / self.blocks
    }

    /// Distinct blocks drawn at compression `rho`.
    pub fn tasks_for(&self, rho: usize) -> usize {
        self.blocks / rho
    }

    pub fn validate(&self, kind: ExperimentKind) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.rows == 0 || self.inner == 0 || self.cols == 0 || self.blocks == 0 {
            return fail("dimensions and block count must be positive".into());
        }
        if !self.inner.is_multiple_of(self.blocks) {
            return fail(format!("blocks={} does not divide inner={}", self.blocks, self.inner));
        }
        if !(self.exponent.is_finite() && self.exponent >= 0.0) {
            return fail(format!("exponent must be finite and >= 0, got {}", self.exponent));
        }
        if kind == ExperimentKind::Instance {
            return Ok(());
        }
        if self.rhos.is_empty() {
            return fail("rho sweep is empty".into());
        }
        if let Some(r) = self.rhos.iter().find(|&&r| r == 0 || !self.blocks.is_multiple_of(r)) {
            return fail(format!("rho={r} does not divide blocks={}", self.blocks));
        }
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if kind == ExperimentKind::Straggler {
            if self.stragglers >= self.workers {
                return fail(format!(
                    "need stragglers < workers, got {} and {}",
                    self.stragglers, self.workers
                ));
            }
            if let TraceSpec::Synthetic { shift, rate } = self.trace {
                if !(shift >= 0.0 && rate > 0.0 && shift.is_finite() && rate.is_finite()) {
                    return fail(format!("bad synthetic trace shift={shift}, rate={rate}"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for kind in [ExperimentKind::Variance, ExperimentKind::Straggler] {
            for full in [false, true] {
                ExperimentConfig::preset(kind, full).validate(kind).unwrap();
            }
        }
        let full = ExperimentConfig::preset(ExperimentKind::Variance, true);
        assert_eq!(full.tau(), 20);
    }

    #[test]
    fn rejects_bad_configs() {
        let kind = ExperimentKind::Variance;
        let ok = ExperimentConfig::default();
        let bad = [
            ExperimentConfig { blocks: 7, ..ok.clone() },
            ExperimentConfig { rhos: vec![5], ..ok.clone() },
            ExperimentConfig { rhos: vec![], ..ok.clone() },
            ExperimentConfig { trials: 0, ..ok.clone() },
            ExperimentConfig { exponent: -1.0, ..ok.clone() },
        ];
        for c in bad {
            assert!(matches!(c.validate(kind), Err(Error::Config(_))), "{c:?}");
        }
        let straggler = ExperimentConfig { stragglers: 50, ..ok };
        assert!(straggler.validate(ExperimentKind::Straggler).is_err());
    }

    #[test]
    fn json_round_trip_and_partial_files() {
        let c = ExperimentConfig::preset(ExperimentKind::Straggler, false);
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&text).unwrap(), c);
        let partial: ExperimentConfig = serde_json::from_str(r#"{"trials": 3}"#).unwrap();
        assert_eq!(partial.trials, 3);
        assert_eq!(partial.blocks, 96);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"trails": 3}"#).is_err());
    }
}
