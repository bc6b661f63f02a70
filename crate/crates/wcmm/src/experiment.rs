//! Instance generation and the two experiment drivers.
//!
//! Every random choice is keyed by `(seed, stream)`: the instance of seed `s`
//! uses stream 0, sampling at compression `ρ` uses streams `2ρ` (optimal Π)
//! and `2ρ + 1` (uniform). Trials run in parallel and are reduced in trial
//! order, so output is bit-identical for a given config.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use wcmm_core::sampling::{
    build_unweighted_sketch, build_weighted_sketch, estimate_product, uniform_probabilities,
};
use wcmm_core::sim::{simulate, synth_trace};
use wcmm_core::{
    matmul, rng, BlockPartition, BlockSampler, Codec, DenseMatrix, GcScheme, MatDotCode,
    SamplingDistribution, SamplingPlan, SimOutcome, SketchKind, SketchPair, StoppingRule,
    WeightedBlocks, WorkerTrace,
};

use crate::config::{ExperimentConfig, ExperimentKind, SchemeKind, TraceSpec};
use crate::{io, Result};

/// A generated pair `A (rows×inner)`, `B (inner×cols)`.
#[derive(Clone, Debug)]
pub struct Instance {
    pub a: DenseMatrix,
    pub b: DenseMatrix,
    pub blocks: usize,
    pub seed: u64,
}

/// Summary of a generated instance.
#[derive(Clone, Debug, Serialize)]
pub struct InstanceReport {
    pub rows: usize,
    pub inner: usize,
    pub cols: usize,
    pub blocks: usize,
    pub tau: usize,
    pub seed: u64,
    pub norm_product_sq: f64,
    /// `max Π / min Π` over blocks with positive probability.
    pub pi_ratio: f64,
}

impl Instance {
    pub fn partitions(&self) -> Result<(BlockPartition<'_>, BlockPartition<'_>)> {
        Ok((
            BlockPartition::columns(&self.a, self.blocks)?,
            BlockPartition::rows(&self.b, self.blocks)?,
        ))
    }

    /// `‖A‖²_F ‖B‖²_F`.
    pub fn norm_product_sq(&self) -> f64 {
        self.a.frobenius_norm_sq() * self.b.frobenius_norm_sq()
    }

    pub fn distribution(&self) -> Result<SamplingDistribution> {
        let (pa, pb) = self.partitions()?;
        Ok(SamplingDistribution::optimal(&pa, &pb)?)
    }

    pub fn report(&self) -> Result<InstanceReport> {
        let pi = self.distribution()?;
        let positive = pi.pi().iter().copied().filter(|&p| p > 0.0);
        let (lo, hi) = positive.fold((f64::INFINITY, 0.0f64), |(lo, hi), p| (lo.min(p), hi.max(p)));
        Ok(InstanceReport {
            rows: self.a.rows(),
            inner: self.a.cols(),
            cols: self.b.cols(),
            blocks: self.blocks,
            tau: self.a.cols() / self.blocks,
            seed: self.seed,
            norm_product_sq: self.norm_product_sq(),
            pi_ratio: hi / lo,
        })
    }
}

/// Gaussian blocks whose energies follow a power law.
///
/// Block `i` of `A` (and, independently, of `B`) has i.i.d. `N(0, σ_i²)`
/// entries with `σ_i² = U_i^(−exponent)`, `U_i ~ Uniform(0, 1]`. Exponent 0
/// makes all blocks statistically alike; larger exponents give heavier tails
/// and a more skewed Π.
pub fn gen_instance(config: &ExperimentConfig, seed: u64) -> Result<Instance> {
    config.validate(ExperimentKind::Instance)?;
    let (l, n, m, k) = (config.rows, config.inner, config.cols, config.blocks);
    let tau = n / k;
    let mut r = rng::seeded(seed);
    let scales = |r: &mut rng::Rng| -> Vec<f64> {
        (0..k)
            .map(|_| (1.0 - r.random::<f64>()).powf(-config.exponent / 2.0))
            .collect()
    };
    let sa = scales(&mut r);
    let sb = scales(&mut r);
    let a_data = (0..l * n)
        .map(|idx| sa[(idx % n) / tau] * r.sample::<f64, _>(StandardNormal))
        .collect();
    let b_data = (0..n * m)
        .map(|idx| sb[(idx / m) / tau] * r.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(Instance {
        a: DenseMatrix::new(l, n, a_data)?,
        b: DenseMatrix::new(n, m, b_data)?,
        blocks: k,
        seed,
    })
}

/// One line of the sampling-error table. Errors are `‖AB − C_w R_w‖²_F`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceRow {
    pub rho: usize,
    pub tasks: usize,
    pub mean_err_weighted: f64,
    pub var_weighted: f64,
    pub mean_err_uniform: f64,
    pub var_uniform: f64,
}

/// Squared sampling error of the weighted sketch for one distribution.
fn sketch_error(
    inst: &Instance,
    exact: &DenseMatrix,
    pi: &[f64],
    t: usize,
    stream: u64,
) -> Result<f64> {
    let (pa, pb) = inst.partitions()?;
    let sample = BlockSampler::new(pi)?
        .draw(StoppingRule::until_distinct(t), &mut rng::stream(inst.seed, stream))?;
    let y = estimate_product(&build_weighted_sketch(&pa, &pb, pi, &sample)?);
    Ok(exact.sub(&y)?.frobenius_norm_sq())
}

fn mean_and_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

/// For each ρ, `trials` fresh instances (seeds `seed, seed+1, ...`) sampled
/// until `blocks/ρ` distinct blocks under the optimal and the uniform
/// distribution.
pub fn run_variance_experiment(config: &ExperimentConfig) -> Result<Vec<VarianceRow>> {
    config.validate(ExperimentKind::Variance)?;
    let per_trial: Vec<Vec<(f64, f64)>> = (0..config.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let inst = gen_instance(config, config.seed.wrapping_add(trial))?;
            let exact = matmul(&inst.a, &inst.b)?;
            let optimal = inst.distribution()?;
            let uniform = uniform_probabilities(config.blocks);
            config
                .rhos
                .iter()
                .map(|&rho| {
                    let t = config.tasks_for(rho);
                    let s = 2 * rho as u64;
                    Ok((
                        sketch_error(&inst, &exact, optimal.pi(), t, s)?,
                        sketch_error(&inst, &exact, &uniform, t, s + 1)?,
                    ))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(config
        .rhos
        .iter()
        .enumerate()
        .map(|(i, &rho)| {
            let w: Vec<f64> = per_trial.iter().map(|row| row[i].0).collect();
            let u: Vec<f64> = per_trial.iter().map(|row| row[i].1).collect();
            let (mean_err_weighted, var_weighted) = mean_and_var(&w);
            let (mean_err_uniform, var_uniform) = mean_and_var(&u);
            VarianceRow {
                rho,
                tasks: config.tasks_for(rho),
                mean_err_weighted,
                var_weighted,
                mean_err_uniform,
                var_uniform,
            }
        })
        .collect())
}

/// One simulated run at compression `rho` (1 is the exact baseline).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StragglerRow {
    pub scheme: SchemeKind,
    pub rho: usize,
    pub tasks: usize,
    pub tolerated: usize,
    pub recovery_threshold: usize,
    pub completion_time: f64,
    pub baseline_time: Option<f64>,
    pub speedup: Option<f64>,
    /// `‖AB − Y‖²_F / (‖A‖²_F ‖B‖²_F)`.
    pub rel_error: f64,
    /// Total sampling draws behind the plan; `None` for the exhaustive plan.
    pub draws: Option<usize>,
}

impl StragglerRow {
    fn new(config: &ExperimentConfig, rho: usize, tasks: usize, draws: Option<usize>, out: &SimOutcome) -> Self {
        Self {
            scheme: config.scheme,
            rho,
            tasks,
            tolerated: config.workers - out.recovery_threshold,
            recovery_threshold: out.recovery_threshold,
            completion_time: out.completion_time,
            baseline_time: out.baseline_time,
            speedup: out.speedup,
            rel_error: out.rel_error,
            draws,
        }
    }
}

pub fn load_trace(config: &ExperimentConfig) -> Result<WorkerTrace> {
    match &config.trace {
        TraceSpec::Csv { path } => io::load_trace(path),
        TraceSpec::Synthetic { shift, rate } => {
            Ok(synth_trace(config.workers, *shift, *rate, config.seed)?)
        }
    }
}

/// Code for `t` tasks on `config.workers` workers; `rho` is the compression
/// relative to the exhaustive `t = blocks` code.
pub fn codec_for(config: &ExperimentConfig, rho: usize) -> Result<Codec> {
    Ok(match config.scheme {
        SchemeKind::Gc => Codec::Gc(
            GcScheme::with_tasks(config.workers, config.stragglers, config.blocks)?
                .compressed_tolerance(rho)?,
        ),
        SchemeKind::Matdot => Codec::MatDot(MatDotCode::new(config.workers, config.tasks_for(rho))?),
    })
}

/// Samples `blocks/rho` distinct blocks of `inst` and simulates the coded
/// computation on `trace`. `rho = 1` runs the exhaustive plan instead.
pub fn simulate_at(
    config: &ExperimentConfig,
    inst: &Instance,
    trace: &WorkerTrace,
    rho: usize,
) -> Result<(SimOutcome, Option<usize>)> {
    let (pa, pb) = inst.partitions()?;
    let codec = codec_for(config, rho)?;
    if rho == 1 {
        let tasks = WeightedBlocks::exhaustive(pa, pb)?;
        return Ok((simulate(&codec, trace, &tasks)?, None));
    }
    let pi = inst.distribution()?;
    let sample = BlockSampler::new(pi.pi())?.draw(
        StoppingRule::until_distinct(config.tasks_for(rho)),
        &mut rng::stream(inst.seed, 2 * rho as u64),
    )?;
    let tasks = WeightedBlocks::from_sample(pa, pb, pi.pi(), &sample)?;
    Ok((simulate(&codec, trace, &tasks)?, Some(sample.total_draws())))
}

/// The exact `ρ = 1` baseline followed by every other `ρ` of the sweep, all
/// on one instance and one trace. A MatDot baseline needs
/// `workers ≥ 2·blocks − 1` and is skipped otherwise.
pub fn run_straggler_experiment(config: &ExperimentConfig) -> Result<Vec<StragglerRow>> {
    config.validate(ExperimentKind::Straggler)?;
    let inst = gen_instance(config, config.seed)?;
    let trace = load_trace(config)?;
    let baseline_fits = match config.scheme {
        SchemeKind::Gc => true,
        SchemeKind::Matdot => config.workers + 1 >= 2 * config.blocks,
    };
    let mut rows = Vec::new();
    let baseline = if baseline_fits {
        let (out, _) = simulate_at(config, &inst, &trace, 1)?;
        rows.push(StragglerRow::new(config, 1, config.blocks, None, &out));
        Some(out)
    } else {
        None
    };
    for &rho in config.rhos.iter().filter(|&&r| r != 1) {
        let (mut out, draws) = simulate_at(config, &inst, &trace, rho)?;
        if let Some(base) = &baseline {
            out = out.with_baseline(base);
        }
        rows.push(StragglerRow::new(config, rho, config.tasks_for(rho), draws, &out));
    }
    Ok(rows)
}

/// A single sketch of `a·b` with `blocks` block pairs and `t` distinct
/// sampled blocks.
#[derive(Clone, Debug)]
pub struct SketchRun {
    pub sketch: SketchPair,
    pub plan: SamplingPlan,
    /// `‖AB − CR‖_F / ‖AB‖_F`.
    pub relative_error: f64,
}

pub fn run_sketch(
    a: &DenseMatrix,
    b: &DenseMatrix,
    blocks: usize,
    t: usize,
    seed: u64,
    kind: SketchKind,
) -> Result<SketchRun> {
    let (pa, pb) = (BlockPartition::columns(a, blocks)?, BlockPartition::rows(b, blocks)?);
    let pi = SamplingDistribution::optimal(&pa, &pb)?;
    let sample = BlockSampler::new(pi.pi())?
        .draw(StoppingRule::until_distinct(t), &mut rng::seeded(seed))?;
    let sketch = match kind {
        SketchKind::Weighted => build_weighted_sketch(&pa, &pb, pi.pi(), &sample)?,
        SketchKind::Unweighted => build_unweighted_sketch(&pa, &pb, pi.pi(), &sample)?,
    };
    let relative_error = estimate_product(&sketch).relative_error(&matmul(a, b)?)?;
    Ok(SketchRun {
        sketch,
        plan: SamplingPlan::new(pi.pi(), &sample, Some(seed)),
        relative_error,
    })
}
