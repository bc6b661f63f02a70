use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wcmm::config::{ExperimentConfig, ExperimentKind, SchemeKind, TraceSpec};
use wcmm::experiment::{self, gen_instance, run_sketch};
use wcmm::{io, Error, Result};
use wcmm_core::SketchKind;

#[derive(Parser)]
#[command(name = "wcmm", version, about = "Weighted CR matrix multiplication experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance and write A and B.
    Gen {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out_a: PathBuf,
        #[arg(long)]
        out_b: PathBuf,
    },
    /// Sketch A·B from matrix files.
    Sketch(SketchArgs),
    /// Weighted vs uniform sampling error over a compression sweep.
    VarianceExp {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Coded computation on a worker trace: exact baseline vs compressed.
    StragglerExp {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// One coded run at the first compression factor of the sweep.
    Simulate {
        #[command(flatten)]
        config: ConfigArgs,
    },
}

/// Every field of the experiment config; flags override the JSON file,
/// which overrides the preset.
#[derive(Args)]
struct ConfigArgs {
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start from the large published configuration instead of desk scale.
    #[arg(long)]
    full_scale: bool,
    /// Rows of A.
    #[arg(long)]
    rows: Option<usize>,
    /// Shared dimension.
    #[arg(long)]
    inner: Option<usize>,
    /// Columns of B.
    #[arg(long)]
    cols: Option<usize>,
    /// Number of block pairs.
    #[arg(long)]
    blocks: Option<usize>,
    /// Compression factors, comma separated.
    #[arg(long, value_delimiter = ',')]
    rho: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Power-law exponent of the block energies.
    #[arg(long)]
    exponent: Option<f64>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    stragglers: Option<usize>,
    /// Worker trace CSV; replaces the synthetic trace.
    #[arg(long, conflicts_with_all = ["shift", "rate"])]
    trace: Option<PathBuf>,
    /// Synthetic trace shift.
    #[arg(long)]
    shift: Option<f64>,
    /// Synthetic trace rate.
    #[arg(long)]
    rate: Option<f64>,
    /// Output file; `.json` for JSON, otherwise CSV. Defaults to JSON on stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Gc,
    Matdot,
}

impl ConfigArgs {
    fn resolve(&self, kind: ExperimentKind) -> Result<ExperimentConfig> {
        let preset = ExperimentConfig::preset(kind, self.full_scale);
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path, &preset)?,
            None => preset,
        };
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field.clone() {
                    c.$field = v;
                }
            )*};
        }
        set!(rows, inner, cols, blocks, trials, seed, exponent, workers, stragglers);
        if let Some(r) = &self.rho {
            c.rhos = r.clone();
        }
        if let Some(s) = self.scheme {
            c.scheme = match s {
                SchemeArg::Gc => SchemeKind::Gc,
                SchemeArg::Matdot => SchemeKind::Matdot,
            };
        }
        if let Some(path) = &self.trace {
            c.trace = TraceSpec::Csv { path: path.clone() };
        } else if self.shift.is_some() || self.rate.is_some() {
            let (shift, rate) = match c.trace {
                TraceSpec::Synthetic { shift, rate } => (shift, rate),
                TraceSpec::Csv { .. } => (1.0, 1.0),
            };
            c.trace = TraceSpec::Synthetic {
                shift: self.shift.unwrap_or(shift),
                rate: self.rate.unwrap_or(rate),
            };
        }
        if self.output.is_some() {
            c.output = self.output.clone();
        }
        c.validate(kind)?;
        Ok(c)
    }
}

#[derive(Args)]
struct SketchArgs {
    /// Left factor (CRMM1 or .csv).
    #[arg(long)]
    a: PathBuf,
    /// Right factor (CRMM1 or .csv).
    #[arg(long)]
    b: PathBuf,
    #[arg(long)]
    blocks: usize,
    /// Distinct blocks to sample.
    #[arg(long)]
    tasks: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = KindArg::Weighted)]
    kind: KindArg,
    #[arg(long)]
    out_c: Option<PathBuf>,
    #[arg(long)]
    out_r: Option<PathBuf>,
    /// Sampling plan JSON.
    #[arg(long)]
    plan: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Weighted,
    Unweighted,
}

fn print_json<T: Serialize + ?Sized>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out).map_err(|e| Error::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    })
}

/// Writes `rows` to the configured output, or prints them as JSON.
fn emit<T: Serialize>(output: Option<&Path>, rows: &[T]) -> Result<()> {
    match output {
        Some(path) => io::write_rows(path, rows),
        None => print_json(rows),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { config, out_a, out_b } => {
            let c = config.resolve(ExperimentKind::Instance)?;
            let inst = gen_instance(&c, c.seed)?;
            io::write_matrix(&out_a, &inst.a)?;
            io::write_matrix(&out_b, &inst.b)?;
            print_json(&inst.report()?)
        }
        Command::Sketch(args) => {
            let a = io::read_matrix(&args.a)?;
            let b = io::read_matrix(&args.b)?;
            let (kind, label) = match args.kind {
                KindArg::Weighted => (SketchKind::Weighted, "weighted"),
                KindArg::Unweighted => (SketchKind::Unweighted, "unweighted"),
            };
            let run = run_sketch(&a, &b, args.blocks, args.tasks, args.seed, kind)?;
            if let Some(p) = &args.out_c {
                io::write_matrix(p, run.sketch.c())?;
            }
            if let Some(p) = &args.out_r {
                io::write_matrix(p, run.sketch.r())?;
            }
            if let Some(p) = &args.plan {
                io::write_json(p, &run.plan)?;
            }
            print_json(&serde_json::json!({
                "kind": label,
                "distinct": run.plan.distinct.len(),
                "draws": run.plan.draws.len(),
                "stored_entries": run.sketch.stored_entries(),
                "relative_error": run.relative_error,
            }))
        }
        Command::VarianceExp { config } => {
            let c = config.resolve(ExperimentKind::Variance)?;
            emit(c.output.as_deref(), &experiment::run_variance_experiment(&c)?)
        }
        Command::StragglerExp { config } => {
            let c = config.resolve(ExperimentKind::Straggler)?;
            emit(c.output.as_deref(), &experiment::run_straggler_experiment(&c)?)
        }
        Command::Simulate { config } => {
            let c = config.resolve(ExperimentKind::Straggler)?;
            let inst = gen_instance(&c, c.seed)?;
            let trace = experiment::load_trace(&c)?;
            let (outcome, _) = experiment::simulate_at(&c, &inst, &trace, c.rhos[0])?;
            let report = serde_json::json!({
                "trace": trace.source(),
                "outcome": outcome,
            });
            match &c.output {
                Some(path) => io::write_json(path, &report),
                None => print_json(&report),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{body}");
            ExitCode::FAILURE
        }
    }
}
