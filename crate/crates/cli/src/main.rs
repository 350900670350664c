use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use graphmat::catalog;
use graphmat::error::Error;
use graphmat::gmatrix::DEFAULT_CAP_ENTRIES;
use graphmat::harness::{
    self, ExperimentConfig, ExperimentReport, Mode, Suite, SuiteOptions, SuiteReport,
};
use graphmat::shape::{parse_shape, ShapeGraph};

/// Graph matrices of random graphs: norm bounds, estimates and checks.
#[derive(Debug, Parser)]
#[command(name = "graphmat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the norm upper bound and lower-bound scale for a shape.
    Bound(RunArgs),
    /// Estimate the operator norm on sampled graphs.
    Estimate(RunArgs),
    /// Run a named verification suite.
    Verify(VerifyArgs),
    /// Fit the log-log slope of the median norm against n.
    Tightness(RunArgs),
    /// Exact and sampled trace moments.
    Moments(RunArgs),
    /// Minimum U-V separator and disjoint paths of a shape.
    Separator(SeparatorArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Write the report to PATH (CSV records) and PATH.summary.json.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads [default: machine parallelism].
    #[arg(long, value_name = "INT")]
    workers: Option<usize>,
    /// Largest explicit matrix, in entries.
    #[arg(long, value_name = "INT", env = "GRAPHMAT_CAP_ENTRIES", default_value_t = DEFAULT_CAP_ENTRIES)]
    cap_entries: u128,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Shape file (TOML or JSON) or a built-in shape name.
    #[arg(long, value_name = "PATH")]
    shape: String,
    /// Single input-graph size.
    #[arg(
        long,
        value_name = "INT",
        conflicts_with = "n_grid",
        required_unless_present = "n_grid"
    )]
    n: Option<usize>,
    /// Ascending comma-separated sizes.
    #[arg(long, value_name = "a,b,c", value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
    /// Allowed failure probability.
    #[arg(long, value_name = "FLOAT", default_value_t = 0.01)]
    epsilon: f64,
    /// Sampled graphs per n.
    #[arg(long, value_name = "INT", default_value_t = 20)]
    trials: usize,
    /// Master seed.
    #[arg(long, value_name = "INT", default_value_t = 0)]
    seed: u64,
    /// Moment order k (moments only).
    #[arg(long, value_name = "INT", default_value_t = 2)]
    k: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long, value_name = "NAME")]
    suite: String,
    /// Number of random instances [default: per suite].
    #[arg(long, value_name = "INT")]
    count: Option<usize>,
    /// Sampled graphs per configuration [default: per suite].
    #[arg(long, value_name = "INT")]
    trials: Option<usize>,
    /// Master seed.
    #[arg(long, value_name = "INT", default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct SeparatorArgs {
    /// Shape file (TOML or JSON) or a built-in shape name.
    #[arg(long, value_name = "PATH")]
    shape: String,
    /// Write the summary to PATH.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::MalformedShape(_) | Error::InvalidShape(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn load_shape(arg: &str) -> Result<ShapeGraph, Failure> {
    let path = Path::new(arg);
    if path.exists() {
        let text =
            std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{arg}: {e}")))?;
        return parse_shape(&text).map_err(|e| Failure::Usage(format!("{arg}: {e}")));
    }
    catalog::by_name(arg).ok_or_else(|| {
        Failure::Usage(format!(
            "{arg}: no such file and not a built-in shape ({})",
            catalog::NAMES.join(", ")
        ))
    })
}

fn summary_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".summary.json");
    PathBuf::from(s)
}

fn emit_summary(summary: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, format!("{summary}\n"))
            .map_err(|e| Failure::Runtime(format!("{}: {e}", p.display()))),
        None => {
            writeln!(io::stdout().lock(), "{summary}").map_err(|e| Failure::Runtime(e.to_string()))
        }
    }
}

fn emit_report(report: &ExperimentReport, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => {
            let f =
                File::create(p).map_err(|e| Failure::Runtime(format!("{}: {e}", p.display())))?;
            report.write_csv(BufWriter::new(f))?;
            emit_summary(&report.summary_json(), Some(&summary_path(p)))
        }
        None => emit_summary(&report.summary_json(), None),
    }
}

fn run(args: RunArgs, mode: Mode) -> Result<bool, Failure> {
    let shape = load_shape(&args.shape)?;
    let mut config = ExperimentConfig::new(shape, mode);
    config.shape_label = args.shape;
    config.n_grid = match (args.n, args.n_grid) {
        (Some(n), _) => vec![n],
        (None, Some(grid)) => grid,
        (None, None) => unreachable!("clap requires --n or --n-grid"),
    };
    config.trials = args.trials;
    config.master_seed = args.seed;
    config.epsilon = args.epsilon;
    config.k = args.k;
    config.workers = args.common.workers;
    config.cap_entries = args.common.cap_entries;
    let report = harness::run_experiment(&config)?;
    emit_report(&report, args.common.out.as_deref())?;
    for name in report.hard_failures() {
        eprintln!("failed: {name}");
    }
    Ok(report.passed())
}

fn verify(args: VerifyArgs) -> Result<bool, Failure> {
    let suites: Vec<Suite> = if args.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        let s = Suite::from_name(&args.suite).ok_or_else(|| {
            let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
            Failure::Usage(format!(
                "unknown suite `{}` (expected all, {})",
                args.suite,
                names.join(", ")
            ))
        })?;
        vec![s]
    };
    if args.common.workers == Some(0) {
        return Err(Failure::Usage("workers must be at least 1".into()));
    }
    let opts = SuiteOptions {
        seed: args.seed,
        count: args.count,
        trials: args.trials,
        workers: args.common.workers,
        cap_entries: args.common.cap_entries,
        budget: harness::DEFAULT_BUDGET,
    };
    let reports: Vec<SuiteReport> = suites
        .iter()
        .map(|&s| {
            let r = harness::run_suite(s, &opts);
            eprintln!("{}: {}", s.name(), if r.passed { "pass" } else { "FAIL" });
            for c in r.checks.iter().filter(|c| !c.passed) {
                eprintln!("  {}: {}", c.name, c.detail);
            }
            r
        })
        .collect();
    let passed = reports.iter().all(|r| r.passed);
    let summary =
        serde_json::to_string_pretty(&reports).map_err(|e| Failure::Runtime(e.to_string()))?;
    emit_summary(&summary, args.common.out.as_deref())?;
    Ok(passed)
}

fn separator(args: SeparatorArgs) -> Result<bool, Failure> {
    let shape = load_shape(&args.shape)?;
    let mut config = ExperimentConfig::new(shape, Mode::Separator);
    config.shape_label = args.shape;
    config.n_grid = Vec::new();
    config.budget = Duration::MAX;
    let report = harness::run_experiment(&config)?;
    emit_summary(&report.summary_json(), args.out.as_deref())?;
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Bound(a) => run(a, Mode::Bound),
        Command::Estimate(a) => run(a, Mode::Estimate),
        Command::Tightness(a) => run(a, Mode::Tightness),
        Command::Moments(a) => run(a, Mode::Moments),
        Command::Verify(a) => verify(a),
        Command::Separator(a) => separator(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
