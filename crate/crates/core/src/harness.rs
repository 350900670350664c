//! Seeded experiment runs and the named verification suites.
//!
//! Every trial draws its graph from a seed derived from
//! `(master_seed, grid index, trial)` alone, and results are collected in
//! trial order, so reports do not depend on the worker count.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{self, NormBoundReport, ShapeStats};
use crate::catalog;
use crate::error::{Error, Result};
use crate::gmatrix::{partition_average_exact, GraphMatrix, DEFAULT_CAP_ENTRIES};
use crate::linalg::{DenseMatrix, RealMatrix};
use crate::moment_oracle::{self, DEFAULT_ENUMERATION_CAP, DEFAULT_PATTERN_STEP_CAP};
use crate::oracle;
use crate::rgraph::InputGraph;
use crate::shape::{SeparatorResult, ShapeGraph};
use crate::spectral::{self, PowerOptions, SpectralEstimate};
use crate::witness;

/// Wall-time budget per configuration.
pub const DEFAULT_BUDGET: Duration = Duration::from_secs(600);

/// splitmix64 finalizer.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of trial `trial` at grid position `grid_index`.
pub fn trial_seed(master: u64, grid_index: usize, trial: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ grid_index as u64) ^ trial as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Bound,
    Estimate,
    Verify,
    Tightness,
    Moments,
    Separator,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub shape: ShapeGraph,
    /// Label used in reports, typically the shape file path.
    pub shape_label: String,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    pub epsilon: f64,
    pub mode: Mode,
    /// Moment order for [`Mode::Moments`].
    pub k: usize,
    /// `None` uses every available core.
    pub workers: Option<usize>,
    /// Largest explicit matrix (entries) before switching to matrix-free
    /// products, and the enumeration cap for exact moments.
    pub cap_entries: u128,
    pub power_tol: f64,
    pub budget: Duration,
}

impl ExperimentConfig {
    pub fn new(shape: ShapeGraph, mode: Mode) -> Self {
        ExperimentConfig {
            shape,
            shape_label: String::new(),
            n_grid: vec![64],
            trials: 20,
            master_seed: 0,
            epsilon: 0.01,
            mode,
            k: 2,
            workers: None,
            cap_entries: DEFAULT_CAP_ENTRIES,
            power_tol: spectral::DEFAULT_TOL,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.n_grid.is_empty() && self.mode != Mode::Separator {
            return Err(Error::InvalidArgument("n grid is empty".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "n grid must be strictly ascending".into(),
            ));
        }
        if self.n_grid.first() == Some(&0) {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must lie in (0,1), got {}",
                self.epsilon
            )));
        }
        if self.mode == Mode::Tightness && self.n_grid.len() < 3 {
            return Err(Error::InvalidArgument(
                "tightness needs at least 3 grid points".into(),
            ));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidArgument("workers must be at least 1".into()));
        }
        Ok(())
    }
}

/// One `(n, trial)` measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    /// Operator norm estimate, or the sampled trace moment in moments mode.
    pub value: Option<f64>,
    pub converged: Option<bool>,
    pub upper_bound: Option<f64>,
    pub lower_scale: Option<f64>,
    /// `value / lower_scale`.
    pub ratio: Option<f64>,
    pub exceeds_bound: bool,
    pub error: Option<String>,
}

/// Least-squares fit of `ln(median value)` against `ln n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub std_error: f64,
    pub points: usize,
    pub expected: f64,
}

/// A named pass/fail check. Only hard checks affect the exit status.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub hard: bool,
    pub detail: String,
}

impl CheckResult {
    fn hard(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            passed,
            hard: true,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentSummary {
    pub n: usize,
    pub k: usize,
    pub expected_trace: String,
    pub count_bound: Option<String>,
    pub corollary_bound: Option<String>,
    pub sample_mean: Option<f64>,
    pub sample_std_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub mode: Mode,
    pub shape: String,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    pub epsilon: f64,
    pub records: Vec<TrialRecord>,
    pub bounds: Vec<NormBoundReport>,
    pub fit: Option<SlopeFit>,
    pub moments: Vec<MomentSummary>,
    pub separator: Option<SeparatorReport>,
    pub suite: Option<SuiteReport>,
    pub violations: usize,
    pub checks: Vec<CheckResult>,
    pub skipped: Vec<String>,
    /// Wall time per grid point in milliseconds; excluded from
    /// [`ExperimentReport::body_json`].
    pub wall_ms: Vec<u128>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatorReport {
    pub q: usize,
    pub separator: Vec<String>,
    pub paths: Vec<Vec<String>>,
    pub path_lengths: Vec<usize>,
    pub vertex_cover: Option<Vec<String>>,
    pub brute_force_q: usize,
}

impl ExperimentReport {
    fn empty(config: &ExperimentConfig) -> Self {
        ExperimentReport {
            mode: config.mode,
            shape: config.shape_label.clone(),
            n_grid: config.n_grid.clone(),
            trials: config.trials,
            master_seed: config.master_seed,
            epsilon: config.epsilon,
            records: Vec::new(),
            bounds: Vec::new(),
            fit: None,
            moments: Vec::new(),
            separator: None,
            suite: None,
            violations: 0,
            checks: Vec::new(),
            skipped: Vec::new(),
            wall_ms: Vec::new(),
        }
    }

    /// Names of failed hard checks.
    pub fn hard_failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| c.hard && !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.hard_failures().is_empty()
    }

    /// Records as CSV with a header row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.records {
            w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
        }
        if self.records.is_empty() {
            w.write_record([
                "n",
                "trial",
                "seed",
                "value",
                "converged",
                "upper_bound",
                "lower_scale",
                "ratio",
                "exceeds_bound",
                "error",
            ])
            .map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Everything except records and wall times, as pretty JSON.
    pub fn summary_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("records");
            obj.insert(
                "hard_failures".into(),
                serde_json::json!(self.hard_failures()),
            );
            obj.insert("passed".into(), serde_json::json!(self.passed()));
        }
        serde_json::to_string_pretty(&v).expect("report serializes")
    }

    /// The full report minus wall times; identical across reruns.
    pub fn body_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("wall_ms");
            if let Some(s) = obj.get_mut("suite").and_then(|s| s.as_object_mut()) {
                s.remove("wall_ms");
            }
        }
        serde_json::to_string(&v).expect("report serializes")
    }
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let m = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[m]
    } else {
        (values[m - 1] + values[m]) / 2.0
    })
}

/// Ordinary least squares of `y` on `x`: `(slope, intercept, slope std error)`.
pub fn ols(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let k = x.len();
    if k < 3 || y.len() != k {
        return Err(Error::InvalidArgument(
            "slope fit needs at least 3 points".into(),
        ));
    }
    let kf = k as f64;
    let mx = x.iter().sum::<f64>() / kf;
    let my = y.iter().sum::<f64>() / kf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "slope fit needs distinct x values".into(),
        ));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let se = (rss / (kf - 2.0) / sxx).sqrt();
    Ok((slope, intercept, se))
}

/// `‖R_H‖` estimate on one graph: explicit when the matrix fits under `cap`,
/// matrix-free otherwise.
pub fn estimate_norm(
    shape: &ShapeGraph,
    graph: &InputGraph,
    cap: u128,
    tol: f64,
    seed: u64,
) -> Result<SpectralEstimate> {
    let m = GraphMatrix::new(shape, graph)?;
    let opts = PowerOptions {
        tol,
        max_iter: None,
        seed,
    };
    if m.entry_count() <= cap {
        spectral::operator_norm(&m.to_real(cap)?, &opts)
    } else {
        spectral::operator_norm(&m, &opts)
    }
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        b = b.num_threads(w);
    }
    b.build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

/// Cost growth exponent of one trial in `n`: matrix entries times middle sums.
fn cost_exponent(shape: &ShapeGraph) -> f64 {
    (shape.x() + shape.y() + shape.z()) as f64
}

fn bound_for(shape: &ShapeGraph, n: usize, epsilon: f64) -> Result<NormBoundReport> {
    bounds::norm_upper_bound(ShapeStats::from_shape(shape), n as u64, epsilon)
}

/// Runs `f(n, trial, seed)` over the grid with the wall-time guard: a grid
/// point projected to push the run past `budget` is skipped along with all
/// larger ones.
fn run_grid<T: Send>(
    config: &ExperimentConfig,
    report: &mut ExperimentReport,
    f: impl Fn(usize, usize, u64) -> T + Sync,
) -> Result<Vec<(usize, Vec<T>)>> {
    let pool = pool(config.workers)?;
    let start = Instant::now();
    let exponent = cost_exponent(&config.shape);
    let mut last: Option<(usize, Duration)> = None;
    let mut out = Vec::new();
    for (gi, &n) in config.n_grid.iter().enumerate() {
        if let Some((prev_n, prev_cost)) = last {
            let projected = prev_cost.mul_f64((n as f64 / prev_n as f64).powf(exponent));
            if start.elapsed() + projected > config.budget {
                for &m in &config.n_grid[gi..] {
                    report
                        .skipped
                        .push(format!("n={m}: projected to exceed the wall-time budget"));
                }
                break;
            }
        }
        let t0 = Instant::now();
        let results: Vec<T> = pool.install(|| {
            (0..config.trials)
                .into_par_iter()
                .map(|trial| f(n, trial, trial_seed(config.master_seed, gi, trial)))
                .collect()
        });
        let cost = t0.elapsed();
        report.wall_ms.push(cost.as_millis());
        last = Some((n, cost));
        out.push((n, results));
    }
    Ok(out)
}

/// Runs one experiment. Module errors inside trials are recorded per trial;
/// only configuration errors are returned.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let mut report = ExperimentReport::empty(config);
    match config.mode {
        Mode::Bound => run_bound(config, &mut report)?,
        Mode::Estimate | Mode::Tightness => run_estimate(config, &mut report)?,
        Mode::Moments => run_moments(config, &mut report)?,
        Mode::Separator => run_separator(config, &mut report)?,
        Mode::Verify => {
            return Err(Error::InvalidArgument(
                "verify mode runs a suite; use run_suite".into(),
            ));
        }
    }
    Ok(report)
}

fn run_bound(config: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    for &n in &config.n_grid {
        let b = bound_for(&config.shape, n, config.epsilon)?;
        report.records.push(TrialRecord {
            n,
            trial: 0,
            seed: 0,
            value: None,
            converged: None,
            upper_bound: Some(b.upper_bound),
            lower_scale: Some(b.lower_scale),
            ratio: None,
            exceeds_bound: false,
            error: None,
        });
        report.bounds.push(b);
    }
    Ok(())
}

fn run_estimate(config: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    let shape = &config.shape;
    let scale_ok = shape.middle_vertices_reach_boundary();
    let mut bound_by_n = BTreeMap::new();
    for &n in &config.n_grid {
        match bound_for(shape, n, config.epsilon) {
            Ok(b) => {
                bound_by_n.insert(n, b.upper_bound);
                report.bounds.push(b);
            }
            Err(e) => report.skipped.push(format!("n={n}: no upper bound ({e})")),
        }
    }
    let grid = run_grid(config, report, |n, trial, seed| {
        let outcome = InputGraph::sample(n, seed).and_then(|g| {
            estimate_norm(
                shape,
                &g,
                config.cap_entries,
                config.power_tol,
                splitmix64(seed),
            )
        });
        let upper = bound_by_n.get(&n).copied();
        let lower = scale_ok
            .then(|| bounds::lower_bound_scale(shape, n as u64).ok())
            .flatten();
        match outcome {
            Ok(est) => TrialRecord {
                n,
                trial,
                seed,
                value: Some(est.value),
                converged: Some(est.converged),
                upper_bound: upper,
                lower_scale: lower,
                ratio: lower.map(|l| est.value / l),
                exceeds_bound: upper.is_some_and(|u| est.value > u),
                error: None,
            },
            Err(e) => TrialRecord {
                n,
                trial,
                seed,
                value: None,
                converged: None,
                upper_bound: upper,
                lower_scale: lower,
                ratio: None,
                exceeds_bound: false,
                error: Some(e.to_string()),
            },
        }
    })?;

    let mut medians = Vec::new();
    for (n, recs) in grid {
        let mut vals: Vec<f64> = recs.iter().filter_map(|r| r.value).collect();
        if let Some(m) = median(&mut vals) {
            medians.push((n, m));
        }
        report.records.extend(recs);
    }
    let errors = report.records.iter().filter(|r| r.error.is_some()).count();
    report.checks.push(CheckResult::hard(
        "trials_without_error",
        errors == 0,
        format!("{errors} trial errors"),
    ));
    report.violations = report.records.iter().filter(|r| r.exceeds_bound).count();
    let total = report.records.len() as f64;
    let eps = config.epsilon;
    let allowed = eps + 3.0 * (eps * (1.0 - eps) / total.max(1.0)).sqrt();
    let frac = report.violations as f64 / total.max(1.0);
    report.checks.push(CheckResult::hard(
        "upper_bound_soundness",
        frac <= allowed,
        format!(
            "{} of {} trials above the bound (allowed fraction {allowed:.4})",
            report.violations, total
        ),
    ));

    if config.mode == Mode::Tightness {
        let expected = (shape.t() - shape.separator_size()) as f64 / 2.0;
        let xs: Vec<f64> = medians.iter().map(|&(n, _)| (n as f64).ln()).collect();
        let ys: Vec<f64> = medians
            .iter()
            .map(|&(_, m)| m.max(f64::MIN_POSITIVE).ln())
            .collect();
        match ols(&xs, &ys) {
            Ok((slope, intercept, std_error)) => {
                report.checks.push(CheckResult::hard(
                    "slope_matches_separator_exponent",
                    (slope - expected).abs() <= 0.15,
                    format!("fitted slope {slope:.4} ± {std_error:.4}, expected {expected}"),
                ));
                report.fit = Some(SlopeFit {
                    slope,
                    intercept,
                    std_error,
                    points: xs.len(),
                    expected,
                });
            }
            Err(e) => report.checks.push(CheckResult::hard(
                "slope_matches_separator_exponent",
                false,
                e.to_string(),
            )),
        }
    }
    Ok(())
}

fn run_moments(config: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    let shape = &config.shape;
    let k = config.k;
    let mut exact_by_n = BTreeMap::new();
    for &n in &config.n_grid {
        match moment_oracle::expected_trace_moment_exact(shape, n, k, None, config.cap_entries) {
            Ok(mc) => {
                if let Some(b) = &mc.bound {
                    report.checks.push(CheckResult::hard(
                        format!("count_bound_n{n}"),
                        mc.nonzero_terms <= b.value && b.value <= b.corollary,
                        format!("{} ≤ {} ≤ {}", mc.nonzero_terms, b.value, b.corollary),
                    ));
                }
                exact_by_n.insert(n, mc);
            }
            Err(e) => report
                .skipped
                .push(format!("n={n}: exact moment unavailable ({e})")),
        }
    }
    let grid = run_grid(config, report, |n, trial, seed| {
        let value = InputGraph::sample(n, seed)
            .and_then(|g| GraphMatrix::new(shape, &g)?.to_dense(config.cap_entries))
            .and_then(|m| spectral::trace_moment(&m, k));
        match value {
            Ok(v) => TrialRecord {
                n,
                trial,
                seed,
                value: Some(v as f64),
                converged: None,
                upper_bound: None,
                lower_scale: None,
                ratio: None,
                exceeds_bound: false,
                error: None,
            },
            Err(e) => TrialRecord {
                n,
                trial,
                seed,
                value: None,
                converged: None,
                upper_bound: None,
                lower_scale: None,
                ratio: None,
                exceeds_bound: false,
                error: Some(e.to_string()),
            },
        }
    })?;
    for (n, recs) in grid {
        let vals: Vec<f64> = recs.iter().filter_map(|r| r.value).collect();
        let (mean, se) = mean_and_se(&vals);
        let exact = exact_by_n.get(&n);
        if let (Some(mc), Some(mean), Some(se)) = (exact, mean, se) {
            let target: f64 = mc
                .expected_trace
                .to_string()
                .parse()
                .unwrap_or(f64::INFINITY);
            report.checks.push(CheckResult {
                name: format!("sample_mean_n{n}"),
                passed: within_se(mean, se, target, 5.0),
                hard: false,
                detail: format!("mean {mean:.4} ± {se:.4} vs exact {target}"),
            });
        }
        report.moments.push(MomentSummary {
            n,
            k,
            expected_trace: exact
                .map(|m| m.expected_trace.to_string())
                .unwrap_or_default(),
            count_bound: exact
                .and_then(|m| m.bound.as_ref())
                .map(|b| b.value.to_string()),
            corollary_bound: exact
                .and_then(|m| m.bound.as_ref())
                .map(|b| b.corollary.to_string()),
            sample_mean: mean,
            sample_std_error: se,
        });
        report.records.extend(recs);
    }
    Ok(())
}

fn mean_and_se(vals: &[f64]) -> (Option<f64>, Option<f64>) {
    if vals.is_empty() {
        return (None, None);
    }
    let k = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / k;
    if vals.len() < 2 {
        return (Some(mean), None);
    }
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (Some(mean), Some((var / k).sqrt()))
}

/// `|mean − target| ≤ width·se`; a zero standard error demands equality.
fn within_se(mean: f64, se: f64, target: f64, width: f64) -> bool {
    (mean - target).abs() <= width * se + 1e-9 * target.abs().max(1.0)
}

fn run_separator(config: &ExperimentConfig, report: &mut ExperimentReport) -> Result<()> {
    let shape = &config.shape;
    let sep: SeparatorResult = shape.min_separator();
    let brute = oracle::brute_min_separator(shape);
    let cover = shape
        .min_vertex_cover()
        .ok()
        .map(|c| shape.names_of(&c.cover));
    report.checks.push(CheckResult::hard(
        "separator_is_minimum",
        sep.q == brute && shape.separates(&sep.separator),
        format!("q = {}, brute force {brute}", sep.q),
    ));
    report.checks.push(CheckResult::hard(
        "paths_are_disjoint",
        sep.disjoint_paths.len() == sep.q
            && oracle::valid_disjoint_paths(shape, &sep.disjoint_paths),
        format!("{} paths", sep.disjoint_paths.len()),
    ));
    report.separator = Some(SeparatorReport {
        q: sep.q,
        separator: shape.names_of(&sep.separator),
        paths: sep
            .disjoint_paths
            .iter()
            .map(|p| shape.names_of(p))
            .collect(),
        path_lengths: sep.path_lengths.clone(),
        vertex_cover: cover,
        brute_force_q: brute,
    });
    Ok(())
}

// ---------------------------------------------------------------------------
// Verification suites

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Wigner,
    Warmup,
    Konig,
    Menger,
    MomentOracle,
    ConstraintEdges,
    PartitionIdentity,
    MonteCarlo,
    Tightness,
    Witness,
    MomentMethod,
    Intersection,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::Wigner,
        Suite::Warmup,
        Suite::Konig,
        Suite::Menger,
        Suite::MomentOracle,
        Suite::ConstraintEdges,
        Suite::PartitionIdentity,
        Suite::MonteCarlo,
        Suite::Tightness,
        Suite::Witness,
        Suite::MomentMethod,
        Suite::Intersection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Wigner => "wigner",
            Suite::Warmup => "warmup",
            Suite::Konig => "konig",
            Suite::Menger => "menger",
            Suite::MomentOracle => "moment-oracle",
            Suite::ConstraintEdges => "constraint-edges",
            Suite::PartitionIdentity => "partition-identity",
            Suite::MonteCarlo => "monte-carlo",
            Suite::Tightness => "tightness",
            Suite::Witness => "witness",
            Suite::MomentMethod => "moment-method",
            Suite::Intersection => "intersection",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn description(self) -> &'static str {
        match self {
            Suite::Wigner => "single-edge median norm within [1.7, 2.3]·√n",
            Suite::Warmup => "single-edge norm above e√n(ln(n/ε)+2) at most ε + 3σ of the time",
            Suite::Konig => "min vertex cover = max matching = brute force",
            Suite::Menger => "min separator = max disjoint paths = brute force",
            Suite::MomentOracle => "exact single-edge trace moments and counting bound",
            Suite::ConstraintEdges => "minimum constraint edges k−1, q(k−1), q(k−1)+zk",
            Suite::PartitionIdentity => "average of t^t R_P over all partitions equals R_H",
            Suite::MonteCarlo => "sampled trace moments agree with the exact oracle",
            Suite::Tightness => "norm slope matches (t−q)/2 and stays under the bound",
            Suite::Witness => "witness vectors certify the lower bound",
            Suite::MomentMethod => "trace-moment roots dominate σ_max and decrease in k",
            Suite::Intersection => "intersection-mode bound reduces to the general one and holds",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Overrides the number of random instances (shapes, matrices).
    pub count: Option<usize>,
    /// Overrides the number of sampled graphs per configuration.
    pub trials: Option<usize>,
    pub workers: Option<usize>,
    pub cap_entries: u128,
    pub budget: Duration,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 0,
            count: None,
            trials: None,
            workers: None,
            cap_entries: DEFAULT_CAP_ENTRIES,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    pub metrics: BTreeMap<String, f64>,
    pub skipped: Vec<String>,
    pub wall_ms: u128,
}

struct SuiteRun {
    checks: Vec<CheckResult>,
    metrics: BTreeMap<String, f64>,
    skipped: Vec<String>,
}

impl SuiteRun {
    fn new() -> Self {
        SuiteRun {
            checks: Vec::new(),
            metrics: BTreeMap::new(),
            skipped: Vec::new(),
        }
    }
    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckResult::hard(name, passed, detail));
    }
    fn fail(&mut self, name: impl Into<String>, e: Error) {
        self.checks
            .push(CheckResult::hard(name, false, e.to_string()));
    }
    fn metric(&mut self, name: impl Into<String>, v: f64) {
        self.metrics.insert(name.into(), v);
    }
}

/// Runs a named suite. Failures are reported, never raised.
pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> SuiteReport {
    let start = Instant::now();
    let mut run = SuiteRun::new();
    let outcome = match pool(opts.workers) {
        Ok(p) => p.install(|| match suite {
            Suite::Wigner => suite_wigner(opts, &mut run),
            Suite::Warmup => suite_warmup(opts, &mut run),
            Suite::Konig => suite_konig(opts, &mut run),
            Suite::Menger => suite_menger(opts, &mut run),
            Suite::MomentOracle => suite_moment_oracle(opts, &mut run),
            Suite::ConstraintEdges => suite_constraint_edges(&mut run),
            Suite::PartitionIdentity => suite_partition_identity(opts, &mut run),
            Suite::MonteCarlo => suite_monte_carlo(opts, &mut run),
            Suite::Tightness => suite_tightness(opts, &mut run),
            Suite::Witness => suite_witness(opts, &mut run),
            Suite::MomentMethod => suite_moment_method(opts, &mut run),
            Suite::Intersection => suite_intersection(opts, &mut run),
        }),
        Err(e) => Err(e),
    };
    if let Err(e) = outcome {
        run.fail("suite_completed", e);
    }
    let passed = !run.checks.is_empty() && run.checks.iter().all(|c| c.passed || !c.hard);
    SuiteReport {
        suite,
        passed,
        checks: run.checks,
        metrics: run.metrics,
        skipped: run.skipped,
        wall_ms: start.elapsed().as_millis(),
    }
}

/// Norm estimates for `trials` graphs of size `n`, in trial order.
fn sampled_norms(
    shape: &ShapeGraph,
    n: usize,
    trials: usize,
    seed: u64,
    grid_index: usize,
    cap: u128,
) -> Result<Vec<f64>> {
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let s = trial_seed(seed, grid_index, trial);
            let g = InputGraph::sample(n, s)?;
            Ok(estimate_norm(shape, &g, cap, spectral::DEFAULT_TOL, splitmix64(s))?.value)
        })
        .collect()
}

fn suite_wigner(opts: &SuiteOptions, run: &mut SuiteRun) -> Result<()> {
    let h = catalog::single_edge();
    let trials = opts.trials.unwrap_or(20);
    for (gi, &n) in [256usize, 512, 1024].iter().enumerate() {
        let mut norms = sampled_norms(&h, n, trials, opts.seed, gi, opts.cap_entries)?;
        let med = median(&mut norms).unwrap_or(0.0);
        let rel = med / (n as f64).sqrt();
        run.metric(format!("median_over_sqrt_n_{n}"), rel);
        run.check(
            format!("wigner_n{n}"),
            (1.7..=2.3).contains(&rel),
            format!("median/√n = {rel:.4}"),
        );
    }
    Ok(())
}

fn suite_warmup(opts: &SuiteOptions, run: &mut SuiteRun) -> Result<()> {
    let h = catalog::single_edge();
    let eps = 0.1;
    let trials = opts.trials.unwrap_or(200);
    for (gi, &n) in [128usize, 512].iter().enumerate() {
        let bound = bounds::warmup_bound(n as u64, eps)?;
        let norms = sampled_norms(&h, n, trials, opts.seed, gi, opts.cap_entries)?;
        let above = norms.iter().filter(|&&v| v > bound).count();
        let frac = above as f64 / trials as f64;
        run.metric(format!("fraction_above_n{n}"), frac);
        run.metric(
            format!("max_norm_over_bound_n{n}"),
            norms.iter().fold(0.0f64, |a, &v| a.max(v / bound)),
        );
        run.check(
            format!("warmup_n{n}"),
            frac <= 0.17,
            format!("{above}/{trials} above {bound:.2}"),
        );
    }
    Ok(())
}

fn suite_konig(opts: &SuiteOptions, run: &mut SuiteRun) -> Result<()> {
    let count = opts.count.unwrap_or(1000);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let shapes: Vec<ShapeGraph> = (0..count)
        .map(|_| catalog::random_bipartite(&mut rng, 8))
        .collect();
    let results: Vec<Result<bool>> = shapes
        .par_iter()
        .map(|h| {
            let cover = h.min_vertex_cover()?;
            let konig = h.konig_cover()?;
            let matching = h.max_matching()?;
            let brute = oracle::brute_min_cover(h);
            Ok(cover.q == matching.len()
                && cover.q == brute
                && konig.len() == brute
                && h.covers(&cover.cover)
                && h.covers(&konig))
        })
        .collect();
    let ok = results.iter().filter(|r| matches!(r, Ok(true))).count();
    run.metric("equalities", ok as f64);
    run.check(
        "konig_equality",
        ok == count,
        format!("{ok}/{count} equalities"),
    );
    Ok(())
}

fn suite_menger(opts: &SuiteOptions, run: &mut SuiteRun) -> Result<()> {
    let count = opts.count.unwrap_or(500);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let shapes: Vec<ShapeGraph> = (0..count)
        .map(|_| catalog::random_shape(&mut rng, 12))
        .collect();
    let ok = shapes
        .par_iter()
        .filter(|h| {
            let sep = h.min_separator();
            let paths = h.max_disjoint_paths();
            sep.q == paths.len()
                && sep.q == oracle::brute_min_separator(h)
                && h.separates(&sep.separator)
                && oracle::valid_disjoint_paths(h, &paths)
        })
        .count();
    run.metric("equalities", ok as f64);
    run.check(
        "menger_equality",
        ok == count,
        format!("{ok}/{count} equalities"),
    );
    Ok(())
}

fn suite_moment_oracle(opts: &SuiteOptions, run: &mut SuiteRun) -> Result<()> {
    let h = catalog::single_edge();
    let cap = DEFAULT_ENUMERATION_CAP.max(opts.cap_entries);
    let mut second_ok = true;
    for n in 1..=8usize {
        let mc = moment_oracle::expected_trace_moment_exact(&h, n, 1, None, cap)?;
        second_ok &= mc.expected_trace == num_bigint::BigUint::from(n * (n - 1));
    }
    run.check(
        "second_moment_is_n(n-1)",
        second_ok,
        "E[tr(R²)] for n = 1..8",
    );
    let fourth = moment_oracle::expected_trace_moment_exact(&h, 3, 2, None, cap)?;
    let brute = oracle::brute_expected_trace(&h, 3, 2)?;
    run.metric("fourth_moment_n3", brute as f64);
    run.check(
        "fourth_moment_n3",
        fourth.expected_trace == num_bigint::BigUint::from(18u32) && brute == 18,
        format!(
            "oracle {}, brute force over all graphs {brute}",
            fourth.expected_trace
        ),
    );
    let mut all_bounded = true;
    let mut detail = String::new();
    for n in 2..=8usize {
        for k in 1..=3usize {
            let mc = moment_oracle::expected_trace_moment_exact(&h, n, k, None, cap)?;
            let b = mc
                .bound
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("no bound for single edge".into()))?;
            if mc.nonzero_terms > b.corollary {
                all_bounded = false;
                detail = format!("n={n} k={k}: {} > {}", mc.nonzero_terms, b.corollary);
            }
        }
    }
    run.check("counts_within_corollary", all_bounded, detail);
    Ok(())
}

fn suite_constraint_edges(run: &mut SuiteRun) -> Result<()> {
    let edge = catalog::single_edge();
    for k in 1..=3 {
        for partition in [false, true] {
            let got =
                moment_oracle::min_constraint_edges(&edge, k, partition, DEFAULT_PATTERN_STEP_CAP)?;
            run.check(
                format!(
                    "single_edge_k{k}_{}",
                    if partition { "partitioned" } else { "plain" }
                ),
                got == k - 1,
                format!("{got}, expected {}", k - 1),
            );
        }
    }
    let bip = catalog::two_cover_bipartite();
    let q = bip.separator_size();
    let got = moment_oracle::min_constraint_edges(&bip, 2, true, DEFAULT_PATTERN_STEP_CAP)?;
    run.check(
        "bipartite_k2",
        got == q,
        format!("{got}, expected q(k−1) = {q}"),
    );
    let gen = catalog::separator_example();
    let (q, z) = (gen.separator_size(), gen.z());
    let got = moment_oracle::min_constraint_edges(&gen, 2, true, DEFAULT_PATTERN_STEP_CAP)?;
    run.check(
        "general_k2",
        got == q + 2 * z,
        format!("{got}, expected q(k−1)+zk = {}", q + 2 * z),
    );
    Ok(())
}

fn suite_partition_identity(opts: &SuiteOptions, run: &mut SuiteRun) -> Result<()> {
    let h = catalog::single_edge();
    let g = InputGraph::sample(6, opts.seed)?;
    let (lhs, rhs) = partition_average_exact(&h, &g, opts.cap_entries)?;
    run.check(
        "partition_average_equals_r_h",
        lhs == rhs,
        "Σ_P t^t R_P = t^n R_H over 2⁶ partitions",
    );
    Ok(())
}

fn suite_monte_carlo(opts: &SuiteOptions, run: &mut SuiteRun) -> Result<()> {
    let trials = opts.trials.unwrap_or(2000);
    let configs: [(&str, ShapeGraph, usize, usize); 5] = [
        ("single_edge", catalog::single_edge(), 6, 1),
        ("single_edge", catalog::single_edge(), 6, 2),
        ("middle_path", catalog::middle_path(), 5, 2),
        ("fan", catalog::fan(), 5, 2),
        ("two_cover_bipartite", catalog::two_cover_bipartite(), 6, 1),
    ];
    for (ci, (name, h, n, k)) in configs.iter().enumerate() {
        let exact =
            moment_oracle::expected_trace_moment_exact(h, *n, *k, None, DEFAULT_ENUMERATION_CAP)?;
        let target: f64 = exact
            .expected_trace
            .to_string()
            .parse()
            .unwrap_or(f64::INFINITY);
        let vals: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let g = InputGraph::sample(*n, trial_seed(opts.seed, ci, trial))?;
                let m = GraphMatrix::new(h, &g)?.to_dense(opts.cap_entries)?;
                Ok(spectral::trace_moment(&m, *k)? as f64)
            })
            .collect::<Result<_>>()?;
        let (mean, se) = mean_and_se(&vals);
        let (mean, se) = (mean.unwrap_or(f64::NAN), se.unwrap_or(0.0));
        let label = format!("{name}_n{n}_k{k}");
        run.metric(
            format!("{label}_z"),
            if se > 0.0 { (mean - target) / se } else { 0.0 },
        );
        run.check(
            &label,
            within_se(mean, se, target, 5.0),
            format!("mean {mean:.3} ± {se:.3}, exact {target}"),
        );
    }
    Ok(())
}

fn suite_tightness(opts: &SuiteOptions, run: &mut SuiteRun) -> Result<()> {
    let trials = opts.trials.unwrap_or(20);
    for (name, h) in [
        ("single_edge", catalog::single_edge()),
        ("middle_path", catalog::middle_path()),
    ] {
        let mut cfg = ExperimentConfig::new(h, Mode::Tightness);
        cfg.shape_label = name.into();
        cfg.n_grid = vec![64, 128, 256, 512, 1024];
        cfg.trials = trials;
        cfg.master_seed = opts.seed;
        cfg.epsilon = 0.01;
        cfg.workers = opts.workers;
        cfg.cap_entries = opts.cap_entries;
        cfg.budget = opts.budget;
        let rep = run_experiment(&cfg)?;
        for s in &rep.skipped {
            run.skipped.push(format!("{name}: {s}"));
        }
        if let Some(fit) = &rep.fit {
            run.metric(format!("{name}_slope"), fit.slope);
            run.metric(format!("{name}_slope_se"), fit.std_error);
        }
        for c in rep.checks {
            run.checks.push(CheckResult {
                name: format!("{name}_{}", c.name),
                ..c
            });
        }
        run.check(
            format!("{name}_never_above_bound"),
            rep.violations == 0 && rep.skipped.is_empty(),
            format!(
                "{} violations over {} trials",
                rep.violations,
                rep.records.len()
            ),
        );
    }
    Ok(())
}

fn suite_witness(opts: &SuiteOptions, run: &mut SuiteRun) -> Result<()> {
    let edge = catalog::single_edge();
    let trials = opts.trials.unwrap_or(20);
    let mut exact = true;
    for (gi, &n) in [16usize, 64, 256].iter().enumerate() {
        for trial in 0..trials {
            let g = InputGraph::sample(n, trial_seed(opts.seed, gi, trial))?;
            let out = witness::witness_ratio(&g, &edge)?;
            exact &= out.value == n as i128 - 1;
        }
    }
    run.check(
        "single_edge_value_is_n_minus_1",
        exact,
        "uᵀRv = n − 1 on every sampled graph",
    );

    let bip = catalog::two_cover_bipartite();
    for (gi, &n) in [64usize, 256].iter().enumerate() {
        let outcomes: Vec<witness::WitnessOutcome> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let g = InputGraph::sample(n, trial_seed(opts.seed, 10 + gi, trial))?;
                witness::witness_ratio(&g, &bip)
            })
            .collect::<Result<_>>()?;
        let good = outcomes.iter().filter(|o| o.ratio >= 0.1 * o.scale).count();
        let min_rel = outcomes
            .iter()
            .map(|o| o.ratio / o.scale)
            .fold(f64::INFINITY, f64::min);
        run.metric(format!("min_ratio_over_scale_n{n}"), min_rel);
        run.check(
            format!("bipartite_ratio_n{n}"),
            good * 100 >= 95 * trials,
            format!("{good}/{trials} trials with ratio ≥ 0.1·n^((t−q)/2)"),
        );
    }
    Ok(())
}

fn suite_moment_method(opts: &SuiteOptions, run: &mut SuiteRun) -> Result<()> {
    let count = opts.count.unwrap_or(100);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut dominated = 0;
    let mut monotone = 0;
    for _ in 0..count {
        let (r, c) = (rng.random_range(1..=16), rng.random_range(1..=16));
        let m = DenseMatrix::from_fn(r, c, |_, _| rng.random_range(-3..=3));
        let sigma =
            spectral::singular_values(&RealMatrix::from_fn(r, c, |i, j| m.get(i, j) as f64))?
                .first()
                .copied()
                .unwrap_or(0.0);
        let roots: Vec<f64> = (1..=4)
            .map(|k| {
                Ok(spectral::moment_root(
                    spectral::trace_moment(&m, k)? as f64,
                    k,
                ))
            })
            .collect::<Result<_>>()?;
        if roots.iter().all(|&x| x >= sigma - 1e-9) {
            dominated += 1;
        }
        if roots.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)) {
            monotone += 1;
        }
    }
    run.check(
        "roots_dominate_sigma_max",
        dominated == count,
        format!("{dominated}/{count}"),
    );
    run.check(
        "roots_nonincreasing_in_k",
        monotone == count,
        format!("{monotone}/{count}"),
    );
    Ok(())
}

fn suite_intersection(opts: &SuiteOptions, run: &mut SuiteRun) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut equal = 0;
    let mut total = 0;
    while total < 100 {
        let t = rng.random_range(2..=12usize);
        let z = rng.random_range(0..=t - 2);
        let q = rng.random_range(0..=t);
        if q + z == 0 {
            continue;
        }
        let n = rng.random_range(2..=100_000u64);
        let eps = rng.random_range(1e-4..0.999);
        total += 1;
        let a = bounds::intersection_bound_decimal(t, z, q, 0, n, eps)?;
        let b = bounds::general_bound_decimal(t, z, q, n, eps)?;
        if a == b {
            equal += 1;
        }
    }
    run.check(
        "r0_reduces_to_general",
        equal == total,
        format!("{equal}/{total} grid points agree digit for digit"),
    );

    let h = catalog::shared_endpoint();
    let trials = opts.trials.unwrap_or(20);
    for (gi, &n) in [64usize, 128].iter().enumerate() {
        let report = bounds::norm_upper_bound(ShapeStats::from_shape(&h), n as u64, 0.01)?;
        let norms = sampled_norms(&h, n, trials, opts.seed, gi, opts.cap_entries)?;
        let worst = norms.iter().fold(0.0f64, |a, &v| a.max(v));
        run.metric(
            format!("max_norm_over_bound_n{n}"),
            worst / report.upper_bound,
        );
        run.check(
            format!("r1_bound_holds_n{n}"),
            norms.iter().all(|&v| v <= report.upper_bound),
            format!("max norm {worst:.2} vs bound {:.2}", report.upper_bound),
        );
    }
    Ok(())
}
