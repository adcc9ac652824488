//! Batch front end: parses experiment configurations, runs the
//! generate → geometry → solve → verify pipeline and parameter sweeps, and
//! emits deterministic machine-readable reports.
//!
//! Exit-code contract (mapped by the binary):
//! 0 — all enabled checks met their aggregate thresholds;
//! 1 — check failures (including an unmet necessary condition);
//! 2 — configuration, format, or budget errors (nothing was solved);
//! 3 — the solver failed to converge beyond its retry policy.

pub mod config;
pub mod dataset_io;
pub mod report;
pub mod ssmx;
pub mod sweep;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datagen::{Dataset, GOLDEN};
use crate::geometry::GeometryReport;
use crate::solver::{solve_constrained_l1, SolveStatus, SolverOptions};
use crate::verify::harness::{
    run_appendix, run_lemma1_trials, run_lemma2_trials, run_lemma3_trials, run_nsp_trials,
    run_recovery_trials, CheckSummary,
};
use crate::verify::{compute_bounds, dataset_geometry, BoundParams, VerifyError};

use config::{CheckKind, ExperimentConfig};
use report::{write_report, ReportBody, RunReport, SkippedCheck, WallClock};
use ssmx::FormatError;

/// Name and version string echoed into every report.
pub fn artifact_version() -> String {
    format!("subsparse {}", env!("CARGO_PKG_VERSION"))
}

/// Errors that prevent a run from producing results. Check failures are not
/// errors — they are reported outcomes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {detail}")]
    Config { detail: String },
    #[error("budget exceeded: {detail}")]
    Budget { detail: String },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// All pre-work failures share exit code 2.
    pub fn exit_code(&self) -> u8 {
        2
    }
}

/// Final verdict of a verify run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    CheckFailures,
    SolverAborted,
}

impl Verdict {
    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::CheckFailures => 1,
            Verdict::SolverAborted => 3,
        }
    }
}

/// Everything one configuration execution produces, before report assembly.
pub(crate) struct Execution {
    pub geometry: GeometryReport,
    pub bounds: Option<BoundParams>,
    pub violation: Option<String>,
    pub checks: Vec<CheckSummary>,
    pub skipped: Vec<SkippedCheck>,
    pub appendix: Option<crate::verify::AppendixReport>,
    pub noise_exceed_fraction: Option<f64>,
    pub records: Vec<String>,
    pub timings: BTreeMap<String, f64>,
    /// Solver-abort detail; when set, remaining checks were skipped.
    pub aborted: Option<String>,
    /// Per-trial residual/ε and foreign-mass extremes for sweep tables.
    pub max_residual_over_epsilon: Option<f64>,
    pub max_off_support_mass: Option<f64>,
}

impl Execution {
    pub fn all_pass(&self) -> bool {
        self.violation.is_none()
            && self.aborted.is_none()
            && self.checks.iter().all(|c| c.pass)
    }

    pub fn verdict(&self) -> Verdict {
        if self.aborted.is_some() {
            Verdict::SolverAborted
        } else if self.all_pass() {
            Verdict::Pass
        } else {
            Verdict::CheckFailures
        }
    }
}

/// Dataset generation shared by every subcommand.
fn generate_dataset(cfg: &ExperimentConfig) -> Result<Dataset, CliError> {
    cfg.dataset_params()?
        .generate()
        .map_err(|e| CliError::Config {
            detail: format!("dataset generation failed: {e}"),
        })
}

fn enforce_budget(estimated: u64, cap: u64, context: &str) -> Result<(), CliError> {
    if estimated > cap {
        return Err(CliError::Budget {
            detail: format!(
                "{context} needs an estimated {estimated} solves, budget allows {cap} \
                 (raise [budget] max_solves or SUBSPARSE_BUDGET, or shrink the run)"
            ),
        });
    }
    Ok(())
}

/// Execute one configuration: generate, measure geometry, compute bounds,
/// run the enabled checks. `trials_override` substitutes the recovery trial
/// count (used by sweep cells); `emit_records` controls JSONL production.
pub(crate) fn execute(
    cfg: &ExperimentConfig,
    checks: &[CheckKind],
    trials_override: Option<usize>,
    emit_records: bool,
) -> Result<Execution, CliError> {
    let opts: SolverOptions = cfg.solver.to_options();
    let method = cfg.method_spec()?;
    let seed = cfg.dataset.seed;
    let mut timings = BTreeMap::new();

    let t = Instant::now();
    let dataset = generate_dataset(cfg)?;
    timings.insert("dataset".to_string(), t.elapsed().as_secs_f64());

    let t = Instant::now();
    let geometry = dataset_geometry(&dataset, &method).map_err(|e| CliError::Config {
        detail: format!("geometry computation failed: {e}"),
    })?;
    timings.insert("geometry".to_string(), t.elapsed().as_secs_f64());

    let mut exec = Execution {
        geometry,
        bounds: None,
        violation: None,
        checks: Vec::new(),
        skipped: Vec::new(),
        appendix: None,
        noise_exceed_fraction: None,
        records: Vec::new(),
        timings,
        aborted: None,
        max_residual_over_epsilon: None,
        max_off_support_mass: None,
    };

    // Bound calculus. An unmet necessary condition is a reported outcome
    // (exit 1), not an error: the report documents the violation and every
    // dependent check is listed as skipped.
    let t = Instant::now();
    let epsilon = cfg.noise_params()?.epsilon();
    match compute_bounds(
        &exec.geometry,
        &dataset.counts(),
        dataset.ambient_dim(),
        epsilon,
        cfg.bounds.delta,
    ) {
        Ok(b) => exec.bounds = Some(b),
        Err(e @ VerifyError::NecessaryConditionViolated { .. })
        | Err(e @ VerifyError::ZeroInradius { .. }) => {
            exec.violation = Some(e.to_string());
        }
        Err(e) => {
            return Err(CliError::Config {
                detail: format!("bound computation failed: {e}"),
            })
        }
    }
    exec.timings
        .insert("bounds".to_string(), t.elapsed().as_secs_f64());

    let needs_bounds = |kind: CheckKind| {
        matches!(
            kind,
            CheckKind::Theorem1 | CheckKind::Support | CheckKind::Nsp | CheckKind::Lemma3
        )
    };

    for &kind in checks {
        if exec.aborted.is_some() {
            exec.skipped.push(SkippedCheck {
                name: kind.name().to_string(),
                reason: "not run: a previous check aborted in the solver".to_string(),
            });
            continue;
        }
        if needs_bounds(kind) && exec.bounds.is_none() {
            exec.skipped.push(SkippedCheck {
                name: kind.name().to_string(),
                reason: format!(
                    "bounds unavailable: {}",
                    exec.violation.as_deref().unwrap_or("unknown")
                ),
            });
            continue;
        }
        let t = Instant::now();
        let bounds_for_check = exec.bounds.clone();
        let result = run_one_check(
            cfg,
            kind,
            &dataset,
            bounds_for_check.as_ref(),
            seed,
            trials_override,
            emit_records,
            &opts,
            &mut exec,
        );
        exec.timings
            .insert(kind.name().to_string(), t.elapsed().as_secs_f64());
        match result {
            Ok(()) => {}
            Err(VerifyError::SolverFailed { detail }) => {
                exec.aborted = Some(format!("{}: {detail}", kind.name()));
            }
            Err(
                e @ (VerifyError::ParameterError { .. }
                | VerifyError::HypothesisNotMet { .. }
                | VerifyError::SingleSubspace),
            ) => {
                exec.skipped.push(SkippedCheck {
                    name: kind.name().to_string(),
                    reason: e.to_string(),
                });
            }
            Err(e) => {
                return Err(CliError::Config {
                    detail: format!("{} check failed to run: {e}", kind.name()),
                })
            }
        }
    }
    Ok(exec)
}

/// Run a single check, appending its summaries and records to `exec`.
/// theorem1 and support share one batch of recovery trials; whichever comes
/// first triggers the solve, the other only adds its summary.
#[allow(clippy::too_many_arguments)]
fn run_one_check(
    cfg: &ExperimentConfig,
    kind: CheckKind,
    dataset: &Dataset,
    bounds: Option<&BoundParams>,
    seed: u64,
    trials_override: Option<usize>,
    emit_records: bool,
    opts: &SolverOptions,
    exec: &mut Execution,
) -> Result<(), VerifyError> {
    let v = &cfg.verify;
    match kind {
        CheckKind::Theorem1 | CheckKind::Support => {
            // Already ran as part of the paired check?
            let has_recovery = exec
                .checks
                .iter()
                .any(|c| c.name.starts_with("theorem1_") || c.name == "theorem2_support");
            if has_recovery {
                return Ok(());
            }
            let bounds = bounds.expect("gated by needs_bounds");
            let trials = trials_override.unwrap_or(v.trials);
            let out = run_recovery_trials(dataset, bounds, trials, seed, opts)?;
            let checks: Vec<CheckKind> = cfg.parsed_checks().unwrap_or_default();
            let want_theorem1 = checks.contains(&CheckKind::Theorem1);
            let want_support = checks.contains(&CheckKind::Support);
            if want_theorem1 {
                exec.checks.push(out.residual.clone());
                exec.checks.push(out.off_support.clone());
            }
            if want_support {
                exec.checks.push(out.support.clone());
            }
            exec.noise_exceed_fraction = Some(out.noise_exceed_fraction);
            let eps = bounds.noise_level;
            if eps > 0.0 {
                exec.max_residual_over_epsilon = out
                    .certificates
                    .iter()
                    .map(|c| c.in_support_residual / eps)
                    .fold(None, |acc, x| Some(acc.map_or(x, |m: f64| m.max(x))));
            }
            exec.max_off_support_mass = out
                .certificates
                .iter()
                .map(|c| c.off_support_mass)
                .fold(None, |acc, x| Some(acc.map_or(x, |m: f64| m.max(x))));
            if emit_records {
                for (t, cert) in out.certificates.iter().enumerate() {
                    exec.records
                        .push(report::trial_line("recovery", &[("trial", t)], cert).map_err(
                            |e| VerifyError::ParameterError {
                                detail: e.to_string(),
                            },
                        )?);
                }
            }
            Ok(())
        }
        CheckKind::Nsp => {
            let bounds = bounds.expect("gated by needs_bounds");
            for i in 0..dataset.num_subspaces() {
                let sub_seed = seed ^ (i as u64 + 1).wrapping_mul(GOLDEN);
                let out = run_nsp_trials(dataset, i, bounds, v.nsp_samples, sub_seed, opts)?;
                let mut summary = out.summary;
                summary.name = format!("theorem5_nsp[{i}]");
                exec.checks.push(summary);
                if emit_records {
                    for (j, sample) in out.samples.iter().enumerate() {
                        exec.records.push(
                            report::trial_line("nsp", &[("subspace", i), ("sample", j)], sample)
                                .map_err(|e| VerifyError::ParameterError {
                                    detail: e.to_string(),
                                })?,
                        );
                    }
                }
            }
            Ok(())
        }
        CheckKind::Lemma1 => {
            let out =
                run_lemma1_trials(v.lemma1_ambient, v.lemma1_points, v.lemma1_trials, seed, opts)?;
            exec.checks.push(out.summary);
            if emit_records {
                for (t, r) in out.reports.iter().enumerate() {
                    exec.records
                        .push(report::trial_line("lemma1", &[("trial", t)], r).map_err(|e| {
                            VerifyError::ParameterError {
                                detail: e.to_string(),
                            }
                        })?);
                }
            }
            Ok(())
        }
        CheckKind::Lemma2 => {
            // Strictest per-subspace threshold: the largest Nᵢ.
            let n_i = dataset
                .counts()
                .into_iter()
                .max()
                .expect("validated nonempty");
            let out = run_lemma2_trials(
                dataset.ambient_dim(),
                n_i,
                &dataset.noise,
                v.lemma2_trials,
                seed,
            )?;
            exec.checks.push(out.summary);
            if emit_records {
                for (t, s) in out.samples.iter().enumerate() {
                    exec.records
                        .push(report::trial_line("lemma2", &[("trial", t)], s).map_err(|e| {
                            VerifyError::ParameterError {
                                detail: e.to_string(),
                            }
                        })?);
                }
            }
            Ok(())
        }
        CheckKind::Lemma3 => {
            let bounds = bounds.expect("gated by needs_bounds");
            let out = run_lemma3_trials(dataset, bounds, v.lemma3_trials, seed, opts)?;
            exec.checks.push(out.summary);
            if emit_records {
                for (t, r) in out.reports.iter().enumerate() {
                    exec.records
                        .push(report::trial_line("lemma3", &[("trial", t)], r).map_err(|e| {
                            VerifyError::ParameterError {
                                detail: e.to_string(),
                            }
                        })?);
                }
            }
            Ok(())
        }
        CheckKind::Appendix => {
            let params = cfg.appendix_params();
            let out = run_appendix(&params, v.appendix_trials, seed)?;
            exec.checks.push(out.chi2);
            exec.checks.push(out.lemma7);
            exec.appendix = Some(out.report);
            Ok(())
        }
    }
}

/// The `verify` subcommand: run every enabled check and write the report.
/// The report is written for every verdict — pass, check failures, and
/// solver aborts alike.
pub fn run_verify(cfg: &ExperimentConfig, out_dir: &Path) -> Result<(Verdict, RunReport), CliError> {
    let checks = cfg.parsed_checks()?;
    let estimated = cfg.estimated_solves(&checks, None);
    enforce_budget(estimated, cfg.budget.max_solves, "verify run")?;

    let t0 = Instant::now();
    let exec = execute(cfg, &checks, None, cfg.output.emit_trials)?;
    let wall = WallClock {
        total_seconds: t0.elapsed().as_secs_f64(),
        per_stage_seconds: exec.timings.clone(),
    };
    let verdict = exec.verdict();
    let mut violation = exec.violation;
    if let Some(aborted) = &exec.aborted {
        violation = Some(format!("solver aborted: {aborted}"));
    }
    let body = ReportBody {
        artifact: artifact_version(),
        config: cfg.clone(),
        effective_seed: cfg.dataset.seed,
        geometry: exec.geometry,
        bounds: exec.bounds,
        violation,
        checks: exec.checks,
        skipped: exec.skipped,
        appendix: exec.appendix,
        noise_exceed_fraction: exec.noise_exceed_fraction,
        solves_estimated: estimated,
        budget_max_solves: cfg.budget.max_solves,
        trials_emitted: cfg.output.emit_trials,
        all_pass: verdict == Verdict::Pass,
    };
    let report = write_report(out_dir, body, wall, &exec.records)?;
    Ok((verdict, report))
}

/// The `gen` subcommand: generate the dataset and export it.
pub fn run_gen(cfg: &ExperimentConfig, out_dir: &Path) -> Result<PathBuf, CliError> {
    let dataset = generate_dataset(cfg)?;
    let dir = out_dir.join("dataset");
    dataset_io::export_dataset(&dir, &dataset, cfg.encoding()?)?;
    Ok(dir)
}

/// The `geometry` subcommand: generate and measure, write geometry.json.
pub fn run_geometry(cfg: &ExperimentConfig, out_dir: &Path) -> Result<GeometryReport, CliError> {
    let dataset = generate_dataset(cfg)?;
    let geometry = dataset_geometry(&dataset, &cfg.method_spec()?).map_err(|e| CliError::Config {
        detail: format!("geometry computation failed: {e}"),
    })?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io {
        path: out_dir.to_path_buf(),
        source: e,
    })?;
    let path = out_dir.join("geometry.json");
    let mut text = serde_json::to_string_pretty(&geometry).map_err(|e| CliError::Config {
        detail: format!("cannot serialize geometry report: {e}"),
    })?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| CliError::Io { path, source: e })?;
    Ok(geometry)
}

/// Outcome of the `solve` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveSummary {
    /// Column index solved leave-one-out against the rest of the dictionary.
    pub column: usize,
    pub tau: f64,
    pub objective: f64,
    pub residual_norm: f64,
    pub duality_gap: f64,
    pub iterations: usize,
    pub status: String,
    /// ℓ1 mass on own-subspace vs foreign columns.
    pub in_support_mass: f64,
    pub off_support_mass: f64,
}

/// The `solve` subcommand: solve the constrained program for column 0 of the
/// observed data, leave-one-out, at τ = γε. Demonstrates one solve with its
/// certificate; `verify` runs the statistical version.
pub fn run_solve(cfg: &ExperimentConfig, out_dir: &Path) -> Result<(Verdict, SolveSummary), CliError> {
    let dataset = generate_dataset(cfg)?;
    let geometry = dataset_geometry(&dataset, &cfg.method_spec()?).map_err(|e| CliError::Config {
        detail: format!("geometry computation failed: {e}"),
    })?;
    let epsilon = cfg.noise_params()?.epsilon();
    let bounds = compute_bounds(
        &geometry,
        &dataset.counts(),
        dataset.ambient_dim(),
        epsilon,
        cfg.bounds.delta,
    )
    .map_err(|e| CliError::Config {
        detail: format!("bound computation failed: {e}"),
    })?;

    let column = 0usize;
    let target = dataset.y.column(column).into_owned();
    let label = dataset.labels[column];
    let dictionary = dataset.y.clone().remove_column(column);
    let tau = bounds.tau();
    let opts = cfg.solver.to_options();
    let result = solve_constrained_l1(&dictionary, &target, tau, &opts).map_err(|e| {
        CliError::Config {
            detail: format!("solve failed: {e}"),
        }
    })?;

    // Label of each dictionary column after the removal.
    let mut in_mass = 0.0;
    let mut off_mass = 0.0;
    for (j, &c) in result.coefficients.iter().enumerate() {
        let original = if j < column { j } else { j + 1 };
        if dataset.labels[original] == label {
            in_mass += c.abs();
        } else {
            off_mass += c.abs();
        }
    }
    let summary = SolveSummary {
        column,
        tau,
        objective: result.objective,
        residual_norm: result.residual_norm,
        duality_gap: result.duality_gap,
        iterations: result.iterations,
        status: format!("{:?}", result.status),
        in_support_mass: in_mass,
        off_support_mass: off_mass,
    };
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io {
        path: out_dir.to_path_buf(),
        source: e,
    })?;
    let path = out_dir.join("solve.json");
    let mut text = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Config {
        detail: format!("cannot serialize solve summary: {e}"),
    })?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| CliError::Io { path, source: e })?;
    let verdict = match result.status {
        SolveStatus::Optimal => Verdict::Pass,
        SolveStatus::MaxIterations | SolveStatus::Infeasible => Verdict::SolverAborted,
    };
    Ok((verdict, summary))
}

/// The `report` subcommand: reload a written report, re-verify its content
/// hash, and return it with the hash status.
pub fn run_report(out_dir: &Path) -> Result<(RunReport, Result<(), String>), CliError> {
    let report = report::read_report(out_dir)?;
    let hash_status = report::verify_hash(&report);
    Ok((report, hash_status))
}
