//! Thin command-line front end over [`subsparse::cli`].
//!
//! Exit codes: 0 all enabled checks pass; 1 check failures; 2 configuration,
//! format, or budget errors; 3 solver non-convergence.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use subsparse::cli::{self, config::ExperimentConfig, CliError, Verdict};

#[derive(Parser)]
#[command(
    name = "subsparse",
    version,
    about = "Constrained l1-minimization over unions of subspaces: data generation, \
             geometry, solving, and empirical verification of recovery bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the configured dataset seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: the config's `output.dir`, or `./out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for trial-level parallelism (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Restrict to the named checks (repeatable); overrides `verify.checks`.
    #[arg(long = "check")]
    check: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the configured dataset and export it (SSMX + meta.toml).
    Gen(Common),
    /// Measure inradii, incoherences, margins, and principal angles.
    Geometry(Common),
    /// Solve one constrained program leave-one-out and print the certificate.
    Solve(Common),
    /// Run the configured checks and write report.json / trials.jsonl.
    Verify(Common),
    /// Run the configured parameter sweep and write sweep.csv.
    Sweep(Common),
    /// Reload a written report, re-verify its content hash, and summarize.
    Report {
        /// Directory containing report.json.
        #[arg(long)]
        out: PathBuf,
    },
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

/// Load the config and fold in the command-line and environment overrides.
fn effective_config(common: &Common) -> Result<(ExperimentConfig, PathBuf), CliError> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.dataset.seed = seed;
    }
    if !common.check.is_empty() {
        cfg.verify.checks = common.check.clone();
    }
    if let Ok(raw) = std::env::var("SUBSPARSE_BUDGET") {
        let parsed: u64 = raw.parse().map_err(|_| CliError::Config {
            detail: format!("SUBSPARSE_BUDGET must be a nonnegative integer, got `{raw}`"),
        })?;
        cfg.budget.max_solves = parsed;
    }
    cfg.validate()?;
    let out_dir = common
        .out
        .clone()
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    if let Some(jobs) = common.jobs {
        if jobs == 0 {
            return Err(CliError::Config {
                detail: "--jobs must be positive".to_string(),
            });
        }
        // Ignore the error when a global pool already exists (tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    Ok((cfg, out_dir))
}

fn summarize_verify(report: &cli::report::RunReport) {
    println!("artifact:     {}", report.body.artifact);
    println!("seed:         {}", report.body.effective_seed);
    if let Some(b) = &report.body.bounds {
        println!(
            "bounds:       gamma = {:.6}, beta = {:.6}, tau = {:.6e}",
            b.gamma,
            b.beta,
            b.tau()
        );
    }
    if let Some(v) = &report.body.violation {
        println!("violation:    {v}");
    }
    for c in &report.body.checks {
        println!(
            "check {:<22} {}  failures {}/{} (threshold {:.3e} + allowance {:.3e})",
            c.name,
            if c.pass { "pass" } else { "FAIL" },
            c.failures,
            c.trials,
            c.threshold,
            c.allowance
        );
        for note in &c.notes {
            println!("      note: {note}");
        }
    }
    for s in &report.body.skipped {
        println!("skip  {:<22} {}", s.name, s.reason);
    }
    println!("content hash: {}", report.header.content_hash);
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Gen(common) => match effective_config(&common) {
            Ok((cfg, out_dir)) => match cli::run_gen(&cfg, &out_dir) {
                Ok(dir) => {
                    println!("dataset written to {}", dir.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e.exit_code(), e),
            },
            Err(e) => fail(e.exit_code(), e),
        },
        Command::Geometry(common) => match effective_config(&common) {
            Ok((cfg, out_dir)) => match cli::run_geometry(&cfg, &out_dir) {
                Ok(geometry) => {
                    for (i, s) in geometry.subspaces.iter().enumerate() {
                        println!(
                            "subspace {i}: inradius in [{:.6}, {:.6}] ({}), incoherence {:.6}, margin {:.6}",
                            s.inradius.lower,
                            s.inradius.upper,
                            if s.inradius.is_exact { "exact" } else { "bracket" },
                            s.incoherence,
                            s.margin
                        );
                    }
                    println!("geometry written to {}", out_dir.join("geometry.json").display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e.exit_code(), e),
            },
            Err(e) => fail(e.exit_code(), e),
        },
        Command::Solve(common) => match effective_config(&common) {
            Ok((cfg, out_dir)) => match cli::run_solve(&cfg, &out_dir) {
                Ok((verdict, s)) => {
                    println!(
                        "column {}: status {}, objective {:.6}, residual {:.3e} (tau {:.3e}), gap {:.3e}, {} iterations",
                        s.column, s.status, s.objective, s.residual_norm, s.tau, s.duality_gap, s.iterations
                    );
                    println!(
                        "own-subspace mass {:.6}, foreign mass {:.6}",
                        s.in_support_mass, s.off_support_mass
                    );
                    ExitCode::from(verdict.exit_code())
                }
                Err(e) => fail(e.exit_code(), e),
            },
            Err(e) => fail(e.exit_code(), e),
        },
        Command::Verify(common) => match effective_config(&common) {
            Ok((cfg, out_dir)) => match cli::run_verify(&cfg, &out_dir) {
                Ok((verdict, report)) => {
                    summarize_verify(&report);
                    println!(
                        "report written to {}",
                        out_dir.join("report.json").display()
                    );
                    if verdict == Verdict::SolverAborted {
                        eprintln!("error: solver aborted; see the report for details");
                    }
                    ExitCode::from(verdict.exit_code())
                }
                Err(e) => fail(e.exit_code(), e),
            },
            Err(e) => fail(e.exit_code(), e),
        },
        Command::Sweep(common) => match effective_config(&common) {
            Ok((cfg, out_dir)) => match cli::sweep::run_sweep(&cfg, &out_dir) {
                Ok(outcome) => {
                    println!(
                        "{} cells written to {}",
                        outcome.cells,
                        outcome.csv_path.display()
                    );
                    for note in &outcome.notes {
                        eprintln!("warning: {note}");
                    }
                    ExitCode::from(outcome.verdict.exit_code())
                }
                Err(e) => fail(e.exit_code(), e),
            },
            Err(e) => fail(e.exit_code(), e),
        },
        Command::Report { out } => match cli::run_report(&out) {
            Ok((report, hash_status)) => {
                summarize_verify(&report);
                match hash_status {
                    Ok(()) => {
                        println!("hash verified");
                        if report.body.all_pass {
                            ExitCode::SUCCESS
                        } else {
                            ExitCode::from(1)
                        }
                    }
                    Err(detail) => fail(1, format!("hash verification failed: {detail}")),
                }
            }
            Err(e) => fail(e.exit_code(), e),
        },
    }
}
