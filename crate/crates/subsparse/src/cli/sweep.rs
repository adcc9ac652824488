//! Parameter sweeps: a grid over noise scale, angle, and point count, one
//! pipeline execution per cell, and a long-format CSV (one row per cell per
//! metric) in lexicographic grid order.
//!
//! CSV schema (stable): `epsilon,angle_degrees,points_per_subspace,metric,value`.
//! Axis columns echo the cell's effective values; `angle_degrees` is empty
//! when the configuration leaves the angle unconstrained, and
//! `points_per_subspace` joins per-subspace counts with `;` when they are
//! not swept uniformly. Metric rows per cell, in order:
//! `min_inradius_lower`, `max_incoherence`, `min_margin` (geometry), then
//! `gamma` and `beta` (or `necessary_condition_violated,1` when the margin
//! fails, suppressing every bound-dependent row), then
//! `<check>_fail_fraction` for every emitted check summary, then
//! `max_residual_over_epsilon` (only when ε > 0), `max_off_support_mass`,
//! and `noise_exceed_fraction` when recovery trials ran.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::datagen::GOLDEN;

use super::config::ExperimentConfig;
use super::{enforce_budget, execute, CliError, Verdict};

/// One grid cell's effective axis values.
#[derive(Debug, Clone)]
pub struct Cell {
    pub epsilon: f64,
    pub angle_degrees: Option<f64>,
    /// Uniform count when swept; None keeps the base per-subspace counts.
    pub points_per_subspace: Option<usize>,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "epsilon={}", self.epsilon)?;
        if let Some(a) = self.angle_degrees {
            write!(f, ", angle_degrees={a}")?;
        }
        if let Some(p) = self.points_per_subspace {
            write!(f, ", points_per_subspace={p}")?;
        }
        Ok(())
    }
}

/// The sweep outcome: the CSV path and whether every cell passed.
#[derive(Debug)]
pub struct SweepOutcome {
    pub csv_path: PathBuf,
    pub cells: usize,
    pub verdict: Verdict,
    /// Human-readable anomalies (aborted cells with reasons).
    pub notes: Vec<String>,
}

/// Sorted-ascending axis, or the base value as a singleton.
fn axis<T: Copy + PartialOrd>(values: &[T], base: T) -> Vec<T> {
    if values.is_empty() {
        vec![base]
    } else {
        let mut v = values.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).expect("validated finite"));
        v
    }
}

/// Enumerate the grid in lexicographic order (ε, then angle, then count).
fn grid(cfg: &ExperimentConfig) -> Result<Vec<Cell>, CliError> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| CliError::Config {
        detail: "sweep requires a [sweep] section".to_string(),
    })?;
    if sweep.epsilon.is_empty()
        && sweep.angle_degrees.is_empty()
        && sweep.points_per_subspace.is_empty()
    {
        return Err(CliError::Config {
            detail: "sweep: at least one axis (epsilon, angle_degrees, points_per_subspace) \
                     must be nonempty"
                .to_string(),
        });
    }
    let epsilons = axis(&sweep.epsilon, cfg.noise.epsilon);
    let angles: Vec<Option<f64>> = if sweep.angle_degrees.is_empty() {
        vec![cfg.dataset.angle_degrees]
    } else {
        axis(&sweep.angle_degrees, 0.0)
            .into_iter()
            .map(Some)
            .collect()
    };
    let counts: Vec<Option<usize>> = if sweep.points_per_subspace.is_empty() {
        vec![None]
    } else {
        axis(&sweep.points_per_subspace, 0)
            .into_iter()
            .map(Some)
            .collect()
    };
    let mut cells = Vec::new();
    for &epsilon in &epsilons {
        for &angle_degrees in &angles {
            for &points_per_subspace in &counts {
                cells.push(Cell {
                    epsilon,
                    angle_degrees,
                    points_per_subspace,
                });
            }
        }
    }
    Ok(cells)
}

/// Build the effective per-cell configuration. Cell 0 of a single-cell grid
/// is the base configuration itself (same seed), so a one-cell sweep equals
/// the corresponding `verify` run.
fn cell_config(cfg: &ExperimentConfig, cell: &Cell, index: usize) -> ExperimentConfig {
    let mut c = cfg.clone();
    c.noise.epsilon = cell.epsilon;
    c.dataset.angle_degrees = cell.angle_degrees;
    if let Some(count) = cell.points_per_subspace {
        c.dataset.points_per_subspace = vec![count; c.dataset.subspace_dims.len()];
    }
    c.dataset.seed = cfg.dataset.seed ^ (index as u64).wrapping_mul(GOLDEN);
    c
}

fn push_row(out: &mut String, cell: &Cell, base: &ExperimentConfig, metric: &str, value: f64) {
    let angle = cell
        .angle_degrees
        .map(|a| format!("{a}"))
        .unwrap_or_default();
    let counts = match cell.points_per_subspace {
        Some(c) => format!("{c}"),
        None => base
            .dataset
            .points_per_subspace
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(";"),
    };
    out.push_str(&format!(
        "{},{},{},{},{}\n",
        cell.epsilon, angle, counts, metric, value
    ));
}

/// The `sweep` subcommand. The budget is enforced over the whole grid
/// before any cell runs.
pub fn run_sweep(cfg: &ExperimentConfig, out_dir: &Path) -> Result<SweepOutcome, CliError> {
    let checks = cfg.parsed_checks()?;
    let cells = grid(cfg)?;
    let sweep = cfg.sweep.as_ref().expect("grid() checked the section");

    let per_cell = cfg.estimated_solves(&checks, Some(sweep.trials_per_cell));
    let literal = (cells.len() as u64).saturating_mul(sweep.trials_per_cell as u64);
    let estimated = (cells.len() as u64)
        .saturating_mul(per_cell)
        .max(literal);
    enforce_budget(estimated, cfg.budget.max_solves, "sweep")?;

    let mut csv = String::from("epsilon,angle_degrees,points_per_subspace,metric,value\n");
    let mut verdict = Verdict::Pass;
    let mut notes: Vec<String> = Vec::new();
    for (index, cell) in cells.iter().enumerate() {
        let cell_cfg = cell_config(cfg, cell, index);
        // Re-validate: substituted axis values must still form a coherent
        // configuration (e.g. counts below subspace dimensions).
        cell_cfg.validate()?;
        let exec = execute(&cell_cfg, &checks, Some(sweep.trials_per_cell), false)?;

        let g = &exec.geometry;
        let min_inradius = g
            .subspaces
            .iter()
            .map(|s| s.inradius.lower)
            .fold(f64::INFINITY, f64::min);
        let max_incoherence = g
            .subspaces
            .iter()
            .map(|s| s.incoherence)
            .fold(0.0f64, f64::max);
        let min_margin = g
            .subspaces
            .iter()
            .map(|s| s.margin)
            .fold(f64::INFINITY, f64::min);
        push_row(&mut csv, cell, cfg, "min_inradius_lower", min_inradius);
        push_row(&mut csv, cell, cfg, "max_incoherence", max_incoherence);
        push_row(&mut csv, cell, cfg, "min_margin", min_margin);

        match &exec.bounds {
            Some(b) => {
                push_row(&mut csv, cell, cfg, "gamma", b.gamma);
                push_row(&mut csv, cell, cfg, "beta", b.beta);
            }
            None => {
                push_row(&mut csv, cell, cfg, "necessary_condition_violated", 1.0);
            }
        }
        for summary in &exec.checks {
            push_row(
                &mut csv,
                cell,
                cfg,
                &format!("{}_fail_fraction", summary.name),
                summary.failure_fraction,
            );
        }
        if let Some(v) = exec.max_residual_over_epsilon {
            push_row(&mut csv, cell, cfg, "max_residual_over_epsilon", v);
        }
        if let Some(v) = exec.max_off_support_mass {
            push_row(&mut csv, cell, cfg, "max_off_support_mass", v);
        }
        if let Some(v) = exec.noise_exceed_fraction {
            push_row(&mut csv, cell, cfg, "noise_exceed_fraction", v);
        }

        match exec.verdict() {
            Verdict::Pass => {}
            Verdict::SolverAborted => {
                push_row(&mut csv, cell, cfg, "solver_aborted", 1.0);
                if let Some(reason) = &exec.aborted {
                    notes.push(format!("cell {index} ({cell}): solver aborted: {reason}"));
                }
                verdict = Verdict::SolverAborted;
            }
            Verdict::CheckFailures => {
                if verdict == Verdict::Pass {
                    verdict = Verdict::CheckFailures;
                }
            }
        }
    }

    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io {
        path: out_dir.to_path_buf(),
        source: e,
    })?;
    let csv_path = out_dir.join("sweep.csv");
    std::fs::write(&csv_path, csv).map_err(|e| CliError::Io {
        path: csv_path.clone(),
        source: e,
    })?;
    Ok(SweepOutcome {
        csv_path,
        cells: cells.len(),
        verdict,
        notes,
    })
}
