//! Experiment configuration: a sectioned TOML file, one section per module,
//! with strict field checking so typos surface as errors naming the field.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::datagen::{DatasetParams, NoiseParams};
use crate::geometry::{GridOptions, MethodSpec};
use crate::solver::SolverOptions;
use crate::verify::AppendixParams;

use super::CliError;

/// Default solve budget per invocation (see `[budget] max_solves`).
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// The checks the harness knows how to run, in canonical execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// Reconstruction residual and foreign-mass bounds on fresh queries.
    Theorem1,
    /// Support-mass lower bound (requires uniform sphere samples).
    Support,
    /// Strict null-space inequality on perturbation-set samples.
    Nsp,
    /// Objective vs ‖x‖/r on exact-inradius planar instances.
    Lemma1,
    /// Noise-times-coefficients concentration inequality.
    Lemma2,
    /// Objective vs 1/rᵢ on fresh noisy queries.
    Lemma3,
    /// Gaussian tail bounds (chi-square and max-correlation).
    Appendix,
}

impl CheckKind {
    pub const ALL: [CheckKind; 7] = [
        CheckKind::Theorem1,
        CheckKind::Support,
        CheckKind::Nsp,
        CheckKind::Lemma1,
        CheckKind::Lemma2,
        CheckKind::Lemma3,
        CheckKind::Appendix,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Theorem1 => "theorem1",
            CheckKind::Support => "support",
            CheckKind::Nsp => "nsp",
            CheckKind::Lemma1 => "lemma1",
            CheckKind::Lemma2 => "lemma2",
            CheckKind::Lemma3 => "lemma3",
            CheckKind::Appendix => "appendix",
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl FromStr for CheckKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = CheckKind::ALL.iter().map(|k| k.name()).collect();
                format!("unknown check `{s}` (available: {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSection {
    /// Ambient dimension n.
    pub ambient_dim: usize,
    /// dᵢ per subspace.
    pub subspace_dims: Vec<usize>,
    /// Nᵢ per subspace.
    pub points_per_subspace: Vec<usize>,
    /// Smallest principal angle between the two subspaces, degrees in
    /// (0, 90]. Requires exactly two subspaces; omit for unconstrained
    /// random subspaces.
    #[serde(default)]
    pub angle_degrees: Option<f64>,
    pub seed: u64,
    /// Draw points uniformly on each subspace's unit sphere (the model the
    /// probabilistic guarantees assume).
    #[serde(default = "default_true")]
    pub uniform_points: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    /// Raw noise scale ϵ (per-entry standard deviation ϵ/√n).
    pub epsilon: f64,
    /// Slack factor ρ; the working level is ε = ϵ(1 + ρ).
    pub rho: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsSection {
    /// The arbitrarily-small δ added to β.
    pub delta: f64,
}

impl Default for BoundsSection {
    fn default() -> Self {
        BoundsSection {
            delta: crate::verify::DEFAULT_DELTA,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub max_iterations: usize,
    pub primal_tol: f64,
    pub dual_tol: f64,
    pub gap_tol: f64,
    pub rho: f64,
    pub over_relaxation: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let o = SolverOptions::default();
        SolverSection {
            max_iterations: o.max_iterations,
            primal_tol: o.primal_tol,
            dual_tol: o.dual_tol,
            gap_tol: o.gap_tol,
            rho: o.rho,
            over_relaxation: o.over_relaxation,
        }
    }
}

impl SolverSection {
    pub fn to_options(&self) -> SolverOptions {
        SolverOptions {
            max_iterations: self.max_iterations,
            primal_tol: self.primal_tol,
            dual_tol: self.dual_tol,
            gap_tol: self.gap_tol,
            rho: self.rho,
            over_relaxation: self.over_relaxation,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    /// Checks to run, by name (see [`CheckKind`]).
    pub checks: Vec<String>,
    /// Query trials for theorem1/support.
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Perturbation-set samples per subspace for the nsp check.
    #[serde(default = "default_trials")]
    pub nsp_samples: usize,
    #[serde(default = "default_trials")]
    pub lemma1_trials: usize,
    /// Ambient dimension of the synthetic planar lemma1 instances.
    #[serde(default = "default_lemma1_ambient")]
    pub lemma1_ambient: usize,
    /// Points per planar lemma1 instance.
    #[serde(default = "default_lemma1_points")]
    pub lemma1_points: usize,
    #[serde(default = "default_tail_trials")]
    pub lemma2_trials: usize,
    #[serde(default = "default_lemma3_trials")]
    pub lemma3_trials: usize,
    #[serde(default = "default_tail_trials")]
    pub appendix_trials: usize,
    /// Dimension used by the appendix chi-square tail.
    #[serde(default = "default_appendix_n")]
    pub appendix_n: usize,
    /// Slack factor for the chi-square event (defaults to the noise ρ at
    /// load time when omitted).
    #[serde(default)]
    pub appendix_rho: Option<f64>,
    /// Number of unit columns for the max-correlation tail.
    #[serde(default = "default_appendix_n")]
    pub appendix_big_n: usize,
    /// Gaussian scale for the max-correlation tail.
    #[serde(default = "default_appendix_sigma")]
    pub appendix_sigma: f64,
    /// Inradius computation: "auto", "exact", "grid", or "lpbox".
    #[serde(default = "default_inradius_method")]
    pub inradius_method: String,
}

fn default_trials() -> usize {
    200
}
fn default_lemma1_ambient() -> usize {
    6
}
fn default_lemma1_points() -> usize {
    8
}
fn default_tail_trials() -> usize {
    10_000
}
fn default_lemma3_trials() -> usize {
    500
}
fn default_appendix_n() -> usize {
    100
}
fn default_appendix_sigma() -> f64 {
    0.1
}
fn default_inradius_method() -> String {
    "auto".to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// Raw noise scales ϵ to sweep (empty = keep the base value).
    pub epsilon: Vec<f64>,
    /// Angles (degrees) to sweep.
    pub angle_degrees: Vec<f64>,
    /// Uniform per-subspace point counts to sweep.
    pub points_per_subspace: Vec<usize>,
    /// Query trials per grid cell.
    pub trials_per_cell: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            epsilon: Vec::new(),
            angle_degrees: Vec::new(),
            points_per_subspace: Vec::new(),
            trials_per_cell: 50,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Output directory (overridden by `--out`).
    pub dir: Option<String>,
    /// Write per-trial records to trials.jsonl (`false` keeps only the
    /// aggregate summaries in the report).
    pub emit_trials: bool,
    /// Matrix encoding for dataset export: "text" or "f64le".
    pub encoding: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: None,
            emit_trials: true,
            encoding: "f64le".to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetSection {
    /// Cap on the total number of ℓ1 solves one invocation may perform
    /// (overridden by the SUBSPARSE_BUDGET environment variable).
    pub max_solves: u64,
}

impl Default for BudgetSection {
    fn default() -> Self {
        BudgetSection {
            max_solves: DEFAULT_BUDGET,
        }
    }
}

/// The full experiment description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetSection,
    pub noise: NoiseSection,
    #[serde(default)]
    pub bounds: BoundsSection,
    #[serde(default)]
    pub solver: SolverSection,
    pub verify: VerifySection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub budget: BudgetSection,
}

impl ExperimentConfig {
    /// Parse and validate a config file. TOML errors carry line/column and
    /// field diagnostics.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            detail: format!("{}: {e}", path.display()),
        })?;
        let config: ExperimentConfig = toml::from_str(&text).map_err(|e| CliError::Config {
            detail: format!("{}: {e}", path.display()),
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Structural validation beyond what serde enforces. Messages name the
    /// offending field.
    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |detail: String| Err(CliError::Config { detail });
        let d = &self.dataset;
        if d.ambient_dim == 0 {
            return fail("dataset.ambient_dim must be positive".into());
        }
        if d.subspace_dims.is_empty() {
            return fail("dataset.subspace_dims must be nonempty".into());
        }
        if d.subspace_dims.len() != d.points_per_subspace.len() {
            return fail(format!(
                "dataset.subspace_dims ({}) and dataset.points_per_subspace ({}) must have the same length",
                d.subspace_dims.len(),
                d.points_per_subspace.len()
            ));
        }
        if d.subspace_dims.iter().any(|&dim| dim == 0) {
            return fail("dataset.subspace_dims entries must be positive".into());
        }
        if d.points_per_subspace.iter().any(|&c| c == 0) {
            return fail("dataset.points_per_subspace entries must be positive".into());
        }
        if let Some(theta) = d.angle_degrees {
            if d.subspace_dims.len() != 2 {
                return fail(
                    "dataset.angle_degrees requires exactly two subspaces".into(),
                );
            }
            if !(theta > 0.0 && theta <= 90.0) {
                return fail(format!(
                    "dataset.angle_degrees must lie in (0, 90], got {theta}"
                ));
            }
        }
        if !(self.noise.epsilon >= 0.0 && self.noise.epsilon.is_finite()) {
            return fail(format!(
                "noise.epsilon must be a finite nonnegative real, got {}",
                self.noise.epsilon
            ));
        }
        if !(self.noise.rho >= 0.0 && self.noise.rho.is_finite()) {
            return fail(format!(
                "noise.rho must be a finite nonnegative real, got {}",
                self.noise.rho
            ));
        }
        if !(self.bounds.delta > 0.0 && self.bounds.delta.is_finite()) {
            return fail(format!(
                "bounds.delta must be a finite positive real, got {}",
                self.bounds.delta
            ));
        }

        let checks = self.parsed_checks()?;
        if checks.is_empty() {
            return fail("verify.checks must list at least one check".into());
        }
        let v = &self.verify;
        if checks.contains(&CheckKind::Theorem1) || checks.contains(&CheckKind::Support) {
            if v.trials == 0 {
                return fail("verify.trials must be positive".into());
            }
        }
        if checks.contains(&CheckKind::Support) && !d.uniform_points {
            return fail(
                "verify.checks includes `support` but dataset.uniform_points is false; \
                 the support-detection claim assumes uniform sphere samples"
                    .into(),
            );
        }
        if checks.contains(&CheckKind::Nsp) {
            if d.subspace_dims.len() < 2 {
                return fail(
                    "verify.checks includes `nsp` but the dataset has a single subspace \
                     (there is no foreign dictionary to compare against)"
                        .into(),
                );
            }
            if self.noise.epsilon == 0.0 {
                return fail(
                    "verify.checks includes `nsp` but noise.epsilon is 0; \
                     the perturbation set is empty without noise"
                        .into(),
                );
            }
            if v.nsp_samples == 0 {
                return fail("verify.nsp_samples must be positive".into());
            }
        }
        if checks.contains(&CheckKind::Lemma1)
            && (v.lemma1_trials == 0 || v.lemma1_ambient < 2 || v.lemma1_points < 2)
        {
            return fail(
                "lemma1 needs verify.lemma1_trials >= 1, verify.lemma1_ambient >= 2, \
                 and verify.lemma1_points >= 2"
                    .into(),
            );
        }
        if checks.contains(&CheckKind::Lemma2) && v.lemma2_trials == 0 {
            return fail("verify.lemma2_trials must be positive".into());
        }
        if checks.contains(&CheckKind::Lemma3) && v.lemma3_trials == 0 {
            return fail("verify.lemma3_trials must be positive".into());
        }
        if checks.contains(&CheckKind::Appendix) {
            if v.appendix_trials == 0 {
                return fail("verify.appendix_trials must be positive".into());
            }
            if v.appendix_n == 0 || v.appendix_big_n == 0 {
                return fail("verify.appendix_n and verify.appendix_big_n must be positive".into());
            }
        }
        self.method_spec()?;
        self.encoding()?;

        if let Some(sweep) = &self.sweep {
            if sweep.trials_per_cell == 0 {
                return fail("sweep.trials_per_cell must be positive".into());
            }
            if sweep.angle_degrees.iter().any(|&t| !(t > 0.0 && t <= 90.0)) {
                return fail("sweep.angle_degrees entries must lie in (0, 90]".into());
            }
            if !sweep.angle_degrees.is_empty() && d.subspace_dims.len() != 2 {
                return fail("sweep.angle_degrees requires exactly two subspaces".into());
            }
            if sweep.epsilon.iter().any(|&e| !(e >= 0.0 && e.is_finite())) {
                return fail("sweep.epsilon entries must be finite and nonnegative".into());
            }
            if sweep.points_per_subspace.iter().any(|&c| c == 0) {
                return fail("sweep.points_per_subspace entries must be positive".into());
            }
        }
        Ok(())
    }

    pub fn parsed_checks(&self) -> Result<Vec<CheckKind>, CliError> {
        let mut out = Vec::new();
        for name in &self.verify.checks {
            let kind: CheckKind = name.parse().map_err(|e| CliError::Config {
                detail: format!("verify.checks: {e}"),
            })?;
            if !out.contains(&kind) {
                out.push(kind);
            }
        }
        // Canonical execution order regardless of listing order.
        out.sort_by_key(|k| CheckKind::ALL.iter().position(|a| a == k).unwrap());
        Ok(out)
    }

    pub fn noise_params(&self) -> Result<NoiseParams, CliError> {
        NoiseParams::new(self.noise.epsilon, self.noise.rho).map_err(|e| CliError::Config {
            detail: format!("noise: {e}"),
        })
    }

    pub fn dataset_params(&self) -> Result<DatasetParams, CliError> {
        Ok(DatasetParams {
            ambient_dim: self.dataset.ambient_dim,
            subspace_dims: self.dataset.subspace_dims.clone(),
            points_per_subspace: self.dataset.points_per_subspace.clone(),
            noise: self.noise_params()?,
            seed: self.dataset.seed,
            min_angle: self.dataset.angle_degrees.map(f64::to_radians),
            uniform_points: self.dataset.uniform_points,
        })
    }

    pub fn method_spec(&self) -> Result<MethodSpec, CliError> {
        match self.verify.inradius_method.as_str() {
            "auto" => Ok(MethodSpec::Auto),
            "exact" => Ok(MethodSpec::Exact),
            "grid" => Ok(MethodSpec::Grid(GridOptions::default())),
            "lpbox" => Ok(MethodSpec::LpBox),
            other => Err(CliError::Config {
                detail: format!(
                    "verify.inradius_method: unknown method `{other}` \
                     (expected auto, exact, grid, or lpbox)"
                ),
            }),
        }
    }

    pub fn encoding(&self) -> Result<super::ssmx::Encoding, CliError> {
        self.output
            .encoding
            .parse()
            .map_err(|e: String| CliError::Config {
                detail: format!("output.encoding: {e}"),
            })
    }

    pub fn appendix_params(&self) -> AppendixParams {
        AppendixParams {
            n: self.verify.appendix_n,
            rho: self.verify.appendix_rho.unwrap_or(self.noise.rho),
            big_n: self.verify.appendix_big_n,
            sigma: self.verify.appendix_sigma,
        }
    }

    /// Upper bound on the ℓ1 solves one `verify` run with these settings
    /// performs (documented in the README; enforced against the budget
    /// before any work starts).
    pub fn estimated_solves(&self, checks: &[CheckKind], trials_override: Option<usize>) -> u64 {
        let v = &self.verify;
        let trials = trials_override.unwrap_or(v.trials) as u64;
        let subspaces = self.dataset.subspace_dims.len() as u64;
        let mut total: u64 = 0;
        if checks.contains(&CheckKind::Theorem1) || checks.contains(&CheckKind::Support) {
            total += trials; // one solve per query
        }
        if checks.contains(&CheckKind::Nsp) {
            // Two programs per sample, every subspace checked.
            total += 2 * subspaces * v.nsp_samples as u64;
        }
        if checks.contains(&CheckKind::Lemma1) {
            total += v.lemma1_trials as u64;
        }
        if checks.contains(&CheckKind::Lemma3) {
            total += v.lemma3_trials as u64;
        }
        // lemma2 and appendix draw random vectors but never call the solver.
        total
    }
}
