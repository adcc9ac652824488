//! Executable checks for the recovery guarantees.
//!
//! The theory provides a chain of quantitative claims about the constrained
//! ℓ1 program on noisy union-of-subspaces data: a dictionary-quality factor
//! γ and a residual-amplification factor β computed from the geometry
//! (inradii rᵢ, incoherences μᵢ, noise level ε); deterministic inequalities
//! conditioned on those factors (reconstruction residual ≤ βε, off-subspace
//! ℓ1 mass ≤ (2β+γ)ε/(2rᵢ), support mass lower bound, three ℓ1-norm lemmas,
//! a strict null-space-style inequality on a perturbation set, and two
//! Gaussian tail bounds). Each claim holds "with probability at least p"
//! over the random data.
//!
//! This module turns every claim into a check on concrete instances, and the
//! [`harness`] submodule aggregates Monte Carlo trials: a probabilistic claim
//! is accepted when the empirical failure fraction is at most
//! `(1 − p) + 3·√(p(1−p)/T)` (a three-sigma Bernoulli allowance), never by
//! per-trial assertion. Failure events are measured, not conditioned away.
//!
//! Conventions fixed here (recorded in reports): natural logarithms
//! throughout; δ defaults to 1e-3; inradius *lower* bounds stand in for rᵢ
//! wherever the exact value is unavailable (checks flag when they do);
//! strictness slack for the null-space inequality is 1e-6, matching the
//! solver's default gap tolerance.

pub mod harness;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datagen::{DatagenError, Dataset, GaussStream, GOLDEN};
use crate::geometry::{GeometryError, GeometryReport, MethodSpec, Subspace};
use crate::solver::{
    solve_constrained_l1, solve_equality_l1, SolveResult, SolveStatus, SolverError, SolverOptions,
};

pub use harness::{
    run_appendix, run_lemma1_trials, run_lemma2_trials, run_lemma3_trials, run_nsp_trials,
    run_recovery_trials, AppendixTrials, CheckSummary, Lemma2Trials, LemmaTrials, NspTrials,
    RecoveryTrials,
};

/// Relative slack used when comparing a measured quantity against a bound
/// (absorbs solver tolerance), and the absolute slack for the strict
/// null-space inequality.
pub const CHECK_SLACK: f64 = 1e-6;

/// Default δ: the theory allows it "arbitrarily small"; reports record the
/// value used.
pub const DEFAULT_DELTA: f64 = 1e-3;

// Stream salts for the harness's own randomness, disjoint from the dataset
// stream labels by construction (different constants, same derivation).
const QUERY_POINT_SALT: u64 = 0x5155_4552_5950_5453;
const QUERY_NOISE_SALT: u64 = 0x5155_4552_594E_5345;
const NSP_SAMPLE_SALT: u64 = 0x4E53_5053_414D_504C;
const LEMMA1_SUB_SALT: u64 = 0x4C31_5355_4253_5031;
const LEMMA1_PTS_SALT: u64 = 0x4C31_5054_5345_5431;
const LEMMA1_X_SALT: u64 = 0x4C31_5843_4F4F_5244;
const LEMMA2_C_SALT: u64 = 0x4C32_4346_4958_4544;
const LEMMA2_Z_SALT: u64 = 0x4C32_5A44_5241_5753;
const CHI2_SALT: u64 = 0x4348_4932_5341_4C54;
const L7_MATRIX_SALT: u64 = 0x4C37_4D41_5452_4958;
const L7_X_SALT: u64 = 0x4C37_5844_5241_5753;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("subspace {index} has inradius lower bound 0; the bound calculus is undefined")]
    ZeroInradius { index: usize },
    #[error(
        "necessary condition violated: subspace {index} has margin r - (mu + eps) = {margin:.6e} <= 0"
    )]
    NecessaryConditionViolated { index: usize, margin: f64 },
    #[error("parameter error: {detail}")]
    ParameterError { detail: String },
    #[error("hypothesis not met: {detail}")]
    HypothesisNotMet { detail: String },
    #[error("the dataset has a single subspace; foreign-atom programs are undefined")]
    SingleSubspace,
    #[error("solver failed beyond the retry policy: {detail}")]
    SolverFailed { detail: String },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Datagen(#[from] DatagenError),
}

/// Outcome of a single bound evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    Pass,
    Fail,
    /// The bound's precondition does not hold on this instance, so the claim
    /// says nothing here.
    NotApplicable,
}

/// γ, β, δ and the per-subspace geometry numbers they were computed from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundParams {
    /// γ = maxᵢ 2(1 + 2√(2(ln Nᵢ + ln n))/rᵢ).
    pub gamma: f64,
    /// The per-subspace terms the max runs over.
    pub gamma_terms: Vec<f64>,
    /// Index attaining γ.
    pub gamma_argmax: usize,
    /// β = (1 + maxᵢ 3rᵢ/(rᵢ − (μᵢ + ε)))·γ/2 + δ.
    pub beta: f64,
    /// Index attaining the β max.
    pub beta_argmax: usize,
    pub delta: f64,
    /// ε — the working noise level the bounds are evaluated at.
    pub noise_level: f64,
    /// rᵢ values used (inradius lower bounds).
    pub inradii: Vec<f64>,
    /// Whether each rᵢ is exact (vertex enumeration) rather than a bracket
    /// lower bound.
    pub inradius_exact: Vec<bool>,
    /// μᵢ values used.
    pub incoherences: Vec<f64>,
}

impl BoundParams {
    /// Constraint radius of the recovery program: τ = γε.
    pub fn tau(&self) -> f64 {
        self.gamma * self.noise_level
    }

    /// In-subspace reconstruction bound: βε.
    pub fn residual_bound(&self) -> f64 {
        self.beta * self.noise_level
    }

    /// Off-subspace ℓ1-mass bound for subspace `i`: (2β+γ)ε/(2rᵢ).
    pub fn off_support_bound(&self, i: usize) -> f64 {
        (2.0 * self.beta + self.gamma) * self.noise_level / (2.0 * self.inradii[i])
    }

    /// Noise precondition for the off-support bound: ε ≤ γrᵢ/(2β+γ).
    pub fn noise_precondition_ok(&self, i: usize) -> bool {
        self.noise_level <= self.gamma * self.inradii[i] / (2.0 * self.beta + self.gamma)
    }

    /// Support-detection lower bound on ‖cᵢ*‖₁ for a subspace with `n_i`
    /// points and dimension `d_i` in ambient dimension `n`.
    pub fn support_bound(&self, n_i: usize, d_i: usize, n: usize) -> f64 {
        support_detection_bound(self.beta, self.noise_level, n_i, d_i, n)
    }
}

/// The support-detection lower bound
/// (1 − (β+1)ε) / (2√(2 ln Nᵢ/dᵢ) + 2√(2 ln Nᵢ/n)·ε).
pub fn support_detection_bound(beta: f64, epsilon: f64, n_i: usize, d_i: usize, n: usize) -> f64 {
    let log_n_i = (n_i as f64).ln();
    let numerator = 1.0 - (beta + 1.0) * epsilon;
    let denominator = 2.0 * (2.0 * log_n_i / d_i as f64).sqrt()
        + 2.0 * (2.0 * log_n_i / n as f64).sqrt() * epsilon;
    numerator / denominator
}

/// Three-sigma Bernoulli allowance: a claim "failure probability ≤ q" is
/// accepted over `trials` trials when the empirical failure fraction is at
/// most `q + 3√(q(1−q)/trials)`.
pub fn bernoulli_allowance(q: f64, trials: usize) -> f64 {
    if trials == 0 {
        return q;
    }
    q + 3.0 * (q * (1.0 - q) / trials as f64).sqrt()
}

/// Per-subspace γ terms with the max and its index.
#[derive(Debug, Clone, Serialize)]
pub struct GammaResult {
    pub gamma: f64,
    pub terms: Vec<f64>,
    pub argmax: usize,
}

/// β with the index attaining the inner max.
#[derive(Debug, Clone, Serialize)]
pub struct BetaResult {
    pub beta: f64,
    pub argmax: usize,
}

fn validate_counts(geometry: &GeometryReport, counts: &[usize], n: usize) -> Result<(), VerifyError> {
    if counts.len() != geometry.subspaces.len() {
        return Err(VerifyError::ParameterError {
            detail: format!(
                "{} point counts for {} subspaces",
                counts.len(),
                geometry.subspaces.len()
            ),
        });
    }
    if n == 0 {
        return Err(VerifyError::ParameterError {
            detail: "ambient dimension must be positive".to_string(),
        });
    }
    if let Some(i) = counts.iter().position(|&c| c == 0) {
        return Err(VerifyError::ParameterError {
            detail: format!("subspace {i} has no points"),
        });
    }
    Ok(())
}

/// γ = maxᵢ 2(1 + 2√(2(ln Nᵢ + ln n))/rᵢ), natural logs, rᵢ = inradius
/// lower bound.
pub fn compute_gamma(
    geometry: &GeometryReport,
    counts: &[usize],
    n: usize,
) -> Result<GammaResult, VerifyError> {
    validate_counts(geometry, counts, n)?;
    let mut terms = Vec::with_capacity(counts.len());
    for (i, sub) in geometry.subspaces.iter().enumerate() {
        let r = sub.inradius.lower;
        if !(r > 0.0) {
            return Err(VerifyError::ZeroInradius { index: i });
        }
        let log_sum = (counts[i] as f64).ln() + (n as f64).ln();
        terms.push(2.0 * (1.0 + 2.0 * (2.0 * log_sum).sqrt() / r));
    }
    let (argmax, &gamma) = terms
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("counts validated nonempty");
    Ok(GammaResult { gamma, terms, argmax })
}

/// β = (1 + maxᵢ 3rᵢ/(rᵢ − (μᵢ + ε)))·γ/2 + δ; defined only when every
/// margin rᵢ − (μᵢ + ε) is positive.
pub fn compute_beta(
    geometry: &GeometryReport,
    gamma: f64,
    epsilon: f64,
    delta: f64,
) -> Result<BetaResult, VerifyError> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(VerifyError::ParameterError {
            detail: format!("delta must be a positive real, got {delta}"),
        });
    }
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(VerifyError::ParameterError {
            detail: format!("epsilon must be a finite nonnegative real, got {epsilon}"),
        });
    }
    let mut best = f64::NEG_INFINITY;
    let mut argmax = 0;
    for (i, sub) in geometry.subspaces.iter().enumerate() {
        let r = sub.inradius.lower;
        if !(r > 0.0) {
            return Err(VerifyError::ZeroInradius { index: i });
        }
        let margin = r - (sub.incoherence + epsilon);
        if margin <= 0.0 {
            return Err(VerifyError::NecessaryConditionViolated { index: i, margin });
        }
        let factor = 3.0 * r / margin;
        if factor > best {
            best = factor;
            argmax = i;
        }
    }
    if geometry.subspaces.is_empty() {
        return Err(VerifyError::ParameterError {
            detail: "geometry report has no subspaces".to_string(),
        });
    }
    Ok(BetaResult {
        beta: (1.0 + best) * gamma / 2.0 + delta,
        argmax,
    })
}

/// Full bound calculus: γ, β, and the geometry numbers they used.
pub fn compute_bounds(
    geometry: &GeometryReport,
    counts: &[usize],
    n: usize,
    epsilon: f64,
    delta: f64,
) -> Result<BoundParams, VerifyError> {
    let gamma = compute_gamma(geometry, counts, n)?;
    let beta = compute_beta(geometry, gamma.gamma, epsilon, delta)?;
    Ok(BoundParams {
        gamma: gamma.gamma,
        gamma_terms: gamma.terms,
        gamma_argmax: gamma.argmax,
        beta: beta.beta,
        beta_argmax: beta.argmax,
        delta,
        noise_level: epsilon,
        inradii: geometry.subspaces.iter().map(|s| s.inradius.lower).collect(),
        inradius_exact: geometry.subspaces.iter().map(|s| s.inradius.is_exact).collect(),
        incoherences: geometry.subspaces.iter().map(|s| s.incoherence).collect(),
    })
}

/// Geometry report for a dataset's clean blocks at its working noise level.
pub fn dataset_geometry(
    dataset: &Dataset,
    method: &MethodSpec,
) -> Result<GeometryReport, VerifyError> {
    let blocks: Vec<DMatrix<f64>> = (0..dataset.num_subspaces())
        .map(|i| dataset.clean_block(i))
        .collect();
    Ok(crate::geometry::recovery_margin(
        &dataset.subspaces,
        &blocks,
        dataset.noise.epsilon(),
        method,
    )?)
}

/// One query's recovery outcome against the two reconstruction bounds and
/// the support-detection bound. Flags are pure functions of the stored
/// numbers ([`RecoveryCertificate::recompute_flags`]).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecoveryCertificate {
    /// Label of the query's subspace.
    pub subspace: usize,
    /// ‖y − Yᵢcᵢ*‖₂ — reconstruction residual using in-subspace columns only.
    pub in_support_residual: f64,
    /// βε.
    pub residual_bound: f64,
    /// ‖c₋ᵢ*‖₁ — ℓ1 mass on foreign columns.
    pub off_support_mass: f64,
    /// (2β+γ)ε/(2rᵢ).
    pub off_support_bound: f64,
    /// ‖cᵢ*‖₁ — ℓ1 mass on in-subspace columns.
    pub support_mass: f64,
    /// Support-detection lower bound on ‖cᵢ*‖₁.
    pub support_lower_bound: f64,
    /// ε ≤ γrᵢ/(2β+γ) — precondition of the off-support bound.
    pub noise_precondition_ok: bool,
    /// Whether the dataset satisfies the uniform-sphere sampling hypothesis
    /// the support-detection bound assumes.
    pub uniform_hypothesis: bool,
    pub residual_flag: Flag,
    pub off_support_flag: Flag,
    pub support_flag: Flag,
}

impl RecoveryCertificate {
    /// Recompute all three flags from the stored numbers. Construction uses
    /// exactly this function, so stored flags can never contradict the
    /// numbers they summarize.
    pub fn recompute_flags(&self) -> (Flag, Flag, Flag) {
        let leq = |value: f64, bound: f64| {
            if value <= bound * (1.0 + CHECK_SLACK) + 1e-12 {
                Flag::Pass
            } else {
                Flag::Fail
            }
        };
        let residual = leq(self.in_support_residual, self.residual_bound);
        let off_support = if self.noise_precondition_ok {
            leq(self.off_support_mass, self.off_support_bound)
        } else {
            Flag::NotApplicable
        };
        let support = if !self.uniform_hypothesis || residual != Flag::Pass {
            Flag::NotApplicable
        } else if self.support_mass >= self.support_lower_bound * (1.0 - CHECK_SLACK) - 1e-12 {
            Flag::Pass
        } else {
            Flag::Fail
        };
        (residual, off_support, support)
    }

    fn seal(mut self) -> Self {
        let (residual, off_support, support) = self.recompute_flags();
        self.residual_flag = residual;
        self.off_support_flag = off_support;
        self.support_flag = support;
        self
    }
}

/// Solve with a single deterministic retry at 10× the iteration budget; a
/// solve still hitting the budget afterwards is an error (the caller's
/// retry policy is exhausted).
fn solve_robust(
    dictionary: &DMatrix<f64>,
    target: &DVector<f64>,
    tau: f64,
    opts: &SolverOptions,
) -> Result<SolveResult, VerifyError> {
    let first = solve_constrained_l1(dictionary, target, tau, opts)?;
    if !matches!(first.status, SolveStatus::MaxIterations) {
        return Ok(first);
    }
    let mut widened = *opts;
    widened.max_iterations = opts.max_iterations.saturating_mul(10);
    let second = solve_constrained_l1(dictionary, target, tau, &widened)?;
    if matches!(second.status, SolveStatus::MaxIterations) {
        return Err(VerifyError::SolverFailed {
            detail: format!(
                "duality gap {:.3e} after {} iterations (retry included)",
                second.duality_gap, widened.max_iterations
            ),
        });
    }
    Ok(second)
}

/// Evaluate the recovery bounds for one query `y` whose clean point lies in
/// subspace `label`, solving the τ = γε program on the dataset's full noisy
/// dictionary.
pub fn check_recovery(
    dataset: &Dataset,
    query: &DVector<f64>,
    label: usize,
    bounds: &BoundParams,
    opts: &SolverOptions,
) -> Result<RecoveryCertificate, VerifyError> {
    if label >= dataset.num_subspaces() {
        return Err(VerifyError::ParameterError {
            detail: format!("label {label} out of range"),
        });
    }
    if bounds.inradii.len() != dataset.num_subspaces() {
        return Err(VerifyError::ParameterError {
            detail: "bound parameters were computed for a different subspace count".to_string(),
        });
    }
    let result = solve_robust(&dataset.y, query, bounds.tau(), opts)?;
    if matches!(result.status, SolveStatus::Infeasible) {
        return Err(VerifyError::SolverFailed {
            detail: "recovery program infeasible (tau too small for this dictionary)".to_string(),
        });
    }
    let c = &result.coefficients;
    let mut in_residual = query.clone();
    let mut support_mass = 0.0;
    let mut off_mass = 0.0;
    for j in 0..dataset.total_points() {
        if dataset.labels[j] == label {
            in_residual.axpy(-c[j], &dataset.y.column(j), 1.0);
            support_mass += c[j].abs();
        } else {
            off_mass += c[j].abs();
        }
    }
    let cert = RecoveryCertificate {
        subspace: label,
        in_support_residual: in_residual.norm(),
        residual_bound: bounds.residual_bound(),
        off_support_mass: off_mass,
        off_support_bound: bounds.off_support_bound(label),
        support_mass,
        support_lower_bound: bounds.support_bound(
            dataset.counts()[label],
            dataset.subspaces[label].dim(),
            dataset.ambient_dim(),
        ),
        noise_precondition_ok: bounds.noise_precondition_ok(label),
        uniform_hypothesis: dataset.uniform_points,
        residual_flag: Flag::NotApplicable,
        off_support_flag: Flag::NotApplicable,
        support_flag: Flag::NotApplicable,
    };
    Ok(cert.seal())
}

/// Re-evaluate the support-detection flag of an existing certificate.
///
/// Errors with `HypothesisNotMet` when the dataset was not generated by the
/// uniform-sphere sampler (the bound's hypothesis); returns `NotApplicable`
/// when the approximate-reconstruction flag did not pass (the bound is
/// conditioned on it).
pub fn check_support_detection(
    dataset: &Dataset,
    certificate: &RecoveryCertificate,
) -> Result<Flag, VerifyError> {
    if !dataset.uniform_points {
        return Err(VerifyError::HypothesisNotMet {
            detail: "support detection assumes points drawn uniformly on the subspace sphere"
                .to_string(),
        });
    }
    Ok(certificate.recompute_flags().2)
}

/// Membership test for the perturbation set Wᵢ(β,γ,ε): vectors of norm
/// ≥ βε decomposable as (vector in Sᵢ) + (noise of norm ≤ γε/2). The
/// minimal-norm decomposition takes the noise part orthogonal to Sᵢ, so the
/// test is two norms. Boundary cases are members (the set is closed).
pub fn in_w_set(
    s: &Subspace,
    bounds: &BoundParams,
    epsilon: f64,
    v: &DVector<f64>,
) -> Result<bool, VerifyError> {
    let dist = s.distance(v)?;
    let norm_ok = v.norm() >= bounds.beta * epsilon * (1.0 - 1e-12);
    let dist_ok = dist <= 0.5 * bounds.gamma * epsilon * (1.0 + 1e-12) + 1e-15;
    Ok(norm_ok && dist_ok)
}

/// Draw `count` members of Wᵢ(β,γ,ε) constructively: a direction uniform on
/// the sphere of `s` scaled to ‖y‖ = (β+γ/2)ε(1+u) with u ∈ [0,2), plus an
/// ambient noise vector of norm ≤ γε/2; every fourth sample sits exactly on
/// the norm boundary ‖ỹ‖ = βε (the set includes it). Membership is
/// re-verified post hoc.
pub fn sample_w(
    s: &Subspace,
    bounds: &BoundParams,
    epsilon: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<DVector<f64>>, VerifyError> {
    if bounds.beta <= 0.5 * bounds.gamma {
        return Err(VerifyError::ParameterError {
            detail: format!(
                "sampling the perturbation set requires beta > gamma/2, got beta = {}, gamma/2 = {}",
                bounds.beta,
                0.5 * bounds.gamma
            ),
        });
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(VerifyError::ParameterError {
            detail: format!("the perturbation set needs epsilon > 0, got {epsilon}"),
        });
    }
    let n = s.ambient_dim();
    let d = s.dim();
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let mut rng = ChaCha8Rng::seed_from_u64(
            seed ^ NSP_SAMPLE_SALT ^ (j as u64 + 1).wrapping_mul(GOLDEN),
        );
        let magnitude_slack: f64 = rng.gen_range(0.0..2.0);
        let noise_fraction: f64 = rng.gen();
        let mut gauss = GaussStream::new(rng);
        let mut coords = DVector::zeros(d);
        loop {
            for k in 0..d {
                coords[k] = gauss.next_gaussian();
            }
            let norm = coords.norm();
            if norm > 1e-300 {
                coords /= norm;
                break;
            }
        }
        let direction = s.embed(&coords);
        let sample = if j % 4 == 3 {
            // Exact boundary: ỹ = βε·direction, i.e. y = (β+γ/2)ε·direction
            // with the noise part anti-aligned at full budget γε/2.
            &direction * (bounds.beta * epsilon)
        } else {
            let y = &direction * ((bounds.beta + 0.5 * bounds.gamma) * epsilon * (1.0 + magnitude_slack));
            let mut z = DVector::from_fn(n, |_, _| gauss.next_gaussian());
            let z_norm = z.norm();
            if z_norm > 1e-300 {
                z *= 0.5 * bounds.gamma * epsilon * noise_fraction / z_norm;
            } else {
                z.fill(0.0);
            }
            y + z
        };
        if !in_w_set(s, bounds, epsilon, &sample)? {
            return Err(VerifyError::ParameterError {
                detail: format!("constructed sample {j} failed the membership predicate"),
            });
        }
        out.push(sample);
    }
    Ok(out)
}

/// One perturbation-set sample's strict-inequality outcome.
#[derive(Debug, Clone, Serialize)]
pub struct NspSample {
    #[serde(skip_serializing)]
    pub y_tilde: DVector<f64>,
    /// ‖ỹ‖₂.
    pub norm: f64,
    /// Minimal ℓ1 objective representing ỹ with the subspace's own
    /// noise-free points, tolerance γε/2 (∞ when infeasible).
    pub a_i_objective: f64,
    /// Minimal ℓ1 objective with the other subspaces' noisy points,
    /// tolerance γε (∞ when infeasible — the inequality then holds
    /// vacuously).
    pub a_minus_i_objective: f64,
    /// `a_i_objective < a_minus_i_objective − 1e-6`.
    pub strict_holds: bool,
}

/// Evaluate the strict null-space inequality ‖aᵢ(ỹ)‖₁ < ‖a₋ᵢ(ỹ)‖₁ for each
/// sample: aᵢ uses the noise-free in-subspace points at tolerance γε/2, a₋ᵢ
/// the noisy foreign points at tolerance γε. Samples are processed in
/// parallel; the output order matches the input order.
pub fn check_nsp(
    dataset: &Dataset,
    i: usize,
    samples: &[DVector<f64>],
    bounds: &BoundParams,
    opts: &SolverOptions,
) -> Result<Vec<NspSample>, VerifyError> {
    if dataset.num_subspaces() < 2 {
        return Err(VerifyError::SingleSubspace);
    }
    if i >= dataset.num_subspaces() {
        return Err(VerifyError::ParameterError {
            detail: format!("subspace index {i} out of range"),
        });
    }
    let own_clean = dataset.clean_block(i);
    let foreign_noisy = dataset.noisy_excluding(i);
    let tau_own = 0.5 * bounds.gamma * bounds.noise_level;
    let tau_foreign = bounds.gamma * bounds.noise_level;
    samples
        .par_iter()
        .map(|y_tilde| -> Result<NspSample, VerifyError> {
            let own = solve_robust(&own_clean, y_tilde, tau_own, opts)?;
            let foreign = solve_robust(&foreign_noisy, y_tilde, tau_foreign, opts)?;
            let a_i = if matches!(own.status, SolveStatus::Infeasible) {
                f64::INFINITY
            } else {
                own.objective
            };
            let a_minus_i = if matches!(foreign.status, SolveStatus::Infeasible) {
                f64::INFINITY
            } else {
                foreign.objective
            };
            Ok(NspSample {
                norm: y_tilde.norm(),
                y_tilde: y_tilde.clone(),
                a_i_objective: a_i,
                a_minus_i_objective: a_minus_i,
                strict_holds: a_i < a_minus_i - CHECK_SLACK,
            })
        })
        .collect()
}

/// Outcome of a single ℓ1-norm lemma evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LemmaReport {
    /// Measured ‖c*‖₁.
    pub objective: f64,
    /// The lemma's upper bound.
    pub bound: f64,
    /// `bound − objective`.
    pub margin: f64,
    pub pass: bool,
    /// True when the bound used an inradius lower bound rather than an exact
    /// value (the bound is then a valid but looser implication).
    pub used_lower_bound: bool,
}

fn lemma_report(objective: f64, bound: f64, used_lower_bound: bool) -> LemmaReport {
    LemmaReport {
        objective,
        bound,
        margin: bound - objective,
        pass: objective <= bound * (1.0 + 1e-9) + 1e-12,
        used_lower_bound,
    }
}

/// ℓ1 mass of an exact in-subspace representation: ‖c*‖₁ ≤ ‖x‖₂/rᵢ for the
/// equality program over the subspace's own points.
pub fn check_lemma1(
    s: &Subspace,
    points: &DMatrix<f64>,
    x: &DVector<f64>,
    opts: &SolverOptions,
) -> Result<LemmaReport, VerifyError> {
    let bracket = crate::geometry::inradius(s, points, &MethodSpec::Auto)?;
    if !(bracket.lower > 0.0) {
        return Err(VerifyError::ZeroInradius { index: 0 });
    }
    let result = solve_equality_l1(points, x, opts)?;
    if matches!(result.status, SolveStatus::Infeasible) {
        return Err(VerifyError::ParameterError {
            detail: "the query is not in the span of the points".to_string(),
        });
    }
    if matches!(result.status, SolveStatus::MaxIterations) {
        return Err(VerifyError::SolverFailed {
            detail: format!("equality program gap {:.3e} at iteration budget", result.duality_gap),
        });
    }
    Ok(lemma_report(
        result.objective,
        x.norm() / bracket.lower,
        !bracket.is_exact,
    ))
}

/// One trial of the noise-compression inequality
/// ‖Zᵢcᵢ‖₂ ≤ 2ε√(2(ln Nᵢ + ln n))·‖cᵢ‖₁ for a fixed cᵢ and a fresh Zᵢ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lemma2Sample {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

pub fn check_lemma2(
    z_i: &DMatrix<f64>,
    c_i: &DVector<f64>,
    n_i: usize,
    n: usize,
    epsilon: f64,
) -> Result<Lemma2Sample, VerifyError> {
    if z_i.ncols() != c_i.len() {
        return Err(VerifyError::ParameterError {
            detail: format!(
                "noise block has {} columns but the coefficient vector has {}",
                z_i.ncols(),
                c_i.len()
            ),
        });
    }
    if n_i == 0 || n == 0 {
        return Err(VerifyError::ParameterError {
            detail: "counts and ambient dimension must be positive".to_string(),
        });
    }
    let lhs = (z_i * c_i).norm();
    let l1: f64 = c_i.iter().map(|v| v.abs()).sum();
    let rhs = 2.0 * epsilon * (2.0 * ((n_i as f64).ln() + (n as f64).ln())).sqrt() * l1;
    Ok(Lemma2Sample {
        lhs,
        rhs,
        pass: lhs <= rhs + 1e-12,
    })
}

/// Objective bound of the recovery program itself: the τ = γε solution on
/// the full noisy dictionary satisfies ‖c*‖₁ ≤ 1/rᵢ.
pub fn check_lemma3(
    dataset: &Dataset,
    query: &DVector<f64>,
    label: usize,
    bounds: &BoundParams,
    opts: &SolverOptions,
) -> Result<LemmaReport, VerifyError> {
    if label >= dataset.num_subspaces() {
        return Err(VerifyError::ParameterError {
            detail: format!("label {label} out of range"),
        });
    }
    let result = solve_robust(&dataset.y, query, bounds.tau(), opts)?;
    if matches!(result.status, SolveStatus::Infeasible) {
        return Err(VerifyError::SolverFailed {
            detail: "recovery program infeasible".to_string(),
        });
    }
    Ok(lemma_report(
        result.objective,
        1.0 / bounds.inradii[label],
        !bounds.inradius_exact[label],
    ))
}

/// Parameters of the two Gaussian tail checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AppendixParams {
    /// Ambient dimension for the χ² tail.
    pub n: usize,
    /// Slack factor ρ: the event is ‖z‖ > ϵ(1+ρ) for z with N(0, ϵ²/n)
    /// entries (the probability does not depend on ϵ).
    pub rho: f64,
    /// Number of unit columns for the max-correlation tail.
    pub big_n: usize,
    /// Gaussian scale σ of the vector the columns are tested against.
    pub sigma: f64,
}

/// Empirical exceedance fractions against the two tail bounds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AppendixReport {
    pub trials: usize,
    /// exp(−n((1+ρ)² − √(2(1+ρ)² − 1))/2).
    pub chi2_bound: f64,
    pub chi2_exceedance: f64,
    pub chi2_allowance: f64,
    pub chi2_pass: bool,
    /// 2√(2 ln N)·σ.
    pub lemma7_threshold: f64,
    /// 1/N².
    pub lemma7_bound: f64,
    pub lemma7_exceedance: f64,
    pub lemma7_allowance: f64,
    pub lemma7_pass: bool,
}

/// Monte Carlo confrontation of the two appendix tail bounds:
/// (a) P[‖z‖ > ϵ(1+ρ)] against the sub-exponential χ² bound, and
/// (b) P[‖Aᵀx‖∞ > 2√(2 ln N)σ] ≤ 1/N² for a fixed matrix of N unit columns
/// and x ~ N(0, σ²Iₙ).
pub fn check_appendix_bounds(
    params: &AppendixParams,
    trials: usize,
    seed: u64,
) -> Result<AppendixReport, VerifyError> {
    if trials == 0 {
        return Err(VerifyError::ParameterError {
            detail: "at least one trial is required".to_string(),
        });
    }
    if params.n == 0 || params.big_n == 0 {
        return Err(VerifyError::ParameterError {
            detail: "dimensions must be positive".to_string(),
        });
    }
    if !(params.rho >= 0.0 && params.rho.is_finite()) || !(params.sigma >= 0.0 && params.sigma.is_finite()) {
        return Err(VerifyError::ParameterError {
            detail: "rho and sigma must be finite and nonnegative".to_string(),
        });
    }
    let n = params.n;
    let one_plus_rho_sq = (1.0 + params.rho) * (1.0 + params.rho);
    let chi2_bound =
        (-(n as f64) * (one_plus_rho_sq - (2.0 * one_plus_rho_sq - 1.0).sqrt()) / 2.0).exp();
    // (a) ‖g‖² > n(1+ρ)² for standard Gaussian g — scale-free form of the
    // event ‖z‖ > ϵ(1+ρ).
    let mut gauss = GaussStream::new(ChaCha8Rng::seed_from_u64(seed ^ CHI2_SALT));
    let mut chi2_exceed = 0usize;
    for _ in 0..trials {
        let mut sq = 0.0;
        for _ in 0..n {
            let g = gauss.next_gaussian();
            sq += g * g;
        }
        if sq > n as f64 * one_plus_rho_sq {
            chi2_exceed += 1;
        }
    }

    // (b) Fixed unit-column matrix, fresh Gaussian vector per trial.
    let big_n = params.big_n;
    let mut matrix_gauss = GaussStream::new(ChaCha8Rng::seed_from_u64(seed ^ L7_MATRIX_SALT));
    let mut a = DMatrix::from_fn(n, big_n, |_, _| matrix_gauss.next_gaussian());
    for mut col in a.column_iter_mut() {
        let norm = col.norm();
        if norm > 1e-300 {
            col /= norm;
        } else {
            col[0] = 1.0;
        }
    }
    let threshold = 2.0 * (2.0 * (big_n as f64).ln()).sqrt() * params.sigma;
    let mut x_gauss = GaussStream::new(ChaCha8Rng::seed_from_u64(seed ^ L7_X_SALT));
    let mut l7_exceed = 0usize;
    let mut x = DVector::zeros(n);
    let mut corr = DVector::zeros(big_n);
    for _ in 0..trials {
        for k in 0..n {
            x[k] = params.sigma * x_gauss.next_gaussian();
        }
        corr.gemv_tr(1.0, &a, &x, 0.0);
        if corr.amax() > threshold {
            l7_exceed += 1;
        }
    }

    let lemma7_bound = 1.0 / (big_n as f64 * big_n as f64);
    let chi2_exceedance = chi2_exceed as f64 / trials as f64;
    let lemma7_exceedance = l7_exceed as f64 / trials as f64;
    let chi2_allowance = bernoulli_allowance(chi2_bound, trials);
    let lemma7_allowance = bernoulli_allowance(lemma7_bound, trials);
    Ok(AppendixReport {
        trials,
        chi2_bound,
        chi2_exceedance,
        chi2_allowance,
        chi2_pass: chi2_exceedance <= chi2_allowance,
        lemma7_threshold: threshold,
        lemma7_bound,
        lemma7_exceedance,
        lemma7_allowance,
        lemma7_pass: lemma7_exceedance <= lemma7_allowance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{DatasetParams, NoiseParams};
    use crate::geometry::{InradiusBracket, InradiusMethod, SubspaceGeometry};
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn report_from(radii: &[f64], mus: &[f64], epsilon: f64) -> GeometryReport {
        let subspaces = radii
            .iter()
            .zip(mus)
            .map(|(&r, &mu)| SubspaceGeometry {
                inradius: InradiusBracket {
                    lower: r,
                    upper: r,
                    method: InradiusMethod::ExactVertexEnum,
                    is_exact: true,
                },
                incoherence: mu,
                margin: r - (mu + epsilon),
            })
            .collect();
        let l = radii.len();
        GeometryReport {
            subspaces,
            min_principal_angles: vec![vec![0.0; l]; l],
            noise_level: epsilon,
        }
    }

    #[test]
    fn gamma_trivial_case_is_two() {
        let report = report_from(&[0.7], &[0.0], 0.0);
        let g = compute_gamma(&report, &[1], 1).unwrap();
        assert_eq!(g.gamma, 2.0);
        assert_eq!(g.argmax, 0);
    }

    #[test]
    fn gamma_matches_hand_arithmetic() {
        let report = report_from(&[0.5], &[0.0], 0.0);
        let g = compute_gamma(&report, &[64], 100).unwrap();
        assert_relative_eq!(g.gamma, 35.493265270446734, max_relative = 1e-12);
    }

    #[test]
    fn gamma_maximizer_is_smallest_inradius() {
        let report = report_from(&[0.5, 0.9], &[0.0, 0.0], 0.0);
        let g = compute_gamma(&report, &[64, 64], 100).unwrap();
        assert_eq!(g.argmax, 0);
        assert!(g.terms[0] > g.terms[1]);
    }

    #[test]
    fn gamma_monotone_nonincreasing_in_inradius() {
        let lo = compute_gamma(&report_from(&[0.4], &[0.0], 0.0), &[32], 50).unwrap();
        let hi = compute_gamma(&report_from(&[0.41], &[0.0], 0.0), &[32], 50).unwrap();
        assert!(hi.gamma < lo.gamma);
    }

    #[test]
    fn gamma_rejects_zero_inradius() {
        let report = report_from(&[0.0], &[0.0], 0.0);
        assert!(matches!(
            compute_gamma(&report, &[8], 10),
            Err(VerifyError::ZeroInradius { index: 0 })
        ));
    }

    #[test]
    fn beta_orthogonal_noiseless_limit() {
        // μ + ε = 0 → the inner factor is exactly 3, so β = 2γ + δ.
        let report = report_from(&[0.5], &[0.0], 0.0);
        let gamma = 10.0;
        let b = compute_beta(&report, gamma, 0.0, 1e-3).unwrap();
        assert_relative_eq!(b.beta, 2.0 * gamma + 1e-3, max_relative = 1e-14);
    }

    #[test]
    fn beta_matches_hand_arithmetic() {
        // r = 0.5, μ+ε = 0.25 → factor 6 → β = 7γ/2 + δ.
        let report = report_from(&[0.5], &[0.25], 0.0);
        let b = compute_beta(&report, 35.494, 0.0, 1e-3).unwrap();
        assert_relative_eq!(b.beta, 124.23, max_relative = 1e-4);
    }

    #[test]
    fn beta_rejects_nonpositive_margin() {
        let report = report_from(&[0.5], &[0.5], 0.0);
        assert!(matches!(
            compute_beta(&report, 10.0, 0.1, 1e-3),
            Err(VerifyError::NecessaryConditionViolated { index: 0, .. })
        ));
    }

    #[test]
    fn beta_monotone_in_incoherence_and_noise() {
        let base = compute_beta(&report_from(&[0.8], &[0.1], 0.0), 10.0, 0.05, 1e-3)
            .unwrap()
            .beta;
        let more_mu = compute_beta(&report_from(&[0.8], &[0.12], 0.0), 10.0, 0.05, 1e-3)
            .unwrap()
            .beta;
        let more_eps = compute_beta(&report_from(&[0.8], &[0.1], 0.0), 10.0, 0.06, 1e-3)
            .unwrap()
            .beta;
        assert!(more_mu > base);
        assert!(more_eps > base);
    }

    #[test]
    fn support_bound_spot_value() {
        let v = support_detection_bound(10.0, 0.01, 100, 5, 200);
        assert_relative_eq!(v, 0.3273565503934188, max_relative = 1e-12);
        // ε = 0 → only the dᵢ term survives in the denominator.
        let noiseless = support_detection_bound(10.0, 0.0, 100, 5, 200);
        let expected = 1.0 / (2.0 * (2.0 * (100f64).ln() / 5.0).sqrt());
        assert_relative_eq!(noiseless, expected, max_relative = 1e-14);
    }

    #[test]
    fn allowance_is_three_sigma() {
        assert_eq!(bernoulli_allowance(0.0, 200), 0.0);
        let q = 0.01;
        let a = bernoulli_allowance(q, 100);
        assert_relative_eq!(a, q + 3.0 * (q * (1.0 - q) / 100.0).sqrt(), max_relative = 1e-15);
    }

    fn toy_bounds(gamma: f64, beta: f64, epsilon: f64, r: f64) -> BoundParams {
        BoundParams {
            gamma,
            gamma_terms: vec![gamma],
            gamma_argmax: 0,
            beta,
            beta_argmax: 0,
            delta: 1e-3,
            noise_level: epsilon,
            inradii: vec![r],
            inradius_exact: vec![true],
            incoherences: vec![0.0],
        }
    }

    #[test]
    fn w_set_sampling_and_membership() {
        let s = crate::datagen::gen_subspaces(4, &[2], 3, None)
            .unwrap()
            .remove(0);
        let bounds = toy_bounds(4.0, 3.0, 0.1, 0.7);
        let samples = sample_w(&s, &bounds, 0.1, 50, 11).unwrap();
        assert_eq!(samples.len(), 50);
        for v in &samples {
            assert!(in_w_set(&s, &bounds, 0.1, v).unwrap());
        }
        // Boundary norm is a member.
        let boundary = s.embed(&DVector::from_column_slice(&[1.0, 0.0])) * (3.0 * 0.1);
        assert!(in_w_set(&s, &bounds, 0.1, &boundary).unwrap());
        // Below the norm floor is not.
        let inside = s.embed(&DVector::from_column_slice(&[1.0, 0.0])) * (3.0 * 0.1 * 0.5);
        assert!(!in_w_set(&s, &bounds, 0.1, &inside).unwrap());
        // β ≤ γ/2 makes the sampler's construction impossible.
        let bad = toy_bounds(4.0, 1.9, 0.1, 0.7);
        assert!(matches!(
            sample_w(&s, &bad, 0.1, 5, 1),
            Err(VerifyError::ParameterError { .. })
        ));
    }

    #[test]
    fn certificate_flags_are_pure_recomputation() {
        let mut cert = RecoveryCertificate {
            subspace: 0,
            in_support_residual: 0.5,
            residual_bound: 1.0,
            off_support_mass: 0.2,
            off_support_bound: 0.1,
            support_mass: 0.9,
            support_lower_bound: 0.3,
            noise_precondition_ok: true,
            uniform_hypothesis: true,
            residual_flag: Flag::NotApplicable,
            off_support_flag: Flag::NotApplicable,
            support_flag: Flag::NotApplicable,
        }
        .seal();
        assert_eq!(cert.residual_flag, Flag::Pass);
        assert_eq!(cert.off_support_flag, Flag::Fail);
        assert_eq!(cert.support_flag, Flag::Pass);
        let recomputed = cert.recompute_flags();
        assert_eq!(
            (cert.residual_flag, cert.off_support_flag, cert.support_flag),
            recomputed
        );
        // Precondition failure flips the off-support flag to NotApplicable.
        cert.noise_precondition_ok = false;
        assert_eq!(cert.recompute_flags().1, Flag::NotApplicable);
        // A failed reconstruction makes the support bound inapplicable.
        cert.in_support_residual = 2.0;
        assert_eq!(cert.recompute_flags().2, Flag::NotApplicable);
    }

    fn orthogonal_noise_free_dataset() -> Dataset {
        DatasetParams {
            ambient_dim: 4,
            subspace_dims: vec![2, 2],
            points_per_subspace: vec![10, 10],
            noise: NoiseParams::new(0.0, 0.0).unwrap(),
            seed: 71,
            min_angle: Some(FRAC_PI_2),
            uniform_points: true,
        }
        .generate()
        .unwrap()
    }

    #[test]
    fn recovery_noise_free_orthogonal_is_exact() {
        let ds = orthogonal_noise_free_dataset();
        let geometry = dataset_geometry(&ds, &MethodSpec::Auto).unwrap();
        let bounds =
            compute_bounds(&geometry, &ds.counts(), ds.ambient_dim(), 0.0, DEFAULT_DELTA).unwrap();
        let opts = SolverOptions::default();
        let query = crate::datagen::gen_points(&ds.subspaces[0], 1, 9991).unwrap();
        let query = DVector::from_column_slice(query.column(0).as_slice());
        let cert = check_recovery(&ds, &query, 0, &bounds, &opts).unwrap();
        assert!(cert.in_support_residual < 1e-10, "{}", cert.in_support_residual);
        assert!(cert.off_support_mass < 1e-10, "{}", cert.off_support_mass);
        assert_eq!(cert.residual_flag, Flag::Pass);
        assert_eq!(cert.off_support_flag, Flag::Pass);
        assert!(cert.noise_precondition_ok);
    }

    #[test]
    fn recovery_of_a_dictionary_column_costs_at_most_one() {
        let ds = orthogonal_noise_free_dataset();
        let geometry = dataset_geometry(&ds, &MethodSpec::Auto).unwrap();
        let bounds =
            compute_bounds(&geometry, &ds.counts(), ds.ambient_dim(), 0.0, DEFAULT_DELTA).unwrap();
        let opts = SolverOptions::default();
        let j = 3;
        let query = DVector::from_column_slice(ds.y.column(j).as_slice());
        let label = ds.labels[j];
        let cert = check_recovery(&ds, &query, label, &bounds, &opts).unwrap();
        assert!(
            cert.support_mass + cert.off_support_mass <= 1.0 + 1e-8,
            "objective {}",
            cert.support_mass + cert.off_support_mass
        );
    }

    #[test]
    fn support_detection_needs_uniform_hypothesis() {
        let mut ds = orthogonal_noise_free_dataset();
        ds.uniform_points = false;
        let cert = RecoveryCertificate {
            subspace: 0,
            in_support_residual: 0.0,
            residual_bound: 0.0,
            off_support_mass: 0.0,
            off_support_bound: 0.0,
            support_mass: 1.0,
            support_lower_bound: 0.3,
            noise_precondition_ok: true,
            uniform_hypothesis: false,
            residual_flag: Flag::Pass,
            off_support_flag: Flag::Pass,
            support_flag: Flag::NotApplicable,
        };
        assert!(matches!(
            check_support_detection(&ds, &cert),
            Err(VerifyError::HypothesisNotMet { .. })
        ));
    }

    #[test]
    fn nsp_rejects_single_subspace() {
        let ds = DatasetParams {
            ambient_dim: 4,
            subspace_dims: vec![2],
            points_per_subspace: vec![6],
            noise: NoiseParams::new(0.01, 0.1).unwrap(),
            seed: 4,
            min_angle: None,
            uniform_points: true,
        }
        .generate()
        .unwrap();
        let bounds = toy_bounds(4.0, 3.0, 0.011, 0.7);
        let sample = DVector::zeros(4);
        assert!(matches!(
            check_nsp(&ds, 0, &[sample], &bounds, &SolverOptions::default()),
            Err(VerifyError::SingleSubspace)
        ));
    }

    #[test]
    fn lemma1_cross_polytope_fixture() {
        let basis = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let s = Subspace::from_orthonormal(basis).unwrap();
        let points = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let x = DVector::from_column_slice(&[1.0, 0.0, 0.0]);
        let report = check_lemma1(&s, &points, &x, &SolverOptions::default()).unwrap();
        assert!(report.pass);
        assert!(!report.used_lower_bound);
        assert_relative_eq!(report.objective, 1.0, epsilon = 1e-9);
        assert_relative_eq!(report.bound, std::f64::consts::SQRT_2, epsilon = 1e-9);
    }

    #[test]
    fn lemma1_zero_query() {
        let basis = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let s = Subspace::from_orthonormal(basis).unwrap();
        let points = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let x = DVector::zeros(3);
        let report = check_lemma1(&s, &points, &x, &SolverOptions::default()).unwrap();
        assert!(report.pass);
        assert_eq!(report.objective, 0.0);
        assert_eq!(report.bound, 0.0);
    }

    #[test]
    fn lemma2_edges() {
        let z = DMatrix::from_element(5, 3, 0.3);
        let zero = DVector::zeros(3);
        let s = check_lemma2(&z, &zero, 3, 5, 0.1).unwrap();
        assert!(s.pass);
        assert_eq!(s.lhs, 0.0);
        // Indicator coefficient reduces to a single-column norm comparison.
        let e1 = DVector::from_column_slice(&[1.0, 0.0, 0.0]);
        let noise = crate::datagen::gen_noise(5, 3, &NoiseParams::new(0.1, 0.0).unwrap(), 8).unwrap();
        let s = check_lemma2(&noise, &e1, 3, 5, 0.1).unwrap();
        let col_norm = noise.column(0).norm();
        assert_relative_eq!(s.lhs, col_norm, max_relative = 1e-13);
        assert!(s.pass, "lhs {} rhs {}", s.lhs, s.rhs);
    }

    #[test]
    fn appendix_bounds_small_run() {
        let params = AppendixParams {
            n: 20,
            rho: 0.25,
            big_n: 30,
            sigma: 0.1,
        };
        let report = check_appendix_bounds(&params, 400, 17).unwrap();
        assert!(report.chi2_pass, "{report:?}");
        assert!(report.lemma7_pass, "{report:?}");
        assert!(report.chi2_bound > 0.0 && report.chi2_bound < 1.0);
        // σ = 0 never exceeds a zero threshold.
        let silent = AppendixParams { sigma: 0.0, ..params };
        let report = check_appendix_bounds(&silent, 100, 17).unwrap();
        assert_eq!(report.lemma7_exceedance, 0.0);
        assert_eq!(report.lemma7_threshold, 0.0);
    }

    #[test]
    fn appendix_chi2_bound_matches_hand_arithmetic() {
        let params = AppendixParams {
            n: 100,
            rho: 0.1,
            big_n: 100,
            sigma: 0.1,
        };
        let report = check_appendix_bounds(&params, 1, 1).unwrap();
        assert_relative_eq!(report.chi2_bound, 0.3992675398178277, max_relative = 1e-12);
        assert_relative_eq!(report.lemma7_threshold, 0.6069708517540586, max_relative = 1e-12);
    }
}
