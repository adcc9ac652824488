//! Three ℓ1 programs with independently checkable optimality certificates.
//!
//! * [`solve_constrained_l1`] — `min ‖c‖₁ s.t. ‖y − Yc‖₂ ≤ τ` (basis-pursuit
//!   denoising), the program the recovery guarantees are stated for.
//! * [`solve_equality_l1`] — `min ‖c‖₁ s.t. x = Xc`, the noise-free limit
//!   (`τ = 0` routes here).
//! * [`solve_lasso`] — `min λ‖c‖₁ + ½‖y − Yc‖₂²`, the unconstrained baseline.
//!
//! Every result carries a dual vector ν and the duality gap it certifies:
//! for the constrained program any ν with `‖Yᵀν‖∞ ≤ 1` proves
//! `‖c*‖₁ ≥ yᵀν − τ‖ν‖₂`, for the equality program `‖c*‖₁ ≥ xᵀν`, and for
//! the lasso any ν with `‖Yᵀν‖∞ ≤ λ` proves the optimum is at least
//! `yᵀν − ½‖ν‖₂²`. [`certify`] recomputes the gap from scratch so callers
//! never have to trust solver internals.
//!
//! The solvers are deterministic: fixed zero initialization, no randomized
//! steps, identical inputs give identical outputs.

mod lasso;
mod splitting;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Outcome classification of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Feasible within tolerance and duality gap below the gap tolerance.
    Optimal,
    /// Iteration budget exhausted; the best iterate and its true gap are
    /// returned.
    MaxIterations,
    /// No feasible point exists (target out of reach of the constraint set).
    Infeasible,
}

/// Solution of one of the three programs, with its certificate.
#[derive(Debug, Clone)]
pub struct SolveResult {
    /// The minimizer candidate c (length N).
    pub coefficients: DVector<f64>,
    /// ‖y − Yc‖₂ at the returned coefficients.
    pub residual_norm: f64,
    /// ‖c‖₁ at the returned coefficients (for the lasso this is the ℓ1 part,
    /// not the composite objective).
    pub objective: f64,
    pub status: SolveStatus,
    pub iterations: usize,
    /// Certified optimality gap, recomputable via [`certify`].
    pub duality_gap: f64,
    /// Dual vector ν (length n) backing `duality_gap`; stored already scaled
    /// to dual feasibility.
    pub dual_certificate: DVector<f64>,
}

/// Iteration controls for all three solvers.
///
/// `rho` and `over_relaxation` parameterize the operator-splitting scheme
/// used by the constrained and equality programs; the lasso ignores them.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Relative primal residual tolerance of the splitting scheme.
    pub primal_tol: f64,
    /// Relative dual residual tolerance of the splitting scheme.
    pub dual_tol: f64,
    /// Relative duality-gap tolerance: Optimal requires
    /// `gap ≤ gap_tol · (1 + objective)`.
    pub gap_tol: f64,
    /// Initial splitting penalty (adapted during the run by residual
    /// balancing; the adaptation is deterministic).
    pub rho: f64,
    /// Over-relaxation factor α ∈ (0, 2).
    pub over_relaxation: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        // Theorem checks downstream use slack 1e-6, so solver noise must sit
        // well below it: residual tolerances two decades tighter than the gap
        // tolerance.
        SolverOptions {
            max_iterations: 100_000,
            primal_tol: 1e-8,
            dual_tol: 1e-8,
            gap_tol: 1e-6,
            rho: 1.0,
            over_relaxation: 1.8,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<(), SolverError> {
        if self.max_iterations < 1 {
            return Err(SolverError::InvalidParameter {
                detail: "max_iterations must be at least 1".to_string(),
            });
        }
        for (name, v) in [
            ("primal_tol", self.primal_tol),
            ("dual_tol", self.dual_tol),
            ("gap_tol", self.gap_tol),
            ("rho", self.rho),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SolverError::InvalidParameter {
                    detail: format!("{name} must be a positive finite real, got {v}"),
                });
            }
        }
        if !(self.over_relaxation > 0.0 && self.over_relaxation < 2.0) {
            return Err(SolverError::InvalidParameter {
                detail: format!(
                    "over_relaxation must lie in (0, 2), got {}",
                    self.over_relaxation
                ),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid parameter: {detail}")]
    InvalidParameter { detail: String },
    #[error("dimension mismatch: {detail}")]
    DimensionMismatch { detail: String },
    #[error("non-finite input: {detail}")]
    NonFinite { detail: &'static str },
}

/// Description of the program a [`SolveResult`] claims to solve, for
/// [`certify`].
#[derive(Debug, Clone, Copy)]
pub enum Problem<'a> {
    /// `min ‖c‖₁ s.t. ‖target − dictionary·c‖₂ ≤ tau`
    Constrained {
        dictionary: &'a DMatrix<f64>,
        target: &'a DVector<f64>,
        tau: f64,
    },
    /// `min ‖c‖₁ s.t. dictionary·c = target`
    Equality {
        dictionary: &'a DMatrix<f64>,
        target: &'a DVector<f64>,
    },
    /// `min lambda·‖c‖₁ + ½‖target − dictionary·c‖₂²`
    Lasso {
        dictionary: &'a DMatrix<f64>,
        target: &'a DVector<f64>,
        lambda: f64,
    },
}

fn validate_inputs(
    dictionary: &DMatrix<f64>,
    target: &DVector<f64>,
) -> Result<(), SolverError> {
    if dictionary.nrows() == 0 || dictionary.ncols() == 0 {
        return Err(SolverError::InvalidParameter {
            detail: format!(
                "dictionary must be nonempty, got {}x{}",
                dictionary.nrows(),
                dictionary.ncols()
            ),
        });
    }
    if target.len() != dictionary.nrows() {
        return Err(SolverError::DimensionMismatch {
            detail: format!(
                "target has length {} but the dictionary has {} rows",
                target.len(),
                dictionary.nrows()
            ),
        });
    }
    if !dictionary.iter().all(|v| v.is_finite()) {
        return Err(SolverError::NonFinite {
            detail: "dictionary contains a non-finite entry",
        });
    }
    if !target.iter().all(|v| v.is_finite()) {
        return Err(SolverError::NonFinite {
            detail: "target contains a non-finite entry",
        });
    }
    Ok(())
}

/// `min ‖c‖₁ s.t. ‖y − Yc‖₂ ≤ τ`.
///
/// `τ = 0` routes to [`solve_equality_l1`]; `‖y‖₂ ≤ τ` returns `c = 0`
/// immediately (the origin is feasible with minimal objective). A target
/// whose distance to `range(Y)` exceeds τ yields status `Infeasible` with
/// the least-squares point.
pub fn solve_constrained_l1(
    dictionary: &DMatrix<f64>,
    target: &DVector<f64>,
    tau: f64,
    opts: &SolverOptions,
) -> Result<SolveResult, SolverError> {
    opts.validate()?;
    validate_inputs(dictionary, target)?;
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(SolverError::InvalidParameter {
            detail: format!("tau must be a finite nonnegative real, got {tau}"),
        });
    }
    if target.norm() <= tau {
        return Ok(trivial_zero_result(dictionary, target, tau));
    }
    if tau == 0.0 {
        return solve_equality_l1(dictionary, target, opts);
    }
    Ok(splitting::solve(dictionary, target, tau, false, opts))
}

/// `min ‖c‖₁ s.t. x = Xc`.
///
/// Requires `x ∈ range(X)` within `1e-9·(1 + ‖x‖)` (checked via the
/// least-squares residual); otherwise the result has status `Infeasible`.
pub fn solve_equality_l1(
    dictionary: &DMatrix<f64>,
    target: &DVector<f64>,
    opts: &SolverOptions,
) -> Result<SolveResult, SolverError> {
    opts.validate()?;
    validate_inputs(dictionary, target)?;
    if target.norm() == 0.0 {
        return Ok(trivial_zero_result(dictionary, target, 0.0));
    }
    Ok(splitting::solve(dictionary, target, 0.0, true, opts))
}

/// `min λ‖c‖₁ + ½‖y − Yc‖₂²` for λ > 0.
pub fn solve_lasso(
    dictionary: &DMatrix<f64>,
    target: &DVector<f64>,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<SolveResult, SolverError> {
    opts.validate()?;
    validate_inputs(dictionary, target)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(SolverError::InvalidParameter {
            detail: format!("lambda must be a positive finite real, got {lambda}"),
        });
    }
    Ok(lasso::solve(dictionary, target, lambda, opts))
}

/// Recompute the duality gap / KKT residual of `result` for `problem` from
/// scratch, reusing nothing from the solver run. The solvers fill
/// `duality_gap` through this same pure function, so
/// `certify(p, r) == r.duality_gap` exactly for results they return.
pub fn certify(problem: &Problem<'_>, result: &SolveResult) -> f64 {
    match problem {
        Problem::Constrained {
            dictionary,
            target,
            tau,
        } => constrained_gap(
            dictionary,
            target,
            *tau,
            &result.coefficients,
            &result.dual_certificate,
        ),
        Problem::Equality { dictionary, target } => equality_gap(
            dictionary,
            target,
            &result.coefficients,
            &result.dual_certificate,
        ),
        Problem::Lasso {
            dictionary,
            target,
            lambda,
        } => lasso_gap(
            dictionary,
            target,
            *lambda,
            &result.coefficients,
            &result.dual_certificate,
        ),
    }
}

pub(crate) fn l1_norm(v: &DVector<f64>) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// Scale ν down so that ‖Dᵀν‖∞ ≤ limit (identity when already feasible).
pub(crate) fn rescale_dual(
    dictionary: &DMatrix<f64>,
    nu: &DVector<f64>,
    limit: f64,
) -> DVector<f64> {
    let reach = (dictionary.transpose() * nu).amax();
    if reach > limit && reach > 0.0 {
        nu * (limit / reach)
    } else {
        nu.clone()
    }
}

/// Gap of (c, ν) for the constrained program: ‖c‖₁ − (yᵀν − τ‖ν‖₂) after
/// forcing ν into the dual-feasible slab, clamped at zero.
pub(crate) fn constrained_gap(
    dictionary: &DMatrix<f64>,
    target: &DVector<f64>,
    tau: f64,
    c: &DVector<f64>,
    nu: &DVector<f64>,
) -> f64 {
    let nu = rescale_dual(dictionary, nu, 1.0);
    let bound = target.dot(&nu) - tau * nu.norm();
    (l1_norm(c) - bound).max(0.0)
}

/// Gap of (c, ν) for the equality program: ‖c‖₁ − xᵀν with ‖Xᵀν‖∞ ≤ 1.
pub(crate) fn equality_gap(
    dictionary: &DMatrix<f64>,
    target: &DVector<f64>,
    c: &DVector<f64>,
    nu: &DVector<f64>,
) -> f64 {
    let nu = rescale_dual(dictionary, nu, 1.0);
    (l1_norm(c) - target.dot(&nu)).max(0.0)
}

/// Gap of (c, ν) for the lasso: composite primal minus the dual value
/// yᵀν − ½‖ν‖₂² over the slab ‖Yᵀν‖∞ ≤ λ.
pub(crate) fn lasso_gap(
    dictionary: &DMatrix<f64>,
    target: &DVector<f64>,
    lambda: f64,
    c: &DVector<f64>,
    nu: &DVector<f64>,
) -> f64 {
    let nu = rescale_dual(dictionary, nu, lambda);
    let residual = target - dictionary * c;
    let primal = lambda * l1_norm(c) + 0.5 * residual.norm_squared();
    let dual = target.dot(&nu) - 0.5 * nu.norm_squared();
    (primal - dual).max(0.0)
}

/// Result for the trivially-optimal `c = 0` case (‖y‖ ≤ τ).
fn trivial_zero_result(
    dictionary: &DMatrix<f64>,
    target: &DVector<f64>,
    tau: f64,
) -> SolveResult {
    let c = DVector::zeros(dictionary.ncols());
    let nu = DVector::zeros(dictionary.nrows());
    let gap = constrained_gap(dictionary, target, tau, &c, &nu);
    SolveResult {
        residual_norm: target.norm(),
        objective: 0.0,
        status: SolveStatus::Optimal,
        iterations: 0,
        duality_gap: gap,
        dual_certificate: nu,
        coefficients: c,
    }
}

pub(crate) fn soft_threshold(v: f64, threshold: f64) -> f64 {
    if v > threshold {
        v - threshold
    } else if v < -threshold {
        v + threshold
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    fn constrained_fixture_i2() -> (DMatrix<f64>, DVector<f64>, f64) {
        (
            DMatrix::identity(2, 2),
            DVector::from_vec(vec![1.0, 0.0]),
            0.25,
        )
    }

    #[test]
    fn constrained_shrinks_toward_ball() {
        let (y_mat, y, tau) = constrained_fixture_i2();
        let r = solve_constrained_l1(&y_mat, &y, tau, &opts()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective - 0.75).abs() < 1e-8, "objective {}", r.objective);
        assert!((r.coefficients[0] - 0.75).abs() < 1e-6);
        assert!(r.coefficients[1].abs() < 1e-6);
        assert!(r.residual_norm <= tau * (1.0 + 1e-8));
        assert!(r.duality_gap <= 1e-6 * (1.0 + r.objective));
        let problem = Problem::Constrained {
            dictionary: &y_mat,
            target: &y,
            tau,
        };
        let recomputed = certify(&problem, &r);
        assert!((recomputed - r.duality_gap).abs() <= 1e-10);
    }

    #[test]
    fn constrained_inside_ball_returns_zero() {
        let y_mat = DMatrix::from_column_slice(2, 3, &[1.0, 2.0, -0.5, 0.3, 0.1, 0.1]);
        let y = DVector::from_vec(vec![0.3, -0.4]);
        let r = solve_constrained_l1(&y_mat, &y, 0.75, &opts()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.objective, 0.0);
        assert_eq!(r.iterations, 0);
        assert!(r.coefficients.iter().all(|&v| v == 0.0));
        assert_eq!(r.duality_gap, 0.0);
    }

    #[test]
    fn constrained_wide_row_certifies_objective_two() {
        let y_mat = DMatrix::from_column_slice(1, 2, &[1.0, 1.0]);
        let y = DVector::from_vec(vec![3.0]);
        let r = solve_constrained_l1(&y_mat, &y, 1.0, &opts()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        // Minimizer non-unique; the objective is pinned at 2 by the
        // constraint c₁ + c₂ ∈ [2, 4].
        assert!((r.objective - 2.0).abs() < 1e-6, "objective {}", r.objective);
        assert!(r.duality_gap <= 1e-6 * (1.0 + r.objective));
    }

    #[test]
    fn constrained_unreachable_target_is_infeasible() {
        let y_mat = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let y = DVector::from_vec(vec![0.0, 2.0]);
        let r = solve_constrained_l1(&y_mat, &y, 0.5, &opts()).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
    }

    #[test]
    fn constrained_rejects_negative_tau() {
        let (y_mat, y, _) = constrained_fixture_i2();
        assert!(matches!(
            solve_constrained_l1(&y_mat, &y, -0.1, &opts()),
            Err(SolverError::InvalidParameter { .. })
        ));
    }

    #[test]
    fn constrained_tau_zero_matches_equality_route() {
        let x_mat = DMatrix::from_column_slice(2, 3, &[1.0, 0.0, 0.0, 1.0, 0.6, 0.8]);
        let x = DVector::from_vec(vec![0.6, 0.8]);
        let via_tau = solve_constrained_l1(&x_mat, &x, 0.0, &opts()).unwrap();
        let direct = solve_equality_l1(&x_mat, &x, &opts()).unwrap();
        assert_eq!(via_tau.status, direct.status);
        assert_eq!(via_tau.objective, direct.objective);
        assert_eq!(via_tau.coefficients, direct.coefficients);
    }

    #[test]
    fn equality_identity_reproduces_target() {
        let x_mat = DMatrix::identity(3, 3);
        let x = DVector::from_vec(vec![0.3, -1.2, 2.0]);
        let r = solve_equality_l1(&x_mat, &x, &opts()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((&r.coefficients - &x).norm() < 1e-8);
        assert!(r.residual_norm <= 1e-8 * (1.0 + x.norm()));
    }

    #[test]
    fn equality_duplicated_atom_objective_one() {
        let x_mat = DMatrix::from_column_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]);
        let x = DVector::from_vec(vec![1.0, 0.0]);
        let r = solve_equality_l1(&x_mat, &x, &opts()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective - 1.0).abs() < 1e-8, "objective {}", r.objective);
    }

    #[test]
    fn equality_three_directions_objective_two_over_sqrt3() {
        // Atoms at 0°, 60°, 120°; target at 30° sits between the first two,
        // and the best split costs 2/√3.
        let t60 = 60f64.to_radians();
        let t120 = 120f64.to_radians();
        let x_mat = DMatrix::from_column_slice(
            2,
            3,
            &[1.0, 0.0, t60.cos(), t60.sin(), t120.cos(), t120.sin()],
        );
        let t30 = 30f64.to_radians();
        let x = DVector::from_vec(vec![t30.cos(), t30.sin()]);
        let r = solve_equality_l1(&x_mat, &x, &opts()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        let expected = 2.0 / 3f64.sqrt();
        assert!(
            (r.objective - expected).abs() < 1e-8,
            "objective {} vs {}",
            r.objective,
            expected
        );
        assert!(r.residual_norm <= 1e-8 * (1.0 + 1.0));
    }

    #[test]
    fn equality_out_of_range_is_infeasible() {
        let x_mat = DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0]);
        let x = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        let r = solve_equality_l1(&x_mat, &x, &opts()).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
    }

    #[test]
    fn lasso_large_lambda_returns_zero() {
        let y_mat = DMatrix::from_column_slice(2, 3, &[1.0, 0.0, 0.5, 0.5, -0.3, 0.4]);
        let y = DVector::from_vec(vec![1.0, -2.0]);
        let lambda = (y_mat.transpose() * &y).amax() + 0.1;
        let r = solve_lasso(&y_mat, &y, lambda, &opts()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!(r.coefficients.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn lasso_identity_is_soft_thresholding() {
        let y_mat = DMatrix::identity(3, 3);
        let y = DVector::from_vec(vec![1.5, -0.2, 0.7]);
        let lambda = 0.5;
        let r = solve_lasso(&y_mat, &y, lambda, &opts()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        let expected = [1.0, 0.0, 0.2];
        for (got, want) in r.coefficients.iter().zip(expected) {
            assert!((got - want).abs() < 1e-6, "got {got}, want {want}");
        }
    }

    #[test]
    fn lasso_wide_row_satisfies_stationarity() {
        let y_mat = DMatrix::from_column_slice(1, 2, &[1.0, 1.0]);
        let y = DVector::from_vec(vec![3.0]);
        let lambda = 1.0;
        let r = solve_lasso(&y_mat, &y, lambda, &opts()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        // Any optimum has c₁ + c₂ = 2, composite objective 1·2 + ½·1².
        let composite = lambda * r.objective + 0.5 * r.residual_norm.powi(2);
        assert!((composite - 2.5).abs() < 1e-6, "composite {composite}");
        let grad = y_mat.transpose() * (&y - &y_mat * &r.coefficients);
        assert!(grad.amax() <= lambda + 1e-6);
        for j in 0..2 {
            let cj = r.coefficients[j];
            if cj != 0.0 {
                assert!((grad[j] - lambda * cj.signum()).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn certify_detects_perturbation() {
        let (y_mat, y, tau) = constrained_fixture_i2();
        let mut r = solve_constrained_l1(&y_mat, &y, tau, &opts()).unwrap();
        let problem = Problem::Constrained {
            dictionary: &y_mat,
            target: &y,
            tau,
        };
        let base = certify(&problem, &r);
        r.coefficients[1] += 0.1;
        let perturbed = certify(&problem, &r);
        assert!(perturbed > base + 0.09, "perturbed gap {perturbed}");
    }

    #[test]
    fn objective_monotone_in_tau() {
        let y_mat = DMatrix::from_column_slice(
            3,
            5,
            &[
                0.9, 0.1, -0.2, 0.3, 0.8, -0.1, -0.5, 0.4, 0.7, 0.2, 0.6, -0.6, 0.1, 0.3, 0.9,
            ],
        );
        let y = DVector::from_vec(vec![1.0, 0.5, -0.3]);
        let taus = [0.05, 0.1, 0.2, 0.4, 0.8];
        let mut prev = f64::INFINITY;
        for &tau in &taus {
            let r = solve_constrained_l1(&y_mat, &y, tau, &opts()).unwrap();
            assert_eq!(r.status, SolveStatus::Optimal, "tau = {tau}");
            assert!(
                prev >= r.objective - 1e-8,
                "objective rose from {prev} to {} as tau grew to {tau}",
                r.objective
            );
            prev = r.objective;
        }
    }

    #[test]
    fn constrained_scaling_invariance() {
        let y_mat = DMatrix::from_column_slice(
            3,
            6,
            &[
                0.9, 0.1, -0.2, 0.3, 0.8, -0.1, -0.5, 0.4, 0.7, 0.2, 0.6, -0.6, 0.1, 0.3, 0.9,
                -0.4, 0.2, 0.5,
            ],
        );
        let y = DVector::from_vec(vec![1.0, 0.5, -0.3]);
        let tau = 0.2;
        let base = solve_constrained_l1(&y_mat, &y, tau, &opts()).unwrap();
        for s in [0.5f64, 4.0, 3.0] {
            let r = solve_constrained_l1(&y_mat, &(&y * s), s * tau, &opts()).unwrap();
            assert!(
                (r.objective - s * base.objective).abs() < 1e-8,
                "s = {s}: {} vs {}",
                r.objective,
                s * base.objective
            );
        }
    }

    #[test]
    fn identical_runs_are_bitwise_equal() {
        let y_mat = DMatrix::from_column_slice(2, 4, &[1.0, 0.2, -0.3, 0.9, 0.5, 0.5, 0.7, -0.7]);
        let y = DVector::from_vec(vec![0.8, -0.6]);
        let a = solve_constrained_l1(&y_mat, &y, 0.1, &opts()).unwrap();
        let b = solve_constrained_l1(&y_mat, &y, 0.1, &opts()).unwrap();
        assert_eq!(a.coefficients, b.coefficients);
        assert_eq!(a.duality_gap, b.duality_gap);
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn options_are_validated() {
        let (y_mat, y, tau) = constrained_fixture_i2();
        let mut bad = opts();
        bad.max_iterations = 0;
        assert!(solve_constrained_l1(&y_mat, &y, tau, &bad).is_err());
        let mut bad = opts();
        bad.gap_tol = 0.0;
        assert!(solve_constrained_l1(&y_mat, &y, tau, &bad).is_err());
        let mut bad = opts();
        bad.over_relaxation = 2.0;
        assert!(solve_constrained_l1(&y_mat, &y, tau, &bad).is_err());
    }

    #[test]
    fn dimension_and_finiteness_checks() {
        let y_mat = DMatrix::identity(2, 2);
        let y3 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        assert!(matches!(
            solve_constrained_l1(&y_mat, &y3, 0.1, &opts()),
            Err(SolverError::DimensionMismatch { .. })
        ));
        let y_nan = DVector::from_vec(vec![f64::NAN, 0.0]);
        assert!(matches!(
            solve_constrained_l1(&y_mat, &y_nan, 0.1, &opts()),
            Err(SolverError::NonFinite { .. })
        ));
        assert!(matches!(
            solve_lasso(&y_mat, &DVector::from_vec(vec![1.0, 0.0]), 0.0, &opts()),
            Err(SolverError::InvalidParameter { .. })
        ));
    }

    #[test]
    fn objective_matches_l1_of_coefficients() {
        let y_mat = DMatrix::from_column_slice(2, 4, &[1.0, 0.2, -0.3, 0.9, 0.5, 0.5, 0.7, -0.7]);
        let y = DVector::from_vec(vec![0.8, -0.6]);
        for r in [
            solve_constrained_l1(&y_mat, &y, 0.1, &opts()).unwrap(),
            solve_lasso(&y_mat, &y, 0.3, &opts()).unwrap(),
        ] {
            assert!((r.objective - l1_norm(&r.coefficients)).abs() <= 1e-12);
        }
    }
}
