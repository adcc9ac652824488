//! Thin singular value decomposition via one-sided Jacobi iteration.
//!
//! `nalgebra`'s bidiagonalization SVD can return inconsistent factorizations
//! for exactly rank-deficient inputs: `U` comes back orthonormal and the
//! singular values look plausible, but `‖A − UΣVᵀ‖` lands many orders of
//! magnitude above roundoff and least-squares solves through it are wrong.
//! The solver leans on SVD solves against rank-deficient dictionaries and
//! their submatrices, so this module provides a one-sided Jacobi SVD:
//! slower than bidiagonalization, but unconditionally accurate on the small
//! dense matrices that appear here.

use nalgebra::{DMatrix, DVector};

/// Relative off-diagonal tolerance for Jacobi sweep convergence.
const SWEEP_TOL: f64 = 1e-14;
/// Safety cap on the number of sweeps; convergence is quadratic and
/// well-conditioned problems finish in well under ten.
const MAX_SWEEPS: usize = 60;

/// Thin SVD `A = U Σ Vᵀ` with `U: m×k`, `Σ: k`, `V: n×k`, `k = min(m, n)`,
/// singular values sorted in descending order.
pub(crate) struct ThinSvd {
    u: DMatrix<f64>,
    sigma: DVector<f64>,
    v: DMatrix<f64>,
}

impl ThinSvd {
    /// Factor `a`. Wide inputs are transposed internally, so accuracy is
    /// identical in both orientations.
    pub(crate) fn new(a: &DMatrix<f64>) -> Self {
        if a.nrows() >= a.ncols() {
            let (u, sigma, v) = factor_tall(a.clone());
            ThinSvd { u, sigma, v }
        } else {
            // A = (Aᵀ)ᵀ = (U Σ Vᵀ)ᵀ = V Σ Uᵀ.
            let (u, sigma, v) = factor_tall(a.transpose());
            ThinSvd { u: v, sigma, v: u }
        }
    }

    pub(crate) fn singular_values(&self) -> &DVector<f64> {
        &self.sigma
    }

    /// Largest singular value (0 for an empty matrix).
    pub(crate) fn max_singular_value(&self) -> f64 {
        if self.sigma.is_empty() {
            0.0
        } else {
            self.sigma[0]
        }
    }

    /// Smallest of the `min(m, n)` singular values (0 for an empty matrix).
    pub(crate) fn min_singular_value(&self) -> f64 {
        if self.sigma.is_empty() {
            0.0
        } else {
            self.sigma[self.sigma.len() - 1]
        }
    }

    /// Number of singular values strictly above `eps`.
    #[allow(dead_code)]
    pub(crate) fn rank(&self, eps: f64) -> usize {
        self.sigma.iter().filter(|&&s| s > eps).count()
    }

    /// Minimum-norm least-squares solution of `A x = b`: `x = V Σ⁺ Uᵀ b`,
    /// keeping only singular values strictly above `eps`.
    pub(crate) fn solve(&self, b: &DVector<f64>, eps: f64) -> DVector<f64> {
        let n = self.v.nrows();
        let mut x = DVector::zeros(n);
        for j in 0..self.sigma.len() {
            let s = self.sigma[j];
            if s > eps {
                let coef = self.u.column(j).dot(b) / s;
                x.axpy(coef, &self.v.column(j), 1.0);
            }
        }
        x
    }

    /// Reconstruct `U Σ Vᵀ` (used by tests and diagnostics).
    #[allow(dead_code)]
    pub(crate) fn reconstruct(&self) -> DMatrix<f64> {
        let mut scaled = self.u.clone();
        for j in 0..self.sigma.len() {
            scaled.column_mut(j).scale_mut(self.sigma[j]);
        }
        scaled * self.v.transpose()
    }
}

/// One-sided Jacobi on a tall (or square) matrix `w` (`m ≥ n`): orthogonal
/// column rotations accumulate into `v` until the columns of `w` are
/// mutually orthogonal; then `σ_j = ‖w_j‖` and `u_j = w_j / σ_j`.
fn factor_tall(mut w: DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let m = w.nrows();
    let n = w.ncols();
    debug_assert!(m >= n);
    let mut v = DMatrix::identity(n, n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let app = w.column(p).norm_squared();
                let aqq = w.column(q).norm_squared();
                let apq = w.column(p).dot(&w.column(q));
                if apq.abs() <= SWEEP_TOL * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                // Rotation angle that zeroes the (p, q) entry of the Gram
                // matrix (Hestenes / one-sided Jacobi update).
                let zeta = (aqq - app) / (2.0 * apq);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    w[(i, p)] = c * wp - s * wq;
                    w[(i, q)] = s * wp + c * wq;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; sort descending.
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));

    let mut u = DMatrix::zeros(m, n);
    let mut sigma = DVector::zeros(n);
    let mut v_sorted = DMatrix::zeros(n, n);
    for (slot, &j) in order.iter().enumerate() {
        sigma[slot] = norms[j];
        if norms[j] > 0.0 {
            let scaled = w.column(j) / norms[j];
            u.set_column(slot, &scaled);
        }
        v_sorted.set_column(slot, &v.column(j));
    }
    (u, sigma, v_sorted)
}
