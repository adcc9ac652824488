//! Support-function LPs over the polar polytope `{w : |aⱼᵀw| ≤ 1}`.
//!
//! `support_value` maximizes `±wₖ` over the polar of the symmetrized point
//! set, which is exactly the k-th coordinate extent the box lower bound
//! needs. The LP is tiny (d free variables, 2N inequality rows) and the
//! slack basis is feasible from the start (every right-hand side is 1), so a
//! single-phase dense primal simplex with Bland's rule suffices: no Big-M, no
//! phase one, guaranteed termination.

use nalgebra::DMatrix;

const REDUCED_COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;
/// Hard cap on simplex pivots. These LPs have at most a few hundred rows; if
/// the cap is ever hit something is numerically wrong and we fall back to the
/// conservative answer (unbounded ⇒ inradius lower bound 0).
const MAX_PIVOTS: usize = 50_000;

pub(super) enum BoxLp {
    Bounded(f64),
    Unbounded,
}

/// Maximize `sign * w[axis]` subject to `|aⱼᵀw| ≤ 1` for every column `aⱼ`
/// of `atoms` (d×N, in-subspace coordinates).
///
/// Free variables are split as `w = u − v`; one slack per inequality row.
pub(super) fn support_value(atoms: &DMatrix<f64>, axis: usize, sign: f64) -> BoxLp {
    let d = atoms.nrows();
    let n_atoms = atoms.ncols();
    let rows = 2 * n_atoms;
    let structural = 2 * d;
    let cols = structural + rows; // u, v, slacks

    // Tableau: `rows` constraint rows over `cols` variables plus an RHS
    // column, and a reduced-cost row kept in sync by the pivots.
    let mut tab = DMatrix::<f64>::zeros(rows, cols + 1);
    for j in 0..n_atoms {
        for k in 0..d {
            let a = atoms[(k, j)];
            tab[(j, k)] = a; //  aⱼᵀ(u−v) ≤ 1
            tab[(j, d + k)] = -a;
            tab[(n_atoms + j, k)] = -a; // −aⱼᵀ(u−v) ≤ 1
            tab[(n_atoms + j, d + k)] = a;
        }
        tab[(j, structural + j)] = 1.0;
        tab[(n_atoms + j, structural + n_atoms + j)] = 1.0;
        tab[(j, cols)] = 1.0;
        tab[(n_atoms + j, cols)] = 1.0;
    }

    // Maximize sign·w[axis] = sign·u[axis] − sign·v[axis].
    let mut cost = vec![0.0; cols];
    cost[axis] = sign;
    cost[d + axis] = -sign;

    // Reduced-cost row for the all-slack basis (slack costs are zero, so the
    // initial reduced costs are simply the objective coefficients).
    let mut reduced = cost.clone();
    let mut objective = 0.0;
    let mut basis: Vec<usize> = (structural..cols).collect();

    for _pivot in 0..MAX_PIVOTS {
        // Bland's rule: entering variable is the lowest index with a
        // positive reduced cost.
        let Some(enter) = (0..cols).find(|&j| reduced[j] > REDUCED_COST_TOL) else {
            return BoxLp::Bounded(objective);
        };

        // Ratio test; Bland tie-break on the smallest basis variable index.
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..rows {
            let coef = tab[(i, enter)];
            if coef > PIVOT_TOL {
                let ratio = tab[(i, cols)] / coef;
                let better = match leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - PIVOT_TOL
                            || ((ratio - lr).abs() <= PIVOT_TOL && basis[i] < basis[li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((leave, _)) = leave else {
            return BoxLp::Unbounded;
        };

        // Pivot on (leave, enter).
        let pivot = tab[(leave, enter)];
        for c in 0..=cols {
            tab[(leave, c)] /= pivot;
        }
        for r in 0..rows {
            if r != leave {
                let factor = tab[(r, enter)];
                if factor != 0.0 {
                    for c in 0..=cols {
                        tab[(r, c)] -= factor * tab[(leave, c)];
                    }
                }
            }
        }
        let factor = reduced[enter];
        for c in 0..cols {
            reduced[c] -= factor * tab[(leave, c)];
        }
        objective += factor * tab[(leave, cols)];
        basis[leave] = enter;
    }

    // Pivot cap hit: treat as unbounded so the caller degrades to the safe
    // lower bound instead of trusting a possibly-unfinished optimum.
    BoxLp::Unbounded
}
