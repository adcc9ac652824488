//! Shared test oracles, all implemented independently of the library's
//! solver and geometry internals so agreement is evidence, not tautology.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subsparse::Subspace;

/// Exact optimum of `min ||c||_1 s.t. Yc = x` by enumerating candidate
/// supports. Every basic optimal solution of the LP reformulation uses a
/// set of linearly independent columns, so trying all such subsets up to
/// size min(n, N) finds the optimum exactly. Returns None when no subset
/// reproduces `x` (the program is infeasible).
///
/// Exponential in N — keep N at desk scale (N <= 14 or so).
pub fn equality_l1_oracle(dictionary: &DMatrix<f64>, target: &DVector<f64>) -> Option<f64> {
    let n = dictionary.nrows();
    let big_n = dictionary.ncols();
    assert!(big_n <= 20, "oracle is exponential in the column count");
    let scale = 1.0 + target.norm();
    if target.norm() == 0.0 {
        return Some(0.0);
    }
    let mut best: Option<f64> = None;
    let kmax = n.min(big_n);
    // Iterate bitmasks of column subsets, skipping sizes above kmax.
    for mask in 1u32..(1u32 << big_n) {
        let k = mask.count_ones() as usize;
        if k > kmax {
            continue;
        }
        let cols: Vec<usize> = (0..big_n).filter(|j| mask & (1 << j) != 0).collect();
        let mut a = DMatrix::zeros(n, k);
        for (slot, &j) in cols.iter().enumerate() {
            a.set_column(slot, &dictionary.column(j));
        }
        // Least squares via normal equations with a Cholesky; a failed or
        // ill-conditioned factorization means dependent columns — skip, a
        // smaller subset covers that span.
        let gram = a.transpose() * &a;
        let rhs = a.transpose() * target;
        let chol = match gram.cholesky() {
            Some(c) => c,
            None => continue,
        };
        let c = chol.solve(&rhs);
        if (&a * &c - target).norm() > 1e-9 * scale {
            continue;
        }
        let l1: f64 = c.iter().map(|v| v.abs()).sum();
        if best.map_or(true, |b| l1 < b) {
            best = Some(l1);
        }
    }
    best
}

/// Independently recompute the duality gap of a constrained-program result:
/// `gap = ||c||_1 - (nu' y - tau ||nu||_2)` after scaling `nu` into the dual
/// feasible set `||Y' nu||_inf <= 1`. A small gap proves near-optimality of
/// the primal, regardless of how the solver found it.
pub fn constrained_gap_oracle(
    dictionary: &DMatrix<f64>,
    target: &DVector<f64>,
    tau: f64,
    coefficients: &DVector<f64>,
    dual: &DVector<f64>,
) -> f64 {
    let primal: f64 = coefficients.iter().map(|v| v.abs()).sum();
    let correlations = dictionary.transpose() * dual;
    let inf_norm = correlations.amax();
    let nu = if inf_norm > 1.0 {
        dual / inf_norm
    } else {
        dual.clone()
    };
    let dual_value = nu.dot(target) - tau * nu.norm();
    primal - dual_value.max(0.0)
}

/// Same for the equality program: `gap = ||c||_1 - nu' y` with the same
/// dual-feasibility scaling.
pub fn equality_gap_oracle(
    dictionary: &DMatrix<f64>,
    target: &DVector<f64>,
    coefficients: &DVector<f64>,
    dual: &DVector<f64>,
) -> f64 {
    constrained_gap_oracle(dictionary, target, 0.0, coefficients, dual)
}

/// Inradius oracle for 2-dimensional subspaces: with unit points at plane
/// angles theta_j, the inradius of the symmetrized polygon is
/// `min_phi max_j |cos(phi - theta_j)|`. A dense grid plus local
/// refinement resolves it far below 1e-8.
pub fn inradius_grid_oracle_d2(s: &Subspace, points: &DMatrix<f64>) -> f64 {
    assert_eq!(s.dim(), 2, "the grid oracle is planar");
    let thetas: Vec<f64> = (0..points.ncols())
        .map(|j| {
            let p = points.column(j).into_owned();
            let coords = s.basis().transpose() * &p;
            coords[1].atan2(coords[0])
        })
        .collect();
    let radius_at = |phi: f64| -> f64 {
        thetas
            .iter()
            .map(|t| (phi - t).cos().abs())
            .fold(0.0f64, f64::max)
    };
    // Coarse scan over a half-turn (the function has period pi).
    let steps = 20_000;
    let mut best_phi = 0.0;
    let mut best = f64::INFINITY;
    for i in 0..steps {
        let phi = std::f64::consts::PI * i as f64 / steps as f64;
        let r = radius_at(phi);
        if r < best {
            best = r;
            best_phi = phi;
        }
    }
    // Ternary-style refinement around the coarse winner.
    let mut lo = best_phi - std::f64::consts::PI / steps as f64;
    let mut hi = best_phi + std::f64::consts::PI / steps as f64;
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if radius_at(m1) <= radius_at(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    radius_at((lo + hi) / 2.0)
}

/// Deterministic dense Gaussian-ish matrix (uniform entries are fine for
/// test dictionaries; full row rank with probability 1).
pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

pub fn random_vector(len: usize, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DVector::from_fn(len, |_, _| rng.gen_range(-1.0..1.0))
}
