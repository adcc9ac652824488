//! Inradius of the symmetrized convex hull of unit points inside a subspace.
//!
//! Working in the subspace's own coordinates (atoms `aⱼ ∈ ℝ^d`, unit norm),
//! the quantity computed here is
//!
//! ```text
//! r = min_{‖v‖₂ = 1} max_j |vᵀaⱼ|
//! ```
//!
//! the radius of the largest ball centered at the origin inscribed in
//! `conv(±a₁, …, ±a_N)`. Equivalently `r = 1 / R(P°)` where `R(P°)` is the
//! circumradius of the polar polytope `P° = {w : |aⱼᵀw| ≤ 1}`; the exact
//! method enumerates the vertices of `P°` (practical for d ≤ 3), the grid
//! method certifies an upper bound by sampling directions `v`, and the box
//! LP certifies a lower bound from the coordinate extents of `P°`.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use super::boxlp::{support_value, BoxLp};
use super::GeometryError;

/// Which algorithm produced the bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InradiusMethod {
    ExactVertexEnum,
    GridRefine,
    LpBoxBound,
}

/// Two-sided enclosure of the inradius.
///
/// Invariants: `0 ≤ lower ≤ upper ≤ 1` for unit-norm points, and
/// `is_exact` implies `upper − lower ≤ 1e-9`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct InradiusBracket {
    pub lower: f64,
    pub upper: f64,
    pub method: InradiusMethod,
    pub is_exact: bool,
}

impl InradiusBracket {
    /// The value bound formulas should use when they want the exact inradius
    /// and must otherwise fall back to the certified lower bound.
    pub fn bound_value(&self) -> f64 {
        if self.is_exact {
            self.upper
        } else {
            self.lower
        }
    }
}

/// Grid search controls for [`MethodSpec::Grid`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridOptions {
    /// Directions per angular dimension for the initial scan.
    pub density: usize,
    /// Number of local refinement passes around the incumbent direction.
    pub passes: usize,
    /// Window shrink factor applied at each refinement pass.
    pub shrink: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        // 720 directions per angular dimension with three 10× refinements
        // resolves a d = 2 minimizer to ~1e-7 radians at negligible cost.
        GridOptions {
            density: 720,
            passes: 3,
            shrink: 10.0,
        }
    }
}

/// Method request for [`super::inradius`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum MethodSpec {
    /// Exact vertex enumeration when `d ≤ 3`, grid + box-LP bracket otherwise.
    Auto,
    /// Exact vertex enumeration; errors with `MethodUnavailable` for `d > 3`.
    Exact,
    /// Certified upper bound from a direction grid, lower bound from the box LP.
    Grid(GridOptions),
    /// Box-LP lower bound alone, paired with a cheap axis-direction upper bound.
    LpBox,
}

/// Width under which a bracket is reported as exact.
const EXACT_TOL: f64 = 1e-9;
/// Feasibility slack when screening polar vertex candidates.
const VERTEX_FEAS_TOL: f64 = 1e-9;
/// Pivot/determinant threshold for degenerate constraint intersections.
const DEGENERATE_TOL: f64 = 1e-12;
/// Safety shave applied to the LP lower bound so floating-point rounding in
/// the simplex can never push it above the true inradius.
const LOWER_SAFETY: f64 = 1e-10;
/// Cap on the total number of initial grid points (density is reduced per
/// axis in higher dimensions to stay under it).
const GRID_BUDGET: usize = 2_000_000;

/// Dispatch on the requested method. `atoms` are unit columns in subspace
/// coordinates and are already known to span ℝ^d (degenerate inputs are
/// resolved to an exact zero bracket by the caller).
pub(super) fn bracket(atoms: &DMatrix<f64>, spec: &MethodSpec) -> Result<InradiusBracket, GeometryError> {
    let d = atoms.nrows();
    match spec {
        MethodSpec::Auto => {
            if d <= 3 {
                Ok(exact_bracket(atoms))
            } else {
                Ok(grid_bracket(atoms, &GridOptions::default()))
            }
        }
        MethodSpec::Exact => {
            if d <= 3 {
                Ok(exact_bracket(atoms))
            } else {
                Err(GeometryError::MethodUnavailable {
                    dim: d,
                    detail: "exact vertex enumeration is implemented for subspace dimension <= 3",
                })
            }
        }
        MethodSpec::Grid(opts) => Ok(grid_bracket(atoms, opts)),
        MethodSpec::LpBox => Ok(lp_bracket(atoms)),
    }
}

pub(super) fn degenerate(method: InradiusMethod) -> InradiusBracket {
    InradiusBracket {
        lower: 0.0,
        upper: 0.0,
        method,
        is_exact: true,
    }
}

pub(super) fn resolved_method(spec: &MethodSpec, d: usize) -> InradiusMethod {
    match spec {
        MethodSpec::Auto => {
            if d <= 3 {
                InradiusMethod::ExactVertexEnum
            } else {
                InradiusMethod::GridRefine
            }
        }
        MethodSpec::Exact => InradiusMethod::ExactVertexEnum,
        MethodSpec::Grid(_) => InradiusMethod::GridRefine,
        MethodSpec::LpBox => InradiusMethod::LpBoxBound,
    }
}

// ---------------------------------------------------------------------------
// Exact vertex enumeration (d ≤ 3)
// ---------------------------------------------------------------------------

fn exact_bracket(atoms: &DMatrix<f64>) -> InradiusBracket {
    let r = match atoms.nrows() {
        1 => atoms.iter().fold(0.0f64, |m, a| m.max(a.abs())),
        2 => exact_d2(atoms),
        3 => exact_d3(atoms),
        _ => unreachable!("exact method is gated to d <= 3"),
    };
    InradiusBracket {
        lower: r,
        upper: r,
        method: InradiusMethod::ExactVertexEnum,
        is_exact: true,
    }
}

/// Circumradius of `{w : |aⱼᵀw| ≤ 1}` via enumeration of its vertices: every
/// vertex solves `aᵢᵀw = ±1, aⱼᵀw = ±1` for an independent pair. One sign may
/// be fixed by central symmetry.
fn exact_d2(atoms: &DMatrix<f64>) -> f64 {
    let n = atoms.ncols();
    let mut max_sq = 0.0f64;
    for i in 0..n {
        let ai = Vector2::new(atoms[(0, i)], atoms[(1, i)]);
        for j in (i + 1)..n {
            let aj = Vector2::new(atoms[(0, j)], atoms[(1, j)]);
            for sign in [1.0, -1.0] {
                let m = Matrix2::new(ai.x, ai.y, sign * aj.x, sign * aj.y);
                let det = m.determinant();
                if det.abs() <= DEGENERATE_TOL {
                    continue;
                }
                let w = m
                    .try_inverse()
                    .map(|inv| inv * Vector2::new(1.0, 1.0))
                    .unwrap_or_else(Vector2::zeros);
                if polar_feasible(atoms, &[w.x, w.y]) {
                    max_sq = max_sq.max(w.norm_squared());
                }
            }
        }
    }
    radius_from_circumradius_sq(max_sq)
}

fn exact_d3(atoms: &DMatrix<f64>) -> f64 {
    let n = atoms.ncols();
    let col = |j: usize| Vector3::new(atoms[(0, j)], atoms[(1, j)], atoms[(2, j)]);
    let mut max_sq = 0.0f64;
    for i in 0..n {
        let ai = col(i);
        for j in (i + 1)..n {
            let aj = col(j);
            for k in (j + 1)..n {
                let ak = col(k);
                for signs in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    let m = Matrix3::from_rows(&[
                        ai.transpose(),
                        (signs.0 * aj).transpose(),
                        (signs.1 * ak).transpose(),
                    ]);
                    if m.determinant().abs() <= DEGENERATE_TOL {
                        continue;
                    }
                    let Some(inv) = m.try_inverse() else { continue };
                    let w = inv * Vector3::new(1.0, 1.0, 1.0);
                    if polar_feasible(atoms, &[w.x, w.y, w.z]) {
                        max_sq = max_sq.max(w.norm_squared());
                    }
                }
            }
        }
    }
    radius_from_circumradius_sq(max_sq)
}

fn polar_feasible(atoms: &DMatrix<f64>, w: &[f64]) -> bool {
    let d = atoms.nrows();
    for j in 0..atoms.ncols() {
        let mut dot = 0.0;
        for k in 0..d {
            dot += atoms[(k, j)] * w[k];
        }
        if dot.abs() > 1.0 + VERTEX_FEAS_TOL {
            return false;
        }
    }
    true
}

fn radius_from_circumradius_sq(max_sq: f64) -> f64 {
    if max_sq <= 0.0 {
        // No vertex found: only possible when the atoms fail to span, which
        // the caller has already screened out. Report 0 defensively.
        0.0
    } else {
        1.0 / max_sq.sqrt()
    }
}

// ---------------------------------------------------------------------------
// Grid upper bound with local refinement
// ---------------------------------------------------------------------------

fn grid_bracket(atoms: &DMatrix<f64>, opts: &GridOptions) -> InradiusBracket {
    let upper = grid_upper(atoms, opts);
    let lower = lp_lower(atoms).min(upper);
    InradiusBracket {
        lower,
        upper,
        method: InradiusMethod::GridRefine,
        is_exact: upper - lower <= EXACT_TOL,
    }
}

/// `f(v) = max_j |vᵀaⱼ|` — every evaluation upper-bounds the inradius, so the
/// minimum over any sampled direction set is a certified upper bound.
fn evaluate(atoms: &DMatrix<f64>, v: &[f64]) -> f64 {
    let d = atoms.nrows();
    let mut best = 0.0f64;
    for j in 0..atoms.ncols() {
        let mut dot = 0.0;
        for k in 0..d {
            dot += atoms[(k, j)] * v[k];
        }
        best = best.max(dot.abs());
    }
    best
}

/// Hyperspherical parameterization: angles[0..d-2] ∈ [0, π) cover a closed
/// half sphere, which suffices because f(−v) = f(v).
fn sphere_point(angles: &[f64]) -> Vec<f64> {
    let d = angles.len() + 1;
    let mut v = vec![0.0; d];
    let mut sin_prod = 1.0;
    for (k, &t) in angles.iter().enumerate() {
        v[k] = sin_prod * t.cos();
        sin_prod *= t.sin();
    }
    v[d - 1] = sin_prod;
    v
}

fn grid_upper(atoms: &DMatrix<f64>, opts: &GridOptions) -> f64 {
    let d = atoms.nrows();
    if d == 1 {
        return atoms.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    }
    let axes = d - 1;
    let density = opts.density.max(4);
    // Keep the full product grid within budget in higher dimensions.
    let per_axis = {
        let mut m = density;
        while m > 4 && (m as f64).powi(axes as i32) > GRID_BUDGET as f64 {
            m -= m / 8 + 1;
        }
        m
    };

    let mut best_val = f64::INFINITY;
    let mut best_angles = vec![0.0; axes];

    // Initial scan over [0, π)^(d−1).
    let step = std::f64::consts::PI / per_axis as f64;
    let mut index = vec![0usize; axes];
    let mut angles = vec![0.0; axes];
    loop {
        for k in 0..axes {
            angles[k] = index[k] as f64 * step;
        }
        let val = evaluate(atoms, &sphere_point(&angles));
        if val < best_val {
            best_val = val;
            best_angles.copy_from_slice(&angles);
        }
        // Odometer increment.
        let mut k = 0;
        loop {
            index[k] += 1;
            if index[k] < per_axis {
                break;
            }
            index[k] = 0;
            k += 1;
            if k == axes {
                break;
            }
        }
        if k == axes {
            break;
        }
    }

    // Local refinement: rescan a shrinking window centered on the incumbent.
    // In d = 2 the window is swept at full density; in higher dimensions a
    // fixed per-axis count keeps the pass polynomial.
    let refine_per_axis = if axes == 1 { per_axis.max(64) } else { 25 };
    let mut half_width = step;
    for _ in 0..opts.passes {
        let mut improved_angles = best_angles.clone();
        let mut improved_val = best_val;
        let mut index = vec![0usize; axes];
        let local_step = 2.0 * half_width / refine_per_axis as f64;
        let mut angles = vec![0.0; axes];
        loop {
            for k in 0..axes {
                angles[k] = best_angles[k] - half_width + index[k] as f64 * local_step;
            }
            let val = evaluate(atoms, &sphere_point(&angles));
            if val < improved_val {
                improved_val = val;
                improved_angles.copy_from_slice(&angles);
            }
            let mut k = 0;
            loop {
                index[k] += 1;
                if index[k] <= refine_per_axis {
                    break;
                }
                index[k] = 0;
                k += 1;
                if k == axes {
                    break;
                }
            }
            if k == axes {
                break;
            }
        }
        best_val = improved_val;
        best_angles = improved_angles;
        half_width /= opts.shrink;
    }

    best_val
}

// ---------------------------------------------------------------------------
// Box-LP lower bound
// ---------------------------------------------------------------------------

/// Lower bound `r ≥ 1/(√d · R∞)` where `R∞` is the largest coordinate extent
/// of the polar polytope: the polar fits in the box `[−R∞, R∞]^d`, so its
/// circumradius is at most `√d · R∞`.
fn lp_lower(atoms: &DMatrix<f64>) -> f64 {
    let d = atoms.nrows();
    let mut r_inf = 0.0f64;
    for axis in 0..d {
        for sign in [1.0, -1.0] {
            match support_value(atoms, axis, sign) {
                BoxLp::Bounded(v) => r_inf = r_inf.max(v),
                BoxLp::Unbounded => return 0.0,
            }
        }
    }
    if r_inf <= 0.0 {
        return 0.0;
    }
    (1.0 - LOWER_SAFETY) / ((d as f64).sqrt() * r_inf)
}

fn lp_bracket(atoms: &DMatrix<f64>) -> InradiusBracket {
    let d = atoms.nrows();
    // Any unit direction certifies an upper bound; the coordinate axes are
    // free to evaluate.
    let mut upper = f64::INFINITY;
    for axis in 0..d {
        let mut v = vec![0.0; d];
        v[axis] = 1.0;
        upper = upper.min(evaluate(atoms, &v));
    }
    let lower = lp_lower(atoms).min(upper);
    InradiusBracket {
        lower,
        upper,
        method: InradiusMethod::LpBoxBound,
        is_exact: upper - lower <= EXACT_TOL,
    }
}

// ---------------------------------------------------------------------------

/// Convenience used by tests and the verify module: evaluate f at an
/// arbitrary direction (normalized internally).
pub fn support_at(atoms: &DMatrix<f64>, direction: &DVector<f64>) -> f64 {
    let n = direction.norm();
    if n == 0.0 {
        return 0.0;
    }
    let v: Vec<f64> = direction.iter().map(|x| x / n).collect();
    evaluate(atoms, &v)
}
