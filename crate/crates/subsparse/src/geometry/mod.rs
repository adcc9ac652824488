//! Subspaces and the geometric quantities that control recovery quality.
//!
//! A [`Subspace`] is an orthonormal basis of a linear subspace of ℝⁿ. On top
//! of it this module computes:
//!
//! * principal angles between two subspaces (via the SVD of the cross-Gram
//!   matrix of their bases),
//! * the incoherence of a subspace with a set of foreign points — the largest
//!   norm of a foreign point's orthogonal projection onto the subspace,
//! * the inradius of the symmetrized convex hull of unit points inside the
//!   subspace (see [`inradius`]), and
//! * a per-subspace recovery margin `inradius.lower − (incoherence + ε)`
//!   collected into a [`GeometryReport`].

mod boxlp;
// The module shares its name with the `inradius` function below; modules and
// functions live in different namespaces, and only the function is re-exported
// from the crate root.
mod inradius;

pub use self::inradius::{support_at, GridOptions, InradiusBracket, InradiusMethod, MethodSpec};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::ThinSvd;

/// Orthonormality defect allowed in a stored basis (‖QᵀQ − I‖∞).
pub const ORTHONORMALITY_TOL: f64 = 1e-12;
/// Smallest singular value below which an input basis is rank deficient.
const RANK_TOL: f64 = 1e-10;
/// Distance within which a point must lie in a subspace's span.
const SPAN_TOL: f64 = 1e-9;
/// Allowed deviation of a point's norm from 1.
const UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("input matrix is rank deficient (smallest singular value {sigma_min:.3e} <= {RANK_TOL:.0e})")]
    RankDeficient { sigma_min: f64 },
    #[error("dimension mismatch: {detail}")]
    DimensionMismatch { detail: String },
    #[error("empty input: {detail}")]
    EmptyInput { detail: &'static str },
    #[error("column {col} does not lie in the subspace (distance {distance:.3e} > {SPAN_TOL:.0e})")]
    PointsOutsideSubspace { col: usize, distance: f64 },
    #[error("column {col} is not unit norm (norm {norm} deviates by more than {UNIT_TOL:.0e})")]
    NotUnitNorm { col: usize, norm: f64 },
    #[error("method unavailable for subspace dimension {dim}: {detail}")]
    MethodUnavailable { dim: usize, detail: &'static str },
    #[error("basis is not orthonormal (defect {defect:.3e} > {ORTHONORMALITY_TOL:.0e})")]
    NotOrthonormal { defect: f64 },
}

/// A linear subspace of ℝⁿ stored as an orthonormal basis (n×d, columns).
///
/// Construction goes through [`orthonormalize`] or [`Subspace::from_orthonormal`],
/// both of which enforce the orthonormality invariant, so a `Subspace` in
/// hand is always safe to project with.
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient_dim: usize,
    dim: usize,
    basis: DMatrix<f64>,
}

impl Subspace {
    /// Wrap an already-orthonormal basis, verifying ‖QᵀQ − I‖∞ ≤ 1e-12.
    pub fn from_orthonormal(basis: DMatrix<f64>) -> Result<Self, GeometryError> {
        if basis.ncols() == 0 || basis.nrows() == 0 {
            return Err(GeometryError::EmptyInput {
                detail: "basis must have at least one row and one column",
            });
        }
        if basis.ncols() > basis.nrows() {
            return Err(GeometryError::DimensionMismatch {
                detail: format!(
                    "basis has {} columns but only {} rows",
                    basis.ncols(),
                    basis.nrows()
                ),
            });
        }
        let gram = basis.transpose() * &basis;
        let mut defect = 0.0f64;
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((gram[(i, j)] - target).abs());
            }
        }
        if defect > ORTHONORMALITY_TOL {
            return Err(GeometryError::NotOrthonormal { defect });
        }
        Ok(Subspace {
            ambient_dim: basis.nrows(),
            dim: basis.ncols(),
            basis,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Orthogonal projection of `v` onto the subspace.
    pub fn project(&self, v: &DVector<f64>) -> Result<DVector<f64>, GeometryError> {
        if v.len() != self.ambient_dim {
            return Err(GeometryError::DimensionMismatch {
                detail: format!(
                    "vector has length {} but the ambient dimension is {}",
                    v.len(),
                    self.ambient_dim
                ),
            });
        }
        Ok(&self.basis * (self.basis.transpose() * v))
    }

    /// Coordinates of `v` in the basis (Qᵀv). The caller is responsible for
    /// `v` actually lying in the subspace when that matters.
    pub fn coords(&self, v: &DVector<f64>) -> DVector<f64> {
        self.basis.transpose() * v
    }

    /// Map subspace coordinates back to the ambient space.
    pub fn embed(&self, coords: &DVector<f64>) -> DVector<f64> {
        &self.basis * coords
    }

    /// Distance from `v` to the subspace.
    pub fn distance(&self, v: &DVector<f64>) -> Result<f64, GeometryError> {
        let p = self.project(v)?;
        Ok((v - p).norm())
    }
}

/// Build a [`Subspace`] from a (possibly non-orthonormal) spanning matrix via
/// Householder QR. Errors with `RankDeficient` when the smallest singular
/// value of the input is at or below 1e-10.
pub fn orthonormalize(raw: &DMatrix<f64>) -> Result<Subspace, GeometryError> {
    if raw.ncols() == 0 || raw.nrows() == 0 {
        return Err(GeometryError::EmptyInput {
            detail: "spanning matrix must have at least one row and one column",
        });
    }
    if raw.ncols() > raw.nrows() {
        return Err(GeometryError::DimensionMismatch {
            detail: format!(
                "cannot span a {}-dimensional subspace of R^{}",
                raw.ncols(),
                raw.nrows()
            ),
        });
    }
    let sigma_min = ThinSvd::new(&raw).min_singular_value();
    if !(sigma_min > RANK_TOL) {
        return Err(GeometryError::RankDeficient { sigma_min });
    }
    let qr = raw.clone().qr();
    let q = qr.q();
    Subspace::from_orthonormal(q)
}

/// Principal angles between two subspaces of the same ambient space, in
/// radians, sorted by nonincreasing cosine (smallest angle first). The list
/// has `min(dim1, dim2)` entries.
pub fn principal_angles(s1: &Subspace, s2: &Subspace) -> Result<Vec<f64>, GeometryError> {
    if s1.ambient_dim != s2.ambient_dim {
        return Err(GeometryError::DimensionMismatch {
            detail: format!(
                "ambient dimensions differ: {} vs {}",
                s1.ambient_dim, s2.ambient_dim
            ),
        });
    }
    let cross = s1.basis.transpose() * &s2.basis;
    let svd = ThinSvd::new(&cross);
    let mut cosines: Vec<f64> = svd.singular_values().iter().cloned().collect();
    cosines.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
    Ok(cosines
        .into_iter()
        .map(|c| c.clamp(0.0, 1.0).acos())
        .collect())
}

/// Incoherence of a subspace with a set of foreign points (columns of
/// `other_points`, ambient coordinates): the largest Euclidean norm of a
/// foreign point's projection onto the subspace. For unit-norm foreign
/// points the value lies in [0, 1] and is at most the cosine of the smallest
/// principal angle to any subspace containing them.
pub fn incoherence(s: &Subspace, other_points: &DMatrix<f64>) -> Result<f64, GeometryError> {
    if other_points.ncols() == 0 {
        return Err(GeometryError::EmptyInput {
            detail: "incoherence needs at least one foreign point",
        });
    }
    if other_points.nrows() != s.ambient_dim {
        return Err(GeometryError::DimensionMismatch {
            detail: format!(
                "points live in R^{} but the subspace's ambient space is R^{}",
                other_points.nrows(),
                s.ambient_dim
            ),
        });
    }
    // ‖proj_S(w)‖₂ = ‖Qᵀw‖₂ for an orthonormal basis Q.
    let coords = s.basis.transpose() * other_points;
    let mut mu = 0.0f64;
    for j in 0..coords.ncols() {
        mu = mu.max(coords.column(j).norm());
    }
    Ok(mu)
}

/// Inradius of the symmetrized convex hull of `points` (ambient coordinates,
/// columns) inside the subspace `s`.
///
/// Preconditions: every column lies in `span(s)` within 1e-9 and has unit
/// norm within 1e-9. When there are fewer points than `dim(s)`, or the
/// points fail to span the subspace, the hull is degenerate within the
/// subspace and the exact bracket `[0, 0]` is returned.
pub fn inradius(
    s: &Subspace,
    points: &DMatrix<f64>,
    method: &MethodSpec,
) -> Result<InradiusBracket, GeometryError> {
    if points.ncols() == 0 {
        return Err(GeometryError::EmptyInput {
            detail: "inradius needs at least one point",
        });
    }
    if points.nrows() != s.ambient_dim {
        return Err(GeometryError::DimensionMismatch {
            detail: format!(
                "points live in R^{} but the subspace's ambient space is R^{}",
                points.nrows(),
                s.ambient_dim
            ),
        });
    }
    if matches!(method, MethodSpec::Exact) && s.dim > 3 {
        return Err(GeometryError::MethodUnavailable {
            dim: s.dim,
            detail: "exact vertex enumeration is implemented for subspace dimension <= 3",
        });
    }
    for j in 0..points.ncols() {
        let col = DVector::from_column_slice(points.column(j).as_slice());
        let norm = col.norm();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(GeometryError::NotUnitNorm { col: j, norm });
        }
        let distance = s.distance(&col)?;
        if distance > SPAN_TOL {
            return Err(GeometryError::PointsOutsideSubspace { col: j, distance });
        }
    }

    let resolved = self::inradius::resolved_method(method, s.dim);
    if points.ncols() < s.dim {
        return Ok(self::inradius::degenerate(resolved));
    }
    // Atoms in subspace coordinates.
    let atoms = s.basis.transpose() * points;
    let sigma_min = ThinSvd::new(&atoms).min_singular_value();
    if !(sigma_min > RANK_TOL) {
        return Ok(self::inradius::degenerate(resolved));
    }
    self::inradius::bracket(&atoms, method)
}

/// Geometry of one subspace within a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspaceGeometry {
    pub inradius: InradiusBracket,
    pub incoherence: f64,
    /// `inradius.lower − (incoherence + ε)`; recovery bounds require it
    /// positive.
    pub margin: f64,
}

/// Per-subspace recovery geometry plus the pairwise smallest principal
/// angles, as produced by [`recovery_margin`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometryReport {
    pub subspaces: Vec<SubspaceGeometry>,
    /// L×L symmetric matrix of the smallest principal angle between each pair
    /// of subspaces, radians; the diagonal is zero.
    pub min_principal_angles: Vec<Vec<f64>>,
    /// The ε the margins were computed with.
    pub noise_level: f64,
}

/// Compute the full geometry report for a union of subspaces.
///
/// `points[i]` holds the noise-free unit points of subspace `i` (ambient
/// coordinates, columns). With a single subspace the incoherence is zero by
/// convention.
pub fn recovery_margin(
    subspaces: &[Subspace],
    points: &[DMatrix<f64>],
    epsilon: f64,
    method: &MethodSpec,
) -> Result<GeometryReport, GeometryError> {
    if subspaces.is_empty() {
        return Err(GeometryError::EmptyInput {
            detail: "at least one subspace is required",
        });
    }
    if subspaces.len() != points.len() {
        return Err(GeometryError::DimensionMismatch {
            detail: format!(
                "{} subspaces but {} point blocks",
                subspaces.len(),
                points.len()
            ),
        });
    }
    let l = subspaces.len();
    let ambient = subspaces[0].ambient_dim;
    for s in subspaces {
        if s.ambient_dim != ambient {
            return Err(GeometryError::DimensionMismatch {
                detail: "subspaces live in different ambient spaces".to_string(),
            });
        }
    }

    let mut per = Vec::with_capacity(l);
    for i in 0..l {
        let bracket = inradius(&subspaces[i], &points[i], method)?;
        let mu = if l == 1 {
            0.0
        } else {
            let foreign_cols: usize = (0..l).filter(|&j| j != i).map(|j| points[j].ncols()).sum();
            let mut foreign = DMatrix::<f64>::zeros(ambient, foreign_cols);
            let mut at = 0;
            for j in 0..l {
                if j == i {
                    continue;
                }
                foreign
                    .columns_mut(at, points[j].ncols())
                    .copy_from(&points[j]);
                at += points[j].ncols();
            }
            incoherence(&subspaces[i], &foreign)?
        };
        per.push(SubspaceGeometry {
            inradius: bracket,
            incoherence: mu,
            margin: bracket.lower - (mu + epsilon),
        });
    }

    let mut angles = vec![vec![0.0; l]; l];
    for i in 0..l {
        for j in (i + 1)..l {
            let theta = principal_angles(&subspaces[i], &subspaces[j])?[0];
            angles[i][j] = theta;
            angles[j][i] = theta;
        }
    }

    Ok(GeometryReport {
        subspaces: per,
        min_principal_angles: angles,
        noise_level: epsilon,
    })
}
