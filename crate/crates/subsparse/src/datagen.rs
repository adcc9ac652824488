//! Deterministic, seeded synthesis of the union-of-subspaces data model.
//!
//! The model: `L` linear subspaces of ℝⁿ, `Nᵢ` unit-norm points drawn
//! uniformly from the sphere inside each, i.i.d. Gaussian noise with
//! per-entry standard deviation `ϵ/√n`, and an unknown permutation mixing
//! the blocks into the observed matrix `Y = X + Z`.
//!
//! Reproducibility contract: every generator is a pure function of
//! `(seed, parameters)`. Streams are derived as
//! `ChaCha8Rng::seed_from_u64(seed ^ STREAM_CONSTANT ^ (index · GOLDEN))`
//! so subspaces, points, noise, and the permutation never share a stream —
//! changing the noise level cannot change the clean points. Gaussians come
//! from an in-crate Box–Muller transform so the byte stream is fixed by this
//! crate alone, not by a dependency's sampling internals.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{orthonormalize, GeometryError, Subspace};

/// Stream labels, XOR-ed into the user seed (see module docs).
const SUBSPACE_STREAM: u64 = 0x5355_4253_5041_4345;
const POINTS_STREAM: u64 = 0x504F_494E_5453_5354;
const NOISE_STREAM: u64 = 0x4E4F_4953_4553_5452;
const PERMUTATION_STREAM: u64 = 0x5045_524D_5354_524D;
/// Odd multiplier decorrelating per-index streams (the 64-bit golden ratio).
/// Shared with the verification harness so its query/sample streams use the
/// same derivation scheme (with their own salts, so they never collide with
/// dataset streams).
pub(crate) const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error("dimension error: {detail}")]
    DimensionError { detail: String },
    #[error("invalid parameter: {detail}")]
    InvalidParameter { detail: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Noise magnitude convention: entries of Z are N(0, ϵ²/n), so a noise
/// column has expected norm ≈ ϵ; the working noise level the bounds use is
/// ε = ϵ(1 + ρ), which a noise column exceeds only with small probability.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(try_from = "RawNoiseParams")]
pub struct NoiseParams {
    epsilon_raw: f64,
    rho: f64,
    /// Cached `epsilon_raw * (1 + rho)`, exact by construction.
    epsilon: f64,
}

#[derive(Deserialize)]
struct RawNoiseParams {
    epsilon_raw: f64,
    rho: f64,
}

impl TryFrom<RawNoiseParams> for NoiseParams {
    type Error = DatagenError;
    fn try_from(raw: RawNoiseParams) -> Result<Self, Self::Error> {
        NoiseParams::new(raw.epsilon_raw, raw.rho)
    }
}

impl NoiseParams {
    /// `epsilon_raw` = ϵ (≥ 0), `rho` = ρ (≥ 0); ε is derived.
    pub fn new(epsilon_raw: f64, rho: f64) -> Result<Self, DatagenError> {
        if !(epsilon_raw >= 0.0 && epsilon_raw.is_finite()) {
            return Err(DatagenError::InvalidParameter {
                detail: format!("epsilon_raw must be a finite nonnegative real, got {epsilon_raw}"),
            });
        }
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(DatagenError::InvalidParameter {
                detail: format!("rho must be a finite nonnegative real, got {rho}"),
            });
        }
        Ok(NoiseParams {
            epsilon_raw,
            rho,
            epsilon: epsilon_raw * (1.0 + rho),
        })
    }

    /// ϵ — the raw noise scale (per-entry std is ϵ/√n).
    pub fn epsilon_raw(&self) -> f64 {
        self.epsilon_raw
    }

    /// ρ — the slack factor.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// ε = ϵ(1 + ρ) — the working noise level.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// A generated (or imported) dataset. `Y = X + Z` holds entrywise exactly;
/// `labels[j]` answers "which subspace does column j belong to" in O(1);
/// `permutation[j]` is the index of column j in the unobserved block
/// ordering `[X₁ … X_L]`.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub subspaces: Vec<Subspace>,
    /// Noise-free points, n×N.
    pub x: DMatrix<f64>,
    /// Noise, n×N.
    pub z: DMatrix<f64>,
    /// Observed data, n×N.
    pub y: DMatrix<f64>,
    /// Subspace index of each column (0-based).
    pub labels: Vec<usize>,
    /// Column j of `x` is column `permutation[j]` of the block-ordered
    /// matrix.
    pub permutation: Vec<usize>,
    pub noise: NoiseParams,
    pub seed: u64,
    /// True when the clean points were drawn uniformly from the unit sphere
    /// of their subspace (the model the probabilistic guarantees assume).
    pub uniform_points: bool,
}

impl Dataset {
    pub fn ambient_dim(&self) -> usize {
        self.x.nrows()
    }

    pub fn total_points(&self) -> usize {
        self.x.ncols()
    }

    pub fn num_subspaces(&self) -> usize {
        self.subspaces.len()
    }

    /// Nᵢ for each subspace.
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.subspaces.len()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Column indices belonging to subspace `i`, in column order.
    pub fn columns_of(&self, i: usize) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&j| self.labels[j] == i)
            .collect()
    }

    /// Xᵢ — the clean points of subspace `i`.
    pub fn clean_block(&self, i: usize) -> DMatrix<f64> {
        self.x.select_columns(self.columns_of(i).iter())
    }

    /// X₋ᵢ — the clean points of every other subspace.
    pub fn clean_excluding(&self, i: usize) -> DMatrix<f64> {
        let cols: Vec<usize> = (0..self.labels.len())
            .filter(|&j| self.labels[j] != i)
            .collect();
        self.x.select_columns(cols.iter())
    }

    /// Yᵢ — the noisy points of subspace `i`.
    pub fn noisy_block(&self, i: usize) -> DMatrix<f64> {
        self.y.select_columns(self.columns_of(i).iter())
    }

    /// Y₋ᵢ — the noisy points of every other subspace.
    pub fn noisy_excluding(&self, i: usize) -> DMatrix<f64> {
        let cols: Vec<usize> = (0..self.labels.len())
            .filter(|&j| self.labels[j] != i)
            .collect();
        self.y.select_columns(cols.iter())
    }

    /// Structural invariants: dimensions agree, labels are in range with at
    /// least one point per subspace, the permutation is a bijection
    /// consistent with the labels, `Y = X + Z` exactly, and (when
    /// `uniform_points`) the clean columns are unit vectors lying in their
    /// labeled subspace.
    pub fn validate(&self) -> Result<(), DatagenError> {
        let n = self.x.nrows();
        let total = self.x.ncols();
        let l = self.subspaces.len();
        if l == 0 {
            return Err(DatagenError::DimensionError {
                detail: "dataset has no subspaces".to_string(),
            });
        }
        for (mat, name) in [(&self.z, "Z"), (&self.y, "Y")] {
            if mat.nrows() != n || mat.ncols() != total {
                return Err(DatagenError::DimensionError {
                    detail: format!(
                        "{name} is {}x{} but X is {}x{}",
                        mat.nrows(),
                        mat.ncols(),
                        n,
                        total
                    ),
                });
            }
        }
        if self.labels.len() != total || self.permutation.len() != total {
            return Err(DatagenError::DimensionError {
                detail: "labels/permutation length differs from the number of columns".to_string(),
            });
        }
        for s in &self.subspaces {
            if s.ambient_dim() != n {
                return Err(DatagenError::DimensionError {
                    detail: "subspace ambient dimension differs from the data".to_string(),
                });
            }
        }
        let counts = {
            let mut counts = vec![0usize; l];
            for &lab in &self.labels {
                if lab >= l {
                    return Err(DatagenError::DimensionError {
                        detail: format!("label {lab} out of range (L = {l})"),
                    });
                }
                counts[lab] += 1;
            }
            counts
        };
        if counts.iter().any(|&c| c == 0) {
            return Err(DatagenError::DimensionError {
                detail: "some subspace has no points".to_string(),
            });
        }
        let mut seen = vec![false; total];
        for &p in &self.permutation {
            if p >= total || seen[p] {
                return Err(DatagenError::DimensionError {
                    detail: "permutation is not a bijection".to_string(),
                });
            }
            seen[p] = true;
        }
        // Block ordering consistency: block boundaries from the counts.
        let mut block_label = vec![0usize; total];
        let mut at = 0;
        for (i, &c) in counts.iter().enumerate() {
            for slot in block_label.iter_mut().skip(at).take(c) {
                *slot = i;
            }
            at += c;
        }
        for j in 0..total {
            if block_label[self.permutation[j]] != self.labels[j] {
                return Err(DatagenError::DimensionError {
                    detail: format!("permutation and labels disagree at column {j}"),
                });
            }
        }
        for j in 0..total {
            for i in 0..n {
                if self.y[(i, j)] != self.x[(i, j)] + self.z[(i, j)] {
                    return Err(DatagenError::DimensionError {
                        detail: format!("Y != X + Z at entry ({i}, {j})"),
                    });
                }
            }
        }
        if self.uniform_points {
            for j in 0..total {
                let col = DVector::from_column_slice(self.x.column(j).as_slice());
                if (col.norm() - 1.0).abs() > 1e-12 {
                    return Err(DatagenError::DimensionError {
                        detail: format!("clean column {j} is not unit norm"),
                    });
                }
                let dist = self.subspaces[self.labels[j]]
                    .distance(&col)
                    .map_err(DatagenError::from)?;
                if dist > 1e-12 {
                    return Err(DatagenError::DimensionError {
                        detail: format!("clean column {j} lies {dist:.2e} outside its subspace"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Everything needed to generate a [`Dataset`], in one value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetParams {
    /// Ambient dimension n.
    pub ambient_dim: usize,
    /// dᵢ per subspace.
    pub subspace_dims: Vec<usize>,
    /// Nᵢ per subspace.
    pub points_per_subspace: Vec<usize>,
    pub noise: NoiseParams,
    pub seed: u64,
    /// Requested smallest principal angle between a pair of subspaces
    /// (radians, in (0, π/2]); requires exactly two subspaces.
    pub min_angle: Option<f64>,
    /// Draw points uniformly on the unit sphere of each subspace (the
    /// model's convention). `false` skips normalization, for stress tests.
    pub uniform_points: bool,
}

impl DatasetParams {
    pub fn generate(&self) -> Result<Dataset, DatagenError> {
        let subspaces = gen_subspaces(
            self.ambient_dim,
            &self.subspace_dims,
            self.seed,
            self.min_angle,
        )?;
        if self.points_per_subspace.len() != subspaces.len() {
            return Err(DatagenError::DimensionError {
                detail: format!(
                    "{} point counts for {} subspaces",
                    self.points_per_subspace.len(),
                    subspaces.len()
                ),
            });
        }
        let mut points = Vec::with_capacity(subspaces.len());
        for (i, s) in subspaces.iter().enumerate() {
            let stream_seed = self.seed ^ (i as u64 + 1).wrapping_mul(GOLDEN);
            points.push(sample_sphere_points(
                s,
                self.points_per_subspace[i],
                stream_seed,
                self.uniform_points,
            )?);
        }
        assemble_with_flag(
            subspaces,
            &points,
            &self.noise,
            self.seed,
            self.uniform_points,
        )
    }
}

/// Deterministic Box–Muller Gaussian stream over a seeded ChaCha generator.
pub struct GaussStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussStream {
    pub fn new(rng: ChaCha8Rng) -> Self {
        GaussStream { rng, spare: None }
    }

    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        // u1 ∈ (0, 1] keeps the logarithm finite.
        let u1: f64 = 1.0 - self.rng.gen::<f64>();
        let u2: f64 = self.rng.gen();
        let radius = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(radius * theta.sin());
        radius * theta.cos()
    }
}

fn stream(seed: u64, label: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ label ^ index.wrapping_mul(GOLDEN))
}

/// Random subspaces of the given dimensions.
///
/// Without `angle_spec`, each basis is an orthonormalized Gaussian matrix
/// (rotation-invariant). With `angle_spec = θ` — exactly two subspaces
/// required, `d₁ + d₂ ≤ n` — the pair is built inside one random orthonormal
/// frame with all principal angles π/2 except the smallest, which is θ
/// exactly: the first direction of the second subspace is
/// `cos(θ)·q₀ + sin(θ)·q_⊥` for fresh orthogonal frame vectors.
pub fn gen_subspaces(
    n: usize,
    dims: &[usize],
    seed: u64,
    angle_spec: Option<f64>,
) -> Result<Vec<Subspace>, DatagenError> {
    if dims.is_empty() {
        return Err(DatagenError::DimensionError {
            detail: "at least one subspace dimension is required".to_string(),
        });
    }
    for &d in dims {
        if d == 0 || d > n {
            return Err(DatagenError::DimensionError {
                detail: format!("subspace dimension {d} is not in 1..={n}"),
            });
        }
    }
    match angle_spec {
        None => {
            let mut out = Vec::with_capacity(dims.len());
            for (i, &d) in dims.iter().enumerate() {
                let mut gauss = GaussStream::new(stream(seed, SUBSPACE_STREAM, i as u64));
                let raw = DMatrix::from_fn(n, d, |_, _| gauss.next_gaussian());
                out.push(orthonormalize(&raw)?);
            }
            Ok(out)
        }
        Some(theta) => {
            if dims.len() != 2 {
                return Err(DatagenError::DimensionError {
                    detail: format!(
                        "angle control requires exactly two subspaces, got {}",
                        dims.len()
                    ),
                });
            }
            let (d1, d2) = (dims[0], dims[1]);
            if d1 + d2 > n {
                return Err(DatagenError::DimensionError {
                    detail: format!(
                        "angle control needs d1 + d2 <= n, got {d1} + {d2} > {n}"
                    ),
                });
            }
            if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2 + 1e-12) {
                return Err(DatagenError::InvalidParameter {
                    detail: format!("requested angle {theta} is outside (0, pi/2]"),
                });
            }
            let mut gauss = GaussStream::new(stream(seed, SUBSPACE_STREAM, 0));
            let raw = DMatrix::from_fn(n, d1 + d2, |_, _| gauss.next_gaussian());
            let frame = orthonormalize(&raw)?;
            let q = frame.basis();
            let b1 = DMatrix::from(q.columns(0, d1));
            let mut b2 = DMatrix::zeros(n, d2);
            // Smallest-angle direction: tilt q₀ toward the orthogonal block.
            let tilted = q.column(0) * theta.cos() + q.column(d1) * theta.sin();
            b2.set_column(0, &tilted);
            for k in 1..d2 {
                b2.set_column(k, &q.column(d1 + k));
            }
            Ok(vec![
                Subspace::from_orthonormal(b1)?,
                Subspace::from_orthonormal(b2)?,
            ])
        }
    }
}

/// `count` points drawn uniformly from the unit sphere inside `s`
/// (columns, ambient coordinates): each column is `basis·(g/‖g‖)` with g a
/// standard Gaussian d-vector.
pub fn gen_points(s: &Subspace, count: usize, seed: u64) -> Result<DMatrix<f64>, DatagenError> {
    sample_sphere_points(s, count, seed, true)
}

fn sample_sphere_points(
    s: &Subspace,
    count: usize,
    seed: u64,
    normalize: bool,
) -> Result<DMatrix<f64>, DatagenError> {
    if count == 0 {
        return Err(DatagenError::InvalidParameter {
            detail: "point count must be at least 1".to_string(),
        });
    }
    let d = s.dim();
    let mut gauss = GaussStream::new(stream(seed, POINTS_STREAM, 0));
    let mut out = DMatrix::zeros(s.ambient_dim(), count);
    let mut g = DVector::zeros(d);
    for j in 0..count {
        loop {
            for k in 0..d {
                g[k] = gauss.next_gaussian();
            }
            let norm = g.norm();
            // A zero draw has probability zero but would divide by zero;
            // redraw deterministically.
            if norm > 1e-300 {
                if normalize {
                    g /= norm;
                }
                break;
            }
        }
        out.set_column(j, &s.embed(&g));
    }
    Ok(out)
}

/// n×count noise matrix with independent N(0, ϵ²/n) entries.
pub fn gen_noise(
    n: usize,
    count: usize,
    params: &NoiseParams,
    seed: u64,
) -> Result<DMatrix<f64>, DatagenError> {
    if n == 0 {
        return Err(DatagenError::DimensionError {
            detail: "noise needs a positive ambient dimension".to_string(),
        });
    }
    let std = params.epsilon_raw() / (n as f64).sqrt();
    let mut gauss = GaussStream::new(stream(seed, NOISE_STREAM, 0));
    Ok(DMatrix::from_fn(n, count, |_, _| std * gauss.next_gaussian()))
}

/// Assemble a [`Dataset`] from per-subspace point blocks: draw the noise,
/// draw a uniform permutation (Fisher–Yates), and mix the blocks.
///
/// `uniform_points` records whether the supplied points follow the model's
/// uniform-sphere convention (checks that require that hypothesis consult
/// the flag).
pub fn assemble(
    subspaces: Vec<Subspace>,
    points: &[DMatrix<f64>],
    noise: &NoiseParams,
    seed: u64,
    uniform_points: bool,
) -> Result<Dataset, DatagenError> {
    assemble_with_flag(subspaces, points, noise, seed, uniform_points)
}

fn assemble_with_flag(
    subspaces: Vec<Subspace>,
    points: &[DMatrix<f64>],
    noise: &NoiseParams,
    seed: u64,
    uniform_points: bool,
) -> Result<Dataset, DatagenError> {
    if subspaces.is_empty() || subspaces.len() != points.len() {
        return Err(DatagenError::DimensionError {
            detail: format!(
                "{} subspaces with {} point blocks",
                subspaces.len(),
                points.len()
            ),
        });
    }
    let n = subspaces[0].ambient_dim();
    for (i, (s, p)) in subspaces.iter().zip(points).enumerate() {
        if s.ambient_dim() != n || p.nrows() != n {
            return Err(DatagenError::DimensionError {
                detail: format!("subspace/point block {i} does not live in R^{n}"),
            });
        }
        if p.ncols() == 0 {
            return Err(DatagenError::DimensionError {
                detail: format!("point block {i} is empty"),
            });
        }
    }
    let total: usize = points.iter().map(|p| p.ncols()).sum();

    // Block-ordered clean matrix and labels.
    let mut block = DMatrix::zeros(n, total);
    let mut block_labels = Vec::with_capacity(total);
    let mut at = 0;
    for (i, p) in points.iter().enumerate() {
        block.columns_mut(at, p.ncols()).copy_from(p);
        block_labels.extend(std::iter::repeat(i).take(p.ncols()));
        at += p.ncols();
    }

    // Fisher–Yates permutation; permutation[j] = block index shown at column j.
    let mut rng = stream(seed, PERMUTATION_STREAM, 0);
    let mut permutation: Vec<usize> = (0..total).collect();
    for i in (1..total).rev() {
        let j = rng.gen_range(0..=i);
        permutation.swap(i, j);
    }

    let mut x = DMatrix::zeros(n, total);
    let mut labels = Vec::with_capacity(total);
    for (col, &src) in permutation.iter().enumerate() {
        x.set_column(col, &block.column(src));
        labels.push(block_labels[src]);
    }

    let z = gen_noise(n, total, noise, seed)?;
    let y = &x + &z;

    let dataset = Dataset {
        subspaces,
        x,
        z,
        y,
        labels,
        permutation,
        noise: *noise,
        seed,
        uniform_points,
    };
    if uniform_points {
        dataset.validate()?;
    }
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::principal_angles;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};

    fn noiseless() -> NoiseParams {
        NoiseParams::new(0.0, 0.0).unwrap()
    }

    #[test]
    fn noise_params_epsilon_is_exact_product() {
        let p = NoiseParams::new(0.01, 0.1).unwrap();
        assert_eq!(p.epsilon(), 0.01 * (1.0 + 0.1));
        assert!(NoiseParams::new(-0.1, 0.0).is_err());
        assert!(NoiseParams::new(0.1, -0.5).is_err());
        assert!(NoiseParams::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn subspaces_are_deterministic() {
        let a = gen_subspaces(6, &[2, 3], 42, None).unwrap();
        let b = gen_subspaces(6, &[2, 3], 42, None).unwrap();
        for (s, t) in a.iter().zip(&b) {
            assert_eq!(s.basis(), t.basis());
        }
        let c = gen_subspaces(6, &[2, 3], 43, None).unwrap();
        assert_ne!(a[0].basis(), c[0].basis());
    }

    #[test]
    fn orthogonal_pair_has_right_angles() {
        let s = gen_subspaces(4, &[2, 2], 7, Some(FRAC_PI_2)).unwrap();
        let angles = principal_angles(&s[0], &s[1]).unwrap();
        assert_eq!(angles.len(), 2);
        for a in angles {
            assert!((a - FRAC_PI_2).abs() < 1e-9, "angle {a}");
        }
    }

    #[test]
    fn controlled_angle_is_hit_exactly() {
        let s = gen_subspaces(9, &[3, 3], 11, Some(FRAC_PI_6)).unwrap();
        let angles = principal_angles(&s[0], &s[1]).unwrap();
        assert!((angles[0] - FRAC_PI_6).abs() < 1e-9, "smallest {}", angles[0]);
        for a in &angles[1..] {
            assert!((a - FRAC_PI_2).abs() < 1e-9);
        }
    }

    #[test]
    fn angle_control_needs_room_and_a_pair() {
        assert!(matches!(
            gen_subspaces(5, &[3, 3], 1, Some(FRAC_PI_6)),
            Err(DatagenError::DimensionError { .. })
        ));
        assert!(matches!(
            gen_subspaces(9, &[2, 2, 2], 1, Some(FRAC_PI_6)),
            Err(DatagenError::DimensionError { .. })
        ));
        assert!(matches!(
            gen_subspaces(9, &[3, 3], 1, Some(-0.1)),
            Err(DatagenError::InvalidParameter { .. })
        ));
    }

    #[test]
    fn points_are_unit_in_span_and_deterministic() {
        let s = gen_subspaces(5, &[3], 3, None).unwrap().remove(0);
        let p = gen_points(&s, 40, 9).unwrap();
        let q = gen_points(&s, 40, 9).unwrap();
        assert_eq!(p, q);
        for j in 0..p.ncols() {
            let col = DVector::from_column_slice(p.column(j).as_slice());
            assert!((col.norm() - 1.0).abs() < 1e-12);
            assert!(s.distance(&col).unwrap() < 1e-12);
        }
    }

    #[test]
    fn one_dimensional_sphere_is_two_points() {
        let s = gen_subspaces(4, &[1], 5, None).unwrap().remove(0);
        let p = gen_points(&s, 25, 1).unwrap();
        let b = DVector::from_column_slice(s.basis().column(0).as_slice());
        for j in 0..p.ncols() {
            let col = DVector::from_column_slice(p.column(j).as_slice());
            let dot = col.dot(&b);
            assert!((dot.abs() - 1.0).abs() < 1e-12, "dot {dot}");
        }
    }

    #[test]
    fn sphere_sampling_is_centered() {
        let s = gen_subspaces(6, &[2], 17, None).unwrap().remove(0);
        let count = 10_000;
        let p = gen_points(&s, count, 23).unwrap();
        let mut mean = DVector::zeros(6);
        for j in 0..count {
            mean += DVector::from_column_slice(p.column(j).as_slice());
        }
        mean /= count as f64;
        assert!(mean.norm() <= 0.05, "mean norm {}", mean.norm());
    }

    #[test]
    fn zero_noise_is_zero_matrix() {
        let z = gen_noise(10, 7, &noiseless(), 99).unwrap();
        assert!(z.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn noise_variance_matches_convention() {
        let n = 100;
        let params = NoiseParams::new(0.1, 0.0).unwrap();
        let z = gen_noise(n, 10_000, &params, 12).unwrap();
        let mean: f64 = z.iter().sum::<f64>() / (z.len() as f64);
        let var: f64 = z.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (z.len() as f64);
        let expected = 0.1 * 0.1 / n as f64;
        assert!(
            (var - expected).abs() <= 0.05 * expected,
            "var {var} vs {expected}"
        );
    }

    #[test]
    fn dataset_assembly_invariants() {
        let params = DatasetParams {
            ambient_dim: 8,
            subspace_dims: vec![2, 3],
            points_per_subspace: vec![5, 7],
            noise: NoiseParams::new(0.05, 0.1).unwrap(),
            seed: 2024,
            min_angle: None,
            uniform_points: true,
        };
        let ds = params.generate().unwrap();
        ds.validate().unwrap();
        assert_eq!(ds.total_points(), 12);
        assert_eq!(ds.counts(), vec![5, 7]);
        // Y = X + Z exactly.
        for j in 0..12 {
            for i in 0..8 {
                assert_eq!(ds.y[(i, j)], ds.x[(i, j)] + ds.z[(i, j)]);
            }
        }
        // Unpermuting recovers the block layout: all label-0 columns first.
        let mut pairs: Vec<(usize, usize)> = ds.permutation.iter().cloned().zip(ds.labels.iter().cloned()).collect();
        pairs.sort();
        let unpermuted: Vec<usize> = pairs.into_iter().map(|(_, l)| l).collect();
        let expected: Vec<usize> = std::iter::repeat(0)
            .take(5)
            .chain(std::iter::repeat(1).take(7))
            .collect();
        assert_eq!(unpermuted, expected);
        // Per-column subspace lookup agrees with block membership.
        let b0 = ds.clean_block(0);
        assert_eq!(b0.ncols(), 5);
    }

    #[test]
    fn noise_level_does_not_change_clean_points() {
        let base = DatasetParams {
            ambient_dim: 6,
            subspace_dims: vec![2, 2],
            points_per_subspace: vec![4, 4],
            noise: NoiseParams::new(0.02, 0.1).unwrap(),
            seed: 5,
            min_angle: None,
            uniform_points: true,
        };
        let mut louder = base.clone();
        louder.noise = NoiseParams::new(0.2, 0.1).unwrap();
        let a = base.generate().unwrap();
        let b = louder.generate().unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.permutation, b.permutation);
        assert_ne!(a.z, b.z);
    }

    #[test]
    fn non_uniform_flag_skips_normalization() {
        let params = DatasetParams {
            ambient_dim: 6,
            subspace_dims: vec![3],
            points_per_subspace: vec![10],
            noise: NoiseParams::new(0.0, 0.0).unwrap(),
            seed: 31,
            min_angle: None,
            uniform_points: false,
        };
        let ds = params.generate().unwrap();
        assert!(!ds.uniform_points);
        let norms: Vec<f64> = (0..10)
            .map(|j| DVector::from_column_slice(ds.x.column(j).as_slice()).norm())
            .collect();
        assert!(norms.iter().any(|&v| (v - 1.0).abs() > 1e-6));
    }

    #[test]
    fn assemble_rejects_mismatched_blocks() {
        let subs = gen_subspaces(6, &[2, 2], 1, None).unwrap();
        let p0 = gen_points(&subs[0], 3, 1).unwrap();
        assert!(matches!(
            assemble(subs, &[p0], &noiseless(), 1, true),
            Err(DatagenError::DimensionError { .. })
        ));
    }

    #[test]
    fn reversal_permutation_semantics() {
        // With two blocks of one point each, whatever the drawn permutation,
        // labels must be consistent with it.
        let subs = gen_subspaces(4, &[1, 1], 77, None).unwrap();
        let p0 = gen_points(&subs[0], 1, 10).unwrap();
        let p1 = gen_points(&subs[1], 1, 11).unwrap();
        let ds = assemble(subs, &[p0.clone(), p1.clone()], &noiseless(), 77, true).unwrap();
        for j in 0..2 {
            let expected = if ds.permutation[j] == 0 { &p0 } else { &p1 };
            assert_eq!(ds.x.column(j), expected.column(0));
            assert_eq!(ds.labels[j], ds.permutation[j]);
        }
    }
}
