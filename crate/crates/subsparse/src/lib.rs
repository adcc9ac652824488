//! Recovery of subspace-sparse representations from noise-corrupted data via
//! constrained ℓ1-minimization.
//!
//! The crate is organized around the pipeline an experiment walks through:
//!
//! * [`datagen`] — deterministic, seeded synthetic data: unions of subspaces,
//!   uniform points on their unit spheres, and Gaussian noise with a
//!   documented stream-derivation scheme so every artifact is reproducible
//!   bit-for-bit on a given platform.
//! * [`geometry`] — the quantities that govern when recovery works: subspace
//!   bases, principal angles, incoherence between a subspace and foreign
//!   points, and the inradius of the symmetrized polytope spanned by the
//!   in-subspace points (exact in low dimension, bracketed otherwise).
//! * [`solver`] — ball-constrained and equality-constrained ℓ1 programs plus
//!   an unconstrained lasso baseline, all solved by deterministic first-order
//!   splitting with duality-gap certificates that can be re-checked from
//!   scratch via [`solver::certify`].
//! * [`verify`] — the bound calculus (the dictionary-quality factor γ, the
//!   residual amplification factor β) and Monte Carlo checks that confront
//!   every claimed inequality with measured behavior: recovery residual and
//!   off-support mass, a null-space-style strict inequality on a sampled
//!   perturbation set, three ℓ1-norm lemmas, a support-detection lower bound,
//!   and two Gaussian tail bounds.
//! * [`cli`] — batch front end used by the `subsparse` binary: sectioned
//!   key-value config files, dataset export/import in the SSMX matrix format,
//!   JSON / JSON-lines / CSV reports with content hashes, and sweep grids.
//!
//! Runnable walkthroughs of each capability live in `examples/`.

pub mod cli;
pub mod datagen;
pub mod geometry;
mod linalg;
pub mod solver;
pub mod verify;

pub use nalgebra;

pub use datagen::{assemble, gen_noise, gen_points, gen_subspaces, DatagenError, Dataset, DatasetParams, NoiseParams};
pub use geometry::{
    incoherence, inradius, orthonormalize, principal_angles, recovery_margin, GeometryError,
    GeometryReport, GridOptions, InradiusBracket, InradiusMethod, MethodSpec, Subspace,
};
pub use solver::{
    certify, solve_constrained_l1, solve_equality_l1, solve_lasso, Problem, SolveResult,
    SolveStatus, SolverError, SolverOptions,
};
pub use verify::{
    check_appendix_bounds, check_lemma1, check_lemma2, check_lemma3, check_nsp, check_recovery,
    check_support_detection, compute_beta, compute_bounds, compute_gamma, sample_w, BoundParams,
    Flag, NspSample, RecoveryCertificate, VerifyError,
};
