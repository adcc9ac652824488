//! The bound calculus: from a dataset's geometry to the constants that
//! control recovery — the dictionary-quality factor γ, the residual
//! amplification factor β, the solver tolerance τ = γε, and the three
//! per-query bounds they imply.
//!
//! Run with: `cargo run --example theorem_bounds`

use subsparse::verify::dataset_geometry;
use subsparse::{compute_bounds, DatasetParams, MethodSpec, NoiseParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = DatasetParams {
        ambient_dim: 50,
        subspace_dims: vec![3, 3],
        points_per_subspace: vec![60, 60],
        noise: NoiseParams::new(0.01, 0.1)?,
        seed: 7,
        min_angle: Some(std::f64::consts::FRAC_PI_2),
        uniform_points: true,
    };
    let dataset = params.generate()?;
    let epsilon = dataset.noise.epsilon();

    // Geometry first: inradius and incoherence per subspace.
    let geometry = dataset_geometry(&dataset, &MethodSpec::Auto)?;
    for (i, g) in geometry.subspaces.iter().enumerate() {
        println!(
            "subspace {i}: inradius >= {:.6}, incoherence {:.6}, margin {:.6}",
            g.inradius.lower, g.incoherence, g.margin
        );
    }

    // The calculus requires margin > 0 everywhere; compute_bounds reports a
    // violation otherwise.
    let delta = 1e-3;
    let bounds = compute_bounds(
        &geometry,
        &dataset.counts(),
        dataset.ambient_dim(),
        epsilon,
        delta,
    )?;
    println!("gamma = {:.6} (attained by subspace {})", bounds.gamma, bounds.gamma_argmax);
    println!("beta  = {:.6} (attained by subspace {})", bounds.beta, bounds.beta_argmax);
    println!("tau   = gamma * epsilon = {:.6e}", bounds.tau());

    // What the constants promise for a query from subspace i:
    println!("reconstruction residual bound: beta * epsilon = {:.6e}", bounds.residual_bound());
    for i in 0..dataset.num_subspaces() {
        println!(
            "subspace {i}: off-support l1 mass bound {:.6e} (noise precondition {})",
            bounds.off_support_bound(i),
            if bounds.noise_precondition_ok(i) { "holds" } else { "FAILS" }
        );
        let n_i = dataset.counts()[i];
        let d_i = dataset.subspaces[i].dim();
        println!(
            "subspace {i}: support-detection lower bound {:.6}",
            bounds.support_bound(n_i, d_i, dataset.ambient_dim())
        );
    }
    Ok(())
}
