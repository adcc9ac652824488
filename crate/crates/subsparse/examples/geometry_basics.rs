//! The geometric quantities that decide whether sparse recovery can work:
//! principal angles between subspaces, incoherence against foreign points,
//! and the inradius of the polytope spanned by a subspace's own points.
//!
//! Run with: `cargo run --example geometry_basics`

use subsparse::nalgebra::DMatrix;
use subsparse::{
    gen_points, gen_subspaces, incoherence, inradius, principal_angles, recovery_margin,
    MethodSpec,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Two 3-dimensional subspaces of R^20 with a requested smallest
    // principal angle of 60 degrees between them.
    let angle = 60f64.to_radians();
    let subspaces = gen_subspaces(20, &[3, 3], 42, Some(angle))?;

    let thetas = principal_angles(&subspaces[0], &subspaces[1])?;
    println!("principal angles (degrees):");
    for t in &thetas {
        println!("  {:.3}", t.to_degrees());
    }

    // Sample unit-norm points on each subspace's sphere. More points give a
    // rounder polytope, hence a larger inradius and easier recovery.
    let points: Vec<DMatrix<f64>> = subspaces
        .iter()
        .enumerate()
        .map(|(i, s)| gen_points(s, 40, 1000 + i as u64))
        .collect::<Result<_, _>>()?;

    for (i, s) in subspaces.iter().enumerate() {
        // Inradius of the symmetrized convex hull of the subspace's points,
        // measured inside the subspace. `Auto` picks an exact method in low
        // dimension and a certified bracket otherwise.
        let bracket = inradius(s, &points[i], &MethodSpec::Auto)?;
        // Incoherence: largest |<projected foreign point, own direction>|,
        // small when the other subspace is far from this one.
        let foreign = &points[1 - i];
        let mu = incoherence(s, foreign)?;
        println!(
            "subspace {i}: inradius in [{:.6}, {:.6}] ({}), incoherence {:.6}",
            bracket.lower,
            bracket.upper,
            if bracket.is_exact { "exact" } else { "bracket" },
            mu
        );
    }

    // The combined report at a working noise level epsilon: recovery needs
    // margin = inradius - (incoherence + epsilon) > 0 for every subspace.
    let epsilon = 0.05;
    let report = recovery_margin(&subspaces, &points, epsilon, &MethodSpec::Auto)?;
    for (i, g) in report.subspaces.iter().enumerate() {
        println!(
            "subspace {i}: margin at epsilon={epsilon}: {:.6} ({})",
            g.margin,
            if g.margin > 0.0 { "recoverable" } else { "not guaranteed" }
        );
    }
    Ok(())
}
