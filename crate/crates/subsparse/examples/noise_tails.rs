//! The two Gaussian tail bounds the noise model rests on, confronted with
//! simulation: a chi-square bound on the norm of a Gaussian vector, and a
//! union bound on its maximum correlation with a fixed set of unit vectors.
//!
//! Run with: `cargo run --release --example noise_tails`

use subsparse::check_appendix_bounds;
use subsparse::verify::AppendixParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = AppendixParams {
        // Norm tail: z has independent N(0, eps^2/n) entries; the event is
        // ||z|| > eps(1 + rho). The bound does not depend on eps.
        n: 100,
        rho: 0.1,
        // Correlation tail: max_j |<z, u_j>| over big_n unit vectors u_j,
        // for z with N(0, sigma^2) entries; the event is exceeding
        // 2 sqrt(2 ln big_n) * sigma, claimed probability 1/big_n^2.
        big_n: 100,
        sigma: 0.1,
    };
    let trials = 20_000;
    let report = check_appendix_bounds(&params, trials, 2024)?;

    println!("chi-square norm tail (n = {}, rho = {}):", params.n, params.rho);
    println!("  claimed bound        {:.6}", report.chi2_bound);
    println!("  measured exceedance  {:.6}", report.chi2_exceedance);
    println!(
        "  allowance (3 sigma)  {:.6}  -> {}",
        report.chi2_allowance,
        if report.chi2_pass { "pass" } else { "FAIL" }
    );

    println!(
        "max-correlation tail (N = {}, sigma = {}):",
        params.big_n, params.sigma
    );
    println!("  threshold            {:.6}", report.lemma7_threshold);
    println!("  claimed bound        {:.6}", report.lemma7_bound);
    println!("  measured exceedance  {:.6}", report.lemma7_exceedance);
    println!(
        "  allowance (3 sigma)  {:.6}  -> {}",
        report.lemma7_allowance,
        if report.lemma7_pass { "pass" } else { "FAIL" }
    );

    // The norm tail is loose at small n and tight as n grows; sweep n to
    // watch the claimed bound approach the measurement from above.
    println!("norm-tail bound vs measurement as n grows (rho = 0.1):");
    for n in [25, 50, 100, 200, 400] {
        let p = AppendixParams { n, ..params };
        let r = check_appendix_bounds(&p, trials, 2024)?;
        println!(
            "  n = {n:>4}: bound {:.6}, measured {:.6}",
            r.chi2_bound, r.chi2_exceedance
        );
    }
    Ok(())
}
