//! Bifurcation sweep through the triangular-prism family.
//!
//! Six poles sit at the vertices of two equilateral triangles on the unit
//! circle at heights ±a. For small a the potential has a single minimum at
//! the origin; as a crosses 1 the origin degenerates (one Hessian
//! eigenvalue hits zero) and splits into two minima at (0, 0, ±√(a²−1))
//! plus a new saddle between them — the saddle count jumps from 6 to 7 in
//! step with the counting identity s = r + h − 1.
//!
//! Run with: `cargo run --example prism_sweep`

use lemniscate::families;
use lemniscate::solver::{self, SolverOptions, SweepRange};

fn main() {
    let range = SweepRange::new(0.5, 2.0, 0.1).expect("range");
    let opts = SolverOptions::default();
    let result = solver::bifurcation_sweep(
        |a| Ok(families::triangular_prism(a)?.config),
        range,
        &opts,
    )
    .expect("sweep");

    println!("{:<8} {:>2} {:>2} {:>8} {:>12}", "a", "h", "s", "degen", "min |λ|");
    for row in &result.rows {
        println!(
            "{:<8.3} {:>2} {:>2} {:>8} {:>12.4e}",
            row.parameter, row.h, row.saddles, row.degenerate, row.min_abs_lambda,
        );
    }

    println!("\nbifurcations (refined to 1e-6 in the parameter):");
    for b in &result.bifurcations {
        println!("  a* = {:.8}   degenerate point at {:?}", b.parameter, b.location.as_slice());
    }
    for loss in &result.tracking_losses {
        println!("  tracking loss: {loss}");
    }

    // At the bifurcation value itself the origin has Hessian nullity 1.
    let fam = families::triangular_prism(1.0).expect("critical prism");
    let h = lemniscate::potential::hessian(&fam.config, &nalgebra::DVector::zeros(3)).expect("hessian");
    let eig = h.symmetric_eigen();
    let mut lam: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    lam.sort_by(|a, b| a.total_cmp(b));
    println!("\nHessian eigenvalues at the origin for a = 1: {lam:?}");
    println!("(the zero eigenvalue is the vertical direction about to split)");
}
