//! Potentials with minima exactly where you ask for them.
//!
//! Given interleaved targets r_1 < s_1 < r_2 < … < r_h on a line, let P be
//! the antiderivative of ∏(t − r_j)·∏(t − s_j) normalized to have global
//! minimum 1. P has no real roots, so its complex roots come in h
//! conjugate pairs a_j ± i·b_j; each pair contributes a ring of three
//! poles at height a_j and radius b_j, spaced 2π/3 apart. Every pole in a
//! ring is equidistant from any axis point (0, 0, t), which forces the
//! axis identity ∏_k |x(t) − w_k|² = P(t)³ — and with it, minima at
//! exactly (0, 0, r_j) and axial saddles at (0, 0, s_j).
//!
//! Run with: `cargo run --example preassigned_minima`

use lemniscate::families;
use lemniscate::potential;
use lemniscate::solver::{self, SolverOptions};
use lemniscate::verify;
use nalgebra::DVector;

fn main() {
    let minima = [-1.0, 1.0];
    let saddles = [0.0];
    let fam = families::preassigned_minima(&minima, &saddles).expect("construction");
    println!("requested minima at z = {minima:?}, axial saddles at z = {saddles:?}");
    println!("constructed {} poles in R^3:", fam.config.len());
    for w in fam.config.points() {
        println!("  ({:+.6}, {:+.6}, {:+.6})", w[0], w[1], w[2]);
    }

    // The gradient vanishes exactly at every requested location.
    println!("\ngradient norms at the requested critical points:");
    for z in minima.iter().chain(&saddles) {
        let x = DVector::from_vec(vec![0.0, 0.0, *z]);
        let g = potential::gradient(&fam.config, &x).expect("gradient").norm();
        println!("  |grad f(0, 0, {z:+})| = {g:.2e}");
    }

    // The axis identity: the product of squared distances restricted to the
    // z-axis is the cube of one real polynomial.
    let err = verify::axis_factorization_error(&fam, 50).expect("axis identity");
    println!("\naxis identity  prod |x(t) - w_k|^2 = P(t)^3:");
    println!("  worst relative error over 50 samples: {err:.2e}");

    // Solve the full 3D problem: h minima (the requested ones), and
    // 4h - 1 saddles total (h - 1 axial + 3h off the axis).
    let h = minima.len();
    let set = solver::find_critical_points(&fam.config, &SolverOptions::default()).expect("solve");
    println!("\nfull inventory: r = {}, h = {}, saddles = {} (expected {})", set.r, set.h, set.saddles, 4 * h - 1);
    println!("local minima found:");
    for p in set.minima() {
        println!("  ({:+.9}, {:+.9}, {:+.9})  f = {:+.9}", p.location[0], p.location[1], p.location[2], p.value.unwrap());
    }

    // A taller request: three minima, two saddles.
    let fam3 = families::preassigned_minima(&[-2.0, 0.0, 2.0], &[-1.0, 1.0]).expect("construction");
    let set3 = solver::find_critical_points(&fam3.config, &SolverOptions::default()).expect("solve");
    println!("\nthree preassigned minima: r = {}, h = {}, saddles = {} (expected {})", set3.r, set3.h, set3.saddles, 4 * 3 - 1);

    // Construction limits: the targets must interleave, and extreme spreads
    // make the resolvent numerically meaningless — both are refused.
    println!("\nrefused requests:");
    match families::preassigned_minima(&[-1.0, 1.0], &[2.0]) {
        Err(e) => println!("  non-interleaved saddles: {e}"),
        Ok(_) => println!("  non-interleaved saddles: UNEXPECTEDLY ACCEPTED"),
    }
    match families::preassigned_minima(&[-2000.0, 0.0, 2000.0], &[-1000.0, 1000.0]) {
        Err(e) => println!("  spread 4000 targets:     {e}"),
        Ok(_) => println!("  spread 4000 targets:     UNEXPECTEDLY ACCEPTED"),
    }
}
