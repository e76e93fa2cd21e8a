//! The planar case is classical: critical points are roots of P′.
//!
//! When the poles lie in a single plane, identify that plane with C and
//! form the monic polynomial P(z) = ∏(z − w_k). Then f = log |P|², the
//! level sets are the classical lemniscates |P| = const, and the finite
//! critical points of f are exactly the roots of P′ — there are r − 1 of
//! them counted with multiplicity, all saddles when simple, and none of
//! them is a local minimum (log |P|² is harmonic away from the poles: no
//! interior minima, h = 0, and the counting identity degenerates to
//! s = r − 1).
//!
//! This example takes a random planar configuration sitting inside R³,
//! solves it with the general-purpose ambient solver, and checks the
//! answer against the polynomial route.
//!
//! Run with: `cargo run --example planar_comparison`

use lemniscate::planar;
use lemniscate::solver::{self, SolverOptions};
use lemniscate::PointConfiguration;
use nalgebra::DVector;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn main() {
    // Five random poles in a tilted plane inside R³.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let origin = DVector::from_vec(vec![0.3, -0.2, 0.5]);
    let e1 = DVector::from_vec(vec![1.0, 1.0, 0.0]).normalize();
    let e2 = DVector::from_vec(vec![-1.0, 1.0, 1.0]).normalize();
    let rows: Vec<Vec<f64>> = (0..5)
        .map(|_| {
            let (s, t): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            (&origin + &e1 * s + &e2 * t).as_slice().to_vec()
        })
        .collect();
    let cfg = PointConfiguration::from_rows(&rows).expect("configuration");

    // Polynomial route: roots of P' in the chart, mapped back to R³.
    let planar_points = planar::derivative_critical_points(&cfg).expect("P' roots");
    println!("roots of P' (chart coordinate, multiplicity, ambient location):");
    for p in &planar_points {
        println!(
            "  z = {:+.9} {:+.9}i   x{}   at ({:+.6}, {:+.6}, {:+.6})",
            p.z.re, p.z.im, p.multiplicity, p.location[0], p.location[1], p.location[2],
        );
    }

    // Ambient route: the general solver, knowing nothing about planarity.
    let set = solver::find_critical_points(&cfg, &SolverOptions::default()).expect("solve");
    println!("\nambient solver: r = {}, h = {}, saddles = {} (span dim {})", set.r, set.h, set.saddles, set.span_dim);
    assert_eq!(set.h, 0, "planar potentials have no interior minima");
    assert_eq!(set.saddles, cfg.len() - 1, "counting identity, planar form");

    // Match the two answers point by point.
    println!("\nmatching ambient critical points to P' roots:");
    let mut worst = 0.0f64;
    for p in set.saddle_points() {
        let (dist, z) = planar_points
            .iter()
            .map(|q| ((&q.location - &p.location).norm(), q.z))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("nonempty");
        worst = worst.max(dist);
        println!("  ambient saddle -> nearest P' root z = {:+.6} {:+.6}i   distance {:.2e}", z.re, z.im, dist);
    }
    println!("\nworst distance: {worst:.3e}");
    assert!(worst < 1e-8, "the two routes must agree");
}
