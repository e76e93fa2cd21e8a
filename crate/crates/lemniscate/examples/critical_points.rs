//! Find, classify, and certify the critical points of a potential.
//!
//! The configuration here is the tetrahedral one: poles at `e1`, `e2`,
//! `e3`, and `(1,1,1)`. Its potential has one interior minimum at the
//! centroid and four saddles with closed forms, so every number printed
//! below can be checked by hand.
//!
//! Run with: `cargo run --example critical_points`

use lemniscate::families;
use lemniscate::solver::{self, SolverOptions};

fn main() {
    let fam = families::tetrahedron();
    let cfg = &fam.config;
    println!("configuration: {} poles in R^{}", cfg.len(), cfg.dimension());
    for (k, w) in cfg.points().iter().enumerate() {
        println!("  w_{} = {:?}", k + 1, w.as_slice());
    }

    let opts = SolverOptions::default();
    let set = solver::find_critical_points(cfg, &opts).expect("solve");

    println!("\ncritical points (finite ones; each pole is a -inf minimum):");
    for p in set.interior_points() {
        println!(
            "  {:<18} f = {:+.12}  negativity {}  nullity {}  |grad| = {:.2e}",
            p.kind.as_str(),
            p.value.unwrap(),
            p.negativity,
            p.nullity,
            p.grad_norm,
        );
        println!("      at {:?}", p.location.as_slice());
        println!("      spectrum {:?}", p.spectrum.as_slice());
    }

    println!("\ninventory: r = {} poles, h = {} local minima, {} saddles", set.r, set.h, set.saddles);
    println!("local Morse: {}   global Morse: {}", set.local_morse, set.global_morse);

    // Counting identity: for a configuration whose affine span has dimension
    // >= 3, the saddle count of a local Morse potential is exactly r + h - 1.
    let morse = solver::morse_report(&set).expect("counting identity");
    println!("counting identity: {}", morse.relation);

    // Every finite critical point sits in the convex hull of the poles, and
    // its Hessian has at most one negative eigenvalue. Check both here.
    println!("\nstructural checks:");
    let mut worst_margin = f64::INFINITY;
    let mut max_negativity = 0usize;
    for p in set.interior_points() {
        let m = lemniscate::hull::hull_membership(cfg, &p.location).expect("hull");
        worst_margin = worst_margin.min(m.margin);
        max_negativity = max_negativity.max(p.negativity);
    }
    println!("  max negativity over critical points: {} (bound: 1)", max_negativity);
    println!("  worst hull margin: {:+.3e} (negative would mean outside)", worst_margin);

    let cert = &set.certification;
    println!("\nsolver certification:");
    println!("  seeds: {} total ({} grid, {} random, {} fixed-point, {} midpoint)",
        cert.seeds_total, cert.grid_seeds, cert.random_seeds,
        cert.fixed_point_seeds, cert.midpoint_seeds);
    println!("  converged: {}   dropped: {}", cert.seeds_converged, cert.seeds_dropped);
    println!("  worst |grad| among kept points: {:.3e}", cert.max_grad_residual);
}
