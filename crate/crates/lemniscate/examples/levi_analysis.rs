//! Complex-analytic structure behind the index bound.
//!
//! In even dimension `R^{2n} = C^n`, the function `log |x − w|²` is
//! plurisubharmonic: its Levi form with respect to the standard complex
//! structure is positive semidefinite (it is the Fubini–Study-type kernel
//! `|z|²|w|² − |⟨z,w̄⟩|²` up to normalization, zero exactly on the complex
//! line through the pole). The real Hessian of the potential splits as
//!
//! ```text
//!     H(u, u) = Re Q(u, u) + L(u, u),
//! ```
//!
//! a complex-quadratic part `Q` (which always has a nonnegative direction)
//! plus the Levi part `L ≥ 0` — hence at most one negative eigenvalue.
//! At a nondegenerate critical point in affine span ≥ 3 no complex
//! structure can be "adapted" (two eigenvalues ≤ 0 would be needed), which
//! is exactly why those critical points are saddles or minima, never
//! maxima.
//!
//! Run with: `cargo run --example levi_analysis`

use lemniscate::families;
use lemniscate::levi;
use lemniscate::polynomial::C64;
use lemniscate::potential;
use lemniscate::solver::{self, SolverOptions};
use nalgebra::DVector;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    // 1. The kernel inequality: fubini_levi(z, w) >= 0, with equality iff
    //    z lies on the complex line C·w.
    println!("Levi kernel positivity on random pairs in C^3:");
    let mut worst = f64::INFINITY;
    for _ in 0..5 {
        let z: Vec<C64> = (0..3).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let w: Vec<C64> = (0..3).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let v = levi::fubini_levi(&z, &w).expect("kernel");
        worst = worst.min(v);
        println!("  kernel = {v:+.6}");
    }
    let w: Vec<C64> = vec![C64::new(0.3, -0.4), C64::new(1.0, 0.2), C64::new(-0.7, 0.5)];
    let lambda = C64::new(-2.0, 1.5);
    let z: Vec<C64> = w.iter().map(|wi| lambda * wi).collect();
    let on_line = levi::fubini_levi(&z, &w).expect("kernel");
    println!("  on the complex line through w: kernel = {on_line:.2e} (zero)");
    println!("  worst off-line value: {worst:+.6} (must be >= 0)\n");

    // 2. Hessian decomposition H = Re Q + L at a generic point of a
    //    4-dimensional (= C²) configuration.
    let cfg = lemniscate::PointConfiguration::from_rows(&[
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
        vec![0.5, 0.5, 0.5, 0.5],
    ])
    .expect("configuration");
    let x = DVector::from_vec(vec![0.21, -0.13, 0.34, 0.08]);
    let h = potential::hessian(&cfg, &x).expect("hessian");
    let structure = levi::ComplexStructure::standard(2);
    let dec = levi::decompose_hessian(&h, &structure).expect("decomposition");
    let reconstruction_error = (dec.reconstruct() - &h).norm() / h.norm();
    println!("Hessian decomposition at a generic point of C^2:");
    println!("  Levi eigenvalues: {:?}", dec.levi.eigenvalues());
    println!("  reconstruction |ReQ + L - H| / |H| = {reconstruction_error:.2e}");
    let levi_direct = levi::levi_form_of_potential(&cfg, &x).expect("levi form");
    let diff: f64 = dec
        .levi
        .eigenvalues()
        .iter()
        .zip(levi_direct.eigenvalues())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("  agrees with the direct Levi form of f: max eigenvalue gap {diff:.2e}\n");

    // 3. The obstruction: at a nondegenerate critical point with affine span
    //    >= 3, the Hessian has at least 2n−1 positive eigenvalues, so no
    //    complex structure pairs two nonpositive directions — the adapted
    //    structure construction must refuse.
    let fam = families::tetrahedron();
    let cfg3 = fam.config.embedded_in_next_dimension();
    let set = solver::find_critical_points(&fam.config, &SolverOptions::default()).expect("solve");
    println!("Adapted complex structures at critical points of the tetrahedral potential");
    println!("(embedded in R^4 so a complex structure could exist a priori):");
    for p in set.interior_points() {
        let mut loc4 = DVector::zeros(4);
        loc4.rows_mut(0, 3).copy_from(&p.location);
        let h4 = potential::hessian(&cfg3, &loc4).expect("hessian");
        match levi::adapted_structure(&h4) {
            Ok(_) => println!("  {} at f = {:+.6}: UNEXPECTEDLY ADAPTED", p.kind.as_str(), p.value.unwrap()),
            Err(e) => println!("  {} at f = {:+.6}: refused ({e})", p.kind.as_str(), p.value.unwrap()),
        }
    }
    // For a PLANAR configuration the obstruction vanishes: the poles
    // ±e1, ±e2 span only a 2-plane inside R^4, the origin is a (degenerate)
    // critical point with Hessian eigenvalues {0, 0, 8, 8}, and the two
    // null directions pair into a genuine complex line.
    let square = lemniscate::PointConfiguration::from_rows(&[
        vec![1.0, 0.0, 0.0, 0.0],
        vec![-1.0, 0.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0],
        vec![0.0, -1.0, 0.0, 0.0],
    ])
    .expect("configuration");
    let h0 = potential::hessian(&square, &DVector::zeros(4)).expect("hessian");
    println!("\nPlanar configuration ±e1, ±e2 in R^4 (affine span 2), at the origin:");
    match levi::adapted_structure(&h0) {
        Ok(adapted) => {
            println!("  adapted structure exists; complex-line values {:?}", adapted.line_values);
            println!("  (the null 2-plane of the Hessian is the complex line of the planar chart)");
        }
        Err(e) => println!("  UNEXPECTEDLY refused: {e}"),
    }
}
