//! Stability of the critical-point structure under pole perturbations.
//!
//! The number of local minima h is not a topological invariant of r and N
//! — it genuinely depends on where the poles sit — but it is stable: small
//! perturbations of a Morse configuration preserve the whole inventory.
//! This example jitters every pole of two configurations by δ = 1e−3 in
//! random directions, re-solves, and reports how often h survives and how
//! often the perturbed potential is globally Morse (all critical values
//! distinct), which is the generic situation.
//!
//! Run with: `cargo run --example perturbation_stability`

use lemniscate::families;
use lemniscate::solver::{self, SolverOptions};

fn main() {
    let opts = SolverOptions::default();

    for (label, fam) in [
        ("tetrahedron", families::tetrahedron()),
        (
            "preassigned (h = 2)",
            families::preassigned_minima(&[-1.0, 1.0], &[0.0]).expect("construction"),
        ),
    ] {
        let cfg = &fam.config;
        let delta = 1e-3 * cfg.scale();
        let report = solver::perturbation_stability(cfg, delta, 20, &opts).expect("stability");
        println!("{label}: r = {}, base h = {}", cfg.len(), report.base_h);
        println!("  delta = {:.3e} (1e-3 x configuration scale)", report.delta);
        println!("  h preserved in {}/{} trials", report.h_preserved, report.trials);
        println!("  globally Morse in {}/{} trials", report.global_morse_count, report.trials);
        println!(
            "  stability radius estimate: {:.3e} (quarter of the least critical-point spacing)",
            report.stability_radius_estimate,
        );
        assert_eq!(report.h_preserved, report.trials, "h must survive small perturbations");
        println!();
    }

    // The flip side: near a bifurcation the structure is NOT stable. At
    // a = 1.005 the prism's two minima sit barely above the degeneration,
    // and the same relative jitter can push the configuration back across.
    let prism = families::triangular_prism(1.005).expect("prism");
    let delta = 1e-2 * prism.config.scale();
    match solver::perturbation_stability(&prism.config, delta, 20, &opts) {
        Ok(report) => {
            println!(
                "prism at a = 1.005 under the larger delta = {:.1e}: h preserved in {}/{} trials",
                report.delta, report.h_preserved, report.trials,
            );
            println!("(near the bifurcation, stability degrades — exactly as it should)");
        }
        Err(e) => println!("prism at a = 1.005: solver reports {e}"),
    }
}
