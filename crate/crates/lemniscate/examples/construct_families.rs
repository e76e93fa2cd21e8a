//! The closed-form family catalogue.
//!
//! Every family carries reference data — exact critical point locations,
//! Hessian spectra, or expected inventories — and this example rebuilds
//! each one, solves it numerically, and compares the result against its
//! own reference.
//!
//! Run with: `cargo run --example construct_families`

use lemniscate::families::{self, FamilyDescriptor, Reference};
use lemniscate::solver::{self, SolverOptions};

fn main() {
    let catalogue: Vec<FamilyDescriptor> = vec![
        FamilyDescriptor::HypercubeMidpoints { n: 3 },
        FamilyDescriptor::HypercubeMidpoints { n: 4 },
        FamilyDescriptor::Simplex { n: 4 },
        FamilyDescriptor::Simplex { n: 5 },
        FamilyDescriptor::Tetrahedron,
        FamilyDescriptor::Cube,
        FamilyDescriptor::OctaSix,
        FamilyDescriptor::Prism { a: 0.8 },
        FamilyDescriptor::Prism { a: 1.25 },
        FamilyDescriptor::Preassigned { minima: vec![-1.0, 1.0], saddles: vec![0.0] },
    ];

    let opts = SolverOptions::default();
    for descriptor in catalogue {
        let fam = descriptor.build().expect("family construction");
        let cfg = &fam.config;
        let expected = fam.reference.expected_inventory();
        let set = solver::find_critical_points(cfg, &opts).expect("solve");
        let status = match expected {
            Some(inv) => {
                let got = families::Inventory {
                    poles: set.r,
                    minima: set.h,
                    saddles: set.saddles,
                };
                if got == inv { "matches reference" } else { "MISMATCH" }
            }
            None => "no closed-form inventory",
        };
        println!(
            "{:<22} r = {:>2}  N = {}  ->  h = {}, saddles = {:>2}   [{}]",
            fam.name,
            cfg.len(),
            cfg.dimension(),
            set.h,
            set.saddles,
            status,
        );

        // A taste of the per-family reference data.
        match &fam.reference {
            Reference::Hypercube { saddles, saddle_radius, .. } => {
                println!("    {} saddles at radius {:.6} on the axes", saddles.len(), saddle_radius);
            }
            Reference::Simplex { barycenter_spectrum, .. } => {
                let lam: Vec<f64> = barycenter_spectrum.iter().map(|d| d.value).collect();
                println!("    barycenter Hessian eigenvalues {:?}", lam);
            }
            Reference::SmallExample { minimum, saddles, .. } => {
                if let Some(s) = saddles.first() {
                    println!("    minimum at {minimum:?}; first closed-form saddle at {s:?}");
                } else {
                    println!("    minimum at {minimum:?}");
                }
            }
            Reference::Prism { regime, critical_a, .. } => {
                println!("    regime {:?} (transition at a* = {critical_a})", regime);
            }
            Reference::Preassigned { minima, axial_saddles, .. } => {
                println!(
                    "    minima preassigned at z = {:?}, axial saddles at z = {:?}",
                    minima.iter().map(|m| m[2]).collect::<Vec<_>>(),
                    axial_saddles.iter().map(|s| s[2]).collect::<Vec<_>>(),
                );
            }
        }
    }
}
