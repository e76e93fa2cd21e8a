//! Numerical study of the logarithmic potential of a finite point
//! configuration `w_1, …, w_r` in `R^N`,
//!
//! ```text
//!     F(x) = ∏_k |x − w_k|²,        f(x) = log F(x) = Σ_k log |x − w_k|²,
//! ```
//!
//! the higher-dimensional analogue of `log |P(z)|²` for a complex
//! polynomial `P`. The library finds and classifies the critical points of
//! `f`, checks the structural constraints they satisfy (critical points lie
//! in the convex hull, Hessians have at most one negative eigenvalue, saddle
//! and minimum counts balance), exposes the complex-analytic machinery
//! behind those constraints (Levi forms, Hessian decompositions, adapted
//! complex structures), builds a catalogue of closed-form example families,
//! and extracts the topology of the lemniscate-like level sets
//! `{f = c}` in `R³` (meshes, Euler characteristics, merge trees).
//!
//! The crate is organised as a library with one thin CLI binary; the
//! `examples/` directory contains one runnable example per capability:
//!
//! ```text
//! cargo run --example critical_points      # find + classify + Morse counts
//! cargo run --example construct_families   # the closed-form family catalogue
//! cargo run --example levi_analysis        # Levi forms and adapted structures
//! cargo run --example prism_sweep          # bifurcation sweep in a family
//! cargo run --example preassigned_minima   # potentials with chosen minima
//! cargo run --example level_set_topology   # meshes, χ, merge trees
//! cargo run --example planar_comparison    # planar case vs. polynomial roots
//! cargo run --example perturbation_stability
//! ```

pub mod cli;
pub mod config;
pub mod error;
pub mod families;
pub mod hull;
pub mod levi;
pub mod planar;
pub mod polynomial;
pub mod potential;
pub mod report;
pub mod solver;
pub mod topology;
pub mod verify;

pub use config::PointConfiguration;
pub use error::Error;
