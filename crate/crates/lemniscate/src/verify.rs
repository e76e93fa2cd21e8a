//! Self-verification suites, runnable from the CLI (`verify --suite …`).
//!
//! Each suite re-derives a structural guarantee of the library at runtime,
//! through the public API only, and reports one pass/fail line per check:
//!
//! * **core** — derivative correctness against central differences, the
//!   trace identity, critical-point inventories, Hessian index bounds
//!   (negativity ≤ 1, positivity ≥ N−1), convex-hull membership of every
//!   critical point, and the saddle-count identity `s = r + h − 1`;
//! * **topology** — level-set meshes in R³: every watertight component of a
//!   regular level has Euler characteristic 2, a single component above the
//!   top critical value, and mesh component counts equal to merge-tree cut
//!   counts on a perturbed-to-global-Morse copy of each family;
//! * **construction** — the family builders: reference locations are
//!   critical, closed-form spectra match a fresh eigendecomposition, the
//!   preassigned-minima construction reproduces its target polynomial on
//!   the axis, regimes classify correctly, and bad parameters are rejected.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::PointConfiguration;
use crate::error::{Error, Result};
use crate::families::{self, EigenDatum, FamilyOutput, PrismRegime, Reference};
use crate::hull;
use crate::potential;
use crate::solver::{self, CriticalKind, CriticalSet, SolverOptions};
use crate::topology;

/// Which verification suite to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Core,
    Topology,
    Construction,
}

impl Suite {
    /// Parse a `--suite` argument.
    pub fn parse(s: &str) -> Result<Suite> {
        match s {
            "all" => Ok(Suite::All),
            "core" => Ok(Suite::Core),
            "topology" => Ok(Suite::Topology),
            "construction" => Ok(Suite::Construction),
            other => Err(Error::Usage(format!(
                "unknown suite {other:?}; expected all, core, topology, or construction"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Core => "core",
            Suite::Topology => "topology",
            Suite::Construction => "construction",
        }
    }
}

/// Outcome of one verification check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    /// Short metric on pass, failure explanation on fail.
    pub detail: String,
    pub seconds: f64,
}

/// All check outcomes of a verification run.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub results: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failed_count(&self) -> usize {
        self.results.iter().filter(|r| !r.passed).count()
    }

    /// One `[PASS]`/`[FAIL]` line per check, plus a summary line.
    pub fn format_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            out.push_str(&format!(
                "[{}] {} — {} ({:.2}s)\n",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                r.detail,
                r.seconds
            ));
        }
        out.push_str(&format!(
            "{} checks, {} failed\n",
            self.results.len(),
            self.failed_count()
        ));
        out
    }
}

/// Run one suite (or all of them) and collect per-check results. Check
/// failures are reported, never raised; the report is always complete.
pub fn run_suite(suite: Suite, opts: &SolverOptions) -> VerifyReport {
    let mut results = Vec::new();
    match suite {
        Suite::All => {
            run_core(&mut results, opts);
            run_topology(&mut results, opts);
            run_construction(&mut results, opts);
        }
        Suite::Core => run_core(&mut results, opts),
        Suite::Topology => run_topology(&mut results, opts),
        Suite::Construction => run_construction(&mut results, opts),
    }
    VerifyReport { results }
}

/// Run the core checks on a single externally supplied configuration
/// (CLI `verify --input`): derivatives, index bounds, hull membership, and
/// the counting identity — everything that needs no reference data.
pub fn run_on_configuration(
    cfg: &PointConfiguration,
    opts: &SolverOptions,
) -> VerifyReport {
    let mut results = Vec::new();
    check(&mut results, "core", "core/derivatives/input".into(), || {
        derivative_check(cfg, opts)
    });
    let set = match solve_check(&mut results, "input", cfg, opts, None) {
        Some(set) => set,
        None => return VerifyReport { results },
    };
    check(&mut results, "core", "core/index_bounds/input".into(), || {
        index_bounds_check(cfg, &set)
    });
    check(&mut results, "core", "core/hull/input".into(), || hull_check(cfg, &set));
    check(&mut results, "core", "core/counting/input".into(), || counting_check(&set));
    VerifyReport { results }
}

/// JUnit-style XML rendering of a verification run, one `<testcase>` per
/// check, grouped into one `<testsuite>` per suite name.
pub fn junit_xml(results: &[CheckResult]) -> String {
    let mut suites: Vec<&'static str> = Vec::new();
    for r in results {
        if !suites.contains(&r.suite) {
            suites.push(r.suite);
        }
    }
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let total_failures = results.iter().filter(|r| !r.passed).count();
    out.push_str(&format!(
        "<testsuites tests=\"{}\" failures=\"{}\">\n",
        results.len(),
        total_failures
    ));
    for suite in suites {
        let members: Vec<&CheckResult> = results.iter().filter(|r| r.suite == suite).collect();
        let failures = members.iter().filter(|r| !r.passed).count();
        out.push_str(&format!(
            "  <testsuite name=\"{}\" tests=\"{}\" failures=\"{}\">\n",
            xml_escape(suite),
            members.len(),
            failures
        ));
        for r in members {
            out.push_str(&format!(
                "    <testcase classname=\"{}\" name=\"{}\" time=\"{:.3}\"",
                xml_escape(r.suite),
                xml_escape(&r.name),
                r.seconds
            ));
            if r.passed {
                out.push_str("/>\n");
            } else {
                out.push_str(&format!(
                    ">\n      <failure message=\"{}\"/>\n    </testcase>\n",
                    xml_escape(&r.detail)
                ));
            }
        }
        out.push_str("  </testsuite>\n");
    }
    out.push_str("</testsuites>\n");
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
        .replace('\'', "&apos;")
}

// ---------------------------------------------------------------------------
// Check plumbing
// ---------------------------------------------------------------------------

type CheckOutcome = std::result::Result<String, String>;

fn check<F>(results: &mut Vec<CheckResult>, suite: &'static str, name: String, f: F)
where
    F: FnOnce() -> CheckOutcome,
{
    let t0 = Instant::now();
    let outcome = f();
    let seconds = t0.elapsed().as_secs_f64();
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    results.push(CheckResult { suite, name, passed, detail, seconds });
}

fn lib<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Solve a configuration, recording the solve itself as a check (with the
/// inventory comparison when reference data pins one). Returns `None` when
/// the solve failed — dependent checks are skipped.
fn solve_check(
    results: &mut Vec<CheckResult>,
    name: &str,
    cfg: &PointConfiguration,
    opts: &SolverOptions,
    expected: Option<families::Inventory>,
) -> Option<CriticalSet> {
    let t0 = Instant::now();
    let solved = solver::find_critical_points(cfg, opts);
    let seconds = t0.elapsed().as_secs_f64();
    match solved {
        Ok(set) => {
            let (passed, detail) = match expected {
                Some(inv)
                    if (set.r, set.h, set.saddles) != (inv.poles, inv.minima, inv.saddles) =>
                {
                    (
                        false,
                        format!(
                            "inventory ({}, {}, {}) differs from reference ({}, {}, {})",
                            set.r, set.h, set.saddles, inv.poles, inv.minima, inv.saddles
                        ),
                    )
                }
                _ => (
                    true,
                    format!(
                        "r={} h={} saddles={} max |∇f| {:.1e}",
                        set.r,
                        set.h,
                        set.saddles,
                        set.certification.max_grad_residual
                    ),
                ),
            };
            results.push(CheckResult {
                suite: "core",
                name: format!("core/inventory/{name}"),
                passed,
                detail,
                seconds,
            });
            Some(set)
        }
        Err(e) => {
            results.push(CheckResult {
                suite: "core",
                name: format!("core/inventory/{name}"),
                passed: false,
                detail: format!("solve failed: {e}"),
                seconds,
            });
            None
        }
    }
}

// ---------------------------------------------------------------------------
// Core suite
// ---------------------------------------------------------------------------

fn core_families() -> Vec<(&'static str, Result<FamilyOutput>)> {
    vec![
        ("tetrahedron", Ok(families::tetrahedron())),
        ("cube", Ok(families::cube())),
        ("octa_six", Ok(families::octa_six())),
        ("hypercube_3", families::hypercube_midpoints(3)),
        ("hypercube_4", families::hypercube_midpoints(4)),
        ("simplex_4", families::simplex_vertices(4)),
        ("simplex_5", families::simplex_vertices(5)),
        ("prism_0.8", families::triangular_prism(0.8)),
        ("prism_1.25", families::triangular_prism(1.25)),
        ("preassigned_h2", families::preassigned_minima(&[-1.0, 1.0], &[0.0])),
    ]
}

fn run_core(results: &mut Vec<CheckResult>, opts: &SolverOptions) {
    for (name, built) in core_families() {
        let fam = match built {
            Ok(f) => f,
            Err(e) => {
                results.push(CheckResult {
                    suite: "core",
                    name: format!("core/inventory/{name}"),
                    passed: false,
                    detail: format!("family construction failed: {e}"),
                    seconds: 0.0,
                });
                continue;
            }
        };
        let cfg = &fam.config;
        check(results, "core", format!("core/derivatives/{name}"), || {
            derivative_check(cfg, opts)
        });
        let set = match solve_check(results, name, cfg, opts, fam.reference.expected_inventory())
        {
            Some(set) => set,
            None => continue,
        };
        check(results, "core", format!("core/index_bounds/{name}"), || {
            index_bounds_check(cfg, &set)
        });
        check(results, "core", format!("core/hull/{name}"), || hull_check(cfg, &set));
        check(results, "core", format!("core/counting/{name}"), || counting_check(&set));
    }
}

/// Central-difference gradient/Hessian agreement and the trace identity
/// `tr H = Σ 2(N−2)/|x−w_k|²` at deterministic pole-separated points.
fn derivative_check(cfg: &PointConfiguration, opts: &SolverOptions) -> CheckOutcome {
    let n = cfg.dimension();
    let scale = cfg.scale().max(1e-6);
    let (lo, hi) = cfg.bounding_box();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed.wrapping_add(0xd1ff));
    let mut worst_grad = 0.0f64;
    let mut worst_hess = 0.0f64;
    let mut worst_trace = 0.0f64;
    let mut found = 0usize;
    let mut attempts = 0usize;
    while found < 5 && attempts < 500 {
        attempts += 1;
        let x = DVector::from_fn(n, |i, _| {
            let pad = 0.3 * (hi[i] - lo[i]).max(0.2 * scale);
            rng.random_range((lo[i] - pad)..=(hi[i] + pad))
        });
        if cfg.nearest_point(&x).1 < 0.05 * scale {
            continue;
        }
        found += 1;
        let g = match potential::gradient(cfg, &x) {
            Ok(g) => g,
            Err(_) => continue,
        };
        let h = match potential::hessian(cfg, &x) {
            Ok(h) => h,
            Err(_) => continue,
        };
        let fd_g = fd_gradient(cfg, &x, 1e-6 * scale).map_err(|e| e.to_string())?;
        let rel_g = (&g - &fd_g).norm() / g.norm().max(1e-12);
        worst_grad = worst_grad.max(rel_g);
        let fd_h = fd_hessian(cfg, &x, 2e-4 * scale).map_err(|e| e.to_string())?;
        let rel_h = (&h - &fd_h).norm() / h.norm().max(1e-12);
        worst_hess = worst_hess.max(rel_h);
        let tr: f64 = (0..n).map(|i| h[(i, i)]).sum();
        let rhs = lib(potential::trace_identity_rhs(cfg, &x))?;
        worst_trace = worst_trace.max((tr - rhs).abs() / rhs.abs().max(1e-12));
    }
    if found < 5 {
        return Err(format!("only {found} pole-separated sample points found"));
    }
    if worst_grad > 1e-6 {
        return Err(format!("gradient vs central differences: rel {worst_grad:.2e} > 1e-6"));
    }
    if worst_hess > 1e-4 {
        return Err(format!("Hessian vs central differences: rel {worst_hess:.2e} > 1e-4"));
    }
    if worst_trace > 1e-8 {
        return Err(format!("trace identity: rel {worst_trace:.2e} > 1e-8"));
    }
    Ok(format!(
        "grad rel {worst_grad:.1e}, Hessian rel {worst_hess:.1e}, trace rel {worst_trace:.1e}"
    ))
}

/// Negativity ≤ 1 and positivity ≥ N−1 for every nondegenerate interior
/// critical point.
fn index_bounds_check(cfg: &PointConfiguration, set: &CriticalSet) -> CheckOutcome {
    let n = cfg.dimension();
    let mut checked = 0usize;
    for p in set.interior_points() {
        if p.kind == CriticalKind::Degenerate {
            continue;
        }
        checked += 1;
        if p.negativity > 1 {
            return Err(format!(
                "negativity {} > 1 at {:?}",
                p.negativity,
                p.location.as_slice()
            ));
        }
        if p.positivity() + 1 < n {
            return Err(format!(
                "positivity {} < N-1 = {} at {:?}",
                p.positivity(),
                n - 1,
                p.location.as_slice()
            ));
        }
    }
    Ok(format!("{checked} nondegenerate points within index bounds"))
}

/// Hull membership with margin ≥ −1e−9·diameter for every critical point.
fn hull_check(cfg: &PointConfiguration, set: &CriticalSet) -> CheckOutcome {
    let tol = -1e-9 * cfg.diameter();
    let mut worst = f64::INFINITY;
    for p in &set.points {
        let m = lib(hull::hull_membership(cfg, &p.location))?;
        worst = worst.min(m.margin);
        if m.margin < tol {
            return Err(format!(
                "hull margin {:.2e} < {tol:.1e} at {:?}",
                m.margin,
                p.location.as_slice()
            ));
        }
    }
    Ok(format!("all {} points inside hull (worst margin {worst:.1e})", set.points.len()))
}

/// The saddle-count identity via [`solver::morse_report`].
fn counting_check(set: &CriticalSet) -> CheckOutcome {
    let summary = lib(solver::morse_report(set))?;
    Ok(format!("{}, saddles = {}", summary.relation, summary.saddles))
}

fn fd_gradient(cfg: &PointConfiguration, x: &DVector<f64>, eps: f64) -> Result<DVector<f64>> {
    let n = x.len();
    let mut g = DVector::zeros(n);
    for i in 0..n {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += eps;
        xm[i] -= eps;
        g[i] = (potential::eval(cfg, &xp)?.log_value - potential::eval(cfg, &xm)?.log_value)
            / (2.0 * eps);
    }
    Ok(g)
}

fn fd_hessian(cfg: &PointConfiguration, x: &DVector<f64>, eps: f64) -> Result<DMatrix<f64>> {
    let n = x.len();
    let mut h = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += eps;
        xm[j] -= eps;
        let gp = potential::gradient(cfg, &xp)?;
        let gm = potential::gradient(cfg, &xm)?;
        for i in 0..n {
            h[(i, j)] = (gp[i] - gm[i]) / (2.0 * eps);
        }
    }
    // Symmetrize: central differences of the gradient are not exactly
    // symmetric.
    let ht = h.transpose();
    Ok((h + ht) * 0.5)
}

// ---------------------------------------------------------------------------
// Topology suite
// ---------------------------------------------------------------------------

fn topology_families() -> Vec<(&'static str, Result<FamilyOutput>)> {
    vec![
        ("tetrahedron", Ok(families::tetrahedron())),
        ("cube", Ok(families::cube())),
        ("octa_six", Ok(families::octa_six())),
        ("prism_1.25", families::triangular_prism(1.25)),
        ("preassigned_h2", families::preassigned_minima(&[-1.0, 1.0], &[0.0])),
    ]
}

fn run_topology(results: &mut Vec<CheckResult>, opts: &SolverOptions) {
    let resolution = 96;
    for (name, built) in topology_families() {
        let fam = match built {
            Ok(f) => f,
            Err(e) => {
                results.push(CheckResult {
                    suite: "topology",
                    name: format!("topology/spheres/{name}"),
                    passed: false,
                    detail: format!("family construction failed: {e}"),
                    seconds: 0.0,
                });
                continue;
            }
        };
        let cfg = fam.config.clone();
        check(results, "topology", format!("topology/spheres/{name}"), || {
            sphere_check(&cfg, opts, resolution)
        });
        check(results, "topology", format!("topology/merge_tree/{name}"), || {
            merge_tree_check(&cfg, opts, resolution)
        });
    }
}

/// Sample regular levels of the pristine family: below the least finite
/// critical value, between consecutive distinct critical values, and above
/// the largest; every mesh component must have χ = 2, and the top level must
/// be a single component.
fn sphere_check(
    cfg: &PointConfiguration,
    opts: &SolverOptions,
    resolution: usize,
) -> CheckOutcome {
    let set = lib(solver::find_critical_points(cfg, opts))?;
    let levels = lib(resolvable_levels(cfg, &set, resolution, 3))?;
    if levels.len() < 2 {
        return Err(format!("only {} resolvable levels at resolution {resolution}", levels.len()));
    }
    let mut meshed = 0usize;
    let mut components_at_top = 0usize;
    for (i, &c) in levels.iter().enumerate() {
        let mesh = lib(topology::extract_level_set(cfg, c, resolution))?;
        let chi = lib(topology::euler_characteristic(&mesh))?;
        if chi.iter().any(|&x| x != 2) {
            return Err(format!("level {c:.4}: component χ values {chi:?} ≠ 2"));
        }
        meshed += 1;
        if i == levels.len() - 1 {
            components_at_top = mesh.component_count();
        }
    }
    if components_at_top != 1 {
        return Err(format!(
            "level above the top critical value has {components_at_top} components, expected 1"
        ));
    }
    Ok(format!("{meshed} levels meshed, all components χ = 2, top level connected"))
}

/// Perturb the family to a global-Morse instance, then cross-check mesh
/// component counts against merge-tree cut counts at sampled regular levels
/// (χ = 2 is re-checked on the way by `betti_trace`'s meshes).
fn merge_tree_check(
    cfg: &PointConfiguration,
    opts: &SolverOptions,
    resolution: usize,
) -> CheckOutcome {
    let (pcfg, set) =
        global_morse_perturbation(cfg, 1e-3 * cfg.scale(), opts).map_err(|e| e.to_string())?;
    let tree = lib(topology::merge_tree(&pcfg, &set))?;
    let expected_leaves = set.r + set.h;
    if tree.leaves.len() != expected_leaves {
        return Err(format!(
            "tree has {} leaves, expected r + h = {expected_leaves}",
            tree.leaves.len()
        ));
    }
    let merges = tree.nodes.iter().filter(|n| !n.children.is_empty()).count();
    if merges + 1 != expected_leaves {
        return Err(format!(
            "tree has {merges} merges, expected r + h - 1 = {}",
            expected_leaves - 1
        ));
    }
    let levels = lib(resolvable_levels(&pcfg, &set, resolution, 3))?;
    let rows = lib(topology::betti_trace(&pcfg, &set, &tree, &levels, resolution))?;
    for row in &rows {
        if row.chi.iter().any(|&x| x != 2) {
            return Err(format!("level {:.4}: component χ values {:?} ≠ 2", row.c, row.chi));
        }
    }
    let canonical = topology::topological_type(&tree);
    if canonical.is_empty() {
        return Err("canonical tree encoding is empty".into());
    }
    Ok(format!(
        "{} leaves, {merges} merges, counts match tree cuts at {} levels",
        tree.leaves.len(),
        rows.len()
    ))
}

/// Deterministically sampled regular levels that a `resolution³` grid can
/// actually resolve.
///
/// A mesh-versus-theory comparison is only meaningful at levels where every
/// geometric feature of the level set spans several grid cells. Near a
/// critical value `v` the governing feature shrinks like `√(2|c − v|/λ)`:
/// the neck opened above a saddle (`λ` its largest Hessian eigenvalue), the
/// wall separating components below a saddle (`λ` its negative eigenvalue),
/// and the blob around a local minimum just above its value. Below the
/// least finite value, the feature is the pole sphere of radius
/// `e^{(c − Σ_{j≠k} log|w_k−w_j|²)/2}`.
///
/// Candidates — one level below the minimum, `per_gap` per gap between
/// consecutive distinct critical values, one above the maximum — are kept
/// only when their smallest feature exceeds 2.5 grid cells, so every
/// returned level is honestly comparable at this resolution. Narrow gaps
/// (for instance the ones a small perturbation opens inside a formerly
/// symmetric family) are dropped rather than measured with grid artifacts.
pub fn resolvable_levels(
    cfg: &PointConfiguration,
    set: &CriticalSet,
    resolution: usize,
    per_gap: usize,
) -> Result<Vec<f64>> {
    let mut values: Vec<f64> = set.points.iter().filter_map(|p| p.value).collect();
    values.sort_by(|a, b| a.total_cmp(b));
    values.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * (b.abs().max(1.0)));
    if values.is_empty() {
        return Ok(Vec::new());
    }
    let v_min = values[0];
    let v_max = values[values.len() - 1];
    let spread = (v_max - v_min).max(0.5);
    let top = v_max + 0.5 * spread;

    // Largest grid cell, estimated at the top level (the box grows with c).
    let (blo, bhi) = topology::meshing_box(cfg, top)?;
    let cell = (0..cfg.dimension())
        .map(|i| bhi[i] - blo[i])
        .fold(0.0f64, f64::max)
        / resolution as f64;
    let min_feature = 2.5 * cell;

    // Per critical point: (value, feature-λ above, feature-λ below).
    let mut features: Vec<(f64, f64, f64)> = Vec::new();
    for p in &set.points {
        let Some(v) = p.value else { continue };
        let h = potential::hessian(cfg, &p.location)?;
        let eig = h.symmetric_eigenvalues();
        let l_max = eig.iter().cloned().fold(0.0f64, f64::max);
        let l_neg = eig.iter().cloned().fold(0.0f64, f64::min).abs();
        // Above the value: a neck (saddle) or blob (minimum) of size
        // √(2(c−v)/λ_max). Below: a separating wall √(2(v−c)/|λ_min|),
        // present only for saddles — under a minimum there is no feature.
        features.push((v, l_max, l_neg));
    }
    let clearance = |c: f64| -> f64 {
        features
            .iter()
            .map(|&(v, l_above, l_neg)| {
                if c >= v {
                    (2.0 * (c - v) / l_above.max(1e-300)).sqrt()
                } else if l_neg > 0.0 {
                    (2.0 * (v - c) / l_neg).sqrt()
                } else {
                    f64::INFINITY
                }
            })
            .fold(f64::INFINITY, f64::min)
    };

    let mut levels = Vec::new();
    // Below-minimum level: pole spheres must span enough cells. Their radius
    // barely changes once below the minimum, so try a few offsets.
    for offset in [0.25, 0.1, 0.02] {
        let c = v_min - offset * spread;
        let sphere_min = cfg
            .points()
            .iter()
            .enumerate()
            .map(|(k, w)| {
                let ck: f64 = cfg
                    .points()
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != k)
                    .map(|(_, u)| (w - u).norm_squared().ln())
                    .sum();
                ((c - ck) / 2.0).exp()
            })
            .fold(f64::INFINITY, f64::min);
        if sphere_min >= min_feature && clearance(c) >= min_feature {
            levels.push(c);
            break;
        }
    }
    for w in values.windows(2) {
        for k in 0..per_gap {
            let t = (k as f64 + 1.0) / (per_gap as f64 + 1.0);
            let c = w[0] + (w[1] - w[0]) * t;
            if clearance(c) >= min_feature {
                levels.push(c);
            }
        }
    }
    levels.push(top);
    Ok(levels)
}

/// Jitter every pole by a deterministic random offset of length < δ until
/// the perturbed configuration is global Morse with the same `h` (up to 8
/// attempts). Returns the perturbed configuration and its critical set.
pub fn global_morse_perturbation(
    cfg: &PointConfiguration,
    delta: f64,
    opts: &SolverOptions,
) -> Result<(PointConfiguration, CriticalSet)> {
    let base = solver::find_critical_points(cfg, opts)?;
    let n = cfg.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed.wrapping_add(0x6e57));
    for _ in 0..8 {
        let moved: Vec<DVector<f64>> = cfg
            .points()
            .iter()
            .map(|w| {
                let mut dir = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0f64));
                let norm = dir.norm();
                if norm > 0.0 {
                    dir /= norm;
                }
                w + dir * (delta * rng.random_range(0.5..1.0f64))
            })
            .collect();
        let pcfg = PointConfiguration::new(moved)?;
        let set = solver::find_critical_points(&pcfg, opts)?;
        if set.global_morse && set.h == base.h {
            return Ok((pcfg, set));
        }
    }
    Err(Error::SolverFailure(format!(
        "no global-Morse perturbation of size {delta:.1e} found in 8 attempts"
    )))
}

// ---------------------------------------------------------------------------
// Construction suite
// ---------------------------------------------------------------------------

fn run_construction(results: &mut Vec<CheckResult>, opts: &SolverOptions) {
    let reference_families: Vec<(&'static str, Result<FamilyOutput>)> = vec![
        ("tetrahedron", Ok(families::tetrahedron())),
        ("cube", Ok(families::cube())),
        ("octa_six", Ok(families::octa_six())),
        ("hypercube_3", families::hypercube_midpoints(3)),
        ("hypercube_4", families::hypercube_midpoints(4)),
        ("simplex_4", families::simplex_vertices(4)),
        ("simplex_5", families::simplex_vertices(5)),
        ("prism_1.25", families::triangular_prism(1.25)),
        ("preassigned_h2", families::preassigned_minima(&[-1.0, 1.0], &[0.0])),
    ];
    for (name, built) in reference_families {
        check(results, "construction", format!("construction/reference/{name}"), || {
            let fam = built.map_err(|e| e.to_string())?;
            reference_critical_check(&fam)
        });
    }
    for n in [4usize, 5] {
        check(results, "construction", format!("construction/simplex_spectra/{n}"), || {
            let fam = lib(families::simplex_vertices(n))?;
            simplex_spectra_check(&fam)
        });
    }
    check(results, "construction", "construction/prism_regimes".into(), || {
        prism_regime_check(opts)
    });
    for (tag, r_values, s_values) in [
        ("h2", vec![-1.0, 1.0], vec![0.0]),
        ("h3", vec![-2.0, 0.0, 2.0], vec![-1.0, 1.0]),
    ] {
        check(results, "construction", format!("construction/axis_identity/{tag}"), || {
            let fam = lib(families::preassigned_minima(&r_values, &s_values))?;
            let worst = lib(axis_factorization_error(&fam, 50))?;
            if worst > 1e-10 {
                return Err(format!("axis product vs P³: rel {worst:.2e} > 1e-10"));
            }
            Ok(format!("axis product matches P³ (worst rel {worst:.1e} at 50 points)"))
        });
    }
    check(results, "construction", "construction/rejects_bad_parameters".into(), || {
        reject_check()
    });
}

/// Every reference location (minima, saddles) must be a gradient zero.
fn reference_critical_check(fam: &FamilyOutput) -> CheckOutcome {
    let mut locations: Vec<Vec<f64>> = Vec::new();
    match &fam.reference {
        Reference::Hypercube { minimum, saddles, .. } => {
            locations.push(minimum.clone());
            locations.extend(saddles.iter().cloned());
        }
        Reference::Simplex { barycenter, saddles, .. } => {
            locations.push(barycenter.clone());
            locations.extend(saddles.iter().cloned());
        }
        Reference::SmallExample { minimum, saddles, .. } => {
            locations.push(minimum.clone());
            locations.extend(saddles.iter().cloned());
        }
        Reference::Prism { axial_minima, .. } => {
            locations.push(vec![0.0; fam.config.dimension()]);
            locations.extend(axial_minima.iter().cloned());
        }
        Reference::Preassigned { minima, axial_saddles, .. } => {
            locations.extend(minima.iter().cloned());
            locations.extend(axial_saddles.iter().cloned());
        }
    }
    let mut worst = 0.0f64;
    for loc in &locations {
        let x = DVector::from_row_slice(loc);
        let g = lib(potential::gradient(&fam.config, &x))?;
        worst = worst.max(g.norm());
    }
    if worst > 1e-9 {
        return Err(format!("|∇f| {worst:.2e} > 1e-9 at a reference location"));
    }
    Ok(format!("{} reference locations critical (worst |∇f| {worst:.1e})", locations.len()))
}

/// Compare a closed-form spectrum against a fresh eigendecomposition of the
/// Hessian at `location`: eigenvalues to relative `rel_tol` with the stated
/// multiplicities, and (when a direction is pinned) the eigenvector to
/// angular tolerance `angle_tol`. Returns a short metric string.
pub fn spectrum_matches(
    cfg: &PointConfiguration,
    location: &[f64],
    data: &[EigenDatum],
    rel_tol: f64,
    angle_tol: f64,
) -> std::result::Result<String, String> {
    let x = DVector::from_row_slice(location);
    let h = lib(potential::hessian(cfg, &x))?;
    let n = h.nrows();
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let scale = (0..n).map(|i| eig.eigenvalues[i].abs()).fold(0.0f64, f64::max).max(1e-300);
    let total: usize = data.iter().map(|d| d.multiplicity).sum();
    if total != n {
        return Err(format!("reference multiplicities sum to {total}, dimension is {n}"));
    }
    let mut expected: Vec<(f64, Option<&Vec<f64>>)> = Vec::new();
    let mut sorted_data: Vec<&EigenDatum> = data.iter().collect();
    sorted_data.sort_by(|a, b| a.value.total_cmp(&b.value));
    for d in sorted_data {
        for _ in 0..d.multiplicity {
            expected.push((d.value, d.direction.as_ref()));
        }
    }
    let mut worst_rel = 0.0f64;
    let mut worst_angle = 0.0f64;
    for (k, (value, direction)) in expected.iter().enumerate() {
        let got = eig.eigenvalues[order[k]];
        let rel = (got - value).abs() / value.abs().max(scale * 1e-6);
        worst_rel = worst_rel.max(rel);
        if rel > rel_tol {
            return Err(format!(
                "eigenvalue {k}: computed {got:.8e}, closed form {value:.8e} (rel {rel:.2e})"
            ));
        }
        if let Some(dir) = direction {
            // The eigenvalue may sit in a cluster (a multiplicity-m datum);
            // measure the angle to the span of the matching eigenvectors.
            let members: Vec<usize> = expected
                .iter()
                .enumerate()
                .filter(|(_, (v, _))| (v - value).abs() <= 1e-12 * scale.max(value.abs()))
                .map(|(i, _)| order[i])
                .collect();
            let d = DVector::from_row_slice(dir).normalize();
            let mut proj: f64 = 0.0;
            for &m in &members {
                let v = eig.eigenvectors.column(m);
                proj += v.dot(&d).powi(2);
            }
            let angle = proj.min(1.0).sqrt().min(1.0).acos();
            worst_angle = worst_angle.max(angle);
            if angle > angle_tol {
                return Err(format!(
                    "eigenvector for eigenvalue {value:.6e}: angle {angle:.2e} rad > {angle_tol:.1e}"
                ));
            }
        }
    }
    Ok(format!("eigen rel {worst_rel:.1e}, direction angle {worst_angle:.1e} rad"))
}

fn simplex_spectra_check(fam: &FamilyOutput) -> CheckOutcome {
    let Reference::Simplex { barycenter, saddles, barycenter_spectrum, saddle_spectrum, .. } =
        &fam.reference
    else {
        return Err("missing simplex reference".into());
    };
    let at_b =
        spectrum_matches(&fam.config, barycenter, barycenter_spectrum, 1e-6, 1e-6)?;
    let at_q = spectrum_matches(&fam.config, &saddles[0], saddle_spectrum, 1e-6, 1e-6)?;
    Ok(format!("B: {at_b}; Q_1: {at_q}"))
}

fn prism_regime_check(opts: &SolverOptions) -> CheckOutcome {
    for (a, want) in [
        (0.8, PrismRegime::Subcritical),
        (1.0, PrismRegime::Critical),
        (1.25, PrismRegime::Supercritical),
    ] {
        let fam = lib(families::triangular_prism(a))?;
        let Reference::Prism { regime, origin_nullity, axial_minima, .. } = &fam.reference
        else {
            return Err("missing prism reference".into());
        };
        if *regime != want {
            return Err(format!("a = {a}: classified {regime:?}, expected {want:?}"));
        }
        let origin = DVector::zeros(3);
        let h = lib(potential::hessian(&fam.config, &origin))?;
        let eig = h.symmetric_eigenvalues();
        let scale = eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let nullity =
            eig.iter().filter(|v| v.abs() <= 1e-6 * scale).count();
        if nullity != *origin_nullity {
            return Err(format!(
                "a = {a}: origin Hessian nullity {nullity}, reference says {origin_nullity}"
            ));
        }
        for m in axial_minima {
            let g = lib(potential::gradient(&fam.config, &DVector::from_row_slice(m)))?;
            if g.norm() > 1e-9 {
                return Err(format!("a = {a}: axial minimum {m:?} has |∇f| {:.2e}", g.norm()));
            }
        }
        if let PrismRegime::Supercritical = regime {
            let set = lib(solver::find_critical_points(&fam.config, opts))?;
            if set.h != 2 {
                return Err(format!("a = {a}: solver found h = {}, expected 2", set.h));
            }
        }
    }
    Ok("subcritical / critical / supercritical classified and verified".into())
}

/// Worst relative deviation of `F(0, …, 0, t) = ∏_k |x(t) − w_k|²` from
/// `P(t)³` over `samples` evenly spaced axis points, for a
/// preassigned-minima family.
pub fn axis_factorization_error(fam: &FamilyOutput, samples: usize) -> Result<f64> {
    let Reference::Preassigned { polynomial, .. } = &fam.reference else {
        return Err(Error::InvalidFamily(
            "axis factorization check needs a preassigned-minima family".into(),
        ));
    };
    let r_lo = polynomial.r_values[0];
    let r_hi = polynomial.r_values[polynomial.r_values.len() - 1];
    let pad = (r_hi - r_lo).max(1.0) * 0.5;
    let mut worst = 0.0f64;
    for k in 0..samples {
        let t = r_lo - pad + (r_hi - r_lo + 2.0 * pad) * k as f64 / (samples - 1) as f64;
        let x = DVector::from_row_slice(&[0.0, 0.0, t]);
        let mut product = 1.0f64;
        for w in fam.config.points() {
            product *= (&x - w).norm_squared();
        }
        let p = polynomial.eval_factors(t);
        let target = p * p * p;
        worst = worst.max((product - target).abs() / target.abs().max(1e-300));
    }
    Ok(worst)
}

fn reject_check() -> CheckOutcome {
    if families::simplex_vertices(3).is_ok() {
        return Err("simplex with n = 3 was not rejected".into());
    }
    if families::hypercube_midpoints(2).is_ok() {
        return Err("hypercube with n = 2 was not rejected".into());
    }
    if families::triangular_prism(0.0).is_ok() {
        return Err("prism with a = 0 was not rejected".into());
    }
    if families::preassigned_minima(&[-1.0, 1.0], &[2.0]).is_ok() {
        return Err("non-interleaved preassigned data was not rejected".into());
    }
    if families::preassigned_minima(&[-2000.0, 0.0, 2000.0], &[-1000.0, 1000.0]).is_ok() {
        return Err("unresolvably wide preassigned data was not rejected".into());
    }
    match PointConfiguration::from_rows(&[vec![0.0, 0.0], vec![0.0, 0.0]]) {
        Err(Error::CoincidentPoints { .. }) => {}
        _ => return Err("coincident points were not rejected".into()),
    }
    Ok("5 invalid parameter sets and coincident points rejected".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_parse() {
        assert_eq!(Suite::parse("all").unwrap(), Suite::All);
        assert_eq!(Suite::parse("core").unwrap(), Suite::Core);
        assert_eq!(Suite::parse("topology").unwrap(), Suite::Topology);
        assert_eq!(Suite::parse("construction").unwrap(), Suite::Construction);
        assert!(matches!(Suite::parse("bogus"), Err(Error::Usage(_))));
    }

    #[test]
    fn construction_suite_passes() {
        let report = run_suite(Suite::Construction, &SolverOptions::default());
        assert!(
            report.all_passed(),
            "construction failures:\n{}",
            report.format_lines()
        );
        assert!(report.results.len() >= 14);
    }

    #[test]
    fn core_suite_passes() {
        let opts = SolverOptions {
            grid_density: 6,
            random_seed_count: 120,
            ..SolverOptions::default()
        };
        let report = run_suite(Suite::Core, &opts);
        assert!(report.all_passed(), "core failures:\n{}", report.format_lines());
        // 10 families × 5 checks each.
        assert_eq!(report.results.len(), 50);
    }

    #[test]
    fn topology_suite_passes() {
        let opts = SolverOptions {
            grid_density: 6,
            random_seed_count: 120,
            ..SolverOptions::default()
        };
        let report = run_suite(Suite::Topology, &opts);
        assert!(report.all_passed(), "topology failures:\n{}", report.format_lines());
        assert_eq!(report.results.len(), 10);
    }

    #[test]
    fn input_configuration_checks_run() {
        let cfg = PointConfiguration::from_rows(&[
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.3, 0.4, 1.0],
        ])
        .unwrap();
        let report = run_on_configuration(&cfg, &SolverOptions::default());
        assert!(report.all_passed(), "input failures:\n{}", report.format_lines());
        assert_eq!(report.results.len(), 5);
    }

    #[test]
    fn junit_xml_escapes_and_counts() {
        let results = vec![
            CheckResult {
                suite: "core",
                name: "core/hull/alpha".into(),
                passed: true,
                detail: "fine".into(),
                seconds: 0.25,
            },
            CheckResult {
                suite: "core",
                name: "core/counting/beta".into(),
                passed: false,
                detail: "expected s < 3 & \"quotes\"".into(),
                seconds: 0.5,
            },
        ];
        let xml = junit_xml(&results);
        assert!(xml.starts_with("<?xml version=\"1.0\""));
        assert!(xml.contains("<testsuites tests=\"2\" failures=\"1\">"));
        assert!(xml.contains("<testsuite name=\"core\" tests=\"2\" failures=\"1\">"));
        assert!(xml.contains("core/hull/alpha"));
        assert!(xml.contains("&lt; 3 &amp; &quot;quotes&quot;"));
        assert!(!xml.contains("& \""));
        let report = VerifyReport { results };
        assert!(!report.all_passed());
        assert_eq!(report.failed_count(), 1);
        let lines = report.format_lines();
        assert!(lines.contains("[PASS] core/hull/alpha"));
        assert!(lines.contains("[FAIL] core/counting/beta"));
        assert!(lines.contains("2 checks, 1 failed"));
    }

    #[test]
    fn axis_identity_helper_rejects_other_families() {
        let fam = families::tetrahedron();
        assert!(axis_factorization_error(&fam, 10).is_err());
    }

    #[test]
    fn global_morse_perturbation_is_deterministic() {
        let fam = families::tetrahedron();
        let opts = SolverOptions {
            grid_density: 5,
            random_seed_count: 60,
            ..SolverOptions::default()
        };
        let (a, set_a) =
            global_morse_perturbation(&fam.config, 1e-3 * fam.config.scale(), &opts).unwrap();
        let (b, set_b) =
            global_morse_perturbation(&fam.config, 1e-3 * fam.config.scale(), &opts).unwrap();
        assert!(set_a.global_morse && set_b.global_morse);
        assert_eq!(set_a.h, set_b.h);
        for (p, q) in a.points().iter().zip(b.points()) {
            assert_eq!(p, q);
        }
    }
}
