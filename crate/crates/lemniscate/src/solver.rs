//! Locate, refine, deduplicate, and classify the critical points of the
//! potential; verify the counting identities; sweep parametric families for
//! bifurcations; measure stability under perturbation of the poles.
//!
//! Strategy: all critical points lie in the convex hull of the poles, and in
//! fact in their affine hull (the off-span gradient component `Σ 2y/g_k`
//! vanishes only at `y = 0`), so the search runs in orthonormal coordinates
//! on the affine span. Seeds come from a hull-filtered grid, random interior
//! samples, iterates of the hull self-map `x ↦ Σ t_k(x) w_k`, and pole-pair
//! midpoints; each seed is refined by damped Newton on `∇f` (minimizing
//! `Φ = ½|∇f|²`, for which the Newton direction is always a descent
//! direction), then survivors are deduplicated and classified by
//! eigendecomposition of the full-space Hessian.
//!
//! Completeness is empirical, not certified: the solver records its seed
//! coverage in [`Certification`] and the tests only pin inventories on
//! configurations whose critical structure is known in closed form.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{span_basis, PointConfiguration};
use crate::error::{Error, Result};
use crate::hull;
use crate::potential;

/// Solver tuning knobs. Tolerance fields are *relative* factors; the
/// quantities they scale are documented per field.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Gradient tolerance, relative to the local Hessian Frobenius norm
    /// (floored at 1e−6 so far-field plateaus cannot declare convergence).
    pub grad_tol: f64,
    /// Deduplication radius, relative to the configuration diameter.
    pub dedup_radius: f64,
    /// Eigenvalue zero threshold, relative to the largest |eigenvalue|.
    pub eig_zero_threshold: f64,
    /// Newton iteration cap per seed.
    pub max_newton_iters: usize,
    /// Grid seeds per axis (the grid is capped at 40 000 points total by
    /// lowering the effective density).
    pub grid_density: usize,
    /// Random interior seeds.
    pub random_seed_count: usize,
    /// Seeds produced by iterating the hull self-map from random starts.
    pub fixed_point_seed_count: usize,
    /// Seed for all solver randomness; identical options and inputs produce
    /// a bitwise-identical [`CriticalSet`].
    pub rng_seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-11,
            dedup_radius: 1e-6,
            eig_zero_threshold: 1e-8,
            max_newton_iters: 100,
            grid_density: 8,
            random_seed_count: 200,
            fixed_point_seed_count: 50,
            rng_seed: 0,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        if self.grad_tol <= 0.0
            || self.dedup_radius <= 0.0
            || self.eig_zero_threshold <= 0.0
            || self.max_newton_iters == 0
        {
            return Err(Error::SolverFailure("solver tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Classification of one critical point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    /// A pole `w_j` — an absolute minimum where `f = −∞`.
    AbsoluteMinimum,
    /// Nondegenerate, negativity 0.
    LocalMinimum,
    /// Nondegenerate, negativity 1.
    Saddle,
    /// Hessian has nullity > 0 at threshold.
    Degenerate,
}

impl CriticalKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CriticalKind::AbsoluteMinimum => "absolute_minimum",
            CriticalKind::LocalMinimum => "local_minimum",
            CriticalKind::Saddle => "saddle",
            CriticalKind::Degenerate => "degenerate",
        }
    }
}

/// One critical point with its classification data.
#[derive(Debug, Clone)]
pub struct CriticalPoint {
    /// Location in the original (full-dimensional) coordinates.
    pub location: DVector<f64>,
    /// `f` at the location; `None` encodes `−∞` (poles).
    pub value: Option<f64>,
    /// `|∇f|` residual. Poles are listed by fiat with residual 0.
    pub grad_norm: f64,
    /// Sorted ascending eigenvalues of the full-space Hessian; empty for
    /// poles.
    pub spectrum: Vec<f64>,
    /// Count of eigenvalues `< −ε`.
    pub negativity: usize,
    /// Count of eigenvalues with `|λ| ≤ ε`.
    pub nullity: usize,
    pub kind: CriticalKind,
}

impl CriticalPoint {
    /// Eigenvalues `> ε`.
    pub fn positivity(&self) -> usize {
        self.spectrum.len() - self.negativity - self.nullity
    }
}

/// Solver diagnostics recorded with every [`CriticalSet`].
#[derive(Debug, Clone, Default)]
pub struct Certification {
    pub grid_seeds: usize,
    pub random_seeds: usize,
    pub fixed_point_seeds: usize,
    pub midpoint_seeds: usize,
    pub seeds_total: usize,
    pub seeds_converged: usize,
    pub seeds_dropped: usize,
    /// Worst `|∇f|` among kept non-pole points.
    pub max_grad_residual: f64,
    /// Absolute dedup radius used.
    pub dedup_radius: f64,
    pub rng_seed: u64,
    /// Two kept points were suspiciously close (< 10× dedup radius):
    /// possible non-convergence cluster.
    pub near_duplicate_warning: bool,
}

/// The full critical inventory of one configuration.
#[derive(Debug, Clone)]
pub struct CriticalSet {
    /// Poles first (input order), then non-pole points sorted by value.
    pub points: Vec<CriticalPoint>,
    /// Number of poles.
    pub r: usize,
    /// Non-absolute local minima.
    pub h: usize,
    /// Nondegenerate saddles.
    pub saddles: usize,
    /// True when no non-pole critical point is degenerate.
    pub local_morse: bool,
    /// `local_morse` and all non-pole critical values pairwise distinct
    /// beyond 1e−9 of the value spread.
    pub global_morse: bool,
    /// Dimension of the affine span of the poles.
    pub span_dim: usize,
    pub certification: Certification,
}

impl CriticalSet {
    /// Non-pole critical points.
    pub fn interior_points(&self) -> impl Iterator<Item = &CriticalPoint> {
        self.points.iter().filter(|p| p.kind != CriticalKind::AbsoluteMinimum)
    }

    pub fn minima(&self) -> impl Iterator<Item = &CriticalPoint> {
        self.points.iter().filter(|p| p.kind == CriticalKind::LocalMinimum)
    }

    pub fn saddle_points(&self) -> impl Iterator<Item = &CriticalPoint> {
        self.points.iter().filter(|p| p.kind == CriticalKind::Saddle)
    }
}

// ---------------------------------------------------------------------------
// Reduced (affine-span) coordinates
// ---------------------------------------------------------------------------

struct SpanChart {
    origin: DVector<f64>,
    /// N×d orthonormal basis of the span.
    basis: DMatrix<f64>,
}

impl SpanChart {
    fn new(cfg: &PointConfiguration) -> Self {
        SpanChart { origin: cfg.barycenter(), basis: span_basis(cfg) }
    }

    fn dim(&self) -> usize {
        self.basis.ncols()
    }

    fn to_reduced(&self, x: &DVector<f64>) -> DVector<f64> {
        self.basis.transpose() * (x - &self.origin)
    }

    fn to_full(&self, xi: &DVector<f64>) -> DVector<f64> {
        &self.origin + &self.basis * xi
    }
}

// ---------------------------------------------------------------------------
// Newton refinement
// ---------------------------------------------------------------------------

struct Refined {
    location: DVector<f64>, // reduced coordinates
    grad_norm: f64,
    converged: bool,
    hit_pole: bool,
}

/// Full (undamped) Newton steps after the relative tolerance fires, kept
/// only while they monotonically shrink `|∇f|`. Near a nondegenerate
/// critical point the first step bottoms out at machine precision and the
/// loop exits immediately; near a *degenerate* one (where `|∇f|` vanishes
/// to higher order, so the relative test fires while the iterate is still
/// far out) Newton contracts geometrically and this walks the remaining
/// distance, letting such seeds collapse to one deduplicable point.
fn polish_full_newton(
    cfg: &PointConfiguration,
    mut x: DVector<f64>,
    mut grad_norm: f64,
) -> (DVector<f64>, f64) {
    let diam = cfg.scale();
    for _ in 0..60 {
        let (g, h) = match (potential::gradient(cfg, &x), potential::hessian(cfg, &x)) {
            (Ok(g), Ok(h)) => (g, h),
            _ => break,
        };
        let Some(d) = h.lu().solve(&(-&g)) else { break };
        if !d.iter().all(|v| v.is_finite()) || d.norm() > 0.1 * diam {
            break;
        }
        let cand = &x + &d;
        let inside = hull::hull_membership(cfg, &cand)
            .map(|m| m.margin >= -1e-6 * diam)
            .unwrap_or(false);
        if !inside {
            break;
        }
        let Ok(gc) = potential::gradient(cfg, &cand) else { break };
        let gn = gc.norm();
        if gn < 0.95 * grad_norm {
            x = cand;
            grad_norm = gn;
        } else {
            break;
        }
    }
    (x, grad_norm)
}

/// Damped Newton on ∇f, minimizing Φ = ½|∇f|². The Newton direction
/// d = −H⁻¹g satisfies ⟨∇Φ, d⟩ = −|g|² < 0, so it is always a descent
/// direction for Φ; when H is numerically singular or the step exits the
/// slightly inflated hull, the fallback is steepest descent on Φ
/// (direction −Hg).
fn refine_newton(
    cfg: &PointConfiguration,
    start: &DVector<f64>,
    opts: &SolverOptions,
) -> Refined {
    let diam = cfg.scale();
    // Keep iterates inside a slightly inflated bounding box. This guard only
    // prevents far-field excursions during the line search (an exact — and
    // much more expensive — hull-membership test gates every *converged*
    // point in the caller; no gradient zero exists outside the hull, so
    // nothing can converge in the box–hull gap).
    let (box_lo, box_hi) = cfg.bounding_box();
    let box_margin = 1e-3 * diam;
    let inside_box = |p: &DVector<f64>| -> bool {
        p.iter()
            .zip(box_lo.iter().zip(box_hi.iter()))
            .all(|(v, (l, h))| *v >= l - box_margin && *v <= h + box_margin)
    };
    let mut x = start.clone();
    let mut grad_norm = f64::INFINITY;
    for _ in 0..opts.max_newton_iters {
        let (g, h) = match (potential::gradient(cfg, &x), potential::hessian(cfg, &x)) {
            (Ok(g), Ok(h)) => (g, h),
            _ => return Refined { location: x, grad_norm, converged: false, hit_pole: true },
        };
        grad_norm = g.norm();
        let h_scale = h.norm().max(1e-6);
        if grad_norm <= opts.grad_tol * h_scale {
            let polished = polish_full_newton(cfg, x, grad_norm);
            return Refined {
                location: polished.0,
                grad_norm: polished.1,
                converged: true,
                hit_pole: false,
            };
        }
        let phi = 0.5 * grad_norm * grad_norm;
        // Newton direction, falling back to −Hg.
        let newton = h.clone().lu().solve(&(-&g));
        let mut accepted = false;
        let mut directions: Vec<DVector<f64>> = Vec::new();
        if let Some(d) = newton {
            if d.iter().all(|v| v.is_finite()) {
                directions.push(d);
            }
        }
        directions.push(-(&h * &g));
        'dirs: for d in directions {
            let dn = d.norm();
            if dn == 0.0 || !dn.is_finite() {
                continue;
            }
            // Cap the step at one diameter to avoid far-field excursions.
            let d = if dn > diam { d * (diam / dn) } else { d };
            let mut alpha = 1.0;
            for _ in 0..40 {
                let cand = &x + &d * alpha;
                if inside_box(&cand) {
                    if let Ok(gc) = potential::gradient(cfg, &cand) {
                        let phi_c = 0.5 * gc.norm_squared();
                        if phi_c <= phi * (1.0 - 1e-4 * alpha) {
                            x = cand;
                            accepted = true;
                            break 'dirs;
                        }
                    }
                }
                alpha *= 0.5;
            }
        }
        if !accepted {
            // Stuck: no direction made progress.
            return Refined {
                location: x,
                grad_norm,
                converged: grad_norm <= opts.grad_tol * h_scale,
                hit_pole: false,
            };
        }
    }
    let converged = potential::gradient(cfg, &x)
        .map(|g| {
            grad_norm = g.norm();
            let h_scale =
                potential::hessian(cfg, &x).map(|h| h.norm()).unwrap_or(1.0).max(1e-6);
            grad_norm <= opts.grad_tol * h_scale
        })
        .unwrap_or(false);
    if converged {
        let polished = polish_full_newton(cfg, x, grad_norm);
        x = polished.0;
        grad_norm = polished.1;
    }
    Refined { location: x, grad_norm, converged, hit_pole: false }
}

// ---------------------------------------------------------------------------
// Seeding
// ---------------------------------------------------------------------------

fn seed_points(
    red: &PointConfiguration,
    opts: &SolverOptions,
    cert: &mut Certification,
) -> Vec<DVector<f64>> {
    let d = red.dimension();
    let mut seeds: Vec<DVector<f64>> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    let (lo, hi) = red.bounding_box();

    // (a) Regular grid over the bounding box, hull-filtered, with the total
    // budget capped by lowering the per-axis density. The budget drops
    // sharply in dimension ≥ 4, where a dense grid is both slow (the hull
    // filter is an exact membership test) and ineffective (for thin hulls it
    // rejects nearly every node), so completeness rests on the structural
    // seeds below plus counting-identity escalation in the caller.
    let grid_budget = if d >= 4 { 1_500.0 } else { 40_000.0 };
    let mut density = opts.grid_density.max(2);
    while density > 2 && (density as f64).powi(d as i32) > grid_budget {
        density -= 1;
    }
    let mut idx = vec![0usize; d];
    loop {
        let x = DVector::from_fn(d, |i, _| {
            lo[i] + (hi[i] - lo[i]) * idx[i] as f64 / (density - 1) as f64
        });
        if let Ok(m) = hull::hull_membership(red, &x) {
            if m.inside {
                seeds.push(x);
            }
        }
        // Odometer increment.
        let mut carry = 0;
        while carry < d {
            idx[carry] += 1;
            if idx[carry] < density {
                break;
            }
            idx[carry] = 0;
            carry += 1;
        }
        if carry == d {
            break;
        }
    }
    cert.grid_seeds = seeds.len();

    // (b) Random convex combinations structured around the hull's faces:
    // pick a random subset of poles (size 1 … min(r, d+2)), flat random
    // weights on it, then blend toward the barycenter. Small subsets land
    // near vertices/edges/low faces, which uniform box sampling essentially
    // never reaches in higher dimension; every sample lies in the hull by
    // construction, so no membership test is needed.
    let bary = red.barycenter();
    let mut pole_order: Vec<usize> = (0..red.len()).collect();
    for _ in 0..opts.random_seed_count {
        let m = rng.random_range(1..=red.len().min(d + 2));
        // Partial Fisher–Yates: the first m entries become a random subset.
        for k in 0..m {
            let j = rng.random_range(k..pole_order.len());
            pole_order.swap(k, j);
        }
        let mut weights: Vec<f64> =
            (0..m).map(|_| -f64::ln(rng.random_range(1e-12..1.0))).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let mut face = DVector::zeros(d);
        for (w, &i) in weights.iter().zip(&pole_order) {
            face += &red.points()[i] * *w;
        }
        let t = rng.random_range(0.0..1.0f64);
        seeds.push(&face * (1.0 - t) + &bary * t);
    }
    cert.random_seeds = opts.random_seed_count;

    // (c) Iterates of the hull self-map from random interior starts.
    for _ in 0..opts.fixed_point_seed_count {
        let mut weights: Vec<f64> =
            (0..red.len()).map(|_| -f64::ln(rng.random_range(1e-12..1.0))).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let mut x = DVector::zeros(d);
        for (w, p) in weights.iter().zip(red.points()) {
            x += p * *w;
        }
        if let Ok(fp) = fixed_point_iterate(red, &x, 30) {
            // Skip iterates that collapsed onto a pole (poles attract the
            // self-map); they carry no seed information.
            if red.nearest_point(&fp).1 > 1e-6 * red.scale() {
                seeds.push(fp);
            }
        }
    }
    cert.fixed_point_seeds = seeds.len() - cert.grid_seeds - cert.random_seeds;

    // (d) Structural segment seeds. Saddles of symmetric families sit on
    // the segments joining poles to each other and to the barycenter, where
    // grids (hull-filtered) and random samples are at their sparsest, so
    // those segments are seeded directly.
    let before = seeds.len();
    for i in 0..red.len() {
        for j in i + 1..red.len() {
            for t in [0.25, 0.5, 0.75] {
                seeds.push(&red.points()[i] * (1.0 - t) + &red.points()[j] * t);
            }
        }
    }
    for p in red.points() {
        for t in [0.15, 0.3, 0.5, 0.7, 0.85] {
            seeds.push(p * (1.0 - t) + &bary * t);
        }
    }
    seeds.push(bary);
    cert.midpoint_seeds = seeds.len() - before;
    cert.seeds_total = seeds.len();
    seeds
}

/// Rescue seeds for a round whose harvest failed the counting identity:
/// segments between every pair of (pole, located critical point) anchors —
/// a missed saddle usually sits between two located neighbours — plus a
/// fresh batch of random convex combinations.
fn escalation_seeds(
    red: &PointConfiguration,
    reps: &[(DVector<f64>, f64)],
    opts: &SolverOptions,
    rng: &mut ChaCha8Rng,
    cert: &mut Certification,
) -> Vec<DVector<f64>> {
    let mut anchors: Vec<DVector<f64>> = red.points().to_vec();
    anchors.extend(reps.iter().map(|(x, _)| x.clone()));
    let mut seeds = Vec::new();
    for i in 0..anchors.len() {
        for j in i + 1..anchors.len() {
            for t in [0.2, 0.35, 0.5, 0.65, 0.8] {
                seeds.push(&anchors[i] * (1.0 - t) + &anchors[j] * t);
            }
        }
    }
    cert.midpoint_seeds += seeds.len();
    let d = red.dimension();
    let extra = opts.random_seed_count.max(100);
    for _ in 0..extra {
        let mut weights: Vec<f64> =
            (0..red.len()).map(|_| -f64::ln(rng.random_range(1e-12..1.0))).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let mut x = DVector::zeros(d);
        for (w, p) in weights.iter().zip(red.points()) {
            x += p * *w;
        }
        seeds.push(x);
    }
    cert.random_seeds += extra;
    cert.seeds_total += seeds.len();
    seeds
}

/// Counting-identity check on a candidate harvest, used to decide whether
/// another seeding round is worthwhile. Classification uses the *reduced*
/// Hessian: on the affine span the ambient Hessian splits into the reduced
/// block plus a positive-definite transverse block, so negativity and
/// nullity agree with the ambient classification. Returns `Ok(true)` (stop
/// escalating) when the identity holds or when a degenerate /
/// multi-negative point shows up — more seeds cannot cure either.
fn counting_identity_holds(
    red: &PointConfiguration,
    reps: &[(DVector<f64>, f64)],
    opts: &SolverOptions,
) -> Result<bool> {
    let mut h = 0usize;
    let mut s = 0usize;
    for (x, _) in reps {
        let hess = potential::hessian(red, x)?;
        let eig = hess.symmetric_eigenvalues();
        let scale = eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let thr = opts.eig_zero_threshold * scale.max(1e-300);
        if eig.iter().any(|&v| v.abs() <= thr) {
            return Ok(true);
        }
        match eig.iter().filter(|&&v| v < 0.0).count() {
            0 => h += 1,
            1 => s += 1,
            _ => return Ok(true),
        }
    }
    let r = red.len();
    Ok(if red.dimension() >= 3 { s == r + h - 1 } else { h == 0 && s == r - 1 })
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

/// One application of the hull self-map `T(x) = Σ t_k(x) w_k` with
/// `t_k = g_k⁻¹/Σ g_j⁻¹`: its fixed points are exactly the critical points
/// of `f` (plus the poles, which attract). Used as a cheap seed generator.
/// An iterate landing on a pole restarts from a deterministically jittered
/// position.
pub fn fixed_point_iterate(
    cfg: &PointConfiguration,
    x0: &DVector<f64>,
    iters: usize,
) -> Result<DVector<f64>> {
    if x0.len() != cfg.dimension() {
        return Err(Error::DimensionMismatch { expected: cfg.dimension(), got: x0.len() });
    }
    let guard = crate::config::POLE_GUARD_REL * cfg.scale();
    let bary = cfg.barycenter();
    let mut x = x0.clone();
    let mut restarts = 0usize;
    let mut i = 0usize;
    while i < iters {
        let weights = match potential::barycentric_weights(cfg, &x) {
            Ok(w) => w,
            Err(_) => {
                // Pole hit: jitter deterministically toward the barycenter
                // plus a small axis offset, then retry this iteration.
                restarts += 1;
                if restarts > 32 {
                    return Err(Error::SolverFailure(
                        "fixed-point iteration keeps hitting poles".into(),
                    ));
                }
                let axis = restarts % cfg.dimension();
                x = &x + (&bary - &x) * 1e-3;
                x[axis] += guard.max(1e-12) * 1e3 * if restarts % 2 == 0 { 1.0 } else { -1.0 };
                continue;
            }
        };
        let mut next = DVector::zeros(cfg.dimension());
        for (t, w) in weights.iter().zip(cfg.points()) {
            next += w * *t;
        }
        x = next;
        i += 1;
    }
    Ok(x)
}

/// Classify a point (assumed critical: `|∇f(x)|` below tolerance) by
/// eigendecomposition of the full-space Hessian.
///
/// Enforces the spectral constraints every nondegenerate critical point of
/// the potential must satisfy — negativity ≤ 1, hence positivity ≥ N−1 —
/// and returns a hard error when they fail; with a correct solver that can
/// only mean a software or input defect, so it is never downgraded to a
/// warning.
pub fn classify(
    cfg: &PointConfiguration,
    x: &DVector<f64>,
    opts: &SolverOptions,
) -> Result<CriticalPoint> {
    let g = potential::gradient(cfg, x)?;
    let h = potential::hessian(cfg, x)?;
    let eig = h.symmetric_eigen();
    let mut spectrum: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    spectrum.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let eps = opts.eig_zero_threshold * spectrum.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let negativity = spectrum.iter().filter(|&&v| v < -eps).count();
    let nullity = spectrum.iter().filter(|&&v| v.abs() <= eps).count();
    if negativity > 1 {
        return Err(Error::TheoremViolation(format!(
            "negativity {negativity} > 1 at {:?} (spectrum {spectrum:?})",
            x.as_slice()
        )));
    }
    let n = cfg.dimension();
    let positivity = n - negativity - nullity;
    if nullity == 0 && positivity < n - 1 {
        return Err(Error::TheoremViolation(format!(
            "positivity {positivity} < {} at a nondegenerate critical point",
            n - 1
        )));
    }
    let kind = if nullity > 0 {
        CriticalKind::Degenerate
    } else if negativity == 0 {
        CriticalKind::LocalMinimum
    } else {
        CriticalKind::Saddle
    };
    let value = potential::eval(cfg, x)?;
    Ok(CriticalPoint {
        location: x.clone(),
        value: value.log_value.is_finite().then_some(value.log_value),
        grad_norm: g.norm(),
        spectrum,
        negativity,
        nullity,
        kind,
    })
}

/// Find and classify every critical point of the potential of `cfg`.
///
/// The poles are included as absolute minima by fiat. Every returned
/// non-pole point satisfies the gradient tolerance and lies in the convex
/// hull with margin ≥ −1e−9·diameter (a refined point outside the hull is a
/// hard error — it would contradict the containment theorem). Identical
/// inputs and options produce a bitwise-identical result.
pub fn find_critical_points(
    cfg: &PointConfiguration,
    opts: &SolverOptions,
) -> Result<CriticalSet> {
    opts.validate()?;
    let chart = SpanChart::new(cfg);
    let d = chart.dim();
    let diam = cfg.scale();
    let mut cert = Certification {
        dedup_radius: opts.dedup_radius * diam,
        rng_seed: opts.rng_seed,
        ..Default::default()
    };

    let mut interior: Vec<CriticalPoint> = Vec::new();
    if d > 0 {
        // Reduced configuration: same pairwise distances, full-dimensional.
        let red = PointConfiguration::new(
            cfg.points().iter().map(|p| chart.to_reduced(p)).collect(),
        )?;
        let value_of = |x: &DVector<f64>| -> f64 {
            potential::eval(&red, x).map(|v| v.log_value).unwrap_or(f64::NEG_INFINITY)
        };
        let mut rescue_rng = ChaCha8Rng::seed_from_u64(opts.rng_seed.wrapping_add(0x5e9));
        let mut kept: Vec<(DVector<f64>, f64)> = Vec::new();
        let mut reps: Vec<(DVector<f64>, f64)> = Vec::new();
        // Seed → refine → dedup; then, whenever the harvest fails the
        // counting identity (s = r + h − 1, planar s = r − 1) without a
        // degenerate point to excuse it, re-seed along segments between the
        // points found so far and try again.
        for round in 0..3 {
            let seeds = if round == 0 {
                seed_points(&red, opts, &mut cert)
            } else {
                escalation_seeds(&red, &reps, opts, &mut rescue_rng, &mut cert)
            };
            let refined: Vec<Refined> = seeds
                .par_iter()
                .map(|s| refine_newton(&red, s, opts))
                .collect();
            for r in refined {
                if !r.converged || r.hit_pole {
                    cert.seeds_dropped += 1;
                    continue;
                }
                // Seeds that converged onto a pole of the reduced
                // configuration are the poles themselves, listed separately.
                if red.nearest_point(&r.location).1 <= cert.dedup_radius {
                    cert.seeds_dropped += 1;
                    continue;
                }
                cert.seeds_converged += 1;
                let m = hull::hull_membership(&red, &r.location)?;
                if m.margin < -1e-9 * diam {
                    return Err(Error::HullViolation { margin: m.margin });
                }
                kept.push((r.location, r.grad_norm));
            }

            // Deterministic dedup: sort by (value, lexicographic location),
            // then greedily merge within the dedup radius, keeping the
            // smallest residual as representative.
            kept.sort_by(|a, b| {
                let va = value_of(&a.0);
                let vb = value_of(&b.0);
                va.total_cmp(&vb).then_with(|| {
                    for (x, y) in a.0.iter().zip(b.0.iter()) {
                        let c = x.total_cmp(y);
                        if c != std::cmp::Ordering::Equal {
                            return c;
                        }
                    }
                    std::cmp::Ordering::Equal
                })
            });
            reps.clear();
            for (x, res) in &kept {
                match reps
                    .iter_mut()
                    .find(|(r, _)| (r as &DVector<f64> - x).norm() <= cert.dedup_radius)
                {
                    Some(slot) => {
                        if *res < slot.1 {
                            *slot = (x.clone(), *res);
                        }
                    }
                    None => reps.push((x.clone(), *res)),
                }
            }

            if counting_identity_holds(&red, &reps, opts)? {
                break;
            }
        }
        // Near-duplicate sanity: kept points closer than 10× the dedup
        // radius suggest a non-converged cluster.
        for i in 0..reps.len() {
            for j in i + 1..reps.len() {
                if (&reps[i].0 - &reps[j].0).norm() < 10.0 * cert.dedup_radius {
                    cert.near_duplicate_warning = true;
                }
            }
        }

        for (xi, _res) in reps {
            let x_full = chart.to_full(&xi);
            let cp = classify(cfg, &x_full, opts)?;
            cert.max_grad_residual = cert.max_grad_residual.max(cp.grad_norm);
            interior.push(cp);
        }
        interior.sort_by(|a, b| {
            let va = a.value.unwrap_or(f64::NEG_INFINITY);
            let vb = b.value.unwrap_or(f64::NEG_INFINITY);
            va.total_cmp(&vb).then_with(|| {
                for (x, y) in a.location.iter().zip(b.location.iter()) {
                    let c = x.total_cmp(y);
                    if c != std::cmp::Ordering::Equal {
                        return c;
                    }
                }
                std::cmp::Ordering::Equal
            })
        });
    }

    let mut points: Vec<CriticalPoint> = cfg
        .points()
        .iter()
        .map(|w| CriticalPoint {
            location: w.clone(),
            value: None,
            grad_norm: 0.0,
            spectrum: Vec::new(),
            negativity: 0,
            nullity: 0,
            kind: CriticalKind::AbsoluteMinimum,
        })
        .collect();
    points.extend(interior);

    let r = cfg.len();
    let h = points.iter().filter(|p| p.kind == CriticalKind::LocalMinimum).count();
    let saddles = points.iter().filter(|p| p.kind == CriticalKind::Saddle).count();
    let degenerate = points.iter().filter(|p| p.kind == CriticalKind::Degenerate).count();
    let local_morse = degenerate == 0;
    let values: Vec<f64> =
        points.iter().filter_map(|p| p.value).filter(|v| v.is_finite()).collect();
    let global_morse = local_morse && {
        let spread = values.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v))
            - values.iter().fold(f64::INFINITY, |m, v| m.min(*v));
        let gap_tol = 1e-9 * spread.max(1e-300);
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted.windows(2).all(|w| (w[1] - w[0]).abs() > gap_tol) || sorted.len() < 2
    };

    Ok(CriticalSet {
        points,
        r,
        h,
        saddles,
        local_morse,
        global_morse,
        span_dim: d,
        certification: cert,
    })
}

/// The verdict of the critical-point counting identity.
#[derive(Debug, Clone)]
pub struct MorseSummary {
    pub r: usize,
    pub h: usize,
    pub saddles: usize,
    pub span_dim: usize,
    /// The count the identity predicts.
    pub expected_saddles: usize,
    /// Human-readable statement of the identity that applied.
    pub relation: String,
}

/// Check the counting identity of a local-Morse critical set: `s = r + h − 1`
/// when the affine span has dimension ≥ 3; in the planar/collinear case
/// `h = 0` and `s = r − 1` (the critical points are the roots of the
/// derivative of the associated complex polynomial).
pub fn morse_report(set: &CriticalSet) -> Result<MorseSummary> {
    if !set.local_morse {
        return Err(Error::SolverFailure(
            "morse_report requires a local Morse critical set (degenerate points present)".into(),
        ));
    }
    let (expected, relation) = if set.span_dim >= 3 {
        (set.r + set.h - 1, format!("s = r + h - 1 = {} + {} - 1", set.r, set.h))
    } else {
        (set.r - 1, format!("s = r - 1 = {} - 1 (planar), h = 0", set.r))
    };
    let h_ok = set.span_dim >= 3 || set.h == 0;
    if set.saddles != expected || !h_ok {
        let inventory: Vec<String> = set
            .points
            .iter()
            .map(|p| {
                format!(
                    "{} at {:?} (neg {}, null {})",
                    p.kind.as_str(),
                    p.location.as_slice(),
                    p.negativity,
                    p.nullity
                )
            })
            .collect();
        return Err(Error::TheoremViolation(format!(
            "count mismatch: saddles = {}, expected {relation} = {expected}, h = {}; inventory:\n  {}",
            set.saddles,
            set.h,
            inventory.join("\n  ")
        )));
    }
    Ok(MorseSummary {
        r: set.r,
        h: set.h,
        saddles: set.saddles,
        span_dim: set.span_dim,
        expected_saddles: expected,
        relation,
    })
}

/// A parameter range `start:stop:step` for [`bifurcation_sweep`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
            return Err(Error::BadRange(format!("{start}:{stop}:{step}")));
        }
        if (stop - start) / step > 10_000.0 {
            return Err(Error::BadRange(format!(
                "{start}:{stop}:{step} yields more than 10000 samples"
            )));
        }
        Ok(Self { start, stop, step })
    }

    pub fn samples(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let n = ((self.stop - self.start) / self.step).round() as usize;
        for i in 0..=n {
            let a = self.start + self.step * i as f64;
            if a <= self.stop + 1e-12 * self.step {
                out.push(a.min(self.stop));
            }
        }
        out
    }
}

/// One parameter sample of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub parameter: f64,
    pub r: usize,
    pub h: usize,
    pub saddles: usize,
    pub degenerate: usize,
    /// Smallest |λ_min| over the tracked non-pole points — dips toward zero
    /// near a bifurcation.
    pub min_abs_lambda: f64,
}

/// A located bifurcation: the parameter where a tracked critical point's
/// smallest Hessian eigenvalue changes sign, refined by bisection.
#[derive(Debug, Clone)]
pub struct Bifurcation {
    pub parameter: f64,
    /// Location of the degenerating critical point at the bifurcation.
    pub location: DVector<f64>,
}

/// Sweep result: per-sample inventories, refined bifurcation parameters, and
/// any branch-tracking losses.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub bifurcations: Vec<Bifurcation>,
    pub tracking_losses: Vec<String>,
}

struct Branch {
    location: DVector<f64>, // current full-space location
    lambda_min: f64,
    parameter: f64,
    alive: bool,
}

fn lambda_min(cfg: &PointConfiguration, x: &DVector<f64>) -> Result<f64> {
    let h = potential::hessian(cfg, x)?;
    Ok(h.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Re-locate a tracked critical point of `cfg` starting from `near` (full
/// coordinates), returning its refined full-space location.
fn continue_point(
    cfg: &PointConfiguration,
    near: &DVector<f64>,
    opts: &SolverOptions,
) -> Result<DVector<f64>> {
    let chart = SpanChart::new(cfg);
    let red = PointConfiguration::new(
        cfg.points().iter().map(|p| chart.to_reduced(p)).collect(),
    )?;
    let r = refine_newton(&red, &chart.to_reduced(near), opts);
    if !r.converged {
        return Err(Error::SolverFailure(format!(
            "continuation from {:?} did not converge (|grad| = {:.3e})",
            near.as_slice(),
            r.grad_norm
        )));
    }
    Ok(chart.to_full(&r.location))
}

/// Track the critical points of the family `cfg(a)` across `range` and
/// refine every sign change of a tracked point's smallest Hessian eigenvalue
/// to 1e−6 in the parameter. Branches are continued by nearest neighbor
/// between adjacent samples; a jump above 10× the median step movement is a
/// tracking loss, reported rather than silently bridged.
pub fn bifurcation_sweep<F>(
    family: F,
    range: SweepRange,
    opts: &SolverOptions,
) -> Result<SweepResult>
where
    F: Fn(f64) -> Result<PointConfiguration>,
{
    let samples = range.samples();
    if samples.len() < 2 {
        return Err(Error::BadRange("sweep needs at least two samples".into()));
    }
    let mut rows = Vec::with_capacity(samples.len());
    let mut branches: Vec<Branch> = Vec::new();
    let mut losses: Vec<String> = Vec::new();
    let mut events: Vec<(f64, f64, DVector<f64>)> = Vec::new(); // (a_lo, a_hi, loc at lo)

    for (si, &a) in samples.iter().enumerate() {
        let cfg = family(a)?;
        let set = find_critical_points(&cfg, opts)?;
        let pts: Vec<&CriticalPoint> =
            set.points.iter().filter(|p| p.kind != CriticalKind::AbsoluteMinimum).collect();
        let degenerate =
            pts.iter().filter(|p| p.kind == CriticalKind::Degenerate).count();
        let min_abs_lambda = pts
            .iter()
            .filter_map(|p| p.spectrum.first())
            .map(|l| l.abs())
            .fold(f64::INFINITY, f64::min);
        rows.push(SweepRow {
            parameter: a,
            r: set.r,
            h: set.h,
            saddles: set.saddles,
            degenerate,
            min_abs_lambda,
        });

        if si == 0 {
            for p in &pts {
                branches.push(Branch {
                    location: p.location.clone(),
                    lambda_min: p.spectrum.first().copied().unwrap_or(f64::INFINITY),
                    parameter: a,
                    alive: true,
                });
            }
            continue;
        }

        // Greedy nearest-neighbor matching, deterministic.
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (bi, b) in branches.iter().enumerate() {
            if !b.alive {
                continue;
            }
            for (pi, p) in pts.iter().enumerate() {
                pairs.push(((&b.location - &p.location).norm(), bi, pi));
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        let mut branch_taken = vec![false; branches.len()];
        let mut point_taken = vec![false; pts.len()];
        let mut moves: Vec<f64> = Vec::new();
        let mut matches: Vec<(usize, usize, f64)> = Vec::new();
        for (dist, bi, pi) in pairs {
            if branch_taken[bi] || point_taken[pi] {
                continue;
            }
            branch_taken[bi] = true;
            point_taken[pi] = true;
            moves.push(dist);
            matches.push((bi, pi, dist));
        }
        let median_move = {
            let mut m = moves.clone();
            m.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if m.is_empty() { 0.0 } else { m[m.len() / 2] }
        };
        let jump_tol = (10.0 * median_move).max(1e-6 * family(a)?.scale());

        for (bi, pi, dist) in matches {
            if dist > jump_tol {
                branches[bi].alive = false;
                losses.push(format!(
                    "branch at {:?} jumped {dist:.3e} (> {jump_tol:.3e}) between a = {} and a = {a}",
                    branches[bi].location.as_slice(),
                    branches[bi].parameter
                ));
                continue;
            }
            let new_lambda = pts[pi].spectrum.first().copied().unwrap_or(f64::INFINITY);
            let old = &branches[bi];
            if old.lambda_min * new_lambda < 0.0 {
                events.push((old.parameter, a, old.location.clone()));
            }
            branches[bi].location = pts[pi].location.clone();
            branches[bi].lambda_min = new_lambda;
            branches[bi].parameter = a;
        }
        for (bi, taken) in branch_taken.iter().enumerate() {
            if !taken && branches[bi].alive {
                branches[bi].alive = false;
            }
        }
        for (pi, taken) in point_taken.iter().enumerate() {
            if !taken {
                branches.push(Branch {
                    location: pts[pi].location.clone(),
                    lambda_min: pts[pi].spectrum.first().copied().unwrap_or(f64::INFINITY),
                    parameter: a,
                    alive: true,
                });
            }
        }
    }

    // Bisection refinement of each sign-change event to 1e−6 in parameter.
    let mut bifurcations: Vec<Bifurcation> = Vec::new();
    'events: for (mut a_lo, mut a_hi, mut loc) in events {
        let cfg_lo = family(a_lo)?;
        let mut sign_lo = lambda_min(&cfg_lo, &continue_point(&cfg_lo, &loc, opts)?)?.signum();
        while a_hi - a_lo > 1e-6 {
            let mid = 0.5 * (a_lo + a_hi);
            let cfg_mid = family(mid)?;
            let x_mid = match continue_point(&cfg_mid, &loc, opts) {
                Ok(x) => x,
                Err(e) => {
                    losses.push(format!("bisection lost the branch at a = {mid}: {e}"));
                    continue 'events;
                }
            };
            let l_mid = lambda_min(&cfg_mid, &x_mid)?;
            if l_mid.signum() == sign_lo && l_mid != 0.0 {
                a_lo = mid;
                sign_lo = l_mid.signum();
            } else {
                a_hi = mid;
            }
            loc = x_mid;
        }
        let a_star = 0.5 * (a_lo + a_hi);
        // Deduplicate events that refined to the same parameter.
        if !bifurcations.iter().any(|b| (b.parameter - a_star).abs() < 1e-5) {
            bifurcations.push(Bifurcation { parameter: a_star, location: loc });
        }
    }
    bifurcations.sort_by(|a, b| a.parameter.partial_cmp(&b.parameter).unwrap());

    Ok(SweepResult { rows, bifurcations, tracking_losses: losses })
}

/// Result of a perturbation-stability experiment.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub base_h: usize,
    pub trials: usize,
    /// Trials whose perturbed configuration kept `h` local minima.
    pub h_preserved: usize,
    /// Trials whose perturbed configuration was global Morse.
    pub global_morse_count: usize,
    pub delta: f64,
    /// Crude stability-radius estimate: a quarter of the minimal distance
    /// between distinct critical points. δ far below this should always
    /// preserve `h`.
    pub stability_radius_estimate: f64,
}

/// Perturb every pole independently by a uniform random vector of length
/// < δ, re-solve, and tally how often the count of local minima (and global
/// Morseness) survives. The base configuration must be local Morse.
pub fn perturbation_stability(
    cfg: &PointConfiguration,
    delta: f64,
    trials: usize,
    opts: &SolverOptions,
) -> Result<StabilityReport> {
    let base = find_critical_points(cfg, opts)?;
    if !base.local_morse {
        return Err(Error::SolverFailure(
            "perturbation stability requires a local Morse base configuration".into(),
        ));
    }
    let mut min_sep = f64::INFINITY;
    let locs: Vec<&DVector<f64>> = base.points.iter().map(|p| &p.location).collect();
    for i in 0..locs.len() {
        for j in i + 1..locs.len() {
            min_sep = min_sep.min((locs[i] - locs[j]).norm());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed.wrapping_add(0x5eed));
    let n = cfg.dimension();
    let mut h_preserved = 0usize;
    let mut global_morse_count = 0usize;
    for _ in 0..trials {
        let perturbed: Vec<DVector<f64>> = cfg
            .points()
            .iter()
            .map(|w| {
                // Uniform direction, radius δ·u^{1/n}: uniform in the ball.
                let mut dir = DVector::from_fn(n, |_, _| {
                    rng.sample::<f64, _>(rand::distr::StandardUniform) - 0.5
                });
                let norm = dir.norm();
                if norm > 0.0 {
                    dir /= norm;
                }
                let radius = delta * rng.random_range(0.0..1.0f64).powf(1.0 / n as f64);
                w + dir * radius
            })
            .collect();
        let pcfg = PointConfiguration::new(perturbed)?;
        let set = find_critical_points(&pcfg, opts)?;
        if set.h == base.h {
            h_preserved += 1;
        }
        if set.global_morse {
            global_morse_count += 1;
        }
    }
    Ok(StabilityReport {
        base_h: base.h,
        trials,
        h_preserved,
        global_morse_count,
        delta,
        stability_radius_estimate: 0.25 * min_sep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    fn dv(v: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(v)
    }

    fn quick_opts() -> SolverOptions {
        SolverOptions { grid_density: 6, random_seed_count: 120, ..Default::default() }
    }

    fn assert_found_near(set: &CriticalSet, target: &[f64], tol: f64) {
        let t = dv(target);
        let best = set
            .interior_points()
            .map(|p| (&p.location - &t).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(best < tol, "no critical point within {tol} of {target:?} (best {best:.3e})");
    }

    #[test]
    fn tetrahedron_inventory_and_locations() {
        let fam = families::tetrahedron();
        let set = find_critical_points(&fam.config, &quick_opts()).unwrap();
        assert_eq!((set.r, set.h, set.saddles), (4, 1, 4));
        assert!(set.local_morse);
        assert_found_near(&set, &[0.5, 0.5, 0.5], 1e-8);
        let families::Reference::SmallExample { ref saddles, .. } = fam.reference else {
            unreachable!()
        };
        for s in saddles {
            assert_found_near(&set, s, 1e-8);
        }
        // The local minimum at B is strictly a minimum, not the absolute one.
        let b = set
            .minima()
            .next()
            .expect("tetrahedron must have its barycentric local minimum");
        assert!(b.value.unwrap().is_finite());
        assert!(morse_report(&set).is_ok());
    }

    #[test]
    fn hypercube_inventory_and_locations() {
        let fam = families::hypercube_midpoints(3).unwrap();
        let set = find_critical_points(&fam.config, &quick_opts()).unwrap();
        assert_eq!((set.r, set.h, set.saddles), (6, 1, 6));
        assert_found_near(&set, &[0.0, 0.0, 0.0], 1e-8);
        let r = (1.0f64 / 3.0).sqrt();
        for s in [
            [r, 0.0, 0.0],
            [-r, 0.0, 0.0],
            [0.0, r, 0.0],
            [0.0, -r, 0.0],
            [0.0, 0.0, r],
            [0.0, 0.0, -r],
        ] {
            assert_found_near(&set, &s, 1e-8);
        }
    }

    #[test]
    fn cube_and_octahedron_inventories() {
        let cube = families::cube();
        let set = find_critical_points(&cube.config, &quick_opts()).unwrap();
        assert_eq!((set.r, set.h, set.saddles), (8, 1, 8));
        assert!(morse_report(&set).is_ok());

        let octa = families::octa_six();
        let set = find_critical_points(&octa.config, &quick_opts()).unwrap();
        assert_eq!((set.r, set.h, set.saddles), (6, 1, 6));
        assert!(morse_report(&set).is_ok());
    }

    #[test]
    fn simplex_inventory() {
        let fam = families::simplex_vertices(4).unwrap();
        let set = find_critical_points(&fam.config, &quick_opts()).unwrap();
        assert_eq!((set.r, set.h, set.saddles), (4, 1, 4));
        let families::Reference::Simplex { ref barycenter, ref saddles, .. } = fam.reference
        else {
            unreachable!()
        };
        assert_found_near(&set, barycenter, 1e-8);
        for q in saddles {
            assert_found_near(&set, q, 1e-8);
        }
        // Span is 3 (< ambient 4): the identity still reads s = r + h − 1.
        assert_eq!(set.span_dim, 3);
        assert!(morse_report(&set).is_ok());
    }

    #[test]
    fn prism_supercritical_inventory() {
        let fam = families::triangular_prism(2.0f64.sqrt()).unwrap();
        let set = find_critical_points(&fam.config, &quick_opts()).unwrap();
        assert_eq!((set.r, set.h, set.saddles), (6, 2, 7));
        assert_found_near(&set, &[0.0, 0.0, 1.0], 1e-8);
        assert_found_near(&set, &[0.0, 0.0, -1.0], 1e-8);
        // Origin is one of the saddles.
        let origin_kind = set
            .interior_points()
            .find(|p| p.location.norm() < 1e-7)
            .map(|p| p.kind)
            .expect("origin must be critical");
        assert_eq!(origin_kind, CriticalKind::Saddle);
        assert!(morse_report(&set).is_ok());
    }

    #[test]
    fn prism_critical_parameter_is_degenerate() {
        let fam = families::triangular_prism(1.0).unwrap();
        let opts = quick_opts();
        let cp = classify(&fam.config, &DVector::zeros(3), &opts).unwrap();
        assert_eq!(cp.kind, CriticalKind::Degenerate);
        assert_eq!(cp.nullity, 1);
        assert_eq!(cp.positivity(), 2);
        let set = find_critical_points(&fam.config, &opts).unwrap();
        assert!(!set.local_morse);
        assert!(morse_report(&set).is_err());
    }

    #[test]
    fn planar_three_points_match_derivative_roots() {
        // Three generic points in the z = 0.4 plane inside R³.
        let cfg = PointConfiguration::from_rows(&[
            vec![0.0, 0.0, 0.4],
            vec![1.0, 0.1, 0.4],
            vec![0.3, 0.9, 0.4],
        ])
        .unwrap();
        let set = find_critical_points(&cfg, &quick_opts()).unwrap();
        assert_eq!((set.r, set.h, set.saddles), (3, 0, 2));
        assert_eq!(set.span_dim, 2);
        assert!(morse_report(&set).is_ok());

        let roots = crate::planar::derivative_roots(&cfg).unwrap();
        assert_eq!(roots.len(), 2);
        for root in &roots {
            let best = set
                .interior_points()
                .map(|p| (&p.location - root).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-8, "derivative root {root:?} not found by solver");
        }
        // Full-space Hessian splits with a positive normal block.
        for p in set.interior_points() {
            assert_eq!(p.negativity, 1);
            assert_eq!(p.positivity(), 2);
            let h = potential::hessian(&cfg, &p.location).unwrap();
            // Normal direction e_3: H e3 = (Σ 2/g_k) e3 > 0.
            assert!(h[(2, 2)] > 0.0);
            assert!(h[(0, 2)].abs() < 1e-9 && h[(1, 2)].abs() < 1e-9);
        }
    }

    #[test]
    fn collinear_points_reduce_to_the_real_derivative() {
        let cfg = PointConfiguration::from_rows(&[
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![2.0, 0.0, 0.0],
        ])
        .unwrap();
        let set = find_critical_points(&cfg, &quick_opts()).unwrap();
        assert_eq!((set.r, set.h, set.saddles), (3, 0, 2));
        assert_eq!(set.span_dim, 1);
        // P = x(x−1)(x−2) → P′ = 3x² − 6x + 2, roots 1 ± 1/√3.
        let s = 1.0 / 3.0f64.sqrt();
        assert_found_near(&set, &[1.0 - s, 0.0, 0.0], 1e-8);
        assert_found_near(&set, &[1.0 + s, 0.0, 0.0], 1e-8);
        assert!(morse_report(&set).is_ok());
    }

    #[test]
    fn single_point_has_no_interior_critical_points() {
        let cfg = PointConfiguration::from_rows(&[vec![0.3, -0.2]]).unwrap();
        let set = find_critical_points(&cfg, &quick_opts()).unwrap();
        assert_eq!((set.r, set.h, set.saddles), (1, 0, 0));
        assert_eq!(set.span_dim, 0);
        assert!(set.local_morse && set.global_morse);
        assert!(morse_report(&set).is_ok());
    }

    #[test]
    fn fixed_point_map_properties() {
        let fam = families::tetrahedron();
        // An exact critical point is fixed.
        let b = dv(&[0.5, 0.5, 0.5]);
        let fp = fixed_point_iterate(&fam.config, &b, 5).unwrap();
        assert!((fp - &b).norm() < 1e-17 * 10.0);
        // Iterates from the interior stay in the hull and reduce the
        // fixed-point residual.
        let x0 = dv(&[0.6, 0.4, 0.55]);
        let one = fixed_point_iterate(&fam.config, &x0, 1).unwrap();
        let many = fixed_point_iterate(&fam.config, &x0, 25).unwrap();
        let res = |x: &DVector<f64>| -> f64 {
            (fixed_point_iterate(&fam.config, x, 1).unwrap() - x).norm()
        };
        assert!(hull::hull_membership(&fam.config, &one).unwrap().inside);
        assert!(hull::hull_membership(&fam.config, &many).unwrap().inside);
        assert!(res(&many) < res(&x0));

        // Two points: iterates stay on the segment.
        let two = PointConfiguration::from_rows(&[vec![0.0, 0.0, 0.0], vec![2.0, 0.0, 0.0]])
            .unwrap();
        let out = fixed_point_iterate(&two, &dv(&[1.0, 1e-4, 0.0]), 10).unwrap();
        assert!(hull::hull_membership(&two, &out).unwrap().margin > -1e-9);
    }

    #[test]
    fn spectral_constraints_hold_everywhere() {
        let configs = [
            families::tetrahedron().config,
            families::cube().config,
            families::octa_six().config,
            families::hypercube_midpoints(4).unwrap().config,
            families::triangular_prism(1.6).unwrap().config,
        ];
        for cfg in &configs {
            let set = find_critical_points(cfg, &quick_opts()).unwrap();
            let n = cfg.dimension();
            for p in set.interior_points() {
                assert!(p.negativity <= 1);
                if p.nullity == 0 {
                    assert!(p.positivity() >= n - 1);
                }
                let m = hull::hull_membership(cfg, &p.location).unwrap();
                assert!(m.margin >= -1e-9 * cfg.scale());
            }
        }
    }

    #[test]
    fn determinism_same_seed_bitwise() {
        let cfg = families::triangular_prism(1.3).unwrap().config;
        let opts = quick_opts();
        let a = find_critical_points(&cfg, &opts).unwrap();
        let b = find_critical_points(&cfg, &opts).unwrap();
        assert_eq!(a.points.len(), b.points.len());
        for (p, q) in a.points.iter().zip(&b.points) {
            assert_eq!(p.kind, q.kind);
            for (x, y) in p.location.iter().zip(q.location.iter()) {
                assert_eq!(x.to_bits(), y.to_bits(), "locations differ between runs");
            }
            assert_eq!(
                p.value.map(f64::to_bits),
                q.value.map(f64::to_bits),
                "values differ between runs"
            );
        }
    }

    #[test]
    fn prism_sweep_finds_the_single_bifurcation() {
        let opts = quick_opts();
        let result = bifurcation_sweep(
            |a| families::triangular_prism(a).map(|f| f.config),
            SweepRange::new(0.5, 2.0, 0.1).unwrap(),
            &opts,
        )
        .unwrap();
        assert_eq!(
            result.bifurcations.len(),
            1,
            "expected exactly one bifurcation, got {:?}",
            result.bifurcations.iter().map(|b| b.parameter).collect::<Vec<_>>()
        );
        assert!(
            (result.bifurcations[0].parameter - 1.0).abs() < 1e-4,
            "a* = {}",
            result.bifurcations[0].parameter
        );
        // The degenerating point is the origin.
        assert!(result.bifurcations[0].location.norm() < 1e-5);

        let quiet = bifurcation_sweep(
            |a| families::triangular_prism(a).map(|f| f.config),
            SweepRange::new(1.5, 2.0, 0.1).unwrap(),
            &opts,
        )
        .unwrap();
        assert!(quiet.bifurcations.is_empty());
    }

    #[test]
    fn sweep_range_validation_and_samples() {
        assert!(SweepRange::new(1.0, 0.5, 0.1).is_err());
        assert!(SweepRange::new(0.0, 1.0, 0.0).is_err());
        assert!(SweepRange::new(0.0, 1.0, 1e-7).is_err());
        let r = SweepRange::new(0.5, 2.0, 0.5).unwrap();
        assert_eq!(r.samples(), vec![0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn perturbation_preserves_tetrahedron_minimum() {
        let cfg = families::tetrahedron().config;
        let report = perturbation_stability(&cfg, 1e-3, 20, &quick_opts()).unwrap();
        assert_eq!(report.base_h, 1);
        assert_eq!(report.h_preserved, 20, "h must survive δ = 1e-3 in all trials");
        assert!(report.delta < report.stability_radius_estimate);
    }

    #[test]
    fn zero_perturbation_reproduces_the_set() {
        let cfg = families::octa_six().config;
        let opts = quick_opts();
        let base = find_critical_points(&cfg, &opts).unwrap();
        let report = perturbation_stability(&cfg, 0.0, 3, &opts).unwrap();
        assert_eq!(report.h_preserved, 3);
        assert_eq!(report.base_h, base.h);
    }

    #[test]
    fn options_validation() {
        let mut opts = SolverOptions::default();
        opts.grad_tol = 0.0;
        assert!(find_critical_points(&families::cube().config, &opts).is_err());
    }
}
