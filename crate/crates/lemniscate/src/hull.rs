//! Convex-hull membership with a signed Euclidean margin.
//!
//! Critical points of the potential always lie in the convex hull of the
//! configuration (the gradient equation rearranges into a convex
//! combination), so hull membership with a reliable margin is a structural
//! check, not a geometric nicety.
//!
//! The margin is the signed distance to the hull boundary: negative outside
//! (−distance to the hull), nonnegative inside (distance to the relative
//! boundary, computed in affine-span coordinates). The projection onto the
//! hull is found with Wolfe's min-norm-point algorithm over the shifted
//! vertex set {w_k − x}, which terminates on an exact face in finitely many
//! corral updates — no facet enumeration, no dimension limit.

use nalgebra::{DMatrix, DVector};

use crate::config::{span_basis, PointConfiguration};
use crate::error::{Error, Result};

/// Default membership tolerance, relative to the configuration diameter.
pub const HULL_TOL_REL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct HullMembership {
    pub inside: bool,
    /// Signed distance to the hull boundary: negative outside.
    pub margin: f64,
    /// Convex weights of the nearest hull point (of `x` itself when inside).
    pub witness: DVector<f64>,
    /// The nearest point of the hull (equals `x` up to roundoff when inside).
    pub projection: DVector<f64>,
}

/// Membership of `x` in conv{w_k} with the default tolerance
/// `1e-9 · diameter`.
pub fn hull_membership(cfg: &PointConfiguration, x: &DVector<f64>) -> Result<HullMembership> {
    hull_membership_with_tol(cfg, x, HULL_TOL_REL * cfg.scale())
}

pub fn hull_membership_with_tol(
    cfg: &PointConfiguration,
    x: &DVector<f64>,
    tol: f64,
) -> Result<HullMembership> {
    if x.len() != cfg.dimension() {
        return Err(Error::DimensionMismatch { expected: cfg.dimension(), got: x.len() });
    }
    let (dist, weights) = min_norm_projection(cfg.points(), x);
    let mut projection = DVector::zeros(cfg.dimension());
    for (k, w) in cfg.points().iter().enumerate() {
        projection += w * weights[k];
    }
    let inside = dist <= tol;
    let margin = if inside { interior_depth(cfg, x) } else { -dist };
    Ok(HullMembership { inside, margin, witness: weights, projection })
}

/// Wolfe's algorithm: distance from `x` to conv{points} and the optimal
/// convex weights. Exact up to roundoff (the final answer comes from an
/// affine solve on the optimal face, not from an iterative limit).
fn min_norm_projection(points: &[DVector<f64>], x: &DVector<f64>) -> (f64, DVector<f64>) {
    let r = points.len();
    let shifted: Vec<DVector<f64>> = points.iter().map(|w| w - x).collect();
    let scale2 = shifted.iter().map(|p| p.norm_squared()).fold(0.0f64, f64::max).max(1e-300);

    // start from the nearest vertex
    let mut start = 0usize;
    for (k, p) in shifted.iter().enumerate() {
        if p.norm_squared() < shifted[start].norm_squared() {
            start = k;
        }
    }
    let mut corral: Vec<usize> = vec![start];
    let mut lambda: Vec<f64> = vec![1.0];

    let gap_tol = 1e-13 * scale2;
    let max_major = 16 * (r + 4);
    for _ in 0..max_major {
        // current point q = Σ λ_i p_{corral_i}
        let mut q = DVector::zeros(x.len());
        for (i, &k) in corral.iter().enumerate() {
            q += &shifted[k] * lambda[i];
        }
        let qq = q.norm_squared();
        if qq <= gap_tol {
            break; // x is (numerically) in the hull
        }
        // most-violating vertex
        let mut jstar = 0usize;
        let mut best = f64::INFINITY;
        for (k, p) in shifted.iter().enumerate() {
            let d = q.dot(p);
            if d < best {
                best = d;
                jstar = k;
            }
        }
        if best >= qq - gap_tol {
            break; // optimality: no vertex is on the far side of the supporting plane
        }
        if !corral.contains(&jstar) {
            corral.push(jstar);
            lambda.push(0.0);
        } else {
            break; // numerically stalled; current q is as good as it gets
        }

        // minor cycle: pull the corral point to the affine minimizer,
        // clipping to the simplex and dropping vanished vertices.
        for _ in 0..(2 * r + 8) {
            let mu = match affine_min_norm(&shifted, &corral) {
                Some(mu) => mu,
                None => break,
            };
            if mu.iter().all(|&m| m > -1e-12) {
                lambda = mu;
                break;
            }
            // largest step toward mu keeping weights nonnegative
            let mut theta = 1.0f64;
            for i in 0..lambda.len() {
                if mu[i] < 1e-14 {
                    let denom = lambda[i] - mu[i];
                    if denom > 1e-300 {
                        theta = theta.min(lambda[i] / denom);
                    }
                }
            }
            for i in 0..lambda.len() {
                lambda[i] = (1.0 - theta) * lambda[i] + theta * mu[i];
            }
            // drop zeroed vertices (keep at least one)
            let mut keep_idx: Vec<usize> = (0..lambda.len()).filter(|&i| lambda[i] > 1e-12).collect();
            if keep_idx.is_empty() {
                let argmax = (0..lambda.len())
                    .max_by(|&a, &b| lambda[a].total_cmp(&lambda[b]))
                    .unwrap();
                keep_idx = vec![argmax];
            }
            corral = keep_idx.iter().map(|&i| corral[i]).collect();
            lambda = keep_idx.iter().map(|&i| lambda[i]).collect();
            let s: f64 = lambda.iter().sum();
            for l in &mut lambda {
                *l /= s;
            }
        }
    }

    let mut q = DVector::zeros(x.len());
    let mut weights = DVector::zeros(r);
    for (i, &k) in corral.iter().enumerate() {
        q += &shifted[k] * lambda[i];
        weights[k] = lambda[i].max(0.0);
    }
    let s = weights.sum();
    weights /= s;
    (q.norm(), weights)
}

/// Minimize |Σ μ_i p_i|² subject to Σ μ_i = 1 over the affine hull of the
/// corral. Solves the bordered KKT system; returns None if it is singular
/// (affinely dependent corral — the caller then stops refining).
fn affine_min_norm(points: &[DVector<f64>], corral: &[usize]) -> Option<Vec<f64>> {
    let k = corral.len();
    let mut m = DMatrix::zeros(k + 1, k + 1);
    let mut rhs = DVector::zeros(k + 1);
    rhs[0] = 1.0;
    for i in 0..k {
        m[(0, i + 1)] = 1.0;
        m[(i + 1, 0)] = 1.0;
        for j in 0..k {
            m[(i + 1, j + 1)] = 2.0 * points[corral[i]].dot(&points[corral[j]]);
        }
    }
    let sol = m.lu().solve(&rhs)?;
    let mu: Vec<f64> = (0..k).map(|i| sol[i + 1]).collect();
    if mu.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some(mu)
}

/// Distance from an (assumed inside) point to the relative boundary of the
/// hull, computed in affine-span coordinates by enumerating supporting
/// hyperplanes through span-dimension-many vertices. Configurations here
/// are desk-scale (r ≤ a few dozen), so the combinatorial count is small.
fn interior_depth(cfg: &PointConfiguration, x: &DVector<f64>) -> f64 {
    let basis = span_basis(cfg);
    let d = basis.ncols();
    if d == 0 {
        return 0.0; // the hull is a single point
    }
    let b = cfg.barycenter();
    let ys: Vec<DVector<f64>> =
        cfg.points().iter().map(|w| basis.transpose() * (w - &b)).collect();
    let yx = basis.transpose() * (x - &b);
    let scale = cfg.scale();

    if d == 1 {
        let lo = ys.iter().map(|y| y[0]).fold(f64::INFINITY, f64::min);
        let hi = ys.iter().map(|y| y[0]).fold(f64::NEG_INFINITY, f64::max);
        return (yx[0] - lo).min(hi - yx[0]).max(0.0);
    }

    // Enumerate d-subsets; cap the combinatorial work (never hit at desk
    // scale; the conservative answer 0 still certifies membership).
    let r = ys.len();
    if binomial(r, d) > 200_000 {
        return 0.0;
    }
    let mut depth = f64::INFINITY;
    let mut subset: Vec<usize> = (0..d).collect();
    loop {
        if let Some(dist) = supporting_plane_distance(&ys, &subset, &yx, scale) {
            depth = depth.min(dist);
        }
        // next combination
        let mut i = d;
        loop {
            if i == 0 {
                return if depth.is_finite() { depth.max(0.0) } else { 0.0 };
            }
            i -= 1;
            if subset[i] != i + r - d {
                subset[i] += 1;
                for j in (i + 1)..d {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// If the hyperplane through the subset supports the point set, the distance
/// from `yx` to it; None when the subset is degenerate or not supporting.
fn supporting_plane_distance(
    ys: &[DVector<f64>],
    subset: &[usize],
    yx: &DVector<f64>,
    scale: f64,
) -> Option<f64> {
    let d = yx.len();
    let p0 = &ys[subset[0]];
    let mut dirs = DMatrix::zeros(d, subset.len() - 1);
    for (c, &k) in subset[1..].iter().enumerate() {
        dirs.set_column(c, &(&ys[k] - p0));
    }
    // Householder QR: the leading Q columns span the edge directions to
    // machine precision (computed singular vectors can leak null-direction
    // components, which a 1e−9 side test cannot tolerate); the pivoted R
    // diagonal reveals the rank.
    let qr = dirs.col_piv_qr();
    let rmat = qr.r();
    let q = qr.q();
    let steps = d.min(subset.len() - 1);
    let lead = rmat[(0, 0)].abs();
    let mut rank = 0;
    while rank < steps && lead > 0.0 && rmat[(rank, rank)].abs() > 1e-9 * lead.max(scale) {
        rank += 1;
    }
    // need the subset to span a (d−1)-dimensional direction space
    if rank + 1 < d {
        return None;
    }
    // The normal completes the span: orthogonalize the coordinate axis
    // with the largest out-of-span residual against the Q columns.
    let span = q.columns(0, rank);
    let mut normal = DVector::zeros(d);
    let mut best = 0.0f64;
    for axis in 0..d {
        let mut v = DVector::zeros(d);
        v[axis] = 1.0;
        for _ in 0..2 {
            let coeffs = span.transpose() * &v;
            v -= &span * coeffs;
        }
        let nrm = v.norm();
        if nrm > best {
            best = nrm;
            normal = v / nrm;
        }
    }
    if best == 0.0 {
        return None;
    }
    let b = normal.dot(p0);
    let eps = 1e-9 * scale;
    let mut side_lo = true;
    let mut side_hi = true;
    for y in ys {
        let v = normal.dot(y);
        if v > b + eps {
            side_lo = false;
        }
        if v < b - eps {
            side_hi = false;
        }
        if !side_lo && !side_hi {
            return None;
        }
    }
    Some((b - normal.dot(yx)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn dv(v: &[f64]) -> DVector<f64> {
        DVector::from_vec(v.to_vec())
    }

    /// Brute-force oracle: project onto every face (subset of vertices of
    /// size ≤ span+1) by constrained least squares; keep candidates whose
    /// affine weights are nonnegative; the minimum distance over candidates
    /// is the exact distance to the hull.
    fn brute_force_distance(cfg: &PointConfiguration, x: &DVector<f64>) -> f64 {
        let pts = cfg.points();
        let r = pts.len();
        let dmax = cfg.affine_span_dimension() + 1;
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << r) {
            let subset: Vec<usize> = (0..r).filter(|i| mask & (1 << i) != 0).collect();
            if subset.len() > dmax {
                continue;
            }
            if let Some(dist) = project_onto_face(pts, &subset, x) {
                best = best.min(dist);
            }
        }
        best
    }

    fn project_onto_face(pts: &[DVector<f64>], subset: &[usize], x: &DVector<f64>) -> Option<f64> {
        let k = subset.len();
        if k == 1 {
            return Some((x - &pts[subset[0]]).norm());
        }
        let p0 = &pts[subset[0]];
        let n = x.len();
        let mut a = DMatrix::zeros(n, k - 1);
        for (c, &idx) in subset[1..].iter().enumerate() {
            a.set_column(c, &(&pts[idx] - p0));
        }
        let rhs = x - p0;
        let svd = a.clone().svd(true, true);
        // Degenerate subsets are redundant (their faces belong to smaller
        // subsets the enumeration also visits) and their pseudo-solutions
        // are untrustworthy — skip them.
        let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
        if svd.singular_values.iter().any(|&s| s <= 1e-9 * smax) {
            return None;
        }
        let t = svd.solve(&rhs, 1e-12).ok()?;
        let t0 = 1.0 - t.sum();
        if t0 < -1e-10 || t.iter().any(|&v| v < -1e-10) {
            return None;
        }
        Some((&rhs - a * t).norm())
    }

    #[test]
    fn segment_membership() {
        // conv{0, e1} in R²; x = (2, 0) is outside at distance 1.
        let cfg = PointConfiguration::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let m = hull_membership(&cfg, &dv(&[2.0, 0.0])).unwrap();
        assert!(!m.inside);
        assert_relative_eq!(m.margin, -1.0, max_relative = 1e-9);
        assert_relative_eq!(m.projection[0], 1.0, max_relative = 1e-9);

        let m = hull_membership(&cfg, &dv(&[0.5, 0.0])).unwrap();
        assert!(m.inside);
        assert!(m.margin >= 0.0);
        // witness reproduces x
        assert_relative_eq!(m.witness[0], 0.5, max_relative = 1e-9);

        // off the segment line
        let m = hull_membership(&cfg, &dv(&[0.5, 0.25])).unwrap();
        assert!(!m.inside);
        assert_relative_eq!(m.margin, -0.25, max_relative = 1e-9);
    }

    #[test]
    fn simplex_barycenter_weights() {
        let cfg = crate::families::simplex_vertices(4).unwrap().config;
        let b = cfg.barycenter();
        let m = hull_membership(&cfg, &b).unwrap();
        assert!(m.inside);
        for k in 0..4 {
            assert_relative_eq!(m.witness[k], 0.25, epsilon = 1e-9);
        }
    }

    #[test]
    fn tetrahedron_far_point() {
        let cfg = crate::families::tetrahedron().config;
        let m = hull_membership(&cfg, &dv(&[10.0, 10.0, 10.0])).unwrap();
        assert!(!m.inside);
        assert!(m.margin < -10.0);
    }

    #[test]
    fn interior_depth_of_cube_center() {
        // conv of the 8 cube vertices; center (.5,.5,.5) has depth .5.
        let cfg = crate::families::cube().config;
        let m = hull_membership(&cfg, &dv(&[0.5, 0.5, 0.5])).unwrap();
        assert!(m.inside);
        assert_relative_eq!(m.margin, 0.5, max_relative = 1e-9);
    }

    #[test]
    fn degenerate_hull_inside_and_outside() {
        // Planar square inside R³.
        let cfg = PointConfiguration::from_rows(&[
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        // In-plane interior point: inside, depth = distance to the square edge.
        let m = hull_membership(&cfg, &dv(&[0.5, 0.25, 0.0])).unwrap();
        assert!(m.inside);
        assert_relative_eq!(m.margin, 0.25, max_relative = 1e-9);
        // Lifted off the plane: outside by the lift distance.
        let m = hull_membership(&cfg, &dv(&[0.5, 0.25, 0.125])).unwrap();
        assert!(!m.inside);
        assert_relative_eq!(m.margin, -0.125, max_relative = 1e-9);
    }

    #[test]
    fn witness_reproduces_inside_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let cfg = loop {
                let pts: Vec<DVector<f64>> =
                    (0..6).map(|_| DVector::from_fn(3, |_, _| rng.random_range(-1.0..1.0))).collect();
                if let Ok(c) = PointConfiguration::new(pts) {
                    break c;
                }
            };
            // random convex combination is inside
            let mut t: Vec<f64> = (0..6).map(|_| rng.random_range(0.0..1.0)).collect();
            let s: f64 = t.iter().sum();
            t.iter_mut().for_each(|v| *v /= s);
            let mut x = DVector::zeros(3);
            for (k, w) in cfg.points().iter().enumerate() {
                x += w * t[k];
            }
            let m = hull_membership(&cfg, &x).unwrap();
            assert!(m.inside, "convex combination must be inside");
            let mut rebuilt = DVector::zeros(3);
            for (k, w) in cfg.points().iter().enumerate() {
                rebuilt += w * m.witness[k];
            }
            assert!((rebuilt - &x).norm() < 1e-8 * cfg.scale());
        }
    }

    #[test]
    fn projection_distance_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for trial in 0..60 {
            let n = 2 + trial % 3; // R² to R⁴
            let r = 3 + trial % 5;
            let cfg = loop {
                let pts: Vec<DVector<f64>> = (0..r)
                    .map(|_| DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0)))
                    .collect();
                if let Ok(c) = PointConfiguration::new(pts) {
                    break c;
                }
            };
            let x = DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0));
            let m = hull_membership(&cfg, &x).unwrap();
            let oracle = brute_force_distance(&cfg, &x);
            let wolfe_dist = if m.inside { 0.0 } else { -m.margin };
            assert!(
                (wolfe_dist - oracle).abs() < 1e-8 * cfg.scale().max(1.0),
                "trial {trial}: wolfe {wolfe_dist} vs oracle {oracle}"
            );
        }
    }

    #[test]
    fn hull_vertices_are_inside() {
        let cfg = crate::families::octa_six().config;
        for w in cfg.points() {
            let m = hull_membership(&cfg, w).unwrap();
            assert!(m.inside);
            assert!(m.margin.abs() < 1e-9);
        }
    }
}
