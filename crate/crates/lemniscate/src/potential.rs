//! The logarithmic potential of a point configuration and its derivatives.
//!
//! For `F(x) = ∏_k |x − w_k|²` and `f = log F` the closed forms are
//!
//! ```text
//!   ∇f(x)  = Σ_k 2 (x − w_k) / |x − w_k|²
//!   H_f(x) = Σ_k 2 ( |x − w_k|² E_N − 2 (x − w_k)(x − w_k)ᵀ ) / |x − w_k|⁴
//! ```
//!
//! from which `trace H_f(x) = Σ_k 2(N−2)/|x − w_k|²` — an identity the test
//! suite checks at tight tolerance because both sides are cheap and
//! independent.

use nalgebra::{DMatrix, DVector};

use crate::config::{PointConfiguration, POLE_GUARD_REL};
use crate::error::{Error, Result};

/// Value of the potential at a point: the product `F` and its log `f`
/// (`f = −∞` exactly at the poles `w_k`).
#[derive(Debug, Clone)]
pub struct PotentialValue {
    pub at: DVector<f64>,
    /// `F(x) = ∏ |x − w_k|²`; zero exactly at the poles.
    pub product: f64,
    /// `f(x) = log F(x)`, computed as a sum of logs (no overflow for large r).
    pub log_value: f64,
}

fn check_dim(cfg: &PointConfiguration, x: &DVector<f64>) -> Result<()> {
    if x.len() != cfg.dimension() {
        return Err(Error::DimensionMismatch { expected: cfg.dimension(), got: x.len() });
    }
    Ok(())
}

fn pole_guard(cfg: &PointConfiguration, x: &DVector<f64>) -> Result<()> {
    let (index, distance) = cfg.nearest_point(x);
    if distance < POLE_GUARD_REL * cfg.scale() {
        return Err(Error::PoleEvaluation { index, distance });
    }
    Ok(())
}

/// Evaluate `F` and `f`. Well-defined everywhere; at a pole `F = 0, f = −∞`.
pub fn eval(cfg: &PointConfiguration, x: &DVector<f64>) -> Result<PotentialValue> {
    check_dim(cfg, x)?;
    let mut product = 1.0f64;
    let mut log_value = 0.0f64;
    for w in cfg.points() {
        let g = (x - w).norm_squared();
        product *= g;
        log_value += g.ln(); // ln(0) = -inf is the honest value at a pole
    }
    if product == 0.0 {
        log_value = f64::NEG_INFINITY;
    }
    Ok(PotentialValue { at: x.clone(), product, log_value })
}

/// `∇f(x)`. Refuses evaluation inside the pole guard.
pub fn gradient(cfg: &PointConfiguration, x: &DVector<f64>) -> Result<DVector<f64>> {
    check_dim(cfg, x)?;
    pole_guard(cfg, x)?;
    let mut g = DVector::zeros(cfg.dimension());
    for w in cfg.points() {
        let u = x - w;
        g += &u * (2.0 / u.norm_squared());
    }
    Ok(g)
}

/// `H_f(x)`, the symmetric Hessian matrix of `f`.
pub fn hessian(cfg: &PointConfiguration, x: &DVector<f64>) -> Result<DMatrix<f64>> {
    check_dim(cfg, x)?;
    pole_guard(cfg, x)?;
    let n = cfg.dimension();
    let mut h = DMatrix::zeros(n, n);
    for w in cfg.points() {
        let u = x - w;
        let g = u.norm_squared();
        let scale = 2.0 / (g * g);
        // 2 (g E − 2 u uᵀ) / g²
        for i in 0..n {
            for j in 0..n {
                let e = if i == j { g } else { 0.0 };
                h[(i, j)] += scale * (e - 2.0 * u[i] * u[j]);
            }
        }
    }
    Ok(h)
}

/// Hessian of the potential of the configuration embedded in `R^{N+1}`
/// (zero appended to every point and to `x`). The extra diagonal entry is
/// `Σ_k 2/|x − w_k|² > 0`; used to reach an even ambient dimension.
pub fn hessian_embedded(cfg: &PointConfiguration, x: &DVector<f64>) -> Result<DMatrix<f64>> {
    let cfg1 = cfg.embedded_in_next_dimension();
    let mut x1 = DVector::zeros(x.len() + 1);
    x1.rows_mut(0, x.len()).copy_from(x);
    hessian(&cfg1, &x1)
}

/// Convex-combination weights exhibiting a critical point as a hull point:
/// `t_k = g_k(x)⁻¹ / Σ_j g_j(x)⁻¹` with `g_k = |x − w_k|²`. At a critical
/// point `x = Σ t_k w_k`; the weights are positive and sum to one at any
/// non-pole `x`.
pub fn barycentric_weights(cfg: &PointConfiguration, x: &DVector<f64>) -> Result<DVector<f64>> {
    check_dim(cfg, x)?;
    pole_guard(cfg, x)?;
    let mut t = DVector::zeros(cfg.len());
    for (k, w) in cfg.points().iter().enumerate() {
        t[k] = 1.0 / (x - w).norm_squared();
    }
    let s = t.sum();
    Ok(t / s)
}

/// `Σ_k 2(N−2)/|x−w_k|²` — the closed form of `trace H_f(x)`.
pub fn trace_identity_rhs(cfg: &PointConfiguration, x: &DVector<f64>) -> Result<f64> {
    check_dim(cfg, x)?;
    pole_guard(cfg, x)?;
    let n = cfg.dimension() as f64;
    let mut s = 0.0;
    for w in cfg.points() {
        s += 2.0 * (n - 2.0) / (x - w).norm_squared();
    }
    Ok(s)
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

    /// Central-difference gradient of f — the independent oracle for `gradient`.
    fn fd_gradient(cfg: &PointConfiguration, x: &DVector<f64>, h: f64) -> DVector<f64> {
        let n = cfg.dimension();
        let mut g = DVector::zeros(n);
        for d in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[d] += h;
            xm[d] -= h;
            let fp = eval(cfg, &xp).unwrap().log_value;
            let fm = eval(cfg, &xm).unwrap().log_value;
            g[d] = (fp - fm) / (2.0 * h);
        }
        g
    }

    /// Central-difference Jacobian of ∇f — the independent oracle for `hessian`.
    fn fd_hessian(cfg: &PointConfiguration, x: &DVector<f64>, h: f64) -> DMatrix<f64> {
        let n = cfg.dimension();
        let mut m = DMatrix::zeros(n, n);
        for d in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[d] += h;
            xm[d] -= h;
            let gp = gradient(cfg, &xp).unwrap();
            let gm = gradient(cfg, &xm).unwrap();
            m.set_column(d, &((gp - gm) / (2.0 * h)));
        }
        // symmetrize the truncation noise
        let mt = m.transpose();
        (m + mt) * 0.5
    }

    fn random_config(rng: &mut ChaCha8Rng, n: usize, r: usize) -> PointConfiguration {
        loop {
            let pts: Vec<DVector<f64>> = (0..r)
                .map(|_| DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0)))
                .collect();
            if let Ok(cfg) = PointConfiguration::new(pts) {
                return cfg;
            }
        }
    }

    /// A point in the hull's bounding box that keeps clear distance to poles.
    fn random_safe_point(
        rng: &mut ChaCha8Rng,
        cfg: &PointConfiguration,
        min_dist: f64,
    ) -> DVector<f64> {
        loop {
            let x = DVector::from_fn(cfg.dimension(), |_, _| rng.random_range(-1.2..1.2));
            if cfg.nearest_point(&x).1 > min_dist {
                return x;
            }
        }
    }

    #[test]
    fn eval_known_values() {
        // ±e_i in R^3 at the origin: every factor is 1.
        let cube = crate::families::hypercube_midpoints(3).unwrap().config;
        let v = eval(&cube, &dv(&[0.0, 0.0, 0.0])).unwrap();
        assert_relative_eq!(v.product, 1.0, max_relative = 1e-15);
        assert_relative_eq!(v.log_value, 0.0, epsilon = 1e-15);

        // At a pole: F = 0 exactly, f = −∞.
        let single = PointConfiguration::from_rows(&[vec![0.5, -0.5]]).unwrap();
        let v = eval(&single, &dv(&[0.5, -0.5])).unwrap();
        assert_eq!(v.product, 0.0);
        assert_eq!(v.log_value, f64::NEG_INFINITY);

        // {0, 2e1} at e1: both factors are 1.
        let two = PointConfiguration::from_rows(&[vec![0.0, 0.0, 0.0], vec![2.0, 0.0, 0.0]])
            .unwrap();
        let v = eval(&two, &dv(&[1.0, 0.0, 0.0])).unwrap();
        assert_relative_eq!(v.product, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn log_value_is_log_of_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let cfg = random_config(&mut rng, 3, 5);
            let x = random_safe_point(&mut rng, &cfg, 1e-3);
            let v = eval(&cfg, &x).unwrap();
            assert_relative_eq!(v.log_value, v.product.ln(), max_relative = 1e-12);
        }
    }

    #[test]
    fn gradient_known_values() {
        // Midpoint of {0, 2e1}: the two pulls cancel.
        let two =
            PointConfiguration::from_rows(&[vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        let g = gradient(&two, &dv(&[1.0, 0.0])).unwrap();
        assert!(g.norm() < 1e-15);

        // Single pole at origin, x = 2e1: ∇f = 2x/|x|² = (1, 0).
        let single = PointConfiguration::from_rows(&[vec![0.0, 0.0]]).unwrap();
        let g = gradient(&single, &dv(&[2.0, 0.0])).unwrap();
        assert_relative_eq!(g[0], 1.0, max_relative = 1e-15);
        assert!(g[1].abs() < 1e-15);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..100 {
            let n = 2 + trial % 4;
            let r = 2 + trial % 6;
            let cfg = random_config(&mut rng, n, r);
            let x = random_safe_point(&mut rng, &cfg, 0.05);
            let g = gradient(&cfg, &x).unwrap();
            let fd = fd_gradient(&cfg, &x, 1e-6);
            assert_relative_eq!(g, fd, max_relative = 1e-6, epsilon = 1e-8);
        }
    }

    #[test]
    fn hessian_known_values() {
        // Single pole at origin in R², x = e1: H = 2(E − 2 e1e1ᵀ) = diag(−2, 2).
        let single = PointConfiguration::from_rows(&[vec![0.0, 0.0]]).unwrap();
        let h = hessian(&single, &dv(&[1.0, 0.0])).unwrap();
        assert_relative_eq!(h[(0, 0)], -2.0, max_relative = 1e-15);
        assert_relative_eq!(h[(1, 1)], 2.0, max_relative = 1e-15);
        assert!(h[(0, 1)].abs() < 1e-15);

        // {0, 2e1} in R³ at the midpoint: diag(−4, 4, 4).
        let two = PointConfiguration::from_rows(&[vec![0.0, 0.0, 0.0], vec![2.0, 0.0, 0.0]])
            .unwrap();
        let h = hessian(&two, &dv(&[1.0, 0.0, 0.0])).unwrap();
        assert_relative_eq!(h[(0, 0)], -4.0, max_relative = 1e-15);
        assert_relative_eq!(h[(1, 1)], 4.0, max_relative = 1e-15);
        assert_relative_eq!(h[(2, 2)], 4.0, max_relative = 1e-15);
    }

    #[test]
    fn hessian_matches_finite_differences_of_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for trial in 0..60 {
            let n = 2 + trial % 4;
            let r = 2 + trial % 6;
            let cfg = random_config(&mut rng, n, r);
            let x = random_safe_point(&mut rng, &cfg, 0.05);
            let h = hessian(&cfg, &x).unwrap();
            let fd = fd_hessian(&cfg, &x, 1e-5);
            assert_relative_eq!(h, fd, max_relative = 1e-6, epsilon = 1e-7);
        }
    }

    #[test]
    fn hessian_is_symmetric_and_satisfies_trace_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..60 {
            let n = 2 + trial % 5;
            let cfg = random_config(&mut rng, n, 4);
            let x = random_safe_point(&mut rng, &cfg, 1e-3);
            let h = hessian(&cfg, &x).unwrap();
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(h[(i, j)], h[(j, i)]);
                }
            }
            let rhs = trace_identity_rhs(&cfg, &x).unwrap();
            assert_relative_eq!(h.trace(), rhs, max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn barycentric_weights_known_values() {
        let two =
            PointConfiguration::from_rows(&[vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        let t = barycentric_weights(&two, &dv(&[1.0, 0.0])).unwrap();
        assert_relative_eq!(t[0], 0.5, max_relative = 1e-15);
        assert_relative_eq!(t[1], 0.5, max_relative = 1e-15);

        let simplex = crate::families::simplex_vertices(4).unwrap().config;
        let b = simplex.barycenter();
        let t = barycentric_weights(&simplex, &b).unwrap();
        for k in 0..4 {
            assert_relative_eq!(t[k], 0.25, max_relative = 1e-14);
        }
    }

    #[test]
    fn weights_are_positive_and_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..50 {
            let cfg = random_config(&mut rng, 3, 6);
            let x = random_safe_point(&mut rng, &cfg, 1e-6);
            let t = barycentric_weights(&cfg, &x).unwrap();
            assert!(t.iter().all(|&v| v > 0.0));
            assert_relative_eq!(t.sum(), 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn pole_guard_refuses_derivatives() {
        let cfg = PointConfiguration::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let near_pole = dv(&[1e-14, 0.0]);
        assert!(matches!(gradient(&cfg, &near_pole), Err(Error::PoleEvaluation { .. })));
        assert!(matches!(hessian(&cfg, &near_pole), Err(Error::PoleEvaluation { .. })));
        // eval is total
        assert!(eval(&cfg, &near_pole).is_ok());
    }

    #[test]
    fn growth_bound_far_from_hull() {
        // For |x| large relative to the configuration, f(x) ≈ 2r log |x|;
        // check the conservative lower bound f(x) ≥ 2r log(|x|/2).
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let cfg = random_config(&mut rng, 3, 5);
        for far in [10.0, 100.0, 1000.0] {
            let x = dv(&[far, far * 0.5, -far * 0.25]);
            let v = eval(&cfg, &x).unwrap();
            let bound = 2.0 * cfg.len() as f64 * (x.norm() / 2.0).ln();
            assert!(v.log_value >= bound);
        }
    }

    #[test]
    fn embedded_hessian_adds_positive_diagonal() {
        let cfg = crate::families::hypercube_midpoints(3).unwrap().config;
        let x = dv(&[0.1, 0.2, -0.3]);
        let h3 = hessian(&cfg, &x).unwrap();
        let h4 = hessian_embedded(&cfg, &x).unwrap();
        assert_eq!(h4.nrows(), 4);
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(h4[(i, j)], h3[(i, j)], max_relative = 1e-15);
            }
        }
        assert!(h4[(3, 3)] > 0.0);
        assert!(h4[(0, 3)].abs() < 1e-15);
        // The extra entry is Σ 2/g_k.
        let expected: f64 =
            cfg.points().iter().map(|w| 2.0 / (&x - w).norm_squared()).sum();
        assert_relative_eq!(h4[(3, 3)], expected, max_relative = 1e-14);
    }
}
