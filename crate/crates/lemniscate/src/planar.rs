//! The planar/collinear reduction: when the poles span at most a plane,
//! identify that plane with `ℂ`, so the potential becomes `log |P(z)|²` for
//! the monic polynomial `P(z) = ∏ (z − ξ_k)` with the poles as roots. The
//! non-pole critical points are then exactly the roots of `P′` — there are
//! `r − 1` with multiplicity, all saddles (or degenerate at multiple
//! roots), and no interior minima exist.
//!
//! This route shares no code with the Newton solver, which makes it an
//! independent oracle for cross-checking the solver on planar inputs.

use nalgebra::DVector;

use crate::config::{span_basis, PointConfiguration};
use crate::error::{Error, Result};
use crate::polynomial::{ComplexPolynomial, C64};

/// An isometric chart `ℂ → R^N` onto the plane containing the poles.
/// `e2` is `None` only in a one-dimensional ambient space.
#[derive(Debug, Clone)]
pub struct PlanarChart {
    pub origin: DVector<f64>,
    pub e1: DVector<f64>,
    pub e2: Option<DVector<f64>>,
}

impl PlanarChart {
    /// Complex coordinate of a point (its orthogonal projection onto the
    /// chart plane).
    pub fn complex_coordinate(&self, x: &DVector<f64>) -> C64 {
        let d = x - &self.origin;
        let re = self.e1.dot(&d);
        let im = self.e2.as_ref().map_or(0.0, |e| e.dot(&d));
        C64::new(re, im)
    }

    /// Map a complex coordinate back to ambient coordinates.
    pub fn embed(&self, z: C64) -> Result<DVector<f64>> {
        match &self.e2 {
            Some(e2) => Ok(&self.origin + &self.e1 * z.re + e2 * z.im),
            None => {
                if z.im.abs() > 1e-8 * (1.0 + z.norm()) {
                    return Err(Error::InvalidStructure(format!(
                        "nonreal coordinate {z} cannot embed into a 1-dimensional space"
                    )));
                }
                Ok(&self.origin + &self.e1 * z.re)
            }
        }
    }
}

/// Unit vector orthogonal to `e1`, built from the coordinate axis least
/// aligned with it.
fn orthogonal_complement(e1: &DVector<f64>) -> DVector<f64> {
    let n = e1.len();
    let axis = (0..n).min_by(|&a, &b| e1[a].abs().total_cmp(&e1[b].abs())).unwrap();
    let mut v = DVector::zeros(n);
    v[axis] = 1.0;
    let v = &v - e1 * e1.dot(&v);
    let norm = v.norm();
    &v / norm
}

/// Build a chart for a configuration whose affine span has dimension ≤ 2.
/// Spans of higher dimension are refused — the complex reduction does not
/// apply to them.
pub fn planar_chart(cfg: &PointConfiguration) -> Result<PlanarChart> {
    let basis = span_basis(cfg);
    let d = basis.ncols();
    if d > 2 {
        return Err(Error::InvalidStructure(format!(
            "affine span has dimension {d}; the planar reduction needs at most 2"
        )));
    }
    let n = cfg.dimension();
    let origin = cfg.barycenter();
    let e1 = if d >= 1 {
        basis.column(0).into_owned()
    } else {
        let mut v = DVector::zeros(n);
        v[0] = 1.0;
        v
    };
    let e2 = if d == 2 {
        Some(basis.column(1).into_owned())
    } else if n >= 2 {
        Some(orthogonal_complement(&e1))
    } else {
        None
    };
    Ok(PlanarChart { origin, e1, e2 })
}

/// The chart together with the monic polynomial `P(z) = ∏ (z − ξ_k)` whose
/// roots are the poles in chart coordinates. The potential restricted to
/// the plane is `log |P|²` up to the chart isometry.
pub fn pole_polynomial(cfg: &PointConfiguration) -> Result<(PlanarChart, ComplexPolynomial)> {
    let chart = planar_chart(cfg)?;
    let roots: Vec<C64> =
        cfg.points().iter().map(|w| chart.complex_coordinate(w)).collect();
    Ok((chart, ComplexPolynomial::from_roots(&roots)))
}

/// A critical point obtained from the complex reduction.
#[derive(Debug, Clone)]
pub struct PlanarCritical {
    /// Ambient coordinates.
    pub location: DVector<f64>,
    /// Chart coordinate.
    pub z: C64,
    /// Multiplicity as a root of `P′`; 1 means a nondegenerate saddle,
    /// higher means a degenerate critical point.
    pub multiplicity: usize,
}

/// All non-pole critical points of a planar configuration, as the roots of
/// `P′` mapped back to ambient coordinates. Counted with multiplicity they
/// number `r − 1`; each simple root is a saddle.
pub fn derivative_critical_points(cfg: &PointConfiguration) -> Result<Vec<PlanarCritical>> {
    let (chart, p) = pole_polynomial(cfg)?;
    if cfg.len() == 1 {
        return Ok(vec![]);
    }
    let dp = p.derivative();
    let mut out = Vec::new();
    for (z, multiplicity) in dp.roots_with_multiplicity()? {
        out.push(PlanarCritical { location: chart.embed(z)?, z, multiplicity });
    }
    Ok(out)
}

/// Distinct critical locations only — the flattened form of
/// [`derivative_critical_points`].
pub fn derivative_roots(cfg: &PointConfiguration) -> Result<Vec<DVector<f64>>> {
    Ok(derivative_critical_points(cfg)?.into_iter().map(|c| c.location).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential;

    fn assert_critical(cfg: &PointConfiguration, x: &DVector<f64>, tol: f64) {
        let g = potential::gradient(cfg, x).unwrap();
        assert!(g.norm() < tol, "gradient {:.3e} at {:?}", g.norm(), x.as_slice());
    }

    #[test]
    fn generic_triangle_roots_are_critical() {
        let cfg = PointConfiguration::from_rows(&[
            vec![0.0, 0.0, 0.4],
            vec![1.0, 0.1, 0.4],
            vec![0.3, 0.9, 0.4],
        ])
        .unwrap();
        let pts = derivative_critical_points(&cfg).unwrap();
        assert_eq!(pts.len(), 2);
        for p in &pts {
            assert_eq!(p.multiplicity, 1);
            // The plane is z = 0.4.
            assert!((p.location[2] - 0.4).abs() < 1e-12);
            assert_critical(&cfg, &p.location, 1e-9);
        }
    }

    #[test]
    fn two_poles_give_the_midpoint() {
        let cfg =
            PointConfiguration::from_rows(&[vec![0.0, 1.0], vec![2.0, -1.0]]).unwrap();
        let pts = derivative_critical_points(&cfg).unwrap();
        assert_eq!(pts.len(), 1);
        assert!((&pts[0].location - DVector::from_row_slice(&[1.0, 0.0])).norm() < 1e-12);
    }

    #[test]
    fn equilateral_triangle_has_a_double_root_at_the_centroid() {
        // P = z³ − c: P′ = 3z², double root at the centroid.
        let tau = 2.0 * std::f64::consts::PI / 3.0;
        let centroid = [0.3, -0.2];
        let cfg = PointConfiguration::from_rows(
            &(0..3)
                .map(|j| {
                    vec![
                        centroid[0] + (tau * j as f64).cos(),
                        centroid[1] + (tau * j as f64).sin(),
                    ]
                })
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let pts = derivative_critical_points(&cfg).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].multiplicity, 2);
        assert!(
            (&pts[0].location - DVector::from_row_slice(&centroid)).norm() < 1e-8,
            "double root at {:?}",
            pts[0].location.as_slice()
        );
    }

    #[test]
    fn square_has_a_triple_root_at_the_center() {
        // P = z⁴ − c: P′ = 4z³.
        let cfg = PointConfiguration::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![-1.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0],
        ])
        .unwrap();
        let pts = derivative_critical_points(&cfg).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].multiplicity, 3);
        assert!(pts[0].location.norm() < 1e-6, "conditioning of a triple root is ~ε^(1/3)");
    }

    #[test]
    fn collinear_poles_along_a_diagonal() {
        let d = DVector::from_row_slice(&[1.0, 1.0, 1.0]) / 3.0f64.sqrt();
        let cfg = PointConfiguration::new(vec![
            DVector::zeros(3),
            &d * 1.0,
            &d * 2.0,
            &d * 3.5,
        ])
        .unwrap();
        let pts = derivative_critical_points(&cfg).unwrap();
        assert_eq!(pts.len(), 3);
        for p in &pts {
            assert_eq!(p.multiplicity, 1);
            // Roots interlace the poles, hence stay on the line.
            let t = p.location.dot(&d);
            assert!((&p.location - &d * t).norm() < 1e-9);
            assert_critical(&cfg, &p.location, 1e-9);
        }
    }

    #[test]
    fn one_dimensional_ambient_space() {
        let cfg = PointConfiguration::from_rows(&[vec![0.0], vec![1.0], vec![3.0]]).unwrap();
        let pts = derivative_critical_points(&cfg).unwrap();
        assert_eq!(pts.len(), 2);
        for p in &pts {
            assert_critical(&cfg, &p.location, 1e-10);
        }
    }

    #[test]
    fn full_dimensional_span_is_refused() {
        let cfg = crate::families::tetrahedron().config;
        assert!(matches!(planar_chart(&cfg), Err(Error::InvalidStructure(_))));
        assert!(derivative_roots(&cfg).is_err());
    }

    #[test]
    fn single_pole_has_no_critical_points() {
        let cfg = PointConfiguration::from_rows(&[vec![0.5, 0.5]]).unwrap();
        assert!(derivative_critical_points(&cfg).unwrap().is_empty());
    }

    #[test]
    fn chart_round_trip() {
        let cfg = PointConfiguration::from_rows(&[
            vec![0.0, 0.0, 0.4],
            vec![1.0, 0.1, 0.4],
            vec![0.3, 0.9, 0.4],
        ])
        .unwrap();
        let chart = planar_chart(&cfg).unwrap();
        for w in cfg.points() {
            let z = chart.complex_coordinate(w);
            let back = chart.embed(z).unwrap();
            assert!((w - back).norm() < 1e-12);
        }
    }
}
