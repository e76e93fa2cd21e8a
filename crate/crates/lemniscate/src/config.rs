use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative pole guard: evaluation closer than this (times the diameter) to a
/// configuration point is refused by `gradient`/`hessian`.
pub const POLE_GUARD_REL: f64 = 1e-12;

/// Points closer together than this (times the diameter) are rejected at
/// construction.
pub const SEPARATION_REL: f64 = 1e-10;

/// Relative rank cutoff (on the pivoted R diagonal) used by
/// [`PointConfiguration::affine_span_dimension`].
pub const SPAN_SV_REL: f64 = 1e-9;

/// A finite configuration `w_1, …, w_r` of pairwise distinct points in `R^N`.
///
/// This is the ground object everything else consumes. The potential it
/// induces is `F(x) = ∏ |x − w_k|²` with logarithm `f = log F`; the `w_k`
/// are the poles of `f` (absolute minima, `f = −∞`).
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfiguration {
    points: Vec<DVector<f64>>,
    dimension: usize,
    diameter: f64,
}

/// Serialized form: `{"dimension": N, "points": [[…], …]}`.
#[derive(Debug, Serialize, Deserialize)]
struct ConfigJson {
    dimension: usize,
    points: Vec<Vec<f64>>,
}

impl PointConfiguration {
    pub fn new(points: Vec<DVector<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyConfiguration);
        }
        let dimension = points[0].len();
        if dimension == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        for p in &points {
            if p.len() != dimension {
                return Err(Error::DimensionMismatch { expected: dimension, got: p.len() });
            }
            if !p.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidFamily("non-finite coordinate".into()));
            }
        }
        let mut diameter: f64 = 0.0;
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                diameter = diameter.max((&points[i] - &points[j]).norm());
            }
        }
        // A one-point configuration has diameter 0; use 1 as the length scale
        // so relative tolerances stay meaningful.
        let scale = if diameter > 0.0 { diameter } else { 1.0 };
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if (&points[i] - &points[j]).norm() < SEPARATION_REL * scale {
                    return Err(Error::CoincidentPoints { i, j });
                }
            }
        }
        Ok(Self { points, dimension, diameter })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| DVector::from_vec(r.clone())).collect())
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty configurations
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Largest pairwise distance; 0 for a single point.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Length scale for relative tolerances: the diameter, or 1 if degenerate.
    pub fn scale(&self) -> f64 {
        if self.diameter > 0.0 {
            self.diameter
        } else {
            1.0
        }
    }

    pub fn barycenter(&self) -> DVector<f64> {
        let mut b = DVector::zeros(self.dimension);
        for p in &self.points {
            b += p;
        }
        b / self.points.len() as f64
    }

    /// Axis-aligned bounding box of the points as (min, max) corners.
    pub fn bounding_box(&self) -> (DVector<f64>, DVector<f64>) {
        let mut lo = self.points[0].clone();
        let mut hi = self.points[0].clone();
        for p in &self.points {
            for d in 0..self.dimension {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        (lo, hi)
    }

    /// Dimension of the affine span of the points: the rank of the centered
    /// point matrix with singular values below `1e-9 · σ_max` treated as zero.
    pub fn affine_span_dimension(&self) -> usize {
        span_basis(self).ncols()
    }

    /// Distance from `x` to the nearest configuration point, with its index.
    pub fn nearest_point(&self, x: &DVector<f64>) -> (usize, f64) {
        let mut best = (0usize, f64::INFINITY);
        for (k, w) in self.points.iter().enumerate() {
            let d = (x - w).norm();
            if d < best.1 {
                best = (k, d);
            }
        }
        best
    }

    /// Append a zero coordinate to every point (used to reach an even
    /// ambient dimension for the complex-analytic machinery).
    pub fn embedded_in_next_dimension(&self) -> Self {
        let points = self
            .points
            .iter()
            .map(|p| {
                let mut q = DVector::zeros(self.dimension + 1);
                q.rows_mut(0, self.dimension).copy_from(p);
                q
            })
            .collect();
        Self { points, dimension: self.dimension + 1, diameter: self.diameter }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dimension": self.dimension,
            "points": self.points.iter().map(|p| p.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let parsed: ConfigJson = serde_json::from_str(s)?;
        for p in &parsed.points {
            if p.len() != parsed.dimension {
                return Err(Error::DimensionMismatch { expected: parsed.dimension, got: p.len() });
            }
        }
        Self::from_rows(&parsed.points)
    }
}

/// Orthonormal basis of the affine span directions (columns), obtained from
/// a column-pivoted QR of the centered point matrix. Empty (N×0) for a
/// single point.
///
/// QR rather than SVD: the leading Q columns of a Householder
/// factorization lie in the column space to machine precision, while
/// computed singular vectors can leak a surprisingly large component of
/// the null direction into the basis (observed at the 1e−3 level on
/// innocuous 3×3 inputs), which would push chart embeddings off the span.
/// The pivoted R diagonal is non-increasing and reveals the rank.
pub fn span_basis(cfg: &PointConfiguration) -> nalgebra::DMatrix<f64> {
    let n = cfg.dimension();
    let r = cfg.len();
    let b = cfg.barycenter();
    let mut m = nalgebra::DMatrix::zeros(n, r);
    for (k, p) in cfg.points().iter().enumerate() {
        m.set_column(k, &(p - &b));
    }
    let qr = m.col_piv_qr();
    let rmat = qr.r();
    let steps = n.min(r);
    let lead = rmat[(0, 0)].abs();
    let mut rank = 0;
    while rank < steps && rmat[(rank, rank)].abs() > SPAN_SV_REL * lead && lead > 0.0 {
        rank += 1;
    }
    qr.q().columns(0, rank).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(v: &[f64]) -> DVector<f64> {
        DVector::from_vec(v.to_vec())
    }

    #[test]
    fn rejects_empty_and_mismatched() {
        assert!(matches!(PointConfiguration::new(vec![]), Err(Error::EmptyConfiguration)));
        let e = PointConfiguration::new(vec![dv(&[0.0, 0.0]), dv(&[1.0])]);
        assert!(matches!(e, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn rejects_coincident_points() {
        let e = PointConfiguration::new(vec![dv(&[0.0, 0.0]), dv(&[1.0, 0.0]), dv(&[1.0, 1e-12])]);
        assert!(matches!(e, Err(Error::CoincidentPoints { .. })));
    }

    #[test]
    fn diameter_and_barycenter() {
        let cfg =
            PointConfiguration::new(vec![dv(&[0.0, 0.0]), dv(&[2.0, 0.0]), dv(&[0.0, 2.0])])
                .unwrap();
        assert!((cfg.diameter() - 8.0f64.sqrt()).abs() < 1e-15);
        let b = cfg.barycenter();
        assert!((b[0] - 2.0 / 3.0).abs() < 1e-15 && (b[1] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn span_dimension_cases() {
        // ±e_i in R^3 span all of R^3.
        let cube = crate::families::hypercube_midpoints(3).unwrap();
        assert_eq!(cube.config.affine_span_dimension(), 3);
        // Collinear points span a line.
        let line =
            PointConfiguration::new(vec![dv(&[0.0, 0.0, 0.0]), dv(&[1.0, 1.0, 1.0]), dv(&[2.0, 2.0, 2.0])])
                .unwrap();
        assert_eq!(line.affine_span_dimension(), 1);
        // Cube roots of unity in the z=0 plane of R^3 span a plane.
        let tau = 2.0 * std::f64::consts::PI / 3.0;
        let plane = PointConfiguration::new(
            (0..3).map(|j| dv(&[(tau * j as f64).cos(), (tau * j as f64).sin(), 0.0])).collect(),
        )
        .unwrap();
        assert_eq!(plane.affine_span_dimension(), 2);
        // A single point spans nothing.
        let single = PointConfiguration::new(vec![dv(&[1.0, 2.0])]).unwrap();
        assert_eq!(single.affine_span_dimension(), 0);
    }

    #[test]
    fn json_round_trip() {
        let cfg = PointConfiguration::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.5]]).unwrap();
        let s = cfg.to_json().to_string();
        let back = PointConfiguration::from_json_str(&s).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn json_rejects_bad_rows() {
        let s = r#"{"dimension": 3, "points": [[0,0,0],[1,1]]}"#;
        assert!(PointConfiguration::from_json_str(s).is_err());
    }
}
