//! Named point-configuration families with closed-form reference data.
//!
//! Each builder returns a [`FamilyOutput`]: the configuration itself plus a
//! [`Reference`] record of everything known in closed form about its critical
//! structure (locations, Hessian spectra, expected inventory). Tests and the
//! `construct` command consume the reference data; the solver is expected to
//! reproduce it independently.
//!
//! Families:
//! - `hypercube_midpoints(n)` — the 2n points ±e_i in R^n (n ≥ 3),
//! - `simplex_vertices(n)` — the n standard basis points e_i (n ≥ 4),
//! - `tetrahedron()`, `cube()`, `octa_six()` — three small R³ configurations,
//! - `triangular_prism(a)` — two parallel equilateral triangles at heights ±a,
//! - `preassigned_minima(r, s)` — 3h points in R³ whose potential has local
//!   minima at (0,0,r_j) and axial saddles at (0,0,s_j), built from an
//!   auxiliary real polynomial ([`AuxPolynomial`]).

use std::f64::consts::TAU;

use nalgebra::DVector;
use serde_json::{json, Value};

use crate::config::PointConfiguration;
use crate::error::{Error, Result};
use crate::polynomial::{RealPolynomial, C64};

/// Expected critical-point inventory of a configuration: `r` poles, `h` local
/// minima, and `saddles` nondegenerate saddle points (`saddles = r + h − 1`
/// whenever the affine span has dimension ≥ 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inventory {
    pub poles: usize,
    pub minima: usize,
    pub saddles: usize,
}

impl Inventory {
    fn to_json(self) -> Value {
        json!({
            "poles": self.poles,
            "minima": self.minima,
            "saddles": self.saddles,
        })
    }
}

/// One eigenvalue of a reference Hessian: its value, multiplicity, and (when
/// the eigenspace is one-dimensional and known) a representative direction.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDatum {
    pub value: f64,
    pub multiplicity: usize,
    pub direction: Option<Vec<f64>>,
}

impl EigenDatum {
    fn to_json(&self) -> Value {
        json!({
            "value": self.value,
            "multiplicity": self.multiplicity,
            "direction": self.direction,
        })
    }
}

/// Which side of the prism bifurcation value `a = 1` a parameter sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrismRegime {
    /// `a < 1`: the origin is a nondegenerate local minimum and the vertical
    /// axis carries no other critical point.
    Subcritical,
    /// `a = 1` (within 1e−12): the origin is critical with Hessian nullity 1.
    Critical,
    /// `a > 1`: the origin has negativity 1 and two local minima sit at
    /// `(0, 0, ±√(a²−1))`.
    Supercritical,
}

impl PrismRegime {
    fn as_str(self) -> &'static str {
        match self {
            PrismRegime::Subcritical => "subcritical",
            PrismRegime::Critical => "critical",
            PrismRegime::Supercritical => "supercritical",
        }
    }
}

/// Closed-form reference data attached to a constructed family.
///
/// Locations are plain coordinate vectors; spectra are lists of
/// [`EigenDatum`]. Everything here is independently re-derived by the test
/// suite (finite differences, eigendecomposition, trace identities) before
/// being trusted.
#[derive(Debug, Clone)]
pub enum Reference {
    Hypercube {
        n: usize,
        minimum: Vec<f64>,
        /// Distance of each saddle from the origin: `√((n−2)/n)`.
        saddle_radius: f64,
        saddles: Vec<Vec<f64>>,
        /// Hessian entry at the saddle `λe_i` along `e_i`: `−2n²(n−2)/(n−1)`.
        axial_entry: f64,
        /// Hessian entry along each direction orthogonal to `e_i`:
        /// `2n³(n−2)/(n−1)²`.
        transverse_entry: f64,
        expected: Inventory,
    },
    Simplex {
        n: usize,
        barycenter: Vec<f64>,
        /// The n saddles `Q_i = (2/(n−1))B + ((n−3)/(n−1))e_i`.
        saddles: Vec<Vec<f64>>,
        /// Hessian spectrum at the barycenter B.
        barycenter_spectrum: Vec<EigenDatum>,
        /// Hessian spectrum at `Q_1` (the other `Q_i` follow by permuting
        /// coordinates 1 ↔ i).
        saddle_spectrum: Vec<EigenDatum>,
        expected: Inventory,
    },
    SmallExample {
        minimum: Vec<f64>,
        /// Saddle locations when known in closed form (tetrahedron only).
        saddles: Vec<Vec<f64>>,
        expected: Inventory,
    },
    Prism {
        a: f64,
        critical_a: f64,
        regime: PrismRegime,
        /// The origin is critical for every `a`; this records its expected
        /// Hessian nullity (1 exactly at `a = critical_a`, else 0).
        origin_nullity: usize,
        /// Local minima `(0,0,±√(a²−1))`, present only for `a > 1`.
        axial_minima: Vec<Vec<f64>>,
        /// Full inventory, pinned only in the supercritical regime.
        expected: Option<Inventory>,
    },
    Preassigned {
        polynomial: AuxPolynomial,
        /// The h prescribed local minima `(0, 0, r_j)`.
        minima: Vec<Vec<f64>>,
        /// The h−1 axial saddles `(0, 0, s_j)`.
        axial_saddles: Vec<Vec<f64>>,
        /// 3h poles, h minima, 4h−1 saddles (h−1 axial + 3h off-axis).
        expected: Inventory,
    },
}

impl Reference {
    /// JSON rendering used by the `construct` command.
    pub fn to_json(&self) -> Value {
        match self {
            Reference::Hypercube {
                n,
                minimum,
                saddle_radius,
                saddles,
                axial_entry,
                transverse_entry,
                expected,
            } => json!({
                "kind": "hypercube",
                "n": n,
                "minimum": minimum,
                "saddle_radius": saddle_radius,
                "saddles": saddles,
                "saddle_hessian": {
                    "axial_entry": axial_entry,
                    "transverse_entry": transverse_entry,
                },
                "expected": expected.to_json(),
            }),
            Reference::Simplex {
                n,
                barycenter,
                saddles,
                barycenter_spectrum,
                saddle_spectrum,
                expected,
            } => json!({
                "kind": "simplex",
                "n": n,
                "barycenter": barycenter,
                "saddles": saddles,
                "barycenter_spectrum":
                    barycenter_spectrum.iter().map(EigenDatum::to_json).collect::<Vec<_>>(),
                "saddle_spectrum":
                    saddle_spectrum.iter().map(EigenDatum::to_json).collect::<Vec<_>>(),
                "expected": expected.to_json(),
            }),
            Reference::SmallExample { minimum, saddles, expected } => json!({
                "kind": "small_example",
                "minimum": minimum,
                "saddles": saddles,
                "expected": expected.to_json(),
            }),
            Reference::Prism { a, critical_a, regime, origin_nullity, axial_minima, expected } => {
                json!({
                    "kind": "prism",
                    "a": a,
                    "critical_a": critical_a,
                    "regime": regime.as_str(),
                    "origin_nullity": origin_nullity,
                    "axial_minima": axial_minima,
                    "expected": expected.map(Inventory::to_json),
                })
            }
            Reference::Preassigned { polynomial, minima, axial_saddles, expected } => json!({
                "kind": "preassigned",
                "polynomial": polynomial.to_json(),
                "minima": minima,
                "axial_saddles": axial_saddles,
                "expected": expected.to_json(),
            }),
        }
    }

    /// The expected inventory, when the family pins one.
    pub fn expected_inventory(&self) -> Option<Inventory> {
        match self {
            Reference::Hypercube { expected, .. }
            | Reference::Simplex { expected, .. }
            | Reference::SmallExample { expected, .. }
            | Reference::Preassigned { expected, .. } => Some(*expected),
            Reference::Prism { expected, .. } => *expected,
        }
    }
}

/// A constructed family: the configuration plus its reference data.
#[derive(Debug, Clone)]
pub struct FamilyOutput {
    pub name: String,
    pub config: PointConfiguration,
    pub reference: Reference,
}

impl FamilyOutput {
    /// JSON rendering used by the `construct` command: name, points, and the
    /// reference block.
    pub fn to_json(&self) -> Value {
        let points: Vec<Vec<f64>> =
            self.config.points().iter().map(|p| p.iter().copied().collect()).collect();
        json!({
            "family": self.name,
            "dimension": self.config.dimension(),
            "points": points,
            "reference": self.reference.to_json(),
        })
    }
}

/// A family plus its parameters, as parsed from the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyDescriptor {
    HypercubeMidpoints { n: usize },
    Simplex { n: usize },
    Tetrahedron,
    Cube,
    OctaSix,
    Prism { a: f64 },
    Preassigned { minima: Vec<f64>, saddles: Vec<f64> },
}

impl FamilyDescriptor {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyDescriptor::HypercubeMidpoints { .. } => "hypercube_midpoints",
            FamilyDescriptor::Simplex { .. } => "simplex",
            FamilyDescriptor::Tetrahedron => "tetrahedron",
            FamilyDescriptor::Cube => "cube",
            FamilyDescriptor::OctaSix => "octa_six",
            FamilyDescriptor::Prism { .. } => "prism",
            FamilyDescriptor::Preassigned { .. } => "preassigned",
        }
    }

    /// Build the described family, validating its parameters.
    pub fn build(&self) -> Result<FamilyOutput> {
        match self {
            FamilyDescriptor::HypercubeMidpoints { n } => hypercube_midpoints(*n),
            FamilyDescriptor::Simplex { n } => simplex_vertices(*n),
            FamilyDescriptor::Tetrahedron => Ok(tetrahedron()),
            FamilyDescriptor::Cube => Ok(cube()),
            FamilyDescriptor::OctaSix => Ok(octa_six()),
            FamilyDescriptor::Prism { a } => triangular_prism(*a),
            FamilyDescriptor::Preassigned { minima, saddles } => {
                preassigned_minima(minima, saddles)
            }
        }
    }
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

fn vec_of(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

// ---------------------------------------------------------------------------
// Closed-form Hessian entries. Every formula below is re-derived numerically
// by the test suite from the Hessian summation formula and cross-checked
// against the trace identity tr H = Σ 2(N−2)/|x−w_k|².
// ---------------------------------------------------------------------------

/// Hessian entry at the hypercube saddle `√((n−2)/n)·e_i` along `e_i`.
pub fn hypercube_axial_entry(n: usize) -> f64 {
    let n = n as f64;
    -2.0 * n * n * (n - 2.0) / (n - 1.0)
}

/// Hessian entry at the hypercube saddle along any direction orthogonal to
/// the saddle axis.
pub fn hypercube_transverse_entry(n: usize) -> f64 {
    let n = n as f64;
    2.0 * n * n * n * (n - 2.0) / ((n - 1.0) * (n - 1.0))
}

/// Simplex-at-barycenter eigenvalue along `B` (multiplicity 1).
pub fn simplex_barycenter_parallel(n: usize) -> f64 {
    let n = n as f64;
    2.0 * n * n / (n - 1.0)
}

/// Simplex-at-barycenter eigenvalue orthogonal to `B` (multiplicity n−1).
pub fn simplex_barycenter_transverse(n: usize) -> f64 {
    let n = n as f64;
    2.0 * (n - 3.0) * n * n / ((n - 1.0) * (n - 1.0))
}

/// The single negative eigenvalue at the simplex saddle `Q_i`, with
/// eigenvector `B − e_i`.
pub fn simplex_saddle_negative(n: usize) -> f64 {
    let n = n as f64;
    -(n - 3.0) * n * n / (2.0 * (n - 2.0))
}

/// The eigenvalue at `Q_i` with eigenvector `B` (multiplicity 1).
pub fn simplex_saddle_parallel(n: usize) -> f64 {
    let n = n as f64;
    (n - 1.0) * n * n / (2.0 * (n - 2.0))
}

/// The eigenvalue at `Q_i` on the complement of span{B, e_i}
/// (multiplicity n−2): `n³(n−3)/(2(n−2)²)`.
pub fn simplex_saddle_transverse(n: usize) -> f64 {
    let n = n as f64;
    n * n * n * (n - 3.0) / (2.0 * (n - 2.0) * (n - 2.0))
}

// ---------------------------------------------------------------------------
// Family builders
// ---------------------------------------------------------------------------

/// The 2n points `±e_i` in R^n — the midpoints of the facets of the cube
/// `[−1,1]^n`. Requires `n ≥ 3`: for `n = 2` the leading term of the local
/// expansion at the origin vanishes and 0 is not a minimum.
pub fn hypercube_midpoints(n: usize) -> Result<FamilyOutput> {
    if n < 3 {
        return Err(Error::InvalidFamily(format!(
            "hypercube_midpoints requires n >= 3 (got {n}); at n = 2 the origin is not a local minimum"
        )));
    }
    let mut points = Vec::with_capacity(2 * n);
    for i in 0..n {
        points.push(unit(n, i));
    }
    for i in 0..n {
        points.push(-unit(n, i));
    }
    let config = PointConfiguration::new(points).expect("hypercube points are distinct");

    let radius = ((n as f64 - 2.0) / n as f64).sqrt();
    let mut saddles = Vec::with_capacity(2 * n);
    for i in 0..n {
        saddles.push(vec_of(&(unit(n, i) * radius)));
    }
    for i in 0..n {
        saddles.push(vec_of(&(unit(n, i) * -radius)));
    }
    let reference = Reference::Hypercube {
        n,
        minimum: vec![0.0; n],
        saddle_radius: radius,
        saddles,
        axial_entry: hypercube_axial_entry(n),
        transverse_entry: hypercube_transverse_entry(n),
        expected: Inventory { poles: 2 * n, minima: 1, saddles: 2 * n },
    };
    Ok(FamilyOutput { name: "hypercube_midpoints".into(), config, reference })
}

/// The n standard basis points `e_1, …, e_n` in R^n. Requires `n ≥ 4`: the
/// closed-form saddle spectrum degenerates below that (at n = 3 the
/// configuration is planar).
pub fn simplex_vertices(n: usize) -> Result<FamilyOutput> {
    if n < 4 {
        return Err(Error::InvalidFamily(format!(
            "simplex requires n >= 4 (got {n}); at n = 3 the points are coplanar and the saddle spectrum degenerates"
        )));
    }
    let points: Vec<DVector<f64>> = (0..n).map(|i| unit(n, i)).collect();
    let config = PointConfiguration::new(points).expect("simplex points are distinct");

    let nf = n as f64;
    let barycenter = DVector::from_element(n, 1.0 / nf);
    // Q_i = (2/(n−1))·B + ((n−3)/(n−1))·e_i.
    let saddles: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let q = &barycenter * (2.0 / (nf - 1.0)) + unit(n, i) * ((nf - 3.0) / (nf - 1.0));
            vec_of(&q)
        })
        .collect();

    let b_dir = vec![1.0 / nf; n];
    let mut b_minus_e1 = vec![1.0 / nf; n];
    b_minus_e1[0] -= 1.0;

    let reference = Reference::Simplex {
        n,
        barycenter: b_dir.clone(),
        saddles,
        barycenter_spectrum: vec![
            EigenDatum {
                value: simplex_barycenter_parallel(n),
                multiplicity: 1,
                direction: Some(b_dir.clone()),
            },
            EigenDatum {
                value: simplex_barycenter_transverse(n),
                multiplicity: n - 1,
                direction: None,
            },
        ],
        saddle_spectrum: vec![
            EigenDatum {
                value: simplex_saddle_negative(n),
                multiplicity: 1,
                direction: Some(b_minus_e1),
            },
            EigenDatum {
                value: simplex_saddle_parallel(n),
                multiplicity: 1,
                direction: Some(b_dir),
            },
            EigenDatum {
                value: simplex_saddle_transverse(n),
                multiplicity: n - 2,
                direction: None,
            },
        ],
        expected: Inventory { poles: n, minima: 1, saddles: n },
    };
    Ok(FamilyOutput { name: "simplex".into(), config, reference })
}

/// The regular tetrahedron `{e_1, e_2, e_3, e_1+e_2+e_3}` in R³, with a local
/// minimum at `B = (½,½,½)` and four saddles `y_i = ⅓w_i + ⅔B`.
pub fn tetrahedron() -> FamilyOutput {
    let w: Vec<DVector<f64>> = vec![
        unit(3, 0),
        unit(3, 1),
        unit(3, 2),
        DVector::from_vec(vec![1.0, 1.0, 1.0]),
    ];
    let b = DVector::from_element(3, 0.5);
    let saddles: Vec<Vec<f64>> = w.iter().map(|wi| vec_of(&(wi / 3.0 + &b * (2.0 / 3.0)))).collect();
    let config = PointConfiguration::new(w).expect("tetrahedron points are distinct");
    let reference = Reference::SmallExample {
        minimum: vec![0.5, 0.5, 0.5],
        saddles,
        expected: Inventory { poles: 4, minima: 1, saddles: 4 },
    };
    FamilyOutput { name: "tetrahedron".into(), config, reference }
}

/// The 8 vertices of the unit cube `{0,1}³`, with a local minimum at the
/// center `(½,½,½)`.
pub fn cube() -> FamilyOutput {
    let points: Vec<DVector<f64>> = (0..8u32)
        .map(|b| {
            DVector::from_vec(vec![
                (b & 1) as f64,
                ((b >> 1) & 1) as f64,
                ((b >> 2) & 1) as f64,
            ])
        })
        .collect();
    let config = PointConfiguration::new(points).expect("cube vertices are distinct");
    let reference = Reference::SmallExample {
        minimum: vec![0.5, 0.5, 0.5],
        saddles: Vec::new(),
        expected: Inventory { poles: 8, minima: 1, saddles: 8 },
    };
    FamilyOutput { name: "cube".into(), config, reference }
}

/// The 6 points `{e_1, e_2, e_3, e_1+e_2, e_1+e_3, e_2+e_3}` — the vertices
/// of a regular octahedron centered at `(½,½,½)`, which is a local minimum.
pub fn octa_six() -> FamilyOutput {
    let points: Vec<DVector<f64>> = vec![
        unit(3, 0),
        unit(3, 1),
        unit(3, 2),
        DVector::from_vec(vec![1.0, 1.0, 0.0]),
        DVector::from_vec(vec![1.0, 0.0, 1.0]),
        DVector::from_vec(vec![0.0, 1.0, 1.0]),
    ];
    let config = PointConfiguration::new(points).expect("octahedron points are distinct");
    let reference = Reference::SmallExample {
        minimum: vec![0.5, 0.5, 0.5],
        saddles: Vec::new(),
        expected: Inventory { poles: 6, minima: 1, saddles: 6 },
    };
    FamilyOutput { name: "octa_six".into(), config, reference }
}

/// Two parallel equilateral triangles at heights `±a`: the 6 points
/// `(cos(2πj/3), sin(2πj/3), ±a)` for `j = 1, 2, 3` (so the third vertex is
/// `(1, 0, ±a)`). The family bifurcates at `a = 1`: below it the origin is a
/// nondegenerate local minimum, at it the origin's Hessian acquires nullity
/// 1, above it the origin has negativity 1 and two local minima appear at
/// `(0, 0, ±√(a²−1))`.
pub fn triangular_prism(a: f64) -> Result<FamilyOutput> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidFamily(format!("prism requires a > 0 (got {a})")));
    }
    let mut points = Vec::with_capacity(6);
    for sign in [1.0, -1.0] {
        for j in 1..=3u32 {
            let theta = TAU * j as f64 / 3.0;
            points.push(DVector::from_vec(vec![theta.cos(), theta.sin(), sign * a]));
        }
    }
    let config = PointConfiguration::new(points).expect("prism points are distinct");

    let regime = if (a - 1.0).abs() <= 1e-12 {
        PrismRegime::Critical
    } else if a < 1.0 {
        PrismRegime::Subcritical
    } else {
        PrismRegime::Supercritical
    };
    let axial_minima = if let PrismRegime::Supercritical = regime {
        let z = (a * a - 1.0).sqrt();
        vec![vec![0.0, 0.0, z], vec![0.0, 0.0, -z]]
    } else {
        Vec::new()
    };
    let expected = match regime {
        PrismRegime::Supercritical => Some(Inventory { poles: 6, minima: 2, saddles: 7 }),
        _ => None,
    };
    let reference = Reference::Prism {
        a,
        critical_a: 1.0,
        regime,
        origin_nullity: if let PrismRegime::Critical = regime { 1 } else { 0 },
        axial_minima,
        expected,
    };
    Ok(FamilyOutput { name: "prism".into(), config, reference })
}

// ---------------------------------------------------------------------------
// Auxiliary polynomial and the preassigned-minima construction
// ---------------------------------------------------------------------------

/// A strictly positive real polynomial `P` of degree 2h with prescribed
/// critical structure, together with its factorization into real quadratics.
///
/// Given strictly increasing minima positions `r_1 < … < r_h` and interleaved
/// saddle positions `r_j < s_j < r_{j+1}`, the derivative is fixed as the
/// monic polynomial
///
/// ```text
/// P′(X) = (X − r_1)(X − s_1)(X − r_2) ⋯ (X − s_{h−1})(X − r_h),
/// ```
///
/// so `P` has local minima exactly at the `r_j` and local maxima at the
/// `s_j`. Two normalizations of `P` are kept:
///
/// - [`integrated`](Self::integrated): the antiderivative of `P′` with its
///   constant chosen so that `min_R P = 1` (attained at one of the `r_j`);
/// - [`coefficients`](Self::coefficients): the monic multiple
///   `2h · integrated`, which is exactly the product of the
///   [`factors`](Self::factors) `∏_j ((X − a_j)² + b_j²)`.
///
/// Both have the same critical points and the same roots `a_j ± i·b_j`. The
/// monic normalization is the one that appears in the on-axis identity of the
/// preassigned-minima configuration: `F(0, t) = coefficients(t)³`.
#[derive(Debug, Clone)]
pub struct AuxPolynomial {
    /// Number of prescribed minima.
    pub h: usize,
    /// Minima positions `r_1 < … < r_h`.
    pub r_values: Vec<f64>,
    /// Saddle positions `s_j` with `r_j < s_j < r_{j+1}`.
    pub s_values: Vec<f64>,
    /// The monic derivative `P′`, degree `2h − 1` (ascending coefficients).
    pub derivative: RealPolynomial,
    /// Antiderivative of `P′` normalized so `min_R = 1`; leading coefficient
    /// `1/(2h)`.
    pub integrated: RealPolynomial,
    /// Monic normalization `2h · integrated = ∏ ((X − a_j)² + b_j²)`.
    pub coefficients: RealPolynomial,
    /// The quadratic factor data `(a_j, b_j)` with `b_j > 0`, sorted by
    /// `(a_j, b_j)`.
    pub factors: Vec<(f64, f64)>,
}

impl AuxPolynomial {
    /// Evaluate the factor product `∏_j ((t − a_j)² + b_j²)`.
    pub fn eval_factors(&self, t: f64) -> f64 {
        self.factors.iter().map(|&(a, b)| (t - a) * (t - a) + b * b).product()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "h": self.h,
            "r_values": self.r_values,
            "s_values": self.s_values,
            "derivative": self.derivative.coeffs(),
            "integrated": self.integrated.coeffs(),
            "coefficients": self.coefficients.coeffs(),
            "factors": self.factors.iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>(),
        })
    }
}

fn validate_interleaving(r_values: &[f64], s_values: &[f64]) -> Result<()> {
    let h = r_values.len();
    if h < 2 {
        return Err(Error::InvalidFamily(format!(
            "preassigned construction needs at least 2 minima (got {h})"
        )));
    }
    if s_values.len() != h - 1 {
        return Err(Error::InvalidFamily(format!(
            "expected {} saddle values for {} minima (got {})",
            h - 1,
            h,
            s_values.len()
        )));
    }
    if r_values.iter().chain(s_values).any(|v| !v.is_finite()) {
        return Err(Error::InvalidFamily("minima/saddle values must be finite".into()));
    }
    for j in 0..h - 1 {
        if !(r_values[j] < s_values[j] && s_values[j] < r_values[j + 1]) {
            return Err(Error::InvalidFamily(format!(
                "values must interleave strictly: r[{j}] < s[{j}] < r[{}] violated ({} , {} , {})",
                j + 1,
                r_values[j],
                s_values[j],
                r_values[j + 1]
            )));
        }
    }
    Ok(())
}

/// Build the auxiliary polynomial for prescribed minima `r_values` and
/// saddles `s_values` (see [`AuxPolynomial`]).
///
/// The complex roots of `P` are found by Aberth–Ehrlich iteration with a
/// Newton polish and grouped into conjugate pairs `a_j ± i·b_j`; the factor
/// product is verified to reproduce the monic coefficients to relative
/// 1e−10, and a failure of that check is reported as a root-finding error.
///
/// That check is a genuine restriction on the input spread: the normalized
/// polynomial takes the value 1 at its global minimum while growing like
/// `spread^2h` away from it, so for wide inputs double precision cannot
/// even evaluate `P` near its minima to any relative accuracy (and the
/// factor imaginary parts `b_j` shrink like `spread^{1−h}`). Rescaling
/// does not help — the conditioning is scale-invariant — so wide inputs
/// are rejected rather than silently mangled. Spreads up to a few dozen
/// are comfortable for desk-scale `h`.
pub fn build_aux_polynomial(r_values: &[f64], s_values: &[f64]) -> Result<AuxPolynomial> {
    validate_interleaving(r_values, s_values)?;
    let h = r_values.len();

    // P′ = ∏ (X − r_j) · ∏ (X − s_j), monic of degree 2h − 1.
    let mut roots: Vec<f64> = Vec::with_capacity(2 * h - 1);
    roots.extend_from_slice(r_values);
    roots.extend_from_slice(s_values);
    let derivative = RealPolynomial::from_real_roots(&roots);

    // Antiderivative, with the constant set so the global minimum is 1. The
    // global minimum of any antiderivative of P′ over R is attained at one of
    // the r_j (P′ is negative before r_1, positive after r_h, and alternates
    // in between).
    let raw = derivative.antiderivative(0.0);
    let min_raw = r_values
        .iter()
        .map(|&r| raw.eval(r))
        .fold(f64::INFINITY, f64::min);
    let integrated = {
        let mut p = raw;
        p.shift_constant(1.0 - min_raw);
        p
    };
    let coefficients = integrated.scale(2.0 * h as f64);

    let spread = r_values[h - 1] - r_values[0];
    let roots = coefficients.complex_roots()?;

    // Group into conjugate pairs: sort by real part, match ± imaginary parts.
    let mut upper: Vec<C64> = roots.iter().copied().filter(|z| z.im > 0.0).collect();
    let mut lower: Vec<C64> = roots.iter().copied().filter(|z| z.im <= 0.0).collect();
    if upper.len() != h {
        return Err(Error::RootFinding {
            residual: f64::NAN,
            detail: format!(
                "expected {h} conjugate root pairs, found {} roots in the upper half-plane",
                upper.len()
            ),
        });
    }
    upper.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
    let mut factors = Vec::with_capacity(h);
    for z in &upper {
        let conj = C64::new(z.re, -z.im);
        let (best, dist) = lower
            .iter()
            .enumerate()
            .map(|(i, w)| (i, (w - conj).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .ok_or_else(|| Error::RootFinding {
                residual: f64::NAN,
                detail: "missing conjugate partner".into(),
            })?;
        if dist > 1e-8 * (1.0 + z.norm()) {
            return Err(Error::RootFinding {
                residual: dist,
                detail: format!("root {z} has no conjugate partner within tolerance"),
            });
        }
        lower.swap_remove(best);
        factors.push((z.re, z.im));
    }
    factors.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let aux = AuxPolynomial {
        h,
        r_values: r_values.to_vec(),
        s_values: s_values.to_vec(),
        derivative,
        integrated,
        coefficients,
        factors,
    };

    // Enforce the factor-product identity at construction time: sample over
    // an interval generously covering all the structure.
    let span = (spread.max(1.0)) * 1.5;
    let lo = r_values[0] - span;
    let hi = r_values[h - 1] + span;
    let mut worst: f64 = 0.0;
    for k in 0..=40 {
        let t = lo + (hi - lo) * k as f64 / 40.0;
        let exact = aux.coefficients.eval(t);
        let prod = aux.eval_factors(t);
        worst = worst.max((prod - exact).abs() / exact.abs().max(1.0));
    }
    if worst > 1e-10 {
        return Err(Error::RootFinding {
            residual: worst,
            detail: "factor product does not reproduce the polynomial; inputs are ill-conditioned — rescale them".into(),
        });
    }
    Ok(aux)
}

/// The preassigned-minima configuration: `3h` points
/// `(b_j·cos(2πi/3), b_j·sin(2πi/3), a_j)` for `i = 1, 2, 3` and each
/// quadratic factor `(a_j, b_j)` of the auxiliary polynomial. Its potential
/// satisfies `F(0, t) = P(t)³` on the vertical axis (with `P` the monic
/// [`AuxPolynomial::coefficients`]), has local minima at `(0, 0, r_j)` and
/// axial saddles at `(0, 0, s_j)`.
pub fn preassigned_minima(r_values: &[f64], s_values: &[f64]) -> Result<FamilyOutput> {
    let aux = build_aux_polynomial(r_values, s_values)?;
    let mut points = Vec::with_capacity(3 * aux.h);
    for &(a, b) in &aux.factors {
        for i in 1..=3u32 {
            let theta = TAU * i as f64 / 3.0;
            points.push(DVector::from_vec(vec![b * theta.cos(), b * theta.sin(), a]));
        }
    }
    let config = PointConfiguration::new(points)?;
    let h = aux.h;
    let reference = Reference::Preassigned {
        minima: r_values.iter().map(|&r| vec![0.0, 0.0, r]).collect(),
        axial_saddles: s_values.iter().map(|&s| vec![0.0, 0.0, s]).collect(),
        expected: Inventory { poles: 3 * h, minima: h, saddles: 4 * h - 1 },
        polynomial: aux,
    };
    Ok(FamilyOutput { name: "preassigned".into(), config, reference })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential;
    use nalgebra::DMatrix;

    fn dv(v: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(v)
    }

    /// Sorted eigenvalues of the Hessian at `x`.
    fn spectrum(cfg: &PointConfiguration, x: &DVector<f64>) -> Vec<f64> {
        let h = potential::hessian(cfg, x).unwrap();
        let mut eig = h.symmetric_eigen().eigenvalues.iter().copied().collect::<Vec<_>>();
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        eig
    }

    #[test]
    fn hypercube_requires_three_dimensions() {
        assert!(hypercube_midpoints(2).is_err());
        assert!(hypercube_midpoints(3).is_ok());
    }

    #[test]
    fn hypercube_saddle_locations_and_radius() {
        let fam = hypercube_midpoints(3).unwrap();
        let Reference::Hypercube { saddle_radius, ref saddles, .. } = fam.reference else {
            panic!("wrong reference kind")
        };
        assert!((saddle_radius - 0.5773502692).abs() < 1e-9);
        assert_eq!(saddles.len(), 6);
        assert!((saddles[0][0] - 0.5773502692).abs() < 1e-9);

        let fam4 = hypercube_midpoints(4).unwrap();
        let Reference::Hypercube { saddle_radius: r4, .. } = fam4.reference else {
            panic!("wrong reference kind")
        };
        assert!((r4 - 0.7071067812).abs() < 1e-9);
    }

    #[test]
    fn hypercube_saddles_are_critical() {
        for n in [3, 4, 5, 6] {
            let fam = hypercube_midpoints(n).unwrap();
            let Reference::Hypercube { ref saddles, .. } = fam.reference else { unreachable!() };
            for s in saddles {
                let g = potential::gradient(&fam.config, &dv(s)).unwrap();
                assert!(g.norm() < 1e-12, "n={n}: |grad| = {}", g.norm());
            }
        }
    }

    /// Oracle: the closed-form Hessian entries at the hypercube saddle must
    /// match the direct Hessian summation and satisfy the trace identity.
    #[test]
    fn hypercube_saddle_hessian_entries() {
        for n in [3usize, 4, 5, 6, 9] {
            let fam = hypercube_midpoints(n).unwrap();
            let Reference::Hypercube { saddle_radius, axial_entry, transverse_entry, .. } =
                fam.reference
            else {
                unreachable!()
            };
            let x = dv(&{
                let mut v = vec![0.0; n];
                v[0] = saddle_radius;
                v
            });
            let h = potential::hessian(&fam.config, &x).unwrap();
            // The Hessian is diagonal at λe_1 by symmetry.
            for i in 0..n {
                for j in 0..n {
                    let expect = if i != j {
                        0.0
                    } else if i == 0 {
                        axial_entry
                    } else {
                        transverse_entry
                    };
                    assert!(
                        (h[(i, j)] - expect).abs() < 1e-9 * h.norm(),
                        "n={n} entry ({i},{j}): {} vs {}",
                        h[(i, j)],
                        expect
                    );
                }
            }
            // Trace identity cross-check.
            let trace_rhs = potential::trace_identity_rhs(&fam.config, &x).unwrap();
            let closed = axial_entry + (n as f64 - 1.0) * transverse_entry;
            assert!((closed - trace_rhs).abs() < 1e-9 * trace_rhs.abs());
        }
        // Pinned value: n = 3 axial entry −2·9·(1/2) = −9.
        assert!((hypercube_axial_entry(3) + 9.0).abs() < 1e-12);
    }

    #[test]
    fn simplex_requires_four_dimensions() {
        assert!(simplex_vertices(3).is_err());
        assert!(simplex_vertices(4).is_ok());
    }

    #[test]
    fn simplex_saddle_arithmetic() {
        let fam = simplex_vertices(4).unwrap();
        let Reference::Simplex { ref saddles, .. } = fam.reference else { unreachable!() };
        // Q_1 = (2/3)B + (1/3)e_1 = (1/6,1/6,1/6,1/6) + (1/3)e_1.
        let expect = [0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0];
        for (got, want) in saddles[0].iter().zip(expect) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn simplex_barycenter_and_saddles_are_critical() {
        for n in [4, 5, 6] {
            let fam = simplex_vertices(n).unwrap();
            let Reference::Simplex { ref barycenter, ref saddles, .. } = fam.reference else {
                unreachable!()
            };
            let g = potential::gradient(&fam.config, &dv(barycenter)).unwrap();
            assert!(g.norm() < 1e-12);
            for s in saddles {
                let g = potential::gradient(&fam.config, &dv(s)).unwrap();
                assert!(g.norm() < 1e-12, "n={n}: |grad(Q)| = {}", g.norm());
            }
        }
    }

    /// Oracle: reference spectra versus direct eigendecomposition of the
    /// Hessian summation, with multiplicities and eigenvector directions.
    #[test]
    fn simplex_reference_spectra_match_eigendecomposition() {
        for n in [4usize, 5, 6, 8] {
            let fam = simplex_vertices(n).unwrap();
            let Reference::Simplex {
                ref barycenter,
                ref saddles,
                ref barycenter_spectrum,
                ref saddle_spectrum,
                ..
            } = fam.reference
            else {
                unreachable!()
            };

            // Expand (value, multiplicity) lists into sorted full spectra.
            let expand = |data: &[EigenDatum]| {
                let mut v: Vec<f64> = data
                    .iter()
                    .flat_map(|d| std::iter::repeat(d.value).take(d.multiplicity))
                    .collect();
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                v
            };

            let got_b = spectrum(&fam.config, &dv(barycenter));
            let want_b = expand(barycenter_spectrum);
            let scale = got_b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert_eq!(got_b.len(), want_b.len());
            for (g, w) in got_b.iter().zip(&want_b) {
                assert!((g - w).abs() < 1e-9 * scale, "n={n} at B: {g} vs {w}");
            }

            let q1 = dv(&saddles[0]);
            let got_q = spectrum(&fam.config, &q1);
            let want_q = expand(saddle_spectrum);
            let scale = got_q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (g, w) in got_q.iter().zip(&want_q) {
                assert!((g - w).abs() < 1e-9 * scale, "n={n} at Q1: {g} vs {w}");
            }

            // Eigenvector directions: the negative eigenvalue at Q_1 points
            // along B − e_1; the feature eigenvalue at B points along B.
            let h = potential::hessian(&fam.config, &q1).unwrap();
            let neg_dir = dv(saddle_spectrum[0].direction.as_ref().unwrap()).normalize();
            let lambda = saddle_spectrum[0].value;
            let resid = (&h * &neg_dir - &neg_dir * lambda).norm();
            assert!(resid < 1e-8 * h.norm(), "n={n}: eigenvector residual {resid}");

            let hb = potential::hessian(&fam.config, &dv(barycenter)).unwrap();
            let b_dir = dv(barycenter_spectrum[0].direction.as_ref().unwrap()).normalize();
            let lambda_b = barycenter_spectrum[0].value;
            let resid_b = (&hb * &b_dir - &b_dir * lambda_b).norm();
            assert!(resid_b < 1e-8 * hb.norm());

            // Trace identity cross-check of both closed-form spectra.
            let tr_b: f64 = want_b.iter().sum();
            assert!(
                (tr_b - potential::trace_identity_rhs(&fam.config, &dv(barycenter)).unwrap()).abs()
                    < 1e-9 * tr_b.abs()
            );
            let tr_q: f64 = want_q.iter().sum();
            assert!(
                (tr_q - potential::trace_identity_rhs(&fam.config, &q1).unwrap()).abs()
                    < 1e-9 * tr_q.abs()
            );
        }
        // Pinned values at n = 4 and n = 5.
        assert!((simplex_barycenter_parallel(4) - 32.0 / 3.0).abs() < 1e-12);
        assert!((simplex_saddle_negative(4) + 4.0).abs() < 1e-12);
        assert!((simplex_barycenter_parallel(5) - 12.5).abs() < 1e-12);
        assert!((simplex_barycenter_transverse(5) - 6.25).abs() < 1e-12);
        assert!((simplex_saddle_negative(5) + 25.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn tetrahedron_reference_points_are_critical() {
        let fam = tetrahedron();
        let Reference::SmallExample { ref minimum, ref saddles, .. } = fam.reference else {
            unreachable!()
        };
        assert_eq!(minimum, &vec![0.5, 0.5, 0.5]);
        let g = potential::gradient(&fam.config, &dv(minimum)).unwrap();
        assert!(g.norm() < 1e-12);
        assert_eq!(saddles.len(), 4);
        // y_1 = ⅓e_1 + ⅔B = (2/3, 1/3, 1/3).
        let y1 = &saddles[0];
        assert!((y1[0] - 2.0 / 3.0).abs() < 1e-14 && (y1[1] - 1.0 / 3.0).abs() < 1e-14);
        for y in saddles {
            let g = potential::gradient(&fam.config, &dv(y)).unwrap();
            assert!(g.norm() < 1e-12, "|grad(y)| = {}", g.norm());
            // Negativity 1 at each saddle.
            let eig = spectrum(&fam.config, &dv(y));
            assert!(eig[0] < 0.0 && eig[1] > 0.0);
        }
    }

    #[test]
    fn cube_and_octahedron_centers_are_minima() {
        for fam in [cube(), octa_six()] {
            let Reference::SmallExample { ref minimum, .. } = fam.reference else { unreachable!() };
            let c = dv(minimum);
            let g = potential::gradient(&fam.config, &c).unwrap();
            assert!(g.norm() < 1e-12, "{}: |grad| = {}", fam.name, g.norm());
            let eig = spectrum(&fam.config, &c);
            assert!(eig[0] > 0.0, "{}: Hessian not positive definite", fam.name);
        }
    }

    #[test]
    fn hypercube_center_is_a_minimum() {
        for n in [3, 4, 5] {
            let fam = hypercube_midpoints(n).unwrap();
            let c = DVector::zeros(n);
            let g = potential::gradient(&fam.config, &c).unwrap();
            assert!(g.norm() < 1e-12);
            let eig = spectrum(&fam.config, &c);
            assert!(eig[0] > 0.0);
        }
    }

    #[test]
    fn prism_parameter_validation() {
        assert!(triangular_prism(0.0).is_err());
        assert!(triangular_prism(-1.0).is_err());
        assert!(triangular_prism(f64::NAN).is_err());
        let fam = triangular_prism(1.25).unwrap();
        assert_eq!(fam.config.len(), 6);
        // Third vertex of the top triangle is (1, 0, a).
        let p = &fam.config.points()[2];
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1].abs() < 1e-15 && (p[2] - 1.25).abs() < 1e-15);
    }

    #[test]
    fn prism_origin_transitions_through_nullity() {
        // a < 1: positive definite. a = 1: nullity 1. a > 1: negativity 1.
        let origin = DVector::zeros(3);
        let sub = triangular_prism(0.8).unwrap();
        let g = potential::gradient(&sub.config, &origin).unwrap();
        assert!(g.norm() < 1e-12);
        let eig = spectrum(&sub.config, &origin);
        assert!(eig[0] > 0.0);

        let crit = triangular_prism(1.0).unwrap();
        let eig = spectrum(&crit.config, &origin);
        let scale = eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(eig[0].abs() < 1e-10 * scale, "λ_min = {}", eig[0]);
        assert!(eig[1] > 1e-6 * scale, "nullity must be exactly 1");
        if let Reference::Prism { regime, origin_nullity, .. } = crit.reference {
            assert_eq!(regime, PrismRegime::Critical);
            assert_eq!(origin_nullity, 1);
        } else {
            panic!("wrong reference kind");
        }

        let sup = triangular_prism(1.25).unwrap();
        let eig = spectrum(&sup.config, &origin);
        assert!(eig[0] < 0.0 && eig[1] > 0.0);
    }

    #[test]
    fn prism_supercritical_axial_minima() {
        for a in [1.25f64, 2.0_f64.sqrt(), 2.0] {
            let fam = triangular_prism(a).unwrap();
            let Reference::Prism { ref axial_minima, .. } = fam.reference else { unreachable!() };
            assert_eq!(axial_minima.len(), 2);
            let z = (a * a - 1.0).sqrt();
            assert!((axial_minima[0][2] - z).abs() < 1e-15);
            for m in axial_minima {
                let x = dv(m);
                let g = potential::gradient(&fam.config, &x).unwrap();
                assert!(g.norm() < 1e-11, "a={a}: |grad| = {}", g.norm());
                let eig = spectrum(&fam.config, &x);
                assert!(eig[0] > 0.0, "a={a}: minimum not positive definite");
            }
        }
        // a = 2 → minima at (0,0,±√3); a = √2 → (0,0,±1).
        let fam = triangular_prism(2.0).unwrap();
        let Reference::Prism { ref axial_minima, .. } = fam.reference else { unreachable!() };
        assert!((axial_minima[0][2] - 3.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rotation_by_120_degrees_preserves_prism_and_preassigned_potentials() {
        use rand::prelude::*;
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let (c, s) = ((TAU / 3.0).cos(), (TAU / 3.0).sin());
        let rot = DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]);
        let fams = [
            triangular_prism(1.3).unwrap(),
            preassigned_minima(&[-1.0, 1.0], &[0.0]).unwrap(),
        ];
        for fam in &fams {
            for _ in 0..100 {
                let x = DVector::from_fn(3, |_, _| rng.random_range(-2.0..2.0));
                let fx = potential::eval(&fam.config, &x).unwrap();
                let frx = potential::eval(&fam.config, &(&rot * &x)).unwrap();
                let (a, b) = (fx.product, frx.product);
                assert!(
                    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()),
                    "{}: F not rotation invariant: {a} vs {b}",
                    fam.name
                );
            }
        }
    }

    #[test]
    fn aux_polynomial_validation() {
        // Too few minima.
        assert!(build_aux_polynomial(&[0.0], &[]).is_err());
        // Wrong saddle count.
        assert!(build_aux_polynomial(&[-1.0, 1.0], &[]).is_err());
        // Not increasing.
        assert!(build_aux_polynomial(&[1.0, -1.0], &[0.0]).is_err());
        // Saddle outside its gap.
        assert!(build_aux_polynomial(&[-1.0, 1.0], &[2.0]).is_err());
        assert!(build_aux_polynomial(&[-1.0, 1.0], &[f64::NAN]).is_err());
    }

    #[test]
    fn aux_polynomial_symmetric_example() {
        // r = (−1, 1), s = (0): P′ = X³ − X, integrated = X⁴/4 − X²/2 + 5/4
        // (min −1/4 at ±1, so the constant is 5/4), monic = X⁴ − 2X² + 5.
        let aux = build_aux_polynomial(&[-1.0, 1.0], &[0.0]).unwrap();
        assert_eq!(aux.h, 2);
        let want_deriv = [0.0, -1.0, 0.0, 1.0];
        for (g, w) in aux.derivative.coeffs().iter().zip(want_deriv) {
            assert!((g - w).abs() < 1e-14);
        }
        let want_integrated = [1.25, 0.0, -0.5, 0.0, 0.25];
        for (g, w) in aux.integrated.coeffs().iter().zip(want_integrated) {
            assert!((g - w).abs() < 1e-14);
        }
        let want_monic = [5.0, 0.0, -2.0, 0.0, 1.0];
        for (g, w) in aux.coefficients.coeffs().iter().zip(want_monic) {
            assert!((g - w).abs() < 1e-13);
        }
        // Roots are ±√φ ± i/√φ with φ the golden ratio.
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert_eq!(aux.factors.len(), 2);
        let (a0, b0) = aux.factors[0];
        let (a1, b1) = aux.factors[1];
        assert!((a0 + phi.sqrt()).abs() < 1e-10 && (a1 - phi.sqrt()).abs() < 1e-10);
        assert!((b0 - 1.0 / phi.sqrt()).abs() < 1e-10 && (b1 - 1.0 / phi.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn aux_polynomial_critical_values_and_positivity() {
        let aux = build_aux_polynomial(&[-2.0, 0.5, 3.0], &[-0.5, 1.0]).unwrap();
        // P′ vanishes exactly at the prescribed points (by construction),
        // and nowhere else: verify via the root-finding oracle on the
        // formally differentiated coefficients.
        let formal = aux.coefficients.derivative();
        let roots = formal.complex_roots().unwrap();
        let mut reals: Vec<f64> = roots
            .iter()
            .map(|z| {
                assert!(z.im.abs() < 1e-7, "P' must have real roots, got {z}");
                z.re
            })
            .collect();
        reals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut expect = vec![-2.0, -0.5, 0.5, 1.0, 3.0];
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(reals.len(), expect.len());
        for (g, w) in reals.iter().zip(expect) {
            assert!((g - w).abs() < 1e-7, "{g} vs {w}");
        }
        // Simplicity: P″ does not vanish at any root.
        let second = formal.derivative();
        for &r in &[-2.0, -0.5, 0.5, 1.0, 3.0] {
            assert!(second.eval(r).abs() > 1e-6);
        }
        // min integrated = 1, attained at one of the r_j.
        let min_at_r = aux
            .r_values
            .iter()
            .map(|&r| aux.integrated.eval(r))
            .fold(f64::INFINITY, f64::min);
        assert!((min_at_r - 1.0).abs() < 1e-12);
        // Positivity on a wide sample.
        for k in 0..200 {
            let t = -6.0 + 12.0 * k as f64 / 199.0;
            assert!(aux.integrated.eval(t) >= 1.0 - 1e-9);
        }
        // b_j > 0 and factors pairwise distinct.
        for &(_, b) in &aux.factors {
            assert!(b > 0.0);
        }
        for i in 0..aux.factors.len() {
            for j in i + 1..aux.factors.len() {
                let (ai, bi) = aux.factors[i];
                let (aj, bj) = aux.factors[j];
                assert!((ai - aj).abs() + (bi - bj).abs() > 1e-9);
            }
        }
    }

    #[test]
    fn aux_polynomial_factor_product_reproduces_coefficients() {
        let aux = build_aux_polynomial(&[-1.0, 1.0], &[0.0]).unwrap();
        for k in 0..20 {
            let t = -3.0 + 6.0 * k as f64 / 19.0;
            let exact = aux.coefficients.eval(t);
            let prod = aux.eval_factors(t);
            assert!((prod - exact).abs() <= 1e-10 * exact.abs());
        }
    }

    #[test]
    fn aux_polynomial_moderate_spread_succeeds() {
        // Spread 40: the factor imaginary parts are ~0.05, comfortably
        // resolvable.
        let aux = build_aux_polynomial(&[-20.0, 20.0], &[0.0]).unwrap();
        assert_eq!(aux.factors.len(), 2);
        for k in 0..=20 {
            let t = -25.0 + 50.0 * k as f64 / 20.0;
            let exact = aux.coefficients.eval(t);
            let prod = aux.eval_factors(t);
            assert!((prod - exact).abs() <= 1e-9 * exact.abs());
        }
    }

    #[test]
    fn aux_polynomial_rejects_unresolvable_spread() {
        // At spread 4e3 the normalized polynomial cannot be evaluated near
        // its minima to any relative accuracy in f64 (value 1 against terms
        // of size ~1e20), so the construction must refuse instead of
        // returning a factorization that fails its own identity.
        let err = build_aux_polynomial(&[-2000.0, 0.0, 2000.0], &[-1000.0, 1000.0]);
        assert!(matches!(err, Err(Error::RootFinding { .. })));
    }

    #[test]
    fn preassigned_points_and_axis_identity() {
        let fam = preassigned_minima(&[-1.0, 1.0], &[0.0]).unwrap();
        assert_eq!(fam.config.len(), 6);
        let Reference::Preassigned { ref polynomial, ref minima, ref axial_saddles, expected } =
            fam.reference
        else {
            unreachable!()
        };
        assert_eq!(minima, &vec![vec![0.0, 0.0, -1.0], vec![0.0, 0.0, 1.0]]);
        assert_eq!(axial_saddles, &vec![vec![0.0, 0.0, 0.0]]);
        assert_eq!(expected, Inventory { poles: 6, minima: 2, saddles: 7 });

        // F(0, t) = P(t)³ with P the monic polynomial, at 50 sample points.
        for k in 0..50 {
            let t = -2.5 + 5.0 * k as f64 / 49.0;
            let x = dv(&[0.0, 0.0, t]);
            let f = potential::eval(&fam.config, &x).unwrap();
            let p = polynomial.coefficients.eval(t);
            let want = p * p * p;
            assert!(
                (f.product - want).abs() <= 1e-10 * want.abs(),
                "t={t}: F = {} vs P³ = {want}",
                f.product
            );
        }

        // The prescribed minima and saddles are critical points.
        for loc in minima.iter().chain(axial_saddles) {
            let g = potential::gradient(&fam.config, &dv(loc)).unwrap();
            assert!(g.norm() < 1e-11, "|grad| = {} at {loc:?}", g.norm());
        }
        // Minima are nondegenerate minima; axial saddles have negativity 1.
        for m in minima {
            let eig = spectrum(&fam.config, &dv(m));
            assert!(eig[0] > 0.0);
        }
        for s in axial_saddles {
            let eig = spectrum(&fam.config, &dv(s));
            assert!(eig[0] < 0.0 && eig[1] > 0.0);
        }
    }

    #[test]
    fn preassigned_three_minima() {
        let fam = preassigned_minima(&[-2.0, 0.0, 2.0], &[-1.0, 1.0]).unwrap();
        assert_eq!(fam.config.len(), 9);
        let Reference::Preassigned { ref polynomial, ref minima, expected, .. } = fam.reference
        else {
            unreachable!()
        };
        assert_eq!(expected, Inventory { poles: 9, minima: 3, saddles: 11 });
        for m in minima {
            let g = potential::gradient(&fam.config, &dv(m)).unwrap();
            assert!(g.norm() < 1e-11);
            let eig = spectrum(&fam.config, &dv(m));
            assert!(eig[0] > 0.0, "minimum at {m:?} not nondegenerate");
        }
        // Axis identity again at a few points.
        for t in [-2.3, -0.7, 0.1, 1.9] {
            let x = dv(&[0.0, 0.0, t]);
            let f = potential::eval(&fam.config, &x).unwrap();
            let p = polynomial.coefficients.eval(t);
            assert!((f.product - p * p * p).abs() <= 1e-10 * (p * p * p).abs());
        }
    }

    #[test]
    fn descriptor_dispatch_and_json() {
        let fams: Vec<FamilyDescriptor> = vec![
            FamilyDescriptor::HypercubeMidpoints { n: 3 },
            FamilyDescriptor::Simplex { n: 4 },
            FamilyDescriptor::Tetrahedron,
            FamilyDescriptor::Cube,
            FamilyDescriptor::OctaSix,
            FamilyDescriptor::Prism { a: 1.25 },
            FamilyDescriptor::Preassigned { minima: vec![-1.0, 1.0], saddles: vec![0.0] },
        ];
        for d in &fams {
            let out = d.build().unwrap();
            assert_eq!(out.name, d.name());
            let v = out.to_json();
            assert_eq!(v["family"], Value::from(d.name()));
            assert!(v["points"].as_array().unwrap().len() >= 4);
            // Deterministic: building twice yields identical JSON.
            let again = d.build().unwrap().to_json();
            assert_eq!(v, again);
        }
        // Inventory accessor.
        let tet = tetrahedron();
        assert_eq!(
            tet.reference.expected_inventory(),
            Some(Inventory { poles: 4, minima: 1, saddles: 4 })
        );
    }
}
