//! Linear complex structures, Levi forms, and the Hessian decomposition
//! `H = Q + Q̄ + 2L`.
//!
//! A complex structure on `R^{2n}` is given here by an orthonormal basis
//! grouped into n ordered pairs; each pair spans one complex line, and the
//! induced rotation J (multiplication by i) maps the first vector of a pair
//! to the second. Relative to such a structure, any symmetric bilinear form
//! H splits uniquely into a complex-symmetric part Q and a Hermitian part L
//! (the Levi form) with
//!
//! ```text
//!     H(x, x) = 2·Re Σ Q_{jk} ξ_j ξ_k + 2·Σ ξ̄_j L_{jk} ξ_k,
//! ```
//!
//! where ξ is the complex coordinate of x. For the potential
//! `f = Σ log|z − w_k|²` on `C^n` the Levi form is the sum of Fubini–Study
//! type forms `(|u|²·I − u u*)/|u|⁴` with `u = z − w_k`: positive
//! semidefinite always, and definite unless every `w_k` lies on one complex
//! affine line through `z`.
//!
//! [`adapted_structure`] builds, for a symmetric form with at least two
//! nonpositive eigenvalues, a complex structure in which one line absorbs
//! both — the step that turns the spectral constraint on Hessians of `f`
//! into a contradiction with Levi positivity. For a nondegenerate critical
//! point of a configuration with affine span ≥ 3 it must therefore always
//! fail, and the tests drive it against every closed-form example to confirm
//! exactly that.
//!
//! Conventions: `L` from [`decompose_hessian`] is Wirtinger-normalized
//! (`H = Identity` gives `L = ½·Identity`), while the complexified
//! diagonal values reported by [`adapted_structure`] as
//! [`AdaptedStructure::line_values`] are `½(λ_{2j−1} + λ_{2j})` — twice the
//! corresponding `L` diagonal. Both appear in the literature; each accessor
//! documents which one it returns.

use nalgebra::{DMatrix, DVector};
use serde_json::{json, Value};

use crate::config::PointConfiguration;
use crate::error::{Error, Result};
use crate::polynomial::C64;

/// A linear complex structure on `R^{2n}`: an orthonormal basis whose
/// columns are grouped into consecutive pairs, each spanning a complex line.
#[derive(Debug, Clone)]
pub struct ComplexStructure {
    /// 2n×2n orthogonal matrix; columns 2j, 2j+1 are the j-th pair.
    basis: DMatrix<f64>,
    n: usize,
}

impl ComplexStructure {
    /// Build from a basis matrix, validating orthonormality (to 1e−10) and
    /// the induced `J² = −Id`.
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let dim = basis.nrows();
        if basis.ncols() != dim {
            return Err(Error::InvalidStructure(format!(
                "basis must be square, got {}x{}",
                dim,
                basis.ncols()
            )));
        }
        if dim % 2 != 0 {
            return Err(Error::OddDimension(dim));
        }
        let gram = basis.transpose() * &basis;
        let dev = (&gram - DMatrix::identity(dim, dim)).norm();
        if dev > 1e-10 {
            return Err(Error::InvalidStructure(format!(
                "basis is not orthonormal (deviation {dev:.3e})"
            )));
        }
        let s = Self { basis, n: dim / 2 };
        let j = s.j_matrix();
        let dev = (&j * &j + DMatrix::identity(dim, dim)).norm();
        if dev > 1e-9 {
            return Err(Error::InvalidStructure(format!(
                "induced rotation does not square to -Id (deviation {dev:.3e})"
            )));
        }
        Ok(s)
    }

    /// The standard structure on `R^{2n}`: coordinates interleaved as
    /// `(x_1, y_1, x_2, y_2, …)`, complex coordinate `ξ_j = x_j + i·y_j`.
    pub fn standard(n: usize) -> Self {
        Self { basis: DMatrix::identity(2 * n, 2 * n), n }
    }

    /// Complex dimension n.
    pub fn complex_dim(&self) -> usize {
        self.n
    }

    /// Real dimension 2n.
    pub fn real_dim(&self) -> usize {
        2 * self.n
    }

    /// The 2n×2n basis matrix (columns are the paired basis vectors).
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// The induced rotation J: maps pair vector a_j ↦ b_j and b_j ↦ −a_j.
    pub fn j_matrix(&self) -> DMatrix<f64> {
        let dim = 2 * self.n;
        let mut j = DMatrix::zeros(dim, dim);
        for p in 0..self.n {
            let a = self.basis.column(2 * p);
            let b = self.basis.column(2 * p + 1);
            // J = Σ (b aᵀ − a bᵀ)
            j += &b * a.transpose() - &a * b.transpose();
        }
        j
    }

    /// Complex coordinates of a real vector: `ξ_j = ⟨x, a_j⟩ + i⟨x, b_j⟩`.
    pub fn complex_coordinates(&self, x: &DVector<f64>) -> Result<Vec<C64>> {
        if x.len() != 2 * self.n {
            return Err(Error::DimensionMismatch { expected: 2 * self.n, got: x.len() });
        }
        Ok((0..self.n)
            .map(|p| {
                C64::new(self.basis.column(2 * p).dot(x), self.basis.column(2 * p + 1).dot(x))
            })
            .collect())
    }
}

/// A Hermitian n×n form, stored as real and imaginary parts
/// (`re` symmetric, `im` antisymmetric).
#[derive(Debug, Clone)]
pub struct HermitianForm {
    re: DMatrix<f64>,
    im: DMatrix<f64>,
    /// The base point the form was computed at, when there is one.
    pub at: Option<DVector<f64>>,
}

impl HermitianForm {
    /// Build from real/imaginary parts, validating conjugate symmetry to
    /// 1e−10 relative.
    pub fn new(re: DMatrix<f64>, im: DMatrix<f64>) -> Result<Self> {
        let n = re.nrows();
        if re.ncols() != n || im.nrows() != n || im.ncols() != n {
            return Err(Error::InvalidStructure("Hermitian parts must be square and same-size".into()));
        }
        let scale = re.norm().max(im.norm()).max(1e-300);
        let dev = (&re - re.transpose()).norm().max((&im + im.transpose()).norm());
        if dev > 1e-10 * scale {
            return Err(Error::InvalidStructure(format!(
                "matrix is not conjugate-symmetric (deviation {dev:.3e})"
            )));
        }
        // Symmetrize exactly so downstream eigen code sees clean input.
        let re = (&re + re.transpose()) * 0.5;
        let im = (&im - im.transpose()) * 0.5;
        Ok(Self { re, im, at: None })
    }

    pub fn n(&self) -> usize {
        self.re.nrows()
    }

    pub fn re(&self) -> &DMatrix<f64> {
        &self.re
    }

    pub fn im(&self) -> &DMatrix<f64> {
        &self.im
    }

    pub fn entry(&self, j: usize, k: usize) -> C64 {
        C64::new(self.re[(j, k)], self.im[(j, k)])
    }

    /// The real 2n×2n embedding `[[Re, −Im], [Im, Re]]`, symmetric, whose
    /// spectrum is the Hermitian spectrum with every eigenvalue doubled.
    fn embedding(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut e = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                e[(i, j)] = self.re[(i, j)];
                e[(i, j + n)] = -self.im[(i, j)];
                e[(i + n, j)] = self.im[(i, j)];
                e[(i + n, j + n)] = self.re[(i, j)];
            }
        }
        e
    }

    /// Real eigenvalues, ascending, with complex eigenvectors.
    pub fn eigen(&self) -> (Vec<f64>, Vec<Vec<C64>>) {
        let n = self.n();
        let eig = self.embedding().symmetric_eigen();
        let mut order: Vec<usize> = (0..2 * n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        // Each Hermitian eigenvalue appears twice; take every second one.
        let mut values = Vec::with_capacity(n);
        let mut vectors = Vec::with_capacity(n);
        for pair in 0..n {
            let idx = order[2 * pair];
            values.push(eig.eigenvalues[idx]);
            let col = eig.eigenvectors.column(idx);
            vectors.push((0..n).map(|i| C64::new(col[i], col[i + n])).collect());
        }
        (values, vectors)
    }

    /// Real eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen().0
    }

    /// The Hermitian quadratic form `w* A w` (real by symmetry).
    pub fn quadratic(&self, w: &[C64]) -> Result<f64> {
        let n = self.n();
        if w.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: w.len() });
        }
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                acc += w[j].conj() * self.entry(j, k) * w[k];
            }
        }
        Ok(acc.re)
    }

    /// Count of eigenvalues with `|λ| ≤ tol`.
    pub fn nullity(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|v| v.abs() <= tol).count()
    }

    pub fn scaled(&self, s: f64) -> HermitianForm {
        HermitianForm { re: &self.re * s, im: &self.im * s, at: self.at.clone() }
    }

    pub fn add(&self, other: &HermitianForm) -> HermitianForm {
        HermitianForm { re: &self.re + &other.re, im: &self.im + &other.im, at: self.at.clone() }
    }

    pub fn to_json(&self) -> Value {
        let n = self.n();
        let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
            (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect()
        };
        json!({
            "n": n,
            "re": rows(&self.re),
            "im": rows(&self.im),
            "eigenvalues": self.eigenvalues(),
        })
    }
}

/// The splitting `H = Q + Q̄ + 2L` of a symmetric real form relative to a
/// complex structure: `q` is complex symmetric, `levi` is Hermitian.
#[derive(Debug, Clone)]
pub struct HessianDecomposition {
    /// Real part of Q (symmetric).
    pub q_re: DMatrix<f64>,
    /// Imaginary part of Q (symmetric).
    pub q_im: DMatrix<f64>,
    /// The Hermitian/Levi part L (Wirtinger normalization).
    pub levi: HermitianForm,
    structure: ComplexStructure,
}

impl HessianDecomposition {
    /// Reassemble the real symmetric matrix from Q and L; the result must
    /// reproduce the decomposed input entrywise.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let n = self.levi.n();
        let mut s = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            for k in 0..n {
                // In pair coordinates (p = along a_j, q = along b_j):
                //   S^{pp} = 2(Re Q + Re L),  S^{qq} = 2(Re L − Re Q),
                //   S^{pq} = −2(Im Q + Im L).
                s[(2 * j, 2 * k)] = 2.0 * (self.q_re[(j, k)] + self.levi.re()[(j, k)]);
                s[(2 * j + 1, 2 * k + 1)] = 2.0 * (self.levi.re()[(j, k)] - self.q_re[(j, k)]);
                let cross = -2.0 * (self.q_im[(j, k)] + self.levi.im()[(j, k)]);
                s[(2 * j, 2 * k + 1)] = cross;
                s[(2 * k + 1, 2 * j)] = cross;
            }
        }
        let b = self.structure.basis();
        b * s * b.transpose()
    }

    pub fn to_json(&self) -> Value {
        let n = self.levi.n();
        let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
            (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect()
        };
        json!({
            "q_re": rows(&self.q_re),
            "q_im": rows(&self.q_im),
            "levi": self.levi.to_json(),
        })
    }
}

/// The Fubini–Study quantity `(|z|²|w|² − |⟨w,z⟩|²)/|z|⁴` — the Levi form of
/// `log|z|²` at `z` applied to `w`. Nonnegative, and zero exactly when `w`
/// lies on the complex line `C·z`.
pub fn fubini_levi(z: &[C64], w: &[C64]) -> Result<f64> {
    if z.len() != w.len() {
        return Err(Error::DimensionMismatch { expected: z.len(), got: w.len() });
    }
    let z2: f64 = z.iter().map(|v| v.norm_sqr()).sum();
    if z2 == 0.0 {
        return Err(Error::InvalidStructure("Fubini-Study base point must be nonzero".into()));
    }
    let w2: f64 = w.iter().map(|v| v.norm_sqr()).sum();
    // ⟨w, z⟩ = Σ w_j z̄_j
    let inner: C64 = w.iter().zip(z).map(|(a, b)| a * b.conj()).sum();
    Ok((z2 * w2 - inner.norm_sqr()) / (z2 * z2))
}

/// Interleave a real vector into `C^n` (odd lengths get a zero appended):
/// `ξ_j = x_{2j−1} + i·x_{2j}`.
pub fn interleave(x: &DVector<f64>) -> Vec<C64> {
    let n = x.len().div_ceil(2);
    (0..n)
        .map(|j| {
            let re = x[2 * j];
            let im = if 2 * j + 1 < x.len() { x[2 * j + 1] } else { 0.0 };
            C64::new(re, im)
        })
        .collect()
}

/// The Levi form of the potential `f = Σ_k log|z − w_k|²` at `z`, in the
/// standard interleaved complex coordinates on `R^N` (`N` odd is first
/// embedded in `R^{N+1}` by appending a zero). The result is the sum of the
/// Fubini–Study forms `(|u_k|²·I − u_k u_k*)/|u_k|⁴`, positive semidefinite
/// always, and has nullity exactly 1 (kernel along the line) when all the
/// `w_k` and `z` lie on one complex affine line.
pub fn levi_form_of_potential(cfg: &PointConfiguration, x: &DVector<f64>) -> Result<HermitianForm> {
    if x.len() != cfg.dimension() {
        return Err(Error::DimensionMismatch { expected: cfg.dimension(), got: x.len() });
    }
    let n = cfg.dimension().div_ceil(2);
    let z = interleave(x);
    let guard = crate::config::POLE_GUARD_REL * cfg.scale();
    let mut re = DMatrix::zeros(n, n);
    let mut im = DMatrix::zeros(n, n);
    for (k, w) in cfg.points().iter().enumerate() {
        let wk = interleave(w);
        let u: Vec<C64> = z.iter().zip(&wk).map(|(a, b)| a - b).collect();
        let g: f64 = u.iter().map(|v| v.norm_sqr()).sum();
        if g.sqrt() <= guard {
            return Err(Error::PoleEvaluation { index: k, distance: g.sqrt() });
        }
        // (|u|² I − u u*)/|u|⁴
        for j in 0..n {
            for l in 0..n {
                let uu = u[j] * u[l].conj();
                let val = C64::new(if j == l { g } else { 0.0 } - uu.re, -uu.im);
                re[(j, l)] += val.re / (g * g);
                im[(j, l)] += val.im / (g * g);
            }
        }
    }
    let mut form = HermitianForm::new(re, im)?;
    form.at = Some(x.clone());
    Ok(form)
}

/// Split a symmetric matrix `H` into `Q + Q̄ + 2L` relative to `structure`.
///
/// With pair vectors `a_j, b_j` and `H(u,v) = uᵀHv`:
///
/// ```text
///   L_{jk} = ¼[ H(a_j,a_k) + H(b_j,b_k) + i(H(b_j,a_k) − H(a_j,b_k)) ]
///   Q_{jk} = ¼[ H(a_j,a_k) − H(b_j,b_k) − i(H(a_j,b_k) + H(b_j,a_k)) ]
/// ```
///
/// When `H` is the Hessian of the potential and `structure` is standard, `L`
/// equals [`levi_form_of_potential`] at the same point.
pub fn decompose_hessian(
    h: &DMatrix<f64>,
    structure: &ComplexStructure,
) -> Result<HessianDecomposition> {
    let dim = structure.real_dim();
    if h.nrows() != dim || h.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: h.nrows().max(h.ncols()) });
    }
    let dev = (h - h.transpose()).norm();
    if dev > 1e-9 * h.norm().max(1e-300) {
        return Err(Error::NotSymmetric { deviation: dev });
    }
    let n = structure.complex_dim();
    let b = structure.basis();
    let m = b.transpose() * h * b; // H in pair coordinates
    let mut l_re = DMatrix::zeros(n, n);
    let mut l_im = DMatrix::zeros(n, n);
    let mut q_re = DMatrix::zeros(n, n);
    let mut q_im = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let aa = m[(2 * j, 2 * k)];
            let bb = m[(2 * j + 1, 2 * k + 1)];
            let ab = m[(2 * j, 2 * k + 1)]; // H(a_j, b_k)
            let ba = m[(2 * j + 1, 2 * k)]; // H(b_j, a_k)
            l_re[(j, k)] = 0.25 * (aa + bb);
            l_im[(j, k)] = 0.25 * (ba - ab);
            q_re[(j, k)] = 0.25 * (aa - bb);
            q_im[(j, k)] = -0.25 * (ab + ba);
        }
    }
    let levi = HermitianForm::new(l_re, l_im)?;
    Ok(HessianDecomposition { q_re, q_im, levi, structure: structure.clone() })
}

/// A complex structure adapted to a symmetric form: consecutive ascending
/// eigendirections are paired into complex lines, so the first line carries
/// the two smallest eigenvalues.
#[derive(Debug, Clone)]
pub struct AdaptedStructure {
    pub structure: ComplexStructure,
    /// The complexified quadratic values on each line:
    /// `½(λ_{2j−1} + λ_{2j})` (twice the corresponding Levi diagonal in the
    /// Wirtinger normalization of [`decompose_hessian`]).
    pub line_values: Vec<f64>,
}

/// Build a complex structure adapted to `h`, pairing its two smallest
/// eigendirections into one complex line.
///
/// Requires at least two eigenvalues ≤ ε with `ε = 1e−8·max|λ|` — i.e.
/// positivity at most `2n−2`. For the Hessian of the potential at a
/// nondegenerate critical point of a configuration with affine span ≥ 3 the
/// precondition always fails (positivity is at least `2n−1` there); the
/// error is exactly the contradiction the structure theorems live on, and
/// callers use it as a checkable certificate.
pub fn adapted_structure(h: &DMatrix<f64>) -> Result<AdaptedStructure> {
    let dim = h.nrows();
    if h.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: h.ncols() });
    }
    if dim % 2 != 0 {
        return Err(Error::OddDimension(dim));
    }
    let dev = (h - h.transpose()).norm();
    if dev > 1e-9 * h.norm().max(1e-300) {
        return Err(Error::NotSymmetric { deviation: dev });
    }
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eps = 1e-8 * values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let nonpositive = values.iter().filter(|&&v| v <= eps).count();
    if nonpositive < 2 {
        let positivity = dim - nonpositive;
        return Err(Error::PositivityTooHigh { positivity, limit: dim - 2 });
    }
    let mut basis = DMatrix::zeros(dim, dim);
    for (col, &i) in order.iter().enumerate() {
        basis.set_column(col, &eig.eigenvectors.column(i));
    }
    let structure = ComplexStructure::new(basis)?;
    let line_values =
        (0..dim / 2).map(|j| 0.5 * (values[2 * j] + values[2 * j + 1])).collect();
    Ok(AdaptedStructure { structure, line_values })
}
