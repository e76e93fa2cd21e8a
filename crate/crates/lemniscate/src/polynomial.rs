//! Dense univariate polynomials (real and complex coefficients) with
//! Aberth–Ehrlich root finding.
//!
//! Roots come from the Aberth–Ehrlich simultaneous iteration followed by a
//! Newton polish and a backward-error residual check. The iteration is
//! chosen over QR on the companion matrix because unshifted-QR-style
//! eigensolvers can cycle indefinitely on exactly the structured spectra
//! this crate produces: nilpotent companions (an `m`-fold root) and the
//! `±a ± ib` spectra of even polynomials. Aberth is bounded by an
//! iteration cap, and every answer is judged by its residual rather than
//! by the iteration's own convergence claim.

use nalgebra::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Real polynomial, coefficients in ascending order: `c[0] + c[1] X + …`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPolynomial {
    pub coeffs: Vec<f64>,
}

impl RealPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    /// Ascending coefficients `c[0] + c[1] X + …`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Add `delta` to the constant term.
    pub fn shift_constant(&mut self, delta: f64) {
        if self.coeffs.is_empty() {
            self.coeffs.push(delta);
        } else {
            self.coeffs[0] += delta;
        }
    }

    pub fn degree(&self) -> usize {
        let mut d = self.coeffs.len();
        while d > 1 && self.coeffs[d - 1] == 0.0 {
            d -= 1;
        }
        d - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + C64::new(*c, 0.0))
    }

    pub fn derivative(&self) -> RealPolynomial {
        if self.coeffs.len() <= 1 {
            return RealPolynomial::new(vec![0.0]);
        }
        RealPolynomial::new(
            self.coeffs[1..].iter().enumerate().map(|(i, c)| (i + 1) as f64 * c).collect(),
        )
    }

    /// Termwise antiderivative with constant term `constant`.
    pub fn antiderivative(&self, constant: f64) -> RealPolynomial {
        let mut out = vec![constant];
        out.extend(self.coeffs.iter().enumerate().map(|(i, c)| c / (i + 1) as f64));
        RealPolynomial::new(out)
    }

    pub fn scale(&self, s: f64) -> RealPolynomial {
        RealPolynomial::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &RealPolynomial) -> RealPolynomial {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RealPolynomial::new(out)
    }

    /// Monic product `∏ (X − r_i)` for real roots.
    pub fn from_real_roots(roots: &[f64]) -> RealPolynomial {
        let mut p = RealPolynomial::new(vec![1.0]);
        for r in roots {
            p = p.mul(&RealPolynomial::new(vec![-r, 1.0]));
        }
        p
    }

    /// All (complex) roots via Aberth–Ehrlich iteration, each polished by
    /// Newton. Requires simple roots; errors on residuals above tolerance.
    pub fn complex_roots(&self) -> Result<Vec<C64>> {
        let d = self.degree();
        if d == 0 {
            return Ok(vec![]);
        }
        let lead = self.coeffs[d];
        if lead == 0.0 {
            return Err(Error::RootFinding {
                residual: f64::INFINITY,
                detail: "zero leading coefficient".into(),
            });
        }
        if d == 1 {
            return Ok(vec![C64::new(-self.coeffs[0] / lead, 0.0)]);
        }
        let q = ComplexPolynomial::from_real(self);
        let mut roots = Vec::with_capacity(d);
        let mut worst = 0.0f64;
        for z0 in aberth_roots(&q) {
            let (z, rel) = q.polish(z0);
            worst = worst.max(rel);
            roots.push(z);
        }
        if worst > 1e-9 {
            return Err(Error::RootFinding {
                residual: worst,
                detail: "polished root residual above tolerance".into(),
            });
        }
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        Ok(roots)
    }
}

/// Complex polynomial, ascending coefficients.
#[derive(Debug, Clone)]
pub struct ComplexPolynomial {
    pub coeffs: Vec<C64>,
}

impl ComplexPolynomial {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Self { coeffs }
    }

    pub fn from_real(p: &RealPolynomial) -> Self {
        Self::new(p.coeffs.iter().map(|c| C64::new(*c, 0.0)).collect())
    }

    /// Monic `∏ (X − ζ_i)`, ascending coefficients.
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut coeffs = vec![C64::new(1.0, 0.0)];
        for r in roots {
            // multiply by (X − r): shift up one degree, subtract r·p
            let mut next = vec![C64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        let mut d = self.coeffs.len();
        while d > 1 && self.coeffs[d - 1].norm() == 0.0 {
            d -= 1;
        }
        d - 1
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> ComplexPolynomial {
        if self.coeffs.len() <= 1 {
            return ComplexPolynomial::new(vec![C64::new(0.0, 0.0)]);
        }
        ComplexPolynomial::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * C64::new((i + 1) as f64, 0.0))
                .collect(),
        )
    }

    /// Backward-error-style relative residual `|p(z)| / Σ |c_k||z|^k`.
    pub fn relative_residual(&self, z: C64) -> f64 {
        let mut denom = 0.0f64;
        let mut zp = 1.0f64;
        for c in &self.coeffs {
            denom += c.norm() * zp;
            zp *= z.norm();
        }
        if denom == 0.0 {
            return 0.0;
        }
        self.eval(z).norm() / denom
    }

    /// A few Newton steps from `z0`; returns the polished point and its
    /// relative residual.
    pub fn polish(&self, z0: C64) -> (C64, f64) {
        let dp = self.derivative();
        let mut z = z0;
        let mut best = (z, self.relative_residual(z));
        for _ in 0..12 {
            let d = dp.eval(z);
            if d.norm() < 1e-300 {
                break;
            }
            z -= self.eval(z) / d;
            let r = self.relative_residual(z);
            if r < best.1 {
                best = (z, r);
            }
            if r < 1e-16 {
                break;
            }
        }
        best
    }

    /// All roots via Aberth–Ehrlich iteration with a Newton polish.
    /// Demands exactly `degree` distinct roots; a shortfall (multiple
    /// roots, or approximations that fail the residual check) is an error.
    pub fn roots(&self) -> Result<Vec<C64>> {
        let d = self.degree();
        if d == 0 {
            return Ok(vec![]);
        }
        let lead = self.coeffs[d];
        if lead.norm() == 0.0 {
            return Err(Error::RootFinding {
                residual: f64::INFINITY,
                detail: "zero leading coefficient".into(),
            });
        }
        if d == 1 {
            return Ok(vec![-self.coeffs[0] / lead]);
        }
        let approx = aberth_roots(self);
        let mut accepted: Vec<C64> = Vec::new();
        for z0 in &approx {
            let (z, rel) = self.polish(*z0);
            if rel > 1e-9 {
                continue; // did not converge to a simple root
            }
            let radius = 1e-7 * z.norm().max(1.0);
            if !accepted.iter().any(|a| (a - z).norm() < radius) {
                accepted.push(z);
            }
        }
        if accepted.len() != d {
            let worst =
                approx.iter().map(|z| self.relative_residual(*z)).fold(0.0, f64::max);
            return Err(Error::RootFinding {
                residual: worst,
                detail: format!("expected {d} roots, accepted {}", accepted.len()),
            });
        }
        accepted.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        Ok(accepted)
    }

    /// Distinct roots with multiplicities. Unlike [`Self::roots`], which
    /// demands `degree` distinct roots, this handles multiple roots: exact
    /// zero roots are deflated symbolically (k leading zero coefficients =
    /// a k-fold root at the origin), and the remaining Aberth
    /// approximations are clustered, each cluster's population being its
    /// multiplicity (the iteration sends exactly `m` approximations into
    /// an `m`-fold cluster).
    ///
    /// Multiple roots are inherently ill-conditioned: an `m`-fold root off
    /// the origin is located to roughly `ε^(1/m)`, so expect ~1e−8
    /// accuracy for double roots, less for higher orders. Roots closer
    /// together than the cluster radius (1e−5 relative) are reported as
    /// one root with their combined multiplicity.
    pub fn roots_with_multiplicity(&self) -> Result<Vec<(C64, usize)>> {
        let d = self.degree();
        if d == 0 {
            return Ok(vec![]);
        }
        let lead = self.coeffs[d];
        if lead.norm() == 0.0 {
            return Err(Error::RootFinding {
                residual: f64::INFINITY,
                detail: "zero leading coefficient".into(),
            });
        }
        let zeros = self.coeffs[..d].iter().take_while(|c| c.norm() == 0.0).count();
        if zeros > 0 {
            let q = ComplexPolynomial::new(self.coeffs[zeros..].to_vec());
            let mut out = vec![(C64::new(0.0, 0.0), zeros)];
            out.extend(q.roots_with_multiplicity()?);
            out.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
            return Ok(out);
        }
        match self.roots() {
            Ok(rs) => return Ok(rs.into_iter().map(|z| (z, 1)).collect()),
            Err(_) => {} // multiple roots: fall through to clustering
        }
        // Long polish: Newton converges only linearly (rate (m−1)/m) at an
        // m-fold root, so give it room.
        let dp = self.derivative();
        let mut polished: Vec<(C64, f64)> = Vec::new();
        for z0 in aberth_roots(self) {
            let mut z = z0;
            let mut best = (z, self.relative_residual(z));
            for _ in 0..40 {
                let dv = dp.eval(z);
                if dv.norm() < 1e-300 {
                    break;
                }
                z -= self.eval(z) / dv;
                let r = self.relative_residual(z);
                if r < best.1 {
                    best = (z, r);
                }
                if r < 1e-16 {
                    break;
                }
            }
            polished.push(best);
        }
        // Cluster. An m-fold root's approximations ring it symmetrically at
        // radius ~ε^(1/m), so the cluster mean cancels the first-order
        // error; report the mean, judge convergence by the best member.
        struct Cluster {
            anchor: C64,
            sum: C64,
            count: usize,
            best_residual: f64,
        }
        let mut clusters: Vec<Cluster> = Vec::new();
        for (z, r) in polished {
            let radius = 1e-5 * z.norm().max(1.0);
            match clusters.iter_mut().find(|c| (c.anchor - z).norm() < radius) {
                Some(c) => {
                    c.sum += z;
                    c.count += 1;
                    c.best_residual = c.best_residual.min(r);
                }
                None => clusters.push(Cluster {
                    anchor: z,
                    sum: z,
                    count: 1,
                    best_residual: r,
                }),
            }
        }
        let mut out: Vec<(C64, usize)> = Vec::new();
        for c in clusters {
            if c.best_residual > 1e-5 {
                return Err(Error::RootFinding {
                    residual: c.best_residual,
                    detail: "root approximation failed to converge".into(),
                });
            }
            out.push((c.sum / c.count as f64, c.count));
        }
        out.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
        Ok(out)
    }
}

/// Aberth–Ehrlich simultaneous iteration: `degree` root approximations for
/// a polynomial with nonzero leading coefficient.
///
/// Guesses start on a circle of the Cauchy root bound, rotated so the set
/// is symmetric about neither axis (symmetric starts can stagnate on
/// symmetric polynomials). The returned points are raw approximations —
/// callers polish and residual-check them; this function never fails, it
/// only runs out of its iteration budget.
fn aberth_roots(p: &ComplexPolynomial) -> Vec<C64> {
    let d = p.degree();
    if d == 0 {
        return vec![];
    }
    let lead = p.coeffs[d].norm();
    let dp = p.derivative();
    let cauchy = 1.0 + p.coeffs[..d].iter().map(|c| c.norm() / lead).fold(0.0, f64::max);
    let mut zs: Vec<C64> = (0..d)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.7385;
            C64::new(0.85 * cauchy * theta.cos(), 0.85 * cauchy * theta.sin())
        })
        .collect();
    for _ in 0..400 {
        let mut moved = 0.0f64;
        for k in 0..d {
            let z = zs[k];
            let pv = p.eval(z);
            if pv.norm() == 0.0 {
                continue;
            }
            let dv = dp.eval(z);
            let newton = if dv.norm() < 1e-300 {
                // Critical point of p that is not a root: step off it.
                C64::new(1e-6 * (1.0 + z.norm()), 1e-6)
            } else {
                pv / dv
            };
            let mut repulsion = C64::new(0.0, 0.0);
            for (j, zj) in zs.iter().enumerate() {
                if j != k && (z - zj).norm() > 1e-300 {
                    repulsion += C64::new(1.0, 0.0) / (z - zj);
                }
            }
            let denom = C64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm() < 1e-12 { newton } else { newton / denom };
            zs[k] = z - step;
            moved = moved.max(step.norm() / (1.0 + zs[k].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    zs
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn evaluate_and_differentiate() {
        // p = 1 − 3X + 2X³
        let p = RealPolynomial::new(vec![1.0, -3.0, 0.0, 2.0]);
        assert_relative_eq!(p.eval(2.0), 1.0 - 6.0 + 16.0, max_relative = 1e-15);
        let dp = p.derivative();
        assert_eq!(dp.coeffs, vec![-3.0, 0.0, 6.0]);
        let ip = dp.antiderivative(1.0);
        assert_eq!(ip.coeffs, vec![1.0, -3.0, 0.0, 2.0]);
    }

    #[test]
    fn companion_roots_of_cubic() {
        // (X² + 1)(X − 3) = X³ − 3X² + X − 3 → roots {±i, 3}
        let p = RealPolynomial::new(vec![-3.0, 1.0, -3.0, 1.0]);
        let roots = p.complex_roots().unwrap();
        assert_eq!(roots.len(), 3);
        let mut found_i = false;
        let mut found_mi = false;
        let mut found_3 = false;
        for r in &roots {
            if (r - C64::new(0.0, 1.0)).norm() < 1e-10 {
                found_i = true;
            }
            if (r - C64::new(0.0, -1.0)).norm() < 1e-10 {
                found_mi = true;
            }
            if (r - C64::new(3.0, 0.0)).norm() < 1e-10 {
                found_3 = true;
            }
        }
        assert!(found_i && found_mi && found_3);
    }

    #[test]
    fn real_root_products_expand() {
        let p = RealPolynomial::from_real_roots(&[-1.0, 0.0, 1.0]);
        // X³ − X
        assert_eq!(p.coeffs, vec![0.0, -1.0, 0.0, 1.0]);
    }

    #[test]
    fn complex_roots_via_embedding() {
        // roots deliberately NOT closed under conjugation
        let roots = vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.25), C64::new(0.0, -1.5)];
        let p = ComplexPolynomial::from_roots(&roots);
        assert_eq!(p.degree(), 3);
        let found = p.roots().unwrap();
        assert_eq!(found.len(), 3);
        for r in &roots {
            assert!(
                found.iter().any(|z| (z - r).norm() < 1e-10),
                "missing root {r}"
            );
        }
    }

    #[test]
    fn conjugate_symmetric_complex_roots() {
        // root set closed under conjugation — the embedding sees every root
        // twice; dedup must still return each exactly once.
        let roots =
            vec![C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(2.0, 0.0), C64::new(-1.0, 0.0)];
        let p = ComplexPolynomial::from_roots(&roots);
        let found = p.roots().unwrap();
        assert_eq!(found.len(), 4);
        for r in &roots {
            assert!(found.iter().any(|z| (z - r).norm() < 1e-10));
        }
    }

    #[test]
    fn from_roots_is_monic_and_vanishes() {
        let roots = vec![C64::new(0.3, -0.7), C64::new(-1.1, 0.2)];
        let p = ComplexPolynomial::from_roots(&roots);
        assert!((p.coeffs.last().unwrap() - C64::new(1.0, 0.0)).norm() < 1e-15);
        for r in &roots {
            assert!(p.eval(*r).norm() < 1e-14);
        }
    }

    #[test]
    fn multiplicity_triple_root() {
        // z³ (derivative of z⁴/4): triple root at 0.
        let p = ComplexPolynomial::new(vec![
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(4.0, 0.0),
        ]);
        let rs = p.roots_with_multiplicity().unwrap();
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].1, 3);
        assert!(rs[0].0.norm() < 1e-6);
    }

    #[test]
    fn multiplicity_mixed() {
        // (z − 1)² (z + i): double root at 1, simple at −i.
        let one = C64::new(1.0, 0.0);
        let p = ComplexPolynomial::from_roots(&[one, one, C64::new(0.0, -1.0)]);
        let mut rs = p.roots_with_multiplicity().unwrap();
        rs.sort_by(|a, b| b.1.cmp(&a.1));
        assert_eq!(rs.len(), 2);
        assert_eq!(rs[0].1, 2);
        assert!((rs[0].0 - one).norm() < 1e-7);
        assert_eq!(rs[1].1, 1);
        assert!((rs[1].0 - C64::new(0.0, -1.0)).norm() < 1e-9);
    }

    #[test]
    fn multiplicity_agrees_with_simple_roots() {
        let roots = vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.25), C64::new(0.0, -1.5)];
        let p = ComplexPolynomial::from_roots(&roots);
        let rs = p.roots_with_multiplicity().unwrap();
        assert_eq!(rs.len(), 3);
        assert!(rs.iter().all(|(_, m)| *m == 1));
    }
}
