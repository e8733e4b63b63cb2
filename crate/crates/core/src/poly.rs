//! Real-coefficient polynomials in the Laplace variable `s`: arithmetic,
//! root finding, and right-half-plane root counting.
//!
//! Coefficients are stored ascending in power, `coeffs[k]` multiplying `s^k`.
//! Root finding goes through the companion matrix of a variable-scaled monic
//! copy, followed by one Newton refinement pass against the original
//! polynomial. A Routh table gives an independent RHP count that never
//! computes a root.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Default distance from the imaginary axis below which a root counts as
/// "on axis" (rad/s). Scaled up by the largest root magnitude when that
/// exceeds 1.
pub const DEFAULT_AXIS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum PolyError {
    #[error("polynomial has no roots (degree {0})")]
    NoRoots(usize),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("non-finite coefficient at power {0}")]
    NonFinite(usize),
    #[error("Routh table indeterminate: all-zero row, auxiliary polynomial degree {aux_degree}")]
    RouthIndeterminate { aux_degree: usize },
}

/// Real-coefficient polynomial, ascending powers of `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial from ascending coefficients, trimming trailing
    /// zeros. The zero polynomial is kept as the single coefficient 0.
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Result<Self, PolyError> {
        let mut coeffs = coeffs.into();
        for (k, c) in coeffs.iter().enumerate() {
            if !c.is_finite() {
                return Err(PolyError::NonFinite(k));
            }
        }
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Ok(Self { coeffs })
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c]).expect("finite constant")
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// `c * s^k`.
    pub fn monomial(c: f64, k: usize) -> Self {
        let mut v = vec![0.0; k + 1];
        v[k] = c;
        Self::new(v).expect("finite monomial")
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs == [0.0]
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Multiplicity of the root at s = 0 (number of leading zero coefficients).
    pub fn origin_multiplicity(&self) -> usize {
        if self.is_zero() {
            return 0;
        }
        self.coeffs.iter().take_while(|c| **c == 0.0).count()
    }

    /// Horner evaluation at a complex point.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * s + c;
        }
        acc
    }

    /// Evaluation of `p(s) / s^shift`; `shift` must not exceed the origin
    /// multiplicity. Keeps tiny |s| evaluations away from 0/0.
    pub fn eval_shifted(&self, s: Complex64, shift: usize) -> Complex64 {
        debug_assert!(shift <= self.origin_multiplicity() || self.is_zero());
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().skip(shift).rev() {
            acc = acc * s + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::zero();
        }
        let coeffs: Vec<f64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * c)
            .collect();
        Self::new(coeffs).expect("finite derivative")
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0.0; n];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self.coeffs.get(k).copied().unwrap_or(0.0)
                + other.coeffs.get(k).copied().unwrap_or(0.0);
        }
        Self::new(out).expect("finite sum")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out).expect("finite product")
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect::<Vec<_>>()).expect("finite scale")
    }

    /// Builds a monic real polynomial from a root list; complex roots must
    /// come in conjugate pairs (imaginary residue is dropped).
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut acc = vec![Complex64::new(1.0, 0.0)];
        for r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); acc.len() + 1];
            for (k, a) in acc.iter().enumerate() {
                next[k] -= a * r;
                next[k + 1] += a;
            }
            acc = next;
        }
        Self::new(acc.iter().map(|c| c.re).collect::<Vec<_>>()).expect("finite from_roots")
    }
}

/// Roots of one polynomial, conjugate-closed, with the absolute clustering
/// distance used for multiplicity grouping.
#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub cluster_tol: f64,
}

/// RHP/axis split of a polynomial's roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RhpSplit {
    pub rhp: usize,
    pub on_axis: usize,
}

/// All roots of `p` via scaled companion-matrix eigenvalues plus one Newton
/// pass; conjugate symmetry is enforced on the output.
pub fn poly_roots(p: &Polynomial) -> Result<RootSet, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    if p.degree() == 0 {
        return Err(PolyError::NoRoots(0));
    }

    let m0 = p.origin_multiplicity();
    let mut roots = vec![Complex64::new(0.0, 0.0); m0];

    let reduced: Vec<f64> = p.coeffs()[m0..].to_vec();
    let n = reduced.len() - 1;
    if n > 0 {
        // Variable scaling s -> sigma*s with sigma the geometric mean of the
        // root magnitudes keeps the companion matrix well conditioned for
        // physical coefficients spanning many orders of magnitude.
        let sigma = (reduced[0].abs() / reduced[n].abs()).powf(1.0 / n as f64);
        let sigma = if sigma.is_finite() && sigma > 0.0 { sigma } else { 1.0 };
        let scaled: Vec<f64> = reduced
            .iter()
            .enumerate()
            .map(|(k, c)| c * sigma.powi(k as i32))
            .collect();
        let lead = scaled[n];
        let mut comp = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            comp[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            comp[(i, n - 1)] = -scaled[i] / lead;
        }
        let eig = comp.complex_eigenvalues();
        let dp = p.derivative();
        for ev in eig.iter() {
            let mut r = ev * sigma;
            // one Newton pass against the original polynomial
            let d = dp.eval(r);
            if d.norm() > 0.0 {
                let step = p.eval(r) / d;
                if step.norm().is_finite() {
                    r -= step;
                }
            }
            roots.push(r);
        }
    }

    let max_mag = roots.iter().map(|r| r.norm()).fold(0.0_f64, f64::max);
    let cluster_tol = 1e-8 * max_mag.max(1.0);
    enforce_conjugate_symmetry(&mut roots, cluster_tol.max(1e-7 * max_mag.max(1.0)));
    roots.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .expect("finite roots")
    });
    Ok(RootSet { roots, cluster_tol })
}

/// Pairs near-conjugate roots and symmetrizes them; near-real roots are
/// snapped onto the real axis.
fn enforce_conjugate_symmetry(roots: &mut [Complex64], tol: f64) {
    for r in roots.iter_mut() {
        if r.im.abs() <= tol * (1.0 + r.norm()) {
            r.im = 0.0;
        }
    }
    let mut pos: Vec<usize> = Vec::new();
    let mut neg: Vec<usize> = Vec::new();
    for (i, r) in roots.iter().enumerate() {
        if r.im > 0.0 {
            pos.push(i);
        } else if r.im < 0.0 {
            neg.push(i);
        }
    }
    let mut used = vec![false; roots.len()];
    for &i in &pos {
        let mut best: Option<(usize, f64)> = None;
        for &j in &neg {
            if used[j] {
                continue;
            }
            let d = (roots[i] - roots[j].conj()).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        if let Some((j, _)) = best {
            used[j] = true;
            let m = (roots[i] + roots[j].conj()) * 0.5;
            roots[i] = m;
            roots[j] = m.conj();
        }
    }
}

/// Effective axis tolerance: `axis_tol`, scaled by the largest root magnitude
/// once magnitudes exceed 1.
pub fn effective_axis_tol(axis_tol: f64, roots: &[Complex64]) -> f64 {
    let max_mag = roots.iter().map(|r| r.norm()).fold(0.0_f64, f64::max);
    axis_tol * max_mag.max(1.0)
}

/// Splits root locations into strict-RHP and on-axis counts.
pub fn count_rhp_roots(p: &Polynomial, axis_tol: f64) -> Result<RhpSplit, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    if p.degree() == 0 {
        return Ok(RhpSplit { rhp: 0, on_axis: 0 });
    }
    let rs = poly_roots(p)?;
    Ok(split_rhp(&rs.roots, axis_tol))
}

/// RHP/axis split of an explicit root list.
pub fn split_rhp(roots: &[Complex64], axis_tol: f64) -> RhpSplit {
    let tol = effective_axis_tol(axis_tol, roots);
    let rhp = roots.iter().filter(|r| r.re > tol).count();
    let on_axis = roots.iter().filter(|r| r.re.abs() <= tol).count();
    RhpSplit { rhp, on_axis }
}

/// RHP root count by sign changes in the first Routh column. Zero leading
/// elements get an epsilon substitution; an all-zero row (imaginary-axis
/// root pattern) is reported as indeterminate with the auxiliary-polynomial
/// degree.
pub fn routh_rhp_count(p: &Polynomial) -> Result<usize, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let n = p.degree();
    if n == 0 {
        return Ok(0);
    }
    // descending coefficients, normalized so the leading coefficient is +1
    let desc: Vec<f64> = p.coeffs().iter().rev().map(|c| c / p.coeffs()[n]).collect();
    let width = n / 2 + 1;
    let mut row0 = vec![0.0; width];
    let mut row1 = vec![0.0; width];
    for (k, c) in desc.iter().enumerate() {
        if k % 2 == 0 {
            row0[k / 2] = *c;
        } else {
            row1[k / 2] = *c;
        }
    }
    let mut first_col = vec![row0[0]];
    let mut prev = row0;
    let mut cur = row1;
    for row_idx in 1..=n {
        let aux_degree = n - row_idx + 1;
        let scale = cur.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            // all-zero row: symmetric root pattern about the origin
            return Err(PolyError::RouthIndeterminate { aux_degree });
        }
        let mut lead = cur[0];
        if lead.abs() <= 1e-12 * scale {
            // epsilon substitution for an isolated zero leading element
            lead = 1e-12 * scale;
        }
        first_col.push(lead);
        if row_idx == n {
            break;
        }
        let mut next = vec![0.0; cur.len()];
        for k in 0..cur.len() - 1 {
            next[k] = (lead * prev[k + 1] - prev[0] * cur[k + 1]) / lead;
        }
        // positive row scaling leaves the sign pattern untouched
        let ns = next.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if ns > 0.0 {
            for v in next.iter_mut() {
                *v /= ns;
            }
        }
        prev = std::mem::replace(&mut cur, next);
    }
    let changes = first_col
        .windows(2)
        .filter(|w| w[0].signum() != w[1].signum())
        .count();
    Ok(changes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn poly(cs: &[f64]) -> Polynomial {
        Polynomial::new(cs.to_vec()).unwrap()
    }

    #[test]
    fn trims_trailing_zeros() {
        let p = poly(&[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 1);
        assert_eq!(p.coeffs(), &[1.0, 2.0]);
        assert!(poly(&[0.0, 0.0]).is_zero());
    }

    #[test]
    fn roots_of_s_squared_plus_one() {
        let rs = poly_roots(&poly(&[1.0, 0.0, 1.0])).unwrap();
        assert_eq!(rs.roots.len(), 2);
        assert_relative_eq!(rs.roots[0].im, -1.0, epsilon = 1e-10);
        assert_relative_eq!(rs.roots[1].im, 1.0, epsilon = 1e-10);
        assert!(rs.roots.iter().all(|r| r.re == 0.0 || r.re.abs() < 1e-10));
    }

    #[test]
    fn roots_of_s_minus_one() {
        let rs = poly_roots(&poly(&[-1.0, 1.0])).unwrap();
        assert_eq!(rs.roots.len(), 1);
        assert_relative_eq!(rs.roots[0].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn cubic_with_two_rhp_roots() {
        // 0.001 s^3 + 0.03 s^2 + 0.3 s + 11
        let p = poly(&[11.0, 0.3, 0.03, 0.001]);
        let split = count_rhp_roots(&p, DEFAULT_AXIS_TOL).unwrap();
        assert_eq!(split, RhpSplit { rhp: 2, on_axis: 0 });
        assert_eq!(routh_rhp_count(&p).unwrap(), 2);
    }

    #[test]
    fn rhp_and_axis_counts() {
        // (s-1)(s+2) = s^2 + s - 2
        let p = poly(&[-2.0, 1.0, 1.0]);
        assert_eq!(
            count_rhp_roots(&p, 1e-9).unwrap(),
            RhpSplit { rhp: 1, on_axis: 0 }
        );
        // s(s+1)
        let p = poly(&[0.0, 1.0, 1.0]);
        assert_eq!(
            count_rhp_roots(&p, 1e-9).unwrap(),
            RhpSplit { rhp: 0, on_axis: 1 }
        );
    }

    #[test]
    fn routh_examples() {
        assert_eq!(routh_rhp_count(&poly(&[1.0, 2.0, 1.0])).unwrap(), 0);
        // s^3 + s^2 + s + 11: first column 1, 1, -10, 11
        assert_eq!(routh_rhp_count(&poly(&[11.0, 1.0, 1.0, 1.0])).unwrap(), 2);
    }

    #[test]
    fn routh_all_zero_row_is_indeterminate() {
        // s^2 + 1: the s^1 row vanishes, auxiliary polynomial degree 2
        let err = routh_rhp_count(&poly(&[1.0, 0.0, 1.0])).unwrap_err();
        assert_eq!(err, PolyError::RouthIndeterminate { aux_degree: 2 });
    }

    #[test]
    fn routh_epsilon_substitution() {
        // s^4 + s^3 + 2s^2 + 2s + 1: zero leading element in the s^2 row
        let p = poly(&[1.0, 2.0, 2.0, 1.0, 1.0]);
        let by_roots = count_rhp_roots(&p, DEFAULT_AXIS_TOL).unwrap();
        assert_eq!(routh_rhp_count(&p).unwrap(), by_roots.rhp);
    }

    #[test]
    fn newton_refined_residual_is_small() {
        let p = poly(&[11.0, 0.3, 0.03, 0.001]);
        let rs = poly_roots(&p).unwrap();
        for r in &rs.roots {
            let scale: f64 = p
                .coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| c.abs() * r.norm().powi(k as i32))
                .sum();
            assert!(p.eval(*r).norm() / scale.max(1e-300) <= 1e-8);
        }
    }

    #[test]
    fn conjugate_closure() {
        let p = poly(&[1.0, -0.3, 2.0, 0.1, 1.0]);
        let rs = poly_roots(&p).unwrap();
        for r in &rs.roots {
            let has_conj = rs
                .roots
                .iter()
                .any(|q| (q - r.conj()).norm() <= 1e-8 * (1.0 + r.norm()));
            assert!(has_conj, "missing conjugate of {r}");
        }
    }

    #[test]
    fn origin_roots_factored_exactly() {
        // s^2 (s+3)
        let p = poly(&[0.0, 0.0, 3.0, 1.0]);
        let rs = poly_roots(&p).unwrap();
        assert_eq!(rs.roots.iter().filter(|r| r.norm() == 0.0).count(), 2);
    }
}
