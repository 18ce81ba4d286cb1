//! Dense complex polynomials with companion-matrix root finding.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Roots closer than this are treated as equal when reducing rational
/// functions and when clustering multiplicities.
pub const TAU_ROOT: f64 = 1e-8;

/// Polynomial with complex coefficients in ascending order.
///
/// The zero polynomial is represented by an empty coefficient vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoly {
    coeffs: Vec<Complex64>,
}

impl ComplexPoly {
    /// Builds a polynomial, trimming trailing coefficients that are
    /// negligible relative to the largest one.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = ComplexPoly { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        ComplexPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        ComplexPoly { coeffs: vec![Complex64::new(1.0, 0.0)] }
    }

    pub fn constant(c: Complex64) -> Self {
        ComplexPoly::new(vec![c])
    }

    /// Monic polynomial with the given roots (with multiplicity).
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            // multiply by (x - r)
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= r * c;
            }
            coeffs = next;
        }
        ComplexPoly { coeffs }
    }

    fn trim(&mut self) {
        let max = self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        if max == 0.0 {
            self.coeffs.clear();
            return;
        }
        let tol = max * 1e-12;
        while let Some(last) = self.coeffs.last() {
            if last.norm() <= tol {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() { None } else { Some(self.coeffs.len() - 1) }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn derivative(&self) -> ComplexPoly {
        if self.coeffs.len() <= 1 {
            return ComplexPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * (k as f64))
            .collect();
        ComplexPoly::new(coeffs)
    }

    pub fn scale(&self, s: Complex64) -> ComplexPoly {
        ComplexPoly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, other: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        for (k, &c) in self.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        for (k, &c) in other.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        ComplexPoly::new(coeffs)
    }

    pub fn sub(&self, other: &ComplexPoly) -> ComplexPoly {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &ComplexPoly) -> ComplexPoly {
        if self.is_zero() || other.is_zero() {
            return ComplexPoly::zero();
        }
        let mut coeffs =
            vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        ComplexPoly::new(coeffs)
    }

    /// Coefficient-wise complex conjugation; for real arguments
    /// `conj_coeffs(p).eval(t) == conj(p.eval(t))`.
    pub fn conj_coeffs(&self) -> ComplexPoly {
        ComplexPoly::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// `p(-t)`: alternates coefficient signs by degree.
    pub fn reflect(&self) -> ComplexPoly {
        ComplexPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| if k % 2 == 0 { c } else { -c })
                .collect(),
        )
    }

    /// Taylor shift: coefficients of `p(a + u)` as a polynomial in `u`.
    /// Repeated synthetic division by `(x - a)`; exact in polynomial algebra.
    pub fn shift(&self, a: Complex64) -> ComplexPoly {
        let n = self.coeffs.len();
        if n == 0 {
            return ComplexPoly::zero();
        }
        let mut c = self.coeffs.clone();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            let len = n - k;
            // synthetic division of c[0..len] by (x - a)
            let mut b = c[len - 1];
            for j in (0..len - 1).rev() {
                let next = c[j] + a * b;
                c[j] = b; // quotient coefficient (degree j)
                b = next;
            }
            out[k] = b;
            // c[0..len-1] now holds the quotient
        }
        // keep raw coefficients (no relative trim): shifts are used in series
        // division where small leading terms matter
        ComplexPoly { coeffs: out }
    }

    /// All roots with multiplicity, via companion-matrix eigenvalues with one
    /// Newton polish step. Returned sorted by (re, im) for determinism.
    pub fn roots(&self) -> Vec<Complex64> {
        let n = match self.degree() {
            None | Some(0) => return vec![],
            Some(n) => n,
        };
        let lead = self.leading();
        let monic: Vec<Complex64> = self.coeffs.iter().map(|&c| c / lead).collect();
        let mut comp = DMatrix::<Complex64>::zeros(n, n);
        for i in 1..n {
            comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..n {
            comp[(i, n - 1)] = -monic[i];
        }
        let schur = comp.schur();
        let eigs = schur
            .eigenvalues()
            .expect("complex Schur form is triangular, eigenvalues always available");
        let deriv = self.derivative();
        let mut roots: Vec<Complex64> = eigs
            .iter()
            .map(|&z| {
                let dp = deriv.eval(z);
                let p = self.eval(z);
                // one Newton step, guarded against near-critical points
                if dp.norm() > 1e-12 * (1.0 + p.norm()) {
                    let step = p / dp;
                    if step.norm() < 1.0 { z - step } else { z }
                } else {
                    z
                }
            })
            .collect();
        roots.sort_by(|a, b| {
            (a.re, a.im)
                .partial_cmp(&(b.re, b.im))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        roots
    }
}

/// Groups roots into clusters of radius `TAU_ROOT`-ish scale, returning
/// (center, multiplicity) pairs. Used to recover exact multiplicities after
/// numerical root finding.
pub fn cluster_roots(roots: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut remaining: Vec<Complex64> = roots.to_vec();
    remaining.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for z in remaining {
        let scale = 1.0 + z.norm();
        match clusters
            .iter_mut()
            .find(|(c, _)| (*c - z).norm() <= tol * scale)
        {
            Some((c, m)) => {
                // running mean keeps the center stable
                *c = (*c * (*m as f64) + z) / ((*m + 1) as f64);
                *m += 1;
            }
            None => clusters.push((z, 1)),
        }
    }
    clusters
}
