//! Closed-form convolution kernels: the inverse Fourier transform of a
//! strictly proper rational function is a two-sided exponential-polynomial
//! function, recovered here by residue calculus / partial fractions.
//!
//! Fourier convention: `F k (xi) = int e^{i xi x} k(x) dx`, so
//! `k(x) = (1/2pi) int e^{-i xi x} r(xi) dxi`. For `x > 0` the contour closes
//! in the lower half-plane, for `x < 0` in the upper one.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{cluster_roots, ComplexPoly};
use crate::symbol::Rational;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// One group `q(x) e^{-i p x}` of the kernel; `coeffs` are the polynomial
/// coefficients of `q` in ascending powers of `x`.
#[derive(Debug, Clone)]
pub struct KernelTerm {
    pub pole: Complex64,
    pub coeffs: Vec<Complex64>,
}

impl KernelTerm {
    fn eval(&self, x: f64) -> Complex64 {
        let mut q = c64(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            q = q * x + c;
        }
        q * (-Complex64::i() * self.pole * x).exp()
    }
}

/// Exponential-polynomial kernel `k = F^{-1} r` of a strictly proper
/// rational `r` without real poles. `plus` terms (from lower half-plane
/// poles) make up `k` on `x > 0`, `minus` terms (upper poles) on `x < 0`;
/// both sides decay exponentially, so `k` is integrable.
#[derive(Debug, Clone)]
pub struct ExpPolyKernel {
    plus: Vec<KernelTerm>,
    minus: Vec<KernelTerm>,
}

impl ExpPolyKernel {
    /// Kernel assembled from explicit terms; used for operators whose kernel
    /// is written down directly rather than derived from a symbol.
    pub fn from_terms(plus: Vec<KernelTerm>, minus: Vec<KernelTerm>) -> Self {
        ExpPolyKernel { plus, minus }
    }

    /// Residue expansion of `F^{-1} r`. Fails with `E_NOT_STRICTLY_PROPER`
    /// unless `deg num < deg den` (the zero function is allowed).
    pub fn from_rational(r: &Rational) -> Result<Self> {
        if r.is_zero() {
            return Ok(ExpPolyKernel { plus: vec![], minus: vec![] });
        }
        if r.degree_balance() >= 0 {
            return Err(Error::NotStrictlyProper(format!(
                "degree balance {} (need deg num < deg den)",
                r.degree_balance()
            )));
        }
        let clusters = cluster_roots(r.poles(), 1e-9);
        let num = r.num().clone();
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for (idx, &(p, m)) in clusters.iter().enumerate() {
            // F(xi) = (xi - p)^m r(xi) = num(xi) / q(xi), poles of the other
            // clusters in q
            let mut other = Vec::new();
            for (jdx, &(pj, mj)) in clusters.iter().enumerate() {
                if jdx != idx {
                    for _ in 0..mj {
                        other.push(pj);
                    }
                }
            }
            let q = ComplexPoly::from_roots(&other);
            // Taylor coefficients of num/q at p, up to order m-1
            let num_s = num.shift(p);
            let q_s = q.shift(p);
            let q0 = q_s.coeffs()[0];
            let mut f = vec![c64(0.0, 0.0); m];
            for k in 0..m {
                let mut acc = num_s.coeffs().get(k).copied().unwrap_or(c64(0.0, 0.0));
                for j in 0..k {
                    let qc = q_s.coeffs().get(k - j).copied().unwrap_or(c64(0.0, 0.0));
                    acc -= f[j] * qc;
                }
                f[k] = acc / q0;
            }
            // partial fraction A_j / (xi - p)^j with A_j = f_{m-j};
            // inverse transform of each simple power gives the x-polynomial
            let mut coeffs = vec![c64(0.0, 0.0); m];
            let mut factorial = 1.0f64;
            let mut ipow = Complex64::i() * (-1.0); // (-i)^1
            for j in 1..=m {
                if j > 1 {
                    factorial *= (j - 1) as f64;
                    ipow *= Complex64::i() * (-1.0);
                }
                let a = f[m - j];
                coeffs[j - 1] = a * ipow / factorial;
            }
            if p.im < 0.0 {
                plus.push(KernelTerm { pole: p, coeffs });
            } else {
                // sign flip from the opposite contour orientation
                for c in coeffs.iter_mut() {
                    *c = -*c;
                }
                minus.push(KernelTerm { pole: p, coeffs });
            }
        }
        Ok(ExpPolyKernel { plus, minus })
    }

    pub fn is_zero(&self) -> bool {
        self.plus.is_empty() && self.minus.is_empty()
    }

    /// Kernel value for `x > 0` (one-sided limit at 0 from the right).
    pub fn eval_plus(&self, x: f64) -> Complex64 {
        self.plus.iter().map(|t| t.eval(x)).sum()
    }

    /// Kernel value for `x < 0` (one-sided limit at 0 from the left).
    pub fn eval_minus(&self, x: f64) -> Complex64 {
        self.minus.iter().map(|t| t.eval(x)).sum()
    }

    /// Kernel value with the side chosen by the sign of `x`; at exactly 0 the
    /// right limit is used.
    pub fn eval(&self, x: f64) -> Complex64 {
        if x >= 0.0 { self.eval_plus(x) } else { self.eval_minus(x) }
    }

    /// Slowest exponential decay rate on either side.
    pub fn decay_rate(&self) -> f64 {
        self.plus
            .iter()
            .chain(self.minus.iter())
            .map(|t| t.pole.im.abs())
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::sample_points;
    use approx::assert_relative_eq;

    fn rat_zpk(zeros: &[Complex64], poles: &[Complex64], gain: Complex64) -> Rational {
        Rational::from_zpk(zeros.to_vec(), poles.to_vec(), gain).unwrap()
    }

    /// Numerical Fourier transform of a closed-form kernel on [-X, X] by
    /// composite Gauss-Legendre panels; independent oracle for the residue
    /// construction.
    fn fourier_of_kernel(k: &ExpPolyKernel, xi: f64) -> Complex64 {
        let x_max = 40.0 / k.decay_rate().min(4.0);
        let panels = 2000usize;
        let h = 2.0 * x_max / panels as f64;
        // 4-point Gauss-Legendre per panel
        let gx = [-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526];
        let gw = [0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538];
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let a = -x_max + p as f64 * h;
            for q in 0..4 {
                let x = a + (gx[q] + 1.0) * 0.5 * h;
                let w = gw[q] * 0.5 * h;
                acc += (Complex64::i() * xi * x).exp() * k.eval(x) * w;
            }
        }
        acc
    }

    #[test]
    fn causal_exponential_kernel() {
        // r(xi) = 1/(1 - i xi) = i/(xi + i): k(x) = e^{-x} for x > 0, 0 for x < 0
        let r = rat_zpk(&[], &[Complex64::new(0.0, -1.0)], Complex64::new(0.0, 1.0));
        let k = ExpPolyKernel::from_rational(&r).unwrap();
        for &x in &[0.1, 0.5, 1.0, 3.0] {
            assert_relative_eq!(k.eval_plus(x).re, (-x).exp(), epsilon = 1e-12);
            assert_relative_eq!(k.eval_plus(x).im, 0.0, epsilon = 1e-12);
            assert_relative_eq!(k.eval_minus(-x).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn symmetric_exponential_kernel() {
        // r(xi) = 2/(1 + xi^2): k(x) = e^{-|x|}
        let r = rat_zpk(
            &[],
            &[Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)],
            Complex64::new(2.0, 0.0),
        );
        let k = ExpPolyKernel::from_rational(&r).unwrap();
        for &x in &[0.2, 1.0, 2.5] {
            assert_relative_eq!(k.eval_plus(x).re, (-x).exp(), epsilon = 1e-12);
            assert_relative_eq!(k.eval_minus(-x).re, (-x).exp(), epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_rational_gives_zero_kernel() {
        let k = ExpPolyKernel::from_rational(&Rational::zero()).unwrap();
        assert!(k.is_zero());
        assert_eq!(k.eval(1.0).norm(), 0.0);
    }

    #[test]
    fn rejects_non_proper() {
        let r = rat_zpk(
            &[Complex64::new(0.0, 1.0)],
            &[Complex64::new(0.0, -1.0)],
            Complex64::new(1.0, 0.0),
        );
        assert!(matches!(
            ExpPolyKernel::from_rational(&r),
            Err(Error::NotStrictlyProper(_))
        ));
    }

    #[test]
    fn fourier_transform_of_kernel_matches_rational() {
        // includes a double pole to exercise the multiplicity path
        let r = rat_zpk(
            &[Complex64::new(0.5, 3.0)],
            &[
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(1.0, 2.0),
            ],
            Complex64::new(0.7, -0.3),
        );
        let k = ExpPolyKernel::from_rational(&r).unwrap();
        for &xi in sample_points(100, 8.0).iter() {
            let lhs = fourier_of_kernel(&k, xi);
            let rhs = r.eval_real(xi);
            assert!(
                (lhs - rhs).norm() <= 1e-8 * rhs.norm().max(1.0),
                "xi = {xi}: |diff| = {:.3e}",
                (lhs - rhs).norm()
            );
        }
    }
}
