//! Laguerre-Galerkin backend: the orthonormal basis
//! `psi_j(t) = sqrt(2) e^{-t} L_j(2t)` of `L^2(0, inf)`, under which `W(zeta)`
//! is the forward shift, rational Wiener-Hopf operators are Toeplitz and
//! Hankel operators are Hankel matrices of transplanted Fourier coefficients.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::symbol::Symbol;

/// First `modes` Laguerre functions with helper quadrature for entries that
/// have no closed form.
#[derive(Debug, Clone)]
pub struct LaguerreBasis {
    modes: usize,
}

impl LaguerreBasis {
    pub fn new(modes: usize) -> Result<Self> {
        if modes < 4 {
            return Err(Error::Schema("laguerre basis needs at least 4 modes".into()));
        }
        Ok(LaguerreBasis { modes })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// psi_j(t) for j < modes at the given points, via the stable three-term
    /// recurrence on the exponentially weighted functions.
    pub fn sample_matrix(&self, points: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::<f64>::zeros(points.len(), self.modes);
        for (row, &t) in points.iter().enumerate() {
            let w = std::f64::consts::SQRT_2 * (-t).exp();
            let mut prev = w; // psi_0
            m[(row, 0)] = prev;
            if self.modes > 1 {
                let mut cur = w * (1.0 - 2.0 * t); // psi_1
                m[(row, 1)] = cur;
                for j in 1..self.modes - 1 {
                    let jf = j as f64;
                    let next = ((2.0 * jf + 1.0 - 2.0 * t) * cur - jf * prev) / (jf + 1.0);
                    prev = cur;
                    cur = next;
                    m[(row, j + 1)] = cur;
                }
            }
        }
        m
    }

    /// Quadrature resolving every psi_j, j < modes, to ~1e-11: substitution
    /// t = u^2 makes the Laguerre oscillation frequency uniform in u, so
    /// equal Gauss-Legendre panels suffice. Returns (nodes, weights) for
    /// integrals over (0, inf) truncated where the basis has decayed.
    pub fn quadrature(&self) -> (Vec<f64>, Vec<f64>) {
        let t_max = 4.0 * self.modes as f64 + 60.0;
        let u_max = t_max.sqrt();
        // product of two basis functions oscillates at <= 4 sqrt(2 modes) in u
        let freq = 4.0 * (2.0 * self.modes as f64).sqrt();
        let width = (3.2 / freq).min(0.1);
        let panels = (u_max / width).ceil() as usize;
        let offs = super::grid::panel_offsets();
        let unit_w = super::grid::panel_weights();
        let h = u_max / panels as f64;
        let mut nodes = Vec::with_capacity(panels * 8);
        let mut weights = Vec::with_capacity(panels * 8);
        for p in 0..panels {
            let a = p as f64 * h;
            for q in 0..8 {
                let u = a + offs[q] * h;
                nodes.push(u * u);
                weights.push(unit_w[q] * h * 2.0 * u); // dt = 2 u du
            }
        }
        (nodes, weights)
    }

    /// Gram matrix of the basis under the quadrature above; equals the
    /// identity to ~1e-10 and validates the sampling machinery.
    pub fn gram(&self) -> DMatrix<f64> {
        let (nodes, weights) = self.quadrature();
        let s = self.sample_matrix(&nodes);
        let mut g = DMatrix::<f64>::zeros(self.modes, self.modes);
        for j in 0..self.modes {
            for k in j..self.modes {
                let mut acc = 0.0;
                for r in 0..nodes.len() {
                    acc += s[(r, j)] * s[(r, k)] * weights[r];
                }
                g[(j, k)] = acc;
                g[(k, j)] = acc;
            }
        }
        g
    }

    /// Entries of the shift `U_nu` in the Laguerre basis by quadrature:
    /// `<U_nu psi_j, psi_k>`.
    pub fn shift_matrix(&self, nu: f64) -> DMatrix<Complex64> {
        let (nodes, weights) = self.quadrature();
        let anu = nu.abs();
        let plain = self.sample_matrix(&nodes);
        let shifted_pts: Vec<f64> = nodes.iter().map(|&t| t + anu).collect();
        let shifted = self.sample_matrix(&shifted_pts);
        // nu > 0: <U_nu psi_j, psi_k> = int psi_j(s) psi_k(s + nu) ds
        let mut m = DMatrix::<Complex64>::zeros(self.modes, self.modes);
        for k in 0..self.modes {
            for j in 0..self.modes {
                let mut acc = 0.0;
                for r in 0..nodes.len() {
                    acc += plain[(r, j)] * shifted[(r, k)] * weights[r];
                }
                let (row, col) = if nu >= 0.0 { (k, j) } else { (j, k) };
                m[(row, col)] += Complex64::new(acc, 0.0);
            }
        }
        m
    }
}

/// Fourier coefficients of the circle transplant
/// `g^(theta) = g(-cot(theta/2))` by FFT. Index m of the returned pair maps
/// as `coeff(m)` for m in [-(samples/2), samples/2). Only rational symbols
/// (delta = 0) transplant to smooth circle functions.
pub struct TransplantCoeffs {
    coeffs: Vec<Complex64>,
}

impl TransplantCoeffs {
    pub fn compute(g: &Symbol, min_samples: usize) -> Result<Self> {
        if g.delta() != 0.0 {
            return Err(Error::BackendUnsupported(format!(
                "laguerre backend needs a rational symbol; delta = {} transplants to an \
                 essential singularity on the circle",
                g.delta()
            )));
        }
        let rinf = g
            .rational()
            .at_infinity()
            .expect("symbols are finite at infinity by construction");
        let m = min_samples.next_power_of_two().max(1024);
        let mut buf: Vec<Complex64> = (0..m)
            .map(|k| {
                if k == 0 {
                    rinf
                } else {
                    let theta = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                    let t = -1.0 / (theta / 2.0).tan();
                    g.rational().eval_real(t)
                }
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut buf);
        let scale = 1.0 / m as f64;
        for c in buf.iter_mut() {
            *c *= scale;
        }
        Ok(TransplantCoeffs { coeffs: buf })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of e^{i m theta}.
    pub fn coeff(&self, m: i64) -> Complex64 {
        let n = self.coeffs.len() as i64;
        debug_assert!(m.abs() < n / 2);
        let idx = m.rem_euclid(n) as usize;
        self.coeffs[idx]
    }

    /// Magnitude of the largest coefficient near the aliasing boundary;
    /// an estimate of the truncation error of the sampled transplant.
    pub fn tail_estimate(&self) -> f64 {
        let n = self.coeffs.len();
        let lo = n / 2 - 4;
        let hi = n / 2 + 4;
        (lo..=hi.min(n - 1))
            .map(|k| self.coeffs[k].norm())
            .fold(0.0, f64::max)
    }
}

/// Toeplitz matrix of `W(g)` in the Laguerre basis: entry (k, j) is the
/// transplant coefficient with index k - j.
pub fn toeplitz(g: &Symbol, modes: usize) -> Result<(DMatrix<Complex64>, f64)> {
    let co = TransplantCoeffs::compute(g, 8 * modes)?;
    let m = DMatrix::from_fn(modes, modes, |k, j| co.coeff(k as i64 - j as i64));
    Ok((m, co.tail_estimate()))
}

/// Hankel matrix of `H(g)` in the Laguerre basis: entry (k, j) is minus the
/// transplant coefficient with index k + j + 1. The sign comes from the
/// reflected Laguerre transform; it is pinned by the cross-backend tests.
pub fn hankel(g: &Symbol, modes: usize) -> Result<(DMatrix<Complex64>, f64)> {
    let co = TransplantCoeffs::compute(g, 8 * modes)?;
    let m = DMatrix::from_fn(modes, modes, |k, j| -co.coeff(k as i64 + j as i64 + 1));
    Ok((m, co.tail_estimate()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::Rational;

    #[test]
    fn gram_is_identity() {
        let basis = LaguerreBasis::new(48).unwrap();
        let g = basis.gram();
        for j in 0..48 {
            for k in 0..48 {
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!(
                    (g[(j, k)] - expect).abs() < 1e-10,
                    "gram({j},{k}) = {}",
                    g[(j, k)]
                );
            }
        }
    }

    #[test]
    fn toeplitz_of_zeta_is_forward_shift() {
        let (m, tail) = toeplitz(&Symbol::zeta(), 16).unwrap();
        assert!(tail < 1e-12);
        for k in 0..16 {
            for j in 0..16 {
                let expect = if k == j + 1 { 1.0 } else { 0.0 };
                assert!(
                    (m[(k, j)] - Complex64::new(expect, 0.0)).norm() < 1e-12,
                    "entry ({k},{j}) = {}",
                    m[(k, j)]
                );
            }
        }
    }

    #[test]
    fn hankel_of_zeta_is_minus_rank_one() {
        // H(zeta) = -psi_0 (x) psi_0: only entry (0,0) = -1
        let (m, _) = hankel(&Symbol::zeta(), 12).unwrap();
        for k in 0..12 {
            for j in 0..12 {
                let expect = if k == 0 && j == 0 { -1.0 } else { 0.0 };
                assert!(
                    (m[(k, j)] - Complex64::new(expect, 0.0)).norm() < 1e-12,
                    "entry ({k},{j}) = {}",
                    m[(k, j)]
                );
            }
        }
    }

    #[test]
    fn hankel_of_negative_zeta_power_vanishes() {
        let (m, _) = hankel(&Symbol::zeta_pow(-2), 12).unwrap();
        assert!(m.iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn transplant_rejects_exponential() {
        assert!(matches!(
            TransplantCoeffs::compute(&Symbol::exponential(1.0), 64),
            Err(Error::BackendUnsupported(_))
        ));
    }

    #[test]
    fn shift_matrix_entries_match_closed_forms() {
        let basis = LaguerreBasis::new(24).unwrap();
        let up = basis.shift_matrix(1.0);
        // <U_1 psi_0, psi_0> = 2 int_0^inf e^{-s} e^{-(s+1)} ds = e^{-1}
        let expect = (-1.0f64).exp();
        assert!(
            (up[(0, 0)] - Complex64::new(expect, 0.0)).norm() < 1e-10,
            "entry (0,0) = {}",
            up[(0, 0)]
        );
        // <U_1 psi_0, psi_1> = 2 int e^{-s}(1 - 2(s+1)) e^{-(s+1)} ds = -2 e^{-1}
        let expect01 = -2.0 * (-1.0f64).exp();
        assert!(
            (up[(1, 0)] - Complex64::new(expect01, 0.0)).norm() < 1e-10,
            "entry (1,0) = {}",
            up[(1, 0)]
        );
        // U_{-1} is the transpose (the operator adjoint, real entries)
        let down = basis.shift_matrix(-1.0);
        for k in 0..24 {
            for j in 0..24 {
                assert!((down[(k, j)] - up[(j, k)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn toeplitz_rational_symbol_consistency() {
        // W(zeta^{-1}) must be the backward shift
        let (m, _) = toeplitz(&Symbol::zeta_pow(-1), 12).unwrap();
        for k in 0..12 {
            for j in 0..12 {
                let expect = if j == k + 1 { 1.0 } else { 0.0 };
                assert!((m[(k, j)] - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
        // sanity on a generic rational: coefficients decay away from margin
        let g = Symbol::new(
            0.0,
            Rational::from_zpk(
                vec![Complex64::new(1.0, 2.0)],
                vec![Complex64::new(-0.5, -1.5)],
                Complex64::new(1.0, 0.0),
            )
            .unwrap(),
        )
        .unwrap();
        let (m, tail) = toeplitz(&g, 64).unwrap();
        assert!(tail < 1e-10, "tail {tail}");
        assert!(m[(63, 0)].norm() < 1e-8);
    }
}
