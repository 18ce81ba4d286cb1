//! Exponential-rational symbols `g(t) = e^{i delta t} r(t)`, matching pairs,
//! and the invariants nu(g), n(g), sigma(g).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{cluster_roots, ComplexPoly, TAU_ROOT};

/// Zeros or poles closer than this to the real axis are rejected.
pub const ROOT_MARGIN: f64 = 1e-6;

/// Relative tolerance for sampled matching checks.
pub const MATCHING_TOL: f64 = 1e-10;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Deterministic sample points on `[-span, span]` with an irrational-ish
/// spacing so that structured symbols do not hit accidental symmetries.
pub fn sample_points(n: usize, span: f64) -> Vec<f64> {
    (0..n)
        .map(|k| -span + 2.0 * span * ((k as f64) + 0.6180339887498949) / (n as f64))
        .collect()
}

/// Rational function stored in both zero/pole/gain and coefficient form.
///
/// Invariants: reduced (no zero/pole pair closer than `TAU_ROOT`), and no
/// pole within `ROOT_MARGIN` of the real axis. Zeros may be anywhere; the
/// stricter margin for zeros is enforced by [`Symbol`].
#[derive(Debug, Clone)]
pub struct Rational {
    num: ComplexPoly,
    den: ComplexPoly,
    zeros: Vec<Complex64>,
    poles: Vec<Complex64>,
    gain: Complex64,
}

impl Rational {
    pub fn from_zpk(zeros: Vec<Complex64>, poles: Vec<Complex64>, gain: Complex64) -> Result<Self> {
        if gain.norm() == 0.0 {
            return Ok(Rational::zero());
        }
        let (zeros, poles) = cancel_pairs(zeros, poles);
        for p in &poles {
            if p.im.abs() < ROOT_MARGIN {
                return Err(Error::RootMargin(format!(
                    "pole {:.6}{:+.6}i within {} of the real axis",
                    p.re, p.im, ROOT_MARGIN
                )));
            }
        }
        let mut zeros = zeros;
        let mut poles = poles;
        sort_roots(&mut zeros);
        sort_roots(&mut poles);
        let num = ComplexPoly::from_roots(&zeros).scale(gain);
        let den = ComplexPoly::from_roots(&poles);
        Ok(Rational { num, den, zeros, poles, gain })
    }

    /// From ascending coefficient lists. Roots are recovered numerically and
    /// clustered, so the stored representation is canonical.
    pub fn from_coeffs(num: ComplexPoly, den: ComplexPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Schema("denominator is identically zero".into()));
        }
        if num.is_zero() {
            return Ok(Rational::zero());
        }
        let zeros = snap_multiplicities(&num.roots());
        let poles = snap_multiplicities(&den.roots());
        let gain = num.leading() / den.leading();
        Rational::from_zpk(zeros, poles, gain)
    }

    pub fn zero() -> Self {
        Rational {
            num: ComplexPoly::zero(),
            den: ComplexPoly::one(),
            zeros: vec![],
            poles: vec![],
            gain: c64(0.0, 0.0),
        }
    }

    pub fn one() -> Self {
        Rational::constant(c64(1.0, 0.0))
    }

    pub fn constant(v: Complex64) -> Self {
        if v.norm() == 0.0 {
            return Rational::zero();
        }
        Rational {
            num: ComplexPoly::constant(v),
            den: ComplexPoly::one(),
            zeros: vec![],
            poles: vec![],
            gain: v,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.gain.norm() == 0.0
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    pub fn gain(&self) -> Complex64 {
        self.gain
    }

    pub fn num(&self) -> &ComplexPoly {
        &self.num
    }

    pub fn den(&self) -> &ComplexPoly {
        &self.den
    }

    /// `deg num - deg den`; 0 for invertible symbols, negative for symbols
    /// vanishing at infinity.
    pub fn degree_balance(&self) -> i64 {
        if self.is_zero() {
            return i64::MIN;
        }
        self.zeros.len() as i64 - self.poles.len() as i64
    }

    /// Value at infinity: `None` if the function grows there.
    pub fn at_infinity(&self) -> Option<Complex64> {
        if self.is_zero() {
            return Some(c64(0.0, 0.0));
        }
        match self.degree_balance() {
            0 => Some(self.gain),
            b if b < 0 => Some(c64(0.0, 0.0)),
            _ => None,
        }
    }

    /// Evaluation with interleaved zero/pole factors to avoid overflow for
    /// large arguments and high degrees.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        if self.is_zero() {
            return c64(0.0, 0.0);
        }
        let mut acc = self.gain;
        let n = self.zeros.len().max(self.poles.len());
        for k in 0..n {
            if let Some(&zr) = self.zeros.get(k) {
                acc *= z - zr;
            }
            if let Some(&p) = self.poles.get(k) {
                acc /= z - p;
            }
        }
        acc
    }

    pub fn eval_real(&self, t: f64) -> Complex64 {
        self.eval(c64(t, 0.0))
    }

    pub fn mul(&self, other: &Rational) -> Result<Rational> {
        let mut zeros = self.zeros.clone();
        zeros.extend_from_slice(&other.zeros);
        let mut poles = self.poles.clone();
        poles.extend_from_slice(&other.poles);
        Rational::from_zpk(zeros, poles, self.gain * other.gain)
    }

    pub fn inv(&self) -> Result<Rational> {
        if self.is_zero() {
            return Err(Error::NotInvertible("reciprocal of the zero function".into()));
        }
        Rational::from_zpk(self.poles.clone(), self.zeros.clone(), c64(1.0, 0.0) / self.gain)
    }

    /// `r(-t)`.
    pub fn reflect(&self) -> Rational {
        let zeros: Vec<Complex64> = self.zeros.iter().map(|z| -z).collect();
        let poles: Vec<Complex64> = self.poles.iter().map(|p| -p).collect();
        let parity = (self.zeros.len() + self.poles.len()) % 2;
        let gain = if parity == 0 { self.gain } else { -self.gain };
        Rational::from_zpk(zeros, poles, gain).expect("reflection preserves pole margins")
    }

    /// Complex conjugate on the real line: `conj(r)(t) = conj(r(t))` for real t.
    pub fn conj(&self) -> Rational {
        let zeros: Vec<Complex64> = self.zeros.iter().map(|z| z.conj()).collect();
        let poles: Vec<Complex64> = self.poles.iter().map(|p| p.conj()).collect();
        Rational::from_zpk(zeros, poles, self.gain.conj())
            .expect("conjugation preserves pole margins")
    }

    pub fn add(&self, other: &Rational) -> Result<Rational> {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Rational::from_coeffs(num, den)
    }

    pub fn sub(&self, other: &Rational) -> Result<Rational> {
        let num = self.num.mul(&other.den).sub(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Rational::from_coeffs(num, den)
    }

    /// `r - r(inf)`, keeping the pole list exact. The result vanishes at
    /// infinity and is the convolution-kernel part of the symbol.
    pub fn strictly_proper_part(&self) -> Rational {
        let rinf = match self.at_infinity() {
            Some(v) => v,
            None => panic!("strictly_proper_part on a function growing at infinity"),
        };
        if rinf.norm() == 0.0 {
            return self.clone();
        }
        let num = self.num.sub(&self.den.scale(rinf));
        if num.is_zero() {
            return Rational::zero();
        }
        let zeros = snap_multiplicities(&num.roots());
        let gain = num.leading() / self.den.leading();
        // reuse the exact pole list; from_zpk cancels any accidental
        // zero/pole coincidence
        Rational::from_zpk(zeros, self.poles.clone(), gain)
            .expect("poles unchanged, margin already verified")
    }

    pub fn pole_margin(&self) -> f64 {
        self.poles
            .iter()
            .map(|p| p.im.abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn zero_margin(&self) -> f64 {
        self.zeros
            .iter()
            .map(|z| z.im.abs())
            .fold(f64::INFINITY, f64::min)
    }
}

fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

/// Cancels zero/pole pairs that coincide within `TAU_ROOT` (relative scale).
fn cancel_pairs(
    zeros: Vec<Complex64>,
    poles: Vec<Complex64>,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut zs = zeros;
    let mut ps: Vec<Option<Complex64>> = poles.into_iter().map(Some).collect();
    let mut kept_zeros = Vec::with_capacity(zs.len());
    'outer: for z in zs.drain(..) {
        let scale = 1.0 + z.norm();
        for slot in ps.iter_mut() {
            if let Some(p) = *slot {
                if (p - z).norm() <= TAU_ROOT * scale {
                    *slot = None;
                    continue 'outer;
                }
            }
        }
        kept_zeros.push(z);
    }
    (kept_zeros, ps.into_iter().flatten().collect())
}

/// Replaces numerically split multiple roots by their cluster centers,
/// repeated with multiplicity. Companion-matrix eigenvalues of an m-fold
/// root scatter like eps^(1/m), so the cluster radius is generous.
fn snap_multiplicities(roots: &[Complex64]) -> Vec<Complex64> {
    let clusters = cluster_roots(roots, 2e-6);
    let mut out = Vec::with_capacity(roots.len());
    for (center, mult) in clusters {
        for _ in 0..mult {
            out.push(center);
        }
    }
    out
}

/// Symbol `g(t) = e^{i delta t} r(t)` with `r` rational.
#[derive(Debug, Clone)]
pub struct Symbol {
    delta: f64,
    rat: Rational,
}

impl Symbol {
    /// Wraps a rational part with an exponential frequency. Rejects rational
    /// parts growing at infinity or with zeros too close to the real axis.
    pub fn new(delta: f64, rat: Rational) -> Result<Self> {
        if rat.degree_balance() > 0 {
            return Err(Error::Schema(
                "rational part must be finite at infinity (deg num <= deg den)".into(),
            ));
        }
        if !rat.is_zero() && rat.zero_margin() < ROOT_MARGIN {
            return Err(Error::RootMargin(format!(
                "zero within {} of the real axis",
                ROOT_MARGIN
            )));
        }
        Ok(Symbol { delta, rat })
    }

    pub fn one() -> Self {
        Symbol { delta: 0.0, rat: Rational::one() }
    }

    pub fn constant(v: Complex64) -> Self {
        Symbol { delta: 0.0, rat: Rational::constant(v) }
    }

    /// The Cayley-Blaschke factor `zeta(t) = (t - i)/(t + i)`.
    pub fn zeta() -> Self {
        Symbol {
            delta: 0.0,
            rat: Rational::from_zpk(vec![c64(0.0, 1.0)], vec![c64(0.0, -1.0)], c64(1.0, 0.0))
                .unwrap(),
        }
    }

    /// `zeta(t)^n` for any integer n (positive or negative).
    pub fn zeta_pow(n: i32) -> Self {
        let m = n.unsigned_abs() as usize;
        let (upper, lower) = (vec![c64(0.0, 1.0); m], vec![c64(0.0, -1.0); m]);
        let (zeros, poles) = if n >= 0 { (upper, lower) } else { (lower, upper) };
        Symbol {
            delta: 0.0,
            rat: Rational::from_zpk(zeros, poles, c64(1.0, 0.0)).unwrap(),
        }
    }

    /// Pure exponential `e^{i nu t}`.
    pub fn exponential(nu: f64) -> Self {
        Symbol { delta: nu, rat: Rational::one() }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn rational(&self) -> &Rational {
        &self.rat
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        (Complex64::i() * self.delta * t).exp() * self.rat.eval_real(t)
    }

    /// `g~(t) = g(-t)`.
    pub fn reflect(&self) -> Symbol {
        Symbol { delta: -self.delta, rat: self.rat.reflect() }
    }

    /// Pointwise complex conjugate on the real line.
    pub fn conj(&self) -> Symbol {
        Symbol { delta: -self.delta, rat: self.rat.conj() }
    }

    pub fn mul(&self, other: &Symbol) -> Result<Symbol> {
        Symbol::new(self.delta + other.delta, self.rat.mul(&other.rat)?)
    }

    pub fn inv(&self) -> Result<Symbol> {
        self.ensure_invertible()?;
        Symbol::new(-self.delta, self.rat.inv()?)
    }

    pub fn scale(&self, v: Complex64) -> Symbol {
        Symbol {
            delta: self.delta,
            rat: self.rat.mul(&Rational::constant(v)).expect("scaling keeps margins"),
        }
    }

    pub fn is_invertible(&self) -> bool {
        !self.rat.is_zero()
            && self.rat.degree_balance() == 0
            && self.rat.pole_margin() >= ROOT_MARGIN
            && self.rat.zero_margin() >= ROOT_MARGIN
    }

    pub fn ensure_invertible(&self) -> Result<()> {
        if self.rat.is_zero() {
            return Err(Error::NotInvertible("zero symbol".into()));
        }
        if self.rat.degree_balance() != 0 {
            return Err(Error::NotInvertible(format!(
                "degree balance {} at infinity",
                self.rat.degree_balance()
            )));
        }
        if self.rat.pole_margin() < ROOT_MARGIN || self.rat.zero_margin() < ROOT_MARGIN {
            return Err(Error::RootMargin(
                "zero or pole within margin of the real axis".into(),
            ));
        }
        Ok(())
    }

    /// Almost-periodic mean motion nu(g); for this symbol class it is the
    /// exponential frequency.
    pub fn ap_index(&self) -> Result<f64> {
        self.ensure_invertible()?;
        Ok(self.delta)
    }

    /// Winding number n(g) of the rational part along the real line:
    /// upper-half-plane zeros minus upper-half-plane poles.
    pub fn winding_index(&self) -> Result<i32> {
        self.ensure_invertible()?;
        let margin = self.rat.pole_margin().min(self.rat.zero_margin());
        if margin < ROOT_MARGIN {
            return Err(Error::RootMargin(format!(
                "root within {ROOT_MARGIN} of the real axis"
            )));
        }
        let zu = self.rat.zeros().iter().filter(|z| z.im > 0.0).count() as i32;
        let pu = self.rat.poles().iter().filter(|p| p.im > 0.0).count() as i32;
        Ok(zu - pu)
    }

    /// Sampled check of the matching condition `g(t) g(-t) = 1`.
    pub fn is_matching(&self) -> bool {
        let refl = self.reflect();
        sample_points(200, 25.0).iter().all(|&t| {
            let v = self.eval(t) * refl.eval(t);
            (v - c64(1.0, 0.0)).norm() <= MATCHING_TOL * v.norm().max(1.0)
        })
    }

    /// Factorization signature `sigma(g) = (-1)^{n(g)} g(0)` of a matching
    /// function, asserted to be +1 or -1.
    pub fn sigma(&self) -> Result<i32> {
        if !self.is_matching() {
            return Err(Error::NotMatching("sigma is defined for matching functions".into()));
        }
        let n = self.winding_index()?;
        let g0 = self.eval(0.0);
        let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let val = g0 * sign;
        if (val - c64(1.0, 0.0)).norm() <= 1e-10 {
            Ok(1)
        } else if (val + c64(1.0, 0.0)).norm() <= 1e-10 {
            Ok(-1)
        } else {
            Err(Error::NotUnimodularAtZero(format!(
                "(-1)^n g(0) = {:.3e}{:+.3e}i is not within 1e-10 of +-1",
                val.re, val.im
            )))
        }
    }
}

/// Validated matching pair (a, b) with its subordinated pair (c, d) and all
/// four indices plus signatures.
#[derive(Debug, Clone)]
pub struct MatchingPair {
    a: Symbol,
    b: Symbol,
    c: Symbol,
    d: Symbol,
    nu1: f64,
    nu2: f64,
    n1: i32,
    n2: i32,
    sigma_c: i32,
    sigma_d: i32,
}

impl MatchingPair {
    pub fn new(a: Symbol, b: Symbol) -> Result<Self> {
        a.ensure_invertible()?;
        b.ensure_invertible()?;
        let (ar, br) = (a.reflect(), b.reflect());
        for &t in sample_points(200, 25.0).iter() {
            let lhs = a.eval(t) * ar.eval(t);
            let rhs = b.eval(t) * br.eval(t);
            let scale = lhs.norm().max(1.0);
            if (lhs - rhs).norm() > MATCHING_TOL * scale {
                return Err(Error::NotMatching(format!(
                    "a(t)a(-t) != b(t)b(-t) at t = {t:.4}: |diff| = {:.3e}",
                    (lhs - rhs).norm()
                )));
            }
        }
        let c = a.mul(&b.inv()?)?;
        let d = a.mul(&br.inv()?)?;
        for (name, g) in [("c", &c), ("d", &d)] {
            if !g.is_matching() {
                return Err(Error::NotMatching(format!(
                    "subordinated function {name} is not matching"
                )));
            }
        }
        let nu1 = c.ap_index()?;
        let nu2 = d.ap_index()?;
        let n1 = c.winding_index()?;
        let n2 = d.winding_index()?;
        let sigma_c = c.sigma()?;
        let sigma_d = d.sigma()?;
        if sigma_c != sigma_d {
            return Err(Error::NotMatching(format!(
                "signature mismatch: sigma(c) = {sigma_c}, sigma(d) = {sigma_d}"
            )));
        }
        if (n1 - n2).rem_euclid(2) != 0 {
            return Err(Error::NotMatching(format!(
                "indices n1 = {n1}, n2 = {n2} have different parity"
            )));
        }
        Ok(MatchingPair { a, b, c, d, nu1, nu2, n1, n2, sigma_c, sigma_d })
    }

    /// The pair `(conj(a), conj(b~))` generating the adjoint operator; its
    /// subordinated pair is `(conj(d), conj(c))` with negated indices.
    pub fn adjoint_pair(&self) -> Result<MatchingPair> {
        MatchingPair::new(self.a.conj(), self.b.reflect().conj())
    }

    pub fn a(&self) -> &Symbol {
        &self.a
    }
    pub fn b(&self) -> &Symbol {
        &self.b
    }
    pub fn c(&self) -> &Symbol {
        &self.c
    }
    pub fn d(&self) -> &Symbol {
        &self.d
    }
    pub fn nu1(&self) -> f64 {
        self.nu1
    }
    pub fn nu2(&self) -> f64 {
        self.nu2
    }
    pub fn n1(&self) -> i32 {
        self.n1
    }
    pub fn n2(&self) -> i32 {
        self.n2
    }
    pub fn sigma_c(&self) -> i32 {
        self.sigma_c
    }
    pub fn sigma_d(&self) -> i32 {
        self.sigma_d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reflect_of_zeta_is_reciprocal() {
        let zeta = Symbol::zeta();
        let refl = zeta.reflect();
        let inv = zeta.inv().unwrap();
        for &t in sample_points(100, 20.0).iter() {
            assert_relative_eq!((refl.eval(t) - inv.eval(t)).norm(), 0.0, epsilon = 1e-12);
        }
        // reflect(reflect(g)) == g coefficient-exact
        let back = refl.reflect();
        assert_eq!(back.delta(), zeta.delta());
        assert_eq!(back.rational().num().coeffs(), zeta.rational().num().coeffs());
        assert_eq!(back.rational().den().coeffs(), zeta.rational().den().coeffs());
    }

    #[test]
    fn reflect_negates_exponential() {
        let g = Symbol::exponential(2.0);
        assert_eq!(g.reflect().delta(), -2.0);
    }

    #[test]
    fn matching_symbol_reflection_is_pointwise_reciprocal() {
        // g = zeta^{-2} * (v/v~) is matching by construction
        let v = Symbol::new(
            0.0,
            Rational::from_zpk(vec![c64(1.0, 2.0)], vec![c64(-0.5, -1.5)], c64(1.0, 0.0)).unwrap(),
        )
        .unwrap();
        let g = Symbol::zeta_pow(-2)
            .mul(&v)
            .unwrap()
            .mul(&v.reflect().inv().unwrap())
            .unwrap();
        assert!(g.is_matching());
        let refl = g.reflect();
        for &t in sample_points(100, 20.0).iter() {
            let lhs = refl.eval(t);
            let rhs = 1.0 / g.eval(t);
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn mul_inv_conj_basics() {
        let zeta = Symbol::zeta();
        let prod = zeta.mul(&zeta.inv().unwrap()).unwrap();
        for &t in sample_points(50, 10.0).iter() {
            assert_relative_eq!((prod.eval(t) - c64(1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
        }
        // inv(e^{3it} zeta) = e^{-3it} zeta^{-1} pointwise
        let g = Symbol::exponential(3.0).mul(&zeta).unwrap();
        let gi = g.inv().unwrap();
        for &t in sample_points(100, 15.0).iter() {
            let lhs = gi.eval(t);
            let rhs = 1.0 / g.eval(t);
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }
        // conj(zeta)(t) = zeta(t)^{-1} on the real line (unimodularity)
        let cz = zeta.conj();
        for &t in sample_points(50, 10.0).iter() {
            let lhs = cz.eval(t);
            let rhs = 1.0 / zeta.eval(t);
            assert_relative_eq!((lhs - rhs).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn ap_index_examples() {
        assert_eq!(Symbol::exponential(2.0).ap_index().unwrap(), 2.0);
        assert_eq!(Symbol::zeta_pow(-2).ap_index().unwrap(), 0.0);
        let g = Symbol::new(
            -1.0,
            Rational::from_zpk(vec![c64(0.0, 2.0)], vec![c64(0.0, -2.0)], c64(1.0, 0.0)).unwrap(),
        )
        .unwrap();
        assert_eq!(g.ap_index().unwrap(), -1.0);
        // numerical mean-motion oracle over [-l, l], l = 1e3
        let l = 1.0e3;
        let n = 200_000usize;
        let mut total = 0.0f64;
        let mut prev = g.eval(-l).arg();
        for k in 1..=n {
            let t = -l + 2.0 * l * (k as f64) / (n as f64);
            let arg = g.eval(t).arg();
            let mut d = arg - prev;
            while d > std::f64::consts::PI {
                d -= 2.0 * std::f64::consts::PI;
            }
            while d < -std::f64::consts::PI {
                d += 2.0 * std::f64::consts::PI;
            }
            total += d;
            prev = arg;
        }
        let nu_est = total / (2.0 * l);
        assert!((nu_est - (-1.0)).abs() < 1e-2, "mean motion estimate {nu_est}");
    }

    #[test]
    fn winding_index_examples() {
        assert_eq!(Symbol::zeta().winding_index().unwrap(), 1);
        assert_eq!(Symbol::zeta_pow(-2).winding_index().unwrap(), -2);
        // b = (t-i)(t+2i)/((t+i)(t-2i)) -> 0
        let b = Symbol::new(
            0.0,
            Rational::from_zpk(
                vec![c64(0.0, 1.0), c64(0.0, -2.0)],
                vec![c64(0.0, -1.0), c64(0.0, 2.0)],
                c64(1.0, 0.0),
            )
            .unwrap(),
        )
        .unwrap();
        assert_eq!(b.winding_index().unwrap(), 0);
    }

    #[test]
    fn winding_index_additive_and_reflection() {
        let g = Symbol::new(
            0.0,
            Rational::from_zpk(
                vec![c64(1.0, 1.5), c64(-2.0, -0.8)],
                vec![c64(0.5, -2.0), c64(0.0, 0.9)],
                c64(0.3, 0.4),
            )
            .unwrap(),
        )
        .unwrap();
        let h = Symbol::zeta_pow(2);
        let gh = g.mul(&h).unwrap();
        assert_eq!(
            gh.winding_index().unwrap(),
            g.winding_index().unwrap() + h.winding_index().unwrap()
        );
        assert_eq!(g.reflect().winding_index().unwrap(), -g.winding_index().unwrap());
        assert_eq!(g.reflect().ap_index().unwrap(), -g.ap_index().unwrap());
    }

    #[test]
    fn sigma_of_zeta_powers() {
        assert_eq!(Symbol::zeta_pow(-2).sigma().unwrap(), 1);
        assert_eq!(Symbol::zeta().sigma().unwrap(), 1);
        assert_eq!(Symbol::zeta_pow(-1).sigma().unwrap(), 1);
        // the constant -1 flips the signature
        let neg = Symbol::zeta_pow(-1).scale(c64(-1.0, 0.0));
        assert_eq!(neg.sigma().unwrap(), -1);
    }

    #[test]
    fn sigma_rejects_non_matching() {
        let g = Symbol::new(
            0.0,
            Rational::from_zpk(vec![c64(0.0, 2.0)], vec![c64(0.0, -1.0)], c64(1.0, 0.0)).unwrap(),
        )
        .unwrap();
        assert!(matches!(g.sigma(), Err(Error::NotMatching(_))));
    }

    #[test]
    fn matching_pair_exponentials() {
        let a = Symbol::exponential(-2.0);
        let b = Symbol::exponential(1.0);
        let pair = MatchingPair::new(a, b).unwrap();
        assert_eq!(pair.nu1(), -3.0); // c = e^{i(nu1-nu2)t}
        assert_eq!(pair.nu2(), -1.0); // d = e^{i(nu1+nu2)t}
        assert_eq!(pair.n1(), 0);
        assert_eq!(pair.n2(), 0);
    }

    #[test]
    fn matching_pair_equal_symbols() {
        // (a, a) -> c = 1, d = a a~^{-1}
        let a = Symbol::new(
            0.0,
            Rational::from_zpk(vec![c64(0.0, 1.0)], vec![c64(0.0, -1.0)], c64(1.0, 0.0)).unwrap(),
        )
        .unwrap(); // a = zeta
        let pair = MatchingPair::new(a.clone(), a.clone()).unwrap();
        for &t in sample_points(60, 12.0).iter() {
            assert!((pair.c().eval(t) - c64(1.0, 0.0)).norm() < 1e-12);
            let d_expected = a.eval(t) / a.reflect().eval(t);
            assert!((pair.d().eval(t) - d_expected).norm() < 1e-10);
        }
    }

    #[test]
    fn matching_pair_one_b() {
        // (1, b) with b b~ = 1 -> c = b~, d = b
        let b = Symbol::new(
            0.0,
            Rational::from_zpk(
                vec![c64(0.0, 1.0), c64(0.0, -2.0)],
                vec![c64(0.0, -1.0), c64(0.0, 2.0)],
                c64(1.0, 0.0),
            )
            .unwrap(),
        )
        .unwrap();
        assert!(b.is_matching());
        let pair = MatchingPair::new(Symbol::one(), b.clone()).unwrap();
        let br = b.reflect();
        for &t in sample_points(60, 12.0).iter() {
            assert!((pair.c().eval(t) - br.eval(t)).norm() < 1e-10);
            assert!((pair.d().eval(t) - b.eval(t)).norm() < 1e-10);
        }
    }

    #[test]
    fn matching_pair_rejects_non_matching() {
        let a = Symbol::zeta();
        let b = Symbol::new(
            0.0,
            Rational::from_zpk(vec![c64(0.0, 2.0)], vec![c64(0.0, -2.0)], c64(2.0, 0.0)).unwrap(),
        )
        .unwrap();
        assert!(matches!(MatchingPair::new(a, b), Err(Error::NotMatching(_))));
    }

    #[test]
    fn adjoint_pair_negates_indices() {
        // generator construction: a = p, b = p~ zeta^k
        let p = Symbol::new(
            0.0,
            Rational::from_zpk(vec![c64(1.0, 2.0)], vec![c64(1.0, -2.0)], c64(1.0, 0.0)).unwrap(),
        )
        .unwrap();
        let b = p.reflect().mul(&Symbol::zeta_pow(2)).unwrap();
        let pair = MatchingPair::new(p, b).unwrap();
        let adj = pair.adjoint_pair().unwrap();
        assert_eq!(adj.n1(), -pair.n2());
        assert_eq!(adj.n2(), -pair.n1());
        assert_eq!(adj.nu1(), -pair.nu2());
        assert_eq!(adj.nu2(), -pair.nu1());
        assert_eq!(adj.sigma_c(), pair.sigma_d());
        assert_eq!(adj.sigma_d(), pair.sigma_c());
    }

    #[test]
    fn root_margin_enforced() {
        let r = Rational::from_zpk(vec![], vec![c64(1.0, 1e-9)], c64(1.0, 0.0));
        assert!(matches!(r, Err(Error::RootMargin(_))));
    }
}
