//! Verification engine: deterministic test vectors, operator residuals, SVD
//! rank analysis, the product-identity suite, backend cross-validation and
//! end-to-end equation solving against a dense oracle.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::{self, Verdict};
use crate::error::{Error, Result};
use crate::inverse::{self, InverseKind, InverseRecipe};
use crate::operator::{build_h, build_w, Disc, DiscreteOperator, LaguerreBasis};
use crate::symbol::{MatchingPair, Rational, Symbol};

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Deterministic family of smooth decaying test vectors: Gaussian bumps with
/// random complex phases plus low-order Laguerre mixtures.
#[derive(Debug, Clone)]
pub struct TestVectorSet {
    pub seed: u64,
    pub vectors: Vec<DVector<Complex64>>,
}

impl TestVectorSet {
    pub fn new(disc: &Disc, count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut vectors = Vec::with_capacity(count);
        for k in 0..count {
            let v = match disc {
                Disc::Grid(g) => {
                    if k % 3 == 2 {
                        // Laguerre mixture sampled on the grid
                        let modes = 16;
                        let basis = LaguerreBasis::new(modes).unwrap();
                        let samples = basis.sample_matrix(g.nodes());
                        let coeffs: Vec<Complex64> = (0..modes)
                            .map(|j| {
                                let r = 0.65f64.powi(j as i32);
                                c64(
                                    r * rng.random_range(-1.0..1.0),
                                    r * rng.random_range(-1.0..1.0),
                                )
                            })
                            .collect();
                        DVector::from_fn(g.len(), |i, _| {
                            (0..modes).map(|j| coeffs[j] * samples[(i, j)]).sum()
                        })
                    } else {
                        let center = rng.random_range(1.5..8.0);
                        let width = rng.random_range(0.6..1.6);
                        let phase = rng.random_range(0.0..std::f64::consts::TAU);
                        let rot = c64(phase.cos(), phase.sin());
                        DVector::from_iterator(
                            g.len(),
                            g.nodes()
                                .iter()
                                .map(|&t| rot * (-((t - center) / width).powi(2)).exp()),
                        )
                    }
                }
                Disc::Laguerre(b) => {
                    let active = 16.min(b.modes());
                    DVector::from_fn(b.modes(), |j, _| {
                        if j < active {
                            let r = 0.65f64.powi(j as i32);
                            c64(r * rng.random_range(-1.0..1.0), r * rng.random_range(-1.0..1.0))
                        } else {
                            c64(0.0, 0.0)
                        }
                    })
                }
            };
            vectors.push(v);
        }
        TestVectorSet { seed, vectors }
    }
}

/// Largest relative residual `max_v |A v - B v| / |v|` in the backend norm.
pub fn max_residual(
    lhs: &DiscreteOperator,
    rhs: &DiscreteOperator,
    vectors: &[DVector<Complex64>],
) -> Result<f64> {
    let disc = lhs.disc();
    let mut worst = 0.0f64;
    for v in vectors {
        let a = lhs.apply(v)?;
        let b = rhs.apply(v)?;
        worst = worst.max(disc.norm(&(a - b)) / disc.norm(v).max(1e-300));
    }
    Ok(worst)
}

/// Residual of `A` against the identity.
pub fn residual_vs_identity(
    op: &DiscreteOperator,
    vectors: &[DVector<Complex64>],
) -> Result<f64> {
    max_residual(op, &DiscreteOperator::identity(op.disc()), vectors)
}

/// Numerical nullity and spectral gap: singular values below
/// `tol * sigma_max` count as null; the gap ratio is the smallest kept over
/// the largest dropped (infinite when nothing drops).
pub fn rank_gap(op: &DiscreteOperator, tol: f64) -> (usize, f64) {
    let svd = op.to_dense().svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let smax = sv.first().copied().unwrap_or(0.0);
    let nullity = sv.iter().filter(|&&s| s < tol * smax).count();
    if nullity == 0 {
        return (0, f64::INFINITY);
    }
    let kept = sv[sv.len() - nullity - 1];
    let dropped = sv[sv.len() - nullity];
    (nullity, kept / dropped.max(1e-300))
}

/// Strict nullity: requires a gap ratio of at least `min_gap`, otherwise
/// the count is ambiguous.
pub fn nullity_strict(op: &DiscreteOperator, tol: f64, min_gap: f64) -> Result<usize> {
    let (nullity, gap) = rank_gap(op, tol);
    if nullity > 0 && gap < min_gap {
        return Err(Error::RankAmbiguous(format!(
            "nullity {nullity} with gap ratio {gap:.2e} < {min_gap:.0e}"
        )));
    }
    Ok(nullity)
}

/// Residuals of the two product identities
/// `W(ab) = W(a)W(b) + H(a)H(b~)` and `H(ab) = W(a)H(b) + H(a)W(b~)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IdentityReport {
    pub res_w: f64,
    pub res_h: f64,
}

impl IdentityReport {
    pub fn max(&self) -> f64 {
        self.res_w.max(self.res_h)
    }
}

pub fn identity_suite(
    disc: &Disc,
    a: &Symbol,
    b: &Symbol,
    vectors: &[DVector<Complex64>],
) -> Result<IdentityReport> {
    let ab = a.mul(b)?;
    let w_ab = build_w(disc, &ab)?;
    let w_a = build_w(disc, a)?;
    let w_b = build_w(disc, b)?;
    let h_a = build_h(disc, a)?;
    let h_b = build_h(disc, b)?;
    let h_ab = build_h(disc, &ab)?;
    let h_b_refl = build_h(disc, &b.reflect())?;
    let w_b_refl = build_w(disc, &b.reflect())?;
    let rhs_w = w_a.compose(&w_b)?.add(&h_a.compose(&h_b_refl)?)?;
    let rhs_h = w_a.compose(&h_b)?.add(&h_a.compose(&w_b_refl)?)?;
    Ok(IdentityReport {
        res_w: max_residual(&w_ab, &rhs_w, vectors)?,
        res_h: max_residual(&h_ab, &rhs_h, vectors)?,
    })
}

/// Report of an end-to-end solve of `(W(a) + H(b)) x = f`.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub x: DVector<Complex64>,
    pub kind: InverseKind,
    pub verdict: Verdict,
    /// `|(W+H) x - f| / |f|`; for one-sided/generalized cases this is the
    /// range-projection residual.
    pub residual: f64,
    /// Relative difference against the dense LU solve of the truncated
    /// matrix; only for the two-sided case, where the solution is unique.
    pub oracle_diff: Option<f64>,
    /// Predicted kernel dimension (solution non-uniqueness directions).
    pub kernel_dim: classify::DimPrediction,
}

/// Assembles the inverse recipe selected by classification (or the
/// requested kind) and solves with it.
pub fn solve(
    disc: &Disc,
    pair: &MatchingPair,
    f: &DVector<Complex64>,
    requested: Option<InverseKind>,
) -> Result<SolveReport> {
    let report = classify::classify(pair);
    let kind = match requested {
        Some(k) => k,
        None => match report.verdict {
            Verdict::TwoSided => InverseKind::TwoSided,
            Verdict::RightOnly => InverseKind::Right,
            Verdict::LeftOnly => InverseKind::Left,
            Verdict::NotOneSided | Verdict::Generalized => InverseKind::Generalized,
            Verdict::Undetermined => {
                return Err(Error::Precondition(
                    "no inverse path for an undetermined pair; supply --kind explicitly".into(),
                ))
            }
        },
    };
    let recipe: InverseRecipe = match kind {
        InverseKind::TwoSided => inverse::whh_two_sided_inverse(disc, pair)?,
        InverseKind::Right => inverse::whh_right_inverse(disc, pair)?,
        InverseKind::Left => inverse::whh_left_inverse(disc, pair)?,
        InverseKind::Generalized => inverse::whh_generalized_inverse(disc, pair)?,
    };
    let x = recipe.apply(f)?;
    let whh = build_w(disc, pair.a())?.add(&build_h(disc, pair.b())?)?;
    let fx = whh.apply(&x)?;
    let residual = disc.norm(&(fx - f)) / disc.norm(f).max(1e-300);
    let oracle_diff = if kind == InverseKind::TwoSided {
        let dense = whh.to_dense();
        let lu = dense.lu();
        let xd = lu
            .solve(f)
            .ok_or_else(|| Error::Precondition("dense oracle solve failed".into()))?;
        Some(disc.norm(&(&x - &xd)) / disc.norm(&xd).max(1e-300))
    } else {
        None
    };
    Ok(SolveReport {
        x,
        kind,
        verdict: report.verdict,
        residual,
        oracle_diff,
        kernel_dim: report.ker_dim,
    })
}

/// Cross-backend discrepancy: applies `W(g)` (or `H(g)`) to the same smooth
/// function on the grid and in Laguerre coordinates and compares the results
/// as grid functions. The function is given by its Laguerre coefficients.
pub fn cross_backend(
    g: &Symbol,
    coeffs: &[Complex64],
    grid_disc: &Disc,
    lag_disc: &Disc,
    hankel: bool,
) -> Result<f64> {
    let grid = grid_disc.as_grid()?;
    let basis = lag_disc.as_laguerre()?;
    if coeffs.len() > basis.modes() {
        return Err(Error::BackendMismatch("more coefficients than modes".into()));
    }
    let samples = basis.sample_matrix(grid.nodes());
    let expand = |cv: &DVector<Complex64>| -> DVector<Complex64> {
        DVector::from_fn(grid.len(), |i, _| {
            (0..basis.modes()).map(|j| cv[j] * samples[(i, j)]).sum()
        })
    };
    let mut cv = DVector::from_element(basis.modes(), c64(0.0, 0.0));
    for (j, &c) in coeffs.iter().enumerate() {
        cv[j] = c;
    }
    // the laguerre build runs first so that delta != 0 surfaces
    // E_BACKEND_UNSUPPORTED (the designated contract) before any grid error
    let (op_lag, op_grid) = if hankel {
        (build_h(lag_disc, g)?, build_h(grid_disc, g)?)
    } else {
        (build_w(lag_disc, g)?, build_w(grid_disc, g)?)
    };
    let f_grid = expand(&cv);
    let grid_result = op_grid.apply(&f_grid)?;
    let lag_result = expand(&op_lag.apply(&cv)?);
    Ok(grid.norm((grid_result - lag_result).as_slice())
        / grid.norm(f_grid.as_slice()).max(1e-300))
}

/// Random invertible exponential-rational symbol: `pairs` zeros and poles
/// with imaginary parts at least `margin`, real parts within +-3, and an
/// exponential frequency that is a multiple of `delta_step`.
pub fn random_symbol(
    rng: &mut ChaCha8Rng,
    pairs: usize,
    margin: f64,
    delta_step: f64,
    delta_max: f64,
) -> Symbol {
    let mut zeros = Vec::with_capacity(pairs);
    let mut poles = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let sz: f64 = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        zeros.push(c64(
            rng.random_range(-3.0..3.0),
            sz * rng.random_range(margin..3.0),
        ));
        let sp: f64 = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        poles.push(c64(
            rng.random_range(-3.0..3.0),
            sp * rng.random_range(margin..3.0),
        ));
    }
    let gain = c64(rng.random_range(0.5..2.0), rng.random_range(-1.0..1.0));
    let delta = if delta_step > 0.0 && delta_max > 0.0 {
        let kmax = (delta_max / delta_step).round() as i64;
        rng.random_range(-kmax..=kmax) as f64 * delta_step
    } else {
        0.0
    };
    Symbol::new(delta, Rational::from_zpk(zeros, poles, gain).unwrap()).unwrap()
}

/// Random matching pair built from the generator `(a, b) = (p, p~ u)` with
/// `u = (+-1) zeta^k e^{i delta t} v / v~`, which satisfies the matching
/// condition identically.
pub fn random_matching_pair(
    rng: &mut ChaCha8Rng,
    margin: f64,
    k_range: std::ops::RangeInclusive<i32>,
    delta_step: f64,
    delta_max: f64,
) -> MatchingPair {
    loop {
        let p_pairs = rng.random_range(0..=2);
        let p = random_symbol(rng, p_pairs, margin, delta_step, delta_max);
        let v_pairs = rng.random_range(0..=1);
        let v = random_symbol(rng, v_pairs, margin, 0.0, 0.0);
        let k = rng.random_range(k_range.clone());
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let u = Symbol::zeta_pow(k)
            .mul(&v)
            .and_then(|s| s.mul(&v.reflect().inv()?))
            .map(|s| s.scale(c64(sign, 0.0)));
        let b = u.and_then(|u| p.reflect().mul(&u));
        if let Ok(b) = b {
            if let Ok(pair) = MatchingPair::new(p, b) {
                return pair;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::Grid;

    fn grid_disc(t_max: f64, panels: usize) -> Disc {
        Disc::grid(Grid::with_panels(t_max, panels).unwrap())
    }

    fn lag_disc(modes: usize) -> Disc {
        Disc::laguerre(LaguerreBasis::new(modes).unwrap())
    }

    #[test]
    fn test_vectors_are_deterministic() {
        let disc = grid_disc(20.0, 16);
        let a = TestVectorSet::new(&disc, 5, 42);
        let b = TestVectorSet::new(&disc, 5, 42);
        for (x, y) in a.vectors.iter().zip(b.vectors.iter()) {
            assert_eq!(x, y, "same seed must give bit-identical vectors");
        }
        let c = TestVectorSet::new(&disc, 5, 43);
        assert_ne!(a.vectors[0], c.vectors[0]);
    }

    #[test]
    fn residual_identity_vs_identity_is_zero() {
        let disc = lag_disc(32);
        let vs = TestVectorSet::new(&disc, 4, 1).vectors;
        let id = DiscreteOperator::identity(&disc);
        assert_eq!(residual_vs_identity(&id, &vs).unwrap(), 0.0);
        // deliberately wrong-side inverse has O(1) residual
        let w = build_w(&disc, &Symbol::zeta()).unwrap();
        let wrong = build_w(&disc, &Symbol::zeta()).unwrap(); // W(zeta)W(zeta) != I
        let r = residual_vs_identity(&w.compose(&wrong).unwrap(), &vs).unwrap();
        assert!(r > 0.1, "negative control residual {r}");
    }

    #[test]
    fn rank_gap_identity_and_kernel() {
        let disc = lag_disc(64);
        let id = DiscreteOperator::identity(&disc);
        let (nullity, gap) = rank_gap(&id, 1e-8);
        assert_eq!(nullity, 0);
        assert!(gap.is_infinite());
        // a = b = zeta^{-1}: nullity 1 with a large gap
        let z = Symbol::zeta_pow(-1);
        let pair = MatchingPair::new(z.clone(), z).unwrap();
        let whh = build_w(&disc, pair.a())
            .unwrap()
            .add(&build_h(&disc, pair.b()).unwrap())
            .unwrap();
        let nullity = nullity_strict(&whh, 1e-8, 1e4).unwrap();
        assert_eq!(nullity, 1);
    }

    #[test]
    fn identity_suite_degenerate_cases() {
        let disc = grid_disc(40.0, 160);
        let vs = TestVectorSet::new(&disc, 4, 7).vectors;
        // b = 1: H identity degenerates to H(a) = H(a)
        let a = Symbol::new(
            0.0,
            Rational::from_zpk(vec![c64(0.5, 1.0)], vec![c64(-0.5, -1.2)], c64(1.0, 0.3)).unwrap(),
        )
        .unwrap();
        let rep = identity_suite(&disc, &a, &Symbol::one(), &vs).unwrap();
        assert!(rep.max() < 1e-10, "b = 1 identities: {}", rep.max());
        // a constant: W(ab) = a W(b)
        let ca = Symbol::constant(c64(2.0, -1.0));
        let rep2 = identity_suite(&disc, &ca, &a, &vs).unwrap();
        assert!(rep2.max() < 1e-10, "a constant identities: {}", rep2.max());
    }

    #[test]
    fn identity_suite_random_pair() {
        let disc = grid_disc(40.0, 240);
        let vs = TestVectorSet::new(&disc, 3, 11).vectors;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_symbol(&mut rng, 2, 0.5, 1.0 / 6.0, 2.0);
        let b = random_symbol(&mut rng, 2, 0.5, 1.0 / 6.0, 2.0);
        let rep = identity_suite(&disc, &a, &b, &vs).unwrap();
        assert!(rep.max() < 1e-5, "product identities: {}", rep.max());
    }

    #[test]
    fn triple_product_identity() {
        // W(f_- g f_+) = W(f_-) W(g) W(f_+) for analytic side factors
        let disc = grid_disc(40.0, 160);
        let vs = TestVectorSet::new(&disc, 3, 13).vectors;
        let f_minus = Symbol::new(
            0.0,
            Rational::from_zpk(vec![c64(1.0, 1.2)], vec![c64(-0.5, 2.0)], c64(1.0, 0.0)).unwrap(),
        )
        .unwrap();
        let f_plus = Symbol::new(
            0.0,
            Rational::from_zpk(vec![c64(-1.0, -0.8)], vec![c64(0.5, -1.5)], c64(1.0, 0.0)).unwrap(),
        )
        .unwrap();
        let g = Symbol::new(
            0.0,
            Rational::from_zpk(vec![c64(0.0, -2.0)], vec![c64(0.3, 1.1)], c64(0.7, 0.2)).unwrap(),
        )
        .unwrap();
        let prod = f_minus.mul(&g).unwrap().mul(&f_plus).unwrap();
        let lhs = build_w(&disc, &prod).unwrap();
        let rhs = build_w(&disc, &f_minus)
            .unwrap()
            .compose(&build_w(&disc, &g).unwrap())
            .unwrap()
            .compose(&build_w(&disc, &f_plus).unwrap())
            .unwrap();
        let r = max_residual(&lhs, &rhs, &vs).unwrap();
        assert!(r < 1e-5, "triple product residual {r}");
    }

    #[test]
    fn solve_two_sided_matches_dense_oracle() {
        let disc = lag_disc(96);
        let a = Symbol::new(
            0.0,
            Rational::from_zpk(
                vec![c64(0.0, 2.0), c64(0.0, -3.0)],
                vec![c64(0.0, -2.0), c64(0.0, 3.0)],
                c64(1.0, 0.0),
            )
            .unwrap(),
        )
        .unwrap();
        let pair = MatchingPair::new(a.clone(), a).unwrap();
        let f = inverse::psi_vector(&disc, 0);
        let rep = solve(&disc, &pair, &f, None).unwrap();
        assert_eq!(rep.kind, InverseKind::TwoSided);
        assert!(rep.residual < 1e-6, "residual {}", rep.residual);
        assert!(rep.oracle_diff.unwrap() < 1e-6, "oracle diff {:?}", rep.oracle_diff);
        // f = 0 -> x = 0
        let zero = DVector::from_element(disc.dim(), c64(0.0, 0.0));
        let rep0 = solve(&disc, &pair, &zero, None).unwrap();
        assert_eq!(rep0.x.norm(), 0.0);
    }

    #[test]
    fn solve_right_only_reports_kernel() {
        let disc = lag_disc(96);
        let z = Symbol::zeta_pow(-1);
        let pair = MatchingPair::new(z.clone(), z).unwrap();
        let f = inverse::psi_vector(&disc, 0);
        let rep = solve(&disc, &pair, &f, None).unwrap();
        assert_eq!(rep.kind, InverseKind::Right);
        assert!(rep.residual < 1e-6, "residual {}", rep.residual);
        assert!(rep.oracle_diff.is_none());
        assert_eq!(rep.kernel_dim, classify::DimPrediction::Finite(1));
    }

    #[test]
    fn cross_backend_w_and_h() {
        let grid = grid_disc(40.0, 256);
        let lag = lag_disc(200);
        let g = Symbol::new(
            0.0,
            Rational::from_zpk(vec![c64(1.0, 1.5)], vec![c64(-0.8, -1.1)], c64(1.0, -0.4)).unwrap(),
        )
        .unwrap();
        let coeffs: Vec<Complex64> = (0..12)
            .map(|j| c64(0.6f64.powi(j) * 0.9, 0.5f64.powi(j) * 0.2))
            .collect();
        let dw = cross_backend(&g, &coeffs, &grid, &lag, false).unwrap();
        let dh = cross_backend(&g, &coeffs, &grid, &lag, true).unwrap();
        assert!(dw < 1e-4, "W backend discrepancy {dw}");
        assert!(dh < 1e-4, "H backend discrepancy {dh}");
        // g = 1: exact agreement
        let d1 = cross_backend(&Symbol::one(), &coeffs, &grid, &lag, false).unwrap();
        assert!(d1 < 1e-10);
        // delta != 0 is not supported on the laguerre backend
        assert!(matches!(
            cross_backend(&Symbol::exponential(1.0), &coeffs, &grid, &lag, false),
            Err(Error::BackendUnsupported(_))
        ));
    }

    #[test]
    fn random_matching_pairs_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..10 {
            let pair = random_matching_pair(&mut rng, 0.5, -2..=2, 0.5, 1.5);
            // Lemma 3.3 identities come with construction
            assert_eq!(pair.sigma_c(), pair.sigma_d());
            assert_eq!((pair.n1() - pair.n2()).rem_euclid(2), 0);
        }
    }
}
