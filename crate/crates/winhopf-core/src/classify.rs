//! Invertibility classification of `W(a) + H(b)` from the four indices of
//! the subordinated pair, with cited conditions and predicted kernel and
//! cokernel dimensions.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::inverse::{self, p_dims};
use crate::operator::{build_h, build_w, Disc, DiscreteOperator};
use crate::symbol::MatchingPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    TwoSided,
    LeftOnly,
    RightOnly,
    Generalized,
    NotOneSided,
    Undetermined,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::TwoSided => "two_sided",
            Verdict::LeftOnly => "left_only",
            Verdict::RightOnly => "right_only",
            Verdict::Generalized => "generalized",
            Verdict::NotOneSided => "not_one_sided",
            Verdict::Undetermined => "undetermined",
        };
        write!(f, "{s}")
    }
}

/// A condition that fired during classification, with its citation.
#[derive(Debug, Clone, Serialize)]
pub struct FiredRule {
    pub id: String,
    pub condition: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DimPrediction {
    Finite(usize),
    Infinite,
    Unknown,
}

impl std::fmt::Display for DimPrediction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DimPrediction::Finite(k) => write!(f, "{k}"),
            DimPrediction::Infinite => write!(f, "infinite"),
            DimPrediction::Unknown => write!(f, "unknown"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub fired_rules: Vec<FiredRule>,
    pub ker_dim: DimPrediction,
    pub coker_dim: DimPrediction,
    pub nu1: f64,
    pub nu2: f64,
    pub n1: i32,
    pub n2: i32,
    pub sigma: i32,
    /// Set when the undetermined branch points at the intersection test.
    pub heuristic_hint: Option<String>,
}

fn rule(id: &str, condition: &str) -> FiredRule {
    FiredRule { id: id.into(), condition: condition.into() }
}

/// Sufficient right-invertibility conditions on the subordinated indices;
/// mirrored through the adjoint pair for the left side.
fn right_sufficient(nu1: f64, n1: i32, nu2: f64, n2: i32, sigma_d: i32) -> Option<FiredRule> {
    if nu1 < 0.0 && nu2 < 0.0 {
        return Some(rule("Theorem 4.1(i)", "nu_1 < 0 and nu_2 < 0"));
    }
    if nu1 < 0.0 && nu2 == 0.0 && (n2 < 1 || (n2 == 1 && sigma_d == -1)) {
        return Some(rule(
            "Theorem 4.1(iii)",
            "nu_1 < 0, nu_2 = 0 and n_2 < 1, or n_2 = 1 and sigma(d) = -1",
        ));
    }
    if nu1 == 0.0 && n1 <= 0 && nu2 < 0.0 {
        return Some(rule("Theorem 4.1(iv)", "nu_1 = 0, n_1 <= 0 and nu_2 < 0"));
    }
    if nu1 == 0.0 && nu2 == 0.0 && n1 <= 0 && n2 < 1 {
        return Some(rule("Theorem 4.1(v)(i)", "n_1 <= 0, n_2 < 1"));
    }
    if nu1 == 0.0 && nu2 == 0.0 && n1 <= 0 && n2 == 1 && sigma_d == -1 {
        return Some(rule(
            "Theorem 4.1(v)(ii)",
            "n_1 <= 0, n_2 = 1 and sigma(d) = -1",
        ));
    }
    None
}

/// Necessary conditions for left-invertibility in the nu_1 = nu_2 = 0 case.
fn left_possible_zero_nu(n1: i32, n2: i32, sigma_c: i32) -> std::result::Result<(), FiredRule> {
    if n2 >= n1 {
        if n1 < -1 {
            return Err(rule("Theorem 3.4", "left-invertible needs n_1 >= -1"));
        }
        if n1 == -1 && !(sigma_c == -1 && n2 > n1) {
            return Err(rule(
                "Theorem 3.4",
                "n_1 = -1 needs sigma(c) = -1 and n_2 > n_1",
            ));
        }
    } else {
        if n1 < 1 {
            return Err(rule("Theorem 3.5", "left-invertible with n_1 > n_2 needs n_1 >= 1"));
        }
        if n2 < 0 && n1 < -n2 {
            return Err(rule(
                "Theorem 3.5",
                "left-invertible with n_2 < 0 needs n_1 >= -n_2",
            ));
        }
    }
    Ok(())
}

/// Necessary conditions for right-invertibility in the nu_1 = nu_2 = 0 case.
fn right_possible_zero_nu(n1: i32, n2: i32, sigma_d: i32) -> std::result::Result<(), FiredRule> {
    if n1 <= n2 {
        if n2 > 1 {
            return Err(rule("Theorem 3.6", "right-invertible needs n_2 <= 1"));
        }
        if n2 == 1 && !(sigma_d == -1 && n1 < n2) {
            return Err(rule(
                "Theorem 3.6",
                "n_2 = 1 needs sigma(d) = -1 and n_1 < n_2",
            ));
        }
    } else {
        if n2 > -1 {
            return Err(rule("Theorem 3.7", "right-invertible with n_1 > n_2 needs n_2 <= -1"));
        }
        if n1 > 0 && n1 > -n2 {
            return Err(rule(
                "Theorem 3.7",
                "right-invertible with n_1 > 0 needs n_1 <= -n_2",
            ));
        }
    }
    Ok(())
}

/// Kernel dimension from the split formula, valid when `W(c)` is
/// right-invertible; the cokernel mirrors through the adjoint pair.
fn ker_prediction(pair: &MatchingPair, verdict: Verdict) -> DimPrediction {
    let (nu1, n1) = (pair.nu1(), pair.n1());
    let (nu2, n2) = (pair.nu2(), pair.n2());
    if inverse::is_right_invertible(nu1, n1) {
        if nu1 < 0.0 || nu2 < 0.0 {
            return DimPrediction::Infinite;
        }
        let plus_d = if nu2 == 0.0 { p_dims(n2, pair.sigma_d()).0 } else { 0 };
        let minus_c = p_dims(n1, pair.sigma_c()).1;
        return DimPrediction::Finite(plus_d + minus_c);
    }
    match verdict {
        Verdict::TwoSided | Verdict::LeftOnly => DimPrediction::Finite(0),
        _ => DimPrediction::Unknown,
    }
}

fn coker_prediction(pair: &MatchingPair, verdict: Verdict) -> DimPrediction {
    // the adjoint pair has indices (-nu2, -n2), (-nu1, -n1), signatures swapped
    let (nu1a, n1a) = (-pair.nu2(), -pair.n2());
    let (nu2a, n2a) = (-pair.nu1(), -pair.n1());
    if inverse::is_right_invertible(nu1a, n1a) {
        if nu1a < 0.0 || nu2a < 0.0 {
            return DimPrediction::Infinite;
        }
        let plus = if nu2a == 0.0 { p_dims(n2a, pair.sigma_c()).0 } else { 0 };
        let minus = p_dims(n1a, pair.sigma_d()).1;
        return DimPrediction::Finite(plus + minus);
    }
    match verdict {
        Verdict::TwoSided | Verdict::RightOnly => DimPrediction::Finite(0),
        _ => DimPrediction::Unknown,
    }
}

/// Applies the necessary and sufficient conditions in a fixed decision order
/// and reports the verdict with citations and dimension predictions.
pub fn classify(pair: &MatchingPair) -> ClassificationReport {
    let (nu1, n1) = (pair.nu1(), pair.n1());
    let (nu2, n2) = (pair.nu2(), pair.n2());
    let (sigma_c, sigma_d) = (pair.sigma_c(), pair.sigma_d());
    let mut fired = Vec::new();
    let mut heuristic_hint = None;

    let verdict = 'v: {
        // (1) two-sided via Corollary 6.1
        if nu1 == 0.0 && nu2 == 0.0 && n1 == 0 && n2 == 0 {
            fired.push(rule(
                "Corollary 6.1",
                "W(c) and W(d) invertible: (I - H(c~)) W^{-1}(c) W(a~^{-1}) W^{-1}(d) + H(a^{-1}) W^{-1}(d)",
            ));
            break 'v Verdict::TwoSided;
        }
        // (2) sufficient right conditions
        if let Some(r) = right_sufficient(nu1, n1, nu2, n2, sigma_d) {
            fired.push(r);
            break 'v Verdict::RightOnly;
        }
        // (3) mirrored sufficient left conditions via the adjoint pair
        if let Some(mut r) = right_sufficient(-nu2, -n2, -nu1, -n1, sigma_c) {
            r.id = format!("{} (adjoint)", r.id);
            r.condition = format!("adjoint pair: {}", r.condition);
            fired.push(r);
            break 'v Verdict::LeftOnly;
        }
        // (4) violated necessary conditions
        if nu1 < 0.0 && nu2 > 0.0 {
            fired.push(rule(
                "Theorem 3.1(i)",
                "nu_1 < 0 < nu_2: kernel and cokernel are both nontrivial",
            ));
            break 'v Verdict::NotOneSided;
        }
        if nu1 == 0.0 && nu2 > 0.0 && !(n1 > -1 || (n1 == -1 && sigma_c == -1)) {
            fired.push(rule(
                "Theorem 3.1(ii)",
                "nu_1 = 0, nu_2 > 0 needs n_1 > -1, or n_1 = -1 and sigma(c) = -1",
            ));
            break 'v Verdict::NotOneSided;
        }
        if nu1 < 0.0 && nu2 == 0.0 && !(n2 < 1 || (n2 == 1 && sigma_d == -1)) {
            fired.push(rule(
                "Theorem 3.1(iii)",
                "nu_1 < 0, nu_2 = 0 needs n_2 < 1, or n_2 = 1 and sigma(d) = -1",
            ));
            break 'v Verdict::NotOneSided;
        }
        if nu1 == 0.0 && nu2 == 0.0 {
            let left = left_possible_zero_nu(n1, n2, sigma_c);
            let right = right_possible_zero_nu(n1, n2, sigma_d);
            if let (Err(rl), Err(rr)) = (&left, &right) {
                fired.push(rl.clone());
                fired.push(rr.clone());
                // not one-sided, but a generalized inverse may still exist;
                // record the coverage for cmd_invert --kind generalized
                if inverse::is_right_invertible(nu1, n1)
                    && inverse::is_left_invertible(nu2, n2)
                {
                    fired.push(rule(
                        "Lemma 5.2(iii) / Theorem 5.3",
                        "generalized inverse available: W(c) right-invertible, W(d) left-invertible",
                    ));
                }
                break 'v Verdict::NotOneSided;
            }
            if let Err(r) = left {
                fired.push(r);
            }
            if let Err(r) = right {
                fired.push(r);
            }
        }
        // (5) Lemma 5.2 coverage (the two same-sided cases were classified
        // above, so only the mixed combination fires here)
        let c_right = inverse::is_right_invertible(nu1, n1);
        let d_left = inverse::is_left_invertible(nu2, n2);
        if c_right && d_left {
            fired.push(rule(
                "Lemma 5.2(iii) / Theorem 5.3",
                "W(c) right-invertible, W(d) left-invertible: Eq. 17 operands",
            ));
            break 'v Verdict::Generalized;
        }
        // (6) nu_1 > 0 and nu_2 < 0: open territory
        if nu1 > 0.0 && nu2 < 0.0 {
            fired.push(rule(
                "Theorem 3.2",
                "nu_1 > 0, nu_2 < 0: one-sided invertibility undecided; intersection test applies",
            ));
            heuristic_hint = Some(
                "run check_thm32_heuristic for the necessary left-invertibility condition"
                    .into(),
            );
            break 'v Verdict::Undetermined;
        }
        Verdict::Undetermined
    };

    let ker_dim = ker_prediction(pair, verdict);
    let coker_dim = coker_prediction(pair, verdict);
    ClassificationReport {
        verdict,
        fired_rules: fired,
        ker_dim,
        coker_dim,
        nu1,
        nu2,
        n1,
        n2,
        sigma: sigma_c,
        heuristic_hint,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HeuristicOutcome {
    Plausible,
    Violated,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct HeuristicReport {
    pub outcome: HeuristicOutcome,
    /// Smallest principal angle between phi+(im P+_d) and the subspace of
    /// functions vanishing on (0, nu_1/2), in radians.
    pub min_principal_angle: f64,
    pub subspace_dim: usize,
}

/// Numerical test of the necessary left-invertibility condition for
/// nu_1 > 0, nu_2 < 0, n_1 = n_2 = 0: the intersection of `phi+(im P+_d)`
/// with the functions vanishing on `(0, nu_1/2)` must be trivial. The
/// condition is necessary, not sufficient: `Plausible` must not be read as
/// invertibility.
pub fn check_thm32_heuristic(disc: &Disc, pair: &MatchingPair) -> Result<HeuristicReport> {
    if !(pair.nu1() > 0.0 && pair.nu2() < 0.0 && pair.n1() == 0 && pair.n2() == 0) {
        return Err(Error::Precondition(format!(
            "intersection test needs nu_1 > 0 > nu_2 and n_1 = n_2 = 0; got (nu1={}, n1={}), (nu2={}, n2={})",
            pair.nu1(),
            pair.n1(),
            pair.nu2(),
            pair.n2()
        )));
    }
    let grid = disc.as_grid()?.clone();
    let half = pair.nu1() / 2.0;
    // shifted pair (a e^{-i nu1 t/2}, b e^{i nu1 t/2}), whose subordinated
    // pair is (c e^{-i nu1 t}, d)
    let a1 = pair.a().mul(&crate::symbol::Symbol::exponential(-half))?;
    let b1 = pair.b().mul(&crate::symbol::Symbol::exponential(half))?;
    let shifted = MatchingPair::new(a1, b1)?;
    // numerical kernel of W(d) on the grid
    let w_d = build_w(disc, pair.d())?;
    let dense = w_d.to_dense();
    let dim = dense.nrows();
    let svd = dense.svd(false, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let v_t = svd.v_t.as_ref().expect("svd with right vectors");
    let mut kernel_vecs: Vec<DVector<Complex64>> = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s < 1e-7 * smax {
            kernel_vecs.push(DVector::from_fn(dim, |r, _| v_t[(i, r)].conj()));
        }
    }
    let trivially_plausible = HeuristicReport {
        outcome: HeuristicOutcome::Plausible,
        min_principal_angle: std::f64::consts::FRAC_PI_2,
        subspace_dim: 0,
    };
    if kernel_vecs.is_empty() {
        return Ok(trivially_plausible);
    }
    // project with P+_d = (1/2)(I + H(d~)) and push through phi+
    let h_refl = build_h(disc, &pair.d().reflect())?;
    let idop = DiscreteOperator::identity(disc);
    let p_plus = idop.add(&h_refl)?.scale(Complex64::new(0.5, 0.0));
    let phi = inverse::phi_plus(disc, &shifted)?;
    let mut images: Vec<DVector<Complex64>> = Vec::new();
    for v in &kernel_vecs {
        let pv = p_plus.apply(v)?;
        if grid.norm(pv.as_slice()) > 1e-8 {
            images.push(phi.apply(&pv)?);
        }
    }
    if images.is_empty() {
        return Ok(trivially_plausible);
    }
    // orthonormalize in sqrt(weight) coordinates; principal angles against
    // the coordinate subspace of nodes with t > nu_1/2
    let n = grid.len();
    let mut m = nalgebra::DMatrix::<Complex64>::zeros(n, images.len());
    for (c, img) in images.iter().enumerate() {
        for i in 0..n {
            m[(i, c)] = img[i] * grid.weights()[i].sqrt();
        }
    }
    let qr = m.qr();
    let q = qr.q();
    let r = qr.r();
    let rmax = (0..images.len()).map(|i| r[(i, i)].norm()).fold(0.0f64, f64::max);
    let cols: Vec<usize> = (0..images.len())
        .filter(|&i| r[(i, i)].norm() > 1e-10 * rmax.max(1e-300))
        .collect();
    if cols.is_empty() {
        return Ok(trivially_plausible);
    }
    let rows: Vec<usize> = (0..n).filter(|&i| grid.nodes()[i] > half).collect();
    let mut sub = nalgebra::DMatrix::<Complex64>::zeros(rows.len(), cols.len());
    for (ri, &i) in rows.iter().enumerate() {
        for (ci, &c) in cols.iter().enumerate() {
            sub[(ri, ci)] = q[(i, c)];
        }
    }
    let s = sub.svd(false, false);
    let cos_max = s.singular_values.iter().cloned().fold(0.0f64, f64::max).min(1.0);
    let theta = cos_max.acos();
    let outcome = if theta.sin() <= 1e-6 {
        HeuristicOutcome::Violated
    } else if theta >= 1e-2 {
        HeuristicOutcome::Plausible
    } else {
        HeuristicOutcome::Inconclusive
    };
    Ok(HeuristicReport {
        outcome,
        min_principal_angle: theta,
        subspace_dim: cols.len(),
    })
}
