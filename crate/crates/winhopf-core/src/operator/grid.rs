//! Composite Gauss-Legendre grid on `[0, T]` and the compact Nystrom
//! representation of convolution / Hankel integral operators.
//!
//! Kernel entries depend only on the panel offset and the in-panel node
//! indices, so an N x N operator is stored as O(panels) blocks of 64 values
//! plus one corrected panel per row where the kernel argument changes sign.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::ExpPolyKernel;

/// 8-point Gauss-Legendre abscissas on [-1, 1], ascending.
const GL_X: [f64; 8] = [
    -0.9602898564975363,
    -0.7966664774136267,
    -0.5255324099163290,
    -0.1834346424956498,
    0.1834346424956498,
    0.5255324099163290,
    0.7966664774136267,
    0.9602898564975363,
];

/// Matching Gauss-Legendre weights (sum 2).
const GL_W: [f64; 8] = [
    0.1012285362903763,
    0.2223810344533745,
    0.3137066458778873,
    0.3626837833783620,
    0.3626837833783620,
    0.3137066458778873,
    0.2223810344533745,
    0.1012285362903763,
];

pub const NODES_PER_PANEL: usize = 8;

/// In-panel node offsets on [0, 1], ascending. Symmetric:
/// `offset(q) + offset(7 - q) = 1`, which makes on-grid reflections exact.
pub fn panel_offsets() -> [f64; 8] {
    let mut x = [0.0; 8];
    for q in 0..8 {
        x[q] = 0.5 * (1.0 + GL_X[q]);
    }
    x
}

/// Gauss-Legendre weights for a unit-width panel (sum 1).
pub(crate) fn panel_weights() -> [f64; 8] {
    let mut w = [0.0; 8];
    for q in 0..8 {
        w[q] = 0.5 * GL_W[q];
    }
    w
}

/// Quadrature grid: `panels` Gauss-Legendre panels of equal width on
/// `[0, t_max]`.
#[derive(Debug, Clone)]
pub struct Grid {
    t_max: f64,
    panels: usize,
    h: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    pub fn with_panels(t_max: f64, panels: usize) -> Result<Self> {
        if !(t_max > 0.0) {
            return Err(Error::Schema("grid length must be positive".into()));
        }
        if panels < 2 {
            return Err(Error::Schema("grid needs at least 2 panels (16 nodes)".into()));
        }
        let h = t_max / panels as f64;
        let offs = panel_offsets();
        let pw = panel_weights();
        let mut nodes = Vec::with_capacity(panels * 8);
        let mut weights = Vec::with_capacity(panels * 8);
        for p in 0..panels {
            let a = p as f64 * h;
            for q in 0..8 {
                nodes.push(a + offs[q] * h);
                weights.push(pw[q] * h);
            }
        }
        Ok(Grid { t_max, panels, h, nodes, weights })
    }

    /// Grid with roughly `target_nodes` nodes.
    pub fn new(t_max: f64, target_nodes: usize) -> Result<Self> {
        Grid::with_panels(t_max, (target_nodes / NODES_PER_PANEL).max(2))
    }

    /// Largest grid with at most `target_nodes` nodes on which every shift in
    /// `shifts` is an exact multiple of the panel width.
    pub fn compatible(t_max: f64, target_nodes: usize, shifts: &[f64]) -> Result<Self> {
        let max_panels = (target_nodes / NODES_PER_PANEL).max(2);
        for panels in (2..=max_panels).rev() {
            let ok = shifts.iter().all(|&nu| {
                let k = nu * panels as f64 / t_max;
                (k - k.round()).abs() <= 1e-9 * (1.0 + k.abs())
            });
            if ok {
                return Grid::with_panels(t_max, panels);
            }
        }
        Err(Error::ShiftOffGrid(format!(
            "no panel count up to {max_panels} makes shifts {shifts:?} exact on [0, {t_max}]"
        )))
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Shift expressed in whole panels; `E_SHIFT_OFF_GRID` if `nu` is not an
    /// integer multiple of the panel width.
    pub fn shift_panels(&self, nu: f64) -> Result<i64> {
        let k = nu / self.h;
        if (k - k.round()).abs() > 1e-9 * (1.0 + k.abs()) {
            return Err(Error::ShiftOffGrid(format!(
                "shift {nu} is not a multiple of the panel width {:.6}",
                self.h
            )));
        }
        Ok(k.round() as i64)
    }

    /// Weighted L2 norm of grid samples.
    pub fn norm(&self, v: &[Complex64]) -> f64 {
        v.iter()
            .zip(self.weights.iter())
            .map(|(x, w)| x.norm_sqr() * w)
            .sum::<f64>()
            .sqrt()
    }
}

/// Barycentric weights for the 8 Gauss-Legendre offsets; used to evaluate
/// the in-panel Lagrange basis at correction sub-nodes.
fn barycentric_weights() -> [f64; 8] {
    let x = panel_offsets();
    let mut w = [0.0; 8];
    for j in 0..8 {
        let mut prod = 1.0;
        for k in 0..8 {
            if k != j {
                prod *= x[j] - x[k];
            }
        }
        w[j] = 1.0 / prod;
    }
    w
}

/// Values of all 8 Lagrange basis polynomials at in-panel position `s`
/// (relative coordinate in [0, 1]).
fn lagrange_row(s: f64, offs: &[f64; 8], bary: &[f64; 8]) -> [f64; 8] {
    let mut out = [0.0; 8];
    for j in 0..8 {
        if (s - offs[j]).abs() < 1e-14 {
            out[j] = 1.0;
            return out;
        }
    }
    let mut denom = 0.0;
    let mut terms = [0.0; 8];
    for j in 0..8 {
        terms[j] = bary[j] / (s - offs[j]);
        denom += terms[j];
    }
    for j in 0..8 {
        out[j] = terms[j] / denom;
    }
    out
}

/// Compact Nystrom operator for `int_0^T k(arg(t_i, s)) phi(s) ds` with
/// `arg = t - s - delta` (convolution) or `arg = t + s - delta` (Hankel).
#[derive(Debug, Clone)]
pub struct PanelKernelOp {
    panels: usize,
    hankel: bool,
    /// Kernel values indexed by [panel offset][qi * 8 + qj].
    blocks: Vec<Complex64>,
    /// Per-row corrected panel: (column panel, 8 absolute matrix entries).
    corrections: Vec<Option<(usize, [Complex64; 8])>>,
    /// Quadrature weights of one panel (width already included).
    wq: [f64; 8],
}

impl PanelKernelOp {
    /// Convolution operator with kernel `k(t - s - m h)`.
    pub fn conv(grid: &Grid, kernel: &ExpPolyKernel, shift_m: i64) -> Self {
        Self::build(grid, kernel, shift_m, false)
    }

    /// Hankel integral operator with kernel `k(t + s - m h)`.
    pub fn hankel(grid: &Grid, kernel: &ExpPolyKernel, shift_m: i64) -> Self {
        Self::build(grid, kernel, shift_m, true)
    }

    fn build(grid: &Grid, kernel: &ExpPolyKernel, m: i64, hankel: bool) -> Self {
        let p = grid.panels;
        let h = grid.h;
        let offs = panel_offsets();
        let bary = barycentric_weights();
        let mut wq = [0.0; 8];
        wq.copy_from_slice(&grid.weights[0..8]);

        // kernel value table: slot = pi - pj + (p-1) for convolution,
        // slot = pi + pj for Hankel; both ranges have 2p-1 slots
        let mut blocks = vec![Complex64::new(0.0, 0.0); (2 * p - 1) * 64];
        for slot in 0..(2 * p - 1) {
            let e = if hankel { slot as i64 } else { slot as i64 - (p as i64 - 1) };
            let base = slot * 64;
            for qi in 0..8 {
                for qj in 0..8 {
                    let arg = if hankel {
                        ((e - m) as f64 + offs[qi] + offs[qj]) * h
                    } else {
                        ((e - m) as f64 + offs[qi] - offs[qj]) * h
                    };
                    blocks[base + qi * 8 + qj] =
                        if arg >= 0.0 { kernel.eval_plus(arg) } else { kernel.eval_minus(arg) };
                }
            }
        }

        // per-row correction where the kernel argument changes sign inside a
        // panel: replace the 8 naive entries by exact split quadrature of
        // kernel times the in-panel Lagrange basis
        let n = grid.len();
        let mut corrections: Vec<Option<(usize, [Complex64; 8])>> = vec![None; n];
        for i in 0..n {
            let pi = (i / 8) as i64;
            let t_i = grid.nodes[i];
            // column panel containing the sign change of the argument
            let pb = if hankel { m - 1 - pi } else { pi - m };
            if pb < 0 || pb >= p as i64 {
                continue;
            }
            let pb = pb as usize;
            let a = pb as f64 * h;
            let b = a + h;
            let s_star = if hankel { m as f64 * h - t_i } else { t_i - m as f64 * h };
            debug_assert!(s_star > a && s_star < b);
            let mut entries = [Complex64::new(0.0, 0.0); 8];
            // left sub-interval [a, s*], then right [s*, b]
            for (lo, hi, plus_side) in [
                (a, s_star, !hankel), // conv: s < s* means arg > 0
                (s_star, b, hankel),
            ] {
                let len = hi - lo;
                if len <= 0.0 {
                    continue;
                }
                for q in 0..8 {
                    let s = lo + offs[q] * len;
                    let w = wq[q] / h * len; // GL weight scaled to sub-interval
                    let arg = if hankel { t_i + s - m as f64 * h } else { t_i - s - m as f64 * h };
                    let kv = if plus_side { kernel.eval_plus(arg) } else { kernel.eval_minus(arg) };
                    let lag = lagrange_row((s - a) / h, &offs, &bary);
                    for j in 0..8 {
                        entries[j] += kv * lag[j] * w;
                    }
                }
            }
            corrections[i] = Some((pb, entries));
        }

        PanelKernelOp { panels: p, hankel, blocks, corrections, wq }
    }

    pub fn dim(&self) -> usize {
        self.panels * 8
    }

    #[inline]
    fn slot(&self, pi: usize, pj: usize) -> usize {
        if self.hankel {
            pi + pj
        } else {
            (pi as i64 - pj as i64 + self.panels as i64 - 1) as usize
        }
    }

    /// y = A v
    pub fn apply(&self, v: &[Complex64], y: &mut [Complex64]) {
        let p = self.panels;
        for i in 0..self.dim() {
            let pi = i / 8;
            let qi = i % 8;
            let mut acc = Complex64::new(0.0, 0.0);
            for pj in 0..p {
                let base = self.slot(pi, pj) * 64 + qi * 8;
                let row = &self.blocks[base..base + 8];
                let vv = &v[pj * 8..pj * 8 + 8];
                for qj in 0..8 {
                    acc += row[qj] * self.wq[qj] * vv[qj];
                }
            }
            if let Some((pb, entries)) = &self.corrections[i] {
                let base = self.slot(pi, *pb) * 64 + qi * 8;
                let row = &self.blocks[base..base + 8];
                let vv = &v[pb * 8..pb * 8 + 8];
                for qj in 0..8 {
                    acc += (entries[qj] - row[qj] * self.wq[qj]) * vv[qj];
                }
            }
            y[i] = acc;
        }
    }

    /// Matrix entry (i, j), corrections included.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        let (pi, qi) = (i / 8, i % 8);
        let (pj, qj) = (j / 8, j % 8);
        if let Some((pb, entries)) = &self.corrections[i] {
            if *pb == pj {
                return entries[qj];
            }
        }
        self.blocks[self.slot(pi, pj) * 64 + qi * 8 + qj] * self.wq[qj]
    }

    /// y = A^H v (plain conjugate transpose).
    pub fn apply_adjoint(&self, v: &[Complex64], y: &mut [Complex64]) {
        for x in y.iter_mut() {
            *x = Complex64::new(0.0, 0.0);
        }
        for i in 0..self.dim() {
            let vi = v[i];
            if vi.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..self.dim() {
                y[j] += self.entry(i, j).conj() * vi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::Rational;
    use num_complex::Complex64;

    #[test]
    fn grid_weights_sum_to_length() {
        let g = Grid::with_panels(40.0, 16).unwrap();
        let total: f64 = g.weights().iter().sum();
        assert!((total - 40.0).abs() < 1e-12);
        assert_eq!(g.len(), 128);
    }

    #[test]
    fn shift_panels_detects_off_grid() {
        let g = Grid::with_panels(40.0, 240).unwrap(); // h = 1/6
        assert_eq!(g.shift_panels(1.0).unwrap(), 6);
        assert_eq!(g.shift_panels(-2.0).unwrap(), -12);
        assert!(g.shift_panels(0.1).is_err());
    }

    #[test]
    fn compatible_grid_finds_panel_count() {
        let g = Grid::compatible(40.0, 2048, &[1.0, -2.0, 0.5]).unwrap();
        assert!(g.len() <= 2048);
        assert!(g.shift_panels(0.5).is_ok());
    }

    /// Nystrom convolution against the closed-form action of the causal
    /// kernel e^{-x} on phi(s) = e^{-s}: int_0^t e^{-(t-s)} e^{-s} ds = t e^{-t}.
    #[test]
    fn conv_matches_closed_form_integral() {
        let grid = Grid::with_panels(40.0, 64).unwrap();
        let r = Rational::from_zpk(
            vec![],
            vec![Complex64::new(0.0, -1.0)],
            Complex64::new(0.0, 1.0),
        )
        .unwrap(); // 1/(1 - i xi)
        let kernel = ExpPolyKernel::from_rational(&r).unwrap();
        let op = PanelKernelOp::conv(&grid, &kernel, 0);
        let v: Vec<Complex64> = grid
            .nodes()
            .iter()
            .map(|&t| Complex64::new((-t).exp(), 0.0))
            .collect();
        let mut y = vec![Complex64::new(0.0, 0.0); grid.len()];
        op.apply(&v, &mut y);
        for (i, &t) in grid.nodes().iter().enumerate() {
            let expect = t * (-t).exp();
            assert!(
                (y[i].re - expect).abs() < 1e-10 && y[i].im.abs() < 1e-12,
                "t = {t}: got {}, expected {expect}",
                y[i].re
            );
        }
    }

    /// Rank-one Hankel: kernel e^{-(t+s)} gives w w^T structure.
    #[test]
    fn hankel_matches_direct_quadrature() {
        let grid = Grid::with_panels(30.0, 48).unwrap();
        let r = Rational::from_zpk(
            vec![],
            vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)],
            Complex64::new(2.0, 0.0),
        )
        .unwrap(); // 2/(1 + xi^2), kernel e^{-|x|}
        let kernel = ExpPolyKernel::from_rational(&r).unwrap();
        let op = PanelKernelOp::hankel(&grid, &kernel, 0);
        let v: Vec<Complex64> = grid
            .nodes()
            .iter()
            .map(|&t| Complex64::new((ry(t)).exp(), 0.0))
            .collect();
        fn ry(t: f64) -> f64 {
            -0.5 * t
        }
        let mut y = vec![Complex64::new(0.0, 0.0); grid.len()];
        op.apply(&v, &mut y);
        // int_0^inf e^{-(t+s)} e^{-s/2} ds = e^{-t} * (2/3)
        for (i, &t) in grid.nodes().iter().enumerate() {
            let expect = (-t).exp() * (2.0 / 3.0);
            assert!(
                (y[i].re - expect).abs() < 1e-9,
                "t = {t}: got {}, expected {expect}",
                y[i].re
            );
        }
    }

    #[test]
    fn entry_agrees_with_apply() {
        let grid = Grid::with_panels(10.0, 8).unwrap();
        let r = Rational::from_zpk(
            vec![],
            vec![Complex64::new(0.5, -1.0), Complex64::new(-0.3, 1.5)],
            Complex64::new(1.0, 0.5),
        )
        .unwrap();
        let kernel = ExpPolyKernel::from_rational(&r).unwrap();
        for op in [
            PanelKernelOp::conv(&grid, &kernel, 2),
            PanelKernelOp::hankel(&grid, &kernel, 3),
        ] {
            let n = op.dim();
            for j in [0usize, 5, 17, n - 1] {
                let mut e = vec![Complex64::new(0.0, 0.0); n];
                e[j] = Complex64::new(1.0, 0.0);
                let mut y = vec![Complex64::new(0.0, 0.0); n];
                op.apply(&e, &mut y);
                for i in 0..n {
                    assert!(
                        (y[i] - op.entry(i, j)).norm() < 1e-13,
                        "entry mismatch at ({i}, {j})"
                    );
                }
            }
        }
    }
}
