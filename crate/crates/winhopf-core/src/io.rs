//! File formats: symbol/pair/factorization JSON schemas and the binary
//! matrix export with its JSON sidecar.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::factor::Factorization;
use crate::operator::DiscreteOperator;
use crate::symbol::{MatchingPair, Rational, Symbol};

pub const MATRIX_MAGIC: &[u8; 8] = b"WHOPMTX1";

fn c64(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

fn pair_re_im(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

/// Accepted symbol schemas: coefficients (ascending) or zeros/poles/gain.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SymbolInput {
    Zpk {
        #[serde(default)]
        delta: f64,
        zeros: Vec<[f64; 2]>,
        poles: Vec<[f64; 2]>,
        gain: [f64; 2],
    },
    Coeffs {
        #[serde(default)]
        delta: f64,
        num: Vec<[f64; 2]>,
        den: Vec<[f64; 2]>,
    },
}

pub fn symbol_from_value(v: &serde_json::Value) -> Result<Symbol> {
    let input: SymbolInput = serde_json::from_value(v.clone())
        .map_err(|e| Error::Schema(format!("symbol schema: {e}")))?;
    match input {
        SymbolInput::Zpk { delta, zeros, poles, gain } => {
            let rat = Rational::from_zpk(
                zeros.into_iter().map(c64).collect(),
                poles.into_iter().map(c64).collect(),
                c64(gain),
            )?;
            Symbol::new(delta, rat)
        }
        SymbolInput::Coeffs { delta, num, den } => {
            let rat = Rational::from_coeffs(
                crate::poly::ComplexPoly::new(num.into_iter().map(c64).collect()),
                crate::poly::ComplexPoly::new(den.into_iter().map(c64).collect()),
            )?;
            Symbol::new(delta, rat)
        }
    }
}

/// Canonical output form: zeros/poles/gain.
pub fn symbol_to_value(g: &Symbol) -> serde_json::Value {
    let r = g.rational();
    json!({
        "delta": g.delta(),
        "zeros": r.zeros().iter().map(|&z| pair_re_im(z)).collect::<Vec<_>>(),
        "poles": r.poles().iter().map(|&p| pair_re_im(p)).collect::<Vec<_>>(),
        "gain": pair_re_im(r.gain()),
    })
}

pub fn symbol_from_str(s: &str) -> Result<Symbol> {
    let v: serde_json::Value =
        serde_json::from_str(s).map_err(|e| Error::Schema(format!("symbol json: {e}")))?;
    symbol_from_value(&v)
}

/// Pair files: `{"a": <symbol>, "b": <symbol>}`.
pub fn pair_from_str(s: &str) -> Result<MatchingPair> {
    let v: serde_json::Value =
        serde_json::from_str(s).map_err(|e| Error::Schema(format!("pair json: {e}")))?;
    let a = v
        .get("a")
        .ok_or_else(|| Error::Schema("pair file needs field 'a'".into()))?;
    let b = v
        .get("b")
        .ok_or_else(|| Error::Schema("pair file needs field 'b'".into()))?;
    MatchingPair::new(symbol_from_value(a)?, symbol_from_value(b)?)
}

pub fn pair_to_value(pair: &MatchingPair) -> serde_json::Value {
    json!({
        "a": symbol_to_value(pair.a()),
        "b": symbol_to_value(pair.b()),
        "c": symbol_to_value(pair.c()),
        "d": symbol_to_value(pair.d()),
        "nu1": pair.nu1(),
        "nu2": pair.nu2(),
        "n1": pair.n1(),
        "n2": pair.n2(),
        "sigma": pair.sigma_c(),
    })
}

pub fn factorization_to_value(f: &Factorization) -> serde_json::Value {
    json!({
        "g_minus": symbol_to_value(&f.g_minus),
        "nu": f.nu,
        "n": f.n,
        "sigma": f.sigma,
        "g_plus": symbol_to_value(&f.g_plus),
    })
}

/// Rebuilds the symbol `g_- e^{i nu t} zeta^n g_+` from factorization JSON;
/// used by the round-trip contract of `factor`.
pub fn factorization_product_from_value(v: &serde_json::Value) -> Result<Symbol> {
    let g_minus = symbol_from_value(
        v.get("g_minus")
            .ok_or_else(|| Error::Schema("missing g_minus".into()))?,
    )?;
    let g_plus = symbol_from_value(
        v.get("g_plus")
            .ok_or_else(|| Error::Schema("missing g_plus".into()))?,
    )?;
    let nu = v
        .get("nu")
        .and_then(|x| x.as_f64())
        .ok_or_else(|| Error::Schema("missing nu".into()))?;
    let n = v
        .get("n")
        .and_then(|x| x.as_i64())
        .ok_or_else(|| Error::Schema("missing n".into()))? as i32;
    g_minus
        .mul(&Symbol::exponential(nu))?
        .mul(&Symbol::zeta_pow(n))?
        .mul(&g_plus)
}

/// Right-hand-side files: named families (`psi0`, `gauss:center,width`) or a
/// CSV of `t,value_re,value_im` rows sampled at the grid nodes (matched by
/// nearest node within half a panel).
pub fn rhs_from_spec(
    spec: &str,
    disc: &crate::operator::Disc,
) -> Result<nalgebra::DVector<Complex64>> {
    if spec == "psi0" {
        return Ok(crate::inverse::psi_vector(disc, 0));
    }
    if let Some(rest) = spec.strip_prefix("gauss:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 2 {
            return Err(Error::Schema("gauss spec is gauss:center,width".into()));
        }
        let center: f64 = parts[0]
            .parse()
            .map_err(|_| Error::Schema("bad gauss center".into()))?;
        let width: f64 = parts[1]
            .parse()
            .map_err(|_| Error::Schema("bad gauss width".into()))?;
        return match disc {
            crate::operator::Disc::Grid(g) => Ok(nalgebra::DVector::from_iterator(
                g.len(),
                g.nodes()
                    .iter()
                    .map(|&t| Complex64::new((-((t - center) / width).powi(2)).exp(), 0.0)),
            )),
            crate::operator::Disc::Laguerre(_) => Err(Error::BackendUnsupported(
                "gauss rhs needs the grid backend".into(),
            )),
        };
    }
    Err(Error::Schema(format!(
        "unknown rhs family '{spec}'; use psi0, gauss:center,width, or a CSV path"
    )))
}

pub fn rhs_from_csv(
    content: &str,
    disc: &crate::operator::Disc,
) -> Result<nalgebra::DVector<Complex64>> {
    let grid = disc.as_grid()?;
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut seen = vec![false; grid.len()];
    for (lineno, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("t,") {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() < 3 {
            return Err(Error::Schema(format!(
                "rhs csv line {}: need t,value_re,value_im",
                lineno + 1
            )));
        }
        let t: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| Error::Schema(format!("rhs csv line {}: bad t", lineno + 1)))?;
        let re: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| Error::Schema(format!("rhs csv line {}: bad re", lineno + 1)))?;
        let im: f64 = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::Schema(format!("rhs csv line {}: bad im", lineno + 1)))?;
        // nearest node
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, &node) in grid.nodes().iter().enumerate() {
            let d = (node - t).abs();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        if best_d > grid.h() {
            return Err(Error::Schema(format!(
                "rhs csv line {}: t = {t} is not near any grid node",
                lineno + 1
            )));
        }
        values[best] = Complex64::new(re, im);
        seen[best] = true;
    }
    if !seen.iter().any(|&s| s) {
        return Err(Error::Schema("rhs csv contained no usable samples".into()));
    }
    Ok(nalgebra::DVector::from_vec(values))
}

/// Binary matrix export: 8-byte magic then row-major complex128; dimensions
/// and provenance live in the JSON sidecar next to it.
pub fn write_matrix_binary(path: &Path, op: &DiscreteOperator) -> Result<()> {
    let m = op.to_dense();
    let mut f = std::fs::File::create(path).map_err(|e| Error::Io(e.to_string()))?;
    f.write_all(MATRIX_MAGIC).map_err(|e| Error::Io(e.to_string()))?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let c = m[(i, j)];
            f.write_all(&c.re.to_le_bytes())
                .and_then(|_| f.write_all(&c.im.to_le_bytes()))
                .map_err(|e| Error::Io(e.to_string()))?;
        }
    }
    let sidecar = json!({
        "rows": m.nrows(),
        "cols": m.ncols(),
        "backend": op.backend().to_string(),
        "recipe": op.recipe(),
        "format": "row-major complex128 after 8-byte magic WHOPMTX1",
    });
    let side_path = path.with_extension("json");
    std::fs::write(&side_path, serde_json::to_string_pretty(&sidecar).unwrap())
        .map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

pub fn read_matrix_binary(path: &Path) -> Result<DMatrix<Complex64>> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io(e.to_string()))?;
    if bytes.len() < 8 || &bytes[0..8] != MATRIX_MAGIC {
        return Err(Error::Schema("bad matrix magic".into()));
    }
    let side = std::fs::read_to_string(path.with_extension("json"))
        .map_err(|e| Error::Io(format!("missing sidecar: {e}")))?;
    let sidecar: serde_json::Value =
        serde_json::from_str(&side).map_err(|e| Error::Schema(e.to_string()))?;
    let rows = sidecar["rows"].as_u64().ok_or_else(|| Error::Schema("sidecar rows".into()))?
        as usize;
    let cols = sidecar["cols"].as_u64().ok_or_else(|| Error::Schema("sidecar cols".into()))?
        as usize;
    let need = 8 + rows * cols * 16;
    if bytes.len() != need {
        return Err(Error::Schema(format!(
            "matrix payload is {} bytes, expected {need}",
            bytes.len()
        )));
    }
    let mut m = DMatrix::zeros(rows, cols);
    let mut off = 8;
    for i in 0..rows {
        for j in 0..cols {
            let re = f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
            let im = f64::from_le_bytes(bytes[off + 8..off + 16].try_into().unwrap());
            m[(i, j)] = Complex64::new(re, im);
            off += 16;
        }
    }
    Ok(m)
}

pub fn write_matrix_csv(path: &Path, op: &DiscreteOperator) -> Result<()> {
    let m = op.to_dense();
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{:.17e}{:+.17e}i", m[(i, j)].re, m[(i, j)].im))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::Io(e.to_string()))
}

/// Serializable inverse-recipe summary with its residual table.
#[derive(Debug, Serialize)]
pub struct RecipeReport {
    pub kind: String,
    pub formula: String,
    pub recipe: String,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}
