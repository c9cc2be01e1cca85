//! Text file format for quantum groups.
//!
//! ```json
//! { "name": "c_z2", "dim": 2, "blocks": [1, 1],
//!   "delta": [[["1.0", "0.0"], ["0.0", "0.0"]], ...] }
//! ```
//!
//! `delta` has `dim²` rows (Kronecker-ordered) and `dim` columns. An entry is
//! a number, a decimal string, or a `[re, im]` pair of either. Emission uses
//! shortest round-trip decimal strings, so parse(emit(g)) is bit-exact.

use serde_json::{json, Value};

use crate::algebra::QuantumGroup;
use crate::error::{QgError, Result};
use crate::linalg::{CMat, C64};

fn parse_real(v: &Value, at: &str) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| QgError::Parse(format!("{at}: number out of range"))),
        Value::String(s) => s
            .trim()
            .parse::<f64>()
            .map_err(|_| QgError::Parse(format!("{at}: '{s}' is not a decimal number"))),
        _ => Err(QgError::Parse(format!(
            "{at}: expected a number or decimal string"
        ))),
    }
}

fn parse_complex(v: &Value, at: &str) -> Result<C64> {
    match v {
        Value::Array(pair) if pair.len() == 2 => Ok(C64::new(
            parse_real(&pair[0], &format!("{at}[0]"))?,
            parse_real(&pair[1], &format!("{at}[1]"))?,
        )),
        Value::Array(pair) => Err(QgError::Parse(format!(
            "{at}: complex pair must have 2 entries, found {}",
            pair.len()
        ))),
        other => Ok(C64::new(parse_real(other, at)?, 0.0)),
    }
}

pub fn parse_quantum_group(text: &str) -> Result<QuantumGroup> {
    let root: Value = serde_json::from_str(text).map_err(|e| QgError::Parse(e.to_string()))?;
    let obj = root
        .as_object()
        .ok_or_else(|| QgError::Parse("top level must be an object".into()))?;
    let dim = obj
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| QgError::Parse("field 'dim': expected a positive integer".into()))?
        as usize;
    let blocks: Vec<usize> = obj
        .get("blocks")
        .and_then(Value::as_array)
        .ok_or_else(|| QgError::Parse("field 'blocks': expected an array".into()))?
        .iter()
        .enumerate()
        .map(|(i, b)| {
            b.as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| QgError::Parse(format!("blocks[{i}]: expected a positive integer")))
        })
        .collect::<Result<_>>()?;
    let block_dim: usize = blocks.iter().map(|n| n * n).sum();
    if block_dim != dim {
        return Err(QgError::ShapeMismatch(format!(
            "dim = {dim} but blocks {blocks:?} give {block_dim}"
        )));
    }
    let rows = obj
        .get("delta")
        .and_then(Value::as_array)
        .ok_or_else(|| QgError::Parse("field 'delta': expected an array of rows".into()))?;
    if rows.len() != dim * dim {
        return Err(QgError::ShapeMismatch(format!(
            "delta has {} rows, expected {}",
            rows.len(),
            dim * dim
        )));
    }
    let mut delta = CMat::zeros(dim * dim, dim);
    for (r, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| QgError::Parse(format!("delta[{r}]: expected an array")))?;
        if row.len() != dim {
            return Err(QgError::ShapeMismatch(format!(
                "delta[{r}] has {} entries, expected {dim}",
                row.len()
            )));
        }
        for (col, entry) in row.iter().enumerate() {
            delta[(r, col)] = parse_complex(entry, &format!("delta[{r}][{col}]"))?;
        }
    }
    let name = obj.get("name").and_then(Value::as_str).map(str::to_owned);
    QuantumGroup::new(blocks, delta, name)
}

/// Shortest decimal string that parses back to the same `f64`.
pub fn exact_decimal(x: f64) -> String {
    format!("{x:?}")
}

pub fn emit_quantum_group(g: &QuantumGroup) -> String {
    let d = g.dim();
    // one delta row per line keeps the files diffable
    let mut out = String::from("{\n");
    if let Some(name) = g.name() {
        out.push_str(&format!("  \"name\": {},\n", json!(name)));
    }
    out.push_str(&format!("  \"dim\": {d},\n"));
    out.push_str(&format!("  \"blocks\": {},\n", json!(g.blocks())));
    out.push_str("  \"delta\": [\n");
    for r in 0..d * d {
        let row: Vec<Value> = (0..d)
            .map(|col| {
                let z = g.delta()[(r, col)];
                json!([exact_decimal(z.re), exact_decimal(z.im)])
            })
            .collect();
        let sep = if r + 1 == d * d { "" } else { "," };
        out.push_str(&format!("    {}{sep}\n", Value::Array(row)));
    }
    out.push_str("  ]\n}\n");
    out
}
