//! JSON problem files: `{"n": 3, "A": [[[re, im], ...], ...], "T": ..., "S": ...}`.

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::context::PositiveContext;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub n: usize,
    pub a: ComplexMatrix,
    pub t: ComplexMatrix,
    pub s: Option<ComplexMatrix>,
}

fn parse_error(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn parse_entry(value: &Value, name: &str, row: usize, col: usize) -> Result<Complex64> {
    let pair = value
        .as_array()
        .filter(|p| p.len() == 2)
        .ok_or_else(|| parse_error(format!("{name}[{row}][{col}] must be a [re, im] pair")))?;
    let part = |v: &Value| {
        v.as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| parse_error(format!("{name}[{row}][{col}] must hold two finite numbers")))
    };
    Ok(Complex64::new(part(&pair[0])?, part(&pair[1])?))
}

fn parse_matrix(value: &Value, name: &str, n: usize) -> Result<ComplexMatrix> {
    let rows = value
        .as_array()
        .ok_or_else(|| parse_error(format!("{name} must be an array of rows")))?;
    if rows.len() != n {
        return Err(parse_error(format!("{name} has {} rows, expected {n}", rows.len())));
    }
    let mut m = ComplexMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let entries = row
            .as_array()
            .ok_or_else(|| parse_error(format!("{name}[{i}] must be an array")))?;
        if entries.len() != n {
            return Err(parse_error(format!(
                "{name}[{i}] has {} entries, expected {n}",
                entries.len()
            )));
        }
        for (j, entry) in entries.iter().enumerate() {
            m[(i, j)] = parse_entry(entry, name, i, j)?;
        }
    }
    Ok(m)
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| parse_error(e.to_string()))?;
        let obj = doc
            .as_object()
            .ok_or_else(|| parse_error("top level must be an object"))?;
        let n = obj
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| parse_error("\"n\" must be a positive integer"))? as usize;
        if n == 0 {
            return Err(parse_error("\"n\" must be a positive integer"));
        }
        let field = |key: &str| obj.get(key).ok_or_else(|| parse_error(format!("missing \"{key}\"")));
        let a = parse_matrix(field("A")?, "A", n)?;
        let t = parse_matrix(field("T")?, "T", n)?;
        let s = match obj.get("S") {
            None | Some(Value::Null) => None,
            Some(v) => Some(parse_matrix(v, "S", n)?),
        };
        Ok(ProblemFile { n, a, t, s })
    }

    /// Validated weight; errors when `A` is not Hermitian positive
    /// semidefinite and nonzero.
    pub fn context(&self) -> Result<PositiveContext> {
        PositiveContext::new(&self.a)
    }

    /// Second operator, or an error when the file has none.
    pub fn second(&self) -> Result<&ComplexMatrix> {
        self.s.as_ref().ok_or(Error::MissingOperand)
    }

    pub fn to_json(&self) -> Value {
        let matrix = |m: &ComplexMatrix| {
            Value::Array(
                (0..m.nrows())
                    .map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
                    .collect(),
            )
        };
        let mut obj = Map::new();
        obj.insert("n".into(), json!(self.n));
        obj.insert("A".into(), matrix(&self.a));
        obj.insert("T".into(), matrix(&self.t));
        if let Some(s) = &self.s {
            obj.insert("S".into(), matrix(s));
        }
        Value::Object(obj)
    }

    /// Canonical text: keys in fixed order, shortest round-trip float
    /// formatting, trailing newline. Re-parsing gives bit-identical matrices.
    pub fn canonical(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        text.push('\n');
        text
    }
}
