//! Matrix and report files, and the canonical JSON writer used for every output.

use std::fmt::Write as _;

use serde_json::{Map, Number, Value};
use thiserror::Error;
use unisim_core::similarity::{SamplePlan, SimilarityReport, Witness};
use unisim_core::{ComplexMatrix, C64};

pub const TOOL_VERSION: &str = concat!("unisim ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Parse(String),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> IoError {
    IoError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

/// Parses a `{"n", "re", "im"}` matrix file.
pub fn parse_matrix(text: &[u8]) -> Result<ComplexMatrix, IoError> {
    let value: Value = serde_json::from_slice(text).map_err(|e| IoError::Parse(e.to_string()))?;
    matrix_from_value(&value, "")
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, prefix: &str) -> Result<&'a Value, IoError> {
    obj.get(key)
        .ok_or_else(|| schema(join(prefix, key), "missing field"))
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, IoError> {
    v.as_object().ok_or_else(|| {
        schema(
            if path.is_empty() { "$" } else { path },
            "expected an object",
        )
    })
}

fn as_f64(v: &Value, path: &str) -> Result<f64, IoError> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(schema(path, "expected a finite number")),
    }
}

fn as_usize(v: &Value, path: &str) -> Result<usize, IoError> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| schema(path, "expected a non-negative integer"))
}

fn grid(v: &Value, n: usize, path: &str) -> Result<Vec<f64>, IoError> {
    let rows = v
        .as_array()
        .ok_or_else(|| schema(path, "expected an array of rows"))?;
    let mut out = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate().take(n) {
        let p = format!("{path}[{i}]");
        let row = row
            .as_array()
            .ok_or_else(|| schema(&p, "expected an array"))?;
        if row.len() != n {
            return Err(schema(
                &p,
                format!("expected {n} entries, found {}", row.len()),
            ));
        }
        for (j, x) in row.iter().enumerate() {
            out.push(as_f64(x, &format!("{p}[{j}]"))?);
        }
    }
    if rows.len() != n {
        return Err(schema(
            path,
            format!("expected {n} rows, found {}", rows.len()),
        ));
    }
    Ok(out)
}

/// Reads a matrix object found at `prefix` inside a larger document.
pub fn matrix_from_value(v: &Value, prefix: &str) -> Result<ComplexMatrix, IoError> {
    let obj = as_object(v, prefix)?;
    let n = as_usize(field(obj, "n", prefix)?, &join(prefix, "n"))?;
    let re = grid(field(obj, "re", prefix)?, n, &join(prefix, "re"))?;
    let im = grid(field(obj, "im", prefix)?, n, &join(prefix, "im"))?;
    let data = re.iter().zip(&im).map(|(&x, &y)| C64::new(x, y)).collect();
    ComplexMatrix::from_row_major(n, n, data).map_err(|e| schema(prefix, e.to_string()))
}

fn float(x: f64) -> Value {
    Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub fn float_value(x: f64) -> Value {
    float(x)
}

/// Matrix file for a square matrix.
pub fn matrix_value(m: &ComplexMatrix) -> Value {
    let n = m.rows();
    let rows = |f: fn(&C64) -> f64| {
        Value::Array(
            (0..n)
                .map(|i| Value::Array((0..m.cols()).map(|j| float(f(&m[(i, j)]))).collect()))
                .collect(),
        )
    };
    let mut obj = Map::new();
    obj.insert("n".into(), Value::from(n));
    obj.insert("re".into(), rows(|z| z.re));
    obj.insert("im".into(), rows(|z| z.im));
    Value::Object(obj)
}

/// Serializes with sorted keys, two-space indentation and every non-integer number
/// printed with 17 significant digits. Arrays of scalars stay on one line.
pub fn to_canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_number(out: &mut String, n: &Number) {
    if let Some(i) = n.as_i64() {
        let _ = write!(out, "{i}");
    } else if let Some(u) = n.as_u64() {
        let _ = write!(out, "{u}");
    } else {
        let x = n.as_f64().unwrap_or(f64::NAN);
        let _ = write!(out, "{x:.16e}");
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat_n("  ", d));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => write_number(out, n),
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings serialize")),
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, x, depth);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, x, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&serde_json::to_string(k).expect("strings serialize"));
                out.push_str(": ");
                write_value(out, &map[*k], depth + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

/// Plain `key: value` rendering of the same document, for `--format text`.
pub fn to_text(v: &Value) -> String {
    let mut out = String::new();
    write_text(&mut out, v, "");
    out
}

fn text_scalar(v: &Value) -> String {
    match v {
        Value::Number(n) => {
            let mut s = String::new();
            write_number(&mut s, n);
            s
        }
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn write_text(out: &mut String, v: &Value, path: &str) {
    match v {
        Value::Object(map) if is_matrix(map) => {
            let _ = writeln!(out, "{path}:");
            let re = map["re"].as_array().cloned().unwrap_or_default();
            let im = map["im"].as_array().cloned().unwrap_or_default();
            for (r, i) in re.iter().zip(&im) {
                let entries: Vec<String> = r
                    .as_array()
                    .into_iter()
                    .flatten()
                    .zip(i.as_array().into_iter().flatten())
                    .map(|(x, y)| {
                        let (x, y) = (x.as_f64().unwrap_or(0.0), y.as_f64().unwrap_or(0.0));
                        format!("{x:+.6e}{y:+.6e}i")
                    })
                    .collect();
                let _ = writeln!(out, "  {}", entries.join("  "));
            }
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            for k in keys {
                write_text(out, &map[k], &join(path, k));
            }
        }
        Value::Array(items) if items.iter().all(is_scalar) => {
            let parts: Vec<String> = items.iter().map(text_scalar).collect();
            let _ = writeln!(out, "{path}: {}", parts.join(" "));
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                write_text(out, x, &format!("{path}[{i}]"));
            }
        }
        scalar => {
            let _ = writeln!(out, "{path}: {}", text_scalar(scalar));
        }
    }
}

fn is_matrix(map: &Map<String, Value>) -> bool {
    map.len() == 3 && map.contains_key("n") && map.contains_key("re") && map.contains_key("im")
}

pub fn plan_value(plan: &SamplePlan) -> Value {
    let mut obj = Map::new();
    obj.insert("n".into(), Value::from(plan.n));
    obj.insert("count".into(), Value::from(plan.count));
    obj.insert("seed".into(), Value::from(plan.seed));
    obj.insert(
        "grid_denominator".into(),
        Value::from(plan.grid_denominator),
    );
    Value::Object(obj)
}

fn plan_from_value(v: &Value, path: &str) -> Result<SamplePlan, IoError> {
    let obj = as_object(v, path)?;
    let get = |k: &str| field(obj, k, path);
    let grid = get("grid_denominator")?
        .as_u64()
        .and_then(|x| u32::try_from(x).ok())
        .ok_or_else(|| schema(join(path, "grid_denominator"), "expected a 32-bit integer"))?;
    Ok(SamplePlan {
        n: as_usize(get("n")?, &join(path, "n"))?,
        count: as_usize(get("count")?, &join(path, "count"))?,
        seed: get("seed")?
            .as_u64()
            .ok_or_else(|| schema(join(path, "seed"), "expected a 64-bit integer"))?,
        grid_denominator: grid,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessFile {
    pub index: usize,
    pub h: ComplexMatrix,
    pub k: ComplexMatrix,
    pub value_a: f64,
    pub value_b: f64,
}

/// On-disk form of a similarity report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportFile {
    pub verdict: String,
    pub unitary: Option<ComplexMatrix>,
    pub witness: Option<WitnessFile>,
    pub max_gap: f64,
    pub commutant_dims: [usize; 2],
    pub plan: SamplePlan,
    pub tool_version: String,
    pub diagnostic: Option<String>,
}

impl ReportFile {
    pub fn from_report(r: &SimilarityReport) -> Self {
        Self {
            verdict: r.verdict.as_str().to_string(),
            unitary: r.unitary.clone(),
            witness: r.witness.as_ref().map(|w: &Witness| WitnessFile {
                index: w.index,
                h: w.h.clone(),
                k: w.k.clone(),
                value_a: w.value_a,
                value_b: w.value_b,
            }),
            max_gap: r.max_invariant_gap,
            commutant_dims: [r.commutant_dims.0, r.commutant_dims.1],
            plan: r.plan,
            tool_version: TOOL_VERSION.to_string(),
            diagnostic: r.diagnostic.clone(),
        }
    }

    pub fn to_value(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("verdict".into(), Value::from(self.verdict.clone()));
        if let Some(u) = &self.unitary {
            obj.insert("unitary".into(), matrix_value(u));
        }
        if let Some(w) = &self.witness {
            let mut wo = Map::new();
            wo.insert("index".into(), Value::from(w.index));
            wo.insert("H".into(), matrix_value(&w.h));
            wo.insert("K".into(), matrix_value(&w.k));
            wo.insert("value_a".into(), float(w.value_a));
            wo.insert("value_b".into(), float(w.value_b));
            obj.insert("witness".into(), Value::Object(wo));
        }
        obj.insert("max_gap".into(), float(self.max_gap));
        obj.insert(
            "commutant_dims".into(),
            Value::from(self.commutant_dims.to_vec()),
        );
        obj.insert("plan".into(), plan_value(&self.plan));
        obj.insert(
            "tool_version".into(),
            Value::from(self.tool_version.clone()),
        );
        if let Some(d) = &self.diagnostic {
            obj.insert("diagnostic".into(), Value::from(d.clone()));
        }
        Value::Object(obj)
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(&self.to_value())
    }

    pub fn parse(text: &[u8]) -> Result<Self, IoError> {
        let value: Value =
            serde_json::from_slice(text).map_err(|e| IoError::Parse(e.to_string()))?;
        Self::from_value(&value)
    }

    pub fn from_value(v: &Value) -> Result<Self, IoError> {
        let obj = as_object(v, "")?;
        let verdict = field(obj, "verdict", "")?
            .as_str()
            .filter(|s| ["similar", "not_similar", "inconclusive"].contains(s))
            .ok_or_else(|| schema("verdict", "expected similar, not_similar or inconclusive"))?
            .to_string();
        let unitary = obj
            .get("unitary")
            .map(|u| matrix_from_value(u, "unitary"))
            .transpose()?;
        let witness = obj
            .get("witness")
            .map(|w| {
                let wo = as_object(w, "witness")?;
                Ok::<_, IoError>(WitnessFile {
                    index: as_usize(field(wo, "index", "witness")?, "witness.index")?,
                    h: matrix_from_value(field(wo, "H", "witness")?, "witness.H")?,
                    k: matrix_from_value(field(wo, "K", "witness")?, "witness.K")?,
                    value_a: as_f64(field(wo, "value_a", "witness")?, "witness.value_a")?,
                    value_b: as_f64(field(wo, "value_b", "witness")?, "witness.value_b")?,
                })
            })
            .transpose()?;
        if witness.is_some() != (verdict == "not_similar") {
            return Err(schema(
                "witness",
                "present exactly when verdict is not_similar",
            ));
        }
        if unitary.is_some() != (verdict == "similar") {
            return Err(schema("unitary", "present exactly when verdict is similar"));
        }
        let dims = field(obj, "commutant_dims", "")?
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| schema("commutant_dims", "expected two integers"))?;
        Ok(Self {
            verdict,
            unitary,
            witness,
            max_gap: as_f64(field(obj, "max_gap", "")?, "max_gap")?,
            commutant_dims: [
                as_usize(&dims[0], "commutant_dims[0]")?,
                as_usize(&dims[1], "commutant_dims[1]")?,
            ],
            plan: plan_from_value(field(obj, "plan", "")?, "plan")?,
            tool_version: field(obj, "tool_version", "")?
                .as_str()
                .ok_or_else(|| schema("tool_version", "expected a string"))?
                .to_string(),
            diagnostic: obj
                .get("diagnostic")
                .map(|d| {
                    d.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| schema("diagnostic", "expected a string"))
                })
                .transpose()?,
        })
    }
}
