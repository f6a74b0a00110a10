//! External formats: line-oriented and JSON basis I/O, structured trace and
//! outcome documents. All integers are emitted as plain JSON numbers at full
//! precision (the crate enables `serde_json`'s arbitrary-precision numbers).

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::lattice::{Basis, IntVector, ReductionTrace};
use crate::recovery::RecoveryOutcome;

/// Version tag carried by every emitted JSON document.
pub const SCHEMA_VERSION: u64 = 1;

pub fn bigint_to_json(i: &BigInt) -> Value {
    serde_json::from_str(&i.to_string()).expect("decimal integer is valid JSON")
}

pub fn json_to_bigint(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => BigInt::from_str(&n.to_string())
            .map_err(|_| Error::InvalidParameter(format!("not an integer: {n}"))),
        other => Err(Error::InvalidParameter(format!(
            "expected an integer, got {other}"
        ))),
    }
}

pub fn vector_to_json(v: &IntVector) -> Value {
    Value::Array(v.entries().iter().map(bigint_to_json).collect())
}

pub fn vector_from_json(v: &Value) -> Result<IntVector> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::InvalidParameter(format!("expected an array, got {v}")))?;
    let entries = arr.iter().map(json_to_bigint).collect::<Result<Vec<_>>>()?;
    Ok(IntVector::new(entries))
}

/// `{"u": [...], "v": [...]}`.
pub fn basis_to_json(b: &Basis) -> Value {
    json!({ "u": vector_to_json(b.u()), "v": vector_to_json(b.v()) })
}

pub fn basis_from_json(v: &Value) -> Result<Basis> {
    let get = |key: &str| {
        v.get(key)
            .ok_or_else(|| Error::InvalidParameter(format!("basis document missing \"{key}\"")))
    };
    Basis::new(vector_from_json(get("u")?)?, vector_from_json(get("v")?)?)
}

/// Two lines of integers, one generator per line; blank lines and `#`
/// comments are skipped. Entries split on whitespace or commas.
pub fn basis_from_text(text: &str) -> Result<Basis> {
    let mut rows: Vec<IntVector> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let entries = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|tok| !tok.is_empty())
            .map(|tok| {
                BigInt::from_str(tok)
                    .map_err(|_| Error::InvalidParameter(format!("bad integer: {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(IntVector::new(entries));
    }
    if rows.len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "basis text needs exactly 2 vector lines, found {}",
            rows.len()
        )));
    }
    let v = rows.pop().expect("two rows");
    let u = rows.pop().expect("two rows");
    Basis::new(u, v)
}

pub fn basis_to_text(b: &Basis) -> String {
    let row = |v: &IntVector| {
        v.entries()
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    format!("{}\n{}\n", row(b.u()), row(b.v()))
}

/// Auto-detect JSON versus line-oriented basis input.
pub fn basis_from_str(text: &str) -> Result<Basis> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let value: Value = serde_json::from_str(trimmed)
            .map_err(|e| Error::InvalidParameter(format!("bad basis JSON: {e}")))?;
        basis_from_json(&value)
    } else {
        basis_from_text(text)
    }
}

pub fn trace_to_json(t: &ReductionTrace) -> Value {
    json!({
        "iterations": t.iterations,
        "swaps": t.swaps,
        "initial_m_squared": bigint_to_json(&t.initial_m_squared),
        "t_squared": t.t_squared.to_string(),
        "per_iteration_norms": t
            .per_iteration_norms
            .iter()
            .map(|(u, v)| Value::Array(vec![bigint_to_json(u), bigint_to_json(v)]))
            .collect::<Vec<_>>(),
    })
}

pub fn outcome_to_json(o: &RecoveryOutcome) -> Value {
    let opt_int = |v: &Option<BigInt>| v.as_ref().map_or(Value::Null, bigint_to_json);
    let mut doc = Map::new();
    doc.insert("k".into(), opt_int(&o.k));
    doc.insert("l".into(), opt_int(&o.l));
    doc.insert("r_hat".into(), opt_int(&o.r_hat));
    doc.insert(
        "status".into(),
        serde_json::to_value(o.status).expect("status serializes"),
    );
    doc.insert(
        "shortest_vector".into(),
        o.shortest_vector
            .as_ref()
            .map_or(Value::Null, vector_to_json),
    );
    doc.insert("iterations".into(), json!(o.iterations));
    if let Some(detail) = &o.detail {
        doc.insert("detail".into(), json!(detail));
    }
    Value::Object(doc)
}

/// Sample batch document: `{"N": int, "samples": [ints], "truth": [...]}`.
/// The truth list is omitted entirely when no sample carries diagnostics;
/// junk entries inside a mixed batch serialize as null.
pub fn sample_batch_to_json(n: &BigInt, samples: &[crate::sampler::Sample]) -> Value {
    let mut doc = Map::new();
    doc.insert("N".into(), bigint_to_json(n));
    doc.insert(
        "samples".into(),
        Value::Array(samples.iter().map(|s| bigint_to_json(&s.x)).collect()),
    );
    if samples.iter().any(|s| s.truth.is_some()) {
        let truth: Vec<Value> = samples
            .iter()
            .map(|s| {
                s.truth.as_ref().map_or(Value::Null, |t| {
                    json!({
                        "k": bigint_to_json(&t.k),
                        "rounding": match t.rounding {
                            crate::sampler::Rounding::Floor => "floor",
                            crate::sampler::Rounding::Ceil => "ceil",
                        },
                        "deviation": t.deviation.to_string(),
                    })
                })
            })
            .collect();
        doc.insert("truth".into(), Value::Array(truth));
    }
    Value::Object(doc)
}

/// Parse `"p/q"` or a bare integer into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::InvalidParameter(format!("bad rational: {text:?}"));
    match text.split_once('/') {
        Some((num, den)) => {
            let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
            let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
            if den == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(num, den))
        }
        None => {
            let num = BigInt::from_str(text.trim()).map_err(|_| bad())?;
            Ok(BigRational::new(num, BigInt::one()))
        }
    }
}

/// Wrap a document with the schema version and command name.
pub fn envelope(command: &str, mut body: Map<String, Value>) -> Value {
    let mut doc = Map::new();
    doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
    doc.insert("command".into(), json!(command));
    doc.append(&mut body);
    Value::Object(doc)
}
