//! Interchange encoding: elements as `[a_num, a_den, b_num, b_den]`, fields as `{"d": [num, den]}`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use super::field::{QuadElement, QuadField, Q};
use super::matrix::QuadMatrix;
use super::AlgebraError;

fn int_value(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(x) => json!(x),
        None => Value::String(n.to_string()),
    }
}

fn int_from(v: &Value) -> Result<BigInt, AlgebraError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| AlgebraError::Parse(format!("non-integer {n}"))),
        Value::String(s) => s.parse().map_err(|_| AlgebraError::Parse(format!("bad integer {s:?}"))),
        other => Err(AlgebraError::Parse(format!("expected integer, got {other}"))),
    }
}

pub fn rational_to_json(x: &Q) -> Value {
    json!([int_value(x.numer()), int_value(x.denom())])
}

pub fn rational_from_json(v: &Value) -> Result<Q, AlgebraError> {
    let arr = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| AlgebraError::Parse(format!("expected [num, den], got {v}")))?;
    let den = int_from(&arr[1])?;
    if den.is_zero() {
        return Err(AlgebraError::Parse("zero denominator".into()));
    }
    Ok(Q::new(int_from(&arr[0])?, den))
}

pub fn field_to_json(k: &QuadField) -> Value {
    json!({ "d": rational_to_json(k.d()) })
}

pub fn field_from_json(v: &Value) -> Result<QuadField, AlgebraError> {
    let d = v.get("d").ok_or_else(|| AlgebraError::Parse("missing field header \"d\"".into()))?;
    QuadField::new(rational_from_json(d)?)
}

pub fn element_to_json(x: &QuadElement) -> Value {
    json!([int_value(x.a().numer()), int_value(x.a().denom()), int_value(x.b().numer()), int_value(x.b().denom())])
}

pub fn element_from_json(k: &QuadField, v: &Value) -> Result<QuadElement, AlgebraError> {
    let arr = v.as_array().filter(|a| a.len() == 4).ok_or_else(|| AlgebraError::Parse(format!("expected 4-tuple, got {v}")))?;
    let a = rational_from_json(&json!([arr[0], arr[1]]))?;
    let b = rational_from_json(&json!([arr[2], arr[3]]))?;
    Ok(k.element(a, b))
}

/// Matrix body without the field header.
pub fn matrix_to_json(m: &QuadMatrix) -> Value {
    json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "entries": m.entries().iter().map(element_to_json).collect::<Vec<_>>(),
    })
}

pub fn matrix_from_json(k: &QuadField, v: &Value) -> Result<QuadMatrix, AlgebraError> {
    let get = |key: &str| v.get(key).ok_or_else(|| AlgebraError::Parse(format!("matrix missing \"{key}\"")));
    let rows = get("rows")?.as_u64().ok_or_else(|| AlgebraError::Parse("rows".into()))? as usize;
    let cols = get("cols")?.as_u64().ok_or_else(|| AlgebraError::Parse("cols".into()))? as usize;
    let entries = get("entries")?
        .as_array()
        .ok_or_else(|| AlgebraError::Parse("entries must be an array".into()))?
        .iter()
        .map(|e| element_from_json(k, e))
        .collect::<Result<Vec<_>, _>>()?;
    QuadMatrix::new(k, rows, cols, entries)
}
