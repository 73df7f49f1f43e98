//! JSON encoding of instances and signals.
//!
//! An instance document has the keys `field`, `p`, `n`, `seed`, `a`, `b` and
//! optionally `x_true` and `eps`. `a` is a list of `n` rows of `p` scalars.
//! Real scalars are JSON numbers, complex scalars are `[re, im]` pairs. Floats
//! are written in shortest round-trip form, so decoding recovers every bit.

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::error::{ParseError, Result};
use crate::model::{AnyEnsemble, AnySignal, MeasurementEnsemble, Signal};
use crate::scalar::{FieldTag, Scalar};

/// Scalars that know their JSON representation.
pub trait JsonScalar: Scalar {
    fn to_json(self) -> Value;
    fn from_json(v: &Value) -> Option<Self>;
}

impl JsonScalar for f64 {
    fn to_json(self) -> Value {
        json!(self)
    }
    fn from_json(v: &Value) -> Option<Self> {
        v.as_f64()
    }
}

impl JsonScalar for Complex64 {
    fn to_json(self) -> Value {
        json!([self.re, self.im])
    }
    fn from_json(v: &Value) -> Option<Self> {
        match v.as_array()?.as_slice() {
            [re, im] => Some(Complex64::new(re.as_f64()?, im.as_f64()?)),
            _ => None,
        }
    }
}

pub fn scalars_to_json<T: JsonScalar>(xs: &[T]) -> Value {
    Value::Array(xs.iter().map(|&x| x.to_json()).collect())
}

fn scalars_from_json<T: JsonScalar>(v: &Value, key: &'static str) -> Result<Vec<T>, ParseError> {
    let arr = v.as_array().ok_or_else(|| ParseError::InvalidField {
        key,
        reason: "expected an array".into(),
    })?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| {
            T::from_json(x).ok_or_else(|| ParseError::InvalidField {
                key,
                reason: format!("entry {i} is not a valid {} scalar", T::FIELD),
            })
        })
        .collect()
}

fn reals_from_json(v: &Value, key: &'static str) -> Result<Vec<f64>, ParseError> {
    scalars_from_json::<f64>(v, key)
}

fn get<'a>(obj: &'a Map<String, Value>, key: &'static str) -> Result<&'a Value, ParseError> {
    obj.get(key).ok_or(ParseError::MissingField(key))
}

fn get_usize(obj: &Map<String, Value>, key: &'static str) -> Result<usize, ParseError> {
    get(obj, key)?
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| ParseError::InvalidField {
            key,
            reason: "expected a nonnegative integer".into(),
        })
}

/// Serializes an instance to its JSON document. The output is a pure function
/// of the ensemble, so equal ensembles produce identical bytes.
pub fn serialize_instance<T: JsonScalar>(e: &MeasurementEnsemble<T>) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str(&format!("  \"field\": \"{}\",\n", T::FIELD));
    out.push_str(&format!("  \"p\": {},\n", e.p()));
    out.push_str(&format!("  \"n\": {},\n", e.n()));
    out.push_str(&format!("  \"seed\": {},\n", e.seed()));
    out.push_str("  \"a\": [\n");
    for (i, row) in e.rows().enumerate() {
        out.push_str("    ");
        out.push_str(&scalars_to_json(row).to_string());
        out.push_str(if i + 1 < e.n() { ",\n" } else { "\n" });
    }
    out.push_str("  ],\n");
    out.push_str(&format!(
        "  \"b\": {}",
        scalars_to_json(e.observations())
    ));
    if let Some(x) = e.ground_truth() {
        out.push_str(&format!(",\n  \"x_true\": {}", scalars_to_json(x.as_slice())));
    }
    if let Some(eps) = e.noise_record() {
        out.push_str(&format!(",\n  \"eps\": {}", scalars_to_json(eps)));
    }
    out.push_str("\n}\n");
    out
}

pub fn serialize_any(e: &AnyEnsemble) -> String {
    match e {
        AnyEnsemble::Real(e) => serialize_instance(e),
        AnyEnsemble::Complex(e) => serialize_instance(e),
    }
}

fn decode_typed<T: JsonScalar>(
    obj: &Map<String, Value>,
    p: usize,
    n: usize,
    seed: u64,
) -> Result<MeasurementEnsemble<T>> {
    let rows = get(obj, "a")?
        .as_array()
        .ok_or_else(|| ParseError::InvalidField {
            key: "a",
            reason: "expected an array of rows".into(),
        })?;
    if rows.len() != n {
        return Err(ParseError::InvalidField {
            key: "a",
            reason: format!("has {} rows, expected n = {n}", rows.len()),
        }
        .into());
    }
    let mut sampling = Vec::with_capacity(n * p);
    for (i, row) in rows.iter().enumerate() {
        let row: Vec<T> = scalars_from_json(row, "a")?;
        if row.len() != p {
            return Err(ParseError::InvalidField {
                key: "a",
                reason: format!("row {i} has {} entries, expected p = {p}", row.len()),
            }
            .into());
        }
        sampling.extend(row);
    }
    let b = reals_from_json(get(obj, "b")?, "b")?;
    if b.len() != n {
        return Err(ParseError::InvalidField {
            key: "b",
            reason: format!("has {} entries, expected n = {n}", b.len()),
        }
        .into());
    }
    let x_true = match obj.get("x_true") {
        None | Some(Value::Null) => None,
        Some(v) => {
            let x: Vec<T> = scalars_from_json(v, "x_true")?;
            if x.len() != p {
                return Err(ParseError::InvalidField {
                    key: "x_true",
                    reason: format!("has {} entries, expected p = {p}", x.len()),
                }
                .into());
            }
            Some(Signal::new(x)?)
        }
    };
    let eps = match obj.get("eps") {
        None | Some(Value::Null) => None,
        Some(v) => Some(reals_from_json(v, "eps")?),
    };
    MeasurementEnsemble::new(p, sampling, b, x_true, eps, seed)
}

/// Parses an instance document.
pub fn deserialize_instance(doc: &str) -> Result<AnyEnsemble> {
    let value: Value =
        serde_json::from_str(doc).map_err(|e| ParseError::Syntax(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| ParseError::Syntax("top level must be an object".into()))?;
    let p = get_usize(obj, "p")?;
    let n = get_usize(obj, "n")?;
    let field: FieldTag = get(obj, "field")?
        .as_str()
        .ok_or_else(|| ParseError::InvalidField {
            key: "field",
            reason: "expected \"real\" or \"complex\"".into(),
        })?
        .parse()
        .map_err(|reason| ParseError::InvalidField { key: "field", reason })?;
    let seed = get(obj, "seed")?
        .as_u64()
        .ok_or_else(|| ParseError::InvalidField {
            key: "seed",
            reason: "expected a 64-bit unsigned integer".into(),
        })?;
    Ok(match field {
        FieldTag::Real => AnyEnsemble::Real(decode_typed(obj, p, n, seed)?),
        FieldTag::Complex => AnyEnsemble::Complex(decode_typed(obj, p, n, seed)?),
    })
}

pub fn signal_to_json(x: &AnySignal) -> Value {
    match x {
        AnySignal::Real(x) => scalars_to_json(x.as_slice()),
        AnySignal::Complex(x) => scalars_to_json(x.as_slice()),
    }
}

/// Decodes a signal of the given field from a JSON array.
pub fn signal_from_json(v: &Value, field: FieldTag, key: &'static str) -> Result<AnySignal> {
    Ok(match field {
        FieldTag::Real => AnySignal::Real(Signal::new(scalars_from_json(v, key)?)?),
        FieldTag::Complex => AnySignal::Complex(Signal::new(scalars_from_json(v, key)?)?),
    })
}
