//! JSON encodings: string rationals, field descriptors and elements, Gram
//! matrices and form files, invariant profiles. No floating point anywhere.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::localinv::InvariantProfile;
use crate::matrix::Matrix;
use crate::quadform::QuadraticForm;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::tower::{FieldDescriptor, FieldElement};

pub fn rational_to_json(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from_integer(i.into()))
            } else {
                Err(Error::parse("numeric literals must be integers; use strings for fractions"))
            }
        }
        _ => Err(Error::parse(format!("expected rational, got {v}"))),
    }
}

pub fn field_descriptor_to_json(d: &FieldDescriptor) -> Value {
    match d {
        FieldDescriptor::Q => json!({"type": "Q"}),
        FieldDescriptor::QuadExt { base, delta } => json!({
            "type": "quadratic",
            "base": field_descriptor_to_json(base),
            "delta": field_element_to_json(delta),
        }),
    }
}

pub fn field_descriptor_from_json(v: &Value) -> Result<FieldDescriptor> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::parse("field descriptor must be an object"))?;
    match obj.get("type").and_then(Value::as_str) {
        Some("Q") => Ok(FieldDescriptor::Q),
        Some("quadratic") => {
            let base = match obj.get("base") {
                None => FieldDescriptor::Q,
                Some(b) => field_descriptor_from_json(b)?,
            };
            let delta_v = obj
                .get("delta")
                .ok_or_else(|| Error::parse("quadratic field needs delta"))?;
            let delta = field_element_in(delta_v, &base)?;
            match base {
                FieldDescriptor::Q => {
                    let r = delta.as_rational()?;
                    if !r.is_integer() {
                        return Err(Error::parse("delta must be an integer"));
                    }
                    let d: i64 = r
                        .to_integer()
                        .try_into()
                        .map_err(|_| Error::parse("delta out of range"))?;
                    if d == -1 {
                        Ok(FieldDescriptor::gaussian())
                    } else {
                        FieldDescriptor::quadratic(d)
                    }
                }
                FieldDescriptor::QuadExt { base, delta: inner }
                    if *base == FieldDescriptor::Q
                        && inner == FieldElement::from_int(-1) =>
                {
                    FieldDescriptor::gaussian_tower(delta)
                }
                _ => Err(Error::UnsupportedField("unsupported field tower".into())),
            }
        }
        _ => Err(Error::parse("unknown field descriptor type")),
    }
}

/// Field elements: a rational string, or {"a": ..., "b": ...} meaning
/// a + b*sqrt(delta) at the next tower level.
pub fn field_element_to_json(x: &FieldElement) -> Value {
    match x {
        FieldElement::Rat(r) => rational_to_json(r),
        FieldElement::Ext { a, b, .. } => json!({
            "a": field_element_to_json(a),
            "b": field_element_to_json(b),
        }),
    }
}

/// Parse a bare field element; extension levels are resolved against the
/// descriptor by `field_element_in`.
pub fn field_element_from_json(v: &Value) -> Result<FieldElement> {
    match v {
        Value::Object(_) => Err(Error::parse(
            "extension elements need a field context; use field_element_in",
        )),
        _ => Ok(FieldElement::from_rational(rational_from_json(v)?)),
    }
}

/// Parse an element of the field described by `d`.
pub fn field_element_in(v: &Value, d: &FieldDescriptor) -> Result<FieldElement> {
    match (v, d) {
        (Value::Object(obj), FieldDescriptor::QuadExt { base, delta }) => {
            let a = obj
                .get("a")
                .map(|a| field_element_in(a, base))
                .transpose()?
                .unwrap_or_else(FieldElement::zero);
            let b = obj
                .get("b")
                .map(|b| field_element_in(b, base))
                .transpose()?
                .unwrap_or_else(FieldElement::zero);
            Ok(FieldElement::ext(a, b, delta.clone()))
        }
        (Value::Object(_), FieldDescriptor::Q) => {
            Err(Error::parse("extension element given for a form over Q"))
        }
        // a bare rational embeds into any tower level
        (v, _) => Ok(FieldElement::from_rational(rational_from_json(v)?)),
    }
}

pub fn matrix_to_json(m: &Matrix<FieldElement>) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(field_element_to_json).collect()))
            .collect(),
    )
}

pub fn rational_matrix_to_json(m: &Matrix<Rational>) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(rational_to_json).collect()))
            .collect(),
    )
}

pub fn matrix_from_json(v: &Value, d: &FieldDescriptor) -> Result<Matrix<FieldElement>> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::parse("matrix must be an array of rows"))?;
    let parsed: Vec<Vec<FieldElement>> = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::parse("matrix row must be an array"))?
                .iter()
                .map(|e| field_element_in(e, d))
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(parsed)
}

pub fn rational_matrix_from_json(v: &Value) -> Result<Matrix<Rational>> {
    matrix_from_json(v, &FieldDescriptor::Q)?.to_rational()
}

/// Form file: {"field": {...}?, "gram": [[...]]} or {"field": {...}?, "diag": [...]}.
pub fn form_from_json(v: &Value) -> Result<QuadraticForm> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::parse("form file must be a JSON object"))?;
    let field = match obj.get("field") {
        None => FieldDescriptor::Q,
        Some(f) => field_descriptor_from_json(f)?,
    };
    if let Some(diag) = obj.get("diag") {
        let entries = diag
            .as_array()
            .ok_or_else(|| Error::parse("diag must be an array"))?
            .iter()
            .map(|e| field_element_in(e, &field))
            .collect::<Result<Vec<_>>>()?;
        return QuadraticForm::diagonal(field, &entries);
    }
    let gram_v = obj
        .get("gram")
        .ok_or_else(|| Error::parse("form file needs \"gram\" or \"diag\""))?;
    let gram = matrix_from_json(gram_v, &field)?;
    QuadraticForm::new(field, gram)
}

pub fn form_to_json(f: &QuadraticForm) -> Value {
    json!({
        "field": field_descriptor_to_json(f.descriptor()),
        "gram": matrix_to_json(f.gram()),
    })
}

pub fn profile_to_json(p: &InvariantProfile) -> Value {
    let mut hasse = Map::new();
    for (place, eps) in &p.hasse {
        hasse.insert(place.to_string(), json!(eps));
    }
    json!({
        "rank": p.rank,
        "signatures": p.signatures,
        "disc": p.disc.representative().to_string(),
        "hasse": Value::Object(hasse),
    })
}
