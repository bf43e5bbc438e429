//! JSON shapes: partitions as arrays, rationals as `"p/q"`, `Q(√2)` as
//! `{"a":…,"b":…}`, floats as a decimal string with its precision, and
//! channel or coefficient tables keyed by strings.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use tauforge::field::{QuadExt, Real, Q};
use tauforge::partition::Partition;
use tauforge::scalar::{parse_rational, ParameterPoint, PointError, Sym};

use crate::CliError;

pub fn partition(p: &Partition) -> Value {
    Value::Array(p.parts().iter().map(|&x| json!(x)).collect())
}

pub fn parse_partition(v: &Value) -> Option<Partition> {
    let parts = v.as_array()?.iter().map(|x| x.as_u64().map(|n| n as u32)).collect::<Option<Vec<_>>>()?;
    Partition::new(parts).ok()
}

/// `"p/q"`, or `"p"` for integers.
pub fn rational_str(x: &Q) -> String {
    if x.denominator() == &dashu_int::UBig::ONE {
        x.numerator().to_string()
    } else {
        format!("{}/{}", x.numerator(), x.denominator())
    }
}

pub fn rational(x: &Q) -> Value {
    Value::String(rational_str(x))
}

pub fn quad(x: &QuadExt) -> Value {
    json!({ "a": rational_str(&x.a), "b": rational_str(&x.b) })
}

pub fn parse_quad(v: &Value) -> Option<QuadExt> {
    let a = parse_rational(v.get("a")?.as_str()?)?;
    let b = parse_rational(v.get("b")?.as_str()?)?;
    Some(QuadExt::new(a, b))
}

pub fn real(x: &Real, digits: usize) -> Value {
    json!({ "value": x.to_decimal_string(digits), "digits": digits })
}

/// Fixed-point rendering for diagnostics (keeps the output byte-stable
/// across a JSON round trip, unlike bare floats).
pub fn approx(x: f64) -> Value {
    if x.is_finite() {
        Value::String(format!("{:.3}", x))
    } else {
        Value::Null
    }
}

/// Series entries rendered with the scalar's own JSON shape.
pub trait ToJson {
    fn to_json(&self, digits: usize) -> Value;
}

impl ToJson for Q {
    fn to_json(&self, _: usize) -> Value {
        rational(self)
    }
}

impl ToJson for QuadExt {
    fn to_json(&self, _: usize) -> Value {
        quad(self)
    }
}

impl ToJson for Real {
    fn to_json(&self, digits: usize) -> Value {
        real(self, digits)
    }
}

/// `{"0": …, "1": …}` from a coefficient list.
pub fn coefficient_map<T: ToJson>(xs: &[T], digits: usize) -> Value {
    let m: Map<String, Value> = xs.iter().enumerate().map(|(k, x)| (k.to_string(), x.to_json(digits))).collect();
    Value::Object(m)
}

/// A point file: a JSON object from symbol names to rationals (strings
/// `"p/q"` or integers).
pub fn parse_point(text: &str) -> Result<ParameterPoint, CliError> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("point file is not JSON: {}", e)))?;
    let obj = v.as_object().ok_or_else(|| CliError::Usage("point file must be a JSON object".into()))?;
    let mut p = ParameterPoint::new();
    for (k, val) in obj {
        let s = match val {
            Value::String(s) => s.clone(),
            Value::Number(n) if n.is_i64() => n.to_string(),
            _ => return Err(CliError::Usage(format!("value of `{}` must be a rational string", k))),
        };
        p.parse_entry(k, &s).map_err(point_error)?;
    }
    Ok(p)
}

pub fn point_error(e: PointError) -> CliError {
    CliError::Domain(e.to_string())
}

/// Canonical form used in cache keys: sorted names, reduced rationals.
pub fn point_json(p: &ParameterPoint) -> Value {
    let m: BTreeMap<String, Value> = p
        .iter()
        .map(|(s, v)| {
            let val = v.as_rational().map(rational).unwrap_or(Value::Null);
            (s.name().to_string(), val)
        })
        .collect();
    serde_json::to_value(m).expect("string map")
}

pub fn require(p: &ParameterPoint, syms: &[Sym]) -> Result<(), CliError> {
    for &s in syms {
        p.q(s).map_err(point_error)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use tauforge::field::q;

    #[test]
    fn rationals_and_partitions() {
        assert_eq!(rational(&q(-3, 6)), json!("-1/2"));
        assert_eq!(rational(&q(4, 2)), json!("2"));
        let p = Partition::from_parts(&[6, 4, 4, 3, 2, 1]);
        assert_eq!(serde_json::to_string(&partition(&p)).unwrap(), "[6,4,4,3,2,1]");
        assert_eq!(parse_partition(&partition(&p)), Some(p));
        let x = QuadExt::new(q(1, 2), q(-3, 4));
        assert_eq!(serde_json::to_string(&quad(&x)).unwrap(), r#"{"a":"1/2","b":"-3/4"}"#);
        assert_eq!(parse_quad(&quad(&x)), Some(x));
    }

    #[test]
    fn points() {
        let p = parse_point(r#"{"theta_0": "1/3", "sigma": 2}"#).unwrap();
        assert_eq!(p.q(Sym::Sigma).unwrap(), q(2, 1));
        assert_eq!(serde_json::to_string(&point_json(&p)).unwrap(), r#"{"sigma":"2","theta_0":"1/3"}"#);
        assert!(matches!(parse_point("[1]"), Err(CliError::Usage(_))));
        assert!(matches!(parse_point(r#"{"nope": "1"}"#), Err(CliError::Domain(_))));
    }

    #[test]
    fn floats_carry_their_precision() {
        tauforge::field::set_working_digits(40);
        let v = real(&Real::sqrt2(), 20);
        assert_eq!(v["digits"], json!(20));
        assert!(v["value"].as_str().unwrap().starts_with("1.414213562373095048"));
    }
}
