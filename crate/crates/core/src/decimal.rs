//! Serde adapters writing big integers as decimal strings and reading them
//! from either JSON integers or decimal strings, without loss.

use num_bigint::BigInt;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serializer};
use serde_json::Value;

/// Parses an optionally signed run of ASCII digits.
pub fn parse_decimal(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

pub fn from_value(v: &Value) -> std::result::Result<BigInt, String> {
    match v {
        Value::Number(n) => {
            parse_decimal(&n.to_string()).ok_or_else(|| format!("expected an integer, got {n}"))
        }
        Value::String(s) => {
            parse_decimal(s.trim()).ok_or_else(|| format!("expected a decimal integer, got {s:?}"))
        }
        other => Err(format!("expected an integer, got {other}")),
    }
}

pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
    let v = Value::deserialize(d)?;
    from_value(&v).map_err(D::Error::custom)
}

pub mod vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let items = Vec::<Value>::deserialize(d)?;
        items
            .iter()
            .map(|v| from_value(v).map_err(D::Error::custom))
            .collect()
    }
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.collect_str(x),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        match Option::<Value>::deserialize(d)? {
            None | Some(Value::Null) => Ok(None),
            Some(v) => from_value(&v).map(Some).map_err(D::Error::custom),
        }
    }
}
