use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{Map, Value};

use crate::brauer::BrauerScenario;
use crate::decimal;
use crate::error::{Error, Result};
use crate::lattice::{LatticeVector, K3N_RANK};
use crate::witness::CertifyOptions;

const KNOWN_FIELDS: [&str; 7] = ["id", "n", "pic_basis", "b_class", "ell", "polarization", "options"];

/// A scenario document after parsing and validation.
#[derive(Clone, Debug)]
pub struct ScenarioDocument {
    pub id: Option<String>,
    pub scenario: BrauerScenario,
    pub options: Option<CertifyOptions>,
}

fn parse_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        location: location.into(),
        message: message.into(),
    }
}

fn integer(v: &Value, field: &str) -> Result<BigInt> {
    decimal::from_value(v).map_err(|m| parse_err(format!("field `{field}`"), m))
}

fn vector(v: &Value, field: &str) -> Result<LatticeVector> {
    let items = v
        .as_array()
        .ok_or_else(|| parse_err(format!("field `{field}`"), "expected an array of integers"))?;
    if items.len() != K3N_RANK {
        return Err(parse_err(
            format!("field `{field}`"),
            format!("expected {K3N_RANK} entries, got {}", items.len()),
        ));
    }
    items
        .iter()
        .enumerate()
        .map(|(i, x)| integer(x, &format!("{field}[{i}]")))
        .collect::<Result<Vec<_>>>()
        .map(LatticeVector)
}

fn syntax(bytes: &[u8]) -> Result<Value> {
    let text = std::str::from_utf8(bytes).map_err(|e| parse_err("input", format!("not UTF-8: {e}")))?;
    serde_json::from_str(text).map_err(|e| {
        parse_err(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })
}

/// Structural parse of one scenario object, then full validation.
pub fn scenario_from_value(v: &Value) -> Result<ScenarioDocument> {
    let obj: &Map<String, Value> = v
        .as_object()
        .ok_or_else(|| parse_err("document", "expected a JSON object"))?;
    if let Some(k) = obj.keys().find(|k| !KNOWN_FIELDS.contains(&k.as_str())) {
        return Err(parse_err(format!("field `{k}`"), "unknown field"));
    }
    let get = |k: &str| obj.get(k).ok_or_else(|| parse_err(format!("field `{k}`"), "missing"));
    let id = match obj.get("id") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(parse_err("field `id`", "expected a string")),
    };
    let n = integer(get("n")?, "n")?
        .to_u32()
        .ok_or_else(|| parse_err("field `n`", "expected a small non-negative integer"))?;
    let pic_basis = get("pic_basis")?
        .as_array()
        .ok_or_else(|| parse_err("field `pic_basis`", "expected an array of vectors"))?
        .iter()
        .enumerate()
        .map(|(i, row)| vector(row, &format!("pic_basis[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let b_class = vector(get("b_class")?, "b_class")?;
    let ell = integer(get("ell")?, "ell")?;
    let polarization = match obj.get("polarization") {
        None | Some(Value::Null) => None,
        Some(p) => Some(vector(p, "polarization")?),
    };
    let options = match obj.get("options") {
        None | Some(Value::Null) => None,
        Some(o) => Some(
            serde_json::from_value::<CertifyOptions>(o.clone())
                .map_err(|e| parse_err("field `options`", e.to_string()))?,
        ),
    };
    let scenario = BrauerScenario::new(n, pic_basis, b_class, ell, polarization).map_err(|e| match e {
        Error::Validation(m) => Error::Validation(m),
        Error::InvalidArgument(m) | Error::ResourceExhausted(m) | Error::ConstructionFailed(m) => {
            Error::Validation(m)
        }
        other => other,
    })?;
    Ok(ScenarioDocument {
        id,
        scenario,
        options,
    })
}

/// Parses and validates a single scenario document.
pub fn parse_scenario(document: &[u8]) -> Result<BrauerScenario> {
    parse_scenario_document(document).map(|d| d.scenario)
}

pub fn parse_scenario_document(document: &[u8]) -> Result<ScenarioDocument> {
    scenario_from_value(&syntax(document)?)
}

/// A file holding one scenario object or an array of them. Errors inside
/// the array name the offending element.
pub fn parse_scenario_batch(document: &[u8]) -> Result<Vec<ScenarioDocument>> {
    match syntax(document)? {
        Value::Array(items) => items
            .iter()
            .enumerate()
            .map(|(i, v)| {
                scenario_from_value(v).map_err(|e| match e {
                    Error::Parse { location, message } => Error::Parse {
                        location: format!("element {i}: {location}"),
                        message,
                    },
                    Error::Validation(m) => Error::Validation(format!("element {i}: {m}")),
                    other => other,
                })
            })
            .collect(),
        v => scenario_from_value(&v).map(|d| vec![d]),
    }
}

/// Reads a vector argument: either 23 comma-separated integers, or sparse
/// `index=value` pairs separated by commas (unlisted entries are zero).
pub fn parse_vector_arg(text: &str) -> Result<LatticeVector> {
    let text = text.trim();
    let err = |m: String| parse_err("vector", m);
    if text.is_empty() {
        return Err(err("empty vector".into()));
    }
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.iter().any(|p| p.contains('=')) {
        let mut v = LatticeVector::zero(K3N_RANK);
        for p in parts {
            let (i, x) = p
                .split_once('=')
                .ok_or_else(|| err(format!("expected index=value, got {p:?}")))?;
            let i: usize = i
                .trim()
                .parse()
                .map_err(|_| err(format!("bad index {i:?}")))?;
            if i >= K3N_RANK {
                return Err(err(format!("index {i} out of range")));
            }
            let x = decimal::parse_decimal(x.trim()).ok_or_else(|| err(format!("bad value {x:?}")))?;
            v.0[i] += x;
        }
        return Ok(v);
    }
    if parts.len() != K3N_RANK {
        return Err(err(format!("expected {K3N_RANK} entries, got {}", parts.len())));
    }
    parts
        .iter()
        .map(|p| decimal::parse_decimal(p).ok_or_else(|| err(format!("bad value {p:?}"))))
        .collect::<Result<Vec<_>>>()
        .map(LatticeVector)
}

/// Serializes a scenario back into the document format.
pub fn scenario_to_value(id: Option<&str>, s: &BrauerScenario, options: Option<&CertifyOptions>) -> Value {
    let vec = |v: &LatticeVector| Value::Array(v.coords().iter().map(|x| Value::String(x.to_string())).collect());
    let mut obj = Map::new();
    if let Some(id) = id {
        obj.insert("id".into(), Value::String(id.into()));
    }
    obj.insert("n".into(), Value::from(s.n));
    obj.insert(
        "pic_basis".into(),
        Value::Array(s.embedding.pic_basis().iter().map(vec).collect()),
    );
    obj.insert("b_class".into(), vec(&s.b_class));
    obj.insert("ell".into(), Value::String(s.ell.to_string()));
    if let Some(p) = &s.polarization {
        obj.insert("polarization".into(), vec(p));
    }
    if let Some(o) = options {
        obj.insert("options".into(), serde_json::to_value(o).expect("options serialize"));
    }
    Value::Object(obj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(extra: &str) -> String {
        let mut pic = vec![0i64; 23];
        pic[0] = 1;
        pic[1] = 1;
        let mut b = vec![0i64; 23];
        b[2] = 1;
        b[3] = 2;
        format!(
            r#"{{"n": 2, "pic_basis": [{pic:?}], "b_class": {b:?}, "ell": 5{extra}}}"#
        )
    }

    #[test]
    fn minimal_document_is_accepted() {
        let s = parse_scenario(doc("").as_bytes()).unwrap();
        assert_eq!(s.n, 2);
        assert_eq!(s.embedding.picard_rank(), 1);
        assert_eq!(s.ell, BigInt::from(5));
    }

    #[test]
    fn decimal_strings_and_options() {
        let d = parse_scenario_document(
            doc(r#", "id": "x", "polarization": null, "options": {"order": "thm02-first", "u_cap": 7}"#)
                .replace("\"ell\": 5", "\"ell\": \"5\"")
                .as_bytes(),
        )
        .unwrap();
        assert_eq!(d.id.as_deref(), Some("x"));
        let o = d.options.unwrap();
        assert_eq!(o.u_cap, 7);
        assert_eq!(o.order, crate::witness::PipelineOrder::Thm02First);
    }

    #[test]
    fn non_transcendental_b_is_a_validation_error() {
        let mut b = vec![0i64; 23];
        b[0] = 1;
        let text = doc("").replace(&format!("\"b_class\": {:?}", {
            let mut x = vec![0i64; 23];
            x[2] = 1;
            x[3] = 2;
            x
        }), &format!("\"b_class\": {b:?}"));
        match parse_scenario(text.as_bytes()) {
            Err(Error::Validation(m)) => assert!(m.contains("B not transcendental"), "{m}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn short_vector_is_a_parse_error() {
        let b = vec![0i64; 22];
        let text = format!(r#"{{"n": 2, "pic_basis": [], "b_class": {b:?}, "ell": 5}}"#);
        match parse_scenario(text.as_bytes()) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "field `b_class`"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_line() {
        match parse_scenario(b"{\n\"n\": 2,\n oops}") {
            Err(Error::Parse { location, .. }) => assert!(location.starts_with("line 3"), "{location}"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_scenario(&[0xff, 0xfe]), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_scenario(doc(r#", "extra": 1"#).as_bytes()),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn document_round_trip() {
        let d = parse_scenario_document(doc(r#", "id": "rt""#).as_bytes()).unwrap();
        let v = scenario_to_value(d.id.as_deref(), &d.scenario, None);
        let again = parse_scenario_document(v.to_string().as_bytes()).unwrap();
        assert_eq!(again.scenario.b_class, d.scenario.b_class);
        assert_eq!(again.id, d.id);
    }

    #[test]
    fn vector_arguments() {
        let v = parse_vector_arg("0=1, 1=-3, 22=2").unwrap();
        assert_eq!(v, LatticeVector::sparse(23, &[(0, 1), (1, -3), (22, 2)]));
        let dense = (0..23).map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        assert_eq!(parse_vector_arg(&dense).unwrap().coords()[22], BigInt::from(22));
        assert!(parse_vector_arg("1,2").is_err());
        assert!(parse_vector_arg("23=1").is_err());
        assert!(parse_vector_arg("").is_err());
    }
}
