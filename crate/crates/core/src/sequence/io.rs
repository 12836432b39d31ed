//! Sequence files: plain text (one positive integer per line, `#` comments)
//! or JSON `{name, terms[], declared_dims?, generator?}`. Terms that do not
//! fit in 64 bits are written as decimal strings.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{DeclaredDims, Family, SequenceTruncation};
use crate::error::{Error, Result};
use crate::numeric::{format_rational, parse_rational};

#[derive(Serialize, Deserialize)]
struct DeclaredWire {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    all_primes: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    primes: BTreeMap<u64, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta_inf: Option<String>,
}

impl From<&DeclaredDims> for DeclaredWire {
    fn from(d: &DeclaredDims) -> Self {
        DeclaredWire {
            all_primes: d.all_primes.as_ref().map(format_rational),
            primes: d.primes.iter().map(|(p, r)| (*p, format_rational(r))).collect(),
            delta_inf: d.delta_inf.as_ref().map(format_rational),
        }
    }
}

impl TryFrom<DeclaredWire> for DeclaredDims {
    type Error = Error;

    fn try_from(w: DeclaredWire) -> Result<Self> {
        Ok(DeclaredDims {
            all_primes: w.all_primes.as_deref().map(parse_rational).transpose()?,
            primes: w
                .primes
                .iter()
                .map(|(p, r)| Ok((*p, parse_rational(r)?)))
                .collect::<Result<_>>()?,
            delta_inf: w.delta_inf.as_deref().map(parse_rational).transpose()?,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SequenceWire {
    name: String,
    terms: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    declared_dims: Option<DeclaredWire>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<Family>,
}

fn term_to_value(t: &BigUint) -> Value {
    match t.to_u64() {
        Some(v) => Value::from(v),
        None => Value::from(t.to_string()),
    }
}

fn value_to_term(v: &Value) -> Result<BigUint> {
    match v {
        Value::Number(n) => n
            .as_u64()
            .map(BigUint::from)
            .ok_or_else(|| Error::Parse(format!("term {n} is not a nonnegative integer"))),
        Value::String(s) => BigUint::from_str(s.trim())
            .map_err(|_| Error::Parse(format!("term {s:?} is not a nonnegative integer"))),
        other => Err(Error::Parse(format!("term {other} is not an integer"))),
    }
}

impl SequenceTruncation {
    pub fn to_json_value(&self) -> Value {
        let wire = SequenceWire {
            name: self.name.clone(),
            terms: self.terms.iter().map(term_to_value).collect(),
            declared_dims: self.declared.as_ref().map(DeclaredWire::from),
            generator: self.generator.clone(),
        };
        serde_json::to_value(wire).expect("sequence always serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("sequence always serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: SequenceWire = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let terms = wire.terms.iter().map(value_to_term).collect::<Result<Vec<_>>>()?;
        let declared = wire.declared_dims.map(DeclaredDims::try_from).transpose()?;
        SequenceTruncation::new(wire.name, terms, declared, wire.generator)
    }

    /// One term per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            out.push_str(&t.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let t = BigUint::from_str(line)
                .map_err(|_| Error::Parse(format!("line {}: {line:?} is not a positive integer", i + 1)))?;
            terms.push(t);
        }
        SequenceTruncation::new(name, terms, None, None)
    }

    /// JSON if the text starts with `{`, plain text otherwise.
    pub fn parse_any(name: impl Into<String>, text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::from_text(name, text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::generate;

    #[test]
    fn json_roundtrip_with_big_terms() {
        let seq = generate(&Family::Geometric { ratio: 3, count: 50 }).unwrap();
        let text = seq.to_json();
        assert!(text.contains(r#""family":"geometric""#));
        assert!(text.contains(r#""primes":{"3":"0"}"#));
        let back = SequenceTruncation::from_json(&text).unwrap();
        assert_eq!(back, seq);
    }

    #[test]
    fn text_format() {
        let s = SequenceTruncation::parse_any("t", "# header\n1\n3\n\n7 # seven\n").unwrap();
        assert_eq!(s.terms_u64().unwrap(), vec![1, 3, 7]);
        assert_eq!(s.to_text(), "1\n3\n7\n");
        assert!(SequenceTruncation::from_text("t", "1\n-2\n").is_err());
        assert!(SequenceTruncation::from_text("t", "3\n2\n").is_err());
    }

    #[test]
    fn json_errors() {
        assert!(SequenceTruncation::from_json(r#"{"name":"x","terms":[1.5]}"#).is_err());
        assert!(SequenceTruncation::from_json(r#"{"name":"x","terms":[2,1]}"#).is_err());
        let bad = r#"{"name":"x","terms":[1],"declared_dims":{"delta_inf":"3/2"}}"#;
        assert!(matches!(
            SequenceTruncation::from_json(bad),
            Err(Error::InvalidDimensionValue(_))
        ));
        let ok = r#"{"name":"x","terms":[1,"18446744073709551616"],"declared_dims":{"delta_inf":"0"}}"#;
        let s = SequenceTruncation::from_json(ok).unwrap();
        assert_eq!(s.len(), 2);
    }
}
