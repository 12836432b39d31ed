//! JSON form: `{"d": 4, "points": [[x1, x2, x3, x4, value], ...]}`.

use serde::de::Error as _;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use super::GridFunction;
use crate::error::{Error, Result};

struct Record<'a> {
    point: &'a [i32],
    value: f64,
}

impl Serialize for Record<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.point.len() + 1))?;
        for c in self.point {
            seq.serialize_element(c)?;
        }
        seq.serialize_element(&self.value)?;
        seq.end()
    }
}

struct Records<'a>(&'a GridFunction);

impl Serialize for Records<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|(point, value)| Record { point, value }))
    }
}

impl Serialize for GridFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            d: usize,
            points: Records<'a>,
        }
        Wire {
            d: self.d,
            points: Records(self),
        }
        .serialize(s)
    }
}

fn record_to_pair(d: usize, rec: &[Value]) -> Result<(Vec<i32>, f64)> {
    if rec.len() != d + 1 {
        return Err(Error::Parse(format!(
            "record has {} entries, expected d + 1 = {}",
            rec.len(),
            d + 1
        )));
    }
    let point = rec[..d]
        .iter()
        .map(|c| {
            c.as_i64()
                .and_then(|c| i32::try_from(c).ok())
                .ok_or_else(|| Error::Parse(format!("coordinate {c} is not a 32-bit integer")))
        })
        .collect::<Result<Vec<i32>>>()?;
    let value = rec[d]
        .as_f64()
        .ok_or_else(|| Error::Parse(format!("value {} is not a number", rec[d])))?;
    Ok((point, value))
}

impl<'de> Deserialize<'de> for GridFunction {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Wire {
            d: usize,
            points: Vec<Vec<Value>>,
        }
        let w = Wire::deserialize(de)?;
        let pairs = w
            .points
            .iter()
            .map(|r| record_to_pair(w.d, r))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        GridFunction::from_pairs(w.d, pairs).map_err(D::Error::custom)
    }
}

impl GridFunction {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("grid functions always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}
