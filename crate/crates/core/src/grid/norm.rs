use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::GridFunction;
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;

/// An exponent `p` in `[1, inf]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "Infinity" => Ok(Exponent::Infinity),
            t => {
                let p = match t.split_once('/') {
                    Some((n, d)) => {
                        let n: f64 = n.trim().parse().map_err(|_| Error::Parse(format!("bad exponent {s:?}")))?;
                        let d: f64 = d.trim().parse().map_err(|_| Error::Parse(format!("bad exponent {s:?}")))?;
                        n / d
                    }
                    None => t.parse().map_err(|_| Error::Parse(format!("bad exponent {s:?}")))?,
                };
                Exponent::new(p)
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Exponent::new(p),
            Raw::Text(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub exponent: Exponent,
    pub value: f64,
    pub summation_terms: u64,
}

/// `(sum_x |f(x)|^p)^{1/p}`, or `max |f|` for `p = inf`.
///
/// Terms are accumulated with compensated summation in the function's
/// lexicographic key order, so the result is reproducible bit for bit.
pub fn lp_norm(f: &GridFunction, p: f64) -> Result<NormReport> {
    let exponent = Exponent::new(p)?;
    let terms = f.len() as u64;
    let value = match exponent {
        Exponent::Infinity => f.sup_abs(),
        Exponent::Finite(1.0) => {
            let mut s = NeumaierSum::new();
            s.extend(f.values().iter().map(|v| v.abs()));
            s.value()
        }
        Exponent::Finite(p) => {
            let mut s = NeumaierSum::new();
            s.extend(f.values().iter().map(|v| v.abs().powf(p)));
            s.value().powf(p.recip())
        }
    };
    Ok(NormReport {
        exponent,
        value,
        summation_terms: terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_has_unit_norm() {
        let f = GridFunction::delta(&[0, 0, 0, 0]);
        for p in [1.0, 1.5, 2.0, 7.0, f64::INFINITY] {
            assert_eq!(lp_norm(&f, p).unwrap().value, 1.0);
        }
    }

    #[test]
    fn sup_norm_of_signed_values() {
        let f = GridFunction::from_pairs(1, vec![(vec![0], 1.0), (vec![1], -1.0)]).unwrap();
        let r = lp_norm(&f, f64::INFINITY).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.summation_terms, 2);
        assert_eq!(r.exponent, Exponent::Infinity);
    }

    #[test]
    fn invalid_exponents() {
        let f = GridFunction::delta(&[0]);
        assert!(matches!(lp_norm(&f, 0.5), Err(Error::InvalidExponent(_))));
        assert!(lp_norm(&f, f64::NAN).is_err());
        assert!("0.9".parse::<Exponent>().is_err());
        assert_eq!("5/3".parse::<Exponent>().unwrap(), Exponent::Finite(5.0 / 3.0));
    }
}
