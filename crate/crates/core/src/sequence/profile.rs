use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::SequenceTruncation;
use crate::error::{Error, Result};
use crate::exec::{map_ordered, Exec};
use crate::numeric::{is_prime, ols_slope};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    Padic { prime: u64 },
    Dyadic,
}

impl ProfileKind {
    pub fn base(self) -> u64 {
        match self {
            ProfileKind::Padic { prime } => prime,
            ProfileKind::Dyadic => 2,
        }
    }
}

/// One scale of an occupancy profile.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scale {
    pub level: u32,
    pub count: u64,
    /// Why the scale is left out of the slope fit, if it is.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excluded: Option<String>,
}

impl Scale {
    pub fn new(level: u32, count: u64) -> Self {
        Scale {
            level,
            count,
            excluded: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    /// Fitted slope clamped to `[0, 1]`.
    pub value: f64,
    pub raw_slope: f64,
    pub levels: Vec<u32>,
    /// `count[j+1] / count[j]` over consecutive fitted levels.
    pub ratios: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionProfile {
    #[serde(flatten)]
    pub kind: ProfileKind,
    pub terms: u64,
    pub scales: Vec<Scale>,
    pub window: Option<usize>,
    pub estimate: Option<Estimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Least-squares slope of `log_base(count)` against `level` over the
/// trailing `window` usable scales, clamped to `[0, 1]`.
pub fn estimate_dimension(scales: &[Scale], base: u64, window: Option<usize>) -> Result<Estimate> {
    if base < 2 {
        return Err(Error::InvalidParams(format!("base must be at least 2, got {base}")));
    }
    let usable: Vec<&Scale> = scales
        .iter()
        .filter(|s| s.excluded.is_none() && s.count > 0)
        .collect();
    let used = match window {
        Some(w) if w < usable.len() => &usable[usable.len() - w..],
        _ => &usable[..],
    };
    if used.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} usable scale(s) in the fit window, need at least 2",
            used.len()
        )));
    }
    let log_base = (base as f64).ln();
    let xs: Vec<f64> = used.iter().map(|s| s.level as f64).collect();
    let ys: Vec<f64> = used.iter().map(|s| (s.count as f64).ln() / log_base).collect();
    let raw_slope = ols_slope(&xs, &ys)?;
    let ratios = used
        .windows(2)
        .map(|w| w[1].count as f64 / w[0].count as f64)
        .collect();
    Ok(Estimate {
        value: raw_slope.clamp(0.0, 1.0),
        raw_slope,
        levels: used.iter().map(|s| s.level).collect(),
        ratios,
    })
}

/// Profile depth used when none is given: twice the level at which
/// `p^j` passes the number of terms, plus two, at most 64.
pub fn default_jmax(prime: u64, terms: usize) -> u32 {
    let mut j = 0u32;
    let mut pj = 1u128;
    while pj < terms.max(1) as u128 {
        pj *= prime as u128;
        j += 1;
    }
    (2 * j + 2).min(64)
}

fn distinct_residues(residues: &[u128], modulus: u128) -> u64 {
    let mut r: Vec<u128> = residues.iter().map(|x| x % modulus).collect();
    r.sort_unstable();
    r.dedup();
    r.len() as u64
}

fn distinct_residues_big(terms: &[BigUint], modulus: &BigUint) -> u64 {
    let mut r: Vec<BigUint> = terms.iter().map(|x| x % modulus).collect();
    r.sort_unstable();
    r.dedup();
    r.len() as u64
}

/// Number of residue classes mod `p^j` met by the terms, `j = 1..=jmax`.
pub fn padic_profile(
    seq: &SequenceTruncation,
    prime: u64,
    jmax: u32,
    window: Option<usize>,
    exec: Exec,
) -> Result<DimensionProfile> {
    if !is_prime(prime) {
        return Err(Error::NotPrime(prime));
    }
    if jmax == 0 {
        return Err(Error::InvalidParams("jmax must be at least 1".into()));
    }
    let n = seq.len() as u64;
    let levels: Vec<u32> = (1..=jmax).collect();
    // residues mod p^J where p^J is the largest power fitting in u128
    let mut fit = 0u32;
    let mut top = 1u128;
    while fit < jmax {
        match top.checked_mul(prime as u128) {
            Some(t) => {
                top = t;
                fit += 1;
            }
            None => break,
        }
    }
    let top_big = BigUint::from(top);
    let small: Vec<u128> = seq
        .terms()
        .iter()
        .map(|t| (t % &top_big).to_u128().expect("residue below u128 modulus"))
        .collect();
    let counts = map_ordered(exec, &levels, |&j| {
        if j <= fit {
            distinct_residues(&small, (prime as u128).pow(j))
        } else {
            distinct_residues_big(seq.terms(), &BigUint::from(prime).pow(j))
        }
    });
    let scales: Vec<Scale> = levels
        .iter()
        .zip(counts)
        .map(|(&level, count)| Scale {
            level,
            count,
            excluded: (count >= n).then(|| "saturated".to_string()),
        })
        .collect();
    let (estimate, note) = match estimate_dimension(&scales, prime, window) {
        Ok(e) => (Some(e), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(DimensionProfile {
        kind: ProfileKind::Padic { prime },
        terms: n,
        scales,
        window,
        estimate,
        note,
    })
}

/// Counts of terms in the dyadic blocks `[2^m, 2^(m+1))`.
///
/// A block is fitted only if the truncation is known to cover it fully:
/// up to the family's value bound when there is one, otherwise every block
/// before the one holding the largest term.
pub fn dyadic_profile(seq: &SequenceTruncation, window: Option<usize>) -> Result<DimensionProfile> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let top_block = (seq.terms().last().expect("nonempty").bits() - 1) as u32;
    let mut counts = vec![0u64; top_block as usize + 1];
    for t in seq.terms() {
        counts[(t.bits() - 1) as usize] += 1;
    }
    let bound = seq.value_bound();
    let scales: Vec<Scale> = counts
        .into_iter()
        .enumerate()
        .map(|(m, count)| {
            let m = m as u32;
            let complete = match bound {
                Some(b) => m < 63 && (1u64 << (m + 1)) - 1 <= b,
                None => m < top_block,
            };
            let excluded = if !complete {
                Some("incomplete".to_string())
            } else if count == 0 {
                Some("empty".to_string())
            } else {
                None
            };
            Scale {
                level: m,
                count,
                excluded,
            }
        })
        .collect();
    let (estimate, note) = match estimate_dimension(&scales, 2, window) {
        Ok(e) => (Some(e), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(DimensionProfile {
        kind: ProfileKind::Dyadic,
        terms: seq.len() as u64,
        scales,
        window,
        estimate,
        note,
    })
}
