use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DeclaredDims, SequenceTruncation};
use crate::error::{Error, Result};
use crate::numeric::{is_prime, isqrt, Rational};

/// Largest number of terms a generator will materialize.
pub const MAX_TERMS: u64 = 50_000_000;

/// Built-in sequence families. Serialized as the `generator` record of a
/// sequence file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `1, 2, ..., bound`.
    Naturals { bound: u64 },
    /// Squares `n^2 <= bound`.
    Squares { bound: u64 },
    /// `ratio^0, ratio^1, ..., ratio^(count-1)`.
    Geometric { ratio: u64, count: u32 },
    /// Random lacunary sequence with `t_{k+1} > ratio * t_k`.
    LacunaryRandom { ratio: f64, count: u32, seed: u64 },
    /// Lacunary sequence whose stage-`k` terms hit every residue class
    /// mod `prime^k` not already met, in seeded order, with
    /// `t_{k+1} > growth * t_k`, `growth > 1`.
    PadicCover {
        prime: u64,
        stages: u32,
        growth: f64,
        seed: u64,
    },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Naturals { bound } => write!(f, "naturals:bound={bound}"),
            Family::Squares { bound } => write!(f, "squares:bound={bound}"),
            Family::Geometric { ratio, count } => write!(f, "geometric:q={ratio},count={count}"),
            Family::LacunaryRandom { ratio, count, seed } => {
                write!(f, "lacunary_random:ratio={ratio},count={count},seed={seed}")
            }
            Family::PadicCover {
                prime,
                stages,
                growth,
                seed,
            } => write!(
                f,
                "padic_cover:prime={prime},stages={stages},growth={growth},seed={seed}"
            ),
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Parse(format!("bad value {value:?} for {key}")))
}

impl Family {
    /// Parses `name[:key=value,...]`, e.g. `geometric:q=3,count=30`.
    /// Missing parameters take defaults; `default_seed` fills `seed`.
    pub fn parse(text: &str, default_seed: u64) -> Result<Family> {
        let (name, rest) = text.split_once(':').unwrap_or((text, ""));
        let mut params = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {item:?}")))?;
            params.push((k.trim().to_ascii_lowercase(), v.trim().to_string()));
        }
        let mut take = |keys: &[&str]| -> Option<String> {
            let i = params.iter().position(|(k, _)| keys.contains(&k.as_str()))?;
            Some(params.remove(i).1)
        };
        let family = match name.trim() {
            "naturals" => Family::Naturals {
                bound: take(&["bound", "t"]).map_or(Ok(1000), |v| parse_num("bound", &v))?,
            },
            "squares" => Family::Squares {
                bound: take(&["bound", "t"]).map_or(Ok(1_000_000), |v| parse_num("bound", &v))?,
            },
            "geometric" => Family::Geometric {
                ratio: take(&["q", "ratio"]).map_or(Ok(2), |v| parse_num("q", &v))?,
                count: take(&["count"]).map_or(Ok(20), |v| parse_num("count", &v))?,
            },
            "lacunary_random" | "lacunary" => Family::LacunaryRandom {
                ratio: take(&["ratio"]).map_or(Ok(2.0), |v| parse_num("ratio", &v))?,
                count: take(&["count"]).map_or(Ok(20), |v| parse_num("count", &v))?,
                seed: take(&["seed"]).map_or(Ok(default_seed), |v| parse_num("seed", &v))?,
            },
            "padic_cover" => Family::PadicCover {
                prime: take(&["prime", "p"]).map_or(Ok(2), |v| parse_num("prime", &v))?,
                stages: take(&["stages"]).map_or(Ok(3), |v| parse_num("stages", &v))?,
                growth: take(&["growth"]).map_or(Ok(2.0), |v| parse_num("growth", &v))?,
                seed: take(&["seed"]).map_or(Ok(default_seed), |v| parse_num("seed", &v))?,
            },
            other => return Err(Error::Parse(format!("unknown family {other:?}"))),
        };
        if let Some((k, _)) = params.first() {
            return Err(Error::Parse(format!("unknown parameter {k:?} for {}", name.trim())));
        }
        Ok(family)
    }

    /// Replaces the value bound of `naturals` / `squares`.
    pub fn with_bound(&self, new_bound: u64) -> Family {
        match self {
            Family::Naturals { .. } => Family::Naturals { bound: new_bound },
            Family::Squares { .. } => Family::Squares { bound: new_bound },
            other => other.clone(),
        }
    }

    /// Dimensions known in closed form for this family.
    pub fn declared_dims(&self) -> DeclaredDims {
        let one = Rational::one();
        let zero = Rational::zero();
        match self {
            Family::Naturals { .. } => DeclaredDims {
                all_primes: Some(one),
                delta_inf: Some(one),
                ..Default::default()
            },
            Family::Squares { .. } => DeclaredDims {
                all_primes: Some(one),
                delta_inf: Some(Rational::new(1, 2)),
                ..Default::default()
            },
            Family::Geometric { ratio, .. } => {
                // closure of {q^k} in Z_p: a point when p | q, an open
                // subgroup of units otherwise
                let mut primes = std::collections::BTreeMap::new();
                let mut q = *ratio;
                let mut p = 2;
                while q > 1 && p <= q {
                    if q % p == 0 {
                        primes.insert(p, zero);
                        while q % p == 0 {
                            q /= p;
                        }
                    }
                    p += 1;
                }
                DeclaredDims {
                    all_primes: Some(one),
                    primes,
                    delta_inf: Some(zero),
                }
            }
            Family::LacunaryRandom { .. } => DeclaredDims {
                delta_inf: Some(zero),
                ..Default::default()
            },
            Family::PadicCover { prime, .. } => DeclaredDims {
                primes: [(*prime, one)].into_iter().collect(),
                delta_inf: Some(zero),
                ..Default::default()
            },
        }
    }
}

fn too_many(n: u64) -> Result<()> {
    if n > MAX_TERMS {
        return Err(Error::InvalidParams(format!(
            "{n} terms requested, at most {MAX_TERMS} supported"
        )));
    }
    Ok(())
}

fn lacunary_random(ratio: f64, count: u32, seed: u64) -> Result<Vec<BigUint>> {
    if !(ratio.is_finite() && ratio > 1.0) {
        return Err(Error::InvalidParams(format!("lacunary ratio must exceed 1, got {ratio}")));
    }
    too_many(count as u64)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count as usize);
    let mut prev: u64 = 0;
    for _ in 0..count {
        let next = if prev == 0 {
            rng.gen_range(1..=ratio.ceil() as u64)
        } else {
            let floor = (ratio * prev as f64).floor();
            if floor >= 2f64.powi(52) {
                return Err(Error::InvalidParams(format!(
                    "lacunary_random terms exceed 2^52 before {count} terms"
                )));
            }
            floor as u64 + 1 + rng.gen_range(0..=prev)
        };
        out.push(BigUint::from(next));
        prev = next;
    }
    Ok(out)
}

/// `floor(x * factor)` for a finite `factor >= 0`, exact.
fn scale_floor(x: &BigUint, factor: f64) -> BigUint {
    let (mantissa, exponent, _) = num_traits::float::FloatCore::integer_decode(factor);
    let product = x * mantissa;
    if exponent >= 0 {
        product << exponent as usize
    } else {
        product >> (-exponent) as usize
    }
}

fn padic_cover(prime: u64, stages: u32, growth: f64, seed: u64) -> Result<Vec<BigUint>> {
    if !is_prime(prime) {
        return Err(Error::NotPrime(prime));
    }
    if stages == 0 {
        return Err(Error::InvalidParams("padic_cover needs at least one stage".into()));
    }
    if !(growth.is_finite() && growth > 1.0) {
        return Err(Error::InvalidParams(format!("padic_cover growth must exceed 1, got {growth}")));
    }
    if prime.checked_pow(stages).is_none_or(|m| m > MAX_TERMS) {
        return Err(Error::InvalidParams(format!(
            "{prime}^{stages} residue classes is too many"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms: Vec<BigUint> = Vec::new();
    let mut prev = BigUint::zero();
    for k in 1..=stages {
        let modulus = prime.pow(k);
        let m = BigUint::from(modulus);
        let covered: BTreeSet<u64> = terms
            .iter()
            .map(|t| {
                let r = t % &m;
                r.iter_u64_digits().next().unwrap_or(0)
            })
            .collect();
        let mut fresh: Vec<u64> = (0..modulus).filter(|a| !covered.contains(a)).collect();
        fresh.shuffle(&mut rng);
        for a in fresh {
            // smallest n > growth * prev with n = a mod p^k
            let lo = scale_floor(&prev, growth) + 1u32;
            let r = (&lo % &m).iter_u64_digits().next().unwrap_or(0);
            let bump = (a + modulus - r) % modulus;
            let next = lo + bump;
            prev = next.clone();
            terms.push(next);
        }
    }
    Ok(terms)
}

/// Materializes a family truncation. Deterministic in the parameters and seed.
pub fn generate(family: &Family) -> Result<SequenceTruncation> {
    let terms: Vec<BigUint> = match *family {
        Family::Naturals { bound } => {
            if bound == 0 {
                return Err(Error::InvalidParams("naturals needs bound >= 1".into()));
            }
            too_many(bound)?;
            (1..=bound).map(BigUint::from).collect()
        }
        Family::Squares { bound } => {
            if bound == 0 {
                return Err(Error::InvalidParams("squares needs bound >= 1".into()));
            }
            let n = isqrt(bound);
            too_many(n)?;
            (1..=n).map(|k| BigUint::from(k * k)).collect()
        }
        Family::Geometric { ratio, count } => {
            if ratio < 2 {
                return Err(Error::InvalidParams(format!("geometric ratio must be >= 2, got {ratio}")));
            }
            too_many(count as u64)?;
            let q = BigUint::from(ratio);
            let mut t = BigUint::one();
            let mut out = Vec::with_capacity(count as usize);
            for _ in 0..count {
                out.push(t.clone());
                t *= &q;
            }
            out
        }
        Family::LacunaryRandom { ratio, count, seed } => lacunary_random(ratio, count, seed)?,
        Family::PadicCover {
            prime,
            stages,
            growth,
            seed,
        } => padic_cover(prime, stages, growth, seed)?,
    };
    SequenceTruncation::new(
        family.to_string(),
        terms,
        Some(family.declared_dims()),
        Some(family.clone()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn terms(f: Family) -> Vec<u64> {
        generate(&f).unwrap().terms_u64().unwrap()
    }

    #[test]
    fn naturals_and_geometric() {
        assert_eq!(terms(Family::Naturals { bound: 10 }), (1..=10).collect::<Vec<_>>());
        assert_eq!(terms(Family::Geometric { ratio: 2, count: 5 }), vec![1, 2, 4, 8, 16]);
        assert_eq!(terms(Family::Squares { bound: 50 }), vec![1, 4, 9, 16, 25, 36, 49]);
        let d = Family::Naturals { bound: 10 }.declared_dims();
        assert_eq!(d.for_prime(97), Some(Rational::one()));
        assert_eq!(d.delta_inf, Some(Rational::one()));
        let g = Family::Geometric { ratio: 6, count: 3 }.declared_dims();
        assert_eq!(g.for_prime(2), Some(Rational::zero()));
        assert_eq!(g.for_prime(3), Some(Rational::zero()));
        assert_eq!(g.for_prime(5), Some(Rational::one()));
    }

    #[test]
    fn invalid_params() {
        assert!(generate(&Family::Geometric { ratio: 1, count: 5 }).is_err());
        assert!(generate(&Family::LacunaryRandom { ratio: 1.0, count: 5, seed: 0 }).is_err());
        assert!(matches!(
            generate(&Family::PadicCover { prime: 4, stages: 2, growth: 2.0, seed: 0 }),
            Err(Error::NotPrime(4))
        ));
        assert!(generate(&Family::Naturals { bound: 0 }).is_err());
    }

    #[test]
    fn lacunary_random_is_lacunary_and_seeded() {
        let f = Family::LacunaryRandom { ratio: 1.5, count: 30, seed: 11 };
        let a = terms(f.clone());
        assert_eq!(a, terms(f));
        assert!(a.windows(2).all(|w| w[1] as f64 > 1.5 * w[0] as f64));
        let b = terms(Family::LacunaryRandom { ratio: 1.5, count: 30, seed: 12 });
        assert_ne!(a, b);
    }

    #[test]
    fn padic_cover_covers_residues() {
        let seq = generate(&Family::PadicCover { prime: 2, stages: 3, growth: 2.0, seed: 7 }).unwrap();
        let t = seq.terms_u64().unwrap();
        assert!(t.windows(2).all(|w| w[1] > 2 * w[0]));
        for m in [2u64, 4, 8] {
            let hit: BTreeSet<u64> = t.iter().map(|x| x % m).collect();
            assert_eq!(hit.len() as u64, m, "mod {m}");
        }
        let slow = generate(&Family::PadicCover { prime: 2, stages: 4, growth: 1.5, seed: 1 }).unwrap();
        let t = slow.terms_u64().unwrap();
        assert_eq!(t.len(), 16);
        assert!(t.windows(2).all(|w| 2 * w[1] > 3 * w[0]));
        assert!(generate(&Family::PadicCover { prime: 2, stages: 2, growth: 1.0, seed: 0 }).is_err());
        let seq3 = generate(&Family::PadicCover { prime: 3, stages: 2, growth: 3.0, seed: 1 }).unwrap();
        let hit: BTreeSet<u64> = seq3.terms().iter().map(|x| (x % 9u32).to_u64().unwrap()).collect();
        assert_eq!(hit.len(), 9);
    }

    #[test]
    fn parse_roundtrip() {
        for f in [
            Family::Naturals { bound: 77 },
            Family::Squares { bound: 10_000 },
            Family::Geometric { ratio: 3, count: 9 },
            Family::LacunaryRandom { ratio: 2.5, count: 4, seed: 9 },
            Family::PadicCover { prime: 5, stages: 2, growth: 3.0, seed: 1 },
            Family::PadicCover { prime: 2, stages: 4, growth: 1.5, seed: 1 },
        ] {
            assert_eq!(Family::parse(&f.to_string(), 0).unwrap(), f);
        }
        assert_eq!(Family::parse("naturals", 0).unwrap(), Family::Naturals { bound: 1000 });
        assert_eq!(
            Family::parse("padic_cover:p=3", 42).unwrap(),
            Family::PadicCover { prime: 3, stages: 3, growth: 2.0, seed: 42 }
        );
        assert!(Family::parse("naturals:x=1", 0).is_err());
        assert!(Family::parse("primes", 0).is_err());
    }
}
