//! Sequence truncations `Lambda ∩ [1, T]`, their p-adic and dyadic
//! dimension profiles, and the critical exponent `eta(Lambda, d)`.
//!
//! `delta_p` is read as the upper box-counting dimension of the closure of
//! `Lambda` in `Z_p`: the number of balls of radius `p^-j` needed to cover
//! it is the number of residue classes mod `p^j` that `Lambda` meets.
//! `delta_inf` is the growth exponent of `#(Lambda ∩ [N, 2N])`.

mod eta;
mod families;
mod io;
mod profile;

pub use eta::{
    declared_input, estimated_input, eta, BindingTerm, DimValue, EtaInput, EtaReport, Provenance,
};
pub use families::{generate, Family};
pub use profile::{
    default_jmax, dyadic_profile, estimate_dimension, padic_profile, DimensionProfile, Estimate,
    ProfileKind, Scale,
};

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numeric::{format_rational, Rational};

/// Dimensions known analytically for a family.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeclaredDims {
    /// `delta_p` for every prime not listed in `primes`.
    pub all_primes: Option<Rational>,
    pub primes: BTreeMap<u64, Rational>,
    pub delta_inf: Option<Rational>,
}

impl DeclaredDims {
    pub fn for_prime(&self, p: u64) -> Option<Rational> {
        self.primes.get(&p).copied().or(self.all_primes)
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |r: &Rational, what: String| {
            if *r < Rational::zero() || *r > Rational::one() {
                Err(Error::InvalidDimensionValue(format!(
                    "{what} = {} is outside [0, 1]",
                    format_rational(r)
                )))
            } else {
                Ok(())
            }
        };
        if let Some(r) = &self.all_primes {
            unit(r, "delta_p (all primes)".into())?;
        }
        for (p, r) in &self.primes {
            unit(r, format!("delta_{p}"))?;
        }
        if let Some(r) = &self.delta_inf {
            unit(r, "delta_inf".into())?;
        }
        Ok(())
    }
}

/// A finite, strictly increasing prefix of a sequence of positive integers.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceTruncation {
    name: String,
    terms: Vec<BigUint>,
    declared: Option<DeclaredDims>,
    generator: Option<Family>,
}

impl SequenceTruncation {
    pub fn new(
        name: impl Into<String>,
        terms: Vec<BigUint>,
        declared: Option<DeclaredDims>,
        generator: Option<Family>,
    ) -> Result<Self> {
        if let Some(t) = terms.first() {
            if t.is_zero() {
                return Err(Error::InvalidParams("terms must be positive".into()));
            }
        }
        if let Some(i) = terms.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams(format!(
                "terms must be strictly increasing: {} then {}",
                terms[i],
                terms[i + 1]
            )));
        }
        if let Some(dims) = &declared {
            dims.validate()?;
        }
        Ok(SequenceTruncation {
            name: name.into(),
            terms,
            declared,
            generator,
        })
    }

    pub fn from_u64(name: impl Into<String>, terms: &[u64]) -> Result<Self> {
        Self::new(name, terms.iter().map(|&t| BigUint::from(t)).collect(), None, None)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn terms(&self) -> &[BigUint] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn declared(&self) -> Option<&DeclaredDims> {
        self.declared.as_ref()
    }

    pub fn generator(&self) -> Option<&Family> {
        self.generator.as_ref()
    }

    pub fn with_declared(mut self, declared: Option<DeclaredDims>) -> Result<Self> {
        if let Some(d) = &declared {
            d.validate()?;
        }
        self.declared = declared;
        Ok(self)
    }

    /// All terms as `u64`, for use as radii-squared.
    pub fn terms_u64(&self) -> Result<Vec<u64>> {
        self.terms
            .iter()
            .map(|t| {
                t.to_u64()
                    .ok_or_else(|| Error::Overflow(format!("term {t} does not fit in 64 bits")))
            })
            .collect()
    }

    /// Upper bound `T` on the values when the truncation is known to be
    /// exactly `Lambda ∩ [1, T]`.
    pub fn value_bound(&self) -> Option<u64> {
        match self.generator.as_ref()? {
            Family::Naturals { bound } | Family::Squares { bound } => Some(*bound),
            _ => None,
        }
    }

    /// Terms `<= bound`.
    pub fn truncate_to(&self, bound: u64) -> SequenceTruncation {
        let b = BigUint::from(bound);
        let end = self.terms.partition_point(|t| *t <= b);
        SequenceTruncation {
            name: self.name.clone(),
            terms: self.terms[..end].to_vec(),
            declared: self.declared.clone(),
            generator: self.generator.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(SequenceTruncation::from_u64("x", &[1, 2, 2]).is_err());
        assert!(SequenceTruncation::from_u64("x", &[0, 2]).is_err());
        assert!(SequenceTruncation::from_u64("x", &[]).unwrap().is_empty());
        let bad = DeclaredDims {
            delta_inf: Some(Rational::new(3, 2)),
            ..Default::default()
        };
        assert!(matches!(
            SequenceTruncation::from_u64("x", &[1]).unwrap().with_declared(Some(bad)),
            Err(Error::InvalidDimensionValue(_))
        ));
    }

    #[test]
    fn truncation_and_u64() {
        let s = SequenceTruncation::from_u64("x", &[1, 5, 9, 20]).unwrap();
        assert_eq!(s.truncate_to(9).terms_u64().unwrap(), vec![1, 5, 9]);
        let big = SequenceTruncation::new("b", vec![BigUint::from(2u8).pow(70)], None, None).unwrap();
        assert!(matches!(big.terms_u64(), Err(Error::Overflow(_))));
    }

    #[test]
    fn declared_lookup() {
        let mut d = DeclaredDims {
            all_primes: Some(Rational::one()),
            ..Default::default()
        };
        d.primes.insert(2, Rational::zero());
        assert_eq!(d.for_prime(2), Some(Rational::zero()));
        assert_eq!(d.for_prime(3), Some(Rational::one()));
    }
}
