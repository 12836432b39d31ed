use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::profile::{default_jmax, dyadic_profile, padic_profile, DimensionProfile};
use super::SequenceTruncation;
use crate::error::{Error, Result};
use crate::exec::{try_map_ordered, Exec};
use crate::numeric::{format_rational, opt_rational_serde, rational_to_f64, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Declared,
    Estimated,
}

/// A dimension value with its origin. `exact` is present for declared
/// rational values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimValue {
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rational_serde")]
    pub exact: Option<Rational>,
    pub provenance: Provenance,
}

impl DimValue {
    pub fn declared(r: Rational) -> Self {
        DimValue {
            value: rational_to_f64(&r),
            exact: Some(r),
            provenance: Provenance::Declared,
        }
    }

    pub fn estimated(value: f64) -> Self {
        DimValue {
            value,
            exact: None,
            provenance: Provenance::Estimated,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EtaInput {
    pub per_prime: BTreeMap<u64, DimValue>,
    pub delta_inf: Option<DimValue>,
}

/// Which branch of the maximum attains `eta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum BindingTerm {
    Prime { prime: u64 },
    Archimedean,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaReport {
    pub d: usize,
    pub per_prime: BTreeMap<u64, DimValue>,
    pub delta_inf: Option<DimValue>,
    pub eta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rational_serde")]
    pub eta_exact: Option<Rational>,
    pub binding_terms: Vec<BindingTerm>,
    pub notes: Vec<String>,
}

fn check_unit(v: &DimValue, what: &str) -> Result<()> {
    let ok = match &v.exact {
        Some(r) => *r >= Rational::zero() && *r <= Rational::one(),
        None => v.value.is_finite() && (0.0..=1.0).contains(&v.value),
    };
    if !ok {
        return Err(Error::InvalidDimensionValue(format!(
            "{what} = {} is outside [0, 1]",
            v.exact.as_ref().map_or(v.value.to_string(), format_rational)
        )));
    }
    Ok(())
}

/// `eta = max( max_p 1 + delta_p / (d - 1), 1 + 2 delta_inf / (d - 2) )`
/// over the primes supplied. Exact when every input is rational.
pub fn eta(d: usize, input: &EtaInput) -> Result<EtaReport> {
    if d < 4 {
        return Err(Error::DimensionTooSmall(d));
    }
    if input.per_prime.is_empty() && input.delta_inf.is_none() {
        return Err(Error::InvalidDimensionValue(
            "no dimension values supplied".into(),
        ));
    }
    for (p, v) in &input.per_prime {
        check_unit(v, &format!("delta_{p}"))?;
    }
    if let Some(v) = &input.delta_inf {
        check_unit(v, "delta_inf")?;
    }

    let dd = d as i64;
    let branches: Vec<(BindingTerm, &DimValue, i64, i64)> = input
        .per_prime
        .iter()
        .map(|(&p, v)| (BindingTerm::Prime { prime: p }, v, 1, dd - 1))
        .chain(input.delta_inf.iter().map(|v| (BindingTerm::Archimedean, v, 2, dd - 2)))
        .collect();

    let all_exact = branches.iter().all(|(_, v, _, _)| v.exact.is_some());
    let (eta, eta_exact, binding_terms) = if all_exact {
        let vals: Vec<(BindingTerm, Rational)> = branches
            .iter()
            .map(|(b, v, num, den)| {
                let r = v.exact.expect("checked");
                (*b, Rational::one() + r * Rational::new(*num, *den))
            })
            .collect();
        let best = vals.iter().map(|(_, r)| *r).max().expect("nonempty");
        let binding = vals.iter().filter(|(_, r)| *r == best).map(|(b, _)| *b).collect();
        (rational_to_f64(&best), Some(best), binding)
    } else {
        let vals: Vec<(BindingTerm, f64)> = branches
            .iter()
            .map(|(b, v, num, den)| (*b, 1.0 + v.value * *num as f64 / *den as f64))
            .collect();
        let best = vals.iter().map(|(_, x)| *x).fold(f64::NEG_INFINITY, f64::max);
        let binding = vals.iter().filter(|(_, x)| *x == best).map(|(b, _)| *b).collect();
        (best, None, binding)
    };

    let mut notes = Vec::new();
    if d == 4 {
        notes.push(
            "d = 4: the boundedness range for p > eta is only expected for d >= 5; \
             spheres |y|^2 = 4^k carry just 24 points (2-adic degeneracy)"
                .to_string(),
        );
    }
    if input.per_prime.is_empty() {
        notes.push("no prime dimensions supplied; eta reflects the archimedean branch only".into());
    }
    Ok(EtaReport {
        d,
        per_prime: input.per_prime.clone(),
        delta_inf: input.delta_inf.clone(),
        eta,
        eta_exact,
        binding_terms,
        notes,
    })
}

/// Declared dimensions of `seq` restricted to `primes`.
pub fn declared_input(seq: &SequenceTruncation, primes: &[u64]) -> Result<EtaInput> {
    let dims = seq.declared().ok_or_else(|| {
        Error::InsufficientData(format!("sequence {:?} has no declared dimensions", seq.name()))
    })?;
    let per_prime = primes
        .iter()
        .filter_map(|&p| dims.for_prime(p).map(|r| (p, DimValue::declared(r))))
        .collect();
    Ok(EtaInput {
        per_prime,
        delta_inf: dims.delta_inf.map(DimValue::declared),
    })
}

/// Dimensions estimated from the truncation. Primes whose profile has too
/// few usable scales are left out and reported in the returned notes.
pub fn estimated_input(
    seq: &SequenceTruncation,
    primes: &[u64],
    jmax: Option<u32>,
    window: Option<usize>,
    exec: Exec,
) -> Result<(EtaInput, Vec<DimensionProfile>, Vec<String>)> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut profiles = try_map_ordered(exec, primes, |&p| {
        padic_profile(seq, p, jmax.unwrap_or_else(|| default_jmax(p, seq.len())), window, exec)
    })?;
    let mut input = EtaInput::default();
    let mut notes = Vec::new();
    for (p, prof) in primes.iter().zip(&profiles) {
        match &prof.estimate {
            Some(e) => {
                input.per_prime.insert(*p, DimValue::estimated(e.value));
            }
            None => notes.push(format!("delta_{p} omitted: {}", prof.note.as_deref().unwrap_or("no estimate"))),
        }
    }
    let dy = dyadic_profile(seq, window)?;
    match &dy.estimate {
        Some(e) => input.delta_inf = Some(DimValue::estimated(e.value)),
        None => notes.push(format!("delta_inf omitted: {}", dy.note.as_deref().unwrap_or("no estimate"))),
    }
    profiles.push(dy);
    Ok((input, profiles, notes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::primes_up_to;
    use crate::sequence::{generate, Family};

    fn declared(per_prime: &[(u64, Rational)], inf: Option<Rational>) -> EtaInput {
        EtaInput {
            per_prime: per_prime.iter().map(|&(p, r)| (p, DimValue::declared(r))).collect(),
            delta_inf: inf.map(DimValue::declared),
        }
    }

    #[test]
    fn full_sequence_threshold() {
        let one = Rational::one();
        let r = eta(5, &declared(&[(2, one), (3, one)], Some(one))).unwrap();
        assert_eq!(r.eta_exact, Some(Rational::new(5, 3)));
        assert_eq!(r.binding_terms, vec![BindingTerm::Archimedean]);
    }

    #[test]
    fn lacunary_and_squares() {
        let one = Rational::one();
        let zero = Rational::zero();
        let r = eta(5, &declared(&[(2, one)], Some(zero))).unwrap();
        assert_eq!(r.eta_exact, Some(Rational::new(5, 4)));
        assert_eq!(r.binding_terms, vec![BindingTerm::Prime { prime: 2 }]);
        let r = eta(5, &declared(&[(2, one), (3, one)], Some(Rational::new(1, 2)))).unwrap();
        assert_eq!(r.eta_exact, Some(Rational::new(4, 3)));
        let r = eta(7, &declared(&[(2, zero), (5, zero)], Some(zero))).unwrap();
        assert_eq!(r.eta_exact, Some(one));
        assert_eq!(r.binding_terms.len(), 3);
    }

    #[test]
    fn ties_record_every_branch() {
        // d = 6: 1 + 1/5 = 1 + 2 * (2/5) / 4
        let r = eta(6, &declared(&[(3, Rational::one())], Some(Rational::new(2, 5)))).unwrap();
        assert_eq!(
            r.binding_terms,
            vec![BindingTerm::Prime { prime: 3 }, BindingTerm::Archimedean]
        );
    }

    #[test]
    fn mixed_inputs_are_floating() {
        let mut input = declared(&[(2, Rational::one())], None);
        input.delta_inf = Some(DimValue::estimated(0.9));
        let r = eta(5, &input).unwrap();
        assert!(r.eta_exact.is_none());
        assert!((r.eta - (1.0 + 1.8 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(matches!(eta(3, &declared(&[], Some(Rational::one()))), Err(Error::DimensionTooSmall(3))));
        assert!(eta(5, &EtaInput::default()).is_err());
        let bad = declared(&[(2, Rational::new(2, 1))], None);
        assert!(matches!(eta(5, &bad), Err(Error::InvalidDimensionValue(_))));
        let mut nan = EtaInput::default();
        nan.delta_inf = Some(DimValue::estimated(f64::NAN));
        assert!(eta(5, &nan).is_err());
    }

    #[test]
    fn d4_is_annotated() {
        let r = eta(4, &declared(&[], Some(Rational::one()))).unwrap();
        assert!(r.notes.iter().any(|n| n.contains("d = 4")));
    }

    #[test]
    fn inputs_from_families() {
        let primes = primes_up_to(97);
        let seq = generate(&Family::Naturals { bound: 50 }).unwrap();
        let input = declared_input(&seq, &primes).unwrap();
        assert_eq!(input.per_prime.len(), 25);
        let r = eta(5, &input).unwrap();
        assert_eq!(r.eta_exact, Some(Rational::new(5, 3)));

        let seq = generate(&Family::Naturals { bound: 4096 }).unwrap();
        let (input, profiles, _) = estimated_input(&seq, &[2, 3], None, None, Exec::Parallel).unwrap();
        assert_eq!(profiles.len(), 3);
        assert!(input.per_prime.values().all(|v| v.provenance == Provenance::Estimated));
        assert!((input.delta_inf.as_ref().unwrap().value - 1.0).abs() < 1e-12);
    }
}
