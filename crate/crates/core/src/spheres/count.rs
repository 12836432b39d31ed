use std::sync::atomic::{AtomicBool, Ordering};

use serde::{Deserialize, Serialize};

use super::SphereSpec;
use crate::error::{Error, Result};
use crate::exec::{for_each_chunk_mut, Exec, Settings};
use crate::numeric::isqrt;

const SIEVE_CHUNK: usize = 4096;

/// Exact representation numbers `r_d(0..=max_lambda)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepCountTable {
    d: usize,
    max_lambda: u64,
    counts: Vec<u128>,
}

impl RepCountTable {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn max_lambda(&self) -> u64 {
        self.max_lambda
    }

    pub fn counts(&self) -> &[u128] {
        &self.counts
    }

    pub fn get(&self, lambda: u64) -> Option<u128> {
        self.counts.get(usize::try_from(lambda).ok()?).copied()
    }
}

fn overflow(d: usize) -> Error {
    Error::Overflow(format!(
        "representation count in dimension {d} exceeds 128 bits"
    ))
}

fn sieve_work(steps: usize, max: u64) -> u128 {
    steps as u128 * (max as u128 + 1) * (isqrt(max) as u128 + 1)
}

fn check_table(max: u64, layers: u128, settings: &Settings) -> Result<usize> {
    let len = max
        .checked_add(1)
        .and_then(|l| usize::try_from(l).ok())
        .ok_or_else(|| Error::InvalidSpec(format!("max_lambda = {max} is too large")))?;
    settings
        .limits
        .check_sieve("representation-count sieve", layers * len as u128)?;
    Ok(len)
}

/// `R_1`: one integer coordinate.
fn base_layer(len: usize) -> Vec<u128> {
    let mut layer = vec![0u128; len];
    layer[0] = 1;
    let mut j = 1usize;
    while j * j < len {
        layer[j * j] = 2;
        j += 1;
    }
    layer
}

/// `R_k(n) = sum_{j^2 <= n} R_{k-1}(n - j^2) * (1 if j = 0 else 2)`.
fn step_layer(prev: &[u128], d: usize, exec: Exec) -> Result<Vec<u128>> {
    let mut next = vec![0u128; prev.len()];
    let failed = AtomicBool::new(false);
    for_each_chunk_mut(exec, &mut next, SIEVE_CHUNK, |ci, chunk| {
        let start = ci * SIEVE_CHUNK;
        for (off, slot) in chunk.iter_mut().enumerate() {
            let n = start + off;
            let mut acc = prev[n];
            let mut j = 1usize;
            while j * j <= n {
                match prev[n - j * j]
                    .checked_mul(2)
                    .and_then(|t| acc.checked_add(t))
                {
                    Some(v) => acc = v,
                    None => {
                        failed.store(true, Ordering::Relaxed);
                        return;
                    }
                }
                j += 1;
            }
            *slot = acc;
        }
    });
    if failed.load(Ordering::Relaxed) {
        return Err(overflow(d));
    }
    Ok(next)
}

fn build_layer(d: usize, len: usize, exec: Exec) -> Result<Vec<u128>> {
    let mut layer = base_layer(len);
    for k in 2..=d {
        layer = step_layer(&layer, k, exec)?;
    }
    Ok(layer)
}

/// Bulk table of `r_d(lambda)` for `lambda in 0..=max_lambda`, built by
/// convolving one-dimensional square counts `d - 1` times.
pub fn count_reps_upto(d: usize, max_lambda: u64, settings: &Settings) -> Result<RepCountTable> {
    if d == 0 {
        return Err(Error::InvalidSpec("dimension must be at least 1".into()));
    }
    let len = check_table(max_lambda, 2, settings)?;
    settings
        .limits
        .check_work("representation-count sieve", sieve_work(d - 1, max_lambda))?;
    let counts = build_layer(d, len, settings.exec)?;
    Ok(RepCountTable {
        d,
        max_lambda,
        counts,
    })
}

/// `r_d(lambda) = #{y in Z^d : |y|^2 = lambda}`, exact.
///
/// Splits `d = a + b` and evaluates the convolution `R_a * R_b` at the
/// single point `lambda`, so only tables of dimension about `d / 2` are built.
pub fn count_reps(spec: SphereSpec, settings: &Settings) -> Result<u128> {
    let (d, lambda) = (spec.d(), spec.lambda());
    if d == 1 {
        return Ok(match lambda {
            0 => 1,
            n if crate::numeric::is_square(n) => 2,
            _ => 0,
        });
    }
    let a = d / 2;
    let b = d - a;
    let len = check_table(lambda, 2, settings)?;
    settings
        .limits
        .check_work("representation count", sieve_work(b, lambda) + len as u128)?;
    let left = build_layer(a, len, settings.exec)?;
    let right_owned;
    let right = if a == b {
        &left
    } else {
        right_owned = step_layer(&left, b, settings.exec)?;
        &right_owned
    };
    let n = len - 1;
    let mut total: u128 = 0;
    for m in 0..=n {
        let term = left[m]
            .checked_mul(right[n - m])
            .ok_or_else(|| overflow(d))?;
        total = total.checked_add(term).ok_or_else(|| overflow(d))?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(d: usize, lambda: u64) -> u128 {
        count_reps(SphereSpec::new(d, lambda).unwrap(), &Settings::default()).unwrap()
    }

    #[test]
    fn small_counts() {
        assert_eq!(count(4, 0), 1);
        assert_eq!(count(4, 1), 8);
        assert_eq!(count(4, 3), 32);
        assert_eq!(count(4, 16), 24);
        assert_eq!(count(5, 2), 40);
        assert_eq!(count(1, 9), 2);
        assert_eq!(count(1, 8), 0);
        assert_eq!(count(3, 7), 0);
    }

    #[test]
    fn tables() {
        let s = Settings::default();
        assert_eq!(count_reps_upto(5, 4, &s).unwrap().counts(), &[1, 10, 40, 80, 90]);
        assert_eq!(count_reps_upto(1, 4, &s).unwrap().counts(), &[1, 2, 0, 0, 2]);
        assert_eq!(count_reps_upto(4, 8, &s).unwrap().get(8), Some(24));
        for d in 1..=6 {
            assert_eq!(count_reps_upto(d, 0, &s).unwrap().get(0), Some(1));
        }
    }

    #[test]
    fn strategies_agree() {
        let seq = count_reps_upto(6, 20_000, &Settings::sequential()).unwrap();
        let par = count_reps_upto(6, 20_000, &Settings::default().with_exec(Exec::Parallel)).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn caps_and_budget() {
        let mut s = Settings::default();
        s.limits.max_sieve_cells = 10;
        assert!(matches!(
            count_reps_upto(4, 100, &s),
            Err(Error::CapExceeded { .. })
        ));
        let mut s = Settings::default();
        s.limits.max_work = 1000;
        assert!(matches!(
            count_reps_upto(4, 10_000, &s),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn overflow_is_reported() {
        // r_40(lambda) grows like lambda^19; 128 bits run out well below 10^4.
        let r = count_reps_upto(40, 20_000, &Settings::default());
        assert!(matches!(r, Err(Error::Overflow(_))));
    }
}
