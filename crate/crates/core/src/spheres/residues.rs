use std::collections::BTreeMap;

use super::enumerate::{leading_values, table_for, visit};
use super::{count_reps, SphereSpec};
use crate::error::{Error, Result};
use crate::exec::{fold_reduce, Settings};

/// Dense counts `c(u) = #{y : |y|^2 = lambda, y = u mod m}` over the torus
/// `(Z/mZ)^d`, indexed row-major with the first coordinate most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueCounts {
    d: usize,
    modulus: u64,
    counts: Vec<u64>,
}

impl ResidueCounts {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Dense counts in row-major residue order.
    pub fn dense(&self) -> &[u64] {
        &self.counts
    }

    pub fn index_of(&self, residue: &[u64]) -> usize {
        residue
            .iter()
            .fold(0usize, |acc, &r| acc * self.modulus as usize + (r % self.modulus) as usize)
    }

    pub fn residue_of(&self, mut index: usize) -> Vec<u64> {
        let m = self.modulus as usize;
        let mut r = vec![0u64; self.d];
        for slot in r.iter_mut().rev() {
            *slot = (index % m) as u64;
            index /= m;
        }
        r
    }

    pub fn get(&self, residue: &[u64]) -> u64 {
        self.counts[self.index_of(residue)]
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }

    /// Nonzero classes only.
    pub fn to_map(&self) -> BTreeMap<Vec<u64>, u64> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (self.residue_of(i), c))
            .collect()
    }

    /// Pushes counts forward to a divisor modulus.
    pub fn reduce(&self, modulus: u64) -> Result<ResidueCounts> {
        if modulus < 2 || self.modulus % modulus != 0 {
            return Err(Error::InvalidParams(format!(
                "{modulus} does not divide {}",
                self.modulus
            )));
        }
        let cells = (modulus as usize).pow(self.d as u32);
        let mut counts = vec![0u64; cells];
        let big = self.modulus as usize;
        let small = modulus as usize;
        for (i, &c) in self.counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mut rest = i;
            let mut place = 1usize;
            let mut j = 0usize;
            for _ in 0..self.d {
                j += (rest % big % small) * place;
                rest /= big;
                place *= small;
            }
            counts[j] += c;
        }
        Ok(ResidueCounts {
            d: self.d,
            modulus,
            counts,
        })
    }
}

/// Decomposes the sphere `spec` by congruence class modulo `modulus`.
pub fn residue_class_counts(spec: SphereSpec, modulus: u64, settings: &Settings) -> Result<ResidueCounts> {
    if modulus < 2 {
        return Err(Error::InvalidParams(format!(
            "modulus must be at least 2, got {modulus}"
        )));
    }
    let d = spec.d();
    let cells = (modulus as u128)
        .checked_pow(d as u32)
        .unwrap_or(u128::MAX);
    settings.limits.check_cells("residue torus", cells)?;
    let points = count_reps(spec, settings)?;
    settings.limits.check_points("sphere enumeration", points)?;

    let cells = cells as usize;
    let m = modulus as i64;
    let table = table_for(spec);
    let index = |p: &[i32]| {
        p.iter()
            .fold(0usize, |acc, &c| acc * m as usize + (c as i64).rem_euclid(m) as usize)
    };

    let counts = if d <= 2 {
        let mut counts = vec![0u64; cells];
        let mut prefix = Vec::with_capacity(d);
        visit(table.as_ref(), d, spec.lambda(), &mut prefix, &mut |p| {
            counts[index(p)] += 1
        });
        counts
    } else {
        fold_reduce(
            settings.exec,
            &leading_values(spec),
            || vec![0u64; cells],
            |mut acc, &c| {
                let mut prefix = Vec::with_capacity(d);
                prefix.push(c);
                let rem = spec.lambda() - (c as i64 * c as i64) as u64;
                visit(table.as_ref(), d - 1, rem, &mut prefix, &mut |p| {
                    acc[index(p)] += 1
                });
                acc
            },
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
    };
    Ok(ResidueCounts {
        d,
        modulus,
        counts,
    })
}
