//! Finitely supported functions on `Z^d`, the spherical averages `A_lambda`,
//! the maximal operator `M_Lambda` and `l^p` norms.

mod io;
mod merge;
mod norm;
mod ops;

pub use norm::{lp_norm, Exponent, NormReport};
pub use ops::{average, maximal, maximal_over};

pub(crate) use merge::{merge_runs, Combine, Run};

use crate::error::{Error, Result};

/// A finitely supported real function on `Z^d`.
///
/// Canonical form: entries sorted lexicographically by point, unique, with
/// no stored zeros. Coordinates are stored flat.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    d: usize,
    coords: Vec<i32>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zero(d: usize) -> Self {
        GridFunction {
            d,
            coords: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Unit mass at `point`.
    pub fn delta(point: &[i32]) -> Self {
        GridFunction {
            d: point.len(),
            coords: point.to_vec(),
            values: vec![1.0],
        }
    }

    /// Builds a function from arbitrary `(point, value)` pairs. Repeated
    /// points are summed; zeros are dropped.
    pub fn from_pairs<I>(d: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i32>, f64)>,
    {
        if d == 0 {
            return Err(Error::InvalidParams("dimension must be at least 1".into()));
        }
        let mut entries: Vec<(Vec<i32>, f64)> = Vec::new();
        for (p, v) in pairs {
            if p.len() != d {
                return Err(Error::InvalidParams(format!(
                    "point {p:?} does not have dimension {d}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("non-finite value {v} at {p:?}")));
            }
            entries.push((p, v));
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let coords: Vec<i32> = entries.iter().flat_map(|(p, _)| p.iter().copied()).collect();
        let values: Vec<f64> = entries.iter().map(|(_, v)| *v).collect();
        let (coords, values) = dedup_sorted(d, &coords, &values);
        Ok(GridFunction { d, coords, values })
    }

    /// Assumes canonical input (sorted, unique, nonzero).
    pub(crate) fn from_sorted_parts(d: usize, coords: Vec<i32>, values: Vec<f64>) -> Self {
        debug_assert_eq!(coords.len(), values.len() * d);
        debug_assert!(values.iter().all(|v| *v != 0.0));
        debug_assert!(coords
            .chunks_exact(d)
            .zip(coords.chunks_exact(d).skip(1))
            .all(|(a, b)| a < b));
        GridFunction { d, coords, values }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Support size.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, i: usize) -> &[i32] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn coords(&self) -> &[i32] {
        &self.coords
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&[i32], f64)> + '_ {
        self.coords.chunks_exact(self.d).zip(self.values.iter().copied())
    }

    /// Value at `point` (zero off the support).
    pub fn get(&self, point: &[i32]) -> f64 {
        let (mut lo, mut hi) = (0usize, self.len());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            match self.point(mid).cmp(point) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return self.values[mid],
            }
        }
        0.0
    }

    /// Componentwise min and max over the support.
    pub fn bounding_box(&self) -> Option<(Vec<i32>, Vec<i32>)> {
        let mut it = self.coords.chunks_exact(self.d);
        let first = it.next()?;
        let (mut lo, mut hi) = (first.to_vec(), first.to_vec());
        for p in it {
            for i in 0..self.d {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        Some((lo, hi))
    }

    /// `x -> f(x - shift)`.
    pub fn translate(&self, shift: &[i32]) -> Result<Self> {
        if shift.len() != self.d {
            return Err(Error::InvalidParams("shift has the wrong dimension".into()));
        }
        let mut coords = Vec::with_capacity(self.coords.len());
        for p in self.coords.chunks_exact(self.d) {
            for (c, s) in p.iter().zip(shift) {
                coords.push(c.checked_add(*s).ok_or_else(|| {
                    Error::Overflow("translated coordinate leaves the i32 range".into())
                })?);
            }
        }
        Ok(GridFunction {
            d: self.d,
            coords,
            values: self.values.clone(),
        })
    }

    /// `x -> f(g^{-1} x)` for the signed permutation
    /// `g: (x_1..x_d) -> (signs[i] * x_{perm[i]})_i`.
    pub fn signed_permutation(&self, perm: &[usize], signs: &[i32]) -> Result<Self> {
        let d = self.d;
        let mut seen = vec![false; d];
        if perm.len() != d || signs.len() != d || perm.iter().any(|&i| i >= d || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::InvalidParams("not a permutation of the coordinates".into()));
        }
        if signs.iter().any(|s| s.abs() != 1) {
            return Err(Error::InvalidParams("signs must be +1 or -1".into()));
        }
        let pairs = self.iter().map(|(p, v)| {
            let q: Vec<i32> = (0..d).map(|i| signs[i] * p[perm[i]]).collect();
            (q, v)
        });
        GridFunction::from_pairs(d, pairs)
    }

    /// Largest absolute value.
    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

fn dedup_sorted(d: usize, coords: &[i32], values: &[f64]) -> (Vec<i32>, Vec<f64>) {
    let mut out_c = Vec::with_capacity(coords.len());
    let mut out_v = Vec::with_capacity(values.len());
    let mut buf = Vec::new();
    let mut i = 0usize;
    let n = values.len();
    while i < n {
        let key = &coords[i * d..(i + 1) * d];
        buf.clear();
        let mut j = i;
        while j < n && &coords[j * d..(j + 1) * d] == key {
            buf.push(values[j]);
            j += 1;
        }
        buf.sort_unstable_by(f64::total_cmp);
        let v: f64 = buf.iter().sum();
        if v != 0.0 {
            out_c.extend_from_slice(key);
            out_v.push(v);
        }
        i = j;
    }
    (out_c, out_v)
}
