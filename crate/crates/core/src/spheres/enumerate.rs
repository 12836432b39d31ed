use super::{count_reps, SphereSpec};
use crate::error::Result;
use crate::exec::{map_ordered, Exec, Settings};
use crate::numeric::isqrt;

/// Lattice points of one sphere, stored flat and sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpherePoints {
    d: usize,
    coords: Vec<i32>,
}

impl SpherePoints {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[i32] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[i32]> + '_ {
        self.coords.chunks_exact(self.d)
    }

    pub fn coords(&self) -> &[i32] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<i32> {
        self.coords
    }

    pub fn to_vecs(&self) -> Vec<Vec<i32>> {
        self.iter().map(<[i32]>::to_vec).collect()
    }
}

/// Representations `n = x^2 + y^2` for every `n <= max`, bucketed by `n`,
/// each bucket in lexicographic `(x, y)` order.
pub(crate) struct TwoSquares {
    offsets: Vec<usize>,
    pairs: Vec<[i32; 2]>,
}

impl TwoSquares {
    pub(crate) fn build(max: u64) -> Self {
        let s = isqrt(max) as i64;
        let max = max as i64;
        let len = max as usize + 1;
        let mut offsets = vec![0usize; len + 1];
        for x in -s..=s {
            let rest = max - x * x;
            let t = isqrt(rest as u64) as i64;
            for y in -t..=t {
                offsets[(x * x + y * y) as usize + 1] += 1;
            }
        }
        for i in 0..len {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut pairs = vec![[0i32; 2]; offsets[len]];
        for x in -s..=s {
            let rest = max - x * x;
            let t = isqrt(rest as u64) as i64;
            for y in -t..=t {
                let n = (x * x + y * y) as usize;
                pairs[fill[n]] = [x as i32, y as i32];
                fill[n] += 1;
            }
        }
        TwoSquares { offsets, pairs }
    }

    fn reps(&self, n: u64) -> &[[i32; 2]] {
        let n = n as usize;
        &self.pairs[self.offsets[n]..self.offsets[n + 1]]
    }
}

/// Depth-first lexicographic walk; the last two coordinates come from the
/// two-squares buckets.
pub(crate) fn visit<F: FnMut(&[i32])>(
    table: Option<&TwoSquares>,
    dims_left: usize,
    rem: u64,
    prefix: &mut Vec<i32>,
    f: &mut F,
) {
    match dims_left {
        0 => {
            if rem == 0 {
                f(prefix);
            }
        }
        1 => {
            let s = isqrt(rem);
            if s * s != rem {
                return;
            }
            if s == 0 {
                prefix.push(0);
                f(prefix);
                prefix.pop();
            } else {
                for c in [-(s as i32), s as i32] {
                    prefix.push(c);
                    f(prefix);
                    prefix.pop();
                }
            }
        }
        2 => {
            let table = table.expect("two-squares table required for d >= 2");
            for &[a, b] in table.reps(rem) {
                prefix.push(a);
                prefix.push(b);
                f(prefix);
                prefix.truncate(prefix.len() - 2);
            }
        }
        _ => {
            let s = isqrt(rem) as i64;
            for c in -s..=s {
                prefix.push(c as i32);
                visit(table, dims_left - 1, rem - (c * c) as u64, prefix, f);
                prefix.pop();
            }
        }
    }
}

pub(crate) fn table_for(spec: SphereSpec) -> Option<TwoSquares> {
    (spec.d() >= 2).then(|| TwoSquares::build(spec.lambda()))
}

/// First-coordinate values, the unit of parallel work.
pub(crate) fn leading_values(spec: SphereSpec) -> Vec<i32> {
    let s = isqrt(spec.lambda()) as i32;
    (-s..=s).collect()
}

/// Enumerates without consulting the caps; `expected` presizes the buffer.
pub(crate) fn enumerate_unchecked(spec: SphereSpec, exec: Exec, expected: Option<usize>) -> SpherePoints {
    let d = spec.d();
    let table = table_for(spec);
    let mut coords = Vec::with_capacity(expected.unwrap_or(0) * d);
    if d <= 2 {
        let mut prefix = Vec::with_capacity(d);
        visit(table.as_ref(), d, spec.lambda(), &mut prefix, &mut |p| {
            coords.extend_from_slice(p)
        });
        return SpherePoints { d, coords };
    }
    let blocks = map_ordered(exec, &leading_values(spec), |&c| {
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(d);
        prefix.push(c);
        let rem = spec.lambda() - (c as i64 * c as i64) as u64;
        visit(table.as_ref(), d - 1, rem, &mut prefix, &mut |p| {
            out.extend_from_slice(p)
        });
        out
    });
    for block in blocks {
        coords.extend_from_slice(&block);
    }
    SpherePoints { d, coords }
}

/// Every `y` with `|y|^2 = lambda`, each exactly once, in lexicographic order.
pub fn enumerate_sphere(spec: SphereSpec, settings: &Settings) -> Result<SpherePoints> {
    let count = count_reps(spec, settings)?;
    settings.limits.check_points("sphere enumeration", count)?;
    Ok(enumerate_unchecked(spec, settings.exec, Some(count as usize)))
}
