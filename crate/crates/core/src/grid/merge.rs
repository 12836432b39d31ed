//! k-way merge of lexicographically sorted sparse runs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::exec::{map_ordered, Exec};

/// A sorted run of `(point, value)` entries with flat coordinates.
#[derive(Clone, Copy)]
pub(crate) struct Run<'a> {
    pub coords: &'a [i32],
    pub values: &'a [f64],
}

impl<'a> Run<'a> {
    fn len(&self) -> usize {
        self.values.len()
    }

    /// Entries whose first coordinate lies in `lo..=hi`.
    fn slice_leading(&self, d: usize, lo: i32, hi: i32) -> Run<'a> {
        let n = self.len();
        let first = |i: usize| self.coords[i * d];
        let start = partition_point(n, |i| first(i) < lo);
        let end = partition_point(n, |i| first(i) <= hi);
        Run {
            coords: &self.coords[start * d..end * d],
            values: &self.values[start..end],
        }
    }
}

fn partition_point(n: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0usize, n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Combine {
    /// Sum of contributions, accumulated in ascending value order so the
    /// result does not depend on which run a contribution came from.
    Sum,
    /// Largest absolute contribution.
    MaxAbs,
}

struct Head<'a> {
    key: &'a [i32],
    run: usize,
}

impl PartialEq for Head<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Head<'_> {}

impl PartialOrd for Head<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Head<'_> {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .cmp(self.key)
            .then_with(|| other.run.cmp(&self.run))
    }
}

fn combine_values(combine: Combine, buf: &mut [f64]) -> f64 {
    match combine {
        Combine::Sum => {
            if buf.len() == 1 {
                return buf[0];
            }
            buf.sort_unstable_by(f64::total_cmp);
            buf.iter().sum()
        }
        Combine::MaxAbs => buf.iter().fold(0.0f64, |m, v| m.max(v.abs())),
    }
}

fn merge_sequential<'a>(d: usize, runs: &[Run<'a>], combine: Combine, out: &mut (Vec<i32>, Vec<f64>)) {
    let mut pos = vec![0usize; runs.len()];
    let mut heap: BinaryHeap<Head<'a>> = runs
        .iter()
        .enumerate()
        .filter(|(_, r)| r.len() > 0)
        .map(|(i, r)| Head {
            key: &r.coords[..d],
            run: i,
        })
        .collect();
    let mut buf = Vec::new();
    while let Some(head) = heap.pop() {
        let key = head.key;
        buf.clear();
        let mut advance = |run: usize, heap: &mut BinaryHeap<Head<'a>>, buf: &mut Vec<f64>| {
            let r: Run<'a> = runs[run];
            buf.push(r.values[pos[run]]);
            pos[run] += 1;
            let p = pos[run];
            if p < r.len() {
                heap.push(Head {
                    key: &r.coords[p * d..(p + 1) * d],
                    run,
                });
            }
        };
        advance(head.run, &mut heap, &mut buf);
        while heap.peek().is_some_and(|h| h.key == key) {
            let h = heap.pop().expect("peeked");
            advance(h.run, &mut heap, &mut buf);
        }
        let v = combine_values(combine, &mut buf);
        if v != 0.0 {
            out.0.extend_from_slice(key);
            out.1.push(v);
        }
    }
}

/// Merges sorted runs into one sorted run with unique keys, dropping exact
/// zeros. Work is split by the first coordinate; since per-key combination
/// is order-independent the output does not depend on `exec`.
pub(crate) fn merge_runs(d: usize, runs: &[Run<'_>], combine: Combine, exec: Exec) -> (Vec<i32>, Vec<f64>) {
    let total: usize = runs.iter().map(Run::len).sum();
    let bounds = runs
        .iter()
        .filter(|r| r.len() > 0)
        .map(|r| (r.coords[0], r.coords[(r.len() - 1) * d]))
        .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)));
    let Some((lo, hi)) = bounds else {
        return (Vec::new(), Vec::new());
    };
    if !exec.is_parallel() || lo == hi {
        let mut out = (Vec::with_capacity(total * d), Vec::with_capacity(total));
        merge_sequential(d, runs, combine, &mut out);
        return out;
    }
    let leading: Vec<i32> = (lo..=hi).collect();
    let parts = map_ordered(exec, &leading, |&c| {
        let sub: Vec<Run<'_>> = runs.iter().map(|r| r.slice_leading(d, c, c)).collect();
        let mut out = (Vec::new(), Vec::new());
        merge_sequential(d, &sub, combine, &mut out);
        out
    });
    let n: usize = parts.iter().map(|p| p.1.len()).sum();
    let mut coords = Vec::with_capacity(n * d);
    let mut values = Vec::with_capacity(n);
    for (c, v) in parts {
        coords.extend_from_slice(&c);
        values.extend_from_slice(&v);
    }
    (coords, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_and_combines() {
        let a = Run {
            coords: &[0, 0, 1, 0, 2, 2],
            values: &[1.0, 2.0, 3.0],
        };
        let b = Run {
            coords: &[1, 0, 1, 1],
            values: &[-2.0, 5.0],
        };
        for exec in [Exec::Sequential, Exec::Parallel] {
            let (c, v) = merge_runs(2, &[a, b], Combine::Sum, exec);
            assert_eq!(c, vec![0, 0, 1, 1, 2, 2]);
            assert_eq!(v, vec![1.0, 5.0, 3.0]);
            let (c, v) = merge_runs(2, &[a, b], Combine::MaxAbs, exec);
            assert_eq!(c, vec![0, 0, 1, 0, 1, 1, 2, 2]);
            assert_eq!(v, vec![1.0, 2.0, 5.0, 3.0]);
        }
    }

    #[test]
    fn empty_runs() {
        let e = Run {
            coords: &[],
            values: &[],
        };
        let (c, v) = merge_runs(3, &[e, e], Combine::Sum, Exec::Parallel);
        assert!(c.is_empty() && v.is_empty());
    }
}
