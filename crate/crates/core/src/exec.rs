//! Execution strategy and resource caps.
//!
//! Every data-parallel loop in the crate goes through the helpers here. With
//! the `parallel` feature they dispatch to rayon; without it, or when
//! [`Exec::Sequential`] is requested, they run the same closures in order.
//! All reductions are either exact integer sums or order-independent, and
//! ordered outputs are collected by index, so both strategies produce
//! bit-identical results.

use crate::error::{Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// True when work will actually be spread over the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Resource caps. Operations check predicted sizes against these before
/// allocating and abort with [`Error::CapExceeded`] / [`Error::BudgetExceeded`]
/// rather than truncating.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Sphere points enumerated at once, and output points of an operator.
    pub max_points: u64,
    /// Cells of a residue torus `(Z/mZ)^d`.
    pub max_torus_cells: u64,
    /// Integer cells held by representation-count tables.
    pub max_sieve_cells: u64,
    /// Inner-loop work units for sieves and probe sweeps.
    pub max_work: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_points: 10_000_000,
            max_torus_cells: 10_000_000,
            max_sieve_cells: 100_000_000,
            max_work: 10_000_000_000,
        }
    }
}

impl Limits {
    pub(crate) fn check_points(&self, what: &'static str, needed: u128) -> Result<()> {
        if needed > self.max_points as u128 {
            return Err(Error::CapExceeded {
                what,
                needed,
                cap: self.max_points as u128,
            });
        }
        Ok(())
    }

    pub(crate) fn check_cells(&self, what: &'static str, needed: u128) -> Result<()> {
        if needed > self.max_torus_cells as u128 {
            return Err(Error::CapExceeded {
                what,
                needed,
                cap: self.max_torus_cells as u128,
            });
        }
        Ok(())
    }

    pub(crate) fn check_sieve(&self, what: &'static str, needed: u128) -> Result<()> {
        if needed > self.max_sieve_cells as u128 {
            return Err(Error::CapExceeded {
                what,
                needed,
                cap: self.max_sieve_cells as u128,
            });
        }
        Ok(())
    }

    pub(crate) fn check_work(&self, what: &'static str, needed: u128) -> Result<()> {
        if needed > self.max_work as u128 {
            return Err(Error::BudgetExceeded {
                what,
                needed,
                budget: self.max_work as u128,
            });
        }
        Ok(())
    }
}

/// Caps plus execution strategy, threaded through every operation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Settings {
    pub limits: Limits,
    pub exec: Exec,
}

impl Settings {
    pub fn sequential() -> Self {
        Settings {
            limits: Limits::default(),
            exec: Exec::Sequential,
        }
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }
}

/// Ordered map: `out[i] = f(&items[i])`.
pub(crate) fn map_ordered<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Fallible ordered map; the first error in index order wins.
pub(crate) fn try_map_ordered<T, R, F>(exec: Exec, items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    map_ordered(exec, items, f).into_iter().collect()
}

/// Calls `f(chunk_index, chunk)` on consecutive chunks of `data`.
pub(crate) fn for_each_chunk_mut<T, F>(exec: Exec, data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        data.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
        return;
    }
    let _ = exec;
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

/// Fold-then-reduce. `reduce` must be associative and commutative up to
/// exact equality (integer addition, max) for results to be strategy-independent.
pub(crate) fn fold_reduce<T, A, ID, FO, RE>(exec: Exec, items: &[T], identity: ID, fold: FO, reduce: RE) -> A
where
    T: Sync,
    A: Send,
    ID: Fn() -> A + Sync + Send,
    FO: Fn(A, &T) -> A + Sync + Send,
    RE: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items
            .par_iter()
            .fold(&identity, &fold)
            .reduce(&identity, &reduce);
    }
    let _ = (exec, &reduce);
    items.iter().fold(identity(), fold)
}
