//! Lattice points on spheres `{y in Z^d : |y|^2 = lambda}`: enumeration,
//! exact representation counts and residue-class decompositions.
//!
//! Internal recursion works for any `d >= 1`; the averaging operators in
//! [`crate::grid`] and the probes reject `d < 4`.

mod count;
mod enumerate;
mod residues;

pub use count::{count_reps, count_reps_upto, RepCountTable};
pub use enumerate::{enumerate_sphere, SpherePoints};
pub use residues::{residue_class_counts, ResidueCounts};

pub(crate) use enumerate::enumerate_unchecked;

use crate::error::{Error, Result};

/// Largest radius-squared accepted, so coordinates fit in `i32`.
pub const MAX_LAMBDA: u64 = 1 << 60;

/// A sphere `|y|^2 = lambda` in `Z^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SphereSpec {
    d: usize,
    lambda: u64,
}

impl SphereSpec {
    pub fn new(d: usize, lambda: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidSpec("dimension must be at least 1".into()));
        }
        if lambda > MAX_LAMBDA {
            return Err(Error::InvalidSpec(format!(
                "lambda = {lambda} exceeds the supported maximum {MAX_LAMBDA}"
            )));
        }
        Ok(SphereSpec { d, lambda })
    }

    /// Accepts a signed radius-squared, as read from user input.
    pub fn from_signed(d: usize, lambda: i64) -> Result<Self> {
        if lambda < 0 {
            return Err(Error::InvalidSpec(format!(
                "lambda must be nonnegative, got {lambda}"
            )));
        }
        Self::new(d, lambda as u64)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn lambda(&self) -> u64 {
        self.lambda
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(SphereSpec::new(0, 1).is_err());
        assert!(matches!(
            SphereSpec::from_signed(4, -1),
            Err(Error::InvalidSpec(_))
        ));
        let s = SphereSpec::from_signed(5, 7).unwrap();
        assert_eq!((s.d(), s.lambda()), (5, 7));
    }
}
