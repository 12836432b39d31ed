//! Arithmetic spherical averages and maximal functions on `Z^d`.
//!
//! * [`spheres`]: lattice points on `|y|^2 = lambda`, exact counts `r_d`,
//!   residue-class decompositions.
//! * [`grid`]: sparse functions on `Z^d`, the averages `A_lambda`, the
//!   maximal operator `M_Lambda`, `l^p` norms.
//! * [`sequence`]: sequence families, p-adic and dyadic occupancy profiles,
//!   dimension estimates and the critical exponent `eta`.
//! * [`probes`]: operator-norm lower-bound experiments.
//!
//! Data-parallel loops run on rayon when the `parallel` feature is on (the
//! default); [`Exec::Sequential`] forces the in-order path. Both give
//! bit-identical results.

pub mod error;
pub mod exec;
pub mod grid;
pub mod numeric;
pub mod probes;
pub mod sequence;
pub mod spheres;

pub use error::{Error, Result};
pub use exec::{Exec, Limits, Settings};
pub use grid::{average, lp_norm, maximal, maximal_over, Exponent, GridFunction, NormReport};
pub use probes::{delta_test, delta_tests, divergence_slope, periodic_padic_probe, ProbeKind, ProbeResult};
pub use sequence::{eta, generate, EtaReport, Family, SequenceTruncation};
pub use spheres::{count_reps, count_reps_upto, enumerate_sphere, residue_class_counts, SphereSpec};
