use super::{merge_runs, Combine, GridFunction, Run};
use crate::error::{Error, Result};
use crate::exec::{map_ordered, try_map_ordered, Exec, Settings};
use crate::sequence::SequenceTruncation;
use crate::spheres::{count_reps, count_reps_upto, enumerate_unchecked, SphereSpec};

fn require_operator_dim(d: usize) -> Result<()> {
    if d < 4 {
        return Err(Error::DimensionTooSmall(d));
    }
    Ok(())
}

fn shifted(base: &[i32], shift: &[i32]) -> Result<Vec<i32>> {
    let d = shift.len();
    let mut out = Vec::with_capacity(base.len());
    for p in base.chunks_exact(d) {
        for (c, s) in p.iter().zip(shift) {
            out.push(c.checked_add(*s).ok_or_else(|| {
                Error::Overflow("averaged support leaves the i32 coordinate range".into())
            })?);
        }
    }
    Ok(out)
}

/// `A_lambda f` given the already known `r = r_d(lambda)`.
fn average_known(f: &GridFunction, lambda: u64, reps: u128, exec: Exec) -> Result<GridFunction> {
    let d = f.d();
    if f.is_empty() {
        return Ok(GridFunction::zero(d));
    }
    let spec = SphereSpec::new(d, lambda)?;
    let sphere = enumerate_unchecked(spec, exec, Some(reps as usize));
    let r = reps as f64;
    let scale = |v: f64| v / r;

    let (coords, values) = if f.len() == 1 {
        let (x, v) = f.iter().next().expect("nonempty");
        let coords = shifted(sphere.coords(), x)?;
        let values = vec![scale(v); sphere.len()];
        (coords, values)
    } else {
        let sources: Vec<usize> = (0..f.len()).collect();
        let translates = try_map_ordered(exec, &sources, |&i| shifted(sphere.coords(), f.point(i)))?;
        let weights: Vec<Vec<f64>> = map_ordered(exec, &sources, |&i| vec![f.values()[i]; sphere.len()]);
        let runs: Vec<Run<'_>> = translates
            .iter()
            .zip(&weights)
            .map(|(c, v)| Run { coords: c, values: v })
            .collect();
        let (coords, mut values) = merge_runs(d, &runs, Combine::Sum, exec);
        values.iter_mut().for_each(|v| *v = scale(*v));
        (coords, values)
    };
    if values.contains(&0.0) {
        // underflow after scaling; restore canonical form
        let pairs = coords
            .chunks_exact(d)
            .zip(values)
            .filter(|(_, v)| *v != 0.0)
            .map(|(p, v)| (p.to_vec(), v));
        return GridFunction::from_pairs(d, pairs);
    }
    Ok(GridFunction::from_sorted_parts(d, coords, values))
}

/// `(A_lambda f)(x) = r_d(lambda)^{-1} sum_{|y|^2 = lambda} f(x - y)`.
pub fn average(f: &GridFunction, lambda: u64, settings: &Settings) -> Result<GridFunction> {
    require_operator_dim(f.d())?;
    let reps = count_reps(SphereSpec::new(f.d(), lambda)?, settings)?;
    settings
        .limits
        .check_points("averaged support", reps.saturating_mul(f.len() as u128))?;
    average_known(f, lambda, reps, settings.exec)
}

/// `M f(x) = max_{lambda in lambdas} |A_lambda f(x)|` over a finite index set.
pub fn maximal_over(f: &GridFunction, lambdas: &[u64], settings: &Settings) -> Result<GridFunction> {
    require_operator_dim(f.d())?;
    let Some(&top) = lambdas.iter().max() else {
        return Err(Error::EmptySequence);
    };
    let mut lambdas = lambdas.to_vec();
    lambdas.sort_unstable();
    lambdas.dedup();
    let table = count_reps_upto(f.d(), top, settings)?;
    let reps: Vec<u128> = lambdas
        .iter()
        .map(|&l| table.get(l).expect("table covers every index"))
        .collect();
    let needed = reps
        .iter()
        .fold(0u128, |acc, r| acc.saturating_add(r.saturating_mul(f.len() as u128)));
    settings.limits.check_points("maximal-function support", needed)?;

    let jobs: Vec<(u64, u128)> = lambdas.iter().copied().zip(reps).collect();
    let averages = try_map_ordered(settings.exec, &jobs, |&(l, r)| average_known(f, l, r, settings.exec))?;
    let runs: Vec<Run<'_>> = averages
        .iter()
        .map(|g| Run {
            coords: g.coords(),
            values: g.values(),
        })
        .collect();
    let (coords, values) = merge_runs(f.d(), &runs, Combine::MaxAbs, settings.exec);
    drop(averages);
    Ok(GridFunction::from_sorted_parts(f.d(), coords, values))
}

/// `M_Lambda f` for a sequence truncation.
pub fn maximal(f: &GridFunction, seq: &SequenceTruncation, settings: &Settings) -> Result<GridFunction> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    maximal_over(f, &seq.terms_u64()?, settings)
}
