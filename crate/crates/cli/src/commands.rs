use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};
use spherical_maximal::numeric::{primes_up_to, rational_to_f64};
use spherical_maximal::probes::ProbeResult;
use spherical_maximal::sequence::{
    declared_input, dyadic_profile, estimated_input, padic_profile, default_jmax, BindingTerm,
    DimensionProfile, EtaReport, ProfileKind,
};
use spherical_maximal::{
    average, count_reps, count_reps_upto, delta_test, divergence_slope, enumerate_sphere, eta,
    generate, maximal, maximal_over, periodic_padic_probe, Family, GridFunction,
    SequenceTruncation, Settings, SphereSpec,
};

use crate::args::*;
use crate::CliError;

/// A command's result: the JSON `result` record and its CSV view.
pub struct Output {
    pub json: Value,
    pub csv: String,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn operator_dim(d: usize) -> Result<(), CliError> {
    if d < 4 {
        return Err(CliError::Config(format!("--d must be at least 4, got {d}")));
    }
    Ok(())
}

fn read_file(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))
}

fn load_sequence(source: &SeqSource) -> Result<SequenceTruncation, CliError> {
    match (&source.seq, &source.family) {
        (Some(path), None) => {
            let text = read_file(path)?;
            let trimmed = text.trim_start();
            if trimmed.starts_with('{') {
                // a `generate` report carries the sequence under "result"
                let v: Value = serde_json::from_str(trimmed)
                    .map_err(|e| spherical_maximal::Error::Parse(format!("{path}: {e}")))?;
                let inner = match v.get("result") {
                    Some(r) if v.get("tool").is_some() => r.clone(),
                    _ => v,
                };
                Ok(SequenceTruncation::from_json(&inner.to_string())?)
            } else {
                let name = std::path::Path::new(path)
                    .file_name()
                    .map_or_else(|| path.clone(), |n| n.to_string_lossy().into_owned());
                Ok(SequenceTruncation::from_text(name, &text)?)
            }
        }
        (None, Some(spec)) => Ok(generate(&Family::parse(spec, source.seed)?)?),
        (None, None) => Err(CliError::Config("one of --seq or --family is required".into())),
        (Some(_), Some(_)) => Err(CliError::Config("--seq and --family are exclusive".into())),
    }
}

fn load_grid(path: &str) -> Result<GridFunction, CliError> {
    Ok(GridFunction::from_json(&read_file(path)?)?)
}

fn primes_for(set: &PrimeSet) -> Result<Vec<u64>, CliError> {
    let mut primes = if set.prime.is_empty() {
        primes_up_to(set.primes_up_to)
    } else {
        set.prime.clone()
    };
    primes.sort_unstable();
    primes.dedup();
    if primes.is_empty() {
        return Err(CliError::Config("prime set is empty".into()));
    }
    Ok(primes)
}

fn grid_csv(f: &GridFunction) -> String {
    let mut out = String::new();
    let header: Vec<String> = (1..=f.d()).map(|i| format!("x{i}")).collect();
    let _ = writeln!(out, "{},value", header.join(","));
    for (p, v) in f.iter() {
        let coords: Vec<String> = p.iter().map(i32::to_string).collect();
        let _ = writeln!(out, "{},{v}", coords.join(","));
    }
    out
}

fn grid_output(f: &GridFunction) -> Output {
    Output {
        json: serde_json::from_str(&f.to_json()).expect("grid json is valid"),
        csv: grid_csv(f),
    }
}

fn probe_output(r: &ProbeResult) -> Output {
    Output {
        json: to_value(r),
        csv: r.to_csv(),
    }
}

fn profiles_csv(profiles: &[DimensionProfile]) -> String {
    let mut out = String::from("kind,prime,level,count,excluded\n");
    for prof in profiles {
        let (kind, prime) = match prof.kind {
            ProfileKind::Padic { prime } => ("padic", prime.to_string()),
            ProfileKind::Dyadic => ("dyadic", String::new()),
        };
        for s in &prof.scales {
            let _ = writeln!(
                out,
                "{kind},{prime},{},{},{}",
                s.level,
                s.count,
                s.excluded.as_deref().unwrap_or("")
            );
        }
    }
    out
}

fn eta_csv(r: &EtaReport) -> String {
    let mut out = String::from("branch,prime,dimension,provenance,candidate\n");
    let d = r.d as f64;
    let provenance = |v: &spherical_maximal::sequence::DimValue| {
        serde_json::to_value(v.provenance)
            .ok()
            .and_then(|p| p.as_str().map(str::to_string))
            .unwrap_or_default()
    };
    for (p, v) in &r.per_prime {
        let dim = v.exact.as_ref().map_or(v.value, rational_to_f64);
        let _ = writeln!(out, "prime,{p},{dim},{},{}", provenance(v), 1.0 + dim / (d - 1.0));
    }
    if let Some(v) = &r.delta_inf {
        let dim = v.exact.as_ref().map_or(v.value, rational_to_f64);
        let _ = writeln!(out, "archimedean,,{dim},{},{}", provenance(v), 1.0 + 2.0 * dim / (d - 2.0));
    }
    let _ = writeln!(out, "eta,,,,{}", r.eta);
    out
}

pub fn run(command: &Command, settings: &Settings) -> Result<Output, CliError> {
    match command {
        Command::Count(a) => {
            operator_dim(a.d)?;
            if let Some(max) = a.max_lambda {
                let table = count_reps_upto(a.d, max, settings)?;
                let mut csv = String::from("lambda,count\n");
                for (l, c) in table.counts().iter().enumerate() {
                    let _ = writeln!(csv, "{l},{c}");
                }
                Ok(Output {
                    json: json!({"d": a.d, "max_lambda": max, "counts": table.counts()}),
                    csv,
                })
            } else {
                let lambda = a.lambda.expect("clap requires --lambda");
                let c = count_reps(SphereSpec::new(a.d, lambda)?, settings)?;
                Ok(Output {
                    json: json!({"d": a.d, "lambda": lambda, "count": c}),
                    csv: format!("lambda,count\n{lambda},{c}\n"),
                })
            }
        }
        Command::Enumerate(a) => {
            operator_dim(a.d)?;
            let pts = enumerate_sphere(SphereSpec::new(a.d, a.lambda)?, settings)?;
            let header: Vec<String> = (1..=a.d).map(|i| format!("x{i}")).collect();
            let mut csv = header.join(",") + "\n";
            for p in pts.iter() {
                let row: Vec<String> = p.iter().map(i32::to_string).collect();
                csv.push_str(&row.join(","));
                csv.push('\n');
            }
            Ok(Output {
                json: json!({"d": a.d, "lambda": a.lambda, "count": pts.len(), "points": pts.to_vecs()}),
                csv,
            })
        }
        Command::Average(a) => {
            let f = load_grid(&a.input)?;
            operator_dim(f.d())?;
            Ok(grid_output(&average(&f, a.lambda, settings)?))
        }
        Command::Maximal(a) => {
            let f = load_grid(&a.input)?;
            operator_dim(f.d())?;
            let m = if a.lambdas.is_empty() {
                maximal(&f, &load_sequence(&a.source)?, settings)?
            } else {
                maximal_over(&f, &a.lambdas, settings)?
            };
            Ok(grid_output(&m))
        }
        Command::Generate(a) => {
            let seq = generate(&Family::parse(&a.family, a.seed)?)?;
            let mut csv = String::from("index,term\n");
            for (i, t) in seq.terms().iter().enumerate() {
                let _ = writeln!(csv, "{},{t}", i + 1);
            }
            Ok(Output {
                json: seq.to_json_value(),
                csv,
            })
        }
        Command::Analyze(a) => {
            let seq = load_sequence(&a.source)?;
            let primes = primes_for(&a.primes)?;
            let window = Some(a.primes.window as usize);
            let exec = settings.exec;
            let mut profiles = primes
                .iter()
                .map(|&p| {
                    let jmax = a.primes.jmax.unwrap_or_else(|| default_jmax(p, seq.len()));
                    padic_profile(&seq, p, jmax, window, exec)
                })
                .collect::<spherical_maximal::Result<Vec<_>>>()?;
            profiles.push(dyadic_profile(&seq, window)?);
            let declared = seq.declared().map(|_| declared_input(&seq, &primes)).transpose()?;
            let csv = profiles_csv(&profiles);
            Ok(Output {
                json: json!({
                    "sequence": seq.name(),
                    "terms": seq.len(),
                    "profiles": to_value(&profiles),
                    "declared": declared.map(|d| to_value(&d)),
                }),
                csv,
            })
        }
        Command::Eta(a) => {
            operator_dim(a.d)?;
            let seq = load_sequence(&a.source)?;
            let primes = primes_for(&a.primes)?;
            let (input, notes) = if a.estimated {
                let (input, _, notes) = estimated_input(
                    &seq,
                    &primes,
                    a.primes.jmax,
                    Some(a.primes.window as usize),
                    settings.exec,
                )?;
                (input, notes)
            } else {
                (declared_input(&seq, &primes)?, Vec::new())
            };
            let mut report = eta(a.d, &input)?;
            report.notes.extend(notes);
            let csv = eta_csv(&report);
            let mut json = to_value(&report);
            json["sequence"] = json!(seq.name());
            json["primes"] = json!(primes);
            json["binding"] = json!(report
                .binding_terms
                .iter()
                .map(|b| match b {
                    BindingTerm::Prime { prime } => format!("p={prime}"),
                    BindingTerm::Archimedean => "archimedean".to_string(),
                })
                .collect::<Vec<_>>());
            Ok(Output { json, csv })
        }
        Command::ProbeDelta(a) => {
            let seq = load_sequence(&a.source)?;
            Ok(probe_output(&delta_test(a.d, &seq, a.p, settings)?))
        }
        Command::ProbeSlope(a) => {
            let top = a.schedule.iter().copied().max().unwrap_or(0);
            let mut source = a.source.clone();
            if let Some(spec) = &a.source.family {
                // naturals and squares are cut at the last schedule bound
                let fam = Family::parse(spec, a.source.seed)?.with_bound(top);
                source.family = Some(fam.to_string());
            }
            let seq = load_sequence(&source)?;
            Ok(probe_output(&divergence_slope(a.d, &seq, &a.schedule, a.p, settings)?))
        }
        Command::ProbePadic(a) => {
            let seq = load_sequence(&a.source)?;
            Ok(probe_output(&periodic_padic_probe(a.d, &seq, a.prime, a.level, a.p, settings)?))
        }
    }
}
