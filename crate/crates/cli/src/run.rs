use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use cdsphere::curvature::{certify, min_f_disk, norm_epsilon, Ellipsoidal, Euclidean, LpNorm, Norm};
use cdsphere::measures::MarginalDensity;
use cdsphere::profiles::{isop_check_caps, ModelProfile};
use cdsphere::sampling::{
    concentration_experiment, ks_two_sample, ks_two_sample_values, read_binary, read_csv, sample_direct,
    walk_on_spheres, write_binary, write_csv, SampleBatch, BINARY_MAGIC,
};
use cdsphere::spectral::{alpha_scan, sector_gap, spectral_gap, verify_bounds_for, write_scan_csv};
use cdsphere::Params;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::args::*;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] cdsphere::Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(cdsphere::Error::CertificationFailure { .. } | cdsphere::Error::SectorAudit { .. }) => 2,
            _ => 1,
        }
    }
}

/// Result of a command that completed: whether a proven inequality failed.
pub struct Outcome {
    pub violation: bool,
}

impl Outcome {
    fn ok() -> Self {
        Self { violation: false }
    }

    fn checked(passed: bool) -> Self {
        Self { violation: !passed }
    }
}

fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

struct Emitter<'a> {
    command: &'a Command,
}

impl Emitter<'_> {
    fn output(&self) -> &OutputArgs {
        self.command.output()
    }

    fn config(&self) -> Result<Value, CliError> {
        let tagged = serde_json::to_value(self.command)?;
        Ok(match tagged {
            Value::Object(map) => map.into_iter().next().map(|(_, v)| v).unwrap_or(Value::Null),
            other => other,
        })
    }

    fn json<T: Serialize>(&self, result: &T) -> Result<(), CliError> {
        let doc = json!({
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command.name(),
            "config": self.config()?,
            "result": result,
        });
        let mut out = sink(self.output().out.as_deref())?;
        serde_json::to_writer_pretty(&mut out, &doc)?;
        writeln!(out)?;
        out.flush()?;
        Ok(())
    }

    fn csv_rows<T: Serialize>(&self, rows: &[T]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(sink(self.output().out.as_deref())?);
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    fn with_writer(&self, f: impl FnOnce(&mut dyn Write) -> cdsphere::Result<()>) -> Result<(), CliError> {
        let mut out = sink(self.output().out.as_deref())?;
        f(&mut out)?;
        out.flush()?;
        Ok(())
    }

    fn no_binary(&self) -> Result<(), CliError> {
        if self.output().format == Format::Bin {
            return Err(CliError::Usage(format!(
                "--format bin is only available for sample and bm-sample, not {}",
                self.command.name()
            )));
        }
        Ok(())
    }

    fn no_csv(&self) -> Result<(), CliError> {
        if self.output().format != Format::Json {
            return Err(CliError::Usage(format!("{} only writes JSON", self.command.name())));
        }
        Ok(())
    }
}

fn params(m: &MeasureArgs) -> Result<Params, CliError> {
    Ok(Params::new(m.n, m.alpha, m.s)?)
}

pub fn execute(command: &Command) -> Result<Outcome, CliError> {
    let e = Emitter { command };
    match command {
        Command::Density(a) => density(&e, a),
        Command::CdCheck(a) => {
            e.no_csv()?;
            let cert = certify(&params(&a.measure)?, !a.local)?;
            e.json(&cert)?;
            Ok(Outcome::ok())
        }
        Command::MinF(a) => {
            e.no_csv()?;
            let m = min_f_disk(a.radius, a.p)?;
            e.json(&json!({ "min": m.min, "argmin": [m.argmin.0, m.argmin.1] }))?;
            Ok(Outcome::ok())
        }
        Command::Spectrum(a) => spectrum(&e, a),
        Command::AlphaScan(a) => scan(&e, a),
        Command::Profile(a) => profile(&e, a),
        Command::Tail(a) => {
            e.no_csv()?;
            let p = ModelProfile::new(Params::new(a.n, a.alpha, 0.0)?)?;
            e.json(&json!({ "r": a.radius, "tail": p.tail(a.radius)? }))?;
            Ok(Outcome::ok())
        }
        Command::IsopCheck(a) => {
            e.no_binary()?;
            let report = isop_check_caps(&params(&a.measure)?, a.grid)?;
            if e.output().format == Format::Csv {
                e.with_writer(|w| report.write_csv(w))?;
            } else {
                e.json(&json!({
                    "worst_slack": report.worst_slack,
                    "worst_theta0": report.worst_theta0,
                    "passed": report.passed(),
                    "rows": report.rows,
                }))?;
            }
            Ok(Outcome::checked(report.passed()))
        }
        Command::Sample(a) => {
            let batch = sample_direct(&params(&a.measure)?, a.count, a.seed, false)?;
            emit_batch(&e, &batch)
        }
        Command::BmSample(a) => {
            let mut x = vec![0.0; a.n + 1];
            x[0] = a.s;
            let batch = walk_on_spheres(a.n, &x, a.eps, a.seed, a.count)?;
            emit_batch(&e, &batch)
        }
        Command::Ks(a) => ks(&e, a),
        Command::Concentration(a) => concentration(&e, a),
        Command::NormCheck(a) => norm_check(&e, a),
    }
}

fn density(e: &Emitter, a: &DensityArgs) -> Result<Outcome, CliError> {
    e.no_binary()?;
    let m = MarginalDensity::new(params(&a.measure)?)?;
    #[derive(Serialize)]
    struct Row {
        theta: f64,
        pdf: f64,
        cdf: f64,
    }
    let grid = a.grid.max(1);
    let rows = (1..=grid)
        .map(|i| {
            let theta = std::f64::consts::PI * i as f64 / (grid + 1) as f64;
            Ok(Row {
                theta,
                pdf: m.pdf(theta)?,
                cdf: m.cdf(theta)?,
            })
        })
        .collect::<cdsphere::Result<Vec<_>>>()?;
    match e.output().format {
        Format::Csv => e.csv_rows(&rows)?,
        _ => e.json(&json!({
            "normalization": m.sphere_normalization(),
            "median": m.median()?,
            "rows": rows,
        }))?,
    }
    Ok(Outcome::ok())
}

fn spectrum(e: &Emitter, a: &SpectrumArgs) -> Result<Outcome, CliError> {
    e.no_csv()?;
    let p = params(&a.measure)?;
    if let Some(ell) = a.ell {
        let lambda = sector_gap(&p, ell, a.grid)?;
        e.json(&json!({ "lambda": lambda, "ell": ell, "grid": a.grid }))?;
        return Ok(Outcome::ok());
    }
    let gap = spectral_gap(&p)?;
    let bounds = verify_bounds_for(&p, gap.lambda_gap)?;
    e.json(&json!({ "lambda": gap.lambda_gap, "spectrum": gap, "bounds": bounds }))?;
    Ok(Outcome::checked(bounds.passed()))
}

fn scan(e: &Emitter, a: &AlphaScanArgs) -> Result<Outcome, CliError> {
    e.no_binary()?;
    let nf = a.n as f64;
    let alphas = a
        .alphas
        .clone()
        .unwrap_or_else(|| vec![-nf, -nf / 2.0, 0.0, 1.0, nf, 2.0 * nf, 3.0 * nf - 4.1]);
    let rows = alpha_scan(a.n, a.s, &alphas);
    if e.output().format == Format::Csv {
        e.with_writer(|w| write_scan_csv(&rows, w))?;
    } else {
        let doc: Vec<Value> = rows
            .iter()
            .map(|r| {
                let mut v = serde_json::to_value(r).unwrap_or(Value::Null);
                v["ratio"] = json!(r.ratio());
                v["error"] = json!(r.error.as_ref().map(|e| e.to_string()));
                v
            })
            .collect();
        e.json(&doc)?;
    }
    Ok(Outcome::ok())
}

fn profile(e: &Emitter, a: &ProfileArgs) -> Result<Outcome, CliError> {
    e.no_binary()?;
    let p = ModelProfile::new(Params::new(a.n, a.alpha, 0.0)?)?;
    #[derive(Serialize)]
    struct Row {
        t: f64,
        phi: f64,
        cdf: f64,
        isop: f64,
    }
    let k = a.grid.max(2);
    let rows = (0..k)
        .map(|i| {
            let t = -a.radius + 2.0 * a.radius * i as f64 / (k - 1) as f64;
            let cdf = p.cdf(t)?;
            Ok(Row {
                t,
                phi: p.phi(t),
                cdf,
                isop: p.isop_lower(cdf)?,
            })
        })
        .collect::<cdsphere::Result<Vec<_>>>()?;
    match e.output().format {
        Format::Csv => e.csv_rows(&rows)?,
        _ => e.json(&json!({
            "rho": p.rho(),
            "delta": p.delta(),
            "c_norm": p.c_norm(),
            "cheeger_lower": p.cheeger_lower(),
            "rows": rows,
        }))?,
    }
    Ok(Outcome::ok())
}

fn emit_batch(e: &Emitter, batch: &SampleBatch) -> Result<Outcome, CliError> {
    match e.output().format {
        Format::Csv => e.with_writer(|w| write_csv(&batch.thetas, w))?,
        Format::Bin => e.with_writer(|w| write_binary(&batch.thetas, w))?,
        Format::Json => e.json(&json!({
            "method": batch.method,
            "seed": batch.seed,
            "s": batch.params.s,
            "thetas": batch.thetas,
        }))?,
    }
    Ok(Outcome::ok())
}

/// Reads a batch file written by `sample`/`bm-sample` in CSV or binary form.
fn read_batch(path: &Path) -> Result<Vec<f64>, CliError> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    let values = if bytes.starts_with(&BINARY_MAGIC) {
        read_binary(&bytes[..])?
    } else {
        read_csv(&bytes[..])?
    };
    if values.is_empty() {
        return Err(CliError::Usage(format!("{} holds no angles", path.display())));
    }
    Ok(values)
}

fn ks(e: &Emitter, a: &KsArgs) -> Result<Outcome, CliError> {
    e.no_csv()?;
    let result = match (&a.a, &a.b) {
        (Some(pa), Some(pb)) => ks_two_sample_values(&read_batch(pa)?, &read_batch(pb)?),
        _ => {
            let mut x = vec![0.0; a.n + 1];
            x[0] = a.s;
            let walks = walk_on_spheres(a.n, &x, a.eps, a.seed, a.count)?;
            let direct = sample_direct(&Params::new(a.n, 1.0, a.s)?, a.count, a.seed, false)?;
            ks_two_sample(&walks, &direct)
        }
    };
    e.json(&result)?;
    Ok(Outcome::ok())
}

fn concentration(e: &Emitter, a: &ConcentrationArgs) -> Result<Outcome, CliError> {
    e.no_binary()?;
    let k = a.grid.max(1);
    let radii: Vec<f64> = (1..=k).map(|i| a.radius * i as f64 / k as f64).collect();
    let report = concentration_experiment(&params(&a.measure)?, &radii, a.count, a.seed)?;
    match e.output().format {
        Format::Csv => e.csv_rows(&report.rows)?,
        _ => e.json(&json!({
            "median": report.median,
            "passed": report.passed(),
            "rows": report.rows,
        }))?,
    }
    Ok(Outcome::checked(report.passed()))
}

fn parse_norm(spec: &str) -> Result<Box<dyn Norm<f64>>, CliError> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let numbers = || -> Result<Vec<f64>, CliError> {
        rest.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|err| CliError::Usage(format!("bad number {t:?} in --norm: {err}"))))
            .collect()
    };
    match kind {
        "euclidean" => Ok(Box::new(Euclidean)),
        "ellipsoid" => {
            let diag = numbers()?;
            if diag.iter().any(|d| d.is_nan() || *d <= 0.0) {
                return Err(CliError::Usage("ellipsoid diagonal must be positive".into()));
            }
            Ok(Box::new(Ellipsoidal { diag }))
        }
        "lp" => match numbers()?.as_slice() {
            [p] if *p >= 1.0 => Ok(Box::new(LpNorm { p: *p })),
            _ => Err(CliError::Usage("lp needs one exponent p >= 1".into())),
        },
        other => Err(CliError::Usage(format!("unknown norm {other:?}"))),
    }
}

fn norm_check(e: &Emitter, a: &NormCheckArgs) -> Result<Outcome, CliError> {
    e.no_csv()?;
    let norm = parse_norm(&a.norm)?;
    let est = norm_epsilon(norm.as_ref(), a.n, a.count, a.eps, a.seed)?;
    let (rho, dim) = est.implied_certificate(a.n, a.alpha);
    e.json(&json!({
        "epsilon": est.epsilon,
        "witness_y": est.witness_y,
        "witness_theta": est.witness_theta,
        "samples": est.samples,
        "certificate": { "rho": rho, "N": dim },
        "alpha_upper": est.admissible_alpha_upper(a.n),
    }))?;
    Ok(Outcome::ok())
}
