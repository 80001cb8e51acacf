//! Command-line front end for `spectrace-core`.
//!
//! `spectrace <find|trace|scan|count> [--config job.json] [flags]` writes
//! `<prefix>.csv`, `<prefix>.events.json` and `<prefix>.report.json`.
//! Exit codes: 0 success, 1 IO failure, 2 invalid configuration,
//! 3 numerical failure.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde_json::json;
use spectrace_core::{
    bounds_report, classify, kappa_of, scan_real_well, seed_roots, trace, well_counts, AntiboundCount,
    Complex64, EventKind, PathSpec, RootError, RootStatus, TraceError,
};
use thiserror::Error;

use config::{pair, Command, JobConfig, Overrides, PathJson, PotentialSpec, ScanJson};
use output::{num, Csv};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("{kind}: {message}; last good state: {state}")]
    Numerical {
        kind: String,
        message: String,
        state: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    fn numerical(e: impl Into<TraceError>, state: String) -> Self {
        let e = e.into();
        CliError::Numerical {
            kind: error_kind(&e).to_string(),
            message: e.to_string(),
            state,
        }
    }

    /// Offending field of a configuration error.
    pub fn field(&self) -> Option<&str> {
        match self {
            CliError::Config { field, .. } => Some(field.as_str()),
            _ => None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config { .. } => 2,
            CliError::Numerical { .. } => 3,
        }
    }
}

fn error_kind(e: &TraceError) -> &'static str {
    match e {
        TraceError::SeedNotRoot { .. } => "SeedNotRoot",
        TraceError::FreeOperatorOnPath { .. } => "FreeOperatorOnPath",
        TraceError::StepCollapse { .. } => "StepCollapse",
        TraceError::ModelMismatch => "ModelMismatch",
        TraceError::InvalidPath => "InvalidPath",
        TraceError::InvalidConfig => "InvalidConfig",
        TraceError::NotARoot { .. } => "NotARoot",
        TraceError::NotSimple { .. } => "NotSimple",
        TraceError::NotDoubleRoot { .. } => "NotDoubleRoot",
        TraceError::DegenerateModel { .. } => "DegenerateModel",
        TraceError::ZeroLambda => "ZeroLambda",
        TraceError::InvalidScan => "InvalidScan",
        TraceError::Root(r) => match r {
            RootError::NoConvergence { .. } => "NoConvergence",
            RootError::DerivativeVanished { .. } => "DerivativeVanished",
            RootError::NonFinite { .. } => "NonFinite",
            RootError::BoundaryZero { .. } => "BoundaryZero",
            RootError::Unresolved { .. } => "Unresolved",
            RootError::InvalidRegion => "InvalidRegion",
            RootError::InvalidConfig => "InvalidConfig",
        },
        TraceError::Shoot(_) => "ShootError",
        TraceError::Stepwell(_) => "StepwellError",
    }
}

#[derive(Debug, Parser)]
#[command(name = "spectrace", version, about = "Trace eigenvalues, antibound states and resonances of H(z) = -d²/dx² + V0 + z·V1")]
struct Args {
    command: Command,
    /// Job file (a previous report also works).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Unit square well of depth V; traces use V1 = indicator of [0, 1].
    #[arg(long, allow_hyphen_values = true, value_name = "V")]
    well: Option<f64>,
    #[arg(long, allow_hyphen_values = true, value_name = "RE0,IM0,RE1,IM1")]
    region: Option<String>,
    /// Starting λ.
    #[arg(long, allow_hyphen_values = true, value_name = "RE,IM")]
    seed: Option<String>,
    /// Coupling path vertices.
    #[arg(long, allow_hyphen_values = true, value_name = "RE,IM;RE,IM;...")]
    path: Option<String>,
    /// Steps per path edge (trace), samples (scan) or RK4 steps (sampled potentials).
    #[arg(long, value_name = "N")]
    steps: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    to: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Output prefix.
    #[arg(long, value_name = "PREFIX")]
    out: Option<String>,
}

fn floats(field: &'static str, text: &str, n: usize) -> Result<Vec<f64>, CliError> {
    let xs: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    match xs {
        Ok(xs) if xs.len() == n && xs.iter().all(|x| x.is_finite()) => Ok(xs),
        _ => Err(CliError::config(field, format!("expected {n} comma-separated finite numbers, got `{text}`"))),
    }
}

/// Merges the job file with command-line flags.
fn resolve(args: &Args) -> Result<JobConfig, CliError> {
    let mut job = match &args.config {
        Some(p) => JobConfig::load(p)?,
        None => JobConfig::default(),
    };
    job.command = Some(args.command);
    if let Some(v) = args.well {
        if !v.is_finite() {
            return Err(CliError::config("well", "must be finite"));
        }
        job.potential = Some(PotentialSpec::unit_well(v));
        if args.command == Command::Trace {
            job.perturbation = Some(PotentialSpec::Step {
                segments: vec![(1.0, [1.0, 0.0])],
            });
        }
    }
    if let Some(r) = &args.region {
        let x = floats("region", r, 4)?;
        job.region = Some([x[0], x[1], x[2], x[3]]);
    }
    if let Some(s) = &args.seed {
        let x = floats("seed", s, 2)?;
        job.seed = Some([x[0], x[1]]);
    }
    if let Some(p) = &args.path {
        let vertices = p
            .split(';')
            .map(|v| floats("path", v, 2).map(|x| [x[0], x[1]]))
            .collect::<Result<Vec<_>, _>>()?;
        let steps_per_edge = job.path.as_ref().map_or(PathSpec::DEFAULT_STEPS_PER_EDGE, |p| p.steps_per_edge);
        job.path = Some(PathJson {
            vertices,
            steps_per_edge,
        });
    }
    if args.from.is_some() || args.to.is_some() || args.samples.is_some() {
        let old = job.scan.clone();
        let pick = |flag: Option<f64>, old: Option<f64>| {
            flag.or(old).ok_or_else(|| CliError::config("scan", "needs --from and --to"))
        };
        job.scan = Some(ScanJson {
            from: pick(args.from, old.as_ref().map(|s| s.from))?,
            to: pick(args.to, old.as_ref().map(|s| s.to))?,
            samples: args.samples.or(old.map(|s| s.samples)).unwrap_or(DEFAULT_SCAN_SAMPLES),
        });
    }
    if let Some(n) = args.steps {
        match args.command {
            Command::Trace => match job.path.as_mut() {
                Some(p) => p.steps_per_edge = n,
                None => return Err(CliError::config("steps", "trace needs a path before --steps applies")),
            },
            Command::Scan => match job.scan.as_mut() {
                Some(s) => s.samples = n,
                None => return Err(CliError::config("steps", "scan needs --from/--to before --steps applies")),
            },
            Command::Find | Command::Count => job.integration_steps = Some(n),
        }
    }
    if let Some(o) = &args.out {
        job.output_prefix = Some(o.clone());
    }
    Ok(job)
}

const DEFAULT_SCAN_SAMPLES: usize = 260;

/// Fills every tolerance and replaces a κ seed by λ, so the echoed config
/// pins the run down completely.
fn pin(job: &JobConfig) -> Result<JobConfig, CliError> {
    let mut out = job.clone();
    let t = job.trace_config()?;
    let r = job.root_config()?;
    out.overrides = Overrides {
        band: Some(t.band),
        newton_tol: Some(t.newton_tol),
        collision_threshold: Some(t.collision_threshold),
        max_step_halvings: Some(t.max_step_halvings),
        divergence_radius: Some(t.divergence_radius),
        max_iter: Some(r.max_iter),
        min_separation: Some(r.min_separation),
        max_depth: Some(r.max_depth),
    };
    if job.command == Some(Command::Trace) {
        out.seed = Some(pair(job.seed()?));
        out.seed_kappa = None;
        out.seed_class = None;
    }
    Ok(out)
}

fn prefix(job: &JobConfig) -> String {
    job.output_prefix
        .clone()
        .unwrap_or_else(|| job.command.map_or("spectrace", Command::as_str).to_string())
}

fn state(t: f64, z: Complex64, lambda: Complex64) -> String {
    format!("t = {}, z = {}, lambda = {}", num(t), output::cnum(z), output::cnum(lambda))
}

fn run_find(job: &JobConfig, prefix: &str) -> Result<serde_json::Value, CliError> {
    let model = job.static_model()?;
    let region = job.region()?;
    let rc = job.root_config()?;
    let band = job.trace_config()?.band;
    let mut roots = seed_roots(&model.at(Complex64::new(0.0, 0.0)), &region, &rc)
        .map_err(|e| CliError::numerical(e, format!("region {:?}", job.region.unwrap_or_default())))?;
    roots.sort_by(|a, b| (a.lambda.re, a.lambda.im).partial_cmp(&(b.lambda.re, b.lambda.im)).unwrap());

    let mut csv = Csv::create(prefix, &["re_lambda", "im_lambda", "re_kappa", "im_kappa", "class"])?;
    let mut events = Vec::new();
    for r in &roots {
        let k = kappa_of(r.lambda);
        let class = classify(r.lambda, band);
        csv.row(&[num(r.lambda.re), num(r.lambda.im), num(k.re), num(k.im), class.as_str().into()])?;
        if r.status != RootStatus::Converged {
            events.push(json!({
                "kind": format!("{:?}", r.status),
                "detail": format!("lambda = {}, multiplicity {}, |f| = {}", output::cnum(r.lambda), r.multiplicity, num(r.residual)),
            }));
        }
    }
    csv.finish()?;
    output::write_events(prefix, events, "completed")?;
    Ok(json!({ "roots": roots.len() }))
}

fn run_trace(job: &JobConfig, prefix: &str) -> Result<serde_json::Value, CliError> {
    let model = job.model()?;
    let path = job.path()?;
    let seed = job.seed()?;
    let cfg = job.trace_config()?;
    let header = ["t", "re_z", "im_z", "re_lambda", "im_lambda", "re_kappa", "im_kappa", "class", "event"];
    let traj = match trace(&model, &path, seed, &cfg) {
        Ok(t) => t,
        Err(e) => {
            let last = match e {
                TraceError::StepCollapse { t, z, lambda } => state(t, z, lambda),
                _ => state(0.0, path.point(0.0), seed),
            };
            let err = CliError::numerical(e, last);
            Csv::create(prefix, &header)?.finish()?;
            output::write_events(prefix, Vec::new(), &format!("failed: {err}"))?;
            return Err(err);
        }
    };

    let mut csv = Csv::create(prefix, &header)?;
    for p in &traj.points {
        let k = p.kappa();
        let tags: Vec<&str> = traj.events.iter().filter(|e| e.t == p.t).map(|e| e.kind.as_str()).collect();
        csv.row(&[
            num(p.t),
            num(p.z.re),
            num(p.z.im),
            num(p.lambda.re),
            num(p.lambda.im),
            num(k.re),
            num(k.im),
            p.class.as_str().into(),
            tags.join("|"),
        ])?;
    }
    csv.finish()?;

    let events = traj.events.iter().map(output::trace_event).collect();
    let status = if traj.events_of(EventKind::Diverged).next().is_some() {
        "diverged"
    } else if traj.events_of(EventKind::Terminated).next().is_some() {
        "terminated"
    } else {
        "completed"
    };
    output::write_events(prefix, events, status)?;
    let last = traj.last().expect("trajectory has its seed point");
    Ok(json!({
        "status": status,
        "points": traj.points.len(),
        "final_lambda": output::jpair(last.lambda),
        "final_kappa": output::jpair(last.kappa()),
        "final_class": last.class.as_str(),
    }))
}

fn run_scan(job: &JobConfig, prefix: &str) -> Result<serde_json::Value, CliError> {
    let s = job.scan.as_ref().ok_or_else(|| CliError::config("scan", "required for scan"))?;
    let region = job.region()?;
    let cfg = job.trace_config()?;
    let log = scan_real_well(s.from, s.to, s.samples, &region, &cfg).map_err(|e| match e {
        TraceError::InvalidScan => CliError::config("scan", e.to_string()),
        e => CliError::numerical(e, format!("scan {} -> {}", num(s.from), num(s.to))),
    })?;

    let mut csv = Csv::create(prefix, &["kind", "v", "re_lambda", "im_lambda", "re_kappa", "im_kappa", "re_norm", "im_norm"])?;
    for e in &log.events {
        let k = e.kappa();
        let (nr, ni) = e.norm_integral.map_or((String::new(), String::new()), |n| (num(n.re), num(n.im)));
        csv.row(&[e.kind.as_str().into(), num(e.v), num(e.lambda.re), num(e.lambda.im), num(k.re), num(k.im), nr, ni])?;
    }
    csv.finish()?;
    let events = log
        .events
        .iter()
        .map(|e| {
            json!({
                "v": output::round(e.v),
                "kind": e.kind.as_str(),
                "detail": format!("lambda = {}", output::cnum(e.lambda)),
            })
        })
        .collect();
    output::write_events(prefix, events, "completed")?;
    Ok(json!({ "samples": log.samples.len(), "events": log.events.len() }))
}

/// Counts and bounds for the unit square well named by `potential`.
fn count_summary(job: &JobConfig) -> Result<serde_json::Value, CliError> {
    let v = match job.potential()? {
        PotentialSpec::Step { segments } if segments.len() == 1 && segments[0].0 == 1.0 && segments[0].1[1] == 0.0 => {
            segments[0].1[0]
        }
        _ => return Err(CliError::config("potential", "count needs a real unit square well (--well V)")),
    };
    let k_sq = (-v).max(0.0);
    let c = well_counts(k_sq);
    let b = bounds_report(v.abs());
    Ok(json!({
        "k_sq": c.k_sq,
        "n_eigen": c.n_eigen,
        "n_antibound": match c.n_antibound {
            AntiboundCount::Exact(n) => json!(n),
            AntiboundCount::Unknown => json!("unknown"),
        },
        "bounds": {
            "frank": output::round(b.frank),
            "bargmann": output::round(b.bargmann),
            "count_formula": b.count_formula,
            "interval": [output::round(b.interval_lo), output::round(b.interval_hi)],
        },
    }))
}

fn execute(job: &JobConfig) -> Result<(), CliError> {
    let pinned = pin(job)?;
    let command = job.command.expect("resolved");
    if command == Command::Count {
        let summary = count_summary(job)?;
        println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
        if let Some(prefix) = &job.output_prefix {
            output::write_report(prefix, &pinned, summary)?;
        }
        return Ok(());
    }
    let prefix = prefix(job);
    let summary = match command {
        Command::Find => run_find(&pinned, &prefix)?,
        Command::Trace => run_trace(&pinned, &prefix)?,
        Command::Scan => run_scan(&pinned, &prefix)?,
        Command::Count => unreachable!(),
    };
    output::write_report(&prefix, &pinned, summary)
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match resolve(&args).and_then(|job| execute(&job)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("spectrace: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> JobConfig {
        let mut full = vec!["spectrace"];
        full.extend_from_slice(args);
        resolve(&Args::try_parse_from(full).unwrap()).unwrap()
    }

    #[test]
    fn flags_fill_the_job() {
        let job = parse(&["trace", "--well", "-22", "--seed", "3.9,0", "--path", "0,0;1,0", "--steps", "17"]);
        assert_eq!(job.potential, Some(PotentialSpec::unit_well(-22.0)));
        assert!(job.perturbation.is_some());
        assert_eq!(job.seed, Some([3.9, 0.0]));
        assert_eq!(job.path.unwrap().steps_per_edge, 17);

        let job = parse(&["find", "--well", "-22", "--region", "-6,-8,8,8"]);
        assert!(job.perturbation.is_none());
        assert_eq!(job.region, Some([-6.0, -8.0, 8.0, 8.0]));
    }

    #[test]
    fn bad_flags_name_their_field() {
        let args = Args::try_parse_from(["spectrace", "find", "--region", "1,2,3"]).unwrap();
        assert_eq!(resolve(&args).unwrap_err().field(), Some("region"));
        let args = Args::try_parse_from(["spectrace", "trace", "--steps", "3"]).unwrap();
        assert_eq!(resolve(&args).unwrap_err().field(), Some("steps"));
    }

    #[test]
    fn error_kinds_are_named() {
        let e = CliError::numerical(RootError::NoConvergence { last: Complex64::new(1.0, 0.0), residual: 1.0 }, "x".into());
        assert!(e.to_string().starts_with("NoConvergence:"));
        assert_eq!(e.exit_code(), 3);
    }
}
