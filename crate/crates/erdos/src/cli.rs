//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when `verify` finds a violation or a produced
//! document fails its own re-checks, 2 for invalid input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use erdos_core::clopen::{
    closedness_radius, in_a_traced, in_e_alpha_traced, in_o_traced, o_closedness_radius,
    o_openness_radius, openness_radius, AlphaBetaPair, Schedule,
};
use erdos_core::exact::{RootValue, DEFAULT_DENOMINATOR_CAP};
use erdos_core::witness::{
    construct_witness, refute_group_compatibility, witness_checks, ListSource, PointSource,
    RaySource, VSpec,
};
use erdos_core::Rational;
use serde::Serialize;

use crate::formats::{self, CertificateJson, InputError, VerdictJson, WitnessJson};
use crate::harness::{self, ClaimId, SampleConfig};

#[derive(Debug, Parser)]
#[command(
    name = "erdos",
    version,
    about = "Exact checks for a clopen neighbourhood of zero in Erdős space"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide membership of a point in E_alpha, A_{alpha,beta} or O.
    Check(CheckArgs),
    /// Certify a neighbourhood radius around a point.
    Radius(RadiusArgs),
    /// Build z = x + y outside O with x, y in a candidate neighbourhood V.
    Witness(WitnessArgs),
    /// Assemble the full argument that the clopen topology is not a group topology.
    Refute(RefuteArgs),
    /// Run the randomized claim suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SetKind {
    #[value(name = "Ealpha", alias = "ealpha")]
    Ealpha,
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "O", alias = "o")]
    O,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RadiusKind {
    Closed,
    Open,
    OOpen,
}

#[derive(Debug, Args)]
pub struct Thresholds {
    /// alpha = (R)^(1/4)
    #[arg(long, value_name = "R")]
    pub alpha_base: Option<String>,
    /// beta = (R)^(1/2)
    #[arg(long, value_name = "R")]
    pub beta_base: Option<String>,
    /// Schedule file, or `default` for alpha_n = n*2^(1/4), beta_n = sqrt(2)/n.
    #[arg(long, value_name = "S.json")]
    pub schedule: Option<String>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, value_name = "P.json")]
    pub point: PathBuf,
    #[arg(long, value_enum)]
    pub set: SetKind,
    #[command(flatten)]
    pub thresholds: Thresholds,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RadiusArgs {
    #[arg(long, value_name = "P.json")]
    pub point: PathBuf,
    #[arg(long, value_enum)]
    pub kind: RadiusKind,
    #[command(flatten)]
    pub thresholds: Thresholds,
    /// Largest denominator for the certified bound.
    #[arg(long, default_value_t = DEFAULT_DENOMINATOR_CAP)]
    pub cap: u64,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    /// r* with B(0, r*) inside V, as p/q.
    #[arg(long, value_name = "Q")]
    pub ball_radius: String,
    /// `ray` for the multiples of e^1, `ray:P.json` for the multiples of a
    /// point, `file:PTS.json` for a list of points.
    #[arg(long, default_value = "ray")]
    pub source: String,
    #[arg(long, default_value = "default")]
    pub schedule: String,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RefuteArgs {
    #[command(flatten)]
    pub witness: WitnessArgs,
    #[arg(long, default_value_t = DEFAULT_DENOMINATOR_CAP)]
    pub cap: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Comma-separated claims: 1,2,3,4,5,remark
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,remark")]
    pub claims: Vec<String>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value = "default")]
    pub schedule: String,
    #[arg(long, default_value_t = 16)]
    pub inner: u32,
    #[arg(long, default_value_t = 6)]
    pub max_support: u32,
    #[arg(long, default_value_t = 12)]
    pub max_index: u64,
    #[arg(long, default_value_t = 8)]
    pub max_numerator: u64,
    #[arg(long, default_value_t = 8)]
    pub max_denominator: u64,
    #[arg(long, default_value_t = DEFAULT_DENOMINATOR_CAP)]
    pub cap: u64,
    /// Record wall-clock times in the report; output then varies between runs.
    #[arg(long)]
    pub timings: bool,
    #[arg(long, value_name = "R.json")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("{0}")]
    Invalid(String),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    fn invalid(e: impl std::fmt::Display) -> Self {
        CliError::Invalid(e.to_string())
    }
}

#[derive(Serialize)]
struct Membership {
    member: bool,
    set: &'static str,
    trace: Vec<String>,
}

#[derive(Serialize)]
struct RadiusDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    failing_n: Option<u64>,
    #[serde(flatten)]
    certificate: CertificateJson,
}

fn pair(t: &Thresholds) -> Result<AlphaBetaPair, CliError> {
    match (&t.alpha_base, &t.beta_base) {
        (Some(a), Some(b)) => {
            AlphaBetaPair::from_bases(formats::rational(a)?, formats::rational(b)?)
                .map_err(CliError::invalid)
        }
        _ => Err(CliError::Invalid(
            "this set needs --alpha-base and --beta-base".into(),
        )),
    }
}

fn alpha(t: &Thresholds) -> Result<RootValue, CliError> {
    let a = t
        .alpha_base
        .as_deref()
        .ok_or_else(|| CliError::Invalid("E_alpha needs --alpha-base".into()))?;
    RootValue::fourth_root(formats::rational(a)?).map_err(CliError::invalid)
}

fn schedule(t: &Thresholds) -> Result<Schedule, CliError> {
    Ok(formats::read_schedule(
        t.schedule.as_deref().unwrap_or("default"),
    )?)
}

fn check(args: &CheckArgs) -> Result<ExitCode, CliError> {
    let x = formats::read_point(&args.point)?;
    let mut trace = Vec::new();
    let (member, set) = match args.set {
        SetKind::Ealpha => (
            in_e_alpha_traced(&x, &alpha(&args.thresholds)?, &mut trace),
            "Ealpha",
        ),
        SetKind::A => (in_a_traced(&x, &pair(&args.thresholds)?, &mut trace), "A"),
        SetKind::O => (
            in_o_traced(&x, &schedule(&args.thresholds)?, &mut trace),
            "O",
        ),
    };
    formats::write_json(args.out.as_deref(), &Membership { member, set, trace })?;
    Ok(ExitCode::SUCCESS)
}

fn radius(args: &RadiusArgs) -> Result<ExitCode, CliError> {
    let x = formats::read_point(&args.point)?;
    let t = &args.thresholds;
    if args.cap == 0 {
        return Err(CliError::Invalid("--cap must be at least 1".into()));
    }
    let uses_pair = t.alpha_base.is_some() || t.beta_base.is_some();
    let (failing_n, cert) = match args.kind {
        RadiusKind::Closed if uses_pair => (None, closedness_radius(&x, &pair(t)?, args.cap)),
        RadiusKind::Closed => match o_closedness_radius(&x, &schedule(t)?, args.cap) {
            Ok((n, c)) => (Some(n), Ok(c)),
            Err(e) => (None, Err(e)),
        },
        RadiusKind::Open => (None, openness_radius(&x, &pair(t)?, args.cap)),
        RadiusKind::OOpen => (None, o_openness_radius(&x, &schedule(t)?, args.cap)),
    };
    let cert = cert.map_err(CliError::invalid)?;
    let doc = RadiusDoc {
        failing_n,
        certificate: (&cert).into(),
    };
    formats::write_json(args.out.as_deref(), &doc)?;
    Ok(ExitCode::SUCCESS)
}

fn source(spec: &str) -> Result<Box<dyn PointSource + Send + Sync>, CliError> {
    if spec == "ray" {
        return Ok(Box::new(RaySource::axis()));
    }
    if let Some(path) = spec.strip_prefix("ray:") {
        let d = formats::read_point(path.as_ref())?;
        return RaySource::new(d)
            .map(|r| Box::new(r) as Box<dyn PointSource + Send + Sync>)
            .ok_or_else(|| CliError::Invalid("ray direction must be nonzero".into()));
    }
    if let Some(path) = spec.strip_prefix("file:") {
        return Ok(Box::new(ListSource::new(formats::read_points(
            path.as_ref(),
        )?)));
    }
    Err(CliError::Invalid(format!(
        "unknown source {spec:?}; expected ray, ray:P.json or file:PTS.json"
    )))
}

fn vspec(args: &WitnessArgs) -> Result<VSpec<Box<dyn PointSource + Send + Sync>>, CliError> {
    let r: Rational = formats::rational(&args.ball_radius)?;
    VSpec::new(r, source(&args.source)?).map_err(CliError::invalid)
}

fn witness(args: &WitnessArgs) -> Result<ExitCode, CliError> {
    let s = formats::read_schedule(&args.schedule)?;
    let w = construct_witness(&vspec(args)?, &s).map_err(CliError::invalid)?;
    let checks = witness_checks(&w, &s);
    let ok = checks.iter().all(|c| c.holds);
    formats::write_json(args.out.as_deref(), &WitnessJson::new(&w, &checks))?;
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn refute(args: &RefuteArgs) -> Result<ExitCode, CliError> {
    let s = formats::read_schedule(&args.witness.schedule)?;
    let verdict = refute_group_compatibility(&vspec(&args.witness)?, &s, args.cap)
        .map_err(CliError::invalid)?;
    formats::write_json(args.witness.out.as_deref(), &VerdictJson::from(&verdict))?;
    Ok(if verdict.verified {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn verify(args: &VerifyArgs) -> Result<ExitCode, CliError> {
    let claims = args
        .claims
        .iter()
        .map(|c| ClaimId::parse(c).ok_or_else(|| CliError::Invalid(format!("unknown claim {c:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let s = formats::read_schedule(&args.schedule)?;
    let config = SampleConfig {
        max_support: args.max_support,
        max_index: args.max_index,
        max_numerator: args.max_numerator,
        max_denominator: args.max_denominator,
        count: args.samples,
        count_inner: args.inner,
        seed: args.seed,
        cap: args.cap,
    };
    let mut reports = harness::run_suite(&s, &config, &claims).map_err(CliError::invalid)?;
    for r in &reports {
        eprintln!(
            "{:?}: {} ({} samples, {} eligible, {} violations, {} ms)",
            r.claim,
            if r.passed() { "pass" } else { "FAIL" },
            r.samples_run,
            r.eligible,
            r.violations.len(),
            r.elapsed.as_millis()
        );
    }
    if args.timings {
        reports = reports.into_iter().map(|r| r.with_timing()).collect();
    }
    formats::write_json(args.report.as_deref(), &reports)?;
    Ok(if harness::all_pass(&reports) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn execute(cli: &Cli) -> Result<ExitCode, CliError> {
    match &cli.command {
        Command::Check(a) => check(a),
        Command::Radius(a) => radius(a),
        Command::Witness(a) => witness(a),
        Command::Refute(a) => refute(a),
        Command::Verify(a) => verify(a),
    }
}

pub fn main_with(cli: Cli) -> ExitCode {
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
