//! JSON encodings of the core types.
//!
//! Rationals are `"p/q"` strings, points are `{"coords": {"1": "4/1"}}` with
//! 1-based indices, root values are `{"base": "p/q", "degree": 2|4}`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use erdos_core::clopen::{CertificateKind, Schedule};
use erdos_core::exact::{format_rational, parse_rational, RootDegree};
use erdos_core::witness::{Check, Verdict, WitnessRecord};
use erdos_core::{Point, RadiusCertificate, Rational, RootValue};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("invalid rational: {0:?}")]
    InvalidRational(String),
    #[error("invalid root value: {0}")]
    InvalidRoot(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

pub fn rational(text: &str) -> Result<Rational, InputError> {
    parse_rational(text).map_err(|_| InputError::InvalidRational(text.to_owned()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointJson {
    pub coords: BTreeMap<u64, String>,
}

impl From<&Point> for PointJson {
    fn from(p: &Point) -> Self {
        Self {
            coords: p.iter().map(|(i, v)| (i, format_rational(v))).collect(),
        }
    }
}

impl TryFrom<&PointJson> for Point {
    type Error = InputError;

    fn try_from(json: &PointJson) -> Result<Self, InputError> {
        let coords = json
            .coords
            .iter()
            .map(|(i, v)| Ok((*i, rational(v)?)))
            .collect::<Result<Vec<_>, InputError>>()?;
        Point::from_coords(coords)
            .map_err(|_| InputError::InvalidPoint("index 0; indices start at 1".into()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootValueJson {
    pub base: String,
    pub degree: u32,
}

impl From<&RootValue> for RootValueJson {
    fn from(r: &RootValue) -> Self {
        Self {
            base: format_rational(r.base()),
            degree: r.degree().as_u32(),
        }
    }
}

impl TryFrom<&RootValueJson> for RootValue {
    type Error = InputError;

    fn try_from(json: &RootValueJson) -> Result<Self, InputError> {
        let degree = RootDegree::from_u32(json.degree).ok_or_else(|| {
            InputError::InvalidRoot(format!("degree {} is not 2 or 4", json.degree))
        })?;
        RootValue::new(rational(&json.base)?, degree)
            .map_err(|e| InputError::InvalidRoot(e.to_string()))
    }
}

/// `αₙ = n·alpha_scale^(1/degree)`, `βₙ = √beta_scale / n`; only degree 4 is
/// accepted since `αₙ²` must be irrational.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleJson {
    pub alpha_scale: String,
    pub beta_scale: String,
    pub degree: u32,
}

impl From<&Schedule> for ScheduleJson {
    fn from(s: &Schedule) -> Self {
        Self {
            alpha_scale: format_rational(s.alpha_scale()),
            beta_scale: format_rational(s.beta_scale()),
            degree: 4,
        }
    }
}

impl TryFrom<&ScheduleJson> for Schedule {
    type Error = InputError;

    fn try_from(json: &ScheduleJson) -> Result<Self, InputError> {
        if json.degree != 4 {
            return Err(InputError::InvalidSchedule(format!(
                "degree {} is not 4",
                json.degree
            )));
        }
        Schedule::new(rational(&json.alpha_scale)?, rational(&json.beta_scale)?)
            .map_err(|e| InputError::InvalidSchedule(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentJson {
    pub name: &'static str,
    pub expr: String,
    pub approx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateJson {
    pub kind: &'static str,
    pub bound: String,
    pub components: Vec<ComponentJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l0: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n0: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<PartJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartJson {
    pub n: u64,
    pub certificate: CertificateJson,
}

impl From<&RadiusCertificate> for CertificateJson {
    fn from(c: &RadiusCertificate) -> Self {
        Self {
            kind: c.kind.name(),
            bound: format_rational(&c.bound),
            components: c
                .components
                .iter()
                .map(|comp| ComponentJson {
                    name: comp.name,
                    expr: comp.value.to_string(),
                    approx: comp.approx(),
                })
                .collect(),
            m: c.m,
            l0: c.l0,
            n0: c.n0,
            parts: c
                .parts
                .iter()
                .map(|(n, cert)| PartJson {
                    n: *n,
                    certificate: cert.into(),
                })
                .collect(),
        }
    }
}

pub fn kind_from_name(name: &str) -> Option<CertificateKind> {
    [
        CertificateKind::Claim1Margin,
        CertificateKind::Claim2R0,
        CertificateKind::Claim3R1,
        CertificateKind::Claim3R,
        CertificateKind::Claim4W,
    ]
    .into_iter()
    .find(|k| k.name() == name)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckJson {
    pub name: &'static str,
    pub trace: String,
    pub holds: bool,
}

impl From<&Check> for CheckJson {
    fn from(c: &Check) -> Self {
        Self {
            name: c.name,
            trace: c.trace.clone(),
            holds: c.holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessJson {
    pub ball_radius: String,
    pub x: PointJson,
    pub y: PointJson,
    pub z: PointJson,
    pub n_star: u64,
    pub m_star: u64,
    pub l_star: u64,
    pub q: String,
    pub case: &'static str,
    pub failing_n: u64,
    pub checks: Vec<CheckJson>,
}

impl WitnessJson {
    pub fn new(w: &WitnessRecord, checks: &[Check]) -> Self {
        Self {
            ball_radius: format_rational(&w.ball_radius),
            x: (&w.x).into(),
            y: (&w.y).into(),
            z: (&w.z).into(),
            n_star: w.n_star,
            m_star: w.m_star,
            l_star: w.l_star,
            q: format_rational(&w.q),
            case: w.case.name(),
            failing_n: w.failing_n,
            checks: checks.iter().map(CheckJson::from).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictJson {
    pub premise: &'static str,
    pub neighbourhood: CertificateJson,
    pub witness: WitnessJson,
    pub conclusion: &'static str,
    pub verified: bool,
}

impl From<&Verdict> for VerdictJson {
    fn from(v: &Verdict) -> Self {
        Self {
            premise: v.premise,
            neighbourhood: (&v.neighbourhood).into(),
            witness: WitnessJson::new(&v.witness, &v.checks),
            conclusion: v.conclusion,
            verified: v.verified,
        }
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| InputError::Json {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_point(path: &Path) -> Result<Point, InputError> {
    Point::try_from(&read_json::<PointJson>(path)?)
}

pub fn read_points(path: &Path) -> Result<Vec<Point>, InputError> {
    read_json::<Vec<PointJson>>(path)?
        .iter()
        .map(Point::try_from)
        .collect()
}

/// `"default"` or a path to a schedule file.
pub fn read_schedule(arg: &str) -> Result<Schedule, InputError> {
    if arg == "default" {
        return Ok(Schedule::default());
    }
    Schedule::try_from(&read_json::<ScheduleJson>(Path::new(arg))?)
}

fn pretty() -> bool {
    std::env::var("ERDOS_REPORT_PRETTY").is_ok_and(|v| !v.is_empty() && v != "0")
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = if pretty() {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    }
    .expect("report types serialize");
    text.push('\n');
    text
}

/// Writes `value` to `path` via a temporary file in the same directory, so
/// the target either keeps its old content or gets the complete new one.
/// With no path the document goes to stdout.
pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> std::io::Result<()> {
    let text = to_json(value);
    let Some(path) = path else {
        return std::io::stdout().write_all(text.as_bytes());
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
