//! Seeded random sampling and the falsification suite.
//!
//! Each draw gets its own ChaCha8 stream: the generator is seeded with
//! `seed` and switched to stream `draw`, so a draw's points depend on
//! nothing else and draws can run in any order.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use erdos_core::clopen::{
    closedness_radius, failing_index, in_a, in_a_traced, in_o, in_o_traced, in_o_up_to,
    o_closedness_radius, o_openness_radius, openness_radius, AlphaBetaPair, Schedule,
};
use erdos_core::exact::{
    best_lower_bound, cmp_root_expr, format_rational, ratio, RootExpr, Term,
    DEFAULT_DENOMINATOR_CAP,
};
use erdos_core::witness::{
    construct_witness, generalized_witness, witness_checks, RaySource, VSpec, WitnessRecord,
};
use erdos_core::{Point, RadiusCertificate, Rational};
use num_bigint::BigInt;
use num_traits::One;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::formats::{CertificateJson, PointJson, RootValueJson, ScheduleJson, WitnessJson};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ClaimId {
    C1,
    C2,
    C3,
    C4,
    C5,
    Remark,
}

impl ClaimId {
    pub const ALL: [ClaimId; 6] = [
        ClaimId::C1,
        ClaimId::C2,
        ClaimId::C3,
        ClaimId::C4,
        ClaimId::C5,
        ClaimId::Remark,
    ];

    /// Accepts `1`..`5`, `C1`..`C5` and `remark`, case-insensitively.
    pub fn parse(text: &str) -> Option<Self> {
        let t = text.trim().to_ascii_lowercase();
        let t = t.strip_prefix('c').unwrap_or(&t);
        Some(match t {
            "1" => ClaimId::C1,
            "2" => ClaimId::C2,
            "3" => ClaimId::C3,
            "4" => ClaimId::C4,
            "5" => ClaimId::C5,
            "remark" => ClaimId::Remark,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleConfig {
    pub max_support: u32,
    pub max_index: u64,
    pub max_numerator: u64,
    pub max_denominator: u64,
    pub count: u64,
    /// Perturbations per base point for the neighbourhood claims.
    pub count_inner: u32,
    pub seed: u64,
    /// Denominator cap for certificate bounds.
    pub cap: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            max_support: 6,
            max_index: 12,
            max_numerator: 8,
            max_denominator: 8,
            count: 10_000,
            count_inner: 16,
            seed: 0,
            cap: DEFAULT_DENOMINATOR_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),
    #[error("invalid sample config: {0}")]
    InvalidConfig(&'static str),
}

impl SampleConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.max_index == 0 || self.max_numerator == 0 || self.max_denominator == 0 {
            return Err(HarnessError::InvalidConfig(
                "index and magnitude caps must be at least 1",
            ));
        }
        if self.cap == 0 {
            return Err(HarnessError::InvalidConfig(
                "denominator cap must be at least 1",
            ));
        }
        Ok(())
    }

    fn rng(&self, draw: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(draw);
        rng
    }
}

fn sample_with(config: &SampleConfig, rng: &mut ChaCha8Rng) -> Point {
    let max_support = u64::from(config.max_support).min(config.max_index);
    let size = rng.random_range(0..=max_support) as usize;
    let indices = index::sample(rng, config.max_index as usize, size);
    let mut coords: Vec<(u64, Rational)> = indices
        .into_iter()
        .map(|i| {
            let magnitude = rng.random_range(1..=config.max_numerator);
            let numer = if rng.random_bool(0.5) {
                -BigInt::from(magnitude)
            } else {
                BigInt::from(magnitude)
            };
            let denom = BigInt::from(rng.random_range(1..=config.max_denominator));
            (i as u64 + 1, Rational::new(numer, denom))
        })
        .collect();
    coords.sort_by_key(|(i, _)| *i);
    Point::from_coords(coords).expect("indices start at 1")
}

/// The point for `draw`, a deterministic function of `(config, draw)`.
pub fn sample_point(config: &SampleConfig, draw: u64) -> Point {
    sample_with(config, &mut config.rng(draw))
}

fn sample_nonzero(config: &SampleConfig, rng: &mut ChaCha8Rng) -> Point {
    let p = sample_with(config, rng);
    if p.is_zero() {
        Point::unit(rng.random_range(1..=config.max_index))
    } else {
        p
    }
}

fn ceil_sqrt(n: &BigInt) -> BigInt {
    let s = n.sqrt();
    if &s * &s < *n {
        s + 1
    } else {
        s
    }
}

/// A rational `w >= ‖d‖`, within about `2^-10` of it.
fn norm_upper(d: &Point) -> Rational {
    const SHIFT: u32 = 10;
    let scaled = d.norm_sq() * Rational::from_integer(BigInt::one() << (2 * SHIFT));
    let w = ceil_sqrt(&scaled.ceil().to_integer());
    Rational::new(w, BigInt::one() << SHIFT)
}

const FRACTION_STEPS: u64 = 16;

/// `center + f·d` with `‖f·d‖ < bound`: `f = u·bound/w` with `w >= ‖d‖` and
/// `u ∈ (0, 1)`.
fn perturb(config: &SampleConfig, rng: &mut ChaCha8Rng, center: &Point, bound: &Rational) -> Point {
    let d = sample_nonzero(config, rng);
    let u = Rational::new(
        BigInt::from(rng.random_range(1..=FRACTION_STEPS)),
        BigInt::from(FRACTION_STEPS + 1),
    );
    center.add(&d.scale(&(u * bound / norm_upper(&d))))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub draw: u64,
    pub check: &'static str,
    pub points: BTreeMap<&'static str, PointJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
    pub trace: Vec<String>,
}

impl Violation {
    fn new(draw: u64, check: &'static str) -> Self {
        Self {
            draw,
            check,
            points: BTreeMap::new(),
            certificate: None,
            witness: None,
            trace: Vec::new(),
        }
    }

    fn point(mut self, name: &'static str, p: &Point) -> Self {
        self.points.insert(name, p.into());
        self
    }

    fn certificate(mut self, c: &RadiusCertificate) -> Self {
        self.certificate = Some(c.into());
        self
    }

    fn witness(mut self, w: &WitnessRecord, schedule: &Schedule) -> Self {
        self.witness = Some(WitnessJson::new(w, &witness_checks(w, schedule)));
        self
    }

    fn trace(mut self, lines: Vec<String>) -> Self {
        self.trace = lines;
        self
    }

    fn note(mut self, line: String) -> Self {
        self.trace.push(line);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairJson {
    pub alpha: RootValueJson,
    pub beta: RootValueJson,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    #[serde(flatten)]
    pub sample: SampleConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimReport {
    pub claim: ClaimId,
    pub samples_run: u64,
    /// Draws that satisfied the claim's hypothesis.
    pub eligible: u64,
    pub violations: Vec<Violation>,
    /// Wall-clock time; `null` unless requested, so that reports for the same
    /// inputs are byte-identical.
    pub elapsed_ms: Option<u64>,
    pub config: ConfigEcho,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl ClaimReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn with_timing(mut self) -> Self {
        self.elapsed_ms = Some(self.elapsed.as_millis() as u64);
        self
    }
}

/// Thresholds for a claim: one pair for C1–C3, or a schedule. Under a
/// schedule, C1–C3 cycle through the pairs `(αₙ, βₙ)`, `n = 1..=PAIR_CYCLE`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Params {
    Pair(AlphaBetaPair),
    Schedule(Schedule),
}

pub const PAIR_CYCLE: u64 = 4;

#[derive(Default)]
struct Outcome {
    eligible: bool,
    violations: Vec<Violation>,
}

impl Outcome {
    fn eligible() -> Self {
        Self {
            eligible: true,
            violations: Vec::new(),
        }
    }

    fn fail(&mut self, v: Violation) {
        self.violations.push(v);
    }
}

struct Ctx<'a> {
    config: &'a SampleConfig,
    params: &'a Params,
}

impl Ctx<'_> {
    fn pair(&self, draw: u64) -> AlphaBetaPair {
        match self.params {
            Params::Pair(p) => p.clone(),
            Params::Schedule(s) => s.pair_at(1 + draw % PAIR_CYCLE),
        }
    }

    fn schedule(&self) -> &Schedule {
        match self.params {
            Params::Schedule(s) => s,
            Params::Pair(_) => unreachable!("checked in verify_claim"),
        }
    }
}

fn traced_a(y: &Point, pair: &AlphaBetaPair) -> Vec<String> {
    let mut t = Vec::new();
    in_a_traced(y, pair, &mut t);
    t
}

fn traced_o(y: &Point, s: &Schedule) -> Vec<String> {
    let mut t = Vec::new();
    in_o_traced(y, s, &mut t);
    t
}

fn check_c1(ctx: &Ctx, draw: u64) -> Outcome {
    let mut rng = ctx.config.rng(draw);
    let pair = ctx.pair(draw);
    let alpha = RootExpr::root(pair.alpha().clone());
    let mut x = sample_with(ctx.config, &mut rng);
    let norm_below = |p: &Point| {
        cmp_root_expr(&RootExpr::term(Term::sqrt_of(&p.norm_sq())), &alpha)
            == Ok(std::cmp::Ordering::Less)
    };
    if !norm_below(&x) {
        // Pull the point into the ball; the hypothesis is then rechecked exactly.
        let b = best_lower_bound(std::slice::from_ref(&alpha), ctx.config.cap).expect("alpha > 0");
        x = perturb(ctx.config, &mut rng, &Point::zero(), &b);
    }
    let mut out = Outcome::default();
    if !norm_below(&x) {
        return out;
    }
    out.eligible = true;
    if !in_a(&x, &pair) {
        out.fail(
            Violation::new(draw, "ball_inside_A")
                .point("x", &x)
                .trace(traced_a(&x, &pair)),
        );
    }
    out
}

fn check_c2(ctx: &Ctx, draw: u64) -> Outcome {
    let mut rng = ctx.config.rng(draw);
    let pair = ctx.pair(draw);
    let z = sample_with(ctx.config, &mut rng);
    if in_a(&z, &pair) {
        return Outcome::default();
    }
    let mut out = Outcome::eligible();
    let cert = match closedness_radius(&z, &pair, ctx.config.cap) {
        Ok(c) => c,
        Err(e) => {
            out.fail(
                Violation::new(draw, "certificate_exists")
                    .point("z", &z)
                    .note(e.to_string()),
            );
            return out;
        }
    };
    for _ in 0..ctx.config.count_inner {
        let y = perturb(ctx.config, &mut rng, &z, &cert.bound);
        if !cert.covers(&z, &y) {
            out.fail(
                Violation::new(draw, "perturbation_in_radius")
                    .point("z", &z)
                    .point("y", &y)
                    .certificate(&cert),
            );
        } else if in_a(&y, &pair) {
            out.fail(
                Violation::new(draw, "ball_outside_A")
                    .point("z", &z)
                    .point("y", &y)
                    .certificate(&cert)
                    .trace(traced_a(&y, &pair)),
            );
        }
    }
    out
}

fn check_c3(ctx: &Ctx, draw: u64) -> Outcome {
    let mut rng = ctx.config.rng(draw);
    let pair = ctx.pair(draw);
    let x = sample_with(ctx.config, &mut rng);
    if !in_a(&x, &pair) {
        return Outcome::default();
    }
    let mut out = Outcome::eligible();
    let cert = match openness_radius(&x, &pair, ctx.config.cap) {
        Ok(c) => c,
        Err(e) => {
            out.fail(
                Violation::new(draw, "certificate_exists")
                    .point("x", &x)
                    .note(e.to_string()),
            );
            return out;
        }
    };
    for _ in 0..ctx.config.count_inner {
        let y = perturb(ctx.config, &mut rng, &x, &cert.bound);
        if !cert.covers(&x, &y) {
            out.fail(
                Violation::new(draw, "perturbation_in_radius")
                    .point("x", &x)
                    .point("y", &y)
                    .certificate(&cert),
            );
        } else if !in_a(&y, &pair) {
            out.fail(
                Violation::new(draw, "ball_inside_A")
                    .point("x", &x)
                    .point("y", &y)
                    .certificate(&cert)
                    .trace(traced_a(&y, &pair)),
            );
        }
    }
    out
}

const FINITE_CHECK_SLACK: u64 = 10;

fn check_c4(ctx: &Ctx, draw: u64) -> Outcome {
    let s = ctx.schedule();
    let mut rng = ctx.config.rng(draw);
    let x = sample_with(ctx.config, &mut rng);
    let mut out = Outcome::eligible();
    if draw == 0 && !in_o(&Point::zero(), s) {
        out.fail(Violation::new(draw, "zero_in_O").trace(traced_o(&Point::zero(), s)));
    }
    let member = in_o(&x, s);
    let upto = s.ball_index(&x) + FINITE_CHECK_SLACK;
    if in_o_up_to(&x, s, upto) != member {
        out.fail(
            Violation::new(draw, "finite_check_sound")
                .point("x", &x)
                .note(format!("in_O = {member}, first {upto} sets disagree")),
        );
    }
    let cert = if member {
        o_openness_radius(&x, s, ctx.config.cap)
    } else {
        o_closedness_radius(&x, s, ctx.config.cap).map(|(_, c)| c)
    };
    let cert = match cert {
        Ok(c) => c,
        Err(e) => {
            out.fail(
                Violation::new(draw, "certificate_exists")
                    .point("x", &x)
                    .note(e.to_string()),
            );
            return out;
        }
    };
    for _ in 0..ctx.config.count_inner {
        let y = perturb(ctx.config, &mut rng, &x, &cert.bound);
        if !cert.covers(&x, &y) {
            out.fail(
                Violation::new(draw, "perturbation_in_radius")
                    .point("x", &x)
                    .point("y", &y)
                    .certificate(&cert),
            );
        } else if in_o(&y, s) != member {
            let check = if member {
                "ball_inside_O"
            } else {
                "ball_outside_O"
            };
            out.fail(
                Violation::new(draw, check)
                    .point("x", &x)
                    .point("y", &y)
                    .certificate(&cert)
                    .trace(traced_o(&y, s)),
            );
        }
    }
    out
}

fn sample_radius(config: &SampleConfig, rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(
        BigInt::from(rng.random_range(1..=config.max_numerator)),
        BigInt::from(rng.random_range(1..=config.max_denominator)),
    )
}

fn witness_failures(draw: u64, w: &WitnessRecord, s: &Schedule, out: &mut Outcome) {
    let failed: Vec<_> = witness_checks(w, s)
        .into_iter()
        .filter(|c| !c.holds)
        .collect();
    if !failed.is_empty() {
        out.fail(
            Violation::new(draw, failed[0].name)
                .point("x", &w.x)
                .point("z", &w.z)
                .witness(w, s)
                .trace(
                    failed
                        .into_iter()
                        .map(|c| format!("{}: {}", c.name, c.trace))
                        .collect(),
                ),
        );
    }
}

fn check_c5(ctx: &Ctx, draw: u64) -> Outcome {
    let s = ctx.schedule();
    let mut rng = ctx.config.rng(draw);
    let r_star = sample_radius(ctx.config, &mut rng);
    let source = RaySource::new(sample_nonzero(ctx.config, &mut rng)).expect("nonzero direction");
    let mut out = Outcome::eligible();
    let built = VSpec::new(r_star.clone(), source.clone()).and_then(|v| construct_witness(&v, s));
    match built {
        Ok(w) => witness_failures(draw, &w, s, &mut out),
        Err(e) => out.fail(
            Violation::new(draw, "witness_exists")
                .point("direction", source.direction())
                .note(format!("r* = {}: {e}", format_rational(&r_star))),
        ),
    }
    out
}

pub const REMARK_EPSILONS: [(i64, i64); 3] = [(1, 10), (1, 2), (1, 1)];

fn check_remark(ctx: &Ctx, draw: u64) -> Outcome {
    let s = ctx.schedule();
    let mut rng = ctx.config.rng(draw);
    let (p, q) = REMARK_EPSILONS[(draw % 3) as usize];
    let eps = ratio(p, q);
    let source = RaySource::new(sample_nonzero(ctx.config, &mut rng)).expect("nonzero direction");
    let mut out = Outcome::eligible();
    match generalized_witness(&source, eps.clone(), s) {
        Ok(w) => {
            if !(w.y.norm_sq() < &eps * &eps) || failing_index(&w.z, s).is_none() {
                out.fail(
                    Violation::new(draw, "remark_witness")
                        .point("z", &w.z)
                        .witness(&w, s)
                        .trace(traced_o(&w.z, s)),
                );
            }
            witness_failures(draw, &w, s, &mut out);
        }
        Err(e) => out.fail(
            Violation::new(draw, "witness_exists")
                .point("direction", source.direction())
                .note(format!("eps = {}: {e}", format_rational(&eps))),
        ),
    }
    out
}

/// Runs one claim over `config.count` draws. Draws are evaluated in parallel
/// and reported in draw order.
pub fn verify_claim(
    claim: ClaimId,
    params: &Params,
    config: &SampleConfig,
) -> Result<ClaimReport, HarnessError> {
    config.validate()?;
    let needs_schedule = matches!(claim, ClaimId::C4 | ClaimId::C5 | ClaimId::Remark);
    if needs_schedule && matches!(params, Params::Pair(_)) {
        return Err(HarnessError::InvalidParams("this claim needs a schedule"));
    }
    let check: fn(&Ctx, u64) -> Outcome = match claim {
        ClaimId::C1 => check_c1,
        ClaimId::C2 => check_c2,
        ClaimId::C3 => check_c3,
        ClaimId::C4 => check_c4,
        ClaimId::C5 => check_c5,
        ClaimId::Remark => check_remark,
    };
    let ctx = Ctx { config, params };
    let start = Instant::now();
    let outcomes: Vec<Outcome> = (0..config.count)
        .into_par_iter()
        .map(|draw| check(&ctx, draw))
        .collect();
    let elapsed = start.elapsed();

    let eligible = outcomes.iter().filter(|o| o.eligible).count() as u64;
    let violations = outcomes.into_iter().flat_map(|o| o.violations).collect();
    let (schedule, pair) = match params {
        Params::Schedule(s) => (Some(s.into()), None),
        Params::Pair(p) => (
            None,
            Some(PairJson {
                alpha: p.alpha().into(),
                beta: p.beta().into(),
            }),
        ),
    };
    Ok(ClaimReport {
        claim,
        samples_run: config.count,
        eligible,
        violations,
        elapsed_ms: None,
        config: ConfigEcho {
            sample: config.clone(),
            schedule,
            pair,
        },
        elapsed,
    })
}

/// Every requested claim under one schedule and config.
pub fn run_suite(
    schedule: &Schedule,
    config: &SampleConfig,
    claims: &[ClaimId],
) -> Result<Vec<ClaimReport>, HarnessError> {
    let params = Params::Schedule(schedule.clone());
    claims
        .iter()
        .map(|c| verify_claim(*c, &params, config))
        .collect()
}

pub fn all_pass(reports: &[ClaimReport]) -> bool {
    reports.iter().all(ClaimReport::passed)
}
