//! Acceptance criteria, one line each. Runs without the libtest harness so
//! that every criterion reports even when an earlier one fails.

use std::cmp::Ordering;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use erdos_core::clopen::{
    closedness_radius, in_a, in_o, o_openness_radius, openness_radius, AlphaBetaPair,
    CertificateKind, RadiusCertificate, Schedule,
};
use erdos_core::exact::{
    cmp_rational_vs_root, cmp_root_expr, int, ratio, RootDegree, RootExpr, RootValue, Term,
};
use erdos_core::witness::{
    construct_witness, generalized_witness, witness_checks, PointSource, RaySource, VSpec,
    WitnessRecord,
};
use erdos_core::{Point, Rational};
use erdos_oracle::{OTerm, Oracle};
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed;

type Outcome = Result<String, String>;

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

fn coords(x: &Point) -> Vec<(u64, Rational)> {
    x.iter().map(|(i, v)| (i, v.clone())).collect()
}

fn random_rational(r: &mut ChaCha8Rng, num: i64, den: i64) -> Rational {
    ratio(r.random_range(-num..=num), r.random_range(1..=den))
}

fn random_point(r: &mut ChaCha8Rng, max_index: u64, num: i64, den: i64) -> Point {
    let size = r.random_range(0..=6);
    let c: Vec<(u64, Rational)> = (0..size)
        .map(|_| (r.random_range(1..=max_index), random_rational(r, num, den)))
        .collect();
    // duplicate indices: the later draw wins
    let map: std::collections::BTreeMap<_, _> = c.into_iter().collect();
    Point::from_coords(map).unwrap()
}

fn random_nonzero(r: &mut ChaCha8Rng) -> Point {
    loop {
        let p = random_point(r, 12, 8, 8);
        if !p.is_zero() {
            return p;
        }
    }
}

// criterion 1 and 7

fn run_verify(report: &Path) -> Result<(Duration, Vec<u8>), String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_erdos"))
        .args([
            "verify",
            "--claims",
            "1,2,3,4,5,remark",
            "--samples",
            "10000",
            "--seed",
            "42",
        ])
        .arg("--report")
        .arg(report)
        .env_remove("ERDOS_REPORT_PRETTY")
        .output()
        .map_err(|e| format!("spawn: {e}"))?;
    let elapsed = start.elapsed();
    if !out.status.success() {
        return Err(format!(
            "exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    let bytes = std::fs::read(report).map_err(|e| format!("read report: {e}"))?;
    Ok((elapsed, bytes))
}

fn violations(bytes: &[u8]) -> Result<usize, String> {
    let v: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| e.to_string())?;
    let claims = v.as_array().ok_or("report is not an array")?;
    if claims.len() != 6 {
        return Err(format!("{} claim reports", claims.len()));
    }
    Ok(claims
        .iter()
        .map(|c| c["violations"].as_array().map_or(usize::MAX, Vec::len))
        .sum())
}

fn claim_suite(dir: &Path) -> (Outcome, Option<Vec<u8>>) {
    let (elapsed, bytes) = match run_verify(&dir.join("first.json")) {
        Ok(r) => r,
        Err(e) => return (Err(e), None),
    };
    let outcome = match violations(&bytes) {
        Err(e) => Err(e),
        Ok(0) if elapsed < Duration::from_secs(60) => {
            Ok(format!("0 violations in {:.1} s", elapsed.as_secs_f64()))
        }
        Ok(0) => Err(format!(
            "0 violations but took {:.1} s",
            elapsed.as_secs_f64()
        )),
        Ok(n) => Err(format!("{n} violations")),
    };
    (outcome, Some(bytes))
}

fn determinism(dir: &Path, first: Option<&[u8]>) -> Outcome {
    let first = first.ok_or("first run produced no report")?;
    let (_, second) = run_verify(&dir.join("second.json"))?;
    if first == second.as_slice() {
        Ok(format!("{} identical bytes", first.len()))
    } else {
        Err("reports differ".into())
    }
}

// criterion 2 and 6

/// Unbounded source `Σ_{i<=k} e^i` with the least `k` beyond the threshold.
struct Staircase;

impl PointSource for Staircase {
    fn point_beyond(&self, threshold: &RootValue) -> Option<Point> {
        // ‖x‖² = k > α² = √b  iff  k² > b
        let b = match threshold.degree() {
            RootDegree::Fourth => threshold.base().clone(),
            RootDegree::Square => threshold.base() * threshold.base(),
        };
        let mut k = 1i64;
        while int(k * k) <= b {
            k += 1;
        }
        Some(Point::from_dense((0..k).map(|_| Rational::one())))
    }
}

fn alpha_base(s: &Schedule, n: u64) -> Rational {
    s.alpha_scale() * Rational::from_integer(n.into()).pow(4)
}

fn beta_base(s: &Schedule, n: u64) -> Rational {
    s.beta_scale() / Rational::from_integer(n.into()).pow(2)
}

/// Re-checks a witness with the exact engine and the decimal oracle.
fn recheck(w: &WitnessRecord, s: &Schedule, oracle: &Oracle) -> Result<(), String> {
    if let Some(c) = witness_checks(w, s).into_iter().find(|c| !c.holds) {
        return Err(format!("{}: {}", c.name, c.trace));
    }
    let m = w.m_star;
    let alpha = s.alpha_at(m);
    let beta = s.beta_at(m);
    let (ab, bb) = (alpha_base(s, m), beta_base(s, m));
    let l = w.l_star;

    let y_norm = [OTerm::root(Rational::one(), w.y.norm_sq(), 2)];
    let exact_ball = w.y.norm_sq() < &w.ball_radius * &w.ball_radius;
    let oracle_ball =
        oracle.cmp(&y_norm, &[OTerm::rational(w.ball_radius.clone())]) == Some(Ordering::Less);
    if !(exact_ball && oracle_ball) {
        return Err("y outside B(0, r*)".into());
    }
    if w.z != w.x.add(&w.y) || w.z.sub(&w.x) != w.y {
        return Err("z != x + y".into());
    }
    let (mx, mz) = (w.x.m_index(&alpha), w.z.m_index(&alpha));
    let (omx, omz) = (
        oracle.m_index_scan(&coords(&w.x), &ab),
        oracle.m_index_scan(&coords(&w.z), &ab),
    );
    if (mx, mz) != (omx, omz) {
        return Err(format!("m indices {mx:?}/{mz:?} vs oracle {omx:?}/{omz:?}"));
    }
    match (mz, mx) {
        (Some(a), Some(b)) if a <= b && b < l => {}
        _ => return Err(format!("m chain fails: {mz:?} {mx:?} {l}")),
    }
    let zl = w.z.get(l).abs();
    let exact_beta = cmp_rational_vs_root(&zl, &beta) == Ordering::Greater;
    let oracle_beta = oracle.cmp_rational_root(&zl, &bb, 2) == Some(Ordering::Greater);
    if !(exact_beta && oracle_beta) {
        return Err(format!("|z_l*| = {zl} not above beta"));
    }
    if in_o(&w.z, s) || oracle.in_o(&coords(&w.z), s.alpha_scale(), s.beta_scale()) {
        return Err(format!("z = {} lies in O", w.z));
    }
    Ok(())
}

fn witness_soundness() -> Outcome {
    let s = Schedule::default();
    let oracle = Oracle::with_min_digits(100);
    let mut r = rng(2);
    let mut seen = std::collections::BTreeSet::new();
    let mut records = 0;
    while seen.len() < 100 {
        let radius = ratio(r.random_range(1..=40), r.random_range(1..=40));
        let staircase = r.random_range(0..10) == 0;
        let dir = random_nonzero(&mut r);
        let key = if staircase {
            format!("{radius} staircase")
        } else {
            format!("{radius} {dir}")
        };
        if !seen.insert(key.clone()) {
            continue;
        }
        let w = if staircase {
            construct_witness(&VSpec::new(radius, Staircase).unwrap(), &s)
        } else {
            construct_witness(
                &VSpec::new(radius, RaySource::new(dir).unwrap()).unwrap(),
                &s,
            )
        }
        .map_err(|e| format!("{key}: {e}"))?;
        recheck(&w, &s, &oracle).map_err(|e| format!("{key}: {e}"))?;
        records += 1;
    }
    Ok(format!("{records} witnesses re-checked"))
}

fn generalized_remark() -> Outcome {
    let s = Schedule::default();
    let oracle = Oracle::with_min_digits(100);
    let mut r = rng(6);
    let mut done = 0;
    for (p, q) in [(1, 10), (1, 2), (1, 1)] {
        for _ in 0..10 {
            let dir = random_nonzero(&mut r);
            let w = generalized_witness(RaySource::new(dir.clone()).unwrap(), ratio(p, q), &s)
                .map_err(|e| format!("eps {p}/{q}, ray {dir}: {e}"))?;
            recheck(&w, &s, &oracle).map_err(|e| format!("eps {p}/{q}, ray {dir}: {e}"))?;
            done += 1;
        }
    }
    Ok(format!("{done} witnesses outside O"))
}

// criterion 3

fn random_root(r: &mut ChaCha8Rng) -> RootValue {
    loop {
        let degree = if r.random_bool(0.5) {
            RootDegree::Square
        } else {
            RootDegree::Fourth
        };
        if let Ok(v) = RootValue::new(
            ratio(r.random_range(1..=200), r.random_range(1..=50)),
            degree,
        ) {
            return v;
        }
    }
}

fn random_term(r: &mut ChaCha8Rng) -> Term {
    let coef = random_rational(r, 20, 9);
    if r.random_bool(0.25) {
        Term::rational(coef)
    } else {
        Term::root(coef, random_root(r))
    }
}

fn random_expr(r: &mut ChaCha8Rng) -> RootExpr {
    let n = r.random_range(1..=2);
    RootExpr::new((0..n).map(|_| random_term(r)).collect())
}

/// A second spelling of `e`: `c·ⁿ√a` as `(c/k)·ⁿ√(kⁿa)`.
fn respelled(e: &RootExpr, r: &mut ChaCha8Rng) -> RootExpr {
    let k = r.random_range(2..=5i64);
    RootExpr::new(
        e.terms()
            .iter()
            .map(|t| match &t.root {
                None => t.clone(),
                Some(v) => {
                    let d = v.degree().as_u32();
                    let base = v.base() * Rational::from_integer(k.into()).pow(d as i32);
                    Term::root(&t.coef / int(k), RootValue::new(base, v.degree()).unwrap())
                }
            })
            .collect(),
    )
}

fn oterms(e: &RootExpr) -> Vec<OTerm> {
    e.terms()
        .iter()
        .map(|t| match &t.root {
            None => OTerm::rational(t.coef.clone()),
            Some(v) => OTerm::root(t.coef.clone(), v.base().clone(), v.degree().as_u32()),
        })
        .collect()
}

fn agrees(oracle: &Oracle, exact: Ordering, lhs: &[OTerm], rhs: &[OTerm]) -> bool {
    match oracle.cmp(lhs, rhs) {
        Some(o) => o == exact,
        None => exact == Ordering::Equal && oracle.indistinguishable(lhs, rhs),
    }
}

fn oracle_agreement() -> Outcome {
    let oracle = Oracle::default();
    let mut r = rng(3);
    let mut disagreements = Vec::new();
    let mut equal = 0;
    for i in 0..50_000 {
        let s = random_rational(&mut r, 500, 300);
        let v = random_root(&mut r);
        let exact = cmp_rational_vs_root(&s, &v);
        let lhs = [OTerm::rational(s.clone())];
        let rhs = [OTerm::root(
            Rational::one(),
            v.base().clone(),
            v.degree().as_u32(),
        )];
        if !agrees(&oracle, exact, &lhs, &rhs) {
            disagreements.push(format!("#{i}: {s} vs {v}"));
        }
    }
    for i in 0..50_000 {
        let a = random_expr(&mut r);
        let b = if r.random_range(0..20) == 0 {
            respelled(&a, &mut r)
        } else {
            random_expr(&mut r)
        };
        let exact = match cmp_root_expr(&a, &b) {
            Ok(o) => o,
            Err(e) => {
                disagreements.push(format!("#{i}: {a} vs {b}: {e}"));
                continue;
            }
        };
        equal += usize::from(exact == Ordering::Equal);
        if !agrees(&oracle, exact, &oterms(&a), &oterms(&b)) {
            disagreements.push(format!("#{i}: {a} vs {b}"));
        }
    }
    match disagreements.first() {
        None => Ok(format!(
            "100000 comparisons, {equal} equal, 0 disagreements"
        )),
        Some(first) => Err(format!(
            "{} disagreements, first {first}",
            disagreements.len()
        )),
    }
}

// criterion 4

fn m_index_equivalence() -> Outcome {
    let oracle = Oracle::default();
    let bases: Vec<Rational> = [
        (1, 3),
        (6, 5),
        (2, 1),
        (3, 1),
        (5, 2),
        (7, 1),
        (10, 1),
        (15, 1),
        (32, 1),
        (50, 3),
        (80, 1),
        (120, 1),
        (162, 1),
        (300, 7),
        (512, 1),
        (1000, 1),
        (1250, 1),
        (2000, 1),
        (5000, 1),
        (20000, 1),
    ]
    .iter()
    .map(|(p, q)| ratio(*p, *q))
    .collect();
    let thresholds: Vec<RootValue> = bases
        .iter()
        .map(|b| RootValue::fourth_root(b.clone()).unwrap())
        .collect();
    let mut r = rng(4);
    let mut defined = 0;
    for i in 0..10_000 {
        let x = random_point(&mut r, 16, 12, 6);
        let c = coords(&x);
        for (base, alpha) in bases.iter().zip(&thresholds) {
            let exact = x.m_index(alpha);
            let scan = oracle.m_index_scan(&c, base);
            if exact != scan {
                return Err(format!(
                    "#{i}: x = {x}, alpha^4 = {base}: {exact:?} vs {scan:?}"
                ));
            }
            defined += usize::from(exact.is_some());
        }
    }
    Ok(format!("200000 cases, {defined} with m defined"))
}

// criterion 5

/// `center + f·d` with `f = bound·k/17 / (sup·|support|)`, so `‖f·d‖ < bound`.
fn nearby(center: &Point, bound: &Rational, r: &mut ChaCha8Rng) -> Point {
    let d = random_nonzero(r);
    let crude = d.sup_norm() * Rational::from_integer(d.support_len().into());
    let k = r.random_range(1..=16i64);
    center.add(&d.scale(&(bound * ratio(k, 17) / crude)))
}

/// Kind slot, certificate, and the membership every nearby point keeps.
type Job = (usize, RadiusCertificate, Box<dyn Fn(&Point) -> bool>);

fn certificate_validity() -> Outcome {
    let pair = AlphaBetaPair::from_bases(int(2), ratio(1, 2)).unwrap();
    let s = Schedule::default();
    let cap = 1_000_000;
    let mut r = rng(5);
    let kinds = [
        CertificateKind::Claim1Margin,
        CertificateKind::Claim2R0,
        CertificateKind::Claim3R,
        CertificateKind::Claim4W,
    ];
    let mut counts = [0usize; 4];
    let mut checked = 0usize;
    let mut attempts = 0;
    while counts.iter().any(|c| *c < 1000) {
        attempts += 1;
        if attempts > 1_000_000 {
            return Err(format!("sampler stalled at {counts:?}"));
        }
        // small points land in the ball B(0, α) often enough
        let x = if r.random_bool(0.3) {
            random_point(&mut r, 8, 3, 8)
        } else {
            random_point(&mut r, 12, 8, 8)
        };
        let mut jobs: Vec<Job> = Vec::new();
        if in_a(&x, &pair) {
            let cert = openness_radius(&x, &pair, cap).map_err(|e| e.to_string())?;
            let p = pair.clone();
            let slot = if cert.kind == CertificateKind::Claim1Margin {
                0
            } else {
                2
            };
            jobs.push((slot, cert, Box::new(move |y| in_a(y, &p))));
        } else {
            let cert = closedness_radius(&x, &pair, cap).map_err(|e| e.to_string())?;
            let p = pair.clone();
            jobs.push((1, cert, Box::new(move |y| !in_a(y, &p))));
        }
        if in_o(&x, &s) {
            let cert = o_openness_radius(&x, &s, cap).map_err(|e| e.to_string())?;
            let sc = s.clone();
            jobs.push((3, cert, Box::new(move |y| in_o(y, &sc))));
        }
        for (slot, cert, keeps) in jobs {
            if counts[slot] >= 1000 {
                continue;
            }
            if cert.kind != kinds[slot] {
                return Err(format!("x = {x}: kind {} in slot {slot}", cert.kind.name()));
            }
            if !cert.bound.is_positive() {
                return Err(format!("x = {x}: bound {}", cert.bound));
            }
            for _ in 0..16 {
                let y = nearby(&x, &cert.bound, &mut r);
                if !cert.covers(&x, &y) {
                    return Err(format!("perturbation of {x} left the ball"));
                }
                if !keeps(&y) {
                    return Err(format!(
                        "{}: x = {x}, y = {y}, bound {}",
                        cert.kind.name(),
                        cert.bound
                    ));
                }
                checked += 1;
            }
            counts[slot] += 1;
        }
    }
    Ok(format!(
        "4 kinds x 1000 points, {checked} perturbations, 0 violations"
    ))
}

/// A panic counts as a failure of that criterion only.
fn guarded(f: fn() -> Outcome) -> Outcome {
    std::panic::catch_unwind(f).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    })
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temp dir");
    let (suite, first_report) = claim_suite(dir.path());
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "claim suite", suite),
        (2, "witness soundness", guarded(witness_soundness)),
        (3, "exactness oracle agreement", guarded(oracle_agreement)),
        (
            4,
            "m-index brute-force equivalence",
            guarded(m_index_equivalence),
        ),
        (5, "certificate validity", guarded(certificate_validity)),
        (6, "generalized remark", guarded(generalized_remark)),
        (
            7,
            "determinism",
            determinism(dir.path(), first_report.as_deref()),
        ),
    ];
    let mut ok = true;
    for (n, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("criterion {n} [PRIMARY] {name}: PASS ({detail})"),
            Err(why) => {
                ok = false;
                println!("criterion {n} [PRIMARY] {name}: FAIL ({why})");
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
