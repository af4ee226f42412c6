//! Points `z = x + y ∉ O` with `x` in a candidate neighbourhood `V` of zero
//! and `y` in a ball `B(0, r*) ⊆ V`.
//!
//! Any clopen `V ∋ 0` contains such a ball and, being a nonempty clopen set,
//! is unbounded. The construction picks a schedule index `m*` with
//! `β_{m*} < 1/n* < r*` and `α_{m*} > n*`, takes `x ∈ V` with `‖x‖ > α_{m*}`,
//! and pushes the coordinate just after `m_{x,α_{m*}}` past `β_{m*}` with
//! `y = ±q·e^{l*}`. The sign follows `x_{l*}` so that `|z_{l*}| >= q`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::clopen::{in_a, in_o, o_openness_radius, ClopenError, RadiusCertificate, Schedule};
use crate::exact::{
    cmp_rational_vs_root, format_rational, rational_in_interval, ExactError, Rational, RootExpr,
    RootValue,
};
use crate::space::{alpha_squared, exceeds, Index, Point};

/// Cap on schedule indices searched for `m₁`, `m₂`.
const SCHEDULE_SEARCH_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WitnessError {
    #[error("ball radius must be positive")]
    InvalidBallRadius,
    #[error("epsilon must be positive")]
    InvalidEpsilon,
    #[error("source produced no point with norm above {0}")]
    SourceFailure(String),
    #[error("schedule has no index satisfying the search condition")]
    ScheduleExhausted,
    #[error("constructed point failed re-verification: {0}")]
    VerificationFailed(&'static str),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Clopen(#[from] ClopenError),
}

/// Supplies points of a set with arbitrarily large norm.
pub trait PointSource {
    /// A point of the set with `‖x‖ > threshold`, or `None` if the source
    /// cannot produce one.
    fn point_beyond(&self, threshold: &RootValue) -> Option<Point>;
}

impl<S: PointSource + ?Sized> PointSource for &S {
    fn point_beyond(&self, threshold: &RootValue) -> Option<Point> {
        (**self).point_beyond(threshold)
    }
}

impl<S: PointSource + ?Sized> PointSource for Box<S> {
    fn point_beyond(&self, threshold: &RootValue) -> Option<Point> {
        (**self).point_beyond(threshold)
    }
}

fn norm_exceeds(x: &Point, threshold: &RootValue) -> bool {
    exceeds(&x.norm_sq(), &alpha_squared(threshold))
}

/// The points `k·d` for positive integers `k`; yields the least such multiple
/// beyond the threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaySource {
    direction: Point,
}

impl RaySource {
    pub fn new(direction: Point) -> Option<Self> {
        (!direction.is_zero()).then_some(Self { direction })
    }

    /// The ray through `e^1`.
    pub fn axis() -> Self {
        Self {
            direction: Point::unit(1),
        }
    }

    pub fn direction(&self) -> &Point {
        &self.direction
    }
}

impl PointSource for RaySource {
    fn point_beyond(&self, threshold: &RootValue) -> Option<Point> {
        let threshold_sq = alpha_squared(threshold);
        let norm_sq = self.direction.norm_sq();
        // k²·‖d‖² > t²: gallop to a k that works, then bisect back to the least.
        let works = |k: &BigInt| {
            let k = Rational::from_integer(k.clone());
            exceeds(&(&k * &k * &norm_sq), &threshold_sq)
        };
        let mut hi = BigInt::one();
        while !works(&hi) {
            hi <<= 1;
        }
        let mut lo: BigInt = &hi >> 1;
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) >> 1;
            if works(&mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(self.direction.scale(&Rational::from_integer(hi)))
    }
}

/// A fixed list of points; yields the first one beyond the threshold.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ListSource {
    points: Vec<Point>,
}

impl ListSource {
    pub fn new(points: Vec<Point>) -> Self {
        Self { points }
    }
}

impl PointSource for ListSource {
    fn point_beyond(&self, threshold: &RootValue) -> Option<Point> {
        self.points
            .iter()
            .find(|p| norm_exceeds(p, threshold))
            .cloned()
    }
}

/// What the construction needs to know about a candidate `V ∋ 0`: a ball
/// `B(0, r*) ⊆ V` and a way to reach points of `V` of any norm.
#[derive(Debug, Clone)]
pub struct VSpec<S> {
    ball_radius: Rational,
    source: S,
}

impl<S: PointSource> VSpec<S> {
    pub fn new(ball_radius: Rational, source: S) -> Result<Self, WitnessError> {
        if !ball_radius.is_positive() {
            return Err(WitnessError::InvalidBallRadius);
        }
        Ok(Self {
            ball_radius,
            source,
        })
    }

    pub fn ball_radius(&self) -> &Rational {
        &self.ball_radius
    }

    pub fn source(&self) -> &S {
        &self.source
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessCase {
    /// `x_{l*} >= 0`, `y = q·e^{l*}`.
    NonNegative,
    /// `x_{l*} < 0`, `y = -q·e^{l*}`.
    Negative,
}

impl WitnessCase {
    pub fn name(self) -> &'static str {
        match self {
            WitnessCase::NonNegative => "NonNegative",
            WitnessCase::Negative => "Negative",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessRecord {
    pub ball_radius: Rational,
    pub x: Point,
    pub y: Point,
    pub z: Point,
    pub n_star: u64,
    pub m_star: u64,
    pub l_star: Index,
    pub q: Rational,
    pub case: WitnessCase,
    /// Schedule index `n` with `z ∉ A_{αₙ,βₙ}`; always `m_star`.
    pub failing_n: u64,
}

/// One re-verified inequality with the exact values that decide it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub trace: String,
    pub holds: bool,
}

fn least_index(mut condition: impl FnMut(u64) -> bool) -> Result<u64, WitnessError> {
    (1..=SCHEDULE_SEARCH_LIMIT)
        .find(|m| condition(*m))
        .ok_or(WitnessError::ScheduleExhausted)
}

/// Builds `z = x + y ∈ V + V` with `z ∉ O`.
pub fn construct_witness<S: PointSource>(
    v: &VSpec<S>,
    schedule: &Schedule,
) -> Result<WitnessRecord, WitnessError> {
    let r_star = &v.ball_radius;
    // least n* with 1/n* < r*
    let n_star = (r_star.recip().floor().to_integer() + 1u32)
        .try_into()
        .map_err(|_| WitnessError::ScheduleExhausted)?;
    let inv_n = Rational::new(BigInt::one(), BigInt::from(n_star));

    let m1 =
        least_index(|m| cmp_rational_vs_root(&inv_n, &schedule.beta_at(m)) == Ordering::Greater)?;
    let n_rat = Rational::from_integer(BigInt::from(n_star));
    let m2 =
        least_index(|m| cmp_rational_vs_root(&n_rat, &schedule.alpha_at(m)) == Ordering::Less)?;
    let m_star = m1.max(m2);
    let alpha = schedule.alpha_at(m_star);
    let beta = schedule.beta_at(m_star);

    let x = v
        .source
        .point_beyond(&alpha)
        .filter(|x| norm_exceeds(x, &alpha))
        .ok_or_else(|| WitnessError::SourceFailure(format!("{alpha}")))?;
    let m_x = x.m_index(&alpha).ok_or(WitnessError::VerificationFailed(
        "m_{x,alpha} does not exist",
    ))?;
    let l_star = m_x + 1;

    // q ∈ (β_{m*}, r*): nonempty because β_{m*} < 1/n* < r*.
    let q = rational_in_interval(
        &RootExpr::root(beta.clone()),
        &RootExpr::rational(r_star.clone()),
    )?;

    let (case, sign) = if x.get(l_star).is_negative() {
        (WitnessCase::Negative, -Rational::one())
    } else {
        (WitnessCase::NonNegative, Rational::one())
    };
    let y = Point::unit(l_star).scale(&(&q * &sign));
    let z = x.add(&y);

    let record = WitnessRecord {
        ball_radius: r_star.clone(),
        x,
        y,
        z,
        n_star,
        m_star,
        l_star,
        q,
        case,
        failing_n: m_star,
    };
    if in_a(&record.z, &schedule.pair_at(m_star)) {
        return Err(WitnessError::VerificationFailed("z lies in A_{m*}"));
    }
    Ok(record)
}

/// Same construction with `r* = eps`: for an unbounded `K`, `K + B(0, eps)`
/// is not contained in `O`.
pub fn generalized_witness<S: PointSource>(
    k_source: S,
    eps: Rational,
    schedule: &Schedule,
) -> Result<WitnessRecord, WitnessError> {
    if !eps.is_positive() {
        return Err(WitnessError::InvalidEpsilon);
    }
    construct_witness(&VSpec::new(eps, k_source)?, schedule)
}

/// Re-checks every property of a witness from its stored data alone.
pub fn witness_checks(record: &WitnessRecord, schedule: &Schedule) -> Vec<Check> {
    let m_star = record.m_star;
    let alpha = schedule.alpha_at(m_star);
    let beta = schedule.beta_at(m_star);
    let pair = schedule.pair_at(m_star);
    let q_sq = &record.q * &record.q;
    let r_sq = &record.ball_radius * &record.ball_radius;
    let y_norm = record.y.norm_sq();
    let m_x = record.x.m_index(&alpha);
    let m_z = record.z.m_index(&alpha);
    let z_l = record.z.get(record.l_star).abs();
    let expected_y = Point::unit(record.l_star).scale(&match record.case {
        WitnessCase::NonNegative => record.q.clone(),
        WitnessCase::Negative => -record.q.clone(),
    });
    let n_star = Rational::from_integer(BigInt::from(record.n_star));
    let fmt = format_rational;

    vec![
        Check {
            name: "y_in_ball",
            trace: format!(
                "norm_sq(y) = {} = q^2 = {} < r*^2 = {}",
                fmt(&y_norm),
                fmt(&q_sq),
                fmt(&r_sq)
            ),
            holds: y_norm == q_sq && q_sq < r_sq && record.q.is_positive(),
        },
        Check {
            name: "y_is_signed_unit",
            trace: format!(
                "y = {} * e^{}",
                fmt(&record.y.get(record.l_star)),
                record.l_star
            ),
            holds: record.y == expected_y,
        },
        Check {
            name: "z_is_sum",
            trace: format!("z = {} = x + y", record.z),
            holds: record.z == record.x.add(&record.y),
        },
        Check {
            name: "n_star_least",
            trace: format!(
                "1/{} < r* = {} <= 1/{}",
                record.n_star,
                fmt(&record.ball_radius),
                record.n_star - 1
            ),
            holds: n_star.recip() < record.ball_radius
                && (record.n_star == 1
                    || (&n_star - Rational::one()).recip() >= record.ball_radius),
        },
        Check {
            name: "schedule_index",
            trace: format!(
                "beta_m* = {beta} < 1/n*, alpha_m* = {alpha} > n* = {}",
                record.n_star
            ),
            holds: cmp_rational_vs_root(&n_star.recip(), &beta) == Ordering::Greater
                && cmp_rational_vs_root(&n_star, &alpha) == Ordering::Less,
        },
        Check {
            name: "x_beyond_alpha",
            trace: format!(
                "norm_sq(x) = {} > alpha_m*^2 = {}",
                fmt(&record.x.norm_sq()),
                alpha.squared()
            ),
            holds: norm_exceeds(&record.x, &alpha),
        },
        Check {
            name: "m_index_chain",
            trace: format!("m_z = {m_z:?} <= m_x = {m_x:?} < l* = {}", record.l_star),
            holds: matches!((m_z, m_x), (Some(mz), Some(mx)) if mz <= mx && mx < record.l_star),
        },
        Check {
            name: "q_above_beta",
            trace: format!("q^2 = {} > beta_m*^2 = {}", fmt(&q_sq), fmt(beta.base())),
            holds: cmp_rational_vs_root(&record.q, &beta) == Ordering::Greater,
        },
        Check {
            name: "z_coordinate_above_beta",
            trace: format!(
                "|z_{}|^2 = {} > beta_m*^2 = {}",
                record.l_star,
                fmt(&(&z_l * &z_l)),
                fmt(beta.base())
            ),
            holds: cmp_rational_vs_root(&z_l, &beta) == Ordering::Greater,
        },
        Check {
            name: "z_not_in_A_m_star",
            trace: format!("z outside A_n for n = {}", record.failing_n),
            holds: record.failing_n == m_star && !in_a(&record.z, &pair),
        },
        Check {
            name: "z_not_in_O",
            trace: String::from("some A_n excludes z"),
            holds: !in_o(&record.z, schedule),
        },
    ]
}

/// The conclusion assembled from a witness and the facts it relies on.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub premise: &'static str,
    /// Certificate that `O` contains a ball around 0.
    pub neighbourhood: RadiusCertificate,
    pub witness: WitnessRecord,
    pub checks: Vec<Check>,
    pub conclusion: &'static str,
    pub verified: bool,
}

pub const PREMISE: &str = "a clopen subset of Erdos space containing 0 is nonempty, and the only \
bounded clopen subset is the empty set, so V is unbounded; being open, V contains a ball B(0, r*)";

pub const CONCLUSION: &str = "O is clopen and contains 0, yet z = x + y lies in V + V and outside \
O; the construction uses only B(0, r*) in V and unboundedness of V, so no clopen V containing 0 \
satisfies V + V in O, and the topology generated by clopen sets is not a group topology";

/// Runs the construction for `v` and re-verifies every membership it uses.
pub fn refute_group_compatibility<S: PointSource>(
    v: &VSpec<S>,
    schedule: &Schedule,
    cap: u64,
) -> Result<Verdict, WitnessError> {
    let witness = construct_witness(v, schedule)?;
    let neighbourhood = o_openness_radius(&Point::zero(), schedule, cap)?;
    let mut checks = vec![Check {
        name: "zero_in_O",
        trace: format!(
            "0 in O with ball radius {} around 0",
            format_rational(&neighbourhood.bound)
        ),
        holds: in_o(&Point::zero(), schedule) && neighbourhood.bound.is_positive(),
    }];
    checks.extend(witness_checks(&witness, schedule));
    let verified = checks.iter().all(|c| c.holds);
    Ok(Verdict {
        premise: PREMISE,
        neighbourhood,
        witness,
        checks,
        conclusion: CONCLUSION,
        verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clopen::failing_index;
    use crate::exact::{int, ratio};

    fn ray() -> RaySource {
        RaySource::axis()
    }

    #[test]
    fn ray_source_picks_least_multiple() {
        let alpha3 = Schedule::default().alpha_at(3); // ≈ 3.568
        assert_eq!(
            ray().point_beyond(&alpha3),
            Some(Point::from_dense([int(4)]))
        );
        let d = RaySource::new(Point::from_dense([ratio(1, 2), ratio(1, 2)])).unwrap();
        // ‖k·d‖² = k²/2 > 9√2 ≈ 12.73  =>  k = 6
        assert_eq!(
            d.point_beyond(&alpha3),
            Some(Point::from_dense([int(3), int(3)]))
        );
        assert!(RaySource::new(Point::zero()).is_none());
    }

    #[test]
    fn unit_ball_ray_example() {
        let v = VSpec::new(int(1), ray()).unwrap();
        let w = construct_witness(&v, &Schedule::default()).unwrap();
        assert_eq!((w.n_star, w.m_star, w.l_star), (2, 3, 2));
        assert_eq!(w.x, Point::from_dense([int(4)]));
        assert_eq!(w.q, ratio(1, 2));
        assert_eq!(w.case, WitnessCase::NonNegative);
        assert_eq!(w.z, Point::from_dense([int(4), ratio(1, 2)]));
        assert_eq!(w.failing_n, 3);
        assert!(!in_o(&w.z, &Schedule::default()));
        for check in witness_checks(&w, &Schedule::default()) {
            assert!(check.holds, "{}: {}", check.name, check.trace);
        }
    }

    #[test]
    fn zero_coordinate_after_m_takes_nonnegative_case() {
        // x = -5·e^7: m = 7, l* = 8, x_8 = 0 >= 0.
        let x = Point::from_coords([(7, int(-5))]).unwrap();
        let v = VSpec::new(int(1), ListSource::new(vec![x])).unwrap();
        let w = construct_witness(&v, &Schedule::default()).unwrap();
        assert_eq!(w.l_star, 8);
        assert_eq!(w.case, WitnessCase::NonNegative);
        assert_eq!(w.z.get(8), ratio(1, 2));
    }

    #[test]
    fn negative_coordinate_takes_negative_case() {
        let x = Point::from_dense([int(-5), int(-1)]);
        let v = VSpec::new(int(1), ListSource::new(vec![x])).unwrap();
        let w = construct_witness(&v, &Schedule::default()).unwrap();
        assert_eq!(w.l_star, 2);
        assert_eq!(w.case, WitnessCase::Negative);
        assert_eq!(w.y, Point::unit(2).scale(&ratio(-1, 2)));
        assert_eq!(w.z.get(2), ratio(-3, 2));
        assert!(witness_checks(&w, &Schedule::default())
            .iter()
            .all(|c| c.holds));
    }

    #[test]
    fn invalid_inputs() {
        assert_eq!(
            VSpec::new(int(0), ray()).unwrap_err(),
            WitnessError::InvalidBallRadius
        );
        assert_eq!(
            generalized_witness(ray(), int(0), &Schedule::default()).unwrap_err(),
            WitnessError::InvalidEpsilon
        );
        let bounded = ListSource::new(vec![Point::from_dense([int(1)])]);
        let v = VSpec::new(int(1), bounded).unwrap();
        assert!(matches!(
            construct_witness(&v, &Schedule::default()),
            Err(WitnessError::SourceFailure(_))
        ));
        assert!(matches!(
            refute_group_compatibility(&v, &Schedule::default(), 1000),
            Err(WitnessError::SourceFailure(_))
        ));
    }

    #[test]
    fn small_epsilon_needs_late_schedule_index() {
        let w = generalized_witness(ray(), ratio(1, 10), &Schedule::default()).unwrap();
        // 1/n* < 1/10 gives n* = 11; β_m < 1/11 needs m² > 242, so m ≥ 16.
        assert_eq!(w.n_star, 11);
        assert!(w.m_star >= 15);
        assert_eq!(w.m_star, 16);
        assert!(w.q < ratio(1, 10));
        assert!(failing_index(&w.z, &Schedule::default()).is_some());
    }

    #[test]
    fn refutation_verdict_is_verified() {
        let v = VSpec::new(int(1), ray()).unwrap();
        let verdict = refute_group_compatibility(&v, &Schedule::default(), 1000).unwrap();
        assert!(verdict.verified);
        assert_eq!(verdict.checks[0].name, "zero_in_O");
    }
}
