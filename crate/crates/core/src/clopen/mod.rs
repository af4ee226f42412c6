//! The sets `𝔈_α`, `A_{α,β}` and `O = ⋂ₙ A_{αₙ,βₙ}`, decided exactly on
//! finite-support points, and the neighbourhood radii that witness their
//! openness and closedness.
//!
//! `A_{α,β}` holds the points whose partial norms never exceed `α`, together
//! with those whose coordinates after the first index `m` where the partial
//! norm exceeds `α` all stay strictly below `β` in absolute value.

mod certificate;

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::exact::{
    format_rational, is_rational_square, ExactError, Rational, RootDegree, RootValue,
};
use crate::space::{Index, Point};
use crate::trace::Trace;

pub use certificate::{
    closedness_radius, o_closedness_radius, o_openness_radius, openness_radius, CertificateKind,
    Component, RadiusCertificate,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClopenError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
    #[error("invalid parameters: {0}")]
    InvalidParameters(&'static str),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Thresholds `α` (a fourth root, so `α² ∉ ℚ`) and `β` (a square root, so
/// `β ∉ ℚ`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaBetaPair {
    alpha: RootValue,
    beta: RootValue,
}

impl AlphaBetaPair {
    pub fn new(alpha: RootValue, beta: RootValue) -> Result<Self, ClopenError> {
        if alpha.degree() != RootDegree::Fourth {
            return Err(ClopenError::InvalidParameters(
                "alpha must be a fourth root",
            ));
        }
        if beta.degree() != RootDegree::Square {
            return Err(ClopenError::InvalidParameters("beta must be a square root"));
        }
        Ok(Self { alpha, beta })
    }

    /// Builds the pair `(alpha_base^(1/4), beta_base^(1/2))`.
    pub fn from_bases(alpha_base: Rational, beta_base: Rational) -> Result<Self, ClopenError> {
        Self::new(
            RootValue::fourth_root(alpha_base)?,
            RootValue::sqrt(beta_base)?,
        )
    }

    pub fn alpha(&self) -> &RootValue {
        &self.alpha
    }

    pub fn beta(&self) -> &RootValue {
        &self.beta
    }

    /// `β²`, a rational.
    pub fn beta_sq(&self) -> &Rational {
        self.beta.base()
    }
}

/// `αₙ = n·alpha_scale^(1/4)` and `βₙ = beta_scale^(1/2) / n`.
///
/// With non-square positive scales, `αₙ² = n²·√alpha_scale` and `βₙ` are
/// irrational for every `n`, `(αₙ)` increases without bound and `(βₙ)`
/// decreases to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    alpha_scale: Rational,
    beta_scale: Rational,
}

impl Default for Schedule {
    /// `αₙ = n·2^(1/4)`, `βₙ = √2/n`.
    fn default() -> Self {
        Self::new(
            Rational::from_integer(2.into()),
            Rational::from_integer(2.into()),
        )
        .expect("2 is not a square")
    }
}

impl Schedule {
    pub fn new(alpha_scale: Rational, beta_scale: Rational) -> Result<Self, ClopenError> {
        for scale in [&alpha_scale, &beta_scale] {
            if !scale.is_positive() {
                return Err(ClopenError::InvalidParameters(
                    "schedule scales must be positive",
                ));
            }
            if is_rational_square(scale) {
                return Err(ClopenError::InvalidParameters(
                    "schedule scales must not be rational squares",
                ));
            }
        }
        Ok(Self {
            alpha_scale,
            beta_scale,
        })
    }

    pub fn alpha_scale(&self) -> &Rational {
        &self.alpha_scale
    }

    pub fn beta_scale(&self) -> &Rational {
        &self.beta_scale
    }

    pub fn alpha_at(&self, n: u64) -> RootValue {
        assert!(n >= 1, "schedule indices start at 1");
        let n4 = BigInt::from(n).pow(4u32);
        RootValue::fourth_root(&self.alpha_scale * Rational::from_integer(n4))
            .expect("validated scale")
    }

    pub fn beta_at(&self, n: u64) -> RootValue {
        assert!(n >= 1, "schedule indices start at 1");
        let n2 = BigInt::from(n).pow(2u32);
        RootValue::sqrt(&self.beta_scale / Rational::from_integer(n2)).expect("validated scale")
    }

    pub fn pair_at(&self, n: u64) -> AlphaBetaPair {
        AlphaBetaPair {
            alpha: self.alpha_at(n),
            beta: self.beta_at(n),
        }
    }

    /// The least `n` with `‖x‖ < αₙ`. For every later `n`, `x` lies in the ball
    /// `B(0, αₙ) ⊆ A_{αₙ,βₙ}`, so membership in `O` is decided by the first
    /// `ball_index(x)` sets.
    pub fn ball_index(&self, x: &Point) -> u64 {
        match x.raw_partial_sums().last() {
            Some((_, p, q)) => self.ball_index_of(&p, &q),
            None => 1,
        }
    }

    /// [`Schedule::ball_index`] for `‖x‖² = p/q`.
    fn ball_index_of(&self, p: &BigInt, q: &BigInt) -> u64 {
        // ‖x‖² < n²·√a  <=>  n⁴ > ‖x‖⁴/a, so n = ⌊(‖x‖⁴/a)^(1/4)⌋ + 1.
        let (u, v) = (self.alpha_scale.numer(), self.alpha_scale.denom());
        let t = (p * p * v) / (q * q * u);
        u64::try_from(t.nth_root(4) + 1u32).expect("norm fits the index range")
    }
}

pub fn in_e_alpha(x: &Point, alpha: &RootValue) -> bool {
    x.m_index(alpha).is_none()
}

/// The least support index `l > m_{x,α}` with `|x_l| > β`, if `m_{x,α}` exists.
pub fn first_violation(x: &Point, pair: &AlphaBetaPair) -> Option<(Index, Index)> {
    let m = x.m_index(&pair.alpha)?;
    x.iter()
        .filter(|(l, _)| *l > m)
        .find(|(_, v)| *v * *v > *pair.beta_sq())
        .map(|(l, _)| (m, l))
}

pub fn in_a(x: &Point, pair: &AlphaBetaPair) -> bool {
    in_a_traced(x, pair, &mut ())
}

/// [`in_a`], reporting the comparisons that decide it.
pub fn in_a_traced(x: &Point, pair: &AlphaBetaPair, trace: &mut impl Trace) -> bool {
    let Some(m) = x.m_index(&pair.alpha) else {
        trace.note(|| {
            format!(
                "m does not exist: norm_sq = {} < alpha^2 = {}",
                format_rational(&x.norm_sq()),
                pair.alpha.squared()
            )
        });
        return true;
    };
    trace.note(|| {
        format!(
            "m = {m}: partial_sum(1..={m}) = {} > alpha^2 = {}",
            format_rational(&x.partial_norm_sq(m)),
            pair.alpha.squared()
        )
    });
    for (l, v) in x.iter().filter(|(l, _)| *l > m) {
        let square = v * v;
        if square > *pair.beta_sq() {
            trace.note(|| {
                format!(
                    "coordinate {l}: x_{l}^2 = {} > beta^2 = {}",
                    format_rational(&square),
                    format_rational(pair.beta_sq())
                )
            });
            return false;
        }
        trace.note(|| {
            format!(
                "coordinate {l}: x_{l}^2 = {} < beta^2 = {}",
                format_rational(&square),
                format_rational(pair.beta_sq())
            )
        });
    }
    true
}

pub fn in_e_alpha_traced(x: &Point, alpha: &RootValue, trace: &mut impl Trace) -> bool {
    match x.m_index(alpha) {
        None => {
            trace.note(|| {
                format!(
                    "norm_sq = {} < alpha^2 = {}",
                    format_rational(&x.norm_sq()),
                    alpha.squared()
                )
            });
            true
        }
        Some(m) => {
            trace.note(|| {
                format!(
                    "m = {m}: partial_sum(1..={m}) = {} > alpha^2 = {}",
                    format_rational(&x.partial_norm_sq(m)),
                    alpha.squared()
                )
            });
            false
        }
    }
}

/// `x ∈ A_{αₙ,βₙ}` for every `n <= upto`.
pub fn in_o_up_to(x: &Point, schedule: &Schedule, upto: u64) -> bool {
    (1..=upto).all(|n| in_a(x, &schedule.pair_at(n)))
}

pub fn in_o(x: &Point, schedule: &Schedule) -> bool {
    failing_index(x, schedule).is_none()
}

/// The least `n` with `x ∉ A_{αₙ,βₙ}`.
pub fn failing_index(x: &Point, schedule: &Schedule) -> Option<u64> {
    let profile = Profile::new(x);
    let limit = match profile.sums.last() {
        Some((_, p, q)) => schedule.ball_index_of(p, q),
        None => 1,
    };
    (1..=limit).find(|n| !profile.in_scheduled_a(schedule, *n))
}

/// Partial sums and squared coordinates of a point as integer
/// numerator/denominator pairs, so that each `A_{αₙ,βₙ}` test is a handful of
/// integer products.
struct Profile {
    /// `(k, P, Q)` with `Σ_{i<=k} x_i² = P/Q`.
    sums: Vec<(Index, BigInt, BigInt)>,
    /// `(l, r², s²)` with `x_l = r/s`.
    squares: Vec<(Index, BigInt, BigInt)>,
}

impl Profile {
    fn new(x: &Point) -> Self {
        let sums = x.raw_partial_sums().collect();
        let squares = x
            .iter()
            .map(|(l, v)| (l, v.numer() * v.numer(), v.denom() * v.denom()))
            .collect();
        Self { sums, squares }
    }

    /// `x ∈ A_{αₙ,βₙ}`, same decision as [`in_a`] with `schedule.pair_at(n)`.
    fn in_scheduled_a(&self, schedule: &Schedule, n: u64) -> bool {
        let n2 = BigInt::from(n).pow(2u32);
        let n4 = &n2 * &n2;
        // (P/Q)² > n⁴·(u/v)  <=>  P²·v > n⁴·u·Q²
        let (u, v) = (schedule.alpha_scale.numer(), schedule.alpha_scale.denom());
        let lhs_u = &n4 * u;
        let Some(m) = self
            .sums
            .iter()
            .find(|(_, p, q)| p * p * v > &lhs_u * q * q)
            .map(|(k, _, _)| *k)
        else {
            return true;
        };
        // r²/s² < (g/h)/n²  <=>  r²·n²·h < g·s²
        let (g, h) = (schedule.beta_scale.numer(), schedule.beta_scale.denom());
        let n2h = &n2 * h;
        self.squares
            .iter()
            .filter(|(l, _, _)| *l > m)
            .all(|(_, r2, s2)| r2 * &n2h < g * s2)
    }
}

pub fn in_o_traced(x: &Point, schedule: &Schedule, trace: &mut impl Trace) -> bool {
    let limit = schedule.ball_index(x);
    trace.note(|| {
        format!(
            "norm_sq = {} < alpha_{limit}^2 = {}: x lies in every A_n with n >= {limit}",
            format_rational(&x.norm_sq()),
            schedule.alpha_at(limit).squared()
        )
    });
    for n in 1..=limit {
        let pair = schedule.pair_at(n);
        trace.note(|| format!("n = {n}: alpha = {}, beta = {}", pair.alpha, pair.beta));
        if !in_a_traced(x, &pair, trace) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};
    use alloc::string::String;
    use alloc::vec::Vec;

    fn pair() -> AlphaBetaPair {
        AlphaBetaPair::from_bases(int(2), ratio(1, 2)).unwrap()
    }

    #[test]
    fn e_alpha_examples() {
        let alpha = pair().alpha().clone();
        assert!(in_e_alpha(&Point::zero(), &alpha));
        assert!(!in_e_alpha(&Point::from_dense([int(2)]), &alpha));
        assert!(in_e_alpha(&Point::from_dense([int(1)]), &alpha));
    }

    #[test]
    fn a_examples() {
        assert!(in_a(&Point::from_dense([int(1)]), &pair()));
        assert!(!in_a(&Point::from_dense([int(2), int(1)]), &pair()));
        assert!(in_a(&Point::from_dense([int(2), ratio(1, 2)]), &pair()));
    }

    #[test]
    fn o_examples() {
        let s = Schedule::default();
        assert!(in_o(&Point::zero(), &s));
        assert!(in_o(&Point::from_dense([int(2), int(1)]), &s));
        let outside = Point::from_dense([int(3), int(1)]);
        assert!(!in_o(&outside, &s));
        assert_eq!(failing_index(&outside, &s), Some(2));
    }

    #[test]
    fn default_schedule_values() {
        let s = Schedule::default();
        assert_eq!(s.alpha_at(1), RootValue::fourth_root(int(2)).unwrap());
        assert_eq!(s.alpha_at(3), RootValue::fourth_root(int(162)).unwrap());
        assert_eq!(s.beta_at(2), RootValue::sqrt(ratio(1, 2)).unwrap());
        assert_eq!(s.ball_index(&Point::zero()), 1);
        // ‖(2,1)‖² = 5 lies between α₁² = √2 and α₂² = 4√2
        assert_eq!(s.ball_index(&Point::from_dense([int(2), int(1)])), 2);
    }

    #[test]
    fn schedule_rejects_square_scales() {
        assert!(Schedule::new(int(4), int(2)).is_err());
        assert!(Schedule::new(int(2), ratio(9, 4)).is_err());
        assert!(Schedule::new(int(-2), int(2)).is_err());
        assert!(Schedule::new(int(3), ratio(1, 5)).is_ok());
    }

    #[test]
    fn pair_requires_degrees() {
        let sqrt2 = RootValue::sqrt(int(2)).unwrap();
        let fourth2 = RootValue::fourth_root(int(2)).unwrap();
        assert!(AlphaBetaPair::new(sqrt2.clone(), sqrt2.clone()).is_err());
        assert!(AlphaBetaPair::new(fourth2.clone(), fourth2).is_err());
    }

    #[test]
    fn traces_name_the_deciding_comparison() {
        let mut steps: Vec<String> = Vec::new();
        assert!(!in_o_traced(
            &Point::from_dense([int(3), int(1)]),
            &Schedule::default(),
            &mut steps
        ));
        let last = steps.last().unwrap();
        assert!(last.contains("x_2^2 = 1/1 > beta^2 = 1/2"), "{last}");
    }
}
