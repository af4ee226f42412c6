//! Exact rational arithmetic and comparisons against irrational roots.
//!
//! Every threshold in the construction is either a square root of a
//! non-square rational (the `β` values) or a fourth root of one (the `α`
//! values, whose squares are then irrational too). Comparisons against such
//! values are decided by integer arithmetic alone: a rational is compared
//! with a root by raising it to the root's degree, and short sums of roots
//! are compared by the sign procedure in [`tower`].

mod approx;
mod expr;
mod tower;

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};

pub(crate) use approx::enclose;
pub use approx::{best_lower_bound, rational_in_interval, DEFAULT_DENOMINATOR_CAP};
pub use expr::{cmp_rational_vs_root, cmp_root_expr, sign_of_terms, RootExpr, Term};

/// Arbitrary-precision rational in canonical form (positive denominator,
/// coprime parts). `num_rational` keeps this invariant after every operation.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("invalid root: base {0} is not a positive non-square rational")]
    InvalidRoot(String),
    #[error("unsupported expression: {0} terms exceed the two-term fragment")]
    UnsupportedForm(usize),
    #[error("empty interval: lower end is not below upper end")]
    EmptyInterval,
    #[error("invalid rational: {0:?}")]
    InvalidRational(String),
}

/// Builds `numer / denom` from machine integers. Panics on a zero denominator.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats a rational as `p/q`, always with an explicit denominator.
pub fn format_rational(value: &Rational) -> String {
    alloc::format!("{}/{}", value.numer(), value.denom())
}

/// Parses `p/q` or a bare integer `p`. Decimal notation is rejected so no
/// value is ever rounded on the way in.
pub fn parse_rational(text: &str) -> Result<Rational, ExactError> {
    let invalid = || ExactError::InvalidRational(text.to_string());
    let text = text.trim();
    let (numer, denom) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let is_integer = |s: &str| {
        let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !is_integer(numer) || !is_integer(denom) {
        return Err(invalid());
    }
    let numer = BigInt::from_str(numer).map_err(|_| invalid())?;
    let denom = BigInt::from_str(denom).map_err(|_| invalid())?;
    if denom.is_zero() {
        return Err(invalid());
    }
    Ok(Rational::new(numer, denom))
}

/// Exact integer square root when `n` is a perfect square.
pub fn integer_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let root = n.sqrt();
    (&root * &root == *n).then_some(root)
}

/// Returns `√value` when `value` is the square of a rational.
///
/// A canonical `p/q` is a rational square iff both `p` and `q` are perfect
/// squares.
pub fn rational_sqrt_exact(value: &Rational) -> Option<Rational> {
    let numer = integer_sqrt_exact(value.numer())?;
    let denom = integer_sqrt_exact(value.denom())?;
    Some(Rational::new(numer, denom))
}

pub fn is_rational_square(value: &Rational) -> bool {
    rational_sqrt_exact(value).is_some()
}

pub(crate) fn sign_of(value: &Rational) -> Ordering {
    match value.numer().sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RootDegree {
    Square,
    Fourth,
}

impl RootDegree {
    pub fn as_u32(self) -> u32 {
        match self {
            RootDegree::Square => 2,
            RootDegree::Fourth => 4,
        }
    }

    pub fn from_u32(degree: u32) -> Option<Self> {
        match degree {
            2 => Some(RootDegree::Square),
            4 => Some(RootDegree::Fourth),
            _ => None,
        }
    }
}

/// The positive real `base^(1/degree)` for a positive rational `base` that is
/// not a rational square. Such a value is irrational, and for degree 4 so is
/// its square.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RootValue {
    base: Rational,
    degree: RootDegree,
}

impl RootValue {
    pub fn new(base: Rational, degree: RootDegree) -> Result<Self, ExactError> {
        if !base.is_positive() || is_rational_square(&base) {
            return Err(ExactError::InvalidRoot(format_rational(&base)));
        }
        Ok(Self { base, degree })
    }

    pub fn sqrt(base: Rational) -> Result<Self, ExactError> {
        Self::new(base, RootDegree::Square)
    }

    pub fn fourth_root(base: Rational) -> Result<Self, ExactError> {
        Self::new(base, RootDegree::Fourth)
    }

    pub fn base(&self) -> &Rational {
        &self.base
    }

    pub fn degree(&self) -> RootDegree {
        self.degree
    }

    /// The square of this value: a rational for square roots, and the square
    /// root of the base (itself irrational) for fourth roots.
    pub fn squared(&self) -> Term {
        match self.degree {
            RootDegree::Square => Term::rational(self.base.clone()),
            RootDegree::Fourth => Term::root(
                Rational::one(),
                RootValue {
                    base: self.base.clone(),
                    degree: RootDegree::Square,
                },
            ),
        }
    }
}

impl fmt::Display for RootValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})^(1/{})",
            format_rational(&self.base),
            self.degree.as_u32()
        )
    }
}
