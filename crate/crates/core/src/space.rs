//! Finite-support rational sequences.
//!
//! Points of Erdős space are square-summable rational sequences. Only points
//! with finitely many nonzero coordinates are represented here: they are dense
//! in the space, and every predicate used by the construction restricted to
//! them is decidable with exact arithmetic. A point whose norm equals an
//! irrational threshold therefore never occurs.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::exact::{cmp_rational_vs_root, format_rational, Rational, RootDegree, RootValue};

/// Coordinate index, 1-based.
pub type Index = u64;

/// A sequence `(x_1, x_2, ...)` with finitely many nonzero rational entries.
///
/// Only nonzero coordinates are stored, so two points are equal iff they
/// agree in every coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct Point {
    coords: BTreeMap<Index, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("coordinate indices start at 1")]
pub struct ZeroIndex;

impl Point {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a point from `(index, value)` pairs, dropping zeros. Later
    /// duplicates overwrite earlier ones.
    pub fn from_coords<I>(coords: I) -> Result<Self, ZeroIndex>
    where
        I: IntoIterator<Item = (Index, Rational)>,
    {
        let mut point = Self::zero();
        for (index, value) in coords {
            if index == 0 {
                return Err(ZeroIndex);
            }
            point.set(index, value);
        }
        Ok(point)
    }

    /// Dense constructor: `values[0]` is `x_1`.
    pub fn from_dense(values: impl IntoIterator<Item = Rational>) -> Self {
        let mut point = Self::zero();
        for (i, value) in values.into_iter().enumerate() {
            point.set(i as Index + 1, value);
        }
        point
    }

    /// The unit vector `e^l`.
    pub fn unit(index: Index) -> Self {
        assert!(index >= 1, "coordinate indices start at 1");
        let mut point = Self::zero();
        point.set(index, Rational::from_integer(1.into()));
        point
    }

    fn set(&mut self, index: Index, value: Rational) {
        if value.is_zero() {
            self.coords.remove(&index);
        } else {
            self.coords.insert(index, value);
        }
    }

    pub fn get(&self, index: Index) -> Rational {
        self.coords
            .get(&index)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Nonzero coordinates in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = (Index, &Rational)> + '_ {
        self.coords.iter().map(|(i, v)| (*i, v))
    }

    pub fn support_len(&self) -> usize {
        self.coords.len()
    }

    pub fn max_index(&self) -> Option<Index> {
        self.coords.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    /// `‖x‖²`.
    pub fn norm_sq(&self) -> Rational {
        match self.raw_partial_sums().last() {
            Some((_, p, q)) => Rational::new(p, q),
            None => Rational::zero(),
        }
    }

    /// Partial sums `(m, P, Q)` with `Σ_{k<=m} x_k² = P/Q`, `Q > 0`, not
    /// reduced to lowest terms. Skipping the gcd after every addition is what
    /// makes this cheaper than summing [`Rational`]s.
    pub(crate) fn raw_partial_sums(&self) -> impl Iterator<Item = (Index, BigInt, BigInt)> + '_ {
        self.coords
            .iter()
            .scan((BigInt::zero(), BigInt::one()), |(p, q), (i, v)| {
                let (a, b) = (v.numer() * v.numer(), v.denom() * v.denom());
                *p = &*p * &b + &a * &*q;
                *q = &*q * &b;
                Some((*i, p.clone(), q.clone()))
            })
    }

    /// `Σ_{k <= m} x_k²`.
    pub fn partial_norm_sq(&self, m: Index) -> Rational {
        self.coords.range(..=m).map(|(_, v)| v * v).sum()
    }

    /// `Σ_{k >= l} x_k²`.
    pub fn tail_norm_sq(&self, l: Index) -> Rational {
        self.coords.range(l..).map(|(_, v)| v * v).sum()
    }

    /// Running partial sums `(m, Σ_{k<=m} x_k²)` at each support index.
    pub fn partial_sums(&self) -> impl Iterator<Item = (Index, Rational)> + '_ {
        self.coords.iter().scan(Rational::zero(), |acc, (i, v)| {
            *acc += v * v;
            Some((*i, acc.clone()))
        })
    }

    pub fn add(&self, other: &Point) -> Point {
        let mut out = self.clone();
        for (i, v) in &other.coords {
            let sum = out.get(*i) + v;
            out.set(*i, sum);
        }
        out
    }

    pub fn sub(&self, other: &Point) -> Point {
        self.add(&other.scale(&-Rational::from_integer(1.into())))
    }

    pub fn scale(&self, factor: &Rational) -> Point {
        if factor.is_zero() {
            return Point::zero();
        }
        Point {
            coords: self.coords.iter().map(|(i, v)| (*i, v * factor)).collect(),
        }
    }

    pub fn distance_sq(&self, other: &Point) -> Rational {
        self.sub(other).norm_sq()
    }

    /// The least `m` with `√(Σ_{k<=m} x_k²) > α`, if any.
    ///
    /// For a fourth root `alpha`, the test `Σ > α²` compares a rational
    /// against the square root `α² = √base` and is never an equality. Partial
    /// sums only change at support indices, so only those are inspected.
    pub fn m_index(&self, alpha: &RootValue) -> Option<Index> {
        let threshold = alpha_squared(alpha);
        self.raw_partial_sums()
            .find(|(_, p, q)| exceeds_ratio(p, q, &threshold))
            .map(|(m, _, _)| m)
    }

    /// The largest absolute coordinate value, zero for the origin.
    pub fn sup_norm(&self) -> Rational {
        self.coords
            .values()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> Vec<Index> {
        self.coords.keys().copied().collect()
    }
}

/// `α²` as an exact threshold: `√base` for a fourth root, `base` for a
/// square root.
pub(crate) fn alpha_squared(alpha: &RootValue) -> AlphaSquared {
    match alpha.squared().root {
        Some(root) => AlphaSquared::Irrational(root),
        None => AlphaSquared::Rational(alpha.base().clone()),
    }
}

pub(crate) enum AlphaSquared {
    Irrational(RootValue),
    Rational(Rational),
}

/// `sum > α²`.
pub(crate) fn exceeds(sum: &Rational, threshold: &AlphaSquared) -> bool {
    match threshold {
        AlphaSquared::Irrational(root) => cmp_rational_vs_root(sum, root).is_gt(),
        AlphaSquared::Rational(value) => sum > value,
    }
}

/// `p/q > α²` for `q > 0`, `p >= 0`, by integer cross-multiplication.
fn exceeds_ratio(p: &BigInt, q: &BigInt, threshold: &AlphaSquared) -> bool {
    match threshold {
        // p/q > √(a/b)  <=>  p²·b > a·q²
        AlphaSquared::Irrational(root) => {
            let (a, b) = (root.base().numer(), root.base().denom());
            debug_assert_eq!(root.degree(), RootDegree::Square);
            p * p * b > a * q * q
        }
        AlphaSquared::Rational(value) => p * value.denom() > value.numer() * q,
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, (i, v)) in self.coords.iter().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{i}: {}", format_rational(v))?;
        }
        f.write_str("}")
    }
}
