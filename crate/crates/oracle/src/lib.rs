//! Decimal interval arithmetic used as an independent cross-check for the
//! exact engine in `erdos-core`.
//!
//! Values are sums of terms `c · b^(1/k)` with rational `c`, `b`. A value is
//! enclosed at `d` decimal digits by integer `k`-th roots of `b · 10^(dk)`,
//! and two values are ordered once their enclosures separate. Precision
//! doubles until that happens or the digit budget runs out, in which case the
//! oracle reports no decision. Nothing here shares code with the exact
//! engine: it never squares, never reduces to polynomial sign questions and
//! works in base 10.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `coef · base^(1/degree)`; `degree == 1` is a plain rational.
#[derive(Debug, Clone, PartialEq)]
pub struct OTerm {
    pub coef: BigRational,
    pub base: BigRational,
    pub degree: u32,
}

impl OTerm {
    pub fn rational(value: BigRational) -> Self {
        Self {
            coef: value,
            base: BigRational::one(),
            degree: 1,
        }
    }

    pub fn root(coef: BigRational, base: BigRational, degree: u32) -> Self {
        assert!(degree >= 1 && !base.is_negative());
        Self { coef, base, degree }
    }
}

/// Closed interval `[lo, hi] · 10^-digits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: BigInt,
    pub hi: BigInt,
    pub digits: u32,
}

impl Enclosure {
    fn cmp(&self, other: &Enclosure) -> Option<Ordering> {
        debug_assert_eq!(self.digits, other.digits);
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && other.lo == other.hi && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn overlaps(&self, other: &Enclosure) -> bool {
        !(self.hi < other.lo || self.lo > other.hi)
    }
}

fn pow10(digits: u32) -> BigInt {
    BigInt::from(10u32).pow(digits)
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// Enclosure of `base^(1/degree)` scaled by `10^digits`.
fn enclose_root(base: &BigRational, degree: u32, digits: u32) -> (BigInt, BigInt) {
    let scaled = base.numer() * pow10(digits * degree);
    let lo_arg = floor_div(&scaled, base.denom());
    let hi_arg = ceil_div(&scaled, base.denom());
    let lo = lo_arg.nth_root(degree);
    let hi_floor = hi_arg.nth_root(degree);
    let hi = if hi_floor.pow(degree) == hi_arg {
        hi_floor
    } else {
        hi_floor + 1
    };
    (lo, hi)
}

pub fn enclose(terms: &[OTerm], digits: u32) -> Enclosure {
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    for term in terms {
        let (r_lo, r_hi) = if term.degree == 1 {
            let scaled = term.base.numer() * pow10(digits);
            (
                floor_div(&scaled, term.base.denom()),
                ceil_div(&scaled, term.base.denom()),
            )
        } else {
            enclose_root(&term.base, term.degree, digits)
        };
        let (p, q) = (term.coef.numer(), term.coef.denom());
        let (a, b) = if p.is_negative() {
            (p * &r_hi, p * &r_lo)
        } else {
            (p * &r_lo, p * &r_hi)
        };
        lo += floor_div(&a, q);
        hi += ceil_div(&b, q);
    }
    Enclosure { lo, hi, digits }
}

/// Adaptive-precision comparison driver.
#[derive(Debug, Clone, Copy)]
pub struct Oracle {
    pub start_digits: u32,
    pub max_digits: u32,
}

impl Default for Oracle {
    fn default() -> Self {
        Self {
            start_digits: 20,
            max_digits: 2000,
        }
    }
}

impl Oracle {
    /// An oracle that never looks at fewer than `digits` decimal digits.
    pub fn with_min_digits(digits: u32) -> Self {
        Self {
            start_digits: digits,
            max_digits: digits.max(2000),
        }
    }

    /// Orders `Σ lhs` against `Σ rhs`; `None` if undecided within the budget.
    /// `Equal` is only reported when both sides are exact and identical.
    pub fn cmp(&self, lhs: &[OTerm], rhs: &[OTerm]) -> Option<Ordering> {
        let mut digits = self.start_digits.max(1);
        loop {
            let order = enclose(lhs, digits).cmp(&enclose(rhs, digits));
            if order.is_some() || digits >= self.max_digits {
                return order;
            }
            digits = (digits * 2).min(self.max_digits);
        }
    }

    /// Whether the enclosures still overlap at full precision, the only
    /// evidence of equality an interval method can give.
    pub fn indistinguishable(&self, lhs: &[OTerm], rhs: &[OTerm]) -> bool {
        enclose(lhs, self.max_digits).overlaps(&enclose(rhs, self.max_digits))
    }

    pub fn cmp_rational_root(
        &self,
        s: &BigRational,
        base: &BigRational,
        degree: u32,
    ) -> Option<Ordering> {
        self.cmp(
            &[OTerm::rational(s.clone())],
            &[OTerm::root(BigRational::one(), base.clone(), degree)],
        )
    }

    /// `√(Σ_{k<=m} x_k²) > α` at every index `m = 1, 2, ...` in turn, up to the
    /// largest index of the support, with `α = alpha_base^(1/4)`.
    pub fn m_index_scan(
        &self,
        coords: &[(u64, BigRational)],
        alpha_base: &BigRational,
    ) -> Option<u64> {
        let max = coords.iter().map(|(i, _)| *i).max()?;
        let alpha = [OTerm::root(BigRational::one(), alpha_base.clone(), 4)];
        let mut partial = BigRational::zero();
        for m in 1..=max {
            for (_, v) in coords.iter().filter(|(i, _)| *i == m) {
                partial += v * v;
            }
            let norm = [OTerm::root(BigRational::one(), partial.clone(), 2)];
            if self.cmp(&norm, &alpha).expect("irrational threshold") == Ordering::Greater {
                return Some(m);
            }
        }
        None
    }

    /// Membership in `A_{α,β}` with `α = alpha_base^(1/4)`, `β = beta_base^(1/2)`.
    pub fn in_a(
        &self,
        coords: &[(u64, BigRational)],
        alpha_base: &BigRational,
        beta_base: &BigRational,
    ) -> bool {
        let Some(m) = self.m_index_scan(coords, alpha_base) else {
            return true;
        };
        coords.iter().filter(|(l, _)| *l > m).all(|(_, v)| {
            self.cmp_rational_root(&v.abs(), beta_base, 2)
                .expect("irrational threshold")
                == Ordering::Less
        })
    }

    /// Membership in `O` for the schedule `αₙ = n·alpha_scale^(1/4)`,
    /// `βₙ = beta_scale^(1/2)/n`, checking `n` until `‖x‖ < αₙ`.
    pub fn in_o(
        &self,
        coords: &[(u64, BigRational)],
        alpha_scale: &BigRational,
        beta_scale: &BigRational,
    ) -> bool {
        let norm_sq: BigRational = coords.iter().map(|(_, v)| v * v).sum();
        let norm = [OTerm::root(BigRational::one(), norm_sq, 2)];
        for n in 1u64.. {
            let n_big = BigRational::from_integer(BigInt::from(n));
            let alpha_base = alpha_scale * n_big.pow(4);
            let beta_base = beta_scale / n_big.pow(2);
            if !self.in_a(coords, &alpha_base, &beta_base) {
                return false;
            }
            let alpha = [OTerm::root(BigRational::one(), alpha_base, 4)];
            if self.cmp(&norm, &alpha) == Some(Ordering::Less) {
                return true;
            }
        }
        unreachable!()
    }

    /// A decimal reading of `Σ terms` with `digits` digits, for messages.
    pub fn approx(&self, terms: &[OTerm], digits: u32) -> f64 {
        let e = enclose(terms, digits);
        let mid = BigRational::new(e.lo + e.hi, pow10(digits) * 2);
        num_traits::ToPrimitive::to_f64(&mid).unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn encloses_known_values() {
        let e = enclose(&[OTerm::root(r(1, 1), r(2, 1), 2)], 30);
        let digits: BigInt = "1414213562373095048801688724209".parse().unwrap();
        assert!(e.lo <= digits && digits <= e.hi);
        assert!(&e.hi - &e.lo <= BigInt::one());
        let e = enclose(&[OTerm::root(r(-3, 1), r(2, 1), 4)], 10);
        // -3·2^(1/4) = -3.5676213450...
        assert!(e.lo <= BigInt::from(-35676213450i64) && BigInt::from(-35676213450i64) <= e.hi);
    }

    #[test]
    fn orders_close_values() {
        let o = Oracle::default();
        // 1 - √(1/2) < 2 - 2^(1/4)
        let lhs = [OTerm::rational(r(1, 1)), OTerm::root(r(-1, 1), r(1, 2), 2)];
        let rhs = [OTerm::rational(r(2, 1)), OTerm::root(r(-1, 1), r(2, 1), 4)];
        assert_eq!(o.cmp(&lhs, &rhs), Some(Ordering::Less));
        assert_eq!(
            o.cmp_rational_root(&r(3, 1), &r(2, 1), 4),
            Some(Ordering::Greater)
        );
        // √8 and 2√2 cannot be separated
        let a = [OTerm::root(r(1, 1), r(8, 1), 2)];
        let b = [OTerm::root(r(2, 1), r(2, 1), 2)];
        let small = Oracle {
            start_digits: 10,
            max_digits: 80,
        };
        assert_eq!(small.cmp(&a, &b), None);
        assert!(small.indistinguishable(&a, &b));
    }

    #[test]
    fn predicates() {
        let o = Oracle::default();
        let x = [(1, r(2, 1)), (2, r(1, 1))];
        assert_eq!(o.m_index_scan(&x, &r(2, 1)), Some(1));
        assert!(!o.in_a(&x, &r(2, 1), &r(1, 2)));
        assert!(o.in_o(&x, &r(2, 1), &r(2, 1)));
        assert!(!o.in_o(&[(1, r(3, 1)), (2, r(1, 1))], &r(2, 1), &r(2, 1)));
    }
}
