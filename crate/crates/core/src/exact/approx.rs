//! Rational points chosen against irrational endpoints: the simplest rational
//! inside an interval, and the best lower approximation under a denominator
//! cap. Both walk the Stern–Brocot tree, galloping through runs of equal
//! moves, and decide every step with an exact comparison.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{cmp_root_expr, ExactError, Rational, RootDegree, RootExpr};

pub const DEFAULT_DENOMINATOR_CAP: u64 = 1_000_000;

const ENCLOSURE_BITS: u64 = 96;

type Frac = (BigInt, BigInt);

fn frac_value((p, q): &Frac) -> Rational {
    Rational::new(p.clone(), q.clone())
}

fn frac_step((p, q): &Frac, (dp, dq): &Frac, k: &BigInt) -> Frac {
    (p + dp * k, q + dq * k)
}

/// Largest `k` in `1..=limit` with `pred(k)`, given `pred(1)` and that `pred`
/// is true on a prefix.
fn last_true(mut pred: impl FnMut(&BigInt) -> bool, limit: Option<&BigInt>) -> BigInt {
    let mut lo = BigInt::one();
    let mut hi = BigInt::from(2);
    loop {
        if let Some(limit) = limit {
            if &hi > limit {
                hi = limit + 1;
                break;
            }
        }
        if !pred(&hi) {
            break;
        }
        lo = hi.clone();
        hi *= 2;
    }
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1;
        if pred(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Largest `p/q` with `1 <= q <= cap` and `le(p/q)`, where `le` is
/// "at most x" for some real `x >= 0`.
fn best_lower_by(mut le: impl FnMut(&Rational) -> bool, cap: &BigInt) -> Rational {
    let mut low: Frac = (BigInt::zero(), BigInt::one());
    let mut high: Frac = (BigInt::one(), BigInt::zero());
    loop {
        let mediant = (&low.0 + &high.0, &low.1 + &high.1);
        if &mediant.1 > cap {
            return frac_value(&low);
        }
        if le(&frac_value(&mediant)) {
            let limit = (!high.1.is_zero()).then(|| (cap - &low.1) / &high.1);
            let k = last_true(
                |k| le(&frac_value(&frac_step(&low, &high, k))),
                limit.as_ref(),
            );
            low = frac_step(&low, &high, &k);
        } else {
            let limit = (cap - &high.1) / &low.1;
            let k = last_true(
                |k| !le(&frac_value(&frac_step(&high, &low, k))),
                Some(&limit),
            );
            high = frac_step(&high, &low, &k);
        }
    }
}

/// A rational interval containing the value of `expr`, with endpoints on the
/// grid `2^-bits`.
pub(crate) fn enclose(expr: &RootExpr, bits: u64) -> (Rational, Rational) {
    let scale = BigInt::one() << bits;
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    for term in expr.terms() {
        let (t_lo, t_hi) = match &term.root {
            None => (term.coef.clone(), term.coef.clone()),
            Some(root) => {
                let degree = root.degree().as_u32();
                let base = root.base();
                let shifted = (base.numer() << (bits * u64::from(degree))).div_floor(base.denom());
                let floor_root = match root.degree() {
                    RootDegree::Square => shifted.sqrt(),
                    RootDegree::Fourth => shifted.sqrt().sqrt(),
                };
                let r_lo = Rational::new(floor_root.clone(), scale.clone());
                let r_hi = Rational::new(floor_root + 1, scale.clone());
                if term.coef.is_negative() {
                    (&term.coef * r_hi, &term.coef * r_lo)
                } else {
                    (&term.coef * r_lo, &term.coef * r_hi)
                }
            }
        };
        lo += t_lo;
        hi += t_hi;
    }
    (lo, hi)
}

fn at_most_all(value: &Rational, components: &[RootExpr]) -> bool {
    let value = RootExpr::rational(value.clone());
    components.iter().all(|c| {
        cmp_root_expr(&value, c).expect("components are in the two-term fragment")
            != Ordering::Greater
    })
}

/// Largest rational with denominator at most `cap` that does not exceed
/// `min(components)`.
///
/// The cap grows by factors of 1000 until the result is positive. Returns
/// `None` when the minimum is not positive.
pub fn best_lower_bound(components: &[RootExpr], cap: u64) -> Option<Rational> {
    if components.is_empty() || components.iter().any(|c| c.sign() != Ordering::Greater) {
        return None;
    }
    let mut cap = BigInt::from(cap.max(1));
    loop {
        let bound = best_lower_at_cap(components, &cap);
        if bound.is_positive() {
            return Some(bound);
        }
        cap *= 1000;
    }
}

fn best_lower_at_cap(components: &[RootExpr], cap: &BigInt) -> Rational {
    // The enclosure only proposes; the exact walk decides whenever the two
    // enclosure ends disagree, and the proposal is always certified.
    let enclosures: Vec<_> = components
        .iter()
        .map(|c| enclose(c, ENCLOSURE_BITS))
        .collect();
    let lo = enclosures
        .iter()
        .map(|e| e.0.clone())
        .min()
        .expect("nonempty");
    let hi = enclosures
        .iter()
        .map(|e| e.1.clone())
        .min()
        .expect("nonempty");
    if !lo.is_negative() {
        let from_lo = best_lower_by(|r| r <= &lo, cap);
        let from_hi = best_lower_by(|r| r <= &hi, cap);
        if from_lo == from_hi && at_most_all(&from_lo, components) {
            return from_lo;
        }
    }
    best_lower_by(|r| at_most_all(r, components), cap)
}

fn cmp_rational(value: &Rational, expr: &RootExpr) -> Result<Ordering, ExactError> {
    cmp_root_expr(&RootExpr::rational(value.clone()), expr)
}

/// Greatest integer `n` with `n <= expr`.
fn floor_of(expr: &RootExpr) -> Result<BigInt, ExactError> {
    let (lo, _) = enclose(expr, 64);
    let mut n = lo.floor().to_integer();
    while cmp_rational(&Rational::from_integer(n.clone()), expr)? == Ordering::Greater {
        n -= 1;
    }
    while cmp_rational(&Rational::from_integer(&n + 1), expr)? != Ordering::Greater {
        n += 1;
    }
    Ok(n)
}

/// The rational of smallest denominator strictly inside `(lo, hi)`, ties
/// broken by smallest numerator.
pub fn rational_in_interval(lo: &RootExpr, hi: &RootExpr) -> Result<Rational, ExactError> {
    if cmp_root_expr(lo, hi)? != Ordering::Less {
        return Err(ExactError::EmptyInterval);
    }
    let floor = floor_of(lo)?;
    let first_integer = Rational::from_integer(&floor + 1);
    if cmp_rational(&first_integer, hi)? == Ordering::Less {
        return Ok(first_integer);
    }

    // (lo, hi) lies inside [floor, floor + 1]: descend from 0/1 and 1/1,
    // offset by floor.
    let offset = Rational::from_integer(floor);
    let shifted = |f: &Frac| &offset + frac_value(f);
    let at_most_lo = |f: &Frac| -> Result<bool, ExactError> {
        Ok(cmp_rational(&shifted(f), lo)? != Ordering::Greater)
    };
    let at_least_hi = |f: &Frac| -> Result<bool, ExactError> {
        Ok(cmp_rational(&shifted(f), hi)? != Ordering::Less)
    };
    let mut low: Frac = (BigInt::zero(), BigInt::one());
    let mut high: Frac = (BigInt::one(), BigInt::one());
    let mut error = None;
    loop {
        let mediant = (&low.0 + &high.0, &low.1 + &high.1);
        if at_most_lo(&mediant)? {
            let k = last_true(
                |k| {
                    at_most_lo(&frac_step(&low, &high, k)).unwrap_or_else(|e| {
                        error = Some(e);
                        false
                    })
                },
                None,
            );
            low = frac_step(&low, &high, &k);
        } else if at_least_hi(&mediant)? {
            let k = last_true(
                |k| {
                    at_least_hi(&frac_step(&high, &low, k)).unwrap_or_else(|e| {
                        error = Some(e);
                        false
                    })
                },
                None,
            );
            high = frac_step(&high, &low, &k);
        } else {
            return Ok(shifted(&mediant));
        }
        if let Some(e) = error.take() {
            return Err(e);
        }
    }
}
