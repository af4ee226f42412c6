//! Sign of a sum of rational multiples of square and fourth roots.
//!
//! Each distinct root becomes a generator `u_j > 0` whose square is a
//! polynomial in lower generators: `√b` squares to the rational `b`, and
//! `a^(1/4)` squares to the generator `√a`. An expression is a multilinear
//! polynomial in the generators. Writing it as `P + Q·u` for its highest
//! generator `u` with `u² = s`, the sign follows from the signs of `P`, `Q`
//! and `P² - Q²·s`, each of which no longer involves `u`. The identity holds
//! for any positive reals, so dependent generators (`√8` beside `√2`) need no
//! special handling.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, Zero};

use super::{sign_of, Rational, RootDegree, RootValue, Term};

type Monomial = u32;

#[derive(Debug, Clone, Default, PartialEq)]
struct Poly(BTreeMap<Monomial, Rational>);

impl Poly {
    fn constant(value: Rational) -> Self {
        let mut poly = Self::default();
        poly.add_term(0, value);
        poly
    }

    fn monomial(mask: Monomial) -> Self {
        let mut poly = Self::default();
        poly.add_term(mask, Rational::one());
        poly
    }

    fn add_term(&mut self, mask: Monomial, coef: Rational) {
        if coef.is_zero() {
            return;
        }
        let entry = self.0.entry(mask).or_insert_with(Rational::zero);
        *entry += coef;
        if entry.is_zero() {
            self.0.remove(&mask);
        }
    }

    fn add_scaled(&mut self, other: &Poly, factor: &Rational) {
        for (mask, coef) in &other.0 {
            self.add_term(*mask, coef * factor);
        }
    }

    fn top_generator(&self) -> Option<u32> {
        self.0
            .keys()
            .filter(|m| **m != 0)
            .map(|m| 31 - m.leading_zeros())
            .max()
    }
}

pub(super) struct Tower {
    /// `squares[j]` is `u_j²` as a polynomial in generators below `j`.
    squares: Vec<Poly>,
    expr: Poly,
}

#[derive(PartialEq, Eq, PartialOrd, Ord, Clone)]
enum GenKey {
    Sqrt(Rational),
    Fourth(Rational),
}

impl Tower {
    pub(super) fn from_terms(terms: &[Term]) -> Self {
        // Square-root generators first, so every fourth root sits above the
        // square root it squares to.
        let mut keys: Vec<GenKey> = Vec::new();
        for root in terms.iter().filter_map(|t| t.root.as_ref()) {
            keys.push(GenKey::Sqrt(root.base().clone()));
            if root.degree() == RootDegree::Fourth {
                keys.push(GenKey::Fourth(root.base().clone()));
            }
        }
        keys.sort();
        keys.dedup();
        assert!(keys.len() <= 31, "too many distinct roots");

        let index = |key: &GenKey| keys.binary_search(key).expect("registered") as u32;
        let squares = keys
            .iter()
            .map(|key| match key {
                GenKey::Sqrt(base) => Poly::constant(base.clone()),
                GenKey::Fourth(base) => Poly::monomial(1 << index(&GenKey::Sqrt(base.clone()))),
            })
            .collect();

        let mut expr = Poly::default();
        for term in terms {
            let mask = match &term.root {
                None => 0,
                Some(root) => 1 << index(&Self::key_of(root)),
            };
            expr.add_term(mask, term.coef.clone());
        }
        Self { squares, expr }
    }

    fn key_of(root: &RootValue) -> GenKey {
        match root.degree() {
            RootDegree::Square => GenKey::Sqrt(root.base().clone()),
            RootDegree::Fourth => GenKey::Fourth(root.base().clone()),
        }
    }

    pub(super) fn sign(&self) -> Ordering {
        self.sign_poly(&self.expr)
    }

    fn sign_poly(&self, poly: &Poly) -> Ordering {
        let Some(top) = poly.top_generator() else {
            return poly.0.get(&0).map_or(Ordering::Equal, sign_of);
        };
        let bit = 1 << top;
        let mut rest = Poly::default();
        let mut coef = Poly::default();
        for (mask, c) in &poly.0 {
            if mask & bit != 0 {
                coef.add_term(mask & !bit, c.clone());
            } else {
                rest.add_term(*mask, c.clone());
            }
        }
        let rest_sign = self.sign_poly(&rest);
        let coef_sign = self.sign_poly(&coef);
        match (rest_sign, coef_sign) {
            (r, Ordering::Equal) => r,
            (Ordering::Equal, c) => c,
            (r, c) if r == c => r,
            (r, _) => {
                // rest and coef·u have opposite signs: compare rest² with coef²·u².
                let mut diff = self.mul(&rest, &rest);
                let coef_sq = self.mul(&coef, &coef);
                let scaled = self.mul(&coef_sq, &self.squares[top as usize]);
                diff.add_scaled(&scaled, &-Rational::one());
                match self.sign_poly(&diff) {
                    Ordering::Equal => Ordering::Equal,
                    d if r == Ordering::Greater => d,
                    d => d.reverse(),
                }
            }
        }
    }

    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        let mut out = Poly::default();
        for (ma, ca) in &a.0 {
            for (mb, cb) in &b.0 {
                let product = ca * cb;
                if *ma & *mb == 0 {
                    out.add_term(ma | mb, product);
                } else {
                    out.add_scaled(&self.mul_monomials(*ma, *mb), &product);
                }
            }
        }
        out
    }

    /// Product of two generator monomials, reducing `u_j²` to its square.
    fn mul_monomials(&self, a: Monomial, b: Monomial) -> Poly {
        let overlap = a & b;
        if overlap == 0 {
            return Poly::monomial(a | b);
        }
        let top = 31 - overlap.leading_zeros();
        let bit = 1 << top;
        let rest = self.mul_monomials(a & !bit, b & !bit);
        self.mul(&self.squares[top as usize], &rest)
    }
}
