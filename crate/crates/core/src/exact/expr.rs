use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::{One, Signed, Zero};

use super::tower::Tower;
use super::{format_rational, rational_sqrt_exact, sign_of, ExactError, Rational, RootValue};

/// `coef` or `coef · root`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coef: Rational,
    pub root: Option<RootValue>,
}

impl Term {
    pub fn rational(coef: Rational) -> Self {
        Self { coef, root: None }
    }

    pub fn root(coef: Rational, root: RootValue) -> Self {
        Self {
            coef,
            root: Some(root),
        }
    }

    /// `√value` for a nonnegative rational, kept rational when `value` is a
    /// square.
    pub fn sqrt_of(value: &Rational) -> Self {
        debug_assert!(!value.is_negative());
        match rational_sqrt_exact(value) {
            Some(root) => Self::rational(root),
            None => Self::root(
                Rational::one(),
                RootValue::sqrt(value.clone()).expect("positive non-square"),
            ),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            coef: -&self.coef,
            root: self.root.clone(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self {
            coef: &self.coef * factor,
            root: self.root.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coef.is_zero()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.root {
            None => f.write_str(&format_rational(&self.coef)),
            Some(root) if self.coef.is_one() => write!(f, "{root}"),
            Some(root) => write!(f, "{}*{root}", format_rational(&self.coef)),
        }
    }
}

/// A signed sum of [`Term`]s.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RootExpr {
    terms: Vec<Term>,
}

impl RootExpr {
    pub fn new(terms: Vec<Term>) -> Self {
        Self {
            terms: terms.into_iter().filter(|t| !t.is_zero()).collect(),
        }
    }

    pub fn rational(value: Rational) -> Self {
        Self::new(alloc::vec![Term::rational(value)])
    }

    pub fn root(root: RootValue) -> Self {
        Self::new(alloc::vec![Term::root(Rational::one(), root)])
    }

    pub fn term(term: Term) -> Self {
        Self::new(alloc::vec![term])
    }

    /// `a - b` for two single terms.
    pub fn difference(a: Term, b: Term) -> Self {
        Self::new(alloc::vec![a, b.neg()])
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(Term::neg).collect(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self::new(self.terms.iter().map(|t| t.scale(factor)).collect())
    }

    /// Exact sign of the represented real number.
    pub fn sign(&self) -> Ordering {
        sign_of_terms(&self.terms)
    }

    /// The single rational this expression reduces to, if it has no root terms.
    pub fn as_rational(&self) -> Option<Rational> {
        self.terms
            .iter()
            .try_fold(Rational::zero(), |acc, t| match t.root {
                None => Some(acc + &t.coef),
                Some(_) => None,
            })
    }
}

impl fmt::Display for RootExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0/1");
        }
        for (i, term) in self.terms.iter().enumerate() {
            if i > 0 {
                if term.coef.is_negative() {
                    write!(f, " - {}", term.neg())?;
                    continue;
                }
                f.write_str(" + ")?;
            }
            write!(f, "{term}")?;
        }
        Ok(())
    }
}

/// Orders a rational against an irrational root. Never returns `Equal`.
///
/// For `s > 0`, `s < base^(1/d)` iff `s^d < base`; nonpositive `s` is below
/// every positive root.
pub fn cmp_rational_vs_root(s: &Rational, t: &RootValue) -> Ordering {
    if !s.is_positive() {
        return Ordering::Less;
    }
    // s = p/q, base = a/b in lowest terms: compare p^d·b with a·q^d.
    let d = t.degree().as_u32();
    let order = (s.numer().pow(d) * t.base().denom()).cmp(&(t.base().numer() * s.denom().pow(d)));
    debug_assert_ne!(order, Ordering::Equal, "root base is a perfect power");
    order
}

/// Orders two sums of at most two terms each.
///
/// Returns `Equal` exactly when the two sides denote the same real number.
pub fn cmp_root_expr(lhs: &RootExpr, rhs: &RootExpr) -> Result<Ordering, ExactError> {
    for side in [lhs, rhs] {
        if side.len() > 2 {
            return Err(ExactError::UnsupportedForm(side.len()));
        }
    }
    let mut difference: Vec<Term> = lhs.terms.clone();
    difference.extend(rhs.terms.iter().map(Term::neg));
    Ok(sign_of_terms(&difference))
}

/// Exact sign of `Σ terms`, for any number of terms.
pub fn sign_of_terms(terms: &[Term]) -> Ordering {
    match terms {
        [] => Ordering::Equal,
        [single] => sign_of(&single.coef),
        _ => Tower::from_terms(terms).sign(),
    }
}
