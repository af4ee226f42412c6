//! Explicit neighbourhood radii with certified rational lower bounds.
//!
//! Each radius is the minimum of a few components, every one of which is a
//! difference of two terms (a rational, a square root or a fourth root). The
//! certified bound is the largest rational with denominator at most the cap
//! that does not exceed that minimum.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, Signed, ToPrimitive};

use super::{failing_index, first_violation, in_a, in_o, AlphaBetaPair, ClopenError, Schedule};
use crate::exact::{
    best_lower_bound, cmp_rational_vs_root, cmp_root_expr, Rational, RootExpr, Term,
};
use crate::space::{Index, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CertificateKind {
    /// `α - ‖x‖` for a point of the open ball `B(0, α)`.
    Claim1Margin,
    /// Radius of a ball around a point outside `A_{α,β}` that misses `A_{α,β}`.
    Claim2R0,
    /// `√(α²+β²) - α` around a point with `‖x‖ = α`. Finite-support points
    /// never have an irrational norm, so no operation produces this kind.
    Claim3R1,
    /// Radius of a ball around a point of `A_{α,β}` with `m_{x,α}` defined.
    Claim3R,
    /// Radius of a ball around a point of `O` that stays inside `O`.
    Claim4W,
}

impl CertificateKind {
    pub fn name(self) -> &'static str {
        match self {
            CertificateKind::Claim1Margin => "Claim1Margin",
            CertificateKind::Claim2R0 => "Claim2_r0",
            CertificateKind::Claim3R1 => "Claim3_r1",
            CertificateKind::Claim3R => "Claim3_r",
            CertificateKind::Claim4W => "Claim4_W",
        }
    }
}

/// One named quantity whose minimum with the others is the radius.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub name: &'static str,
    pub value: RootExpr,
}

impl Component {
    fn new(name: &'static str, value: RootExpr) -> Self {
        Self { name, value }
    }

    /// A floating-point reading of the value, for display only.
    pub fn approx(&self) -> f64 {
        let (lo, hi) = crate::exact::enclose(&self.value, 64);
        ((lo + hi) / Rational::from_integer(2.into()))
            .to_f64()
            .unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusCertificate {
    pub kind: CertificateKind,
    /// Positive rational, at most the true radius.
    pub bound: Rational,
    pub components: Vec<Component>,
    /// `m_{x,α}` where it is defined.
    pub m: Option<Index>,
    /// The index `l₀` chosen by the construction, if any.
    pub l0: Option<Index>,
    /// For [`CertificateKind::Claim4W`]: `n₀` with `‖x‖ < α_{n₀}`.
    pub n0: Option<u64>,
    /// For [`CertificateKind::Claim4W`]: the radius for `A_{αₙ,βₙ}`, `n <= n₀`.
    pub parts: Vec<(u64, RadiusCertificate)>,
}

impl RadiusCertificate {
    fn build(
        kind: CertificateKind,
        components: Vec<Component>,
        cap: u64,
    ) -> Result<Self, ClopenError> {
        let values: Vec<RootExpr> = components.iter().map(|c| c.value.clone()).collect();
        let bound = best_lower_bound(&values, cap)
            .ok_or(ClopenError::PreconditionViolated("radius is not positive"))?;
        Ok(Self {
            kind,
            bound,
            components,
            m: None,
            l0: None,
            n0: None,
            parts: Vec::new(),
        })
    }

    /// `bound²`, the squared-distance threshold for points inside the ball.
    pub fn bound_sq(&self) -> Rational {
        &self.bound * &self.bound
    }

    /// Whether `y` lies in the open ball of radius `bound` around `center`.
    pub fn covers(&self, center: &Point, y: &Point) -> bool {
        center.distance_sq(y) < self.bound_sq()
    }
}

fn sqrt_term(value: &Rational) -> Term {
    Term::sqrt_of(value)
}

fn alpha_term(pair: &AlphaBetaPair) -> Term {
    Term::root(Rational::one(), pair.alpha().clone())
}

fn beta_term(pair: &AlphaBetaPair) -> Term {
    Term::root(Rational::one(), pair.beta().clone())
}

/// `|β - |v||` as a two-term difference with a positive value.
fn distance_to_beta(v: &Rational, pair: &AlphaBetaPair) -> RootExpr {
    let abs = Term::rational(v.abs());
    match cmp_rational_vs_root(&v.abs(), pair.beta()) {
        Ordering::Less => RootExpr::difference(beta_term(pair), abs),
        _ => RootExpr::difference(abs, beta_term(pair)),
    }
}

/// Radius of a ball around `z ∉ A_{α,β}` disjoint from `A_{α,β}`:
/// the minimum of `|z_{l₀}| - β` and `√(Σ_{k<=m} z_k²) - α`, where `l₀` is the
/// least index after `m = m_{z,α}` with `|z_{l₀}| > β`.
pub fn closedness_radius(
    z: &Point,
    pair: &AlphaBetaPair,
    cap: u64,
) -> Result<RadiusCertificate, ClopenError> {
    let (m, l0) =
        first_violation(z, pair).ok_or(ClopenError::PreconditionViolated("point lies in A"))?;
    let components = vec![
        Component::new(
            "coordinate_margin",
            RootExpr::difference(Term::rational(z.get(l0).abs()), beta_term(pair)),
        ),
        Component::new(
            "partial_sum_margin",
            RootExpr::difference(sqrt_term(&z.partial_norm_sq(m)), alpha_term(pair)),
        ),
    ];
    let mut cert = RadiusCertificate::build(CertificateKind::Claim2R0, components, cap)?;
    cert.m = Some(m);
    cert.l0 = Some(l0);
    Ok(cert)
}

/// The least `l` with `Σ_{k>=l} x_k² < β²/4`.
fn tail_index(x: &Point, pair: &AlphaBetaPair) -> Index {
    let quarter = pair.beta_sq() / Rational::from_integer(4.into());
    core::iter::once(1)
        .chain(x.iter().map(|(i, _)| i + 1))
        .find(|l| x.tail_norm_sq(*l) < quarter)
        .expect("the tail past the support is empty")
}

/// Radius of a ball around `x ∈ A_{α,β}` inside `A_{α,β}`.
///
/// Without `m_{x,α}`, `‖x‖² < α²` (equality is impossible for a rational
/// norm), and the radius is the margin `α - ‖x‖` to the ball `B(0, α)`.
/// Otherwise it is the minimum of `√(Σ_{k<=m} x_k²) - α`, `β/2`, `h_x` and
/// `a_x`, with `l₀` the first index whose tail norm is below `β/2`.
pub fn openness_radius(
    x: &Point,
    pair: &AlphaBetaPair,
    cap: u64,
) -> Result<RadiusCertificate, ClopenError> {
    if !in_a(x, pair) {
        return Err(ClopenError::PreconditionViolated("point lies outside A"));
    }
    let Some(m) = x.m_index(pair.alpha()) else {
        let margin = RootExpr::difference(alpha_term(pair), sqrt_term(&x.norm_sq()));
        return RadiusCertificate::build(
            CertificateKind::Claim1Margin,
            vec![Component::new("ball_margin", margin)],
            cap,
        );
    };

    let l0 = tail_index(x, pair);

    // h_x = min{ |β - |x_i|| : i <= l₀ }; indices off the support give β.
    let mut h_x: Option<RootExpr> = None;
    let mut candidates: Vec<RootExpr> = x
        .iter()
        .filter(|(i, _)| *i <= l0)
        .map(|(_, v)| distance_to_beta(v, pair))
        .collect();
    if (x.iter().filter(|(i, _)| *i <= l0).count() as u64) < l0 {
        candidates.push(RootExpr::term(beta_term(pair)));
    }
    for candidate in candidates {
        let smaller = match &h_x {
            None => true,
            Some(current) => cmp_root_expr(&candidate, current)? == Ordering::Less,
        };
        if smaller {
            h_x = Some(candidate);
        }
    }
    let h_x = h_x.expect("l0 >= 1");

    // No partial sum precedes index 1; the constant 1 stands in for a_x there.
    let a_x = if m == 1 {
        RootExpr::rational(Rational::one())
    } else {
        RootExpr::difference(alpha_term(pair), sqrt_term(&x.partial_norm_sq(m - 1)))
    };

    let components = vec![
        Component::new(
            "partial_sum_margin",
            RootExpr::difference(sqrt_term(&x.partial_norm_sq(m)), alpha_term(pair)),
        ),
        Component::new(
            "beta_half",
            RootExpr::term(beta_term(pair).scale(&Rational::new(1.into(), 2.into()))),
        ),
        Component::new("h_x", h_x),
        Component::new("a_x", a_x),
    ];
    let mut cert = RadiusCertificate::build(CertificateKind::Claim3R, components, cap)?;
    cert.m = Some(m);
    cert.l0 = Some(l0);
    Ok(cert)
}

/// Radius of a ball around `x ∈ O` inside `O`: the neighbourhood
/// `W = (⋂_{n<=n₀} A_{αₙ,βₙ}) ∩ B(0, α_{n₀})` with `‖x‖ < α_{n₀}` contains
/// the ball whose radius is the least of the `A`-radii for `n <= n₀` and the
/// margin `α_{n₀} - ‖x‖`.
pub fn o_openness_radius(
    x: &Point,
    schedule: &Schedule,
    cap: u64,
) -> Result<RadiusCertificate, ClopenError> {
    if !in_o(x, schedule) {
        return Err(ClopenError::PreconditionViolated("point lies outside O"));
    }
    let n0 = schedule.ball_index(x);
    let mut parts = Vec::new();
    for n in 1..=n0 {
        parts.push((n, openness_radius(x, &schedule.pair_at(n), cap)?));
    }
    let margin = Component::new(
        "ball_margin",
        RootExpr::difference(
            Term::root(Rational::one(), schedule.alpha_at(n0)),
            sqrt_term(&x.norm_sq()),
        ),
    );
    let mut cert = RadiusCertificate::build(CertificateKind::Claim4W, vec![margin], cap)?;
    for (_, part) in &parts {
        if part.bound < cert.bound {
            cert.bound = part.bound.clone();
        }
    }
    cert.n0 = Some(n0);
    cert.parts = parts;
    Ok(cert)
}

/// For `x ∉ O`: the least `n` with `x ∉ A_{αₙ,βₙ}` and the radius of a ball
/// around `x` disjoint from that set, hence from `O`.
pub fn o_closedness_radius(
    x: &Point,
    schedule: &Schedule,
    cap: u64,
) -> Result<(u64, RadiusCertificate), ClopenError> {
    let n =
        failing_index(x, schedule).ok_or(ClopenError::PreconditionViolated("point lies in O"))?;
    Ok((n, closedness_radius(x, &schedule.pair_at(n), cap)?))
}
