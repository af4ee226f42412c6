//! Exact decision procedures for a clopen neighbourhood of zero in Erdős space
//! that contains no set of the form `V + V` with `V` clopen.
//!
//! Erdős space is the set of square-summable rational sequences with the
//! `ℓ₂` norm. This crate works with finite-support points ([`space::Point`]),
//! which are dense, and decides membership in the sets `A_{α,β}` and
//! `O = ⋂ₙ A_{αₙ,βₙ}` exactly: every threshold is an irrational square or
//! fourth root of a rational, compared by integer arithmetic. On top of the
//! membership tests it certifies explicit neighbourhood radii
//! ([`clopen::RadiusCertificate`]) and builds points `z = x + y ∉ O` with `x`
//! far out in a candidate neighbourhood `V` and `y` in a small ball around
//! zero ([`witness`]).
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod clopen;
pub mod exact;
pub mod space;
pub mod trace;
pub mod witness;

pub use clopen::{AlphaBetaPair, RadiusCertificate, Schedule};
pub use exact::{Rational, RootValue};
pub use space::Point;
