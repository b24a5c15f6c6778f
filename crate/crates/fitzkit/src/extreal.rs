//! Extended real values `[-inf, +inf]` over any [`Scalar`].
//!
//! `+inf` is a first-class sentinel — "the function is not defined here" —
//! and never a large finite stand-in.  `-inf` can appear transiently inside
//! partial suprema (an all-infinite fiber of a staged transform) but never in
//! a function declared proper.
//!
//! Arithmetic follows the upper-addition convention used for sums of convex
//! functions: `+inf` absorbs everything, including `-inf`.  Code that needs
//! the opposite convention (inside suprema) pattern-matches explicitly
//! instead of relying on `+`.

use crate::scalar::Scalar;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtReal<S> {
    NegInf,
    Finite(S),
    PosInf,
}

pub use ExtReal::{Finite, NegInf, PosInf};

impl<S: Scalar> ExtReal<S> {
    pub fn is_finite(&self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn is_pos_inf(&self) -> bool {
        matches!(self, PosInf)
    }

    pub fn is_neg_inf(&self) -> bool {
        matches!(self, NegInf)
    }

    /// The finite payload, if any.
    pub fn finite(&self) -> Option<&S> {
        match self {
            Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Unwraps a value the caller has already proven finite.
    pub fn expect_finite(&self, what: &str) -> &S {
        self.finite()
            .unwrap_or_else(|| panic!("expected finite value for {what}, got {self:?}"))
    }

    pub fn map<T: Scalar>(self, f: impl FnOnce(S) -> T) -> ExtReal<T> {
        match self {
            NegInf => NegInf,
            Finite(v) => Finite(f(v)),
            PosInf => PosInf,
        }
    }

    /// Total order on extended reals (scalars produced by the toolkit are
    /// never NaN, so the inner comparison is total in practice).
    pub fn cmp_ext(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a
                .partial_cmp(b)
                .expect("extended-real comparison on NaN-free scalars"),
        }
    }

    pub fn max_ext(self, other: Self) -> Self {
        if self.cmp_ext(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    pub fn min_ext(self, other: Self) -> Self {
        if self.cmp_ext(&other) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    /// Approximate image in `f64`, with the sentinels mapped to IEEE infinities.
    pub fn to_f64(&self) -> f64 {
        match self {
            NegInf => f64::NEG_INFINITY,
            Finite(v) => v.to_f64(),
            PosInf => f64::INFINITY,
        }
    }

    /// Lifts an IEEE value, reading its infinities as sentinels.
    pub fn from_f64(v: f64) -> Option<ExtReal<S>> {
        if v == f64::INFINITY {
            Some(PosInf)
        } else if v == f64::NEG_INFINITY {
            Some(NegInf)
        } else {
            S::from_f64_exact(v).map(Finite)
        }
    }
}

/// Upper addition: `+inf` dominates, so `(+inf) + (-inf) = +inf`.
impl<S: Scalar> Add for ExtReal<S> {
    type Output = ExtReal<S>;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
            (Finite(a), Finite(b)) => Finite(a + b),
        }
    }
}

impl<S: Scalar> Neg for ExtReal<S> {
    type Output = ExtReal<S>;

    fn neg(self) -> Self {
        match self {
            NegInf => PosInf,
            PosInf => NegInf,
            Finite(v) => Finite(-v),
        }
    }
}

impl<S: Scalar> fmt::Display for ExtReal<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegInf => write!(f, "-inf"),
            Finite(v) => write!(f, "{v}"),
            PosInf => write!(f, "+inf"),
        }
    }
}
