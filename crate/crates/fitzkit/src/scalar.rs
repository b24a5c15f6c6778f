//! Scalar abstraction shared by the floating-point and exact-rational code paths.
//!
//! Everything in the geometric core (affine pieces, generator envelopes,
//! polyhedra, discrete transforms) is written against [`Scalar`], an ordered
//! field with explicit conversions from `f64`.  Two instantiations matter in
//! practice and get aliases at the crate root: `f64` for grid numerics and
//! [`BigRational`] for the exact layer, where every comparison is decidable.
//!
//! `from_f64_exact` is the bridge between the two: every finite `f64` is a
//! dyadic rational, so grid coordinates can be lifted into the exact layer
//! without rounding.  The reverse direction (`to_f64`) is only used for
//! reporting and is allowed to round.

use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};
use std::fmt::{Debug, Display};

/// An ordered field with exact embeddings of machine floats and integers.
///
/// The `Num + Signed` bounds supply ring arithmetic, division, negation and
/// absolute value; `PartialOrd` supplies the order.  Implementations must be
/// total on the values the toolkit produces (no NaNs are ever constructed).
pub trait Scalar: Num + Signed + Clone + PartialOrd + Debug + Display + 'static {
    /// Embeds a finite `f64` exactly, or returns `None` for NaN/infinities.
    fn from_f64_exact(v: f64) -> Option<Self>;

    /// Nearest-`f64` image of the value, used for reports and CSV output.
    fn to_f64(&self) -> f64;

    /// Embeds a machine integer.
    fn from_int(v: i64) -> Self;

    /// The fraction `num/den`.  Exact for rational scalars; for floats this is
    /// the nearest representable quotient.
    fn ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }
}

impl Scalar for f64 {
    fn from_f64_exact(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_int(v: i64) -> Self {
        v as f64
    }
}

impl Scalar for f32 {
    fn from_f64_exact(v: f64) -> Option<Self> {
        // Not exact in general; only total on values that fit. The f32
        // instantiation exists for completeness and carries no exactness
        // guarantees, which is why nothing in the toolkit aliases it.
        v.is_finite().then_some(v as f32)
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn from_int(v: i64) -> Self {
        v as f32
    }
}

impl Scalar for BigRational {
    fn from_f64_exact(v: f64) -> Option<Self> {
        BigRational::from_f64(v)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_int(v: i64) -> Self {
        BigRational::from_i64(v).expect("i64 always embeds")
    }
}

/// Dot product of two equal-length coordinate slices.
///
/// Panics on length mismatch: every caller has already validated dimensions
/// at the API boundary.
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    assert_eq!(a.len(), b.len(), "dot product dimension mismatch");
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        acc = acc + x.clone() * y.clone();
    }
    acc
}

/// Squared Euclidean norm of a coordinate slice.
pub fn norm_sq<S: Scalar>(a: &[S]) -> S {
    dot(a, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn f64_roundtrip_is_identity() {
        assert_eq!(f64::from_f64_exact(0.125), Some(0.125));
        assert_eq!(f64::from_f64_exact(f64::NAN), None);
        assert_eq!(f64::from_f64_exact(f64::INFINITY), None);
    }

    #[test]
    fn rational_embedding_of_dyadic_floats_is_exact() {
        let r = BigRational::from_f64_exact(0.375).unwrap();
        assert_eq!(r, BigRational::new(BigInt::from(3), BigInt::from(8)));
        // 0.1 is not 1/10 as a double; the embedding must reflect the actual
        // binary value, not the decimal literal.
        let tenth = BigRational::from_f64_exact(0.1).unwrap();
        assert_ne!(tenth, BigRational::new(BigInt::from(1), BigInt::from(10)));
    }

    #[test]
    fn ratio_is_exact_for_rationals() {
        let r = BigRational::ratio(3, 5);
        assert_eq!(r, BigRational::new(BigInt::from(3), BigInt::from(5)));
    }

    #[test]
    fn dot_product_small_cases() {
        assert_eq!(dot(&[1.0, 2.0], &[3.0, -1.0]), 1.0);
        let a = [BigRational::from_int(2), BigRational::ratio(1, 2)];
        let b = [BigRational::ratio(1, 4), BigRational::from_int(4)];
        assert_eq!(dot(&a, &b), BigRational::ratio(5, 2));
    }
}
