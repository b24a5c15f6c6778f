//! The default operator catalog: named monotone operators with known
//! closed-form representing functions, plus seeded randomized families.
//!
//! The named entries are the workhorses of the test suite — the identity and
//! rotation maps, three subdifferential curves and the zero map — chosen so
//! that domains, ranges and representing functions all have hand-checkable
//! closed forms.  The randomized families (linear maps with positive definite
//! symmetric part, finite monotone point sets) are generated from a seeded
//! [`ChaCha8Rng`] with dyadic rational data, so every derived quantity stays
//! exactly representable in both rationals and `f64` grids and every run is
//! reproducible from the seed alone.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::operators::{CurvePiece, FiniteOperator, LinearOperator, Operator, PwlCurve1d};
use crate::point::PrimalDualPoint;
use crate::scalar::Scalar;

/// Seed used by `default_catalog` consumers when none is given.
pub const DEFAULT_SEED: u64 = 17;

/// A named operator, as carried through batteries and reports.
#[derive(Clone, Debug)]
pub struct CatalogEntry<S> {
    pub name: String,
    pub operator: Operator<S>,
}

// ---------------------------------------------------------------------------
// Named operators
// ---------------------------------------------------------------------------

/// The identity map on the line as a complete curve: `y* = y`.
pub fn identity_curve<S: Scalar>() -> PwlCurve1d<S> {
    PwlCurve1d::new(vec![CurvePiece::Sloped {
        lo: None,
        hi: None,
        a: S::one(),
        b: S::zero(),
    }])
    .expect("full sloped line is a valid curve")
}

/// The subdifferential of `|x|`: constant `-1` left of zero, the vertical
/// segment `[-1, 1]` at zero, constant `+1` to the right.
pub fn abs_subdifferential<S: Scalar>() -> PwlCurve1d<S> {
    PwlCurve1d::new(vec![
        CurvePiece::Sloped {
            lo: None,
            hi: Some(S::zero()),
            a: S::zero(),
            b: -S::one(),
        },
        CurvePiece::Vertical {
            v: S::zero(),
            lo: Some(-S::one()),
            hi: Some(S::one()),
        },
        CurvePiece::Sloped {
            lo: Some(S::zero()),
            hi: None,
            a: S::zero(),
            b: S::one(),
        },
    ])
    .expect("sign curve is a valid curve")
}

/// The subdifferential of the indicator of `[-1, 1]`: downward ray at `-1`,
/// zero on the interior, upward ray at `+1`.  Bounded domain, full range.
pub fn interval_indicator_subdifferential<S: Scalar>() -> PwlCurve1d<S> {
    PwlCurve1d::new(vec![
        CurvePiece::Vertical {
            v: -S::one(),
            lo: None,
            hi: Some(S::zero()),
        },
        CurvePiece::Sloped {
            lo: Some(-S::one()),
            hi: Some(S::one()),
            a: S::zero(),
            b: S::zero(),
        },
        CurvePiece::Vertical {
            v: S::one(),
            lo: Some(S::zero()),
            hi: None,
        },
    ])
    .expect("normal-cone curve of an interval is a valid curve")
}

/// The subdifferential of the indicator of `{0}`: the vertical line `{0} x R`.
pub fn point_indicator_subdifferential<S: Scalar>() -> PwlCurve1d<S> {
    PwlCurve1d::new(vec![CurvePiece::Vertical {
        v: S::zero(),
        lo: None,
        hi: None,
    }])
    .expect("vertical line is a valid curve")
}

/// The zero map as a curve: `y* = 0` everywhere.  Full domain, range `{0}`.
pub fn zero_curve<S: Scalar>() -> PwlCurve1d<S> {
    PwlCurve1d::new(vec![CurvePiece::Sloped {
        lo: None,
        hi: None,
        a: S::zero(),
        b: S::zero(),
    }])
    .expect("horizontal line is a valid curve")
}

/// The identity matrix on the line.
pub fn identity_linear<S: Scalar>() -> LinearOperator<S> {
    LinearOperator::new(vec![vec![S::one()]]).expect("1x1 identity")
}

/// The quarter-turn rotation on the plane, `(x1, x2) -> (x2, -x1)`: monotone
/// (skew, so the symmetric part vanishes) and nonsingular, with a graph that
/// maps dyadic lattices onto themselves.
pub fn rotation_linear<S: Scalar>() -> LinearOperator<S> {
    LinearOperator::new(vec![
        vec![S::zero(), S::one()],
        vec![-S::one(), S::zero()],
    ])
    .expect("2x2 rotation")
}

/// The seven named entries, in a fixed order.
pub fn named_operators<S: Scalar>() -> Vec<CatalogEntry<S>> {
    let entry = |name: &str, op: Operator<S>| CatalogEntry {
        name: name.to_string(),
        operator: op,
    };
    vec![
        entry("identity-curve", Operator::Curve(identity_curve())),
        entry(
            "absolute-value-subdifferential",
            Operator::Curve(abs_subdifferential()),
        ),
        entry(
            "interval-indicator-subdifferential",
            Operator::Curve(interval_indicator_subdifferential()),
        ),
        entry(
            "point-indicator-subdifferential",
            Operator::Curve(point_indicator_subdifferential()),
        ),
        entry("zero-curve", Operator::Curve(zero_curve())),
        entry("identity-linear", Operator::Linear(identity_linear())),
        entry("rotation-linear", Operator::Linear(rotation_linear())),
    ]
}

// ---------------------------------------------------------------------------
// Randomized families
// ---------------------------------------------------------------------------

/// A dyadic rational with numerator in `[-max_num, max_num]` and denominator
/// a power of two up to `2^max_den_pow`.  Dyadic data keeps every downstream
/// grid value and rational comparison exact.
fn dyadic<S: Scalar>(rng: &mut ChaCha8Rng, max_num: i64, max_den_pow: u32) -> S {
    let num = rng.gen_range(-max_num..=max_num);
    let den = 1i64 << rng.gen_range(0..=max_den_pow);
    S::ratio(num, den)
}

/// A random monotone matrix: positive definite symmetric part plus a random
/// antisymmetric part.  Strict diagonal dominance of the symmetric part makes
/// it positive definite, which also forces the whole matrix nonsingular
/// (`x^T M x = x^T A x > 0` for `x != 0`), so ranges are full and the
/// invariance checks have on-lattice witnesses.
fn random_linear<S: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> LinearOperator<S> {
    // Symmetric part: diagonal >= 1, off-diagonal magnitude <= 1/2.
    let mut rows = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        rows[i][i] = S::one() + S::ratio(rng.gen_range(0..=8), 8);
    }
    if n == 2 {
        let off: S = dyadic(rng, 4, 3);
        let off = off * S::ratio(1, 8); // |off| <= 1/2
        rows[0][1] = off.clone();
        rows[1][0] = off;
        // Antisymmetric part, magnitude <= 1 so row sums stay below 4 and
        // window-based checks can cover the image with a small scan factor.
        let skew: S = dyadic(rng, 8, 3);
        let skew = skew * S::ratio(1, 8);
        rows[0][1] = rows[0][1].clone() + skew.clone();
        rows[1][0] = rows[1][0].clone() - skew;
    }
    LinearOperator::new(rows).expect("catalog dimensions are supported")
}

/// `count` random monotone nonsingular linear maps on 1 or 2 dimensions.
pub fn random_linear_operators<S: Scalar>(seed: u64, count: usize) -> Vec<CatalogEntry<S>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x11ea); // family-local stream
    (0..count)
        .map(|i| {
            let n = if rng.gen_bool(0.5) { 1 } else { 2 };
            CatalogEntry {
                name: format!("random-linear-{i:02}"),
                operator: Operator::Linear(random_linear(&mut rng, n)),
            }
        })
        .collect()
}

/// A random finite monotone set: samples of a random monotone affine map
/// `x -> Mx + b`.  Any subset of a monotone graph is monotone.
fn random_finite<S: Scalar>(rng: &mut ChaCha8Rng) -> Result<FiniteOperator<S>> {
    let n = if rng.gen_bool(0.5) { 1 } else { 2 };
    let m = random_linear::<S>(rng, n);
    let b: Vec<S> = (0..n).map(|_| dyadic(rng, 8, 2)).collect();
    let k = rng.gen_range(2..=6);
    let mut pairs = Vec::with_capacity(k);
    for _ in 0..k {
        let x: Vec<S> = (0..n).map(|_| dyadic(rng, 16, 2)).collect();
        let xstar: Vec<S> = m
            .apply(&x)
            .into_iter()
            .zip(&b)
            .map(|(v, c)| v + c.clone())
            .collect();
        pairs.push(PrimalDualPoint::new(x, xstar)?);
    }
    FiniteOperator::new(pairs)
}

/// `count` random finite monotone sets.
pub fn random_finite_operators<S: Scalar>(seed: u64, count: usize) -> Vec<CatalogEntry<S>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf111);
    (0..count)
        .map(|i| CatalogEntry {
            name: format!("random-finite-{i:02}"),
            operator: Operator::Finite(
                random_finite(&mut rng).expect("generated points are well-formed"),
            ),
        })
        .collect()
}

/// Random finite monotone sets with range inside the box `[-bound, bound]^n`:
/// the dual parts are rescaled by the largest power of two that fits, which
/// preserves monotonicity and keeps the data dyadic.  The rescaled range still
/// touches `(bound/2, bound]` unless it was identically zero.
pub fn random_bounded_range_finite_operators<S: Scalar>(
    seed: u64,
    count: usize,
    bound: i64,
) -> Vec<CatalogEntry<S>> {
    let b = S::from_int(bound);
    random_finite_operators::<S>(seed ^ 0xb0, count)
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            let Operator::Finite(mut t) = e.operator else {
                unreachable!("family is finite by construction")
            };
            let mut reach = S::zero();
            for p in &t.pairs {
                for v in &p.xstar {
                    let a = v.abs();
                    if a > reach {
                        reach = a;
                    }
                }
            }
            let mut scale = S::one();
            while scale.clone() * reach.clone() > b {
                scale = scale * S::ratio(1, 2);
            }
            for p in &mut t.pairs {
                for v in &mut p.xstar {
                    *v = v.clone() * scale.clone();
                }
            }
            CatalogEntry {
                name: format!("random-bounded-finite-{i:02}"),
                operator: Operator::Finite(t),
            }
        })
        .collect()
}

/// The full default catalog: 7 named + 20 random linear + 50 random finite.
pub fn default_catalog<S: Scalar>(seed: u64) -> Vec<CatalogEntry<S>> {
    let mut all = named_operators();
    all.extend(random_linear_operators(seed, 20));
    all.extend(random_finite_operators(seed, 50));
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Exact;
    use num_traits::{Signed, Zero};

    #[test]
    fn named_entries_are_maximal_and_count_seven() {
        let named = named_operators::<Exact>();
        assert_eq!(named.len(), 7);
        for e in &named {
            assert!(e.operator.is_maximal(), "{} should be maximal", e.name);
        }
    }

    #[test]
    fn default_catalog_has_77_entries_and_is_reproducible() {
        let a = default_catalog::<Exact>(DEFAULT_SEED);
        let b = default_catalog::<Exact>(DEFAULT_SEED);
        assert_eq!(a.len(), 77);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.name, y.name);
            match (&x.operator, &y.operator) {
                (Operator::Finite(p), Operator::Finite(q)) => assert_eq!(p.pairs, q.pairs),
                (Operator::Curve(p), Operator::Curve(q)) => assert_eq!(p.pieces, q.pieces),
                (Operator::Linear(p), Operator::Linear(q)) => assert_eq!(p.rows, q.rows),
                _ => panic!("kind mismatch across identical seeds"),
            }
        }
    }

    #[test]
    fn random_finite_entries_are_monotone() {
        for e in random_finite_operators::<Exact>(DEFAULT_SEED, 50) {
            let Operator::Finite(t) = &e.operator else {
                panic!("finite family produced a non-finite entry")
            };
            assert!(t.is_monotone().monotone, "{} not monotone", e.name);
        }
    }

    #[test]
    fn random_linear_entries_are_monotone_and_nonsingular() {
        use crate::operators::linear_is_monotone;
        for e in random_linear_operators::<Exact>(DEFAULT_SEED, 20) {
            let Operator::Linear(m) = &e.operator else {
                panic!("linear family produced a non-linear entry")
            };
            assert!(linear_is_monotone(m), "{} not monotone", e.name);
            let det = match m.space_dim() {
                1 => m.rows[0][0].clone(),
                2 => {
                    m.rows[0][0].clone() * m.rows[1][1].clone()
                        - m.rows[0][1].clone() * m.rows[1][0].clone()
                }
                _ => unreachable!(),
            };
            assert!(!det.is_zero(), "{} singular", e.name);
        }
    }

    #[test]
    fn bounded_range_family_respects_the_bound() {
        let bound = Exact::from_int(2);
        for e in random_bounded_range_finite_operators::<Exact>(DEFAULT_SEED, 50, 2) {
            let Operator::Finite(t) = &e.operator else {
                panic!("bounded family produced a non-finite entry")
            };
            assert!(t.is_monotone().monotone, "{} not monotone", e.name);
            for p in &t.pairs {
                for v in &p.xstar {
                    assert!(v.abs() <= bound, "{} exceeds the range bound", e.name);
                }
            }
        }
    }
}
