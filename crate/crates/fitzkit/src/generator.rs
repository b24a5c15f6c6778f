//! Generator functions: the "V-form" of a piecewise-linear convex function.
//!
//! A generator function is determined by finitely many `(point, value)`
//! pairs.  Its value at `z` is the least convex-combination interpolation of
//! the generator values reproducing `z`, and `+inf` outside the hull of the
//! generator points — i.e. the closed convex envelope of the generator data.
//! Evaluation is an exact minimisation over convex weights; with a rational
//! scalar the result is exact.
//!
//! The dual object is [`MaxAffineFn`](crate::maxaffine::MaxAffineFn): each
//! generator `(p, v)` corresponds to the affine piece with slope `p` and
//! offset `-v` of the conjugate.  The conversions live in the transform
//! module; this module owns the envelope semantics.

use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Finite, PosInf};
use crate::hull;
use crate::region::VPolytope;
use crate::scalar::Scalar;
use crate::simplex;

#[derive(Clone, Debug, PartialEq)]
pub struct Generator<S> {
    pub point: Vec<S>,
    pub value: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorFn<S> {
    dim: usize,
    pub generators: Vec<Generator<S>>,
}

impl<S: Scalar> GeneratorFn<S> {
    pub fn new(dim: usize, generators: Vec<Generator<S>>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidInput(
                "a generator function needs at least one generator".into(),
            ));
        }
        for g in &generators {
            if g.point.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: g.point.len(),
                });
            }
        }
        Ok(Self { dim, generators })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn points(&self) -> Vec<Vec<S>> {
        self.generators.iter().map(|g| g.point.clone()).collect()
    }

    fn values(&self) -> Vec<S> {
        self.generators.iter().map(|g| g.value.clone()).collect()
    }

    /// Envelope evaluation: least interpolated value over convex weights,
    /// `+inf` outside the hull of the generator points.
    pub fn eval(&self, z: &[S]) -> Result<ExtReal<S>> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: z.len(),
            });
        }
        Ok(match simplex::envelope_min(&self.points(), &self.values(), z) {
            Some(v) => Finite(v),
            None => PosInf,
        })
    }

    /// Exact membership of `z` in the effective domain (the hull of the
    /// generator points).
    pub fn domain_contains(&self, z: &[S]) -> bool {
        z.len() == self.dim && simplex::in_hull(&self.points(), z)
    }

    /// Projection of the effective domain onto the coordinates in `keep`:
    /// the hull of the projected generator points, with redundant points
    /// removed exactly.
    pub fn project_domain(&self, keep: &[usize]) -> Result<VPolytope<S>> {
        for &k in keep {
            if k >= self.dim {
                return Err(Error::InvalidInput(format!(
                    "projection index {k} out of range for dimension {}",
                    self.dim
                )));
            }
        }
        let projected: Vec<Vec<S>> = self
            .generators
            .iter()
            .map(|g| keep.iter().map(|&i| g.point[i].clone()).collect())
            .collect();
        hull::convex_hull(&projected)
    }

    /// Drops generators that sit on or above the envelope of the others; the
    /// envelope (hence every evaluation) is unchanged.
    pub fn pruned(&self) -> Self {
        if self.generators.len() <= 1 {
            return self.clone();
        }
        let mut keep: Vec<Generator<S>> = Vec::new();
        for (k, g) in self.generators.iter().enumerate() {
            let other_pts: Vec<Vec<S>> = self
                .generators
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, h)| h.point.clone())
                .collect();
            let other_vals: Vec<S> = self
                .generators
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, h)| h.value.clone())
                .collect();
            let redundant = simplex::envelope_min(&other_pts, &other_vals, &g.point)
                .map_or(false, |env| env <= g.value);
            if !redundant {
                keep.push(g.clone());
            }
        }
        if keep.is_empty() {
            keep.push(self.generators[0].clone());
        }
        Self {
            dim: self.dim,
            generators: keep,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational as Rat;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn rq(n: i64, d: i64) -> Rat {
        Rat::ratio(n, d)
    }

    fn gen(point: Vec<Rat>, value: Rat) -> Generator<Rat> {
        Generator { point, value }
    }

    #[test]
    fn envelope_of_parabola_samples() {
        // Samples of x^2 at -1, 0, 1: the envelope interpolates linearly.
        let f = GeneratorFn::new(
            1,
            vec![
                gen(vec![-r(1)], r(1)),
                gen(vec![r(0)], r(0)),
                gen(vec![r(1)], r(1)),
            ],
        )
        .unwrap();
        assert_eq!(f.eval(&[r(0)]).unwrap(), Finite(r(0)));
        assert_eq!(f.eval(&[rq(1, 2)]).unwrap(), Finite(rq(1, 2)));
        assert_eq!(f.eval(&[r(2)]).unwrap(), PosInf);
    }

    #[test]
    fn value_at_a_generator_never_exceeds_its_label() {
        // A deliberately overpriced midpoint generator gets undercut by the
        // chord through its neighbours.
        let f = GeneratorFn::new(
            1,
            vec![
                gen(vec![r(0)], r(0)),
                gen(vec![r(2)], r(0)),
                gen(vec![r(1)], r(5)),
            ],
        )
        .unwrap();
        assert_eq!(f.eval(&[r(1)]).unwrap(), Finite(r(0)));
    }

    #[test]
    fn two_point_indicator_segment() {
        // Generators ((0,0),0) and ((1,1),1): the envelope lives on the
        // segment and interpolates the pairing values.
        let f = GeneratorFn::new(
            2,
            vec![
                gen(vec![r(0), r(0)], r(0)),
                gen(vec![r(1), r(1)], r(1)),
            ],
        )
        .unwrap();
        assert_eq!(
            f.eval(&[rq(1, 2), rq(1, 2)]).unwrap(),
            Finite(rq(1, 2))
        );
        assert_eq!(f.eval(&[rq(1, 2), rq(1, 4)]).unwrap(), PosInf);
    }

    #[test]
    fn projection_is_hull_of_projected_generators() {
        let f = GeneratorFn::new(
            2,
            vec![
                gen(vec![r(0), r(0)], r(0)),
                gen(vec![r(1), r(3)], r(1)),
                gen(vec![rq(1, 2), -r(1)], r(2)),
            ],
        )
        .unwrap();
        let p = f.project_domain(&[0]).unwrap();
        assert_eq!(p.vertices, vec![vec![r(0)], vec![r(1)]]);
        let q = f.project_domain(&[1]).unwrap();
        assert_eq!(q.vertices, vec![vec![-r(1)], vec![r(3)]]);
    }

    #[test]
    fn pruning_removes_dominated_generators() {
        let f = GeneratorFn::new(
            1,
            vec![
                gen(vec![r(0)], r(0)),
                gen(vec![r(2)], r(0)),
                gen(vec![r(1)], r(5)),  // strictly above the chord
                gen(vec![r(1)], -r(1)), // strictly below: survives
            ],
        )
        .unwrap();
        let g = f.pruned();
        assert_eq!(g.generators.len(), 3);
        assert!(g.generators.iter().all(|h| h.value != r(5)));
        for probe in [r(0), rq(1, 2), r(1), rq(3, 2), r(2)] {
            assert_eq!(f.eval(&[probe.clone()]).unwrap(), g.eval(&[probe]).unwrap());
        }
    }
}
