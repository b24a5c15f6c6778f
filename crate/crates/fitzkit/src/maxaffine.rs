//! Max-affine functions: finite maxima of affine pieces, optionally
//! restricted to a convex domain.
//!
//! This is the "A-form" of a piecewise-linear convex function.  Evaluation is
//! exact over an exact scalar; the optional domain turns the function into
//! `max_k (<s_k, z> + o_k) + indicator(domain)`.

use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Finite, PosInf};
use crate::hull;
use crate::region::{Region, VPolytope};
use crate::scalar::{dot, norm_sq, Scalar};
use crate::simplex;

#[derive(Clone, Debug, PartialEq)]
pub struct AffinePiece<S> {
    pub slope: Vec<S>,
    pub offset: S,
}

impl<S: Scalar> AffinePiece<S> {
    pub fn eval(&self, z: &[S]) -> S {
        dot(&self.slope, z) + self.offset.clone()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaxAffineFn<S> {
    dim: usize,
    pub pieces: Vec<AffinePiece<S>>,
    pub domain: Option<Region<S>>,
}

impl<S: Scalar> MaxAffineFn<S> {
    pub fn new(dim: usize, pieces: Vec<AffinePiece<S>>, domain: Option<Region<S>>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidInput(
                "a max-affine function needs at least one piece".into(),
            ));
        }
        for p in &pieces {
            if p.slope.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.slope.len(),
                });
            }
        }
        if let Some(region) = &domain {
            if region.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: region.dim(),
                });
            }
        }
        Ok(Self { dim, pieces, domain })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, z: &[S]) -> Result<ExtReal<S>> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: z.len(),
            });
        }
        if let Some(region) = &self.domain {
            if region.indicator_eval(z)? == PosInf {
                return Ok(PosInf);
            }
        }
        let mut best = self.pieces[0].eval(z);
        for p in &self.pieces[1..] {
            let v = p.eval(z);
            if v > best {
                best = v;
            }
        }
        Ok(Finite(best))
    }

    /// Largest squared Euclidean norm of the slopes restricted to
    /// `coords` — e.g. the primal block of a Fitzpatrick function, whose
    /// slopes there are exactly the dual points of the generating operator.
    pub fn max_slope_norm_sq(&self, coords: &[usize]) -> S {
        let mut best = S::zero();
        for p in &self.pieces {
            let restricted: Vec<S> = coords.iter().map(|&i| p.slope[i].clone()).collect();
            let n2 = norm_sq(&restricted);
            if n2 > best {
                best = n2;
            }
        }
        best
    }

    /// Removes pieces that never strictly attain the maximum.
    ///
    /// A piece is redundant exactly when its dual generator (slope, -offset)
    /// lies on or above the lower envelope of the other pieces' generators;
    /// dropping it leaves every value unchanged.
    pub fn pruned(&self) -> Self {
        if self.pieces.len() <= 1 {
            return self.clone();
        }
        let mut keep: Vec<AffinePiece<S>> = Vec::new();
        for (k, piece) in self.pieces.iter().enumerate() {
            let others: Vec<Vec<S>> = self
                .pieces
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, p)| p.slope.clone())
                .collect();
            let values: Vec<S> = self
                .pieces
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, p)| -p.offset.clone())
                .collect();
            let redundant = simplex::envelope_min(&others, &values, &piece.slope)
                .map_or(false, |env| env <= -piece.offset.clone());
            if !redundant {
                keep.push(piece.clone());
            }
        }
        if keep.is_empty() {
            // All pieces coincide on the envelope; keep one representative.
            keep.push(self.pieces[0].clone());
        }
        Self {
            dim: self.dim,
            pieces: keep,
            domain: self.domain.clone(),
        }
    }

    /// Projection of the effective domain onto the coordinates in `keep`.
    ///
    /// `None` means the full space (no restriction): pieces are finite
    /// everywhere.  Polyhedral domains project exactly (Fourier-Motzkin or
    /// vertex projection); norm-ball domains are not polyhedral and are
    /// rejected.
    pub fn project_domain(&self, keep: &[usize]) -> Result<Option<Region<S>>> {
        match &self.domain {
            None => Ok(None),
            Some(Region::HPolyhedron(p)) => {
                Ok(Some(Region::HPolyhedron(p.project(keep)?)))
            }
            Some(Region::VPolytope(p)) => {
                let projected: Vec<Vec<S>> = p
                    .vertices
                    .iter()
                    .map(|v| keep.iter().map(|&i| v[i].clone()).collect())
                    .collect();
                Ok(Some(Region::VPolytope(hull::convex_hull(&projected)?)))
            }
            Some(Region::NormBall(_)) => Err(Error::UnsupportedRepresentation(
                "projecting a norm-ball domain (not polyhedral)".into(),
            )),
        }
    }

    /// Vertex description of the slope cloud — the generators of the
    /// conjugate function.
    pub fn slope_polytope(&self) -> Result<VPolytope<S>> {
        let slopes: Vec<Vec<S>> = self.pieces.iter().map(|p| p.slope.clone()).collect();
        if self.dim <= hull::MAX_HULL_DIM {
            hull::convex_hull(&slopes)
        } else {
            VPolytope::new(self.dim, slopes)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::{HalfSpace, HPolyhedron};
    use num_rational::BigRational as Rat;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn rq(n: i64, d: i64) -> Rat {
        Rat::ratio(n, d)
    }

    fn abs_fn() -> MaxAffineFn<Rat> {
        MaxAffineFn::new(
            1,
            vec![
                AffinePiece { slope: vec![r(1)], offset: r(0) },
                AffinePiece { slope: vec![-r(1)], offset: r(0) },
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn absolute_value_from_two_pieces() {
        let f = abs_fn();
        assert_eq!(f.eval(&[r(3)]).unwrap(), Finite(r(3)));
        assert_eq!(f.eval(&[-rq(5, 2)]).unwrap(), Finite(rq(5, 2)));
        assert_eq!(f.eval(&[r(0)]).unwrap(), Finite(r(0)));
    }

    #[test]
    fn domain_restriction_returns_infinity_outside() {
        let dom = Region::HPolyhedron(
            HPolyhedron::new(
                1,
                vec![
                    HalfSpace { a: vec![r(1)], b: r(1) },
                    HalfSpace { a: vec![-r(1)], b: r(1) },
                ],
            )
            .unwrap(),
        );
        let f = MaxAffineFn::new(
            1,
            vec![AffinePiece { slope: vec![r(0)], offset: r(0) }],
            Some(dom),
        )
        .unwrap();
        assert_eq!(f.eval(&[r(1)]).unwrap(), Finite(r(0)));
        assert_eq!(f.eval(&[r(2)]).unwrap(), PosInf);
    }

    #[test]
    fn redundant_piece_is_pruned() {
        // max(x, -x, x/2 - 1): the third piece sits strictly below the max.
        let f = MaxAffineFn::new(
            1,
            vec![
                AffinePiece { slope: vec![r(1)], offset: r(0) },
                AffinePiece { slope: vec![-r(1)], offset: r(0) },
                AffinePiece { slope: vec![rq(1, 2)], offset: -r(1) },
            ],
            None,
        )
        .unwrap();
        let g = f.pruned();
        assert_eq!(g.pieces.len(), 2);
        for probe in [-r(2), r(0), rq(7, 3)] {
            assert_eq!(f.eval(&[probe.clone()]).unwrap(), g.eval(&[probe]).unwrap());
        }
    }

    #[test]
    fn touching_piece_is_still_redundant() {
        // max(x, -x, 0): the flat piece touches at 0 but never exceeds.
        let f = MaxAffineFn::new(
            1,
            vec![
                AffinePiece { slope: vec![r(1)], offset: r(0) },
                AffinePiece { slope: vec![-r(1)], offset: r(0) },
                AffinePiece { slope: vec![r(0)], offset: r(0) },
            ],
            None,
        )
        .unwrap();
        assert_eq!(f.pruned().pieces.len(), 2);
    }

    #[test]
    fn slope_norm_over_a_block() {
        let f = MaxAffineFn::new(
            4,
            vec![
                AffinePiece { slope: vec![r(1), r(2), r(0), r(0)], offset: r(0) },
                AffinePiece { slope: vec![r(0), r(1), r(5), r(5)], offset: r(0) },
            ],
            None,
        )
        .unwrap();
        // Over the first block the largest norm^2 is 1^2 + 2^2 = 5.
        assert_eq!(f.max_slope_norm_sq(&[0, 1]), r(5));
    }

    #[test]
    fn convex_along_segments() {
        let f = abs_fn();
        // midpoint inequality at a kink-straddling pair
        let a = [-r(2)];
        let b = [r(1)];
        let mid = [-rq(1, 2)];
        let fa = f.eval(&a).unwrap().finite().unwrap().clone();
        let fb = f.eval(&b).unwrap().finite().unwrap().clone();
        let fm = f.eval(&mid).unwrap().finite().unwrap().clone();
        assert!(fm <= (fa + fb) / r(2));
    }
}
