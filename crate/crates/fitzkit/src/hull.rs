//! Exact convex hulls in dimensions one to three.
//!
//! The output is always the irredundant vertex set (as a [`VPolytope`]):
//! collinear interior points never survive.  Dimension two uses the monotone
//! chain with exact cross products and returns vertices in counterclockwise
//! order starting at the lexicographic minimum; dimensions one and three
//! reduce to extreme-point filtering, which is exact via the feasibility
//! kernel and insensitive to degeneracies.

use crate::error::{Error, Result};
use crate::region::VPolytope;
use crate::scalar::Scalar;
use crate::simplex;

/// Largest dimension the hull construction supports.
pub const MAX_HULL_DIM: usize = 3;

/// Convex hull vertex set of a finite point cloud, exact over `S`.
pub fn convex_hull<S: Scalar>(points: &[Vec<S>]) -> Result<VPolytope<S>> {
    if points.is_empty() {
        return Err(Error::InvalidInput("convex hull of no points".into()));
    }
    let dim = points[0].len();
    if dim == 0 || dim > MAX_HULL_DIM {
        return Err(Error::UnsupportedDimension {
            operation: "convex hull",
            dim,
            max: MAX_HULL_DIM,
        });
    }
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
    }
    let mut pts: Vec<Vec<S>> = points.to_vec();
    pts.sort_by(|a, b| lex_cmp(a, b));
    pts.dedup();

    let vertices = match dim {
        1 => {
            let lo = pts.first().unwrap().clone();
            let hi = pts.last().unwrap().clone();
            if lo == hi {
                vec![lo]
            } else {
                vec![lo, hi]
            }
        }
        2 => monotone_chain(&pts),
        3 => extreme_points(&pts),
        _ => unreachable!(),
    };
    VPolytope::new(dim, vertices)
}

fn lex_cmp<S: Scalar>(a: &[S], b: &[S]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).expect("NaN-free coordinates") {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

/// Signed area of the triangle `(o, a, b)`; positive for a left turn.
fn cross<S: Scalar>(o: &[S], a: &[S], b: &[S]) -> S {
    (a[0].clone() - o[0].clone()) * (b[1].clone() - o[1].clone())
        - (a[1].clone() - o[1].clone()) * (b[0].clone() - o[0].clone())
}

/// Andrew's monotone chain on lexicographically sorted, deduplicated points.
/// Strict turns only, so collinear midpoints are dropped.
fn monotone_chain<S: Scalar>(pts: &[Vec<S>]) -> Vec<Vec<S>> {
    if pts.len() <= 2 {
        return pts.to_vec();
    }
    let mut lower: Vec<&Vec<S>> = Vec::new();
    for p in pts {
        while lower.len() >= 2
            && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= S::zero()
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<&Vec<S>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= S::zero()
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    let mut out: Vec<Vec<S>> = lower.into_iter().cloned().collect();
    out.extend(upper.into_iter().cloned());
    if out.is_empty() {
        // Fully collinear input: the chain degenerates; keep the endpoints.
        return vec![pts.first().unwrap().clone(), pts.last().unwrap().clone()];
    }
    out
}

/// Keeps exactly the points not representable as convex combinations of the
/// others.  Quadratic in the number of points times one exact feasibility
/// solve each — fine for the 3-D sizes this crate deals with.
fn extreme_points<S: Scalar>(pts: &[Vec<S>]) -> Vec<Vec<S>> {
    if pts.len() <= 2 {
        return pts.to_vec();
    }
    let mut out = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        let others: Vec<Vec<S>> = pts
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, q)| q.clone())
            .collect();
        if !simplex::in_hull(&others, p) {
            out.push(p.clone());
        }
    }
    out
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

    #[test]
    fn collinear_midpoint_is_dropped() {
        let pts = vec![
            vec![r(0), r(0)],
            vec![r(1), r(0)],
            vec![rq(1, 2), r(0)],
        ];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.vertices, vec![vec![r(0), r(0)], vec![r(1), r(0)]]);
    }

    #[test]
    fn interior_point_is_dropped_in_the_square() {
        let pts = vec![
            vec![r(0), r(0)],
            vec![r(1), r(0)],
            vec![r(1), r(1)],
            vec![r(0), r(1)],
            vec![rq(1, 2), rq(1, 2)],
        ];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.vertices.len(), 4);
        assert!(!hull
            .vertices
            .contains(&vec![rq(1, 2), rq(1, 2)]));
        // Counterclockwise from the lexicographic minimum.
        assert_eq!(hull.vertices[0], vec![r(0), r(0)]);
        assert_eq!(hull.vertices[1], vec![r(1), r(0)]);
        assert_eq!(hull.vertices[2], vec![r(1), r(1)]);
        assert_eq!(hull.vertices[3], vec![r(0), r(1)]);
    }

    #[test]
    fn one_dimensional_hull_is_the_extent() {
        let pts = vec![vec![r(3)], vec![-r(1)], vec![r(2)], vec![-r(1)]];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.vertices, vec![vec![-r(1)], vec![r(3)]]);
    }

    #[test]
    fn single_and_duplicate_points() {
        let hull = convex_hull(&[vec![r(2), r(2)], vec![r(2), r(2)]]).unwrap();
        assert_eq!(hull.vertices, vec![vec![r(2), r(2)]]);
    }

    #[test]
    fn tetrahedron_with_interior_point() {
        let pts = vec![
            vec![r(0), r(0), r(0)],
            vec![r(1), r(0), r(0)],
            vec![r(0), r(1), r(0)],
            vec![r(0), r(0), r(1)],
            vec![rq(1, 4), rq(1, 4), rq(1, 4)],
        ];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.vertices.len(), 4);
        assert!(hull.contains(&[rq(1, 4), rq(1, 4), rq(1, 4)]));
    }

    #[test]
    fn face_interior_points_in_three_d_are_dropped() {
        let pts = vec![
            vec![r(0), r(0), r(0)],
            vec![r(2), r(0), r(0)],
            vec![r(0), r(2), r(0)],
            vec![r(0), r(0), r(2)],
            // Centroid of one face:
            vec![rq(2, 3), rq(2, 3), rq(2, 3)],
            // Midpoint of an edge:
            vec![r(1), r(1), r(0)],
        ];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.vertices.len(), 4);
    }

    #[test]
    fn dimension_contract() {
        assert!(convex_hull(&[vec![r(0); 4]]).is_err());
        assert!(convex_hull::<Rat>(&[]).is_err());
    }
}
