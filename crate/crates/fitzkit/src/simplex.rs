//! Exact simplex kernel (crate-private).
//!
//! A tiny two-phase tableau simplex over an exact [`Scalar`], used to answer
//! the handful of small optimisation questions the geometric layer needs:
//! evaluating a generator envelope (minimise the interpolated value over
//! convex weights), testing membership in a V-polytope, and filtering extreme
//! points.  Problems have at most a few constraint rows (the ambient
//! dimension plus one), so no effort is spent on sparsity or revised-form
//! updates; Bland's rule keeps the exact pivoting finite even on the highly
//! degenerate (e.g. collinear) inputs the test batteries throw at it.
//!
//! This is deliberately not a public LP interface — the public API speaks in
//! terms of hulls, envelopes and memberships.

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome<S> {
    Infeasible,
    Unbounded,
    Optimal { value: S, solution: Vec<S> },
}

/// Minimises `c . x` subject to `A x = b`, `x >= 0`.
///
/// `a` is row-major with `a.len() == b.len()` and every row of length
/// `c.len()`.  All arithmetic stays in `S`; with a rational scalar the result
/// is exact.
pub(crate) fn solve_min<S: Scalar>(c: &[S], a: &[Vec<S>], b: &[S]) -> LpOutcome<S> {
    let n = c.len();
    let m = b.len();
    debug_assert!(a.iter().all(|row| row.len() == n));

    if m == 0 {
        // No constraints: x = 0 is optimal unless some cost is negative.
        if c.iter().any(|cj| *cj < S::zero()) {
            return LpOutcome::Unbounded;
        }
        return LpOutcome::Optimal {
            value: S::zero(),
            solution: vec![S::zero(); n],
        };
    }

    // Phase-1 tableau: original columns, one artificial per row, rhs last.
    // Rows are normalised to b >= 0 so the artificials form a feasible basis.
    let width = n + m + 1;
    let mut rows: Vec<Vec<S>> = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i] < S::zero();
        let mut row = Vec::with_capacity(width);
        for j in 0..n {
            let v = a[i][j].clone();
            row.push(if flip { -v } else { v });
        }
        for k in 0..m {
            row.push(if k == i { S::one() } else { S::zero() });
        }
        let rhs = b[i].clone();
        row.push(if flip { -rhs } else { rhs });
        rows.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase-1 cost row: minimise the sum of artificials. Reduced against the
    // artificial basis this is just the negated column sums of the original
    // part, with -(sum b) in the rhs slot.
    let mut cost = vec![S::zero(); width];
    for j in 0..n {
        let mut s = S::zero();
        for row in &rows {
            s = s + row[j].clone();
        }
        cost[j] = -s;
    }
    let mut obj = S::zero();
    for row in &rows {
        obj = obj + row[width - 1].clone();
    }
    cost[width - 1] = -obj;

    if run_simplex(&mut rows, &mut cost, &mut basis, width) == StepResult::Unbounded {
        unreachable!("phase-1 objective is bounded below by zero");
    }
    let phase1_value = -cost[width - 1].clone();
    if phase1_value > S::zero() {
        return LpOutcome::Infeasible;
    }

    // Drive leftover artificials out of the basis; a row that cannot pivot to
    // an original column is redundant and gets dropped.
    let mut r = 0;
    while r < rows.len() {
        if basis[r] >= n {
            if let Some(j) = (0..n).find(|&j| !rows[r][j].is_zero()) {
                pivot(&mut rows, &mut cost, &mut basis, r, j, width);
            } else {
                rows.remove(r);
                basis.remove(r);
                continue;
            }
        }
        r += 1;
    }

    // Phase 2: real costs, artificial columns frozen out by cost +1 guard is
    // unnecessary since they are non-basic; simply never let them re-enter by
    // restricting the candidate columns to the original n.
    let mut cost2 = vec![S::zero(); width];
    for (j, cj) in c.iter().enumerate() {
        cost2[j] = cj.clone();
    }
    let mut obj2 = S::zero();
    for (i, &bi) in basis.iter().enumerate() {
        debug_assert!(bi < n);
        let cb = c[bi].clone();
        if !cb.is_zero() {
            obj2 = obj2 + cb.clone() * rows[i][width - 1].clone();
            for j in 0..width {
                cost2[j] = cost2[j].clone() - cb.clone() * rows[i][j].clone();
            }
        }
    }
    // Restore the invariant cost2[rhs] == -objective (the loop above already
    // subtracted c_B rows from the zero it started with).
    cost2[width - 1] = -obj2;

    match run_simplex_restricted(&mut rows, &mut cost2, &mut basis, width, n) {
        StepResult::Unbounded => LpOutcome::Unbounded,
        StepResult::Optimal => {
            let mut x = vec![S::zero(); n];
            for (i, &bi) in basis.iter().enumerate() {
                if bi < n {
                    x[bi] = rows[i][width - 1].clone();
                }
            }
            LpOutcome::Optimal {
                value: -cost2[width - 1].clone(),
                solution: x,
            }
        }
    }
}

#[derive(PartialEq)]
enum StepResult {
    Optimal,
    Unbounded,
}

fn run_simplex<S: Scalar>(
    rows: &mut Vec<Vec<S>>,
    cost: &mut [S],
    basis: &mut [usize],
    width: usize,
) -> StepResult {
    run_simplex_restricted(rows, cost, basis, width, width - 1)
}

/// Bland-rule iterations, considering only columns `< candidates` for entry.
fn run_simplex_restricted<S: Scalar>(
    rows: &mut Vec<Vec<S>>,
    cost: &mut [S],
    basis: &mut [usize],
    width: usize,
    candidates: usize,
) -> StepResult {
    loop {
        // Entering column: smallest index with negative reduced cost.
        let Some(enter) = (0..candidates).find(|&j| cost[j] < S::zero()) else {
            return StepResult::Optimal;
        };
        // Leaving row: lexicographic-free Bland tie break on basis index.
        let mut leave: Option<usize> = None;
        for (i, row) in rows.iter().enumerate() {
            if row[enter] > S::zero() {
                let better = match leave {
                    None => true,
                    Some(l) => {
                        let cur = rows[l][width - 1].clone() * row[enter].clone();
                        let new = row[width - 1].clone() * rows[l][enter].clone();
                        // ratio(i) < ratio(l), with ties resolved toward the
                        // smaller basis variable index.
                        new < cur || (new == cur && basis[i] < basis[l])
                    }
                };
                if better {
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else {
            return StepResult::Unbounded;
        };
        pivot(rows, cost, basis, leave, enter, width);
    }
}

fn pivot<S: Scalar>(
    rows: &mut [Vec<S>],
    cost: &mut [S],
    basis: &mut [usize],
    r: usize,
    j: usize,
    width: usize,
) {
    let p = rows[r][j].clone();
    debug_assert!(!p.is_zero());
    for v in rows[r].iter_mut() {
        *v = v.clone() / p.clone();
    }
    for i in 0..rows.len() {
        if i != r && !rows[i][j].is_zero() {
            let f = rows[i][j].clone();
            for k in 0..width {
                let delta = f.clone() * rows[r][k].clone();
                rows[i][k] = rows[i][k].clone() - delta;
            }
        }
    }
    if !cost[j].is_zero() {
        let f = cost[j].clone();
        for k in 0..width {
            let delta = f.clone() * rows[r][k].clone();
            cost[k] = cost[k].clone() - delta;
        }
    }
    basis[r] = j;
}

/// Least interpolated value of `values` over convex weights reproducing
/// `target`, i.e. the generator-envelope evaluation.  `None` when `target`
/// lies outside the convex hull of `points`.
pub(crate) fn envelope_min<S: Scalar>(
    points: &[Vec<S>],
    values: &[S],
    target: &[S],
) -> Option<S> {
    debug_assert_eq!(points.len(), values.len());
    let k = points.len();
    if k == 0 {
        return None;
    }
    let d = target.len();
    // Rows: d coordinate-matching constraints plus the weight-sum constraint.
    let mut a: Vec<Vec<S>> = Vec::with_capacity(d + 1);
    for coord in 0..d {
        a.push(points.iter().map(|p| p[coord].clone()).collect());
    }
    a.push(vec![S::one(); k]);
    let mut b: Vec<S> = target.to_vec();
    b.push(S::one());
    match solve_min(values, &a, &b) {
        LpOutcome::Optimal { value, .. } => Some(value),
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("bounded: weights live in a simplex"),
    }
}

/// Membership of `target` in the convex hull of `points`.
pub(crate) fn in_hull<S: Scalar>(points: &[Vec<S>], target: &[S]) -> bool {
    let zeros = vec![S::zero(); points.len()];
    envelope_min(
        points,
        &zeros,
        target,
    )
    .is_some()
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
    fn simple_transport_like_min() {
        // min x0 + 2 x1  s.t.  x0 + x1 = 1, x >= 0  ->  x = (1, 0), value 1.
        let out = solve_min(&[r(1), r(2)], &[vec![r(1), r(1)]], &[r(1)]);
        assert_eq!(
            out,
            LpOutcome::Optimal {
                value: r(1),
                solution: vec![r(1), r(0)]
            }
        );
    }

    #[test]
    fn infeasible_system_detected() {
        // x0 = 1 and x0 = 2 cannot both hold.
        let out = solve_min(
            &[r(0)],
            &[vec![r(1)], vec![r(1)]],
            &[r(1), r(2)],
        );
        assert_eq!(out, LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_direction_detected() {
        // min -x0 s.t. x0 - x1 = 0: push both to infinity.
        let out = solve_min(&[-r(1), r(0)], &[vec![r(1), -r(1)]], &[r(0)]);
        assert_eq!(out, LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        // Same constraint twice.
        let out = solve_min(
            &[r(1), r(1)],
            &[vec![r(1), r(1)], vec![r(2), r(2)]],
            &[r(1), r(2)],
        );
        match out {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, r(1)),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn envelope_min_interpolates_between_generators() {
        // Points 0 and 1 on the line with values 0 and 1: the envelope at 1/4
        // is 1/4; outside [0,1] there is no representation.
        let pts = vec![vec![r(0)], vec![r(1)]];
        let vals = vec![r(0), r(1)];
        assert_eq!(envelope_min(&pts, &vals, &[rq(1, 4)]), Some(rq(1, 4)));
        assert_eq!(envelope_min(&pts, &vals, &[r(2)]), None);
    }

    #[test]
    fn envelope_min_picks_the_cheaper_vertex_on_ties() {
        // Duplicate coordinates with different values: the min matters.
        let pts = vec![vec![r(1)], vec![r(1)]];
        let vals = vec![r(5), r(3)];
        assert_eq!(envelope_min(&pts, &vals, &[r(1)]), Some(r(3)));
    }

    #[test]
    fn hull_membership_in_the_plane() {
        let square = vec![
            vec![r(0), r(0)],
            vec![r(1), r(0)],
            vec![r(1), r(1)],
            vec![r(0), r(1)],
        ];
        assert!(in_hull(&square, &[rq(1, 2), rq(1, 2)]));
        assert!(in_hull(&square, &[r(1), r(1)]));
        assert!(!in_hull(&square, &[r(1), rq(3, 2)]));
    }

    #[test]
    fn degenerate_collinear_hull_queries_terminate() {
        // Many coincident/collinear points: Bland's rule has to cope.
        let pts: Vec<Vec<Rat>> = (0..20).map(|i| vec![rq(i % 5, 1)]).collect();
        let vals: Vec<Rat> = (0..20).map(|i| rq(i, 3)).collect();
        let v = envelope_min(&pts, &vals, &[r(2)]).unwrap();
        // Coordinate 2 appears as points with values 2/3 and 17/3; the
        // envelope may also mix cheaper neighbours: vertices (0 -> 0/3),
        // (4 -> 4/3) give value at 2 of interpolation 2/3. Min is 2/3.
        assert_eq!(v, rq(2, 3));
    }
}
