//! Convex regions in up to four dimensions: half-space intersections,
//! vertex-described polytopes and Euclidean norm balls.
//!
//! All predicates are exact over an exact scalar.  Norm-ball membership
//! compares squared distances so no square root is ever taken; V-polytope
//! membership reduces to a small exact feasibility problem.  H-polyhedra can
//! be projected onto coordinate blocks by Fourier-Motzkin elimination, which
//! is entirely adequate at these dimensions (the product space has at most
//! four coordinates).

use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Finite, PosInf};
use crate::scalar::{dot, Scalar};
use crate::simplex::{self, LpOutcome};

/// One closed half-space `a . z <= b`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpace<S> {
    pub a: Vec<S>,
    pub b: S,
}

/// Intersection of finitely many half-spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct HPolyhedron<S> {
    pub dim: usize,
    pub halfspaces: Vec<HalfSpace<S>>,
}

/// Convex hull of a finite vertex list.
#[derive(Clone, Debug, PartialEq)]
pub struct VPolytope<S> {
    pub dim: usize,
    pub vertices: Vec<Vec<S>>,
}

/// Closed Euclidean ball `|z - center| <= radius`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormBall<S> {
    pub center: Vec<S>,
    pub radius: S,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Region<S> {
    HPolyhedron(HPolyhedron<S>),
    VPolytope(VPolytope<S>),
    NormBall(NormBall<S>),
}

impl<S: Scalar> HPolyhedron<S> {
    pub fn new(dim: usize, halfspaces: Vec<HalfSpace<S>>) -> Result<Self> {
        for hs in &halfspaces {
            if hs.a.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: hs.a.len(),
                });
            }
        }
        Ok(Self { dim, halfspaces })
    }

    pub fn contains(&self, z: &[S]) -> bool {
        self.halfspaces
            .iter()
            .all(|hs| dot(&hs.a, z) <= hs.b)
    }

    /// Feasibility via the exact kernel (free variables split into positive
    /// parts, one slack per row).
    pub fn is_empty(&self) -> bool {
        let d = self.dim;
        let m = self.halfspaces.len();
        if m == 0 {
            return false;
        }
        let nvars = 2 * d + m;
        let mut a = Vec::with_capacity(m);
        let mut b = Vec::with_capacity(m);
        for (i, hs) in self.halfspaces.iter().enumerate() {
            let mut row = vec![S::zero(); nvars];
            for j in 0..d {
                row[j] = hs.a[j].clone();
                row[d + j] = -hs.a[j].clone();
            }
            row[2 * d + i] = S::one();
            a.push(row);
            b.push(hs.b.clone());
        }
        matches!(
            simplex::solve_min(&vec![S::zero(); nvars], &a, &b),
            LpOutcome::Infeasible
        )
    }

    /// Supremum of `c . z` over the polyhedron.
    ///
    /// Returns `PosInf` when unbounded in that direction and an error when
    /// the polyhedron is empty (the supremum over nothing is not a useful
    /// answer for any caller here).
    pub fn extremum(&self, c: &[S]) -> Result<ExtReal<S>> {
        if c.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: c.len(),
            });
        }
        let d = self.dim;
        let m = self.halfspaces.len();
        if m == 0 {
            // Whole space: bounded only for c = 0.
            return Ok(if c.iter().all(|v| v.is_zero()) {
                Finite(S::zero())
            } else {
                PosInf
            });
        }
        let nvars = 2 * d + m;
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        for (i, hs) in self.halfspaces.iter().enumerate() {
            let mut row = vec![S::zero(); nvars];
            for j in 0..d {
                row[j] = hs.a[j].clone();
                row[d + j] = -hs.a[j].clone();
            }
            row[2 * d + i] = S::one();
            rows.push(row);
            rhs.push(hs.b.clone());
        }
        // max c.z == -min(-c.z)
        let mut cost = vec![S::zero(); nvars];
        for j in 0..d {
            cost[j] = -c[j].clone();
            cost[d + j] = c[j].clone();
        }
        match simplex::solve_min(&cost, &rows, &rhs) {
            LpOutcome::Optimal { value, .. } => Ok(Finite(-value)),
            LpOutcome::Unbounded => Ok(PosInf),
            LpOutcome::Infeasible => Err(Error::Precondition(
                "extremum over an empty polyhedron".into(),
            )),
        }
    }

    /// Recession cone `{u : a . u <= 0 for every half-space}`.
    ///
    /// Only meaningful for nonempty sets, hence the emptiness precondition.
    pub fn recession_cone(&self) -> Result<HPolyhedron<S>> {
        if self.is_empty() {
            return Err(Error::Precondition(
                "recession cone of an empty polyhedron".into(),
            ));
        }
        Ok(HPolyhedron {
            dim: self.dim,
            halfspaces: self
                .halfspaces
                .iter()
                .map(|hs| HalfSpace {
                    a: hs.a.clone(),
                    b: S::zero(),
                })
                .collect(),
        })
    }

    /// Projection onto the coordinates in `keep` (order preserved) by
    /// Fourier-Motzkin elimination of everything else.
    pub fn project(&self, keep: &[usize]) -> Result<HPolyhedron<S>> {
        for &k in keep {
            if k >= self.dim {
                return Err(Error::InvalidInput(format!(
                    "projection index {k} out of range for dimension {}",
                    self.dim
                )));
            }
        }
        let mut cur: Vec<(Vec<S>, S)> = self
            .halfspaces
            .iter()
            .map(|hs| (hs.a.clone(), hs.b.clone()))
            .collect();
        let mut live: Vec<usize> = (0..self.dim).collect();
        // Eliminate from the highest index down so earlier positions stay put.
        let mut to_drop: Vec<usize> = (0..self.dim).filter(|i| !keep.contains(i)).collect();
        to_drop.sort_unstable_by(|a, b| b.cmp(a));
        for var in to_drop {
            let col = live.iter().position(|&v| v == var).expect("var is live");
            cur = eliminate_column(cur, col);
            live.remove(col);
        }
        // Reorder the remaining columns to follow `keep`.
        let mut halfspaces = Vec::with_capacity(cur.len());
        for (a, b) in cur {
            let reordered: Vec<S> = keep
                .iter()
                .map(|&k| {
                    let col = live.iter().position(|&v| v == k).expect("kept var is live");
                    a[col].clone()
                })
                .collect();
            halfspaces.push(HalfSpace { a: reordered, b });
        }
        let mut out = HPolyhedron {
            dim: keep.len(),
            halfspaces,
        };
        out.normalize();
        Ok(out)
    }

    /// Scales rows to a canonical leading coefficient, drops trivially true
    /// rows and exact duplicates.  Rows `0 <= b` with `b < 0` (witnessing
    /// emptiness) are kept.
    pub fn normalize(&mut self) {
        let mut rows: Vec<(Vec<S>, S)> = Vec::new();
        for hs in self.halfspaces.drain(..) {
            let mut a = hs.a;
            let mut b = hs.b;
            if let Some(lead) = a.iter().find(|v| !v.is_zero()).cloned() {
                let scale = lead.abs();
                for v in a.iter_mut() {
                    *v = v.clone() / scale.clone();
                }
                b = b / scale;
            } else if b >= S::zero() {
                continue; // 0 <= b: vacuous
            }
            if !rows.iter().any(|(ra, rb)| *ra == a && *rb == b) {
                rows.push((a, b));
            }
        }
        self.halfspaces = rows
            .into_iter()
            .map(|(a, b)| HalfSpace { a, b })
            .collect();
    }
}

/// One Fourier-Motzkin step: eliminates column `col` from `a . z <= b` rows.
fn eliminate_column<S: Scalar>(rows: Vec<(Vec<S>, S)>, col: usize) -> Vec<(Vec<S>, S)> {
    let mut zero = Vec::new();
    let mut upper = Vec::new(); // coefficient > 0: bounds the variable above
    let mut lower = Vec::new(); // coefficient < 0: bounds it below
    for (a, b) in rows {
        let c = a[col].clone();
        if c.is_zero() {
            zero.push((drop_col(a, col), b));
        } else if c > S::zero() {
            upper.push((a, b, c));
        } else {
            lower.push((a, b, c));
        }
    }
    let mut out = zero;
    for (ua, ub, uc) in &upper {
        for (la, lb, lc) in &lower {
            // Nonnegative combination (-lc) * upper + uc * lower kills the column.
            let wl = -lc.clone();
            let mut a = Vec::with_capacity(ua.len() - 1);
            for j in 0..ua.len() {
                if j == col {
                    continue;
                }
                a.push(wl.clone() * ua[j].clone() + uc.clone() * la[j].clone());
            }
            let b = wl * ub.clone() + uc.clone() * lb.clone();
            out.push((a, b));
        }
    }
    out
}

fn drop_col<S>(mut a: Vec<S>, col: usize) -> Vec<S> {
    a.remove(col);
    a
}

impl<S: Scalar> VPolytope<S> {
    pub fn new(dim: usize, vertices: Vec<Vec<S>>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidInput("a V-polytope needs vertices".into()));
        }
        for v in &vertices {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
        }
        Ok(Self { dim, vertices })
    }

    /// Exact membership in the convex hull of the vertex list.
    pub fn contains(&self, z: &[S]) -> bool {
        z.len() == self.dim && simplex::in_hull(&self.vertices, z)
    }

    /// Support function `max_v <v, s>`.
    pub fn support(&self, s: &[S]) -> Result<S> {
        if s.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: s.len(),
            });
        }
        let mut best: Option<S> = None;
        for v in &self.vertices {
            let val = dot(v, s);
            if best.as_ref().map_or(true, |b| val > *b) {
                best = Some(val);
            }
        }
        Ok(best.expect("nonempty vertex list"))
    }

    /// Coordinate-wise extent `[min, max]` along `axis`.
    pub fn extent(&self, axis: usize) -> (S, S) {
        let mut lo = self.vertices[0][axis].clone();
        let mut hi = lo.clone();
        for v in &self.vertices[1..] {
            if v[axis] < lo {
                lo = v[axis].clone();
            }
            if v[axis] > hi {
                hi = v[axis].clone();
            }
        }
        (lo, hi)
    }
}

impl<S: Scalar> NormBall<S> {
    pub fn new(center: Vec<S>, radius: S) -> Result<Self> {
        if radius < S::zero() {
            return Err(Error::InvalidInput("norm ball with negative radius".into()));
        }
        Ok(Self { center, radius })
    }

    pub fn contains(&self, z: &[S]) -> bool {
        if z.len() != self.center.len() {
            return false;
        }
        let mut d2 = S::zero();
        for (zi, ci) in z.iter().zip(&self.center) {
            let diff = zi.clone() - ci.clone();
            d2 = d2 + diff.clone() * diff;
        }
        d2 <= self.radius.clone() * self.radius.clone()
    }
}

impl<S: Scalar> Region<S> {
    pub fn dim(&self) -> usize {
        match self {
            Region::HPolyhedron(p) => p.dim,
            Region::VPolytope(p) => p.dim,
            Region::NormBall(b) => b.center.len(),
        }
    }

    /// Indicator value: zero on the set, `+inf` off it.
    pub fn indicator_eval(&self, z: &[S]) -> Result<ExtReal<S>> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: z.len(),
            });
        }
        let inside = match self {
            Region::HPolyhedron(p) => p.contains(z),
            Region::VPolytope(p) => p.contains(z),
            Region::NormBall(b) => b.contains(z),
        };
        Ok(if inside { Finite(S::zero()) } else { PosInf })
    }

    /// Support function; only the vertex description admits an exact finite
    /// maximum, so the other kinds are rejected.
    pub fn support_function(&self, s: &[S]) -> Result<S> {
        match self {
            Region::VPolytope(p) => p.support(s),
            Region::HPolyhedron(_) => Err(Error::UnsupportedRepresentation(
                "support function of an H-polyhedron (convert to vertices first)".into(),
            )),
            Region::NormBall(_) => Err(Error::UnsupportedRepresentation(
                "support function of a norm ball (irrational in general)".into(),
            )),
        }
    }
}
