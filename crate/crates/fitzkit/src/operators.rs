//! Monotone operators as explicit graphs: finite point sets, piecewise
//! linear curves in the plane, and linear maps.
//!
//! Monotonicity of a relation `T` between `X` and `X*` means
//! `<x - y, x* - y*> >= 0` for all graph pairs; it is decided here exactly
//! (pairwise, over whatever scalar the graph is stored in).  Maximality —
//! no proper monotone extension — is decidable only for the two structured
//! representations: a plane curve is maximal when it is connected,
//! nondecreasing and unbounded at both ends, and a monotone linear map with
//! full domain is always maximal.  A finite set is never maximal, and
//! deliberately carries no maximality predicate.

use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Finite, NegInf, PosInf};
use crate::point::PrimalDualPoint;
use crate::scalar::{dot, Scalar};

// ---------------------------------------------------------------------------
// Finite graphs
// ---------------------------------------------------------------------------

/// A finite set of primal-dual pairs `(x, x*)`, duplicates removed (first
/// occurrence kept, order otherwise preserved).
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteOperator<S> {
    pub pairs: Vec<PrimalDualPoint<S>>,
}

/// Outcome of the pairwise monotonicity check.  `violator` holds the first
/// offending pair in storage order together with the negative inner product
/// `<x - y, x* - y*>`.
#[derive(Clone, Debug)]
pub struct MonotonicityReport<S> {
    pub monotone: bool,
    pub violator: Option<(PrimalDualPoint<S>, PrimalDualPoint<S>, S)>,
}

impl<S: Scalar> FiniteOperator<S> {
    pub fn new(pairs: Vec<PrimalDualPoint<S>>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidInput("empty operator graph".into()));
        }
        let n = pairs[0].space_dim();
        let mut dedup: Vec<PrimalDualPoint<S>> = Vec::with_capacity(pairs.len());
        for p in pairs {
            if p.space_dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: p.space_dim(),
                });
            }
            if !dedup.contains(&p) {
                dedup.push(p);
            }
        }
        Ok(Self { pairs: dedup })
    }

    pub fn space_dim(&self) -> usize {
        self.pairs[0].space_dim()
    }

    /// Exact pairwise monotonicity test, first violator (in storage order)
    /// reported.
    pub fn is_monotone(&self) -> MonotonicityReport<S> {
        for i in 0..self.pairs.len() {
            for j in (i + 1)..self.pairs.len() {
                let (p, q) = (&self.pairs[i], &self.pairs[j]);
                let dx: Vec<S> = p
                    .x
                    .iter()
                    .zip(&q.x)
                    .map(|(a, b)| a.clone() - b.clone())
                    .collect();
                let ds: Vec<S> = p
                    .xstar
                    .iter()
                    .zip(&q.xstar)
                    .map(|(a, b)| a.clone() - b.clone())
                    .collect();
                let ip = dot(&dx, &ds);
                if ip < S::zero() {
                    return MonotonicityReport {
                        monotone: false,
                        violator: Some((p.clone(), q.clone(), ip)),
                    };
                }
            }
        }
        MonotonicityReport {
            monotone: true,
            violator: None,
        }
    }

    /// The graph with one extra pair appended (used to probe maximality:
    /// near a maximal graph, off-graph points break monotonicity).
    pub fn augmented_with(&self, p: PrimalDualPoint<S>) -> Result<Self> {
        let mut pairs = self.pairs.clone();
        pairs.push(p);
        Self::new(pairs)
    }

    /// The projection `D(T)` onto the primal block, in storage order.
    pub fn domain_points(&self) -> Vec<Vec<S>> {
        self.pairs.iter().map(|p| p.x.clone()).collect()
    }

    /// The projection `R(T)` onto the dual block, in storage order.
    pub fn range_points(&self) -> Vec<Vec<S>> {
        self.pairs.iter().map(|p| p.xstar.clone()).collect()
    }
}

// ---------------------------------------------------------------------------
// Piecewise linear curves in the plane (n = 1)
// ---------------------------------------------------------------------------

/// One piece of a monotone plane curve.  `None` bounds mark unbounded rays
/// and are only legal on the outermost pieces.
#[derive(Clone, Debug, PartialEq)]
pub enum CurvePiece<S> {
    /// `y* = a y + b` for `y` in `[lo, hi]`, slope `a >= 0`.
    Sloped {
        lo: Option<S>,
        hi: Option<S>,
        a: S,
        b: S,
    },
    /// Fixed `y = v`, `y*` running over `[lo, hi]`.
    Vertical {
        v: S,
        lo: Option<S>,
        hi: Option<S>,
    },
}

/// A connected nondecreasing piecewise-linear curve in `R x R`, traced
/// left-to-right and bottom-to-top: the graph of a monotone operator on the
/// line.  Consecutive pieces share an endpoint; only the first and last may
/// be unbounded rays.
#[derive(Clone, Debug, PartialEq)]
pub struct PwlCurve1d<S> {
    pub pieces: Vec<CurvePiece<S>>,
}

impl<S: Scalar> PwlCurve1d<S> {
    pub fn new(pieces: Vec<CurvePiece<S>>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidInput("curve needs at least one piece".into()));
        }
        let bad = |msg: &str| Err(Error::InvalidInput(format!("malformed curve: {msg}")));
        let last = pieces.len() - 1;
        for (i, piece) in pieces.iter().enumerate() {
            let (lo, hi) = match piece {
                CurvePiece::Sloped { lo, hi, a, .. } => {
                    if *a < S::zero() {
                        return bad("negative slope");
                    }
                    (lo, hi)
                }
                CurvePiece::Vertical { lo, hi, .. } => (lo, hi),
            };
            if lo.is_none() && i != 0 {
                return bad("interior piece unbounded below");
            }
            if hi.is_none() && i != last {
                return bad("interior piece unbounded above");
            }
            if let (Some(l), Some(h)) = (lo, hi) {
                if l >= h {
                    return bad("piece with empty or reversed extent");
                }
            }
        }
        // Connectivity: the end point of each piece is the start of the next.
        for w in pieces.windows(2) {
            let end = piece_endpoint(&w[0], true)
                .ok_or_else(|| Error::InvalidInput("malformed curve: ray before the end".into()))?;
            let start = piece_endpoint(&w[1], false)
                .ok_or_else(|| Error::InvalidInput("malformed curve: ray after the start".into()))?;
            if end != start {
                return bad("consecutive pieces do not share an endpoint");
            }
        }
        Ok(Self { pieces })
    }

    /// Complete nondecreasing curve criterion: maximal monotone iff the
    /// curve runs off to infinity (in `y + y*`) at both ends.
    pub fn is_maximal_1d(&self) -> bool {
        let unbounded = |p: &CurvePiece<S>, upper: bool| match p {
            CurvePiece::Sloped { lo, hi, .. } | CurvePiece::Vertical { lo, hi, .. } => {
                if upper { hi.is_none() } else { lo.is_none() }
            }
        };
        unbounded(&self.pieces[0], false) && unbounded(&self.pieces[self.pieces.len() - 1], true)
    }

    /// Extent of `D(T)` (the `y` coordinates covered), as closed bounds
    /// with infinities for end rays.
    pub fn domain_extent(&self) -> (ExtReal<S>, ExtReal<S>) {
        let lo = match &self.pieces[0] {
            CurvePiece::Sloped { lo, .. } => match lo {
                Some(v) => Finite(v.clone()),
                None => NegInf,
            },
            CurvePiece::Vertical { v, .. } => Finite(v.clone()),
        };
        let hi = match &self.pieces[self.pieces.len() - 1] {
            CurvePiece::Sloped { hi, .. } => match hi {
                Some(v) => Finite(v.clone()),
                None => PosInf,
            },
            CurvePiece::Vertical { v, .. } => Finite(v.clone()),
        };
        (lo, hi)
    }

    /// Extent of `R(T)` (the `y*` coordinates covered), mirroring
    /// [`Self::domain_extent`].  Monotonicity makes both monotone sweeps,
    /// so the extremes sit on the outermost pieces.
    pub fn range_extent(&self) -> (ExtReal<S>, ExtReal<S>) {
        let value_at = |p: &CurvePiece<S>, upper: bool| -> ExtReal<S> {
            match p {
                CurvePiece::Sloped { lo, hi, a, b } => {
                    let end = if upper { hi } else { lo };
                    match end {
                        Some(y) => Finite(a.clone() * y.clone() + b.clone()),
                        None if a.is_zero() => Finite(b.clone()),
                        None if upper => PosInf,
                        None => NegInf,
                    }
                }
                CurvePiece::Vertical { lo, hi, .. } => {
                    let end = if upper { hi } else { lo };
                    match end {
                        Some(v) => Finite(v.clone()),
                        None if upper => PosInf,
                        None => NegInf,
                    }
                }
            }
        };
        (
            value_at(&self.pieces[0], false),
            value_at(&self.pieces[self.pieces.len() - 1], true),
        )
    }

    /// Exact membership test for a point `(y, y*)`.
    pub fn on_curve(&self, y: &S, ystar: &S) -> bool {
        self.pieces.iter().any(|p| match p {
            CurvePiece::Sloped { lo, hi, a, b } => {
                within(y, lo, hi) && *ystar == a.clone() * y.clone() + b.clone()
            }
            CurvePiece::Vertical { v, lo, hi } => y == v && within(ystar, lo, hi),
        })
    }

    /// Deterministic equispaced samples of the curve clipped to the box
    /// `[y_lo, y_hi] x [ystar_lo, ystar_hi]`: `per_piece` points on each
    /// surviving non-vertical piece, `vertical_refinement` on each vertical
    /// one (both endpoint-inclusive; shared endpoints dedupe).
    pub fn sample_graph(
        &self,
        y_window: (S, S),
        ystar_window: (S, S),
        per_piece: usize,
        vertical_refinement: usize,
    ) -> Result<FiniteOperator<S>> {
        if per_piece < 1 || vertical_refinement < 1 {
            return Err(Error::InvalidInput("sample counts must be >= 1".into()));
        }
        let mut pts: Vec<PrimalDualPoint<S>> = Vec::new();
        for piece in &self.pieces {
            match piece {
                CurvePiece::Sloped { lo, hi, a, b } => {
                    // Clip in y, then pull the y* window back through the map.
                    let mut l = clip_lo(lo, &y_window.0);
                    let mut h = clip_hi(hi, &y_window.1);
                    if a.is_zero() {
                        if *b < ystar_window.0 || *b > ystar_window.1 {
                            continue;
                        }
                    } else {
                        let inv_l = (ystar_window.0.clone() - b.clone()) / a.clone();
                        let inv_h = (ystar_window.1.clone() - b.clone()) / a.clone();
                        if inv_l > l {
                            l = inv_l;
                        }
                        if inv_h < h {
                            h = inv_h;
                        }
                    }
                    if l > h {
                        continue;
                    }
                    for y in linspace(&l, &h, per_piece) {
                        let ys = a.clone() * y.clone() + b.clone();
                        pts.push(PrimalDualPoint::new(vec![y], vec![ys])?);
                    }
                }
                CurvePiece::Vertical { v, lo, hi } => {
                    if *v < y_window.0 || *v > y_window.1 {
                        continue;
                    }
                    let l = clip_lo(lo, &ystar_window.0);
                    let h = clip_hi(hi, &ystar_window.1);
                    if l > h {
                        continue;
                    }
                    for ys in linspace(&l, &h, vertical_refinement) {
                        pts.push(PrimalDualPoint::new(vec![v.clone()], vec![ys])?);
                    }
                }
            }
        }
        if pts.is_empty() {
            return Err(Error::InvalidInput(
                "sampling window does not meet the curve".into(),
            ));
        }
        FiniteOperator::new(pts)
    }
}

fn within<S: Scalar>(v: &S, lo: &Option<S>, hi: &Option<S>) -> bool {
    lo.as_ref().map_or(true, |l| v >= l) && hi.as_ref().map_or(true, |h| v <= h)
}

fn clip_lo<S: Scalar>(lo: &Option<S>, win: &S) -> S {
    match lo {
        Some(l) if l > win => l.clone(),
        _ => win.clone(),
    }
}

fn clip_hi<S: Scalar>(hi: &Option<S>, win: &S) -> S {
    match hi {
        Some(h) if h < win => h.clone(),
        _ => win.clone(),
    }
}

fn linspace<S: Scalar>(lo: &S, hi: &S, k: usize) -> Vec<S> {
    if k == 1 || lo == hi {
        return vec![lo.clone()];
    }
    let span = hi.clone() - lo.clone();
    let den = S::from_int(k as i64 - 1);
    (0..k)
        .map(|i| lo.clone() + span.clone() * S::from_int(i as i64) / den.clone())
        .collect()
}

/// The curve's start (`upper = false`) or end (`upper = true`) point, or
/// `None` on an unbounded ray.
fn piece_endpoint<S: Scalar>(p: &CurvePiece<S>, upper: bool) -> Option<(S, S)> {
    match p {
        CurvePiece::Sloped { lo, hi, a, b } => {
            let y = if upper { hi.clone()? } else { lo.clone()? };
            let ys = a.clone() * y.clone() + b.clone();
            Some((y, ys))
        }
        CurvePiece::Vertical { v, lo, hi } => {
            let ys = if upper { hi.clone()? } else { lo.clone()? };
            Some((v.clone(), ys))
        }
    }
}

// ---------------------------------------------------------------------------
// Linear operators
// ---------------------------------------------------------------------------

/// The graph `{(x, Mx)}` of a square matrix, `n <= 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearOperator<S> {
    /// Row-major rows of `M`.
    pub rows: Vec<Vec<S>>,
}

impl<S: Scalar> LinearOperator<S> {
    pub fn new(rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n > crate::point::MAX_SPACE_DIM {
            return Err(Error::UnsupportedDimension {
                operation: "linear operator".into(),
                dim: n,
                max: crate::point::MAX_SPACE_DIM,
            });
        }
        for r in &rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
        }
        Ok(Self { rows })
    }

    pub fn space_dim(&self) -> usize {
        self.rows.len()
    }

    pub fn apply(&self, x: &[S]) -> Vec<S> {
        self.rows.iter().map(|r| dot(r, x)).collect()
    }

    /// Entries of the symmetric part `(M + M^T) / 2`.
    pub fn symmetric_part(&self) -> Vec<Vec<S>> {
        let n = self.space_dim();
        let half = S::ratio(1, 2);
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (self.rows[i][j].clone() + self.rows[j][i].clone()) * half.clone()
                    })
                    .collect()
            })
            .collect()
    }

    /// Equispaced graph samples over the box `[lo, hi]^n`, `per_axis`
    /// points per axis: pairs `(x, Mx)`.
    pub fn sample_graph(&self, lo: &S, hi: &S, per_axis: usize) -> Result<FiniteOperator<S>> {
        if per_axis < 1 {
            return Err(Error::InvalidInput("sample count must be >= 1".into()));
        }
        if lo > hi {
            return Err(Error::InvalidInput("empty sampling box".into()));
        }
        let n = self.space_dim();
        let axis = linspace(lo, hi, per_axis);
        let mut pts = Vec::new();
        let mut idx = vec![0usize; n];
        loop {
            let x: Vec<S> = idx.iter().map(|&i| axis[i].clone()).collect();
            let mx = self.apply(&x);
            pts.push(PrimalDualPoint::new(x, mx)?);
            let mut done = true;
            for k in (0..n).rev() {
                idx[k] += 1;
                if idx[k] < axis.len() {
                    done = false;
                    break;
                }
                idx[k] = 0;
            }
            if done {
                break;
            }
        }
        FiniteOperator::new(pts)
    }
}

/// Monotonicity of a linear map: no eigenvalue of the symmetric part below
/// `-1e-12` (closed-form eigenvalues, `n <= 2`).
pub fn linear_is_monotone<S: Scalar>(m: &LinearOperator<S>) -> bool {
    let s = m.symmetric_part();
    let min_eig = match m.space_dim() {
        1 => s[0][0].to_f64(),
        2 => {
            let (a, b, d) = (s[0][0].to_f64(), s[0][1].to_f64(), s[1][1].to_f64());
            let tr = a + d;
            let disc = ((a - d) * (a - d) + 4.0 * b * b).sqrt();
            0.5 * (tr - disc)
        }
        _ => unreachable!("dimension capped at construction"),
    };
    min_eig >= -1e-12
}

// ---------------------------------------------------------------------------
// Uniform handle
// ---------------------------------------------------------------------------

/// Any of the three graph representations, for call sites that dispatch on
/// operator kind (catalogs, the lemma battery, the CLI).
#[derive(Clone, Debug)]
pub enum Operator<S> {
    Finite(FiniteOperator<S>),
    Curve(PwlCurve1d<S>),
    Linear(LinearOperator<S>),
}

impl<S: Scalar> Operator<S> {
    pub fn space_dim(&self) -> usize {
        match self {
            Operator::Finite(t) => t.space_dim(),
            Operator::Curve(_) => 1,
            Operator::Linear(m) => m.space_dim(),
        }
    }

    /// Whether the representation is known-maximal: the complete-curve
    /// criterion, or a monotone linear map (full domain).  Finite graphs
    /// are never maximal.
    pub fn is_maximal(&self) -> bool {
        match self {
            Operator::Finite(_) => false,
            Operator::Curve(c) => c.is_maximal_1d(),
            Operator::Linear(m) => linear_is_monotone(m),
        }
    }
}
