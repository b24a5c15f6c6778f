//! The two canonical convex representations of a monotone operator.
//!
//! For a monotone `T` the minimal representing function is
//!
//! ```text
//! phi_T(x, x*) = sup { <x, y*> + <y, x*> - <y, y*> : (y, y*) in T },
//! ```
//!
//! and the maximal one is `sigma_T`, the closed convex hull of the pairing
//! restricted to the graph.  For a finite graph both are exactly
//! representable: `phi_T` as a max of affine pieces (one per graph point,
//! slope `(y*, y)`, offset `-<y, y*>`), `sigma_T` in generator form (one
//! generator `((y, y*), <y, y*>)` per graph point).  The two are linked by
//! the conjugate-and-swap transform: `phi_T = J sigma_T`, which here is an
//! exact structural identity between the two piecewise-linear forms.
//!
//! Continuum graphs (curves, linear maps) get exact *evaluation oracles*
//! instead of symbolic representations: the supremum over each curve piece
//! is a clipped concave quadratic in closed form, and the supremum over a
//! linear graph is a consistency-checked quadratic maximum.  Membership in
//! the representing family (`h >= pairing`, equality on the graph) is
//! decided by certified sampling, never by a global nonconvex search.

use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Finite, PosInf};
use crate::generator::{Generator, GeneratorFn};
use crate::grid::{convexity_violation, GridFn};
use crate::legendre::{j_transform_exact, ExactFn};
use crate::maxaffine::{AffinePiece, MaxAffineFn};
use crate::operators::{linear_is_monotone, CurvePiece, FiniteOperator, LinearOperator, PwlCurve1d};
use crate::point::PrimalDualPoint;
use crate::scalar::{dot, Scalar};

/// Minimal representing function of a finite graph, in max-affine form.
pub fn phi_finite<S: Scalar>(t: &FiniteOperator<S>) -> Result<MaxAffineFn<S>> {
    let pieces: Vec<AffinePiece<S>> = t
        .pairs
        .iter()
        .map(|p| {
            let mut slope = p.xstar.clone();
            slope.extend_from_slice(&p.x);
            AffinePiece {
                slope,
                offset: -p.pairing(),
            }
        })
        .collect();
    MaxAffineFn::new(2 * t.space_dim(), pieces, None)
}

/// Maximal representing function of a finite graph, in generator form: the
/// closed convex hull of the pairing pinned to the graph.
pub fn sigma_finite<S: Scalar>(t: &FiniteOperator<S>) -> Result<GeneratorFn<S>> {
    let generators: Vec<Generator<S>> = t
        .pairs
        .iter()
        .map(|p| Generator {
            point: p.to_coords(),
            value: p.pairing(),
        })
        .collect();
    GeneratorFn::new(2 * t.space_dim(), generators)
}

/// Exact evaluation of the minimal representing function of a maximal plane
/// curve.  Per sloped piece `y* = a y + b` on `[c, d]` the inner function
/// `-a y^2 + (a x + x* - b) y + b x` is a concave quadratic maximised in
/// closed form (vertex clipped to the piece); vertical pieces contribute
/// `v x* + max((x - v) lo, (x - v) hi)`, going to `+inf` on a ray whenever
/// the linear coefficient points along it.
pub fn phi_pwl1d_eval<S: Scalar>(
    curve: &PwlCurve1d<S>,
    z: &PrimalDualPoint<S>,
) -> Result<ExtReal<S>> {
    if !curve.is_maximal_1d() {
        return Err(Error::Precondition(
            "minimal representing function of a non-maximal curve".into(),
        ));
    }
    if z.space_dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: z.space_dim(),
        });
    }
    let (x, xs) = (&z.x[0], &z.xstar[0]);
    let mut best: Option<ExtReal<S>> = None;
    for piece in &curve.pieces {
        let val = match piece {
            CurvePiece::Sloped { lo, hi, a, b } => {
                // g(y) = -a y^2 + (a x + x* - b) y + b x
                let lin = a.clone() * x.clone() + xs.clone() - b.clone();
                let g = |y: S| -> S {
                    -a.clone() * y.clone() * y.clone() + lin.clone() * y + b.clone() * x.clone()
                };
                if a.is_zero() {
                    sup_linear(&lin, &(b.clone() * x.clone()), lo, hi, g)
                } else {
                    let vertex = lin.clone() / (S::from_int(2) * a.clone());
                    Finite(g(clamp(vertex, lo, hi)))
                }
            }
            CurvePiece::Vertical { v, lo, hi } => {
                // g(y*) = (x - v) y* + v x*
                let lin = x.clone() - v.clone();
                let c = v.clone() * xs.clone();
                sup_linear(&lin, &c, lo, hi, |t: S| lin.clone() * t + c.clone())
            }
        };
        best = Some(best.map_or(val.clone(), |b| b.max_ext(val)));
    }
    Ok(best.expect("curves have at least one piece"))
}

/// Exact evaluation of `sup { <x, y*> + <y, x*> : (y, y*) on the curve }` —
/// the conjugate-and-swap of the graph indicator.  Linear along every
/// piece, so the supremum is an endpoint value or `+inf` along a ray.
pub fn jdelta_pwl1d_eval<S: Scalar>(
    curve: &PwlCurve1d<S>,
    z: &PrimalDualPoint<S>,
) -> Result<ExtReal<S>> {
    if z.space_dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: z.space_dim(),
        });
    }
    let (x, xs) = (&z.x[0], &z.xstar[0]);
    let mut best: Option<ExtReal<S>> = None;
    for piece in &curve.pieces {
        let val = match piece {
            CurvePiece::Sloped { lo, hi, a, b } => {
                // g(y) = (a x + x*) y + b x
                let lin = a.clone() * x.clone() + xs.clone();
                let c = b.clone() * x.clone();
                sup_linear(&lin, &c, lo, hi, |y: S| lin.clone() * y + c.clone())
            }
            CurvePiece::Vertical { v, lo, hi } => {
                // g(y*) = x y* + v x*
                let c = v.clone() * xs.clone();
                sup_linear(x, &c, lo, hi, |t: S| x.clone() * t + c.clone())
            }
        };
        best = Some(best.map_or(val.clone(), |b| b.max_ext(val)));
    }
    Ok(best.expect("curves have at least one piece"))
}

/// Supremum of a linear function with slope `lin` over `[lo, hi]` (open
/// ends are rays): `+inf` when the slope points along an open end, the
/// matching endpoint value otherwise, `at0` when the slope vanishes.
fn sup_linear<S: Scalar>(
    lin: &S,
    at0: &S,
    lo: &Option<S>,
    hi: &Option<S>,
    eval: impl Fn(S) -> S,
) -> ExtReal<S> {
    if lin.is_zero() {
        Finite(at0.clone())
    } else if *lin > S::zero() {
        match hi {
            None => PosInf,
            Some(h) => Finite(eval(h.clone())),
        }
    } else {
        match lo {
            None => PosInf,
            Some(l) => Finite(eval(l.clone())),
        }
    }
}

fn clamp<S: Scalar>(v: S, lo: &Option<S>, hi: &Option<S>) -> S {
    if let Some(l) = lo {
        if v < *l {
            return l.clone();
        }
    }
    if let Some(h) = hi {
        if v > *h {
            return h.clone();
        }
    }
    v
}

/// Exact evaluation of the minimal representing function of a monotone
/// linear map `x |-> Mx`:
///
/// ```text
/// phi(x, x*) = sup_y [ <M^T x + x*, y> - <y, S y> ],   S = (M + M^T)/2.
/// ```
///
/// Finite exactly when `w = M^T x + x*` lies in the range of `S` (solve
/// `S y = w/2`; any solution gives the value `<w, y>/2`), `+inf` otherwise.
pub fn phi_linear_eval<S: Scalar>(
    m: &LinearOperator<S>,
    z: &PrimalDualPoint<S>,
) -> Result<ExtReal<S>> {
    if !linear_is_monotone(m) {
        return Err(Error::Precondition(
            "minimal representing function of a non-monotone linear map".into(),
        ));
    }
    let n = m.space_dim();
    if z.space_dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: z.space_dim(),
        });
    }
    // w = M^T x + x*
    let w: Vec<S> = (0..n)
        .map(|j| {
            let col: S = (0..n)
                .map(|i| m.rows[i][j].clone() * z.x[i].clone())
                .fold(S::zero(), |acc, v| acc + v);
            col + z.xstar[j].clone()
        })
        .collect();
    let s = m.symmetric_part();
    let half = S::ratio(1, 2);
    let rhs: Vec<S> = w.iter().map(|v| v.clone() * half.clone()).collect();
    match solve_symmetric(&s, &rhs) {
        Some(y) => Ok(Finite(dot(&w, &y) * half)),
        None => Ok(PosInf),
    }
}

/// Solves `S y = rhs` for symmetric `S` (n <= 2), returning any solution,
/// or `None` when the system is inconsistent (rhs outside the range).
fn solve_symmetric<S: Scalar>(s: &[Vec<S>], rhs: &[S]) -> Option<Vec<S>> {
    match s.len() {
        1 => {
            if s[0][0].is_zero() {
                rhs[0].is_zero().then(|| vec![S::zero()])
            } else {
                Some(vec![rhs[0].clone() / s[0][0].clone()])
            }
        }
        2 => {
            let (a, b, d) = (&s[0][0], &s[0][1], &s[1][1]);
            let det = a.clone() * d.clone() - b.clone() * b.clone();
            if !det.is_zero() {
                let y0 = (rhs[0].clone() * d.clone() - b.clone() * rhs[1].clone()) / det.clone();
                let y1 = (a.clone() * rhs[1].clone() - rhs[0].clone() * b.clone()) / det;
                return Some(vec![y0, y1]);
            }
            // Rank <= 1.  Pivot on any nonzero row.
            if !a.is_zero() {
                // Row 2 is b/a times row 1; consistent iff rhs follows suit.
                let ratio = b.clone() / a.clone();
                if rhs[1].clone() != ratio.clone() * rhs[0].clone() {
                    return None;
                }
                Some(vec![rhs[0].clone() / a.clone(), S::zero()])
            } else if !b.is_zero() {
                // a = 0, b != 0 forces det = -b^2 != 0; unreachable here.
                unreachable!("zero diagonal with nonzero off-diagonal has nonzero determinant")
            } else if !d.is_zero() {
                if !rhs[0].is_zero() {
                    return None;
                }
                Some(vec![S::zero(), rhs[1].clone() / d.clone()])
            } else {
                (rhs[0].is_zero() && rhs[1].is_zero()).then(|| vec![S::zero(), S::zero()])
            }
        }
        n => unreachable!("linear operators are capped at 2 dimensions, got {n}"),
    }
}

// ---------------------------------------------------------------------------
// Family membership
// ---------------------------------------------------------------------------

/// Verdict of a point-sampled membership check against the representing
/// family of a graph: `h` must majorize the pairing at every probe and
/// match it on the graph.
#[derive(Clone, Debug)]
pub struct FamilyMembershipReport<S> {
    pub is_member: bool,
    /// `max(pairing - h)` over the probe set; at most the tolerance for
    /// members.  `-inf` when `h` is `+inf` at every probe.
    pub max_deficit_below_pi: ExtReal<S>,
    /// `max |h - pairing|` over the graph points.
    pub max_graph_gap: ExtReal<S>,
    /// Probe or graph points violating their bound.
    pub witnesses: Vec<Vec<S>>,
}

/// Point-sampled family membership for any evaluable representation.
/// Convexity and closedness are the caller's responsibility (the exact
/// forms carry them by construction; for raw grid data use
/// [`family_membership_grid`], which screens first).
pub fn family_membership<S: Scalar>(
    h: &dyn Fn(&[S]) -> Result<ExtReal<S>>,
    graph: &FiniteOperator<S>,
    probes: &[Vec<S>],
    tol: &S,
) -> Result<FamilyMembershipReport<S>> {
    let mut max_deficit: ExtReal<S> = ExtReal::NegInf;
    let mut max_gap: ExtReal<S> = ExtReal::NegInf;
    let mut witnesses = Vec::new();
    for z in probes {
        let pairing = crate::point::pairing_flat(z);
        let deficit = match h(z)? {
            Finite(v) => Finite(pairing - v),
            PosInf => ExtReal::NegInf,
            ExtReal::NegInf => {
                return Err(Error::Improper("representation takes -inf".into()))
            }
        };
        if matches!(&deficit, Finite(d) if d > tol) {
            witnesses.push(z.clone());
        }
        max_deficit = max_deficit.max_ext(deficit);
    }
    for p in &graph.pairs {
        let z = p.to_coords();
        let gap = match h(&z)? {
            Finite(v) => Finite((v - p.pairing()).abs()),
            _ => PosInf,
        };
        if !matches!(&gap, Finite(g) if g <= tol) {
            witnesses.push(z);
        }
        max_gap = max_gap.max_ext(gap);
    }
    let le_tol = |m: &ExtReal<S>| match m {
        Finite(v) => v <= tol,
        ExtReal::NegInf => true,
        PosInf => false,
    };
    Ok(FamilyMembershipReport {
        is_member: le_tol(&max_deficit) && le_tol(&max_gap),
        max_deficit_below_pi: max_deficit,
        max_graph_gap: max_gap,
        witnesses,
    })
}

/// Family membership for grid data: probes are the grid nodes, graph
/// points must sit on nodes, and the data must first pass the midpoint
/// convexity screen — the pairing itself encoded on a grid is rejected
/// here, not accepted with deficit zero.
pub fn family_membership_grid<S: Scalar>(
    h: &GridFn<S>,
    graph: &FiniteOperator<S>,
    tol: f64,
) -> Result<FamilyMembershipReport<S>> {
    if let Some(v) = convexity_violation(h, 1e-9) {
        return Err(Error::UnsupportedRepresentation(format!(
            "grid data fails the midpoint convexity screen at {:?} along {:?} (gap {:.3e}); \
             not a closed convex representation",
            v.node, v.direction, v.gap
        )));
    }
    let spec = h.spec();
    let mut max_deficit: ExtReal<S> = ExtReal::NegInf;
    let mut max_gap: ExtReal<S> = ExtReal::NegInf;
    let mut witnesses = Vec::new();
    for i in 0..spec.num_nodes() {
        let z: Vec<S> = spec.node_coords_exact(i);
        let pairing = crate::point::pairing_flat(&z);
        let deficit = match h.value(i) {
            Finite(v) => Finite(pairing - v.clone()),
            PosInf => ExtReal::NegInf,
            ExtReal::NegInf => return Err(Error::Improper("grid data takes -inf".into())),
        };
        if matches!(&deficit, Finite(d) if d.to_f64() > tol) {
            witnesses.push(z);
        }
        max_deficit = max_deficit.max_ext(deficit);
    }
    for p in &graph.pairs {
        let coords: Vec<f64> = p.to_coords().iter().map(|c| c.to_f64()).collect();
        let node = spec.find_node(&coords, 1e-9).ok_or_else(|| {
            Error::InvalidInput("graph point does not sit on a grid node".into())
        })?;
        let gap = match h.value(node) {
            Finite(v) => Finite((v.clone() - p.pairing()).abs()),
            _ => PosInf,
        };
        if !matches!(&gap, Finite(g) if g.to_f64() <= tol) {
            witnesses.push(p.to_coords());
        }
        max_gap = max_gap.max_ext(gap);
    }
    let le_tol = |m: &ExtReal<S>| match m {
        Finite(v) => v.to_f64() <= tol,
        ExtReal::NegInf => true,
        PosInf => false,
    };
    Ok(FamilyMembershipReport {
        is_member: le_tol(&max_deficit) && le_tol(&max_gap),
        max_deficit_below_pi: max_deficit,
        max_graph_gap: max_gap,
        witnesses,
    })
}

// ---------------------------------------------------------------------------
// The e envelope: minimal vs maximal representative
// ---------------------------------------------------------------------------

/// Result of checking that the minimal representative sits below the
/// maximal one and equals its conjugate-swap, everywhere exactly.
#[derive(Clone, Debug)]
pub struct EnvelopeReport<S> {
    /// `phi <= sigma` at every probe.
    pub phi_le_sigma: bool,
    /// `phi == J sigma` at every probe (exact).
    pub phi_eq_j_sigma: bool,
    /// The pruned max-affine forms of `phi` and `J sigma` are identical
    /// piece lists — the identity holds structurally, not just pointwise.
    pub structurally_equal: bool,
    pub witness: Option<Vec<S>>,
}

/// Verifies, for a monotone finite graph, the envelope identities linking
/// the minimal and maximal representatives through the conjugate-swap
/// transform.  All comparisons are exact.
pub fn minimality_maximality_envelope<S: Scalar>(
    t: &FiniteOperator<S>,
    probes: &[Vec<S>],
) -> Result<EnvelopeReport<S>> {
    if !t.is_monotone().monotone {
        return Err(Error::Precondition(
            "envelope identities need a monotone graph".into(),
        ));
    }
    let phi = phi_finite(t)?;
    let sigma = sigma_finite(t)?;
    let j_sigma = match j_transform_exact(&ExactFn::Generator(sigma.clone()))? {
        ExactFn::MaxAffine(a) => a,
        ExactFn::Generator(_) => unreachable!("conjugate of a generator form is max-affine"),
    };

    let mut phi_le_sigma = true;
    let mut phi_eq_j = true;
    let mut witness = None;
    for z in probes {
        let p = phi.eval(z)?;
        let s = sigma.eval(z)?;
        let j = j_sigma.eval(z)?;
        if p.clone().max_ext(s.clone()) != s {
            phi_le_sigma = false;
            witness.get_or_insert_with(|| z.clone());
        }
        if p != j {
            phi_eq_j = false;
            witness.get_or_insert_with(|| z.clone());
        }
    }

    let mut lhs = phi.pruned().pieces;
    let mut rhs = j_sigma.pruned().pieces;
    let key = |p: &AffinePiece<S>| {
        (
            p.slope.iter().map(|c| c.to_f64()).collect::<Vec<_>>(),
            p.offset.to_f64(),
        )
    };
    lhs.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    rhs.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    let structurally_equal = lhs == rhs;

    Ok(EnvelopeReport {
        phi_le_sigma,
        phi_eq_j_sigma: phi_eq_j,
        structurally_equal,
        witness,
    })
}

// ---------------------------------------------------------------------------
// Grid materialization of the exact oracles
// ---------------------------------------------------------------------------

/// Samples an exact evaluation oracle on a float grid (coordinates are
/// lifted exactly, values rounded once at the end).
pub fn materialize<S: Scalar, F>(spec: &crate::grid::GridSpec, f: F) -> Result<GridFn<f64>>
where
    F: Fn(&[S]) -> Result<ExtReal<S>>,
{
    let mut values = Vec::with_capacity(spec.num_nodes());
    for i in 0..spec.num_nodes() {
        let z: Vec<S> = spec.node_coords_exact(i);
        values.push(match f(&z)? {
            Finite(v) => Finite(v.to_f64()),
            PosInf => PosInf,
            ExtReal::NegInf => ExtReal::NegInf,
        });
    }
    GridFn::new(spec.clone(), values)
}

/// Node-wise average of two grid functions on the same spec (`+inf`
/// absorbs).  Used for the midpoint of the minimal and maximal
/// representatives, itself a representing function.
pub fn midpoint_grid(a: &GridFn<f64>, b: &GridFn<f64>) -> Result<GridFn<f64>> {
    if a.spec() != b.spec() {
        return Err(Error::InvalidInput("midpoint of mismatched grids".into()));
    }
    let values = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| match (x, y) {
            (Finite(u), Finite(v)) => Finite(0.5 * (u + v)),
            (ExtReal::NegInf, _) | (_, ExtReal::NegInf) => ExtReal::NegInf,
            _ => PosInf,
        })
        .collect();
    GridFn::new(a.spec().clone(), values)
}
