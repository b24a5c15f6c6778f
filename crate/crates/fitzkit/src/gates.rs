//! The representability gate, operator extraction, and the assembled
//! pipeline that turns a convex grid function into a certified monotone
//! graph.
//!
//! A proper convex `h` on the product window *represents* a monotone
//! operator when it majorizes the duality pairing and so does its
//! J-transform.  When both checks pass, the set of nodes where `Jh` meets
//! the pairing is (a discretization of) the operator's graph; extraction
//! collects those nodes and re-verifies monotonicity rather than assuming
//! it.  The boundedness reports connect a bounded block projection of the
//! domain of `h` to Lipschitz behaviour of its partial slices, which is
//! what makes "bounded range" readable off a representing function without
//! ever touching the operator.
//!
//! All claims made from a grid are window-limited: the reports say so
//! rather than extrapolating, and values under the saturation mask of a
//! transform are never used as evidence.

use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Finite, NegInf, PosInf};
use crate::grid::{convexity_violation, GridFn, GridSpec};
use crate::legendre::{j_transform_grid, ConjugateResult};
use crate::maxaffine::MaxAffineFn;
use crate::operators::{FiniteOperator, MonotonicityReport};
use crate::point::{pairing_flat, PrimalDualPoint};
use crate::scalar::Scalar;
use std::cmp::Ordering;

/// Which block of the product space a projection or slope bound refers to:
/// the first `n` coordinates (primal) or the last `n` (dual).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    Primal,
    Dual,
}

impl Block {
    /// Axis indices of this block for a `2n`-dimensional product grid.
    pub fn axes(self, n: usize) -> std::ops::Range<usize> {
        match self {
            Block::Primal => 0..n,
            Block::Dual => n..2 * n,
        }
    }

    pub fn other(self) -> Block {
        match self {
            Block::Primal => Block::Dual,
            Block::Dual => Block::Primal,
        }
    }
}

// ---------------------------------------------------------------------------
// Majorization checks and the gate
// ---------------------------------------------------------------------------

/// Outcome of a single "h majorizes the pairing" check.
///
/// `worst_violation` is the largest value of `pairing - h` seen (so the
/// check holds iff it is at most the tolerance); the witness is a probe
/// attaining it, kept only when the check fails.
#[derive(Clone, Debug)]
pub struct GateCheck<S> {
    pub holds: bool,
    pub worst_violation: ExtReal<S>,
    pub witness: Option<Vec<S>>,
}

/// Checks `h(z) >= <x, x*>` over explicit probes; exact when `S` is exact.
///
/// Probes where `h` is `+inf` satisfy the inequality vacuously.  The first
/// probe attaining the worst violation is the witness.
pub fn check_majorizes_pi<S: Scalar>(
    h: &dyn Fn(&[S]) -> ExtReal<S>,
    probes: &[Vec<S>],
    tol: &S,
) -> GateCheck<S> {
    let mut worst: ExtReal<S> = NegInf;
    let mut witness: Option<Vec<S>> = None;
    for z in probes {
        let margin = Finite(pairing_flat(z)) + -h(z);
        if worst.cmp_ext(&margin) == Ordering::Less {
            worst = margin;
            witness = Some(z.clone());
        }
    }
    let holds = worst.cmp_ext(&Finite(tol.clone())) != Ordering::Greater;
    GateCheck {
        holds,
        worst_violation: worst,
        witness: if holds { None } else { witness },
    }
}

/// Grid version of [`check_majorizes_pi`]: probes every node, using exact
/// node coordinates, optionally ignoring nodes where `skip` is set (used to
/// keep saturated transform values out of the evidence).
pub fn check_majorizes_pi_grid<S: Scalar>(
    h: &GridFn<S>,
    skip: Option<&[bool]>,
    tol: &S,
) -> GateCheck<S> {
    let spec = h.spec();
    let mut worst: ExtReal<S> = NegInf;
    let mut witness: Option<Vec<S>> = None;
    for i in 0..spec.num_nodes() {
        if skip.is_some_and(|m| m[i]) {
            continue;
        }
        let z: Vec<S> = spec.node_coords_exact(i);
        let margin = Finite(pairing_flat(&z)) + -h.value(i).clone();
        if worst.cmp_ext(&margin) == Ordering::Less {
            worst = margin;
            witness = Some(z);
        }
    }
    let holds = worst.cmp_ext(&Finite(tol.clone())) != Ordering::Greater;
    GateCheck {
        holds,
        worst_violation: worst,
        witness: if holds { None } else { witness },
    }
}

/// Joint result of the two gate inequalities on a grid function.
#[derive(Clone, Debug)]
pub struct GateReport<S> {
    pub h_ge_pi: GateCheck<S>,
    pub jh_ge_pi: GateCheck<S>,
    pub tol: S,
    /// The shape of the primal-block projection of the domain of `h`, as
    /// declared by the caller.  The structural condition behind the
    /// maximality conclusion (that this projection spans a closed subspace
    /// after recentering) is not decidable from samples, so it is recorded
    /// rather than checked.
    pub domain_condition_note: String,
    /// The J-transform of `h`, kept for reuse by extraction.
    pub jh: ConjugateResult<S>,
}

impl<S> GateReport<S> {
    pub fn passed(&self) -> bool {
        self.h_ge_pi.holds && self.jh_ge_pi.holds
    }
}

/// Runs both gate inequalities: `h >= pairing` at every node and
/// `Jh >= pairing` at every node off the saturation mask.
///
/// `h` must be proper and convex on its (block-swappable) grid; convexity
/// is screened by the midpoint test at the gate tolerance.  The domain
/// note is the caller's declaration of the primal-projection shape.
pub fn representability_gate<S: Scalar>(
    h: &GridFn<S>,
    tol: S,
    domain_condition_note: &str,
) -> Result<GateReport<S>> {
    h.require_proper("representability gate")?;
    h.spec().check_swappable()?;
    if let Some(v) = convexity_violation(h, tol.to_f64()) {
        return Err(Error::Precondition(format!(
            "gate input is not convex: midpoint gap {} at node {:?}",
            v.gap, v.node
        )));
    }
    let jh = j_transform_grid(h)?;
    let h_ge_pi = check_majorizes_pi_grid(h, None, &tol);
    let jh_ge_pi = check_majorizes_pi_grid(&jh.function, Some(&jh.mask), &tol);
    Ok(GateReport {
        h_ge_pi,
        jh_ge_pi,
        tol,
        domain_condition_note: domain_condition_note.to_string(),
        jh,
    })
}

// ---------------------------------------------------------------------------
// Extraction
// ---------------------------------------------------------------------------

/// How the per-node acceptance threshold for extraction is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtractionTol {
    /// `step * (1 + |Jh|)` at each node: the equality gap vanishes
    /// quadratically at smooth graph points but only linearly at kinks, so
    /// the default scales with the local value.
    Scaled,
    /// A fixed threshold, for callers that know the gap scale of their
    /// input (e.g. exact-data grids where true graph nodes have gap zero).
    Fixed(f64),
}

/// The extracted graph: grid nodes where the J-transform meets the duality
/// pairing within tolerance, off the saturation mask.
#[derive(Clone, Debug)]
pub struct ExtractionResult<S> {
    pub graph: FiniteOperator<S>,
    /// Flat node indices of the extracted nodes, ascending.
    pub node_indices: Vec<usize>,
    pub tol: ExtractionTol,
    /// Monotonicity of the extracted set, re-verified rather than assumed.
    pub monotonicity: MonotonicityReport<S>,
    /// Filled by callers that compare against a known reference graph.
    pub hausdorff_to_reference: Option<f64>,
}

/// Collects the nodes where `Jh - pairing <= tol`, refusing to run unless
/// the gate passed.  Saturated nodes are never extracted: their `Jh` value
/// is window-limited and equality there is not evidence.
///
/// Gap comparisons are done in `f64`; grids with exactly representable
/// data (dyadic coordinates and values) lose nothing.
pub fn extract_operator<S: Scalar>(
    h: &GridFn<S>,
    gate: &GateReport<S>,
    tol: ExtractionTol,
) -> Result<ExtractionResult<S>> {
    if !gate.passed() {
        return Err(Error::Precondition(
            "extraction refused: the representability gate did not pass".into(),
        ));
    }
    let spec = h.spec();
    let n = spec.check_swappable()?;
    let step = spec.max_step();

    let mut node_indices = Vec::new();
    let mut pairs = Vec::new();
    for i in 0..spec.num_nodes() {
        if gate.jh.mask[i] {
            continue;
        }
        let Finite(v) = gate.jh.function.value(i) else {
            continue;
        };
        let z = spec.node_coords(i);
        let vf = v.to_f64();
        let gap = vf - pairing_flat(&z);
        let thresh = match tol {
            ExtractionTol::Scaled => step * (1.0 + vf.abs()),
            ExtractionTol::Fixed(t) => t,
        };
        if gap <= thresh {
            node_indices.push(i);
            let ze: Vec<S> = spec.node_coords_exact(i);
            pairs.push(PrimalDualPoint::new(ze[..n].to_vec(), ze[n..].to_vec())?);
        }
    }
    if pairs.is_empty() {
        return Err(Error::Precondition(
            "extraction found no equality nodes within tolerance".into(),
        ));
    }
    let graph = FiniteOperator::new(pairs)?;
    let monotonicity = graph.is_monotone();
    Ok(ExtractionResult {
        graph,
        node_indices,
        tol,
        monotonicity,
        hausdorff_to_reference: None,
    })
}

// ---------------------------------------------------------------------------
// Hausdorff distance in the max metric
// ---------------------------------------------------------------------------

fn dist_inf(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// `max` over `from` of the distance to the nearest point of `to`, in the
/// coordinate-wise max metric.  Empty `from` gives 0; empty `to` gives
/// `+inf` for nonempty `from`.
pub fn directed_hausdorff_inf(from: &[Vec<f64>], to: &[Vec<f64>]) -> f64 {
    from.iter()
        .map(|p| {
            to.iter()
                .map(|q| dist_inf(p, q))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance in the max metric.
pub fn hausdorff_inf(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    directed_hausdorff_inf(a, b).max(directed_hausdorff_inf(b, a))
}

// ---------------------------------------------------------------------------
// Boundedness reports
// ---------------------------------------------------------------------------

/// Link between a bounded block projection of `dom h` and equi-Lipschitz
/// slices of `h`, measured on a grid.
///
/// For the dual block: if every finite node has `||dual block|| <= L`,
/// slices `x -> h(x, x*)` can climb at most `L` per unit step, which is
/// the sample-level face of "the represented operator has range in the
/// `L`-ball".  The primal-block version mirrors it (bounded domain, dual
/// slices).  When the projection touches the sampling window's edge the
/// bound is not trustworthy and no Lipschitz claim is made.
#[derive(Clone, Debug)]
pub struct BoundednessReport {
    /// Block whose projection is being bounded (dual = range-style).
    pub block: Block,
    /// Max Euclidean norm over the block projection of the finite nodes.
    pub l: f64,
    /// The projection reaches the window edge: its boundedness is only a
    /// window artifact, so the equivalence is reported as unverifiable.
    pub touches_window_edge: bool,
    /// Worst per-axis finite-difference quotient of slices along the
    /// *other* block, over adjacent finite node pairs.
    pub worst_slice_quotient: Option<f64>,
    /// `Some(true/false)`: quotient bound `<= L + tol` verified/violated;
    /// `None`: not claimable (projection window-limited, or no finite
    /// adjacent pairs to measure).
    pub lipschitz_holds: Option<bool>,
    /// Midpoint of an adjacent pair attaining the worst quotient.
    pub witness: Option<Vec<f64>>,
    pub note: String,
}

fn block_boundedness_report(
    h: &GridFn<f64>,
    bound_block: Block,
    tol: f64,
) -> Result<BoundednessReport> {
    let spec = h.spec();
    let n = spec.check_swappable()?;
    h.require_proper("boundedness report")?;

    let baxes = bound_block.axes(n);
    let mut l_sq: f64 = 0.0;
    let mut touches = false;
    for i in h.finite_node_indices() {
        let idx = spec.flat_to_multi(i);
        let mut s = 0.0;
        for k in baxes.clone() {
            let c = spec.axes[k].coord(idx[k]);
            s += c * c;
            touches |= idx[k] == 0 || idx[k] == spec.axes[k].m - 1;
        }
        l_sq = l_sq.max(s);
    }
    let l = l_sq.sqrt();

    // Finite-difference quotients along the other block's axes.
    let slice_axes = bound_block.other().axes(n);
    let strides = spec.strides();
    let mut worst: Option<(f64, Vec<f64>)> = None;
    for i in h.finite_node_indices() {
        let Finite(a) = h.value(i) else { continue };
        let idx = spec.flat_to_multi(i);
        for k in slice_axes.clone() {
            if idx[k] + 1 >= spec.axes[k].m {
                continue;
            }
            let j = i + strides[k];
            let Finite(b) = h.value(j) else { continue };
            let q = (b - a).abs() / spec.axes[k].step();
            if worst.as_ref().is_none_or(|(w, _)| q > *w) {
                let mut mid = spec.node_coords(i);
                mid[k] += spec.axes[k].step() / 2.0;
                worst = Some((q, mid));
            }
        }
    }

    let (worst_slice_quotient, witness) = match worst {
        Some((q, w)) => (Some(q), Some(w)),
        None => (None, None),
    };
    let (lipschitz_holds, note) = if touches {
        (
            None,
            "block projection reaches the window edge; boundedness is \
             window-limited and the Lipschitz equivalence is not claimed"
                .to_string(),
        )
    } else if let Some(q) = worst_slice_quotient {
        (
            Some(q <= l + tol),
            format!("slice quotients measured against L = {l} with tol {tol}"),
        )
    } else {
        (
            None,
            "no adjacent finite pairs to measure slice quotients".to_string(),
        )
    };
    Ok(BoundednessReport {
        block: bound_block,
        l,
        touches_window_edge: touches,
        worst_slice_quotient,
        lipschitz_holds: if touches { None } else { lipschitz_holds },
        witness,
        note,
    })
}

/// Bounded-range flavour: bounds the dual-block projection of `dom h` and
/// checks primal slices against it.
pub fn bounded_range_report_grid(h: &GridFn<f64>, tol: f64) -> Result<BoundednessReport> {
    block_boundedness_report(h, Block::Dual, tol)
}

/// Bounded-domain flavour: bounds the primal-block projection and checks
/// dual slices.
pub fn bounded_domain_report_grid(h: &GridFn<f64>, tol: f64) -> Result<BoundednessReport> {
    block_boundedness_report(h, Block::Primal, tol)
}

/// Exact block slope bound for a max-affine function on a `2n`-dimensional
/// product space: the maximum *squared* Euclidean norm of the chosen block
/// of the piece slopes.  Returned squared so exact scalar types can
/// compare against `L^2` without square roots.
pub fn exact_block_slope_bound_sq<S: Scalar>(
    f: &MaxAffineFn<S>,
    block: Block,
) -> Result<ExtReal<S>> {
    let d = f.dim();
    if d % 2 != 0 {
        return Err(Error::InvalidInput(
            "block slope bound needs an even-dimensional product space".into(),
        ));
    }
    let axes = block.axes(d / 2);
    let mut best: ExtReal<S> = NegInf;
    for piece in &f.pieces {
        let mut s = S::zero();
        for k in axes.clone() {
            s = s + piece.slope[k].clone() * piece.slope[k].clone();
        }
        let s = Finite(s);
        if best.cmp_ext(&s) == Ordering::Less {
            best = s;
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// The bounded-range construction on Z x Z*
// ---------------------------------------------------------------------------

/// Builds the grid sampling of
/// `h((x,x*),(y*,y**)) = ||(x - y**, x* + y*)|| + (0 if ||(y*,y**)|| <= 1 else +inf)`
/// on a 4-axis block-swappable grid.
///
/// This `h` passes the gate, and its equality set is the graph of the
/// rotation `(x, x*) -> (-x*, x)` restricted to the closed unit ball — a
/// maximal monotone operator with full domain and bounded range.  The
/// infinite-dimensional version of this construction also fails a
/// dual-approximation property that has no finite-dimensional counterpart;
/// see the crate documentation on scope.
pub fn build_cw_h(spec: &GridSpec) -> Result<GridFn<f64>> {
    let n = spec.check_swappable()?;
    if n != 2 {
        return Err(Error::UnsupportedDimension {
            operation: "bounded-range construction".into(),
            dim: n,
            max: 2,
        });
    }
    Ok(GridFn::from_fn(spec.clone(), |c| {
        let (x, xs, ys, yss) = (c[0], c[1], c[2], c[3]);
        if ys * ys + yss * yss > 1.0 {
            PosInf
        } else {
            Finite(((x - yss).powi(2) + (xs + ys).powi(2)).sqrt())
        }
    }))
}

/// Dense sampling of the reference graph for [`build_cw_h`]:
/// `{((x,x*), (-x*, x)) : x^2 + x*^2 <= 1}` on a sub-grid of the given
/// spacing.  Used as the comparison set for Hausdorff distances.
pub fn cw_reference_graph(spacing: f64) -> Vec<Vec<f64>> {
    let steps = (1.0 / spacing).ceil() as i64;
    let mut pts = Vec::new();
    for i in -steps..=steps {
        for j in -steps..=steps {
            let (x, xs) = (i as f64 * spacing, j as f64 * spacing);
            if x * x + xs * xs <= 1.0 {
                pts.push(vec![x, xs, -xs, x]);
            }
        }
    }
    pts
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

/// Which primal fibers the pipeline requires extraction to populate (the
/// finite-grid surrogate of "the operator's domain is the whole space").
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FiberScope {
    /// Every primal fiber of the grid.
    All,
    /// Only fibers whose primal node has Euclidean norm at most `radius`
    /// (e.g. the domain ball of a reference operator).
    WithinNorm { radius: f64 },
}

/// End-to-end result: gate, extraction, and the three sample-level
/// conclusions of the bounded-range theorem.
#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub gate: GateReport<f64>,
    /// Max dual-block norm over the finite nodes of `h` (the range bound).
    pub p2_bound: f64,
    /// `None` when the gate failed and the pipeline aborted.
    pub extraction: Option<ExtractionResult<f64>>,
    /// Extracted dual blocks stay within the range bound (squared-norm
    /// comparison, exact on dyadic data).
    pub range_within_bound: Option<bool>,
    pub fibers_total: usize,
    pub fibers_required: usize,
    pub fibers_populated: Option<usize>,
    pub monotone: Option<bool>,
    /// Reminder that every conclusion is observed within the sampling
    /// window only.
    pub window_note: String,
}

impl PipelineReport {
    /// All assertions made it through: gate, range bound, fiber coverage,
    /// monotonicity.
    pub fn all_hold(&self) -> bool {
        self.gate.passed()
            && self.range_within_bound == Some(true)
            && self.fibers_populated == Some(self.fibers_required)
            && self.monotone == Some(true)
    }
}

/// Runs gate → extraction → bounded-range conclusions.
///
/// Refuses (precondition error) when the dual-block projection of the
/// finite nodes reaches the window edge: the range bound would then be an
/// artifact of truncation, and the main theorem's hypothesis is not
/// witnessed.  A failed gate aborts the pipeline with the gate's witness
/// preserved in the report; extraction and the downstream assertions are
/// left unfilled.
pub fn main_pipeline(
    h: &GridFn<f64>,
    gate_tol: f64,
    extraction_tol: ExtractionTol,
    fiber_scope: FiberScope,
    domain_condition_note: &str,
) -> Result<PipelineReport> {
    let spec = h.spec();
    let n = spec.check_swappable()?;
    let range_report = bounded_range_report_grid(h, gate_tol)?;
    if range_report.touches_window_edge {
        return Err(Error::Precondition(
            "pipeline refused: the dual-block projection of dom h reaches \
             the window edge, so its boundedness cannot be witnessed"
                .into(),
        ));
    }
    let p2_bound = range_report.l;

    let window_note = "all conclusions are window-limited: observed on the \
                       sampled grid only"
        .to_string();
    let gate = representability_gate(h, gate_tol, domain_condition_note)?;
    if !gate.passed() {
        let fibers_total = spec.axes[..n].iter().map(|a| a.m).product();
        return Ok(PipelineReport {
            gate,
            p2_bound,
            extraction: None,
            range_within_bound: None,
            fibers_total,
            fibers_required: 0,
            fibers_populated: None,
            monotone: None,
            window_note,
        });
    }

    let extraction = extract_operator(h, &gate, extraction_tol)?;

    // Range bound: squared-norm comparison against the measured bound.
    let bound_sq = p2_bound * p2_bound;
    let range_ok = extraction.graph.pairs.iter().all(|p| {
        p.xstar.iter().map(|v| v * v).sum::<f64>() <= bound_sq
    });

    // Fiber coverage over the primal block.
    let primal_axes: Vec<usize> = (0..n).collect();
    let in_scope = |coords: &[f64]| match fiber_scope {
        FiberScope::All => true,
        FiberScope::WithinNorm { radius } => {
            coords.iter().map(|c| c * c).sum::<f64>() <= radius * radius
        }
    };
    let mut required = 0usize;
    let fibers_total: usize = spec.axes[..n].iter().map(|a| a.m).product();
    let mut fiber_idx = vec![0usize; n];
    loop {
        let coords: Vec<f64> = fiber_idx
            .iter()
            .enumerate()
            .map(|(k, &i)| spec.axes[k].coord(i))
            .collect();
        if in_scope(&coords) {
            required += 1;
        }
        let mut done = true;
        for k in (0..n).rev() {
            fiber_idx[k] += 1;
            if fiber_idx[k] < spec.axes[k].m {
                done = false;
                break;
            }
            fiber_idx[k] = 0;
        }
        if done {
            break;
        }
    }
    let extracted_set: std::collections::HashSet<usize> =
        extraction.node_indices.iter().copied().collect();
    let populated = h
        .project_fibers(&primal_axes, |i, _| extracted_set.contains(&i))
        .into_iter()
        .filter(|c| in_scope(c))
        .count();

    let monotone = extraction.monotonicity.monotone;
    Ok(PipelineReport {
        gate,
        p2_bound,
        extraction: Some(extraction),
        range_within_bound: Some(range_ok),
        fibers_total,
        fibers_required: required,
        fibers_populated: Some(populated),
        monotone: Some(monotone),
        window_note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxaffine::AffinePiece;

    fn young_grid(m: usize) -> GridFn<f64> {
        let spec = GridSpec::cube(-2.0, 2.0, m, 2).unwrap();
        GridFn::from_fn(spec, |z| Finite(0.5 * z[0] * z[0] + 0.5 * z[1] * z[1]))
    }

    fn sign_band_grid(m: usize) -> GridFn<f64> {
        let spec = GridSpec::cube(-2.0, 2.0, m, 2).unwrap();
        GridFn::from_fn(spec, |z| {
            if z[1].abs() <= 1.0 {
                Finite(z[0].abs())
            } else {
                PosInf
            }
        })
    }

    #[test]
    fn zero_function_fails_majorization() {
        let spec = GridSpec::cube(-1.0, 1.0, 9, 2).unwrap();
        let h: GridFn<f64> = GridFn::from_fn(spec, |_| Finite(0.0));
        let check = check_majorizes_pi_grid(&h, None, &0.0);
        assert!(!check.holds);
        assert_eq!(check.worst_violation, Finite(1.0));
        let w = check.witness.unwrap();
        assert_eq!(w[0] * w[1], 1.0);
    }

    #[test]
    fn young_gate_holds_and_diagonal_extracts() {
        let h = young_grid(17);
        let gate = representability_gate(&h, 0.0, "full plane").unwrap();
        assert!(gate.passed());
        // Gap = (x - x*)^2 / 2, so anything below the off-diagonal floor
        // of step^2 / 2 extracts the diagonal alone.  The corner nodes
        // (+-2, +-2) are saturated (their transform maximiser is the
        // window corner), so the trusted diagonal stops short of them.
        let step = 0.25;
        let ex = extract_operator(&h, &gate, ExtractionTol::Fixed(step * step / 4.0)).unwrap();
        assert_eq!(ex.graph.pairs.len(), 15);
        for p in &ex.graph.pairs {
            assert_eq!(p.x, p.xstar);
            assert!(p.x[0].abs() < 2.0);
        }
        assert!(ex.monotonicity.monotone);
    }

    #[test]
    fn sign_band_is_its_own_transform_and_extracts_the_graph() {
        let h = sign_band_grid(17);
        let gate = representability_gate(&h, 0.0, "full line").unwrap();
        assert!(gate.passed(), "gate: {:?} / {:?}", gate.h_ge_pi.holds, gate.jh_ge_pi.holds);
        // Off the mask the transform reproduces h exactly (dyadic data).
        for i in gate.jh.trusted_nodes().collect::<Vec<_>>() {
            assert_eq!(gate.jh.function.value(i), h.value(i), "node {i}");
        }
        let ex = extract_operator(&h, &gate, ExtractionTol::Fixed(1e-9)).unwrap();
        // x > 0 pairs with +1, x < 0 with -1, and 0 with all of [-1, 1]:
        // 8 + 8 + 9 nodes.
        assert_eq!(ex.graph.pairs.len(), 25);
        for p in &ex.graph.pairs {
            let (x, xs) = (p.x[0], p.xstar[0]);
            assert!(xs.abs() <= 1.0);
            if x != 0.0 {
                assert_eq!(xs, x.signum());
            }
        }
        assert!(ex.monotonicity.monotone);
    }

    #[test]
    fn point_indicator_fails_transform_majorization() {
        // delta at (0, 1): Jh(x, x*) = x, which drops below the pairing.
        let spec = GridSpec::cube(-2.0, 2.0, 17, 2).unwrap();
        let h: GridFn<f64> = GridFn::from_fn(spec, |z| {
            if z[0] == 0.0 && z[1] == 1.0 {
                Finite(0.0)
            } else {
                PosInf
            }
        });
        let gate = representability_gate(&h, 0.0, "single point").unwrap();
        assert!(gate.h_ge_pi.holds);
        assert!(!gate.jh_ge_pi.holds);
        // worst of x*x - x over the window is at (-2, -2).
        assert_eq!(gate.jh_ge_pi.worst_violation, Finite(6.0));
        assert!(gate.jh_ge_pi.witness.is_some());
        // And extraction refuses to run off a failed gate.
        assert!(matches!(
            extract_operator(&h, &gate, ExtractionTol::Scaled),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn gate_rejects_nonconvex_input() {
        let spec = GridSpec::cube(-1.0, 1.0, 9, 2).unwrap();
        let h: GridFn<f64> = GridFn::from_fn(spec, |z| Finite(-z[0] * z[0]));
        assert!(matches!(
            representability_gate(&h, 1e-9, "n/a"),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn cw_values_are_pinned() {
        let spec = GridSpec::cube(-2.0, 2.0, 9, 4).unwrap();
        let h = build_cw_h(&spec).unwrap();
        let at = |c: &[f64]| h.value(spec.find_node(c, 1e-12).unwrap()).clone();
        assert_eq!(at(&[0.0, 0.0, 0.0, 0.0]), Finite(0.0));
        assert_eq!(at(&[1.0, 0.0, 0.0, 1.0]), Finite(0.0));
        assert_eq!(at(&[0.0, 0.0, 2.0, 0.0]), PosInf);
        // A non-graph ball point pays the full norm distance.
        assert_eq!(at(&[1.0, 0.0, 0.0, 0.0]), Finite(1.0));
    }

    #[test]
    fn cw_extraction_recovers_the_rotation_within_resolution() {
        let spec = GridSpec::cube(-2.0, 2.0, 17, 4).unwrap();
        let h = build_cw_h(&spec).unwrap();
        let gate = representability_gate(&h, 1e-6, "full product plane").unwrap();
        assert!(gate.passed());
        let step = spec.max_step();
        let ex = extract_operator(&h, &gate, ExtractionTol::Fixed(step / 16.0)).unwrap();

        // The discrete equality set is larger than the rotation lattice:
        // where no ball node aligns with the maximising dual direction the
        // discrete sup can meet the pairing exactly (worst at the window
        // corners).  It is still a monotone set with range in the ball,
        // and near the reference ball it hugs the rotation graph.
        assert!(ex.monotonicity.monotone);
        let mut rotation_nodes = 0usize;
        let mut scoped: Vec<Vec<f64>> = Vec::new();
        for p in &ex.graph.pairs {
            let (x, xs) = (p.x[0], p.x[1]);
            assert!(
                p.xstar[0].powi(2) + p.xstar[1].powi(2) <= 1.0,
                "range outside the ball: {p:?}"
            );
            if p.xstar == vec![-xs, x] && x * x + xs * xs <= 1.0 {
                rotation_nodes += 1;
            }
            if x * x + xs * xs <= 1.0 {
                scoped.push(vec![x, xs, p.xstar[0], p.xstar[1]]);
            }
        }
        // Every lattice z in the ball contributes its rotation pair ...
        let mut expected = 0;
        for i in 0..17 {
            for j in 0..17 {
                let (x, xs) = (-2.0 + 0.25 * i as f64, -2.0 + 0.25 * j as f64);
                if x * x + xs * xs <= 1.0 {
                    expected += 1;
                }
            }
        }
        assert_eq!(rotation_nodes, expected);
        // ... and on ball fibers the extraction stays within one cell of
        // the reference graph.
        let reference = cw_reference_graph(1.0 / 64.0);
        let d = directed_hausdorff_inf(&scoped, &reference);
        assert!(d <= step + 1e-9, "scoped extraction strays {d} from the graph");
    }

    #[test]
    fn cw_pipeline_holds_on_ball_fibers() {
        let spec = GridSpec::cube(-2.0, 2.0, 9, 4).unwrap();
        let h = build_cw_h(&spec).unwrap();
        let report = main_pipeline(
            &h,
            1e-6,
            ExtractionTol::Fixed(spec.max_step() / 16.0),
            FiberScope::WithinNorm { radius: 1.0 },
            "full product plane",
        )
        .unwrap();
        assert!(report.all_hold(), "{report:?}");
        assert_eq!(report.p2_bound, 1.0);
        assert_eq!(report.fibers_required, 13);
        assert_eq!(report.fibers_populated, Some(13));
    }

    #[test]
    fn pipeline_refuses_unbounded_dual_projection() {
        let h = young_grid(9);
        assert!(matches!(
            main_pipeline(&h, 0.0, ExtractionTol::Scaled, FiberScope::All, "full plane"),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn pipeline_band_populates_every_fiber() {
        let h = sign_band_grid(17);
        let report = main_pipeline(
            &h,
            0.0,
            ExtractionTol::Fixed(1e-9),
            FiberScope::All,
            "full line",
        )
        .unwrap();
        assert!(report.all_hold(), "{report:?}");
        assert_eq!(report.p2_bound, 1.0);
        assert_eq!(report.fibers_populated, Some(17));
    }

    #[test]
    fn bounded_range_report_flags_window_limited_projections() {
        let young = young_grid(9);
        let r = bounded_range_report_grid(&young, 1e-9).unwrap();
        assert!(r.touches_window_edge);
        assert_eq!(r.lipschitz_holds, None);

        let band = sign_band_grid(17);
        let r = bounded_range_report_grid(&band, 1e-9).unwrap();
        assert!(!r.touches_window_edge);
        assert_eq!(r.l, 1.0);
        assert!(r.worst_slice_quotient.unwrap() <= 1.0 + 1e-9);
        assert_eq!(r.lipschitz_holds, Some(true));
    }

    #[test]
    fn bounded_domain_report_mirrors_blocks() {
        // Indicator band in the primal block: domain [-1,1], dual slices
        // have slope at most 1.
        let spec = GridSpec::cube(-2.0, 2.0, 17, 2).unwrap();
        let h: GridFn<f64> = GridFn::from_fn(spec, |z| {
            if z[0].abs() <= 1.0 {
                Finite(z[1].abs())
            } else {
                PosInf
            }
        });
        let r = bounded_domain_report_grid(&h, 1e-9).unwrap();
        assert_eq!(r.block, Block::Primal);
        assert!(!r.touches_window_edge);
        assert_eq!(r.l, 1.0);
        assert_eq!(r.lipschitz_holds, Some(true));
    }

    #[test]
    fn exact_slope_bound_reads_off_the_block() {
        use crate::Exact;
        let q = |n: i64| Exact::from_int(n);
        let pieces = vec![
            AffinePiece { slope: vec![q(1), q(2)], offset: q(0) },
            AffinePiece { slope: vec![q(-3), q(1)], offset: q(5) },
        ];
        let f = MaxAffineFn::new(2, pieces, None).unwrap();
        assert_eq!(
            exact_block_slope_bound_sq(&f, Block::Primal).unwrap(),
            Finite(q(9))
        );
        assert_eq!(
            exact_block_slope_bound_sq(&f, Block::Dual).unwrap(),
            Finite(q(4))
        );
    }

    #[test]
    fn hausdorff_inf_basics() {
        let a = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
        let b = vec![vec![0.0, 0.25]];
        assert_eq!(directed_hausdorff_inf(&b, &a), 0.25);
        assert_eq!(directed_hausdorff_inf(&a, &b), 1.0);
        assert_eq!(hausdorff_inf(&a, &b), 1.0);
    }

    #[test]
    fn reference_graph_is_the_rotation() {
        let pts = cw_reference_graph(0.5);
        assert!(pts.contains(&vec![1.0, 0.0, 0.0, 1.0]));
        for p in &pts {
            assert!(p[0] * p[0] + p[1] * p[1] <= 1.0 + 1e-12);
            assert_eq!(p[2], -p[1]);
            assert_eq!(p[3], p[0]);
        }
    }
}
