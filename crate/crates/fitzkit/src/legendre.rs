//! Discrete Legendre transforms, exact conjugation of piecewise-linear
//! forms, and the J-transform (conjugate-then-swap on product spaces).
//!
//! # Grid transforms and the saturation mask
//!
//! The conjugate of a grid function is the conjugate of the *restricted*
//! function (the max runs over nodes), and is therefore exact as such.  It
//! approximates the conjugate of the underlying analytic function only
//! where the discrete maximum does not leak off the sampled window; every
//! transform returns a parallel boolean *saturation mask*, set at a dual
//! node when the supremum is attained **only** on the window edge — such a
//! value would keep growing if the window did, so it is untrusted.  A value
//! also attained strictly inside stays trusted even if the edge ties it
//! (common at kink slopes).  When transforms chain (J-transform,
//! biconjugate), taint propagates: an output is trusted only if its value
//! is attained through an interior, untainted input node.
//!
//! Reported discrete argmaxes break ties toward the smaller node index,
//! everywhere — brute force and fast path alike — for reproducibility.
//!
//! # Fast path
//!
//! The multi-axis transform factors into one-dimensional transforms applied
//! axis by axis.  Each 1-D pass builds the upper envelope of the lines
//! `s -> coord * s + w` (slopes are node coordinates, already sorted and
//! distinct) and sweeps the sorted dual nodes with a pointer that only moves
//! forward, which is linear in nodes plus queries.  The quadratic
//! [`conjugate_bruteforce`] is retained as the independent oracle.

use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Finite, NegInf};
use crate::generator::{Generator, GeneratorFn};
use crate::grid::{GridFn, GridSpec};
use crate::maxaffine::{AffinePiece, MaxAffineFn};
use crate::point::swap_blocks;
use crate::scalar::{dot, Scalar};

/// A grid transform result: the transformed values plus the saturation mask
/// (`true` = the supremum for this node is attained only on the sampling
/// boundary or through tainted inputs, so the value is window-limited).
#[derive(Clone, Debug)]
pub struct ConjugateResult<S> {
    pub function: GridFn<S>,
    pub mask: Vec<bool>,
}

impl<S: Scalar> ConjugateResult<S> {
    /// Indices of nodes that are finite and off the saturation mask — the
    /// region where the transform is trusted as an approximation of the
    /// analytic conjugate.
    pub fn trusted_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.function
            .values()
            .iter()
            .enumerate()
            .filter(|(i, v)| v.is_finite() && !self.mask[*i])
            .map(|(i, _)| i)
    }
}

// ---------------------------------------------------------------------------
// 1-D kernel
// ---------------------------------------------------------------------------

/// Output of one 1-D sup pass at a single query slope.
struct SupHit<S> {
    value: ExtReal<S>,
    /// Original axis index of the chosen maximiser (`None` for an empty fiber).
    argmax: Option<usize>,
    /// Whether some line flagged clean by the caller attains the value.
    clean: bool,
}

/// Upper envelope of the finite lines `s -> coords[i] * s + w[i]`, as
/// positions into `lines`.  With stack `[.., p, q]` and candidate `r`, `q`
/// is dominated when the p-r crossing is at or left of the p-q crossing:
///   `(w_p - w_r)(c_q - c_p) <= (w_p - w_q)(c_r - c_p)`.
/// Dropping on equality never changes the pointwise max, and keeps the
/// first maximiser at a triple point on the stack.
fn upper_envelope<S: Scalar>(lines: &[(usize, &S, &S)]) -> Vec<usize> {
    let mut env: Vec<usize> = Vec::with_capacity(lines.len());
    for r in 0..lines.len() {
        while env.len() >= 2 {
            let p = &lines[env[env.len() - 2]];
            let q = &lines[env[env.len() - 1]];
            let n = &lines[r];
            let lhs = (p.2.clone() - n.2.clone()) * (q.1.clone() - p.1.clone());
            let rhs = (p.2.clone() - q.2.clone()) * (n.1.clone() - p.1.clone());
            if lhs <= rhs {
                env.pop();
            } else {
                break;
            }
        }
        env.push(r);
    }
    env
}

/// Computes `sup_i (coords[i] * s + w[i])` for every `s` in `slopes`
/// (nondecreasing), skipping `-inf` intercepts.  `coords` must be strictly
/// increasing.  First maximiser wins on ties.
///
/// `clean[i]` marks lines whose attainment certifies the output as trusted
/// (callers pass "interior and untainted"); per query the hit records
/// whether any clean line reaches the max, via a second envelope restricted
/// to the clean lines.  Over floats a clean line that ties the max only
/// analytically can be missed by rounding — the mask errs conservative.
fn axis_sup<S: Scalar>(
    coords: &[S],
    w: &[ExtReal<S>],
    clean: &[bool],
    slopes: &[S],
) -> Vec<SupHit<S>> {
    debug_assert_eq!(coords.len(), w.len());
    debug_assert_eq!(coords.len(), clean.len());
    // Gather finite lines in index order; coords strictly increase.
    let lines: Vec<(usize, &S, &S)> = w
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.finite().map(|f| (i, &coords[i], f)))
        .collect();
    if lines.is_empty() {
        return slopes
            .iter()
            .map(|_| SupHit {
                value: NegInf,
                argmax: None,
                clean: false,
            })
            .collect();
    }
    let clean_lines: Vec<(usize, &S, &S)> = lines
        .iter()
        .filter(|(i, _, _)| clean[*i])
        .cloned()
        .collect();

    let env = upper_envelope(&lines);
    let cenv = upper_envelope(&clean_lines);

    // Forward sweep over sorted query slopes.  Values along an envelope at
    // a fixed slope are unimodal; advancing on strict improvement parks the
    // pointer at the first (smallest-coordinate, hence smallest-index)
    // maximiser.
    let eval = |ls: &[(usize, &S, &S)], e: usize, s: &S| -> S {
        let (_, c, wv) = &ls[e];
        (*c).clone() * s.clone() + (*wv).clone()
    };
    let mut out = Vec::with_capacity(slopes.len());
    let mut p = 0usize;
    let mut cp = 0usize;
    for s in slopes {
        while p + 1 < env.len() && eval(&lines, env[p + 1], s) > eval(&lines, env[p], s) {
            p += 1;
        }
        let value = eval(&lines, env[p], s);
        let (idx, _, _) = lines[env[p]];
        let clean_attains = if cenv.is_empty() {
            false
        } else {
            while cp + 1 < cenv.len()
                && eval(&clean_lines, cenv[cp + 1], s) > eval(&clean_lines, cenv[cp], s)
            {
                cp += 1;
            }
            eval(&clean_lines, cenv[cp], s) == value
        };
        out.push(SupHit {
            value: Finite(value),
            argmax: Some(idx),
            clean: clean_attains,
        });
    }
    out
}

/// Linear-time discrete Legendre transform in one dimension:
/// `f*(s) = max_i (s * x_i - f(x_i))` for each query slope.
///
/// `samples` are `(coordinate, value)` pairs with strictly increasing
/// coordinates; `slopes` must be nondecreasing.  Matches
/// [`conjugate_bruteforce`] restricted to one axis, in linear rather than
/// quadratic time.
pub fn llt_1d<S: Scalar>(slopes: &[S], samples: &[(S, ExtReal<S>)]) -> Result<Vec<ExtReal<S>>> {
    for win in samples.windows(2) {
        if win[0].0 >= win[1].0 {
            return Err(Error::InvalidInput(
                "sample coordinates must be strictly increasing".into(),
            ));
        }
    }
    for win in slopes.windows(2) {
        if win[0] > win[1] {
            return Err(Error::InvalidInput("slopes must be sorted".into()));
        }
    }
    if !samples.iter().any(|(_, v)| v.is_finite()) {
        return Err(Error::Improper(
            "transform of a nowhere-finite sample set".into(),
        ));
    }
    let coords: Vec<S> = samples.iter().map(|(c, _)| c.clone()).collect();
    // sup (s x - f) = sup (x s + w) with w = -f.
    let w: Vec<ExtReal<S>> = samples.iter().map(|(_, v)| -v.clone()).collect();
    let clean = vec![false; coords.len()]; // values only; no mask reported
    Ok(axis_sup(&coords, &w, &clean, slopes)
        .into_iter()
        .map(|h| h.value)
        .collect())
}

// ---------------------------------------------------------------------------
// Multi-axis transforms
// ---------------------------------------------------------------------------

fn strides_of(shape: &[usize]) -> Vec<usize> {
    let d = shape.len();
    let mut s = vec![1usize; d];
    for k in (0..d.saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}

fn exact_coord<S: Scalar>(c: f64) -> S {
    S::from_f64_exact(c).expect("grid coordinates are finite")
}

/// The staged sup-transform `g(s) = max_z (<s, z> - f(z))`, axis by axis.
///
/// `input_mask` taints nodes of `f` (used when chaining transforms); an
/// output node is trusted only when its sup is attained by a chain of
/// interior, untainted nodes, which composes stage by stage.
fn sup_transform<S: Scalar>(
    f: &GridFn<S>,
    dual: &GridSpec,
    input_mask: Option<&[bool]>,
) -> Result<ConjugateResult<S>> {
    let spec = f.spec();
    let d = spec.dim();
    if dual.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: dual.dim(),
        });
    }
    f.require_proper("transform input")?;

    let mut shape: Vec<usize> = spec.axes.iter().map(|a| a.m).collect();
    let mut vals: Vec<ExtReal<S>> = f.values().iter().map(|v| -v.clone()).collect();
    let mut sat: Vec<bool> = match input_mask {
        Some(m) => {
            if m.len() != vals.len() {
                return Err(Error::InvalidInput("input mask length mismatch".into()));
            }
            m.to_vec()
        }
        None => vec![false; vals.len()],
    };

    for k in 0..d {
        let m_in = shape[k];
        let m_out = dual.axes[k].m;
        let coords: Vec<S> = (0..m_in).map(|i| exact_coord(spec.axes[k].coord(i))).collect();
        let slopes: Vec<S> = (0..m_out).map(|j| exact_coord(dual.axes[k].coord(j))).collect();

        let strides_in = strides_of(&shape);
        let mut out_shape = shape.clone();
        out_shape[k] = m_out;
        let strides_out = strides_of(&out_shape);
        let out_len: usize = out_shape.iter().product();
        let mut out_vals: Vec<ExtReal<S>> = vec![NegInf; out_len];
        let mut out_sat = vec![false; out_len];

        // Odometer over the non-k axes.
        let other: Vec<usize> = (0..d).filter(|&j| j != k).collect();
        let mut idx = vec![0usize; d];
        let mut fiber_w: Vec<ExtReal<S>> = Vec::with_capacity(m_in);
        let mut fiber_clean: Vec<bool> = Vec::with_capacity(m_in);
        loop {
            let base_in: usize = other.iter().map(|&j| idx[j] * strides_in[j]).sum();
            let base_out: usize = other.iter().map(|&j| idx[j] * strides_out[j]).sum();

            fiber_w.clear();
            fiber_clean.clear();
            for i in 0..m_in {
                fiber_w.push(vals[base_in + i * strides_in[k]].clone());
                // A line certifies its output only if it is an interior
                // node and its own value is trusted.
                fiber_clean.push(i != 0 && i != m_in - 1 && !sat[base_in + i * strides_in[k]]);
            }
            let hits = axis_sup(&coords, &fiber_w, &fiber_clean, &slopes);
            for (j, hit) in hits.into_iter().enumerate() {
                let o = base_out + j * strides_out[k];
                match hit.argmax {
                    Some(_) => {
                        out_sat[o] = !hit.clean;
                        out_vals[o] = hit.value;
                    }
                    None => {
                        out_vals[o] = NegInf;
                        out_sat[o] = false;
                    }
                }
            }

            // Advance the odometer.
            let mut done = true;
            for &j in other.iter().rev() {
                idx[j] += 1;
                if idx[j] < shape[j] {
                    done = false;
                    break;
                }
                idx[j] = 0;
            }
            if done {
                break;
            }
        }

        shape = out_shape;
        vals = out_vals;
        sat = out_sat;
    }

    let function = GridFn::new(dual.clone(), vals)?;
    debug_assert!(
        function.values().iter().all(|v| v.is_finite()),
        "conjugate of a proper grid function is finite everywhere"
    );
    Ok(ConjugateResult {
        function,
        mask: sat,
    })
}

/// Quadratic-time reference conjugate: for every dual node, scan every
/// primal node.  A node is masked when no fully-interior primal node
/// attains the max, i.e. the value leans entirely on the window edge.
pub fn conjugate_bruteforce<S: Scalar>(
    f: &GridFn<S>,
    dual: &GridSpec,
) -> Result<ConjugateResult<S>> {
    let spec = f.spec();
    if dual.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: dual.dim(),
        });
    }
    f.require_proper("transform input")?;

    let interior: Vec<bool> = (0..spec.num_nodes())
        .map(|i| {
            spec.flat_to_multi(i)
                .iter()
                .zip(&spec.axes)
                .all(|(&k, a)| k != 0 && k != a.m - 1)
        })
        .collect();
    let primal_coords: Vec<Vec<S>> = (0..spec.num_nodes())
        .map(|i| spec.node_coords_exact(i))
        .collect();
    let finite: Vec<(usize, &Vec<S>, S)> = f
        .values()
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.finite().map(|fv| (i, &primal_coords[i], fv.clone())))
        .collect();

    let mut values = Vec::with_capacity(dual.num_nodes());
    let mut mask = Vec::with_capacity(dual.num_nodes());
    for j in 0..dual.num_nodes() {
        let s: Vec<S> = dual.node_coords_exact(j);
        let mut best: Option<S> = None;
        let mut interior_attains = false;
        for (i, z, fv) in &finite {
            let cand = dot(&s, z) - fv.clone();
            match &best {
                Some(b) if cand < *b => {}
                Some(b) if cand == *b => interior_attains |= interior[*i],
                _ => {
                    best = Some(cand);
                    interior_attains = interior[*i];
                }
            }
        }
        values.push(Finite(best.expect("proper input has a finite node")));
        mask.push(!interior_attains);
    }
    Ok(ConjugateResult {
        function: GridFn::new(dual.clone(), values)?,
        mask,
    })
}

/// Fast multi-axis conjugate: successive 1-D transforms.  Agrees with
/// [`conjugate_bruteforce`] on values (exactly over an exact scalar, to
/// rounding noise over floats).
pub fn conjugate_grid<S: Scalar>(f: &GridFn<S>, dual: &GridSpec) -> Result<ConjugateResult<S>> {
    sup_transform(f, dual, None)
}

/// J-transform on a grid: conjugate, then swap the primal and dual blocks,
/// landing back on the *same* grid spec.  Requires the spec to be swappable
/// (axis `i` and axis `n+i` identical).
pub fn j_transform_grid<S: Scalar>(f: &GridFn<S>) -> Result<ConjugateResult<S>> {
    j_transform_grid_masked(f, None)
}

/// [`j_transform_grid`] with taint propagation from an input mask.
pub fn j_transform_grid_masked<S: Scalar>(
    f: &GridFn<S>,
    input_mask: Option<&[bool]>,
) -> Result<ConjugateResult<S>> {
    let spec = f.spec();
    let n = spec.check_swappable()?;
    let conj = sup_transform(f, spec, input_mask)?;
    // Jh(x, x*) = h*(x*, x): read the conjugate at block-swapped indices.
    let d = spec.dim();
    let mut values = Vec::with_capacity(spec.num_nodes());
    let mut mask = Vec::with_capacity(spec.num_nodes());
    for flat in 0..spec.num_nodes() {
        let idx = spec.flat_to_multi(flat);
        let mut swapped = vec![0usize; d];
        for i in 0..n {
            swapped[i] = idx[n + i];
            swapped[n + i] = idx[i];
        }
        let src = spec.multi_to_flat(&swapped);
        values.push(conj.function.value(src).clone());
        mask.push(conj.mask[src]);
    }
    Ok(ConjugateResult {
        function: GridFn::new(spec.clone(), values)?,
        mask,
    })
}

/// Double conjugate back onto the original grid: the closed convex envelope
/// of the node data (within the window).  The intermediate dual window
/// defaults to the realizable slope range.
pub fn biconjugate<S: Scalar>(f: &GridFn<S>, dual: Option<&GridSpec>) -> Result<ConjugateResult<S>> {
    let natural;
    let dual = match dual {
        Some(d) => d,
        None => {
            natural = f.natural_dual_spec()?;
            &natural
        }
    };
    let c1 = sup_transform(f, dual, None)?;
    sup_transform(&c1.function, f.spec(), Some(&c1.mask))
}

// ---------------------------------------------------------------------------
// Exact forms
// ---------------------------------------------------------------------------

/// A piecewise-linear convex function in one of its two exact descriptions.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactFn<S> {
    MaxAffine(MaxAffineFn<S>),
    Generator(GeneratorFn<S>),
}

impl<S: Scalar> ExactFn<S> {
    pub fn dim(&self) -> usize {
        match self {
            ExactFn::MaxAffine(f) => f.dim(),
            ExactFn::Generator(f) => f.dim(),
        }
    }

    pub fn eval(&self, z: &[S]) -> Result<ExtReal<S>> {
        match self {
            ExactFn::MaxAffine(f) => f.eval(z),
            ExactFn::Generator(f) => f.eval(z),
        }
    }
}

/// Exact conjugation via epigraph duality: generators `(p, v)` and affine
/// pieces `slope p, offset -v` describe conjugate pairs.  Output is pruned
/// of non-contributing data (values are unchanged by pruning), so double
/// application returns the original up to that removal.
///
/// A domain-restricted max-affine function has no piecewise-linear conjugate
/// in general and is rejected; materialise it on a grid instead.
pub fn conjugate_exact<S: Scalar>(f: &ExactFn<S>) -> Result<ExactFn<S>> {
    match f {
        ExactFn::Generator(g) => {
            let pieces: Vec<AffinePiece<S>> = g
                .generators
                .iter()
                .map(|gen| AffinePiece {
                    slope: gen.point.clone(),
                    offset: -gen.value.clone(),
                })
                .collect();
            let f = MaxAffineFn::new(g.dim(), pieces, None)?;
            Ok(ExactFn::MaxAffine(f.pruned()))
        }
        ExactFn::MaxAffine(m) => {
            if m.domain.is_some() {
                return Err(Error::UnsupportedRepresentation(
                    "exact conjugate of a domain-restricted max-affine function \
                     (the conjugate is not piecewise linear); use a grid transform"
                        .into(),
                ));
            }
            let generators: Vec<Generator<S>> = m
                .pieces
                .iter()
                .map(|p| Generator {
                    point: p.slope.clone(),
                    value: -p.offset.clone(),
                })
                .collect();
            let g = GeneratorFn::new(m.dim(), generators)?;
            Ok(ExactFn::Generator(g.pruned()))
        }
    }
}

/// Exact J-transform: conjugate, then swap the primal and dual halves of
/// every slope/point vector.
pub fn j_transform_exact<S: Scalar>(f: &ExactFn<S>) -> Result<ExactFn<S>> {
    if f.dim() % 2 != 0 {
        return Err(Error::InvalidInput(
            "the J-transform needs a product-space function (even dimension)".into(),
        ));
    }
    match conjugate_exact(f)? {
        ExactFn::MaxAffine(m) => {
            let pieces = m
                .pieces
                .iter()
                .map(|p| AffinePiece {
                    slope: swap_blocks(&p.slope),
                    offset: p.offset.clone(),
                })
                .collect();
            Ok(ExactFn::MaxAffine(MaxAffineFn::new(m.dim(), pieces, None)?))
        }
        ExactFn::Generator(g) => {
            let generators = g
                .generators
                .iter()
                .map(|gen| Generator {
                    point: swap_blocks(&gen.point),
                    value: gen.value.clone(),
                })
                .collect();
            Ok(ExactFn::Generator(GeneratorFn::new(g.dim(), generators)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extreal::PosInf;
    use crate::grid::AxisSpec;

    fn grid_1d(lo: f64, hi: f64, m: usize) -> GridSpec {
        GridSpec::cube(lo, hi, m, 1).unwrap()
    }

    #[test]
    fn llt_single_sample_is_constant_zero() {
        let out = llt_1d(
            &[-3.0, 0.0, 5.0],
            &[(0.0, Finite(0.0))],
        )
        .unwrap();
        assert_eq!(out, vec![Finite(0.0), Finite(0.0), Finite(0.0)]);
    }

    #[test]
    fn llt_matches_bruteforce_on_half_square() {
        // Samples of x^2/2 on [-2, 2]; conjugate of x^2/2 is s^2/2, and the
        // discrete transforms must agree with each other to rounding.
        let spec = grid_1d(-2.0, 2.0, 41);
        let f: GridFn<f64> = GridFn::from_fn(spec.clone(), |z| Finite(0.5 * z[0] * z[0]));
        let slopes: Vec<f64> = (0..41).map(|i| spec.axes[0].coord(i)).collect();
        let samples: Vec<(f64, ExtReal<f64>)> = (0..41)
            .map(|i| (spec.axes[0].coord(i), f.value(i).clone()))
            .collect();
        let fast = llt_1d(&slopes, &samples).unwrap();
        let brute = conjugate_bruteforce(&f, &spec).unwrap();
        for (a, b) in fast.iter().zip(brute.function.values()) {
            let (Finite(x), Finite(y)) = (a, b) else { panic!() };
            assert!((x - y).abs() <= 1e-12, "{x} vs {y}");
        }
    }

    #[test]
    fn llt_rejects_unsorted_input() {
        assert!(llt_1d(&[0.0, -1.0], &[(0.0, Finite(0.0))]).is_err());
        assert!(llt_1d(&[0.0], &[(1.0, Finite(0.0)), (0.0, Finite(0.0))]).is_err());
    }

    #[test]
    fn conjugate_of_point_indicator_is_linear() {
        // delta_{0} on a grid: f*(s) = 0 for every s, never saturated (the
        // only maximiser is the interior node 0).
        let spec = grid_1d(-2.0, 2.0, 9);
        let f: GridFn<f64> = GridFn::from_fn(spec.clone(), |z| {
            if z[0] == 0.0 {
                Finite(0.0)
            } else {
                PosInf
            }
        });
        let c = conjugate_grid(&f, &spec).unwrap();
        for i in 0..9 {
            assert_eq!(c.function.value(i), &Finite(0.0));
            assert!(!c.mask[i]);
        }
    }

    #[test]
    fn saturation_marks_untrusted_slopes() {
        // f = |x| on [-2, 2]: analytically f*(s) is finite only on
        // [-1, 1]; beyond that the discrete maximiser runs into the window
        // edge and the mask must say so.
        let spec = grid_1d(-2.0, 2.0, 17);
        let f: GridFn<f64> = GridFn::from_fn(spec.clone(), |z| Finite(z[0].abs()));
        let dual = grid_1d(-2.0, 2.0, 17);
        let c = conjugate_grid(&f, &dual).unwrap();
        let brute = conjugate_bruteforce(&f, &dual).unwrap();
        for j in 0..17 {
            let s: f64 = dual.axes[0].coord(j);
            // At the kink slopes s = +-1 the max ties along a whole
            // half-axis; the interior attainment (at x = 0) keeps the
            // value trusted even though the window edge ties too.
            if s.abs() <= 1.0 {
                assert!(!c.mask[j], "s={s} should be trusted");
                let Finite(v) = c.function.value(j) else { panic!() };
                assert!(v.abs() <= 1e-12);
            } else {
                assert!(c.mask[j], "s={s} must be saturated");
            }
            assert_eq!(c.mask[j], brute.mask[j], "mask mismatch at s={s}");
        }
    }

    #[test]
    fn two_axis_grid_agrees_with_bruteforce() {
        let spec = GridSpec::cube(-1.5, 1.5, 13, 2).unwrap();
        let f: GridFn<f64> = GridFn::from_fn(spec.clone(), |z| {
            Finite(z[0] * z[0] + 0.5 * z[1] * z[1] + 0.25 * z[0] * z[1])
        });
        let dual = GridSpec::cube(-3.0, 3.0, 11, 2).unwrap();
        let fast = conjugate_grid(&f, &dual).unwrap();
        let brute = conjugate_bruteforce(&f, &dual).unwrap();
        for i in 0..dual.num_nodes() {
            let (Finite(a), Finite(b)) =
                (fast.function.value(i), brute.function.value(i))
            else {
                panic!()
            };
            assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn fenchel_young_on_grid_nodes() {
        let spec = grid_1d(-2.0, 2.0, 21);
        let f: GridFn<f64> = GridFn::from_fn(spec.clone(), |z| Finite((z[0] - 0.3).powi(2)));
        let dual = f.natural_dual_spec().unwrap();
        let c = conjugate_grid(&f, &dual).unwrap();
        for i in 0..spec.num_nodes() {
            let x = spec.axes[0].coord(i);
            let Finite(fx) = f.value(i) else { continue };
            for j in 0..dual.num_nodes() {
                let s = dual.axes[0].coord(j);
                let Finite(fs) = c.function.value(j) else { panic!() };
                assert!(fx + fs >= x * s - 1e-9);
            }
        }
    }

    #[test]
    fn biconjugate_fills_the_double_well() {
        // min(x^2, (x-2)^2) on [-1, 3]: the envelope bridges [0, 2] at 0.
        let spec = grid_1d(-1.0, 3.0, 41);
        let f: GridFn<f64> = GridFn::from_fn(spec.clone(), |z| {
            Finite((z[0] * z[0]).min((z[0] - 2.0) * (z[0] - 2.0)))
        });
        let bi = biconjugate(&f, None).unwrap();
        for i in 0..41 {
            let x = spec.axes[0].coord(i);
            let Finite(v) = bi.function.value(i) else { panic!() };
            if (0.0..=2.0).contains(&x) {
                assert!(v.abs() <= 1e-9, "bridge at x={x}: {v}");
            }
            // Everywhere: envelope <= data.
            let Finite(orig) = f.value(i) else { panic!() };
            assert!(*v <= orig + 1e-9);
        }
    }

    #[test]
    fn biconjugate_of_convex_data_is_identity_off_mask() {
        let spec = grid_1d(-2.0, 2.0, 33);
        let f: GridFn<f64> = GridFn::from_fn(spec.clone(), |z| Finite(z[0] * z[0]));
        let bi = biconjugate(&f, None).unwrap();
        for i in bi.trusted_nodes() {
            let (Finite(a), Finite(b)) = (f.value(i), bi.function.value(i)) else {
                panic!()
            };
            assert!((a - b).abs() <= 1e-9, "node {i}: {a} vs {b}");
        }
        // And the trusted region is most of the window.
        assert!(bi.trusted_nodes().count() >= 25);
    }

    #[test]
    fn j_transform_fixes_the_young_function() {
        // h(x, x*) = x^2/2 + x*^2/2 satisfies Jh = h (self-conjugate up to
        // the block swap).
        let spec = GridSpec::cube(-2.0, 2.0, 17, 2).unwrap();
        let h: GridFn<f64> = GridFn::from_fn(spec.clone(), |z| {
            Finite(0.5 * z[0] * z[0] + 0.5 * z[1] * z[1])
        });
        let jh = j_transform_grid(&h).unwrap();
        for i in jh.trusted_nodes() {
            let (Finite(a), Finite(b)) = (h.value(i), jh.function.value(i)) else {
                panic!()
            };
            assert!((a - b).abs() <= 1e-9);
        }
        assert!(jh.trusted_nodes().count() > 100);
    }

    #[test]
    fn j_transform_requires_swappable_specs() {
        let spec = GridSpec::new(vec![
            AxisSpec::new(-2.0, 2.0, 5).unwrap(),
            AxisSpec::new(-1.0, 1.0, 5).unwrap(),
        ])
        .unwrap();
        let h: GridFn<f64> = GridFn::from_fn(spec, |_| Finite(0.0));
        assert!(matches!(
            j_transform_grid(&h),
            Err(Error::NotSwappable(_))
        ));
    }

    #[test]
    fn exact_conjugate_roundtrip_on_identity_samples() {
        use num_rational::BigRational as Rat;
        let r = Rat::from_int;
        // sigma of T = {(0,0), (1,1)}: generators ((y,y*), <y,y*>).
        let sigma = GeneratorFn::new(
            2,
            vec![
                Generator { point: vec![r(0), r(0)], value: r(0) },
                Generator { point: vec![r(1), r(1)], value: r(1) },
            ],
        )
        .unwrap();
        let conj = conjugate_exact(&ExactFn::Generator(sigma.clone())).unwrap();
        let ExactFn::MaxAffine(a) = &conj else { panic!() };
        assert_eq!(a.pieces.len(), 2);
        // Round trip back to generators.
        let back = conjugate_exact(&conj).unwrap();
        let ExactFn::Generator(g) = &back else { panic!() };
        assert_eq!(g.generators.len(), 2);
        for probe in [
            vec![r(0), r(0)],
            vec![Rat::ratio(1, 2), Rat::ratio(1, 2)],
            vec![r(1), r(1)],
            vec![r(2), r(2)],
        ] {
            assert_eq!(sigma.eval(&probe).unwrap(), g.eval(&probe).unwrap());
        }
    }

    #[test]
    fn exact_conjugate_rejects_restricted_domains() {
        use crate::region::{NormBall, Region};
        use num_rational::BigRational as Rat;
        let f = MaxAffineFn::new(
            1,
            vec![AffinePiece { slope: vec![Rat::from_int(1)], offset: Rat::from_int(0) }],
            Some(Region::NormBall(
                NormBall::new(vec![Rat::from_int(0)], Rat::from_int(1)).unwrap(),
            )),
        )
        .unwrap();
        assert!(matches!(
            conjugate_exact(&ExactFn::MaxAffine(f)),
            Err(Error::UnsupportedRepresentation(_))
        ));
    }

    #[test]
    fn order_reversal_of_conjugation() {
        // f <= g pointwise implies g* <= f*.
        let spec = grid_1d(-2.0, 2.0, 21);
        let f: GridFn<f64> = GridFn::from_fn(spec.clone(), |z| Finite(z[0] * z[0]));
        let g: GridFn<f64> = GridFn::from_fn(spec.clone(), |z| Finite(z[0] * z[0] + 1.0));
        let dual = grid_1d(-4.0, 4.0, 21);
        let cf = conjugate_grid(&f, &dual).unwrap();
        let cg = conjugate_grid(&g, &dual).unwrap();
        for j in 0..21 {
            let (Finite(a), Finite(b)) = (cg.function.value(j), cf.function.value(j)) else {
                panic!()
            };
            assert!(a <= &(b + 1e-12));
        }
    }
}
