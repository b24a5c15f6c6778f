//! Uniform grids and grid-sampled extended-real functions.
//!
//! A grid function is data *at the nodes only* — no interpolation is ever
//! implied.  Node coordinates are IEEE doubles; the canonical coordinate of
//! node `i` on an axis is `lo + i * step` evaluated in `f64`, and the exact
//! layer lifts precisely those doubles (every finite double is a dyadic
//! rational), so the float and exact views of a grid always agree.
//!
//! Values are [`ExtReal`] with `+inf` as the "undefined here" sentinel.  A
//! proper grid function has at least one finite node and no `-inf` anywhere.
//!
//! Storage is row-major with the *first* axis slowest, matching the CSV dump
//! order used by the command-line tools.

use crate::error::{Error, Result};
use crate::extreal::{ExtReal, Finite, NegInf, PosInf};
use crate::scalar::Scalar;

/// Hard cap on total node count, guarding accidental huge allocations.
const MAX_NODES: usize = 1 << 26;

#[derive(Clone, Debug, PartialEq)]
pub struct AxisSpec {
    pub lo: f64,
    pub hi: f64,
    pub m: usize,
}

impl AxisSpec {
    pub fn new(lo: f64, hi: f64, m: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::InvalidInput(format!(
                "axis needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        if m < 2 {
            return Err(Error::InvalidInput(format!(
                "axis needs at least 2 nodes, got {m}"
            )));
        }
        Ok(Self { lo, hi, m })
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.m - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        debug_assert!(i < self.m);
        self.lo + i as f64 * self.step()
    }

    /// Index of the node nearest `c` if it matches within `tol`.
    pub fn find(&self, c: f64, tol: f64) -> Option<usize> {
        let i = ((c - self.lo) / self.step()).round();
        if i < 0.0 || i >= self.m as f64 {
            return None;
        }
        let i = i as usize;
        ((self.coord(i) - c).abs() <= tol).then_some(i)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub axes: Vec<AxisSpec>,
}

impl GridSpec {
    pub fn new(axes: Vec<AxisSpec>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidInput("grid needs at least one axis".into()));
        }
        let mut total: usize = 1;
        for a in &axes {
            total = total.saturating_mul(a.m);
        }
        if total > MAX_NODES {
            return Err(Error::InvalidInput(format!(
                "grid with {total} nodes exceeds the supported size"
            )));
        }
        Ok(Self { axes })
    }

    /// Convenience: the same `[lo, hi] x m` on every one of `dim` axes.
    pub fn cube(lo: f64, hi: f64, m: usize, dim: usize) -> Result<Self> {
        let axis = AxisSpec::new(lo, hi, m)?;
        Self::new(vec![axis; dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.axes.iter().map(|a| a.m).product()
    }

    /// Row-major strides, first axis slowest.
    pub fn strides(&self) -> Vec<usize> {
        let d = self.dim();
        let mut s = vec![1usize; d];
        for k in (0..d.saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.axes[k + 1].m;
        }
        s
    }

    pub fn flat_to_multi(&self, mut flat: usize) -> Vec<usize> {
        let strides = self.strides();
        let mut idx = vec![0usize; self.dim()];
        for (k, &st) in strides.iter().enumerate() {
            idx[k] = flat / st;
            flat %= st;
        }
        idx
    }

    pub fn multi_to_flat(&self, idx: &[usize]) -> usize {
        let strides = self.strides();
        idx.iter().zip(&strides).map(|(i, s)| i * s).sum()
    }

    pub fn node_coords(&self, flat: usize) -> Vec<f64> {
        self.flat_to_multi(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&i, a)| a.coord(i))
            .collect()
    }

    /// The same coordinates lifted exactly into `S`.
    pub fn node_coords_exact<S: Scalar>(&self, flat: usize) -> Vec<S> {
        self.node_coords(flat)
            .iter()
            .map(|&c| S::from_f64_exact(c).expect("grid coordinates are finite"))
            .collect()
    }

    /// Flat index of the node matching `coords` within `tol` per axis.
    pub fn find_node(&self, coords: &[f64], tol: f64) -> Option<usize> {
        if coords.len() != self.dim() {
            return None;
        }
        let mut idx = Vec::with_capacity(self.dim());
        for (a, &c) in self.axes.iter().zip(coords) {
            idx.push(a.find(c, tol)?);
        }
        Some(self.multi_to_flat(&idx))
    }

    /// Largest axis step — the resolution `delta` that tolerance defaults
    /// are expressed in.
    pub fn max_step(&self) -> f64 {
        self.axes
            .iter()
            .map(|a| a.step())
            .fold(0.0_f64, f64::max)
    }

    /// For product-space grids: checks that axis `i` and axis `n+i` carry
    /// identical specs, so the primal and dual blocks can trade places.
    pub fn check_swappable(&self) -> Result<usize> {
        let d = self.dim();
        if d % 2 != 0 {
            return Err(Error::NotSwappable(format!(
                "a product-space grid needs an even number of axes, got {d}"
            )));
        }
        let n = d / 2;
        for i in 0..n {
            if self.axes[i] != self.axes[n + i] {
                return Err(Error::NotSwappable(format!(
                    "axis {i} and axis {} differ; the J-transform needs the \
                     primal and dual blocks on shared specs",
                    n + i
                )));
            }
        }
        Ok(n)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridFn<S> {
    spec: GridSpec,
    values: Vec<ExtReal<S>>,
}

impl<S: Scalar> GridFn<S> {
    pub fn new(spec: GridSpec, values: Vec<ExtReal<S>>) -> Result<Self> {
        if values.len() != spec.num_nodes() {
            return Err(Error::InvalidInput(format!(
                "value count {} does not match the {}-node grid",
                values.len(),
                spec.num_nodes()
            )));
        }
        Ok(Self { spec, values })
    }

    /// Samples `f` at every node (coordinates in grid order).
    pub fn from_fn(spec: GridSpec, f: impl Fn(&[f64]) -> ExtReal<S>) -> Self {
        let values = (0..spec.num_nodes())
            .map(|i| f(&spec.node_coords(i)))
            .collect();
        Self { spec, values }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[ExtReal<S>] {
        &self.values
    }

    pub fn value(&self, flat: usize) -> &ExtReal<S> {
        &self.values[flat]
    }

    /// A proper function is finite somewhere and nowhere `-inf`.
    pub fn is_proper(&self) -> bool {
        self.values.iter().any(|v| v.is_finite())
            && !self.values.iter().any(|v| matches!(v, NegInf))
    }

    pub fn require_proper(&self, what: &str) -> Result<()> {
        if !self.values.iter().any(|v| v.is_finite()) {
            return Err(Error::Improper(format!("{what} is nowhere finite")));
        }
        if self.values.iter().any(|v| matches!(v, NegInf)) {
            return Err(Error::Improper(format!("{what} takes the value -inf")));
        }
        Ok(())
    }

    pub fn finite_node_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .map(|(i, _)| i)
    }

    /// Distinct coordinate tuples on the `keep` axes whose fiber contains at
    /// least one node accepted by `admit`.  Sorted lexicographically.
    pub fn project_fibers(
        &self,
        keep: &[usize],
        mut admit: impl FnMut(usize, &ExtReal<S>) -> bool,
    ) -> Vec<Vec<f64>> {
        let mut pts: Vec<Vec<f64>> = Vec::new();
        for (i, v) in self.values.iter().enumerate() {
            if admit(i, v) {
                let idx = self.spec.flat_to_multi(i);
                let coords: Vec<f64> = keep
                    .iter()
                    .map(|&k| self.spec.axes[k].coord(idx[k]))
                    .collect();
                pts.push(coords);
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
        pts.dedup();
        pts
    }

    /// Per-axis realizable slope ranges: for each axis, the extreme
    /// finite-difference slopes across adjacent finite nodes.  This is the
    /// default dual window for conjugation — the transform's maximisers then
    /// sit mostly in the interior, keeping the saturation mask clear.
    ///
    /// Degenerate axes (no adjacent finite pair, or a single realizable
    /// slope) are widened by one unit on each side.
    pub fn natural_dual_spec(&self) -> Result<GridSpec> {
        let d = self.spec.dim();
        let strides = self.spec.strides();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for (i, v) in self.values.iter().enumerate() {
            let Finite(a) = v else { continue };
            let idx = self.spec.flat_to_multi(i);
            for k in 0..d {
                if idx[k] + 1 < self.spec.axes[k].m {
                    if let Finite(b) = &self.values[i + strides[k]] {
                        let slope = (b.to_f64() - a.to_f64()) / self.spec.axes[k].step();
                        lo[k] = lo[k].min(slope);
                        hi[k] = hi[k].max(slope);
                    }
                }
            }
        }
        let mut axes = Vec::with_capacity(d);
        for k in 0..d {
            let (mut l, mut h) = (lo[k], hi[k]);
            if !l.is_finite() || !h.is_finite() {
                (l, h) = (-1.0, 1.0);
            } else if h - l < 1e-12 {
                l -= 1.0;
                h += 1.0;
            }
            axes.push(AxisSpec::new(l, h, self.spec.axes[k].m)?);
        }
        GridSpec::new(axes)
    }
}

/// A certified failure of the discrete midpoint inequality.
#[derive(Clone, Debug)]
pub struct ConvexityViolation {
    pub node: Vec<f64>,
    pub direction: Vec<i64>,
    /// `2 f(z) - f(z-u) - f(z+u)` in `f64`, positive at a violation.
    pub gap: f64,
}

/// Spot-checks midpoint convexity of the node data along every direction
/// with entries in `{-1, 0, 1}` (axis directions and their diagonals — the
/// diagonals matter: the duality pairing is convex along every axis but not
/// along anti-diagonal directions).
///
/// Returns the worst violation beyond `tol`, or `None` if the data passes.
/// This is a necessary-condition screen on the grid, not a convexity proof.
pub fn convexity_violation<S: Scalar>(f: &GridFn<S>, tol: f64) -> Option<ConvexityViolation> {
    let spec = f.spec();
    let d = spec.dim();
    let strides = spec.strides();
    let mut dirs: Vec<Vec<i64>> = Vec::new();
    let mut stack = vec![0i64; d];
    gen_dirs(0, d, &mut stack, &mut dirs);

    let mut worst: Option<ConvexityViolation> = None;
    for (i, v) in f.values().iter().enumerate() {
        let idx = spec.flat_to_multi(i);
        'dir: for u in &dirs {
            let mut plus = 0isize;
            for k in 0..d {
                let ip = idx[k] as i64 + u[k];
                let im = idx[k] as i64 - u[k];
                let m = spec.axes[k].m as i64;
                if ip < 0 || ip >= m || im < 0 || im >= m {
                    continue 'dir;
                }
                plus += u[k] as isize * strides[k] as isize;
            }
            let a = &f.values()[(i as isize - plus) as usize];
            let b = &f.values()[(i as isize + plus) as usize];
            // 2 f(z) <= f(z-u) + f(z+u), extended-real semantics: an
            // infinite endpoint satisfies everything; an infinite midpoint
            // with finite endpoints is a domain-convexity violation.
            let gap = match (v, a, b) {
                (Finite(m), Finite(x), Finite(y)) => {
                    2.0 * m.to_f64() - x.to_f64() - y.to_f64()
                }
                (PosInf, Finite(_), Finite(_)) => f64::INFINITY,
                _ => continue,
            };
            if gap > tol && worst.as_ref().map_or(true, |w| gap > w.gap) {
                worst = Some(ConvexityViolation {
                    node: spec.node_coords(i),
                    direction: u.clone(),
                    gap,
                });
            }
        }
    }
    worst
}

/// Enumerates nonzero sign vectors up to global sign (first nonzero = +1).
fn gen_dirs(k: usize, d: usize, stack: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if k == d {
        if stack.iter().any(|&v| v != 0) {
            out.push(stack.clone());
        }
        return;
    }
    let choices: &[i64] = if stack[..k].iter().all(|&v| v == 0) {
        &[0, 1]
    } else {
        &[-1, 0, 1]
    };
    for &c in choices {
        stack[k] = c;
        gen_dirs(k + 1, d, stack, out);
    }
    stack[k] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad_grid() -> GridFn<f64> {
        let spec = GridSpec::cube(-2.0, 2.0, 9, 1).unwrap();
        GridFn::from_fn(spec, |z| Finite(z[0] * z[0]))
    }

    #[test]
    fn indexing_roundtrip_and_coords() {
        let spec = GridSpec::new(vec![
            AxisSpec::new(0.0, 1.0, 3).unwrap(),
            AxisSpec::new(-1.0, 1.0, 5).unwrap(),
        ])
        .unwrap();
        assert_eq!(spec.num_nodes(), 15);
        assert_eq!(spec.strides(), vec![5, 1]);
        for flat in 0..spec.num_nodes() {
            let idx = spec.flat_to_multi(flat);
            assert_eq!(spec.multi_to_flat(&idx), flat);
        }
        assert_eq!(spec.node_coords(7), vec![0.5, 0.0]);
        assert_eq!(spec.find_node(&[0.5, 0.0], 1e-12), Some(7));
        assert_eq!(spec.find_node(&[0.5, 0.1], 1e-12), None);
    }

    #[test]
    fn exact_coordinate_lift_matches_floats() {
        use num_rational::BigRational as Rat;
        let spec = GridSpec::cube(-2.0, 2.0, 33, 1).unwrap();
        for i in 0..33 {
            let exact: Vec<Rat> = spec.node_coords_exact(i);
            assert_eq!(exact[0].to_f64(), spec.node_coords(i)[0]);
        }
    }

    #[test]
    fn properness_detection() {
        let spec = GridSpec::cube(0.0, 1.0, 2, 1).unwrap();
        let all_inf: GridFn<f64> = GridFn::new(spec.clone(), vec![PosInf, PosInf]).unwrap();
        assert!(!all_inf.is_proper());
        assert!(all_inf.require_proper("test fn").is_err());
        let with_neg = GridFn::new(spec.clone(), vec![Finite(0.0), NegInf]).unwrap();
        assert!(!with_neg.is_proper());
        let ok = GridFn::new(spec, vec![Finite(0.0), PosInf]).unwrap();
        assert!(ok.is_proper());
    }

    #[test]
    fn natural_dual_spec_of_a_parabola() {
        // x^2 on [-2, 2]: adjacent-difference slopes live in [-3.5, 3.5]
        // at step 0.5.
        let f = quad_grid();
        let dual = f.natural_dual_spec().unwrap();
        assert!((dual.axes[0].lo - (-3.5)).abs() < 1e-12);
        assert!((dual.axes[0].hi - 3.5).abs() < 1e-12);
        assert_eq!(dual.axes[0].m, 9);
    }

    #[test]
    fn fiber_projection_collects_finite_columns() {
        // Finite only on the column x = 0.
        let spec = GridSpec::cube(-1.0, 1.0, 3, 2).unwrap();
        let f: GridFn<f64> = GridFn::from_fn(spec, |z| {
            if z[0] == 0.0 {
                Finite(z[1])
            } else {
                PosInf
            }
        });
        let primal = f.project_fibers(&[0], |_, v| v.is_finite());
        assert_eq!(primal, vec![vec![0.0]]);
        let dual = f.project_fibers(&[1], |_, v| v.is_finite());
        assert_eq!(dual, vec![vec![-1.0], vec![0.0], vec![1.0]]);
    }

    #[test]
    fn convexity_screen_accepts_convex_and_flags_the_pairing() {
        assert!(convexity_violation(&quad_grid(), 1e-9).is_none());
        // The duality pairing x * xstar is convex along axes but concave
        // along (1, -1): the diagonal directions must catch it.
        let spec = GridSpec::cube(-1.0, 1.0, 5, 2).unwrap();
        let pairing: GridFn<f64> = GridFn::from_fn(spec, |z| Finite(z[0] * z[1]));
        let v = convexity_violation(&pairing, 1e-9).expect("pairing is not convex");
        assert_eq!(v.direction.iter().map(|d| d.abs()).sum::<i64>(), 2);
    }

    #[test]
    fn convexity_screen_flags_split_domains() {
        // Finite at x in {-1, 1} but not 0: not a convex domain.
        let spec = GridSpec::cube(-1.0, 1.0, 3, 1).unwrap();
        let f: GridFn<f64> =
            GridFn::new(spec, vec![Finite(0.0), PosInf, Finite(0.0)]).unwrap();
        assert!(convexity_violation(&f, 1e-9).is_some());
    }

    #[test]
    fn swappable_check() {
        let good = GridSpec::cube(-2.0, 2.0, 5, 4).unwrap();
        assert_eq!(good.check_swappable().unwrap(), 2);
        let bad = GridSpec::new(vec![
            AxisSpec::new(-2.0, 2.0, 5).unwrap(),
            AxisSpec::new(-1.0, 1.0, 5).unwrap(),
        ])
        .unwrap();
        assert!(bad.check_swappable().is_err());
    }
}
