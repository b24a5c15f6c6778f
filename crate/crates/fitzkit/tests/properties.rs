//! Randomized property suite for the library's structural invariants.
//! Each property states a fact that must hold for *every* input the
//! strategies can produce; shrunk counterexamples are reported by the
//! harness on failure.

use proptest::collection::vec;
use proptest::prelude::*;

use fitzkit::catalog::random_finite_operators;
use fitzkit::fitzpatrick::{phi_finite, sigma_finite};
use fitzkit::legendre::{biconjugate, conjugate_bruteforce, conjugate_grid, conjugate_exact, j_transform_exact};
use fitzkit::operators::{FiniteOperator, Operator};
use fitzkit::point::{pairing_flat, swap_blocks};
use fitzkit::{AxisSpec, Exact, ExactFn, ExtReal, GridFn, GridSpec, Scalar};

const TOL: f64 = 1e-9;

fn axis() -> impl Strategy<Value = AxisSpec> {
    (-8i32..=-1, 2i32..=8, 3usize..=17).prop_map(|(lo4, span4, m)| {
        AxisSpec::new(f64::from(lo4) / 4.0, f64::from(lo4 + span4) / 4.0, m).unwrap()
    })
}

/// A proper grid function with eighth-integer values and occasional `+inf`
/// nodes.
fn proper_grid(dim: usize) -> impl Strategy<Value = GridFn<f64>> {
    vec(axis(), dim).prop_flat_map(|axes| {
        let spec = GridSpec::new(axes).unwrap();
        let n = spec.num_nodes();
        vec(
            prop_oneof![
                8 => (-64i32..=64).prop_map(|v| ExtReal::Finite(f64::from(v) / 8.0)),
                1 => Just(ExtReal::PosInf),
            ],
            n,
        )
        .prop_map(move |mut vals| {
            if !vals.iter().any(|v| matches!(v, ExtReal::Finite(_))) {
                vals[0] = ExtReal::Finite(0.0);
            }
            GridFn::new(spec.clone(), vals).unwrap()
        })
    })
}

/// A sampled max of affine pieces: grid-convex by construction.
fn convex_grid(dim: usize) -> impl Strategy<Value = GridFn<f64>> {
    (
        vec(axis(), dim),
        vec((vec(-12i32..=12, dim), -8i32..=8), 1..=5),
    )
        .prop_map(|(axes, pieces)| {
            let spec = GridSpec::new(axes).unwrap();
            GridFn::from_fn(spec, |z| {
                let v = pieces
                    .iter()
                    .map(|(s, o)| {
                        s.iter()
                            .zip(z)
                            .map(|(a, b)| f64::from(*a) / 2.0 * b)
                            .sum::<f64>()
                            + f64::from(*o) / 2.0
                    })
                    .fold(f64::NEG_INFINITY, f64::max);
                ExtReal::Finite(v)
            })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The conjugate majorizes every tangent: f(x) + f*(s) >= <x,s> for all
    /// node pairs, convex or not.
    #[test]
    fn conjugate_satisfies_the_tangent_inequality(f in proper_grid(1), g in proper_grid(2)) {
        for f in [&f, &g] {
            let dual = f.natural_dual_spec().unwrap();
            let conj = conjugate_grid(f, &dual).unwrap();
            for i in f.finite_node_indices() {
                let x = f.spec().node_coords(i);
                let ExtReal::Finite(fx) = f.value(i) else { unreachable!() };
                for j in 0..dual.num_nodes() {
                    let ExtReal::Finite(fs) = conj.function.value(j) else { continue };
                    let s = dual.node_coords(j);
                    let pairing: f64 = x.iter().zip(&s).map(|(a, b)| a * b).sum();
                    prop_assert!(fx + fs >= pairing - TOL,
                        "tangent inequality fails at ({x:?}, {s:?})");
                }
            }
        }
    }

    /// The staged route and the reference sweep agree on values everywhere,
    /// including inputs with infinite nodes.
    #[test]
    fn staged_and_sweep_routes_agree(f in proper_grid(1), g in proper_grid(2)) {
        for f in [&f, &g] {
            let dual = f.natural_dual_spec().unwrap();
            let fast = conjugate_grid(f, &dual).unwrap();
            let slow = conjugate_bruteforce(f, &dual).unwrap();
            for j in 0..dual.num_nodes() {
                match (fast.function.value(j), slow.function.value(j)) {
                    (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                        prop_assert!((a - b).abs() <= TOL, "routes differ by {}", (a - b).abs());
                    }
                    (a, b) => prop_assert_eq!(a, b),
                }
            }
        }
    }

    /// The biconjugate never rises above the data, and reproduces
    /// grid-convex data exactly at trusted nodes.
    #[test]
    fn biconjugate_is_a_lower_convex_envelope(f in proper_grid(2), c in convex_grid(2)) {
        let bi = biconjugate(&f, None).unwrap();
        for i in 0..f.spec().num_nodes() {
            if let (ExtReal::Finite(b), ExtReal::Finite(v)) = (bi.function.value(i), f.value(i)) {
                prop_assert!(*b <= v + TOL, "envelope rose above the data at node {i}");
            }
        }
        // Exact recovery needs a dual window that contains a subgradient of
        // every node; a natural window quantizes the slopes.  All piece
        // slopes are half-integers in [-6, 6], so a half-integer dual grid
        // suffices.
        let dual = GridSpec::cube(-7.0, 7.0, 29, c.spec().dim()).unwrap();
        let bic = biconjugate(&c, Some(&dual)).unwrap();
        for i in 0..c.spec().num_nodes() {
            if bic.mask[i] {
                continue;
            }
            if let (ExtReal::Finite(b), ExtReal::Finite(v)) = (bic.function.value(i), c.value(i)) {
                prop_assert!((b - v).abs() <= TOL,
                    "convex data must be a fixed point off the mask (gap {})", (b - v).abs());
            }
        }
    }

    /// Adding a constant shifts the conjugate by its negation; adding
    /// nonnegative noise can only lower the conjugate.  Both comparisons
    /// survive in floating point with no slack.
    #[test]
    fn conjugation_reverses_order_and_absorbs_constants(
        f in proper_grid(1),
        c in -16i32..=16,
        bumps in vec(0i32..=8, 1..=64),
    ) {
        let dual = f.natural_dual_spec().unwrap();
        let base = conjugate_grid(&f, &dual).unwrap();

        let c = f64::from(c) / 4.0;
        let shifted = GridFn::new(
            f.spec().clone(),
            f.values().iter().map(|v| match v {
                ExtReal::Finite(a) => ExtReal::Finite(a + c),
                other => other.clone(),
            }).collect(),
        ).unwrap();
        let conj_shifted = conjugate_grid(&shifted, &dual).unwrap();
        for j in 0..dual.num_nodes() {
            if let (ExtReal::Finite(a), ExtReal::Finite(b)) =
                (base.function.value(j), conj_shifted.function.value(j))
            {
                prop_assert!((a - c - b).abs() <= TOL, "constant was not absorbed exactly");
            }
        }

        let bumped = GridFn::new(
            f.spec().clone(),
            f.values().iter().enumerate().map(|(i, v)| match v {
                ExtReal::Finite(a) => {
                    ExtReal::Finite(a + f64::from(bumps[i % bumps.len()]) / 8.0)
                }
                other => other.clone(),
            }).collect(),
        ).unwrap();
        let conj_bumped = conjugate_grid(&bumped, &dual).unwrap();
        for j in 0..dual.num_nodes() {
            if let (ExtReal::Finite(a), ExtReal::Finite(b)) =
                (base.function.value(j), conj_bumped.function.value(j))
            {
                // Larger input, pointwise smaller conjugate — exactly, since
                // every candidate s*x - f(x) moves down or stays.
                prop_assert!(b <= a, "order reversal violated at dual node {j}");
            }
        }
    }

    /// The duality pairing is invariant under the block swap, bit for bit.
    #[test]
    fn pairing_is_block_swap_invariant(z in vec(-64i32..=64, 2..=8)) {
        let coords: Vec<f64> = if z.len() % 2 == 0 {
            z.iter().map(|v| f64::from(*v) / 8.0).collect()
        } else {
            z.iter().chain([&0]).map(|v| f64::from(*v) / 8.0).collect()
        };
        prop_assert_eq!(
            pairing_flat(&coords),
            pairing_flat(&swap_blocks(&coords))
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Every subset of a monotone graph is monotone.
    #[test]
    fn monotone_graphs_are_closed_under_subsets(seed in any::<u64>(), keep in any::<u8>()) {
        let entry = random_finite_operators::<Exact>(seed, 1).pop().unwrap();
        let Operator::Finite(ft) = entry.operator else { unreachable!() };
        let subset: Vec<_> = ft
            .pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| keep & (1 << (i % 8)) != 0)
            .map(|(_, p)| p.clone())
            .collect();
        prop_assume!(!subset.is_empty());
        let sub = FiniteOperator::new(subset).unwrap();
        prop_assert!(sub.is_monotone().monotone);
    }

    /// The minimal representative of a monotone finite graph pins the
    /// pairing on the graph, exactly, and agrees everywhere with the
    /// block-swapped conjugate of the maximal representative.
    #[test]
    fn minimal_representative_pins_the_graph(seed in any::<u64>()) {
        let entry = random_finite_operators::<Exact>(seed, 1).pop().unwrap();
        let Operator::Finite(ft) = entry.operator else { unreachable!() };
        let phi = phi_finite(&ft).unwrap();
        for p in &ft.pairs {
            let z = p.to_coords();
            prop_assert_eq!(
                phi.eval(&z).unwrap(),
                ExtReal::Finite(p.pairing()),
                "graph point must be pinned"
            );
        }
        let ExactFn::MaxAffine(swapped) =
            j_transform_exact(&ExactFn::Generator(sigma_finite(&ft).unwrap())).unwrap()
        else { unreachable!() };
        // Probe on a small rational lattice around the graph's scale.
        let dim = phi.dim();
        for flat in 0..5usize.pow(dim as u32) {
            let mut rem = flat;
            let z: Vec<Exact> = (0..dim)
                .map(|_| {
                    let i = rem % 5;
                    rem /= 5;
                    <Exact as Scalar>::ratio(i as i64 * 8 - 16, 1)
                })
                .collect();
            prop_assert_eq!(phi.eval(&z).unwrap(), swapped.eval(&z).unwrap());
        }
    }

    /// Exact conjugation is an involution on closed envelopes: V -> A -> V
    /// preserves evaluation at rational probes.
    #[test]
    fn exact_conjugation_round_trips(seed in any::<u64>()) {
        let entry = random_finite_operators::<Exact>(seed, 1).pop().unwrap();
        let Operator::Finite(ft) = entry.operator else { unreachable!() };
        let v = sigma_finite(&ft).unwrap();
        let a = conjugate_exact(&ExactFn::Generator(v.clone())).unwrap();
        let ExactFn::Generator(v2) = conjugate_exact(&a).unwrap() else { unreachable!() };
        let dim = v.dim();
        for probe in 0..16i64 {
            let z: Vec<Exact> = (0..dim)
                .map(|k| <Exact as Scalar>::ratio((probe * 5 + k as i64 * 3) % 17 - 8, 2))
                .collect();
            prop_assert_eq!(v.eval(&z).unwrap(), v2.eval(&z).unwrap());
        }
    }
}
