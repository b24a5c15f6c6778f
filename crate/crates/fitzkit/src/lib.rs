//! Convex representations of monotone operators on low-dimensional spaces.
//!
//! The library works with closed convex functions on a product space
//! `Z = X x X*` (here `X = R^n`, `n <= 2`) that *represent* monotone
//! operators `T : X => X*`: functions that majorize the duality pairing
//! `pi(x, x*) = <x, x*>` and agree with it exactly on the graph of `T`.
//! It provides:
//!
//! - exact piecewise-linear convex functions over big rationals
//!   ([`MaxAffineFn`], [`GeneratorFn`]) and sampled functions on product
//!   grids over floats ([`GridFn`]);
//! - discrete and exact Legendre transforms, including the J-transform
//!   `(Jh)(x, x*) = h*(x*, x)` that maps representing functions to
//!   representing functions ([`legendre`]);
//! - the canonical representing pair of an operator: the minimal
//!   (Fitzpatrick) function and the maximal one, linked through the
//!   J-transform ([`fitzpatrick`]);
//! - a representability gate (`h >= pi` and `Jh >= pi`) and graph
//!   extraction `{z : Jh(z) = pi(z)}` with certified tolerances
//!   ([`gates`]);
//! - a battery of machine-checkable lemmas about conjugates, recession
//!   directions, domain projections and bounded ranges, each paired with a
//!   negative control ([`lemmas`]).
//!
//! # Numeric policy
//!
//! Structured data (piecewise-linear functions, polyhedra, operator graphs)
//! lives over [`Exact`] arithmetic, so equalities like "the minimal
//! representative is the J-transform of the maximal one" are decided
//! exactly.  Grid data lives over `f64` with `+inf` as a first-class
//! sentinel ([`ExtReal`]); grid transforms report a saturation mask
//! flagging nodes whose maximiser hit the sampling window, and all
//! approximate claims carry explicit tolerances.
//!
//! Everything downstream of a seed is deterministic: random catalogs and
//! property batteries derive from a single `u64` seed.

pub mod catalog;
pub mod error;
pub mod extreal;
pub mod fitzpatrick;
pub mod gates;
pub mod generator;
pub mod grid;
pub mod hull;
pub mod legendre;
pub mod lemmas;
pub mod maxaffine;
pub mod operators;
pub mod point;
pub mod region;
pub mod scalar;

mod simplex;

pub use error::{Error, Result};
pub use extreal::ExtReal;
pub use generator::{Generator, GeneratorFn};
pub use grid::{AxisSpec, GridFn, GridSpec};
pub use legendre::{ConjugateResult, ExactFn};
pub use lemmas::LemmaReport;
pub use maxaffine::{AffinePiece, MaxAffineFn};
pub use point::PrimalDualPoint;
pub use region::Region;
pub use scalar::Scalar;

/// The exact scalar used for structured (non-grid) data.
pub type Exact = num_rational::BigRational;

/// Exact piecewise-linear convex function in max-affine form.
pub type ExactMaxAffine = MaxAffineFn<Exact>;
/// Exact piecewise-linear convex function in generator (envelope) form.
pub type ExactGenerator = GeneratorFn<Exact>;
/// Exact region predicate (polyhedra, polytopes, norm balls).
pub type ExactRegion = Region<Exact>;
/// Grid function over IEEE doubles with `+inf` sentinels.
pub type GridF64 = GridFn<f64>;
