//! Points of the primal-dual product space `X x X*` and the duality pairing.
//!
//! The ambient spaces are `R^n` with `n` in `{1, 2}`, so a product point has
//! `2n` coordinates.  Throughout the crate a "full" coordinate vector lists
//! the primal block first and the dual block second; [`PrimalDualPoint`] is
//! the structured view of the same data.

use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

/// Largest supported dimension of the underlying space `X`.
pub const MAX_SPACE_DIM: usize = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct PrimalDualPoint<S> {
    pub x: Vec<S>,
    pub xstar: Vec<S>,
}

impl<S: Scalar> PrimalDualPoint<S> {
    pub fn new(x: Vec<S>, xstar: Vec<S>) -> Result<Self> {
        if x.len() != xstar.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: xstar.len(),
            });
        }
        if x.is_empty() || x.len() > MAX_SPACE_DIM {
            return Err(Error::UnsupportedDimension {
                operation: "primal-dual point",
                dim: x.len(),
                max: MAX_SPACE_DIM,
            });
        }
        Ok(Self { x, xstar })
    }

    /// Dimension `n` of the underlying space `X`.
    pub fn space_dim(&self) -> usize {
        self.x.len()
    }

    /// The duality pairing `<x, x*>`.
    pub fn pairing(&self) -> S {
        dot(&self.x, &self.xstar)
    }

    /// Flattens to `(x_1..x_n, x*_1..x*_n)`.
    pub fn to_coords(&self) -> Vec<S> {
        let mut v = self.x.clone();
        v.extend_from_slice(&self.xstar);
        v
    }

    /// Rebuilds the structured view from a flat `2n`-coordinate vector.
    pub fn from_coords(coords: &[S]) -> Result<Self> {
        if coords.len() % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "a primal-dual coordinate vector must have even length, got {}",
                coords.len()
            )));
        }
        let n = coords.len() / 2;
        Self::new(coords[..n].to_vec(), coords[n..].to_vec())
    }
}

/// Pairing evaluated on a flat coordinate vector `(x, x*)`.
///
/// This is the bilinear form the Fitzpatrick machinery compares against, so
/// it is exposed as a free function as well.
pub fn pairing_flat<S: Scalar>(coords: &[S]) -> S {
    assert!(
        coords.len() % 2 == 0,
        "pairing needs an even number of coordinates"
    );
    let n = coords.len() / 2;
    dot(&coords[..n], &coords[n..])
}

/// Swaps the primal and dual blocks of a flat coordinate vector.
///
/// This is the index permutation behind the J-transform: conjugating and then
/// reading the dual variables in swapped order.
pub fn swap_blocks<S: Clone>(coords: &[S]) -> Vec<S> {
    assert!(coords.len() % 2 == 0, "block swap needs even length");
    let n = coords.len() / 2;
    let mut out = coords[n..].to_vec();
    out.extend_from_slice(&coords[..n]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational as Rat;

    #[test]
    fn pairing_matches_hand_values() {
        let p = PrimalDualPoint::new(vec![1.0, 2.0], vec![3.0, -1.0]).unwrap();
        assert_eq!(p.pairing(), 1.0);
        let q = PrimalDualPoint::new(vec![Rat::from_int(2)], vec![Rat::ratio(1, 2)]).unwrap();
        assert_eq!(q.pairing(), Rat::from_int(1));
    }

    #[test]
    fn zero_block_pairs_to_zero() {
        let p = PrimalDualPoint::new(vec![0.0, 0.0], vec![5.0, -7.0]).unwrap();
        assert_eq!(p.pairing(), 0.0);
    }

    #[test]
    fn dimension_contract_is_enforced() {
        assert!(PrimalDualPoint::new(vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(PrimalDualPoint::new(vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]).is_err());
        assert!(PrimalDualPoint::<f64>::new(vec![], vec![]).is_err());
    }

    #[test]
    fn flat_roundtrip_and_swap() {
        let coords = [1.0, 2.0, 3.0, 4.0];
        let p = PrimalDualPoint::from_coords(&coords).unwrap();
        assert_eq!(p.to_coords(), coords);
        assert_eq!(pairing_flat(&coords), 11.0);
        assert_eq!(swap_blocks(&coords), vec![3.0, 4.0, 1.0, 2.0]);
    }
}
