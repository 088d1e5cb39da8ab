use serde::{Deserialize, Serialize};

use crate::scalar::Real;
use crate::spmodel::ModelSpace;

/// Operator diagonal in the occupation basis: `lambda(mask) = offset +
/// sum_{q occupied} w_q`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalObservable<T> {
    pub weights: Vec<T>,
    pub offset: T,
}

impl<T: Real> DiagonalObservable<T> {
    pub fn new(weights: Vec<T>) -> Self {
        DiagonalObservable { weights, offset: T::zero() }
    }

    /// Canonical `J_z` of the space: weight `m` on every mode.
    pub fn jz(space: &ModelSpace) -> Self {
        Self::new(space.modes().iter().map(|m| T::of(m.m())).collect())
    }

    #[inline]
    pub fn eigenvalue(&self, mut mask: u64) -> T {
        let mut total = self.offset;
        while mask != 0 {
            let q = mask.trailing_zeros() as usize;
            total += self.weights[q];
            mask &= mask - 1;
        }
        total
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterOutcome {
    /// Probability of the realized outcome.
    pub probability: f64,
    /// `0` for the cosine branch, `1` for the sine branch.
    pub outcome: u8,
}
