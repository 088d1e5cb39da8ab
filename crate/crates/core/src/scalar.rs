//! Scalar abstraction shared by every numerical module.
//!
//! The algebra, simulator and optimizer are written once over [`Real`] and
//! instantiated for `f64` (the default everywhere in the crate root aliases)
//! and `f32`. Tolerances scale with the precision of the type.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Coefficients and amplitudes below this magnitude are structural zeros.
    const STRUCTURAL: f64;
    /// Tolerance for algebraic cross-checks (operator identities, unitarity).
    const ALGEBRAIC: f64;
    /// Default gradient infinity-norm stop for the angle optimizer.
    const GRADIENT_TOL: f64;
    /// Default relative residual accepted from a KHK decomposition.
    const RESIDUAL_TOL: f64;

    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable")
    }

    #[inline]
    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("usize is representable")
    }

    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    #[inline]
    fn structural() -> Self {
        Self::of(Self::STRUCTURAL)
    }
}

impl Real for f64 {
    const STRUCTURAL: f64 = 1e-12;
    const ALGEBRAIC: f64 = 1e-10;
    const GRADIENT_TOL: f64 = 1e-10;
    const RESIDUAL_TOL: f64 = 1e-8;
}

impl Real for f32 {
    const STRUCTURAL: f64 = 1e-6;
    const ALGEBRAIC: f64 = 1e-4;
    const GRADIENT_TOL: f64 = 1e-4;
    const RESIDUAL_TOL: f64 = 1e-3;
}

/// Shorthand for building a complex number from two reals.
#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}
