//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use rustfft::FftNum;

/// Floating point scalar the grids, fields and solvers are generic over (f32 or f64).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + FftNum
    + Debug
    + Display
    + Default
    + Sum
    + NumAssign
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion of an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
