//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the numerical kernels are generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Relative tolerance the adaptive integrators aim for with this precision.
    fn quad_rel_tol() -> Self;

    /// Converts an `f64` literal. Panics only for non-representable values, which
    /// cannot happen for the finite constants used in this crate.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_usize_lossy(k: usize) -> Self {
        Self::from_usize(k).expect("count fits in a float")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    #[inline]
    fn quad_rel_tol() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    #[inline]
    fn quad_rel_tol() -> Self {
        5e-5
    }
}

/// `ln(cosh(x))` without overflow for large `|x|`.
#[inline]
pub fn ln_cosh<T: Scalar>(x: T) -> T {
    let ax = x.abs();
    ax + (-(ax + ax)).exp().ln_1p() - T::LN_2()
}
