//! Real scalar abstraction: every numeric routine in this crate is generic
//! over a floating-point type implementing [`Scalar`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar (f32 or f64).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal must convert to scalar type")
    }
}

impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

/// Complex number over the generic scalar.
pub type C<T> = Complex<T>;

/// Complex value from two f64 literals.
pub fn c<T: Scalar>(re: f64, im: f64) -> C<T> {
    Complex::new(T::of(re), T::of(im))
}

/// Complex one.
pub fn c_one<T: Scalar>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

/// Complex zero.
pub fn c_zero<T: Scalar>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}
