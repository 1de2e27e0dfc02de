//! Scalar abstraction shared by plain floats and differentiation jets.

use num_traits::Float;
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};


/// A plain real number type (`f32` or `f64`).
pub trait Real:
    Float + Debug + Default + Send + Sync + AddAssign + SubAssign + MulAssign + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(v: f64) -> Self {
        <Self as num_traits::NumCast>::from(v).expect("f64 literal representable")
    }
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Arithmetic needed to evaluate quasi-norms and phases.
///
/// Implemented by every [`Real`] and by [`crate::Jet2`], so the same code path
/// computes values and exact derivatives.
pub trait Scalar:
    Copy
    + Debug
    + Default
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    /// Underlying real type.
    type Base: Real;

    fn from_base(v: Self::Base) -> Self;
    /// Primal value, used for branching.
    fn primal(&self) -> Self::Base;
    fn sqrt(self) -> Self;
    fn powf(self, e: Self::Base) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;

    fn lit(v: f64) -> Self {
        Self::from_base(<Self::Base as Real>::lit(v))
    }
    fn zero() -> Self {
        Self::lit(0.0)
    }
    fn one() -> Self {
        Self::lit(1.0)
    }
    fn abs(self) -> Self {
        if self.primal() < <Self::Base as num_traits::Zero>::zero() {
            -self
        } else {
            self
        }
    }
    fn square(self) -> Self {
        self * self
    }
    /// `self` scaled by a base real.
    fn scale(self, k: Self::Base) -> Self {
        self * Self::from_base(k)
    }
}

impl<T: Real> Scalar for T {
    type Base = T;
    #[inline]
    fn from_base(v: T) -> Self {
        v
    }
    #[inline]
    fn primal(&self) -> T {
        *self
    }
    #[inline]
    fn sqrt(self) -> Self {
        Float::sqrt(self)
    }
    #[inline]
    fn powf(self, e: T) -> Self {
        Float::powf(self, e)
    }
    #[inline]
    fn exp(self) -> Self {
        Float::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        Float::ln(self)
    }
}
