//! Second-order forward-mode jets with two seeded directions.

use crate::scalar::{Real, Scalar};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Truncated expansion `v + d1*e1 + d2*e2 + d12*e1*e2` with `e1² = e2² = 0`.
///
/// `d12` is the mixed second derivative along the two seeded directions.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet2<T> {
    pub v: T,
    pub d1: T,
    pub d2: T,
    pub d12: T,
}

impl<T: Real> Jet2<T> {
    pub fn constant(v: T) -> Self {
        Jet2 { v, d1: T::zero(), d2: T::zero(), d12: T::zero() }
    }

    pub fn new(v: T, d1: T, d2: T, d12: T) -> Self {
        Jet2 { v, d1, d2, d12 }
    }

    /// Applies a scalar function given its value and first two derivatives at `v`.
    #[inline]
    pub fn chain(self, g: T, dg: T, ddg: T) -> Self {
        Jet2 {
            v: g,
            d1: dg * self.d1,
            d2: dg * self.d2,
            d12: dg * self.d12 + ddg * self.d1 * self.d2,
        }
    }
}

impl<T: Real> Add for Jet2<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Jet2 { v: self.v + o.v, d1: self.d1 + o.d1, d2: self.d2 + o.d2, d12: self.d12 + o.d12 }
    }
}

impl<T: Real> Sub for Jet2<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Jet2 { v: self.v - o.v, d1: self.d1 - o.d1, d2: self.d2 - o.d2, d12: self.d12 - o.d12 }
    }
}

impl<T: Real> Mul for Jet2<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Jet2 {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + self.v * o.d2,
            d12: self.d12 * o.v + self.d1 * o.d2 + self.d2 * o.d1 + self.v * o.d12,
        }
    }
}

impl<T: Real> Div for Jet2<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let inv = o.v.recip();
        self * o.chain(inv, -inv * inv, (inv + inv) * inv * inv)
    }
}

impl<T: Real> Neg for Jet2<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Jet2 { v: -self.v, d1: -self.d1, d2: -self.d2, d12: -self.d12 }
    }
}

impl<T: Real> AddAssign for Jet2<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Jet2<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> MulAssign for Jet2<T> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<T: Real> Scalar for Jet2<T> {
    type Base = T;

    fn from_base(v: T) -> Self {
        Jet2::constant(v)
    }
    fn primal(&self) -> T {
        self.v
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let half = T::lit(0.5);
        self.chain(s, half / s, -half * half / (s * self.v))
    }
    fn powf(self, e: T) -> Self {
        let g = self.v.powf(e);
        let dg = e * self.v.powf(e - T::one());
        let ddg = e * (e - T::one()) * self.v.powf(e - T::lit(2.0));
        self.chain(g, dg, ddg)
    }
    fn exp(self) -> Self {
        let g = self.v.exp();
        self.chain(g, g, g)
    }
    fn ln(self) -> Self {
        let inv = self.v.recip();
        self.chain(self.v.ln(), inv, -inv * inv)
    }
}
