//! Heisenberg-type group law on R^{2n+1}.

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};
use serde::{Deserialize, Serialize};

/// Which bilinear pairing twists the group law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Standard symplectic `J = [[0, I], [-I, 0]]`.
    Full,
    /// Upper-triangular `J_pol = [[0, I], [0, 0]]`.
    Polarized,
}

/// Dimension `n`, twist `a` and pairing variant.
///
/// `a = 0` gives the Euclidean group R^{2n+1}; routines that need `a != 0`
/// check for it themselves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupContext<T = f64> {
    n: usize,
    a: T,
    variant: Variant,
}

/// A point `(x, t)` stored flat as `(x_1, .., x_{2n}, t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupPoint<S> {
    coords: Vec<S>,
}

impl<S: Copy> GroupPoint<S> {
    pub fn new(x: &[S], t: S) -> Self {
        let mut coords = Vec::with_capacity(x.len() + 1);
        coords.extend_from_slice(x);
        coords.push(t);
        GroupPoint { coords }
    }

    /// Builds a point from flat coordinates; the last entry is `t`.
    pub fn from_coords(coords: Vec<S>) -> Result<Self> {
        if coords.len() < 3 || coords.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "flat coordinates need odd length >= 3, got {}",
                coords.len()
            )));
        }
        Ok(GroupPoint { coords })
    }


    pub fn x(&self) -> &[S] {
        &self.coords[..self.coords.len() - 1]
    }

    pub fn t(&self) -> S {
        self.coords[self.coords.len() - 1]
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<S> {
        self.coords
    }

    /// Group dimension `n` of the point.
    pub fn n(&self) -> usize {
        (self.coords.len() - 1) / 2
    }

    pub fn is_identity(&self) -> bool
    where
        S: PartialEq + Default,
    {
        self.coords.iter().all(|c| *c == S::default())
    }
}

impl<S: Scalar> GroupPoint<S> {
    pub fn identity(n: usize) -> Self {
        GroupPoint { coords: vec![S::zero(); 2 * n + 1] }
    }

    /// `(-x, -t)`, the inverse under the full law. Use
    /// [`GroupContext::inverse`] for the polarized one.
    pub fn inverse(&self) -> Self {
        GroupPoint { coords: self.coords.iter().map(|&c| -c).collect() }
    }

    /// Nonisotropic dilation `(δx, δ²t)`.
    pub fn dilate(&self, delta: S::Base) -> Result<Self> {
        if !(delta > <S::Base as num_traits::Zero>::zero()) {
            return Err(Error::InvalidParameter(format!(
                "dilation factor must be positive, got {:?}",
                delta
            )));
        }
        let mut coords: Vec<S> = self.coords.iter().map(|&c| c.scale(delta)).collect();
        let last = coords.len() - 1;
        coords[last] = coords[last].scale(delta);
        Ok(GroupPoint { coords })
    }

    /// Image under the linear map `(x, t) -> (bx, bt)`.
    pub fn scale_uniform(&self, b: S::Base) -> Self {
        GroupPoint { coords: self.coords.iter().map(|&c| c.scale(b)).collect() }
    }
}

impl<T: Real> GroupContext<T> {
    pub fn new(n: usize, a: T, variant: Variant) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if !a.is_finite() {
            return Err(Error::InvalidParameter("twist a must be finite".into()));
        }
        Ok(GroupContext { n, a, variant })
    }

    pub fn full(n: usize, a: T) -> Result<Self> {
        Self::new(n, a, Variant::Full)
    }

    pub fn polarized(n: usize, a: T) -> Result<Self> {
        Self::new(n, a, Variant::Polarized)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Ambient dimension `2n + 1`.
    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    /// Same group with a different twist.
    pub fn with_a(&self, a: T) -> Self {
        GroupContext { a, ..*self }
    }

    pub fn identity<S: Scalar<Base = T>>(&self) -> GroupPoint<S> {
        GroupPoint::identity(self.n)
    }

    pub fn check_point<S: Copy>(&self, p: &GroupPoint<S>) -> Result<()> {
        if p.coords.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: p.coords.len() });
        }
        Ok(())
    }

    fn check_vec<S>(&self, x: &[S]) -> Result<()> {
        if x.len() != 2 * self.n {
            return Err(Error::DimensionMismatch { expected: 2 * self.n, got: x.len() });
        }
        Ok(())
    }

    /// `xᵗJy` for the context's variant.
    pub fn symplectic_pairing<S: Scalar<Base = T>>(&self, x: &[S], y: &[S]) -> Result<S> {
        self.check_vec(x)?;
        self.check_vec(y)?;
        Ok(self.pairing_unchecked(x, y))
    }

    #[inline]
    pub(crate) fn pairing_unchecked<S: Scalar<Base = T>>(&self, x: &[S], y: &[S]) -> S {
        let n = self.n;
        let mut acc = S::zero();
        for j in 0..n {
            acc += x[j] * y[j + n];
            if self.variant == Variant::Full {
                acc -= x[j + n] * y[j];
            }
        }
        acc
    }

    /// `(x + y, s + t - 2a xᵗJy)`.
    pub fn multiply<S: Scalar<Base = T>>(
        &self,
        p: &GroupPoint<S>,
        q: &GroupPoint<S>,
    ) -> Result<GroupPoint<S>> {
        self.check_point(p)?;
        self.check_point(q)?;
        let mut out = vec![S::zero(); self.dim()];
        self.multiply_into(p.coords(), q.coords(), &mut out);
        Ok(GroupPoint { coords: out })
    }

    /// Flat-slice product without dimension checks.
    #[inline]
    pub fn multiply_into<S: Scalar<Base = T>>(&self, p: &[S], q: &[S], out: &mut [S]) {
        let m = 2 * self.n;
        for i in 0..m {
            out[i] = p[i] + q[i];
        }
        let w = self.pairing_unchecked(&p[..m], &q[..m]);
        out[m] = p[m] + q[m] - w.scale(T::lit(2.0) * self.a);
    }

    /// `(-x, -t - 2a xᵗJx)`; the correction vanishes for the full law.
    pub fn inverse<S: Scalar<Base = T>>(&self, p: &GroupPoint<S>) -> Result<GroupPoint<S>> {
        self.check_point(p)?;
        let mut inv = p.inverse();
        let m = 2 * self.n;
        let w = self.pairing_unchecked(&p.coords[..m], &p.coords[..m]);
        inv.coords[m] -= w.scale(T::lit(2.0) * self.a);
        Ok(inv)
    }

    pub fn dilate<S: Scalar<Base = T>>(&self, p: &GroupPoint<S>, delta: T) -> Result<GroupPoint<S>> {
        self.check_point(p)?;
        p.dilate(delta)
    }

    /// Kernel displacement `q⁻¹ · p`.
    pub fn relative<S: Scalar<Base = T>>(
        &self,
        q: &GroupPoint<S>,
        p: &GroupPoint<S>,
    ) -> Result<GroupPoint<S>> {
        self.check_point(q)?;
        self.check_point(p)?;
        let mut out = vec![S::zero(); self.dim()];
        self.relative_into(q.coords(), p.coords(), &mut out);
        Ok(GroupPoint { coords: out })
    }

    /// Flat-slice `q⁻¹ · p` without dimension checks.
    #[inline]
    pub fn relative_into<S: Scalar<Base = T>>(&self, q: &[S], p: &[S], out: &mut [S]) {
        let m = 2 * self.n;
        for i in 0..m {
            out[i] = p[i] - q[i];
        }
        let w = self.pairing_unchecked(&q[..m], &out[..m]);
        out[m] = p[m] - q[m] + w.scale(T::lit(2.0) * self.a);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: &[f64], t: f64) -> GroupPoint<f64> {
        GroupPoint::new(x, t)
    }

    #[test]
    fn product_example() {
        let g = GroupContext::full(1, 1.0).unwrap();
        let r = g.multiply(&pt(&[1.0, 0.0], 0.0), &pt(&[0.0, 1.0], 0.0)).unwrap();
        assert_eq!(r, pt(&[1.0, 1.0], -2.0));
    }

    #[test]
    fn relative_example() {
        let g = GroupContext::full(1, 1.0).unwrap();
        let r = g.relative(&pt(&[0.0, 1.0], 0.0), &pt(&[1.0, 0.0], 0.0)).unwrap();
        assert_eq!(r, pt(&[1.0, -1.0], -2.0));
    }

    #[test]
    fn inverse_and_dilation_examples() {
        assert_eq!(pt(&[1.0, 2.0], 3.0).inverse(), pt(&[-1.0, -2.0], -3.0));
        assert_eq!(pt(&[1.0, 1.0], 1.0).dilate(2.0).unwrap(), pt(&[2.0, 2.0], 4.0));
        assert!(pt(&[1.0, 1.0], 1.0).dilate(0.0).is_err());
    }

    #[test]
    fn pairings() {
        let full = GroupContext::full(1, 1.0).unwrap();
        let pol = GroupContext::polarized(1, 1.0).unwrap();
        assert_eq!(full.symplectic_pairing(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(pol.symplectic_pairing(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(pol.symplectic_pairing(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert!(full.symplectic_pairing(&[1.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let g = GroupContext::full(2, 1.0).unwrap();
        assert!(matches!(
            g.multiply(&pt(&[1.0, 0.0], 0.0), &pt(&[1.0, 0.0], 0.0)),
            Err(Error::DimensionMismatch { expected: 5, got: 3 })
        ));
    }

    #[test]
    fn single_precision_path() {
        let g = GroupContext::<f32>::full(1, 0.5).unwrap();
        let p = GroupPoint::new(&[1.0f32, 2.0], 3.0);
        let e = g.multiply(&p, &p.inverse()).unwrap();
        assert!(e.is_identity());
    }
}
