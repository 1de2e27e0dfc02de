//! Homogeneous quasi-norms and the phase `ρ^{-β}`.

use crate::error::{Error, Result};
use crate::group::GroupPoint;
use crate::scalar::{Real, Scalar};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormKind {
    /// `max(|x_i|, |t|^{1/2})`; not smooth, used for equivalence checks only.
    #[serde(rename = "rho0")]
    Rho0,
    /// Koranyi norm `(|x|⁴ + t²)^{1/4}`.
    #[serde(rename = "koranyi")]
    Rho1,
    /// Minkowski functional of the Euclidean unit ball, `√φ₂`.
    #[serde(rename = "minkowski")]
    Rho2,
    /// `(Σ x_i⁴ + t²)^{1/4}`.
    #[serde(rename = "rho3")]
    Rho3,
}

impl NormKind {
    pub fn is_smooth(self) -> bool {
        !matches!(self, NormKind::Rho0)
    }

    pub fn name(self) -> &'static str {
        match self {
            NormKind::Rho0 => "rho0",
            NormKind::Rho1 => "koranyi",
            NormKind::Rho2 => "minkowski",
            NormKind::Rho3 => "rho3",
        }
    }
}

/// Norm kind with scale `b`, evaluated as `ρ(bx, bt)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiNormSpec<T = f64> {
    pub kind: NormKind,
    pub b: T,
}

/// Phase `Φ = ρ^{-β}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpec<T = f64> {
    pub norm: QuasiNormSpec<T>,
    pub beta: T,
}

#[inline]
fn sq_norm<S: Scalar>(x: &[S]) -> S {
    let mut acc = S::zero();
    for &v in x {
        acc += v * v;
    }
    acc
}

/// `φ₂ = (|x|² + √(|x|⁴ + 4t²)) / 2` from squared radius and `t`.
#[inline]
fn phi2_raw<S: Scalar>(r2: S, t: S) -> S {
    (r2 + (r2 * r2 + S::lit(4.0) * t * t).sqrt()) * S::lit(0.5)
}

/// `φ₁ = |x|⁴ + t²` on flat coordinates.
#[inline]
pub fn phi1_flat<S: Scalar>(z: &[S]) -> S {
    let m = z.len() - 1;
    let r2 = sq_norm(&z[..m]);
    r2 * r2 + z[m] * z[m]
}

/// `φ₃ = Σ x_i⁴ + t²` on flat coordinates.
#[inline]
pub fn phi3_flat<S: Scalar>(z: &[S]) -> S {
    let m = z.len() - 1;
    let mut acc = z[m] * z[m];
    for &v in &z[..m] {
        let v2 = v * v;
        acc += v2 * v2;
    }
    acc
}

/// `φ₂` on flat coordinates; zero at the origin.
#[inline]
pub fn phi2_flat<S: Scalar>(z: &[S]) -> S {
    let m = z.len() - 1;
    phi2_raw(sq_norm(&z[..m]), z[m])
}

/// `φ₁(bx, bt)`.
#[inline]
fn phi1_scaled<S: Scalar>(z: &[S], b: S::Base) -> S {
    let m = z.len() - 1;
    let r2 = sq_norm(&z[..m]).scale(b * b);
    let t = z[m].scale(b);
    r2 * r2 + t * t
}

/// `φ₃(bx, bt)`.
#[inline]
fn phi3_scaled<S: Scalar>(z: &[S], b: S::Base) -> S {
    let m = z.len() - 1;
    let b2 = b * b;
    let mut acc = z[m].square().scale(b2);
    for &v in &z[..m] {
        acc += v.square().square().scale(b2 * b2);
    }
    acc
}

/// Positive root of `φ² − |x|²φ − t² = 0`.
pub fn phi2<S: Scalar>(p: &GroupPoint<S>) -> Result<S> {
    if p.is_identity() {
        return Err(Error::AtIdentity("phi2"));
    }
    Ok(phi2_flat(p.coords()))
}

/// `φ₁ = ρ₁⁴`, `φ₂ = ρ₂²` or `φ₃ = ρ₃⁴` at scale 1.
pub fn phi_scalar<S: Scalar>(kind: NormKind, p: &GroupPoint<S>) -> Result<S> {
    match kind {
        NormKind::Rho0 => Err(Error::Unsupported("no auxiliary scalar for rho0".into())),
        NormKind::Rho1 => Ok(phi1_flat(p.coords())),
        NormKind::Rho2 => Ok(phi2_flat(p.coords())),
        NormKind::Rho3 => Ok(phi3_flat(p.coords())),
    }
}

impl<T: Real> QuasiNormSpec<T> {
    pub fn new(kind: NormKind, b: T) -> Result<Self> {
        if !(b > T::zero()) || !b.is_finite() {
            return Err(Error::InvalidParameter(format!("scale b must be positive, got {:?}", b)));
        }
        Ok(QuasiNormSpec { kind, b })
    }

    pub fn unit(kind: NormKind) -> Self {
        QuasiNormSpec { kind, b: T::one() }
    }

    pub fn evaluate<S: Scalar<Base = T>>(&self, p: &GroupPoint<S>) -> S {
        self.evaluate_flat(p.coords())
    }

    /// Norm of flat coordinates `(x, t)`.
    pub fn evaluate_flat<S: Scalar<Base = T>>(&self, z: &[S]) -> S {
        let b = self.b;
        let m = z.len() - 1;
        match self.kind {
            NormKind::Rho0 => {
                let mut best = z[m].scale(b).abs().sqrt();
                for &v in &z[..m] {
                    let c = v.scale(b).abs();
                    if c.primal() > best.primal() {
                        best = c;
                    }
                }
                best
            }
            NormKind::Rho1 => phi1_scaled(z, b).powf(T::lit(0.25)),
            NormKind::Rho2 => {
                let r2 = sq_norm(&z[..m]).scale(b * b);
                phi2_raw(r2, z[m].scale(b)).sqrt()
            }
            NormKind::Rho3 => phi3_scaled(z, b).powf(T::lit(0.25)),
        }
    }
}

impl<T: Real> PhaseSpec<T> {
    pub fn new(norm: QuasiNormSpec<T>, beta: T) -> Result<Self> {
        if !(beta > T::zero()) || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!("beta must be positive, got {:?}", beta)));
        }
        Ok(PhaseSpec { norm, beta })
    }

    /// `ρ(p)^{-β}`; undefined at the identity.
    pub fn phase<S: Scalar<Base = T>>(&self, p: &GroupPoint<S>) -> Result<S> {
        if p.is_identity() {
            return Err(Error::AtIdentity("phase"));
        }
        Ok(self.phase_flat(p.coords()))
    }

    /// `ρ^{-β}` on flat coordinates without the identity check.
    #[inline]
    pub fn phase_flat<S: Scalar<Base = T>>(&self, z: &[S]) -> S {
        let b = self.norm.b;
        match self.norm.kind {
            // Powers of φ avoid an extra root.
            NormKind::Rho1 => phi1_scaled(z, b).powf(-self.beta * T::lit(0.25)),
            NormKind::Rho3 => phi3_scaled(z, b).powf(-self.beta * T::lit(0.25)),
            NormKind::Rho2 => {
                let m = z.len() - 1;
                let r2 = sq_norm(&z[..m]).scale(b * b);
                phi2_raw(r2, z[m].scale(b)).powf(-self.beta * T::lit(0.5))
            }
            NormKind::Rho0 => self.norm.evaluate_flat(z).powf(-self.beta),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: &[f64], t: f64) -> GroupPoint<f64> {
        GroupPoint::new(x, t)
    }

    #[test]
    fn specializations() {
        let k = QuasiNormSpec::new(NormKind::Rho1, 2.0).unwrap();
        assert!((k.evaluate(&pt(&[3.0, 4.0], 0.0)) - 10.0).abs() < 1e-12);
        assert!((k.evaluate(&pt(&[0.0, 0.0], 8.0)) - 4.0).abs() < 1e-12);
        let r3 = QuasiNormSpec::unit(NormKind::Rho3);
        assert!((r3.evaluate(&pt(&[1.0, 1.0], 0.0)) - 2f64.powf(0.25)).abs() < 1e-15);
        let r0 = QuasiNormSpec::unit(NormKind::Rho0);
        assert_eq!(r0.evaluate(&pt(&[0.5, -0.2], 4.0)), 2.0);
        assert!(QuasiNormSpec::new(NormKind::Rho1, 0.0).is_err());
    }

    #[test]
    fn minkowski_is_one_on_euclidean_sphere() {
        let m = QuasiNormSpec::unit(NormKind::Rho2);
        let (x1, x2) = (0.3, -0.5);
        let t = (1.0f64 - x1 * x1 - x2 * x2).sqrt();
        assert!((m.evaluate(&pt(&[x1, x2], t)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn phi_scalars() {
        assert_eq!(phi2(&pt(&[0.0, 0.0], -3.0)).unwrap(), 3.0);
        assert!((phi2(&pt(&[3.0, 4.0], 0.0)).unwrap() - 25.0).abs() < 1e-12);
        assert!(phi2(&pt(&[0.0, 0.0], 0.0)).is_err());
        assert_eq!(phi_scalar(NormKind::Rho3, &pt(&[1.0, 1.0], 1.0)).unwrap(), 3.0);
        assert_eq!(phi_scalar(NormKind::Rho1, &pt(&[1.0, 1.0], 0.0)).unwrap(), 4.0);
        assert!(phi_scalar(NormKind::Rho0, &pt(&[1.0, 1.0], 0.0)).is_err());
    }

    #[test]
    fn phase_values() {
        let ph = PhaseSpec::new(QuasiNormSpec::unit(NormKind::Rho1), 2.0).unwrap();
        assert_eq!(ph.phase(&pt(&[0.0, 0.0], 1.0)).unwrap(), 1.0);
        assert!(ph.phase(&pt(&[0.0, 0.0], 0.0)).is_err());
        for kind in [NormKind::Rho0, NormKind::Rho1, NormKind::Rho2, NormKind::Rho3] {
            let ph = PhaseSpec::new(QuasiNormSpec::new(kind, 1.3).unwrap(), 0.7).unwrap();
            let p = pt(&[0.4, -0.9], 0.6);
            let direct = ph.norm.evaluate(&p).powf(-0.7);
            assert!((ph.phase(&p).unwrap() - direct).abs() < 1e-14 * direct);
        }
    }
}
