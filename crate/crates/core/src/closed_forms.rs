//! Closed-form mixed-Hessian determinants and their comparison with AD.
//!
//! Each formula gives `det(φA − cB)` for an auxiliary scalar `φ` with
//! `A = (X^ℓ_j X^r_k φ)` and `B = (X^ℓ_j φ · X^r_k φ)`. [`lift`] turns that
//! bracket into `det(X^ℓ_j X^r_k Φ)` for `Φ = φ^{-β/4}` or `φ^{-β/2}`.

use crate::error::{Error, Result};
use crate::fields::mixed_hessian;
use crate::group::{GroupContext, GroupPoint, Variant};
use crate::norms::{phi1_flat, phi2_flat, phi3_flat, NormKind, PhaseSpec, QuasiNormSpec};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClosedFormCase {
    /// Koranyi norm, full group, any `n`, any `a`.
    KoranyiFull,
    /// Minkowski functional, full group, any `n`, any `a`.
    MinkowskiFull,
    /// `ρ₃`, full group, `n = 1`.
    Rho3N1,
    /// Koranyi norm, polarized group, `n = 1`.
    PolarizedKoranyiN1,
    /// Minkowski functional, polarized group, `n = 1`.
    PolarizedMinkowskiN1,
    /// Koranyi norm, `a = 0`.
    EuclideanKoranyi,
    /// Minkowski functional, `a = 0`.
    EuclideanMinkowski,
}

/// Which power of the auxiliary scalar the phase is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `Φ = φ^{-β/4}` with `φ = ρ⁴`.
    Quartic,
    /// `Φ = φ^{-β/2}` with `φ = ρ²`.
    Quadratic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormCase {
    Koranyi,
    Minkowski,
}

impl ClosedFormCase {
    pub const ALL: [ClosedFormCase; 7] = [
        ClosedFormCase::KoranyiFull,
        ClosedFormCase::MinkowskiFull,
        ClosedFormCase::Rho3N1,
        ClosedFormCase::PolarizedKoranyiN1,
        ClosedFormCase::PolarizedMinkowskiN1,
        ClosedFormCase::EuclideanKoranyi,
        ClosedFormCase::EuclideanMinkowski,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClosedFormCase::KoranyiFull => "koranyi-full",
            ClosedFormCase::MinkowskiFull => "minkowski-full",
            ClosedFormCase::Rho3N1 => "rho3",
            ClosedFormCase::PolarizedKoranyiN1 => "polarized-koranyi",
            ClosedFormCase::PolarizedMinkowskiN1 => "polarized-minkowski",
            ClosedFormCase::EuclideanKoranyi => "euclidean-koranyi",
            ClosedFormCase::EuclideanMinkowski => "euclidean-minkowski",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|c| c.name() == s)
    }

    pub fn norm_kind(self) -> NormKind {
        match self {
            ClosedFormCase::KoranyiFull
            | ClosedFormCase::PolarizedKoranyiN1
            | ClosedFormCase::EuclideanKoranyi => NormKind::Rho1,
            ClosedFormCase::MinkowskiFull
            | ClosedFormCase::PolarizedMinkowskiN1
            | ClosedFormCase::EuclideanMinkowski => NormKind::Rho2,
            ClosedFormCase::Rho3N1 => NormKind::Rho3,
        }
    }

    pub fn variant(self) -> Variant {
        match self {
            ClosedFormCase::PolarizedKoranyiN1 | ClosedFormCase::PolarizedMinkowskiN1 => {
                Variant::Polarized
            }
            _ => Variant::Full,
        }
    }

    /// Whether the formula covers dimension `n` and twist `a`.
    pub fn applies(self, n: usize, a: f64) -> bool {
        match self {
            ClosedFormCase::KoranyiFull | ClosedFormCase::MinkowskiFull => n >= 1,
            ClosedFormCase::Rho3N1
            | ClosedFormCase::PolarizedKoranyiN1
            | ClosedFormCase::PolarizedMinkowskiN1 => n == 1,
            ClosedFormCase::EuclideanKoranyi | ClosedFormCase::EuclideanMinkowski => {
                n >= 1 && a == 0.0
            }
        }
    }
}

fn split<T: Real>(p: &GroupPoint<T>) -> Result<(T, T)> {
    if p.is_identity() {
        return Err(Error::AtIdentity("closed-form determinant"));
    }
    let r2 = p.x().iter().fold(T::zero(), |s, &v| s + v * v);
    Ok((r2, p.t()))
}

fn require_n1<T: Real>(p: &GroupPoint<T>) -> Result<()> {
    if p.n() != 1 {
        return Err(Error::Unsupported(format!("formula is for n = 1, point has n = {}", p.n())));
    }
    Ok(())
}

/// `det(X^ℓX^rΦ)` from the bracket `det(φA − cB)`.
pub fn lift<T: Real>(family: Family, d: usize, beta: T, phi: T, bracket: T) -> T {
    let dd = T::lit(d as f64);
    let (k, e) = match family {
        Family::Quartic => (T::lit(4.0), -(beta + T::lit(8.0)) * dd / T::lit(4.0)),
        Family::Quadratic => (T::lit(2.0), -(beta + T::lit(4.0)) * dd / T::lit(2.0)),
    };
    (-beta / k).powi(d as i32) * phi.powf(e) * bracket
}

/// Quartic form in `(|x|⁴, t²)` whose sign decides the Koranyi determinant.
pub fn f1<T: Real>(x_norm2: T, t: T, a: T, beta: T) -> T {
    let x4 = x_norm2 * x_norm2;
    let t2 = t * t;
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    two * (beta + T::one()) * x4 * x4
        + (three * (beta + two) - two * a * a) * x4 * t2
        + (beta + two) * a * a * t2 * t2
}

pub fn koranyi_bracket<T: Real>(n: usize, a: T, beta: T, p: &GroupPoint<T>) -> Result<T> {
    let (r2, t) = split(p)?;
    let phi = phi1_flat(p.coords());
    let x4 = r2 * r2;
    Ok(-(T::lit(4.0) * phi).powi(2 * n as i32)
        * (x4 + a * a * t * t).powi(n as i32 - 1)
        * f1(r2, t, a, beta))
}

pub fn closed_det_koranyi<T: Real>(n: usize, a: T, beta: T, p: &GroupPoint<T>) -> Result<T> {
    check_dim(n, p)?;
    let bracket = koranyi_bracket(n, a, beta, p)?;
    Ok(lift(Family::Quartic, 2 * n + 1, beta, phi1_flat(p.coords()), bracket))
}

fn check_dim<T: Real>(n: usize, p: &GroupPoint<T>) -> Result<()> {
    if p.n() != n {
        return Err(Error::DimensionMismatch { expected: 2 * n + 1, got: p.coords().len() });
    }
    Ok(())
}

/// `𝒜 = φ₂^{-2}|x|² + 2φ₂^{-3}t²`.
pub fn script_a<T: Real>(p: &GroupPoint<T>) -> Result<T> {
    let (r2, t) = split(p)?;
    let phi = phi2_flat(p.coords());
    Ok(r2 / (phi * phi) + T::lit(2.0) * t * t / (phi * phi * phi))
}

/// `𝒜` through the equivalent form `φ₂^{-1} + φ₂^{-3}t²`.
pub fn script_a_alt<T: Real>(p: &GroupPoint<T>) -> Result<T> {
    let (_, t) = split(p)?;
    let phi = phi2_flat(p.coords());
    Ok(phi.recip() + t * t / (phi * phi * phi))
}

/// Positivity certificate for the Minkowski determinant when `a² ≤ 1`.
pub fn f2<T: Real>(p: &GroupPoint<T>, a: T, beta: T) -> Result<T> {
    let (r2, t) = split(p)?;
    let phi = phi2_flat(p.coords());
    let sa = script_a(p)?;
    let a2 = a * a;
    let t2 = t * t;
    let phi2 = phi * phi;
    let four = T::lit(4.0);
    Ok(sa * phi2 * phi2 * r2
        + four * phi2 * t2 * (T::one() - a2)
        + T::lit(16.0) * a2 * t2 * t2
        + four * a2 * t2 * t2 * t2 / phi2
        + beta * sa * phi * (phi2 * phi2 + four * a2 * t2 * t2))
}

pub fn minkowski_bracket<T: Real>(n: usize, a: T, beta: T, p: &GroupPoint<T>) -> Result<T> {
    let (_, t) = split(p)?;
    let phi = phi2_flat(p.coords());
    let sa = script_a(p)?;
    let ni = n as i32;
    Ok(-T::lit(2.0).powi(2 * ni + 1)
        * sa.powi(-2 * ni - 3)
        * phi.powi(-(2 * ni + 5))
        * (phi * phi + T::lit(4.0) * a * a * t * t).powi(ni - 1)
        * f2(p, a, beta)?)
}

pub fn closed_det_minkowski<T: Real>(n: usize, a: T, beta: T, p: &GroupPoint<T>) -> Result<T> {
    check_dim(n, p)?;
    let bracket = minkowski_bracket(n, a, beta, p)?;
    Ok(lift(Family::Quadratic, 2 * n + 1, beta, phi2_flat(p.coords()), bracket))
}

pub fn rho3_bracket<T: Real>(a: T, beta: T, p: &GroupPoint<T>) -> Result<T> {
    require_n1(p)?;
    split(p)?;
    let (x1, x2, t) = (p.x()[0], p.x()[1], p.t());
    let phi = phi3_flat(p.coords());
    let two = T::lit(2.0);
    let m = x1 * x1 * x2 * x2;
    let a2 = a * a;
    let t2 = t * t;
    Ok(-T::lit(16.0)
        * phi
        * phi
        * (T::lit(6.0) * (beta + T::one()) * phi * m + a2 * (beta + two) * t2 * t2
            + T::lit(3.0) * (beta + T::lit(4.0)) * m * t2
            - two * a2 * (x1.powi(4) + x2.powi(4)) * t2))
}

pub fn closed_det_rho3_n1<T: Real>(a: T, beta: T, p: &GroupPoint<T>) -> Result<T> {
    let bracket = rho3_bracket(a, beta, p)?;
    Ok(lift(Family::Quartic, 3, beta, phi3_flat(p.coords()), bracket))
}

pub fn polarized_bracket<T: Real>(case: NormCase, a: T, beta: T, p: &GroupPoint<T>) -> Result<T> {
    require_n1(p)?;
    let (r2, t) = split(p)?;
    let (x1, x2) = (p.x()[0], p.x()[1]);
    let two = T::lit(2.0);
    let w = a * x1 * x2 * t;
    match case {
        NormCase::Koranyi => {
            let phi = phi1_flat(p.coords());
            let x4 = r2 * r2;
            Ok(-T::lit(16.0)
                * phi
                * phi
                * (two * (beta + T::one()) * x4 * x4
                    + T::lit(3.0) * (beta + two) * x4 * t * t
                    + two * (beta + two) * phi * w))
        }
        NormCase::Minkowski => {
            let phi = phi2_flat(p.coords());
            let sa = script_a(p)?;
            let inner = beta * sa * phi * (phi * phi + two * w)
                + two * sa * phi * phi * phi
                + T::lit(4.0) * sa * phi * w
                - r2 * r2;
            Ok(-T::lit(8.0) * sa.powi(-5) * phi.powi(-5) * inner)
        }
    }
}

pub fn closed_det_polarized<T: Real>(case: NormCase, a: T, beta: T, p: &GroupPoint<T>) -> Result<T> {
    let bracket = polarized_bracket(case, a, beta, p)?;
    Ok(match case {
        NormCase::Koranyi => lift(Family::Quartic, 3, beta, phi1_flat(p.coords()), bracket),
        NormCase::Minkowski => lift(Family::Quadratic, 3, beta, phi2_flat(p.coords()), bracket),
    })
}

pub fn euclidean_bracket<T: Real>(case: NormCase, n: usize, beta: T, p: &GroupPoint<T>) -> Result<T> {
    check_dim(n, p)?;
    let (r2, t) = split(p)?;
    let ni = n as i32;
    let two = T::lit(2.0);
    match case {
        NormCase::Koranyi => {
            let phi = phi1_flat(p.coords());
            let x4 = r2 * r2;
            Ok(-(T::lit(4.0) * phi).powi(2 * ni)
                * x4.powi(ni)
                * (two * (beta + T::one()) * x4 + T::lit(3.0) * (beta + two) * t * t))
        }
        NormCase::Minkowski => {
            let phi = phi2_flat(p.coords());
            let sa = script_a(p)?;
            Ok(-two.powi(2 * ni + 1)
                * sa.powi(-2 * ni - 3)
                * phi.powi(-5)
                * (beta * sa * phi * phi * phi + sa * phi * phi * r2 + T::lit(4.0) * t * t))
        }
    }
}

pub fn closed_det_euclidean<T: Real>(case: NormCase, n: usize, beta: T, p: &GroupPoint<T>) -> Result<T> {
    let bracket = euclidean_bracket(case, n, beta, p)?;
    let d = 2 * n + 1;
    Ok(match case {
        NormCase::Koranyi => lift(Family::Quartic, d, beta, phi1_flat(p.coords()), bracket),
        NormCase::Minkowski => lift(Family::Quadratic, d, beta, phi2_flat(p.coords()), bracket),
    })
}

/// Closed-form `det(X^ℓX^rΦ)` for a case; `a` must be 0 for the Euclidean cases.
pub fn closed_det<T: Real>(case: ClosedFormCase, n: usize, a: T, beta: T, p: &GroupPoint<T>) -> Result<T> {
    check_dim(n, p)?;
    if !case.applies(n, a.to_f64_lossy()) {
        return Err(Error::Unsupported(format!(
            "{} does not cover n = {}, a = {:?}",
            case.name(),
            n,
            a
        )));
    }
    match case {
        ClosedFormCase::KoranyiFull => closed_det_koranyi(n, a, beta, p),
        ClosedFormCase::MinkowskiFull => closed_det_minkowski(n, a, beta, p),
        ClosedFormCase::Rho3N1 => closed_det_rho3_n1(a, beta, p),
        ClosedFormCase::PolarizedKoranyiN1 => closed_det_polarized(NormCase::Koranyi, a, beta, p),
        ClosedFormCase::PolarizedMinkowskiN1 => {
            closed_det_polarized(NormCase::Minkowski, a, beta, p)
        }
        ClosedFormCase::EuclideanKoranyi => closed_det_euclidean(NormCase::Koranyi, n, beta, p),
        ClosedFormCase::EuclideanMinkowski => closed_det_euclidean(NormCase::Minkowski, n, beta, p),
    }
}

/// Factor `c` with `det(a, b, p) = c · det(a/b, 1, (bx, bt))`.
pub fn scale_reduction_factor<T: Real>(n: usize, b: T) -> T {
    b.powi(2 * (2 * n as i32 + 1))
}

/// One closed form against the AD determinant at one point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub point: Vec<f64>,
    pub closed: f64,
    pub ad: f64,
    pub rel_err: f64,
}

/// Relative error with a floor tied to the Hadamard bound of the AD matrix.
///
/// Near a zero of the determinant the AD value carries absolute rounding of
/// order `ε·Π‖row‖`, so the denominator never drops below `1e-6` times that bound.
pub fn relative_error(closed: f64, ad: f64, hadamard: f64) -> f64 {
    let floor = 1e-6 * hadamard;
    (closed - ad).abs() / closed.abs().max(ad.abs()).max(floor).max(f64::MIN_POSITIVE)
}

/// Compares a closed form with AD at `p`. `beta_shift` perturbs β in the closed
/// form only and exists for negative controls.
pub fn compare_at(
    case: ClosedFormCase,
    n: usize,
    a: f64,
    beta: f64,
    p: &GroupPoint<f64>,
    beta_shift: f64,
) -> Result<Comparison> {
    let ctx = GroupContext::new(n, a, case.variant())?;
    let phase = PhaseSpec::new(QuasiNormSpec::unit(case.norm_kind()), beta)?;
    let h = mixed_hessian(&ctx, &phase, p)?;
    let ad = h.det();
    let closed = closed_det(case, n, a, beta + beta_shift, p)?;
    Ok(Comparison {
        point: p.coords().to_vec(),
        closed,
        ad,
        rel_err: relative_error(closed, ad, h.row_norm_product()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: &[f64], t: f64) -> GroupPoint<f64> {
        GroupPoint::new(x, t)
    }

    #[test]
    fn koranyi_example() {
        let p = pt(&[0.0, 0.0], 1.0);
        assert!((koranyi_bracket(1, 1.0, 2.0, &p).unwrap() + 64.0).abs() < 1e-12);
        assert!((closed_det_koranyi(1, 1.0, 2.0, &p).unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn f1_specializations() {
        assert!((f1(0.0, 1.5, 0.7, 2.0) - 4.0 * 0.49 * 1.5f64.powi(4)).abs() < 1e-12);
        assert!((f1(2.0_f64, 0.0, 0.7, 2.0) - 6.0 * 16.0).abs() < 1e-12);
    }

    #[test]
    fn script_a_and_f2_values() {
        let p = pt(&[0.0, 0.0], 2.0);
        assert!((script_a(&p).unwrap() - 1.0).abs() < 1e-15);
        let q = pt(&[3.0, 4.0], 0.0);
        assert!((script_a(&q).unwrap() - 1.0 / 25.0).abs() < 1e-15);
        let beta = 1.5;
        assert!((f2(&p, 1.0, beta).unwrap() - (20.0 + 10.0 * beta) * 16.0).abs() < 1e-9);
        let x8 = 25f64.powi(4);
        assert!((f2(&q, 0.4, beta).unwrap() - (1.0 + beta) * x8).abs() < 1e-6);
    }

    #[test]
    fn zero_sets() {
        assert_eq!(closed_det_rho3_n1(1.0, 1.0, &pt(&[1.0, 0.0], 0.0)).unwrap(), 0.0);
        let beta = 2.0;
        let t = (2.0f64 / (beta + 2.0)).sqrt();
        assert!(rho3_bracket(1.0, beta, &pt(&[1.0, 0.0], t)).unwrap().abs() < 1e-12);
        assert_eq!(closed_det_polarized(NormCase::Koranyi, 1.0, 1.0, &pt(&[0.0, 0.0], 0.5)).unwrap(), 0.0);
        assert_eq!(closed_det_euclidean(NormCase::Koranyi, 1, 1.0, &pt(&[0.0, 0.0], 0.5)).unwrap(), 0.0);
    }

    #[test]
    fn applicability() {
        assert!(closed_det(ClosedFormCase::EuclideanMinkowski, 1, 0.5, 1.0, &pt(&[1.0, 0.0], 0.0)).is_err());
        assert!(closed_det(ClosedFormCase::Rho3N1, 2, 0.5, 1.0, &pt(&[1.0, 0.0, 0.0, 0.0], 0.0)).is_err());
        assert_eq!(ClosedFormCase::from_name("rho3"), Some(ClosedFormCase::Rho3N1));
    }
}
