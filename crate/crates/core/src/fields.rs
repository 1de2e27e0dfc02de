//! Left and right invariant vector fields and the mixed Hessian `X^ℓ_j X^r_k f`.
//!
//! All derivatives come from [`Jet2`] arithmetic; the outer left derivative
//! also differentiates the position-dependent right-field coefficients, which
//! is what makes the mixed Hessian non-symmetric.

use crate::error::{Error, Result};
use crate::group::{GroupContext, GroupPoint, Variant};
use crate::jet::Jet2;
use crate::linalg::SquareMatrix;
use crate::norms::{phi1_flat, phi2_flat, phi3_flat, PhaseSpec};
use crate::scalar::{Real, Scalar};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// Field index `j` in `1..=2n+1`; `2n+1` is `T = ∂/∂t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldIndex(pub usize);

/// A scalar function on flat coordinates that can be evaluated on jets.
pub trait ScalarFn<T: Real> {
    fn eval<S: Scalar<Base = T>>(&self, z: &[S]) -> S;
}

impl<T: Real> ScalarFn<T> for PhaseSpec<T> {
    fn eval<S: Scalar<Base = T>>(&self, z: &[S]) -> S {
        self.phase_flat(z)
    }
}

/// `φ₁ = |x|⁴ + t²`.
#[derive(Clone, Copy, Debug)]
pub struct Phi1;
/// `φ₂ = ρ₂²`.
#[derive(Clone, Copy, Debug)]
pub struct Phi2;
/// `φ₃ = Σx_i⁴ + t²`.
#[derive(Clone, Copy, Debug)]
pub struct Phi3;
/// The `i`-th flat coordinate (0-based).
#[derive(Clone, Copy, Debug)]
pub struct Coordinate(pub usize);

impl<T: Real> ScalarFn<T> for Phi1 {
    fn eval<S: Scalar<Base = T>>(&self, z: &[S]) -> S {
        phi1_flat(z)
    }
}
impl<T: Real> ScalarFn<T> for Phi2 {
    fn eval<S: Scalar<Base = T>>(&self, z: &[S]) -> S {
        phi2_flat(z)
    }
}
impl<T: Real> ScalarFn<T> for Phi3 {
    fn eval<S: Scalar<Base = T>>(&self, z: &[S]) -> S {
        phi3_flat(z)
    }
}
impl<T: Real> ScalarFn<T> for Coordinate {
    fn eval<S: Scalar<Base = T>>(&self, z: &[S]) -> S {
        z[self.0]
    }
}

/// `p ↦ Φ(q⁻¹ · p)` for a fixed `q`.
#[derive(Clone, Debug)]
pub struct ConvolutionPhase<T: Real> {
    pub ctx: GroupContext<T>,
    pub phase: PhaseSpec<T>,
    pub q: Vec<T>,
}

impl<T: Real> ScalarFn<T> for ConvolutionPhase<T> {
    fn eval<S: Scalar<Base = T>>(&self, z: &[S]) -> S {
        let q: Vec<S> = self.q.iter().map(|&v| S::from_base(v)).collect();
        let mut d = vec![S::zero(); z.len()];
        self.ctx.relative_into(&q, z, &mut d);
        self.phase.phase_flat(&d)
    }
}

fn check_fields<T: Real>(ctx: &GroupContext<T>, j: FieldIndex) -> Result<()> {
    if ctx.variant() == Variant::Polarized && ctx.n() != 1 {
        return Err(Error::Unsupported("polarized fields are defined for n = 1 only".into()));
    }
    if j.0 == 0 || j.0 > ctx.dim() {
        return Err(Error::InvalidParameter(format!(
            "field index {} outside 1..={}",
            j.0,
            ctx.dim()
        )));
    }
    Ok(())
}

/// Coefficients of field `j0` (0-based) at flat point `z`, written into `out`.
#[inline]
fn coefficients_into<T: Real, S: Scalar<Base = T>>(
    ctx: &GroupContext<T>,
    side: Side,
    j0: usize,
    z: &[S],
    out: &mut [S],
) {
    let n = ctx.n();
    let m = 2 * n;
    for c in out.iter_mut() {
        *c = S::zero();
    }
    out[j0] = S::one();
    if j0 == m {
        return;
    }
    let two_a = T::lit(2.0) * ctx.a();
    let sgn = match side {
        Side::Left => T::one(),
        Side::Right => -T::one(),
    };
    out[m] = match ctx.variant() {
        Variant::Full => {
            if j0 < n {
                z[j0 + n].scale(sgn * two_a)
            } else {
                z[j0 - n].scale(-sgn * two_a)
            }
        }
        // Derived from the polarized law by differentiating p·(s e_j) and (s e_j)·p.
        Variant::Polarized => match (side, j0 < n) {
            (Side::Left, true) => S::zero(),
            (Side::Left, false) => z[j0 - n].scale(-two_a),
            (Side::Right, true) => z[j0 + n].scale(-two_a),
            (Side::Right, false) => S::zero(),
        },
    };
}

fn coefficients<T: Real>(
    ctx: &GroupContext<T>,
    side: Side,
    j: FieldIndex,
    p: &GroupPoint<T>,
) -> Result<Vec<T>> {
    ctx.check_point(p)?;
    check_fields(ctx, j)?;
    let z: Vec<Jet2<T>> = p.coords().iter().map(|&v| Jet2::constant(v)).collect();
    let mut out = vec![Jet2::default(); ctx.dim()];
    coefficients_into(ctx, side, j.0 - 1, &z, &mut out);
    Ok(out.iter().map(|c| c.v).collect())
}

pub fn left_coefficients<T: Real>(
    ctx: &GroupContext<T>,
    j: FieldIndex,
    p: &GroupPoint<T>,
) -> Result<Vec<T>> {
    coefficients(ctx, Side::Left, j, p)
}

pub fn right_coefficients<T: Real>(
    ctx: &GroupContext<T>,
    k: FieldIndex,
    p: &GroupPoint<T>,
) -> Result<Vec<T>> {
    coefficients(ctx, Side::Right, k, p)
}

/// `(X_j f)(p)` for the chosen side.
pub fn apply_field<T: Real, F: ScalarFn<T>>(
    ctx: &GroupContext<T>,
    side: Side,
    j: FieldIndex,
    f: &F,
    p: &GroupPoint<T>,
) -> Result<T> {
    let u = coefficients(ctx, side, j, p)?;
    let z: Vec<Jet2<T>> = p
        .coords()
        .iter()
        .zip(&u)
        .map(|(&v, &c)| Jet2::new(v, c, T::zero(), T::zero()))
        .collect();
    Ok(f.eval(&z).d1)
}

/// Every field of one side applied to `f` at `p`.
pub fn field_gradient<T: Real, F: ScalarFn<T>>(
    ctx: &GroupContext<T>,
    side: Side,
    f: &F,
    p: &GroupPoint<T>,
) -> Result<Vec<T>> {
    (1..=ctx.dim()).map(|j| apply_field(ctx, side, FieldIndex(j), f, p)).collect()
}

/// Plain coordinate gradient of `f` at flat point `z`.
pub fn coordinate_gradient<T: Real, F: ScalarFn<T>>(f: &F, z: &[T]) -> Vec<T> {
    let mut buf: Vec<Jet2<T>> = z.iter().map(|&v| Jet2::constant(v)).collect();
    (0..z.len())
        .map(|i| {
            buf[i].d1 = T::one();
            let d = f.eval(&buf).d1;
            buf[i].d1 = T::zero();
            d
        })
        .collect()
}

fn check_hessian_args<T: Real>(ctx: &GroupContext<T>, p: &GroupPoint<T>) -> Result<()> {
    ctx.check_point(p)?;
    check_fields(ctx, FieldIndex(1))
}

/// Matrix with entries `X^ℓ_j X^r_k f (p)`.
pub fn mixed_hessian<T: Real, F: ScalarFn<T>>(
    ctx: &GroupContext<T>,
    f: &F,
    p: &GroupPoint<T>,
) -> Result<SquareMatrix<T>> {
    check_hessian_args(ctx, p)?;
    let d = ctx.dim();
    let pc = p.coords();
    let pj: Vec<Jet2<T>> = pc.iter().map(|&v| Jet2::constant(v)).collect();
    let mut uj = vec![Jet2::<T>::default(); d];
    let mut moved = vec![Jet2::<T>::default(); d];
    let mut w = vec![Jet2::<T>::default(); d];
    let mut z = vec![Jet2::<T>::default(); d];
    let mut h = SquareMatrix::zeros(d);
    for j in 0..d {
        coefficients_into(ctx, Side::Left, j, &pj, &mut uj);
        let u: Vec<T> = uj.iter().map(|c| c.v).collect();
        // Position p + s·u carried to first order in s.
        for i in 0..d {
            moved[i] = Jet2::new(pc[i], u[i], T::zero(), T::zero());
        }
        for k in 0..d {
            coefficients_into(ctx, Side::Right, k, &moved, &mut w);
            // q + r·w(q): the s-derivative of w feeds the mixed slot.
            for i in 0..d {
                z[i] = Jet2::new(pc[i], u[i], w[i].v, w[i].d1);
            }
            h.set(j, k, f.eval(&z).d12);
        }
    }
    Ok(h)
}

/// Mixed Hessian by central differences of the composed first-order operators.
pub fn mixed_hessian_fd<T: Real, F: ScalarFn<T>>(
    ctx: &GroupContext<T>,
    f: &F,
    p: &GroupPoint<T>,
    step: T,
) -> Result<SquareMatrix<T>> {
    check_hessian_args(ctx, p)?;
    let d = ctx.dim();
    let mut h = SquareMatrix::zeros(d);
    let coeffs = |side: Side, k: usize, q: &[T]| -> Vec<T> {
        let z: Vec<Jet2<T>> = q.iter().map(|&v| Jet2::constant(v)).collect();
        let mut w = vec![Jet2::default(); d];
        coefficients_into(ctx, side, k, &z, &mut w);
        w.iter().map(|c| c.v).collect()
    };
    let xr = |k: usize, q: &[T]| -> T {
        let w = coeffs(Side::Right, k, q);
        let plus: Vec<T> = q.iter().zip(&w).map(|(&a, &c)| a + step * c).collect();
        let minus: Vec<T> = q.iter().zip(&w).map(|(&a, &c)| a - step * c).collect();
        (f.eval(&plus) - f.eval(&minus)) / (step + step)
    };
    for j in 0..d {
        let u = coeffs(Side::Left, j, p.coords());
        let plus: Vec<T> = p.coords().iter().zip(&u).map(|(&a, &c)| a + step * c).collect();
        let minus: Vec<T> = p.coords().iter().zip(&u).map(|(&a, &c)| a - step * c).collect();
        for k in 0..d {
            h.set(j, k, (xr(k, &plus) - xr(k, &minus)) / (step + step));
        }
    }
    Ok(h)
}

fn check_phase_point<T: Real>(phase: &PhaseSpec<T>, p: &GroupPoint<T>) -> Result<()> {
    if !phase.norm.kind.is_smooth() {
        return Err(Error::Unsupported("rho0 is not smooth away from the origin".into()));
    }
    if p.is_identity() {
        return Err(Error::AtIdentity("mixed Hessian of the phase"));
    }
    Ok(())
}

/// `det(X^ℓ_j X^r_k Φ)(p)` for `Φ = ρ^{-β}`.
pub fn mixed_hessian_det<T: Real>(
    ctx: &GroupContext<T>,
    phase: &PhaseSpec<T>,
    p: &GroupPoint<T>,
) -> Result<T> {
    check_phase_point(phase, p)?;
    Ok(mixed_hessian(ctx, phase, p)?.det())
}

/// Determinant divided by the product of row norms.
pub fn normalized_mixed_hessian_det<T: Real>(
    ctx: &GroupContext<T>,
    phase: &PhaseSpec<T>,
    p: &GroupPoint<T>,
) -> Result<T> {
    check_phase_point(phase, p)?;
    Ok(mixed_hessian(ctx, phase, p)?.normalized_det())
}
