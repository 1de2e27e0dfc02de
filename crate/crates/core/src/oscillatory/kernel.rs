//! Oscillatory kernels `Ψ(p, q) e^{iλΦ(p, q)}` on a pair of grid boxes.

use super::grid::{BoxSpec, GridSpec};
use super::partition::{plateau, theta_partition};
use crate::error::{Error, Result};
use crate::fields::{coordinate_gradient, ScalarFn};
use crate::group::GroupContext;
use crate::norms::{PhaseSpec, QuasiNormSpec};
use crate::scalar::Scalar;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// Real two-point phase `Φ(p, q)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TwoPointPhase {
    /// `Φ ≡ 0`.
    Zero,
    /// `Φ(p, q) = p·q`.
    Bilinear,
    /// `Φ(p, q) = ρ(q⁻¹p)^{-β}`.
    Group(PhaseSpec<f64>),
}

/// Radial factor of the amplitude, a function of `ρ(q⁻¹p)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RadialProfile {
    One,
    /// `ϑ(ρ / radius)`.
    Annulus { radius: f64 },
    /// `ϑ(ρ) ρ^{-2n-2-α}`.
    Dyadic { alpha: f64 },
}

/// `Ψ(p, q) = scale · ζ_T(p) ζ_S(q) · radial(ρ(q⁻¹p))`, where `ζ` are plateau
/// cutoffs of the grid boxes with flat part `plateau` in local coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub scale: f64,
    pub plateau: f64,
    pub radial: RadialProfile,
}

impl Amplitude {
    pub fn cutoffs(plateau: f64) -> Self {
        Amplitude { scale: 1.0, plateau, radial: RadialProfile::One }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum OscMode {
    Generic { lambda: f64, phase: TwoPointPhase, amplitude: Amplitude },
    /// `2^{jα} ϑ(ρ) ρ^{-2n-2-α} e^{i 2^{jβ} ρ^{-β}}` times box cutoffs.
    Dyadic { j: i32, alpha: f64, beta: f64, norm: QuasiNormSpec<f64>, plateau: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscKernelSpec {
    pub ctx: GroupContext<f64>,
    pub mode: OscMode,
}

/// Mode-independent description used by the operators.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Resolved {
    pub ctx: GroupContext<f64>,
    pub lambda: f64,
    pub amp_scale: f64,
    pub plateau: f64,
    pub phase: TwoPointPhase,
    pub radial: RadialProfile,
}

impl OscKernelSpec {
    pub fn generic(ctx: GroupContext<f64>, lambda: f64, phase: TwoPointPhase, amplitude: Amplitude) -> Self {
        OscKernelSpec { ctx, mode: OscMode::Generic { lambda, phase, amplitude } }
    }

    pub fn dyadic(ctx: GroupContext<f64>, j: i32, alpha: f64, beta: f64, norm: QuasiNormSpec<f64>, plateau: f64) -> Self {
        OscKernelSpec { ctx, mode: OscMode::Dyadic { j, alpha, beta, norm, plateau } }
    }

    /// Oscillation scale: `λ`, or `2^{jβ}` in dyadic mode.
    pub fn oscillation(&self) -> f64 {
        self.resolved().lambda
    }

    pub(crate) fn resolved(&self) -> Resolved {
        match self.mode {
            OscMode::Generic { lambda, phase, amplitude } => Resolved {
                ctx: self.ctx,
                lambda,
                amp_scale: amplitude.scale,
                plateau: amplitude.plateau,
                phase,
                radial: amplitude.radial,
            },
            OscMode::Dyadic { j, alpha, beta, norm, plateau } => Resolved {
                ctx: self.ctx,
                lambda: 2f64.powf(j as f64 * beta),
                amp_scale: 2f64.powf(j as f64 * alpha),
                plateau,
                phase: TwoPointPhase::Group(PhaseSpec { norm, beta }),
                radial: RadialProfile::Dyadic { alpha },
            },
        }
    }

    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        let r = self.resolved();
        if !(r.lambda >= 0.0 && r.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("oscillation scale must be finite and >= 0, got {}", r.lambda)));
        }
        if !(0.0..1.0).contains(&r.plateau) {
            return Err(Error::InvalidParameter(format!("plateau must lie in [0, 1), got {}", r.plateau)));
        }
        match r.phase {
            TwoPointPhase::Group(ph) => {
                if grid.axes() != self.ctx.dim() {
                    return Err(Error::DimensionMismatch { expected: self.ctx.dim(), got: grid.axes() });
                }
                PhaseSpec::new(ph.norm, ph.beta)?;
                QuasiNormSpec::new(ph.norm.kind, ph.norm.b)?;
            }
            _ => {
                if r.radial != RadialProfile::One {
                    return Err(Error::Unsupported("radial amplitude profiles need a group phase".into()));
                }
            }
        }
        if let RadialProfile::Annulus { radius } = r.radial {
            if !(radius > 0.0) {
                return Err(Error::InvalidParameter("annulus radius must be positive".into()));
            }
        }
        Ok(())
    }
}

impl Resolved {
    /// Whether `K(p, q) = ζ_T(p) ζ_S(q) k(q⁻¹p)`.
    pub fn is_group_convolution(&self) -> bool {
        matches!(self.phase, TwoPointPhase::Group(_))
    }

    #[inline]
    pub fn cutoff(&self, b: &BoxSpec, p: &[f64]) -> f64 {
        let mut v = 1.0;
        for (a, &x) in p.iter().enumerate() {
            v *= plateau(b.local(a, x), self.plateau);
            if v == 0.0 {
                break;
            }
        }
        v
    }

    #[inline]
    fn radial(&self, rho: f64) -> f64 {
        match self.radial {
            RadialProfile::One => 1.0,
            RadialProfile::Annulus { radius } => theta_partition(rho / radius),
            RadialProfile::Dyadic { alpha } => {
                let w = theta_partition(rho);
                if w == 0.0 {
                    0.0
                } else {
                    w * rho.powf(-(self.ctx.dim() as f64 + 1.0) - alpha)
                }
            }
        }
    }

    /// `k(z)` for a displacement `z`; zero at the identity.
    #[inline]
    pub fn convolution_kernel(&self, z: &[f64]) -> Complex64 {
        let ph = match self.phase {
            TwoPointPhase::Group(ph) => ph,
            _ => unreachable!("convolution kernel requested for a non-group phase"),
        };
        let rho = ph.norm.evaluate_flat(z);
        if rho == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let w = self.amp_scale * self.radial(rho);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(w, self.lambda * rho.powf(-ph.beta))
    }

    /// `Φ(p, q)` without the `λ` factor.
    #[inline]
    pub fn phase_value(&self, p: &[f64], q: &[f64], buf: &mut [f64]) -> f64 {
        match self.phase {
            TwoPointPhase::Zero => 0.0,
            TwoPointPhase::Bilinear => p.iter().zip(q).map(|(a, b)| a * b).sum(),
            TwoPointPhase::Group(ph) => {
                self.ctx.relative_into(q, p, buf);
                let rho = ph.norm.evaluate_flat(buf);
                if rho == 0.0 {
                    0.0
                } else {
                    rho.powf(-ph.beta)
                }
            }
        }
    }

    /// Full kernel value at a node pair.
    #[inline]
    pub fn eval(&self, grid: &GridSpec, p: &[f64], q: &[f64], buf: &mut [f64]) -> Complex64 {
        let c = self.cutoff(&grid.target, p) * self.cutoff(&grid.source, q);
        if c == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        match self.phase {
            TwoPointPhase::Group(_) => {
                self.ctx.relative_into(q, p, buf);
                self.convolution_kernel(buf) * c
            }
            _ => {
                let phi = self.phase_value(p, q, buf);
                Complex64::from_polar(c * self.amp_scale, self.lambda * phi)
            }
        }
    }

    /// `|Ψ(p, q)|` without the phase.
    pub fn amplitude(&self, grid: &GridSpec, p: &[f64], q: &[f64], buf: &mut [f64]) -> f64 {
        let c = self.cutoff(&grid.target, p) * self.cutoff(&grid.source, q);
        if c == 0.0 {
            return 0.0;
        }
        match self.phase {
            TwoPointPhase::Group(ph) => {
                self.ctx.relative_into(q, p, buf);
                let rho = ph.norm.evaluate_flat(buf);
                if rho == 0.0 {
                    0.0
                } else {
                    c * self.amp_scale.abs() * self.radial(rho)
                }
            }
            _ => c * self.amp_scale.abs(),
        }
    }
}

/// `Φ` as a function of one argument with the other fixed.
struct Slice<'a> {
    r: &'a Resolved,
    other: &'a [f64],
    /// Whether the free variable is the target point `p`.
    free_is_target: bool,
}

impl ScalarFn<f64> for Slice<'_> {
    fn eval<S: Scalar<Base = f64>>(&self, z: &[S]) -> S {
        let other: Vec<S> = self.other.iter().map(|&v| S::from_base(v)).collect();
        let (p, q) = if self.free_is_target { (z, &other[..]) } else { (&other[..], z) };
        match self.r.phase {
            TwoPointPhase::Zero => S::zero(),
            TwoPointPhase::Bilinear => {
                let mut acc = S::zero();
                for (a, b) in p.iter().zip(q) {
                    acc += *a * *b;
                }
                acc
            }
            TwoPointPhase::Group(ph) => {
                let mut d = vec![S::zero(); z.len()];
                self.r.ctx.relative_into(q, p, &mut d);
                ph.phase_flat(&d)
            }
        }
    }
}

/// Result of the phase-resolution check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    /// Largest phase change per cell of the mixed phase, in radians.
    pub max_increment: f64,
    /// Largest oscillation scale that keeps the increment at `π/2`.
    pub max_feasible_scale: f64,
}

/// Largest per-cell increment of the mixed phase
/// `λ[Φ(p, q) − Φ(p, q_c) − Φ(p_c, q) + Φ(p_c, q_c)]` on a sub-lattice of node pairs
/// where the amplitude is at least `1e-3` of its sampled maximum.
///
/// The subtracted one-variable terms are unitary modulations of the discrete
/// operator and leave its singular values unchanged, so only the mixed part
/// needs to be resolved.
pub(crate) fn mixed_phase_resolution(r: &Resolved, grid: &GridSpec) -> Resolution {
    let d = grid.axes();
    let per = grid.points_per_axis.min(7);
    let pick = |b: &BoxSpec| -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = (0..d)
            .map(|a| {
                let all = grid.axis_nodes(b, a);
                (0..per).map(|k| all[k * (all.len() - 1) / (per - 1).max(1)]).collect()
            })
            .collect();
        let total = per.pow(d as u32);
        (0..total)
            .map(|mut k| {
                let mut v = vec![0.0; d];
                for a in (0..d).rev() {
                    v[a] = axes[a][k % per];
                    k /= per;
                }
                v
            })
            .collect()
    };
    let ps = pick(&grid.target);
    let qs = pick(&grid.source);
    let hp = grid.spacing(&grid.target);
    let hq = grid.spacing(&grid.source);
    let pc = grid.target.center.clone();
    let qc = grid.source.center.clone();
    let mut buf = vec![0.0; d];
    let amps: Vec<f64> = ps
        .iter()
        .flat_map(|p| qs.iter().map(move |q| (p, q)))
        .map(|(p, q)| r.amplitude(grid, p, q, &mut buf))
        .collect();
    let amax = amps.iter().cloned().fold(0.0, f64::max);
    let grad = |free: &[f64], other: &[f64], target: bool| -> Vec<f64> {
        coordinate_gradient(&Slice { r, other, free_is_target: target }, free)
    };
    // Two admissible references: no modulation, and modulation by the phase at
    // the opposite box center. Both leave singular values unchanged, so the
    // smaller bound is kept. The centered one is singular when a center lies in
    // the other box, which is common for convolution kernels.
    let mut worst: f64 = 0.0;
    if amax > 0.0 && !matches!(r.phase, TwoPointPhase::Zero) {
        let gp_ref: Vec<Vec<f64>> = ps.iter().map(|p| grad(p, &qc, true)).collect();
        let gq_ref: Vec<Vec<f64>> = qs.iter().map(|q| grad(q, &pc, false)).collect();
        let (mut plain, mut centered) = (0.0f64, 0.0f64);
        for (i, p) in ps.iter().enumerate() {
            for (k, q) in qs.iter().enumerate() {
                if amps[i * qs.len() + k] < 1e-3 * amax {
                    continue;
                }
                let gp = grad(p, q, true);
                let gq = grad(q, p, false);
                for a in 0..d {
                    plain = plain.max(gp[a].abs() * hp[a]).max(gq[a].abs() * hq[a]);
                    centered = centered
                        .max((gp[a] - gp_ref[i][a]).abs() * hp[a])
                        .max((gq[a] - gq_ref[k][a]).abs() * hq[a]);
                }
            }
        }
        worst = plain.min(centered);
    }
    let max_increment = r.lambda * worst;
    Resolution {
        max_increment,
        max_feasible_scale: if worst > 0.0 { FRAC_PI_2 / worst } else { f64::INFINITY },
    }
}

/// Fails with [`Error::Nyquist`] when the mixed phase moves more than `π/2` per cell.
pub fn check_resolution(spec: &OscKernelSpec, grid: &GridSpec) -> Result<Resolution> {
    spec.validate(grid)?;
    let r = spec.resolved();
    let res = mixed_phase_resolution(&r, grid);
    if res.max_increment > FRAC_PI_2 {
        let (scale_name, max_feasible) = match spec.mode {
            OscMode::Generic { .. } => ("lambda", res.max_feasible_scale),
            OscMode::Dyadic { beta, .. } => ("j", (res.max_feasible_scale.log2() / beta).floor()),
        };
        return Err(Error::Nyquist { max_increment: res.max_increment, limit: FRAC_PI_2, scale_name, max_feasible });
    }
    Ok(res)
}
