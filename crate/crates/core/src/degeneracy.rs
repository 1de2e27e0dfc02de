//! Where the Koranyi-type mixed Hessian degenerates, and sampled certificates
//! that it does not.

use crate::error::{Error, Result};
use crate::fields::{coordinate_gradient, mixed_hessian, ScalarFn};
use crate::group::{GroupContext, GroupPoint, Variant};
use crate::norms::{NormKind, PhaseSpec, QuasiNormSpec};
use crate::sampling::{cube_to_angles, jittered_sequence, sample_region, sphere_point, SamplerSpec};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Threshold on `a²` below which the Koranyi Hessian is non-degenerate.
pub fn c_beta(beta: f64) -> Result<f64> {
    if !(beta >= 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be nonnegative, got {beta}")));
    }
    let k = 2.0 * beta + 5.0;
    Ok((beta + 2.0) / 2.0 * (k + (k * k - 9.0).sqrt()))
}

/// Discriminant of the quadratic form `f₁` in `(|x|⁴, t²)`.
pub fn discriminant(a: f64, beta: f64) -> f64 {
    let a2 = a * a;
    4.0 * a2 * a2 - 4.0 * (beta + 2.0) * (2.0 * beta + 5.0) * a2 + 9.0 * (beta + 2.0).powi(2)
}

/// Positive ratios `|x|⁴ / t²` on which `f₁` vanishes.
///
/// A discriminant within rounding of zero is treated as a double root.
pub fn paraboloid_slopes(a: f64, beta: f64) -> Vec<f64> {
    let a2 = a * a;
    let delta = discriminant(a, beta);
    let scale = 4.0 * a2 * a2 + 4.0 * (beta + 2.0) * (2.0 * beta + 5.0) * a2 + 9.0 * (beta + 2.0).powi(2);
    let lead = 2.0 * a2 - 3.0 * (beta + 2.0);
    let den = 4.0 * (beta + 1.0);
    let mut out = Vec::new();
    if delta.abs() <= 1e-12 * scale {
        out.push(lead / den);
    } else if delta > 0.0 {
        let s = delta.sqrt();
        out.push((lead - s) / den);
        out.push((lead + s) / den);
    }
    out.retain(|&v| v > 0.0);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Certified,
    DegeneracyFound,
    Inconclusive,
}

impl Verdict {
    pub fn from_minimum(min: f64, tol: f64) -> Self {
        if min < tol {
            Verdict::DegeneracyFound
        } else if min < 10.0 * tol {
            Verdict::Inconclusive
        } else {
            Verdict::Certified
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertReport {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub beta: f64,
    pub norm: NormKind,
    pub variant: Variant,
    /// Twist after the reduction `(a, b) → (a/b, 1)`.
    pub reduced_a: f64,
    pub samples: usize,
    pub tol: f64,
    pub min_abs_normalized_det: f64,
    pub argmin: Vec<f64>,
    pub verdict: Verdict,
    pub near_zero: Vec<Vec<f64>>,
}

/// `|normalized det|` on the unit sphere of a `b = 1` norm as a function of angles.
struct DetObjective {
    ctx: GroupContext<f64>,
    phase: PhaseSpec<f64>,
}

impl DetObjective {
    fn new(ctx: &GroupContext<f64>, spec: &QuasiNormSpec<f64>, beta: f64) -> Result<Self> {
        if !spec.kind.is_smooth() {
            return Err(Error::Unsupported("rho0 is not smooth away from the origin".into()));
        }
        if ctx.variant() == Variant::Polarized && ctx.n() != 1 {
            return Err(Error::Unsupported("polarized fields are defined for n = 1 only".into()));
        }
        let reduced = ctx.with_a(ctx.a() / spec.b);
        let phase = PhaseSpec::new(QuasiNormSpec::unit(spec.kind), beta)?;
        Ok(DetObjective { ctx: reduced, phase })
    }

    fn point(&self, angles: &[f64]) -> GroupPoint<f64> {
        sphere_point(&self.phase.norm, angles)
    }

    fn signed_at(&self, p: &GroupPoint<f64>) -> f64 {
        mixed_hessian(&self.ctx, &self.phase, p).map(|h| h.normalized_det()).unwrap_or(f64::NAN)
    }

    fn signed(&self, angles: &[f64]) -> f64 {
        self.signed_at(&self.point(angles))
    }

    fn value(&self, angles: &[f64]) -> f64 {
        self.signed(angles).abs()
    }
}

fn angle_bounds(m: usize) -> Vec<(f64, f64)> {
    (0..m).map(|i| if i == m - 1 && m > 1 { (0.0, 2.0 * PI) } else { (0.0, PI) }).collect()
}

/// Coordinate descent: a local bracket search then golden section per coordinate.
pub fn coordinate_descent<F: Fn(&[f64]) -> f64>(
    f: F,
    start: &[f64],
    bounds: &[(f64, f64)],
    sweeps: usize,
) -> (Vec<f64>, f64) {
    let mut x = start.to_vec();
    let mut best = f(&x);
    let mut h: Vec<f64> = bounds.iter().map(|(lo, hi)| 0.02 * (hi - lo)).collect();
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..sweeps {
        let before = best;
        for i in 0..x.len() {
            let (lo, hi) = bounds[i];
            let eval = |v: f64, x: &mut Vec<f64>| {
                let old = x[i];
                x[i] = v;
                let r = f(x);
                x[i] = old;
                r
            };
            let c = x[i];
            let mut cand = c;
            let mut cval = best;
            for k in [-2.0, -1.0, 1.0, 2.0] {
                let v = (c + k * h[i]).clamp(lo, hi);
                let fv = eval(v, &mut x);
                if fv < cval {
                    cval = fv;
                    cand = v;
                }
            }
            let (mut a, mut b) = ((cand - h[i]).max(lo), (cand + h[i]).min(hi));
            let mut c1 = b - gr * (b - a);
            let mut c2 = a + gr * (b - a);
            let mut f1 = eval(c1, &mut x);
            let mut f2 = eval(c2, &mut x);
            for _ in 0..60 {
                if f1 < f2 {
                    b = c2;
                    c2 = c1;
                    f2 = f1;
                    c1 = b - gr * (b - a);
                    f1 = eval(c1, &mut x);
                } else {
                    a = c1;
                    c1 = c2;
                    f1 = f2;
                    c2 = a + gr * (b - a);
                    f2 = eval(c2, &mut x);
                }
                if b - a < 1e-15 * (1.0 + a.abs()) {
                    break;
                }
            }
            for (v, fv) in [(c1, f1), (c2, f2), (cand, cval)] {
                if fv < best {
                    best = fv;
                    x[i] = v;
                }
            }
            // Grow the step while the minimum keeps escaping the bracket.
            h[i] = if (x[i] - c).abs() >= 1.5 * h[i] {
                (h[i] * 2.0).min(0.25 * (hi - lo))
            } else {
                (h[i] * 0.5).max(1e-9 * (hi - lo))
            };
        }
        if best == 0.0 || (before - best).abs() <= 1e-15 * before.abs() && before.is_finite() && h.iter().all(|&v| v < 1e-6) {
            break;
        }
    }
    (x, best)
}

/// Merges points closer than `radius`, keeping the one with the smaller value.
fn cluster(mut pts: Vec<(Vec<f64>, f64)>, radius: f64) -> Vec<(Vec<f64>, f64)> {
    pts.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut kept: Vec<(Vec<f64>, f64)> = Vec::new();
    for (p, v) in pts {
        let close = kept.iter().any(|(q, _)| {
            p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() < radius
        });
        if !close {
            kept.push((p, v));
        }
    }
    kept.sort_by(|a, b| {
        a.0.iter().zip(&b.0).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    kept
}

/// Samples the normalized determinant and decides whether it stays away from zero.
///
/// The problem is first reduced to `b = 1` with twist `a/b`.
pub fn certify(
    ctx: &GroupContext<f64>,
    spec: &QuasiNormSpec<f64>,
    beta: f64,
    sampler: &SamplerSpec,
    tol: f64,
) -> Result<CertReport> {
    let obj = DetObjective::new(ctx, spec, beta)?;
    let n = ctx.n();
    let samples = sample_region(&obj.phase.norm, n, sampler)?;
    let mut scored: Vec<(Vec<f64>, f64, f64)> = samples
        .into_iter()
        .map(|(ang, radius, p)| {
            let v = obj.signed_at(&p).abs();
            (ang, radius, v)
        })
        .collect();
    scored.sort_by(|a, b| a.2.total_cmp(&b.2));
    let bounds = angle_bounds(2 * n);
    let mut found: Vec<(Vec<f64>, f64)> = Vec::new();
    let keep = if sampler.refine { scored.len().min(16) } else { scored.len() };
    for (ang, radius, v) in scored.iter().take(keep) {
        let (ang, v) = if sampler.refine {
            coordinate_descent(|x| obj.value(x), ang, &bounds, 50)
        } else {
            (ang.clone(), *v)
        };
        let p = obj.point(&ang).dilate(*radius).expect("positive radius");
        found.push((p.into_coords(), v));
    }
    let (argmin, min) = found
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .cloned()
        .unwrap_or((vec![], f64::INFINITY));
    let near: Vec<(Vec<f64>, f64)> = found.into_iter().filter(|(_, v)| *v < tol).collect();
    let near_zero = cluster(near, 1e-3).into_iter().map(|(p, _)| p).collect();
    Ok(CertReport {
        n,
        a: ctx.a(),
        b: spec.b,
        beta,
        norm: spec.kind,
        variant: ctx.variant(),
        reduced_a: obj.ctx.a(),
        samples: sampler.count,
        tol,
        min_abs_normalized_det: min,
        argmin,
        verdict: Verdict::from_minimum(min, tol),
        near_zero,
    })
}

/// A located zero of the normalized determinant on the unit quasi-sphere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroPoint {
    pub point: Vec<f64>,
    pub normalized_det: f64,
}

fn axis_values(i: usize, m: usize, res: usize) -> Vec<f64> {
    let mut v: Vec<f64> = if i == m - 1 && m > 1 {
        let mut v: Vec<f64> = (0..res).map(|k| 2.0 * PI * k as f64 / res as f64).collect();
        v.extend([0.0, PI / 2.0, PI, 1.5 * PI]);
        v
    } else {
        let mut v: Vec<f64> = (0..res).map(|k| PI * k as f64 / (res - 1) as f64).collect();
        v.extend([0.0, PI / 2.0, PI]);
        v
    };
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    v
}

/// Dense angular scan of the unit quasi-sphere for zeros of the normalized determinant.
///
/// Candidates are sign changes and discrete local minima along each axis;
/// each is refined and the survivors below `tol` are clustered.
pub fn zero_scan(
    ctx: &GroupContext<f64>,
    spec: &QuasiNormSpec<f64>,
    beta: f64,
    resolution: usize,
    tol: f64,
) -> Result<Vec<ZeroPoint>> {
    if resolution < 2 {
        return Err(Error::InvalidParameter("scan resolution must be at least 2".into()));
    }
    let obj = DetObjective::new(ctx, spec, beta)?;
    let m = 2 * ctx.n();
    let axes: Vec<Vec<f64>> = (0..m).map(|i| axis_values(i, m, resolution)).collect();
    let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let total: usize = shape.iter().product();
    let unravel = |mut k: usize| -> Vec<usize> {
        let mut idx = vec![0; m];
        for i in (0..m).rev() {
            idx[i] = k % shape[i];
            k /= shape[i];
        }
        idx
    };
    let ravel = |idx: &[usize]| idx.iter().zip(&shape).fold(0, |acc, (&i, &s)| acc * s + i);
    let angles_of = |idx: &[usize]| -> Vec<f64> { idx.iter().enumerate().map(|(i, &k)| axes[i][k]).collect() };
    let vals: Vec<f64> = (0..total).map(|k| obj.signed(&angles_of(&unravel(k)))).collect();

    let mut cands: Vec<Vec<f64>> = Vec::new();
    for k in 0..total {
        let idx = unravel(k);
        let v = vals[k];
        if v.abs() < tol {
            cands.push(angles_of(&idx));
            continue;
        }
        for ax in 0..m {
            let periodic = ax == m - 1 && m > 1;
            let step = |d: isize| -> Option<usize> {
                let mut j = idx.clone();
                let s = shape[ax] as isize;
                let pos = idx[ax] as isize + d;
                j[ax] = if periodic {
                    pos.rem_euclid(s) as usize
                } else if pos < 0 || pos >= s {
                    return None;
                } else {
                    pos as usize
                };
                Some(ravel(&j))
            };
            if let Some(up) = step(1) {
                if v * vals[up] < 0.0 {
                    let pick = if v.abs() < vals[up].abs() { idx.clone() } else { unravel(up) };
                    cands.push(angles_of(&pick));
                }
            }
            let lo = step(-1).map(|j| vals[j].abs()).unwrap_or(f64::INFINITY);
            let hi = step(1).map(|j| vals[j].abs()).unwrap_or(f64::INFINITY);
            if v.abs() <= lo && v.abs() <= hi && v.abs() < 0.05 {
                cands.push(angles_of(&idx));
            }
        }
    }
    let bounds = angle_bounds(m);
    let mut refined = Vec::new();
    for c in cands {
        let (ang, v) = coordinate_descent(|x| obj.value(x), &c, &bounds, 50);
        if v < tol {
            refined.push((obj.point(&ang).into_coords(), v));
        }
    }
    Ok(cluster(refined, 1e-3)
        .into_iter()
        .map(|(point, normalized_det)| ZeroPoint { point, normalized_det })
        .collect())
}

/// `(y, s) ↦ ρ(y, s)^{-β} − ρ((x, t)·(y, s))^{-β}` for fixed `(x, t)`.
struct SeparationFn {
    ctx: GroupContext<f64>,
    phase: PhaseSpec<f64>,
    x: Vec<f64>,
}

impl ScalarFn<f64> for SeparationFn {
    fn eval<S: Scalar<Base = f64>>(&self, z: &[S]) -> S {
        let x: Vec<S> = self.x.iter().map(|&v| S::from_base(v)).collect();
        let mut prod = vec![S::zero(); z.len()];
        self.ctx.multiply_into(&x, z, &mut prod);
        self.phase.phase_flat(z) - self.phase.phase_flat(&prod)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub ratio: f64,
    pub samples: usize,
    pub infimum: f64,
    /// `(x, t)` at the infimum.
    pub argmin_xt: Vec<f64>,
    /// `(y, s)` at the infimum, on the unit quasi-sphere.
    pub argmin_ys: Vec<f64>,
}

/// Sampled infimum of `|∇_{(y,s)}[ρ(y,s)^{-β} − ρ((x,t)·(y,s))^{-β}]|` over
/// `ρ(y,s) = 1` and `r ≤ ρ((x,t)·(y,s)) ≤ 8r`.
pub fn gradient_separation(
    ctx: &GroupContext<f64>,
    spec: &QuasiNormSpec<f64>,
    beta: f64,
    ratio: f64,
    sampler: &SamplerSpec,
) -> Result<SeparationReport> {
    if !(ratio > 1.0) {
        return Err(Error::InvalidParameter(format!("separation ratio must exceed 1, got {ratio}")));
    }
    if !spec.kind.is_smooth() {
        return Err(Error::Unsupported("rho0 is not smooth away from the origin".into()));
    }
    sampler.validate()?;
    let phase = PhaseSpec::new(*spec, beta)?;
    let m = 2 * ctx.n();
    let mut best = (f64::INFINITY, vec![], vec![]);
    for u in jittered_sequence(2 * m + 1, sampler.count, sampler.seed) {
        let ys = sphere_point(spec, &cube_to_angles(&u[..m]));
        let radius = ratio * 8f64.powf(u[2 * m]);
        let w = sphere_point(spec, &cube_to_angles(&u[m..2 * m])).dilate(radius)?;
        let xt = ctx.multiply(&w, &ctx.inverse(&ys)?)?;
        let f = SeparationFn { ctx: *ctx, phase, x: xt.coords().to_vec() };
        let g = coordinate_gradient(&f, ys.coords());
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < best.0 {
            best = (norm, xt.into_coords(), ys.into_coords());
        }
    }
    Ok(SeparationReport {
        ratio,
        samples: sampler.count,
        infimum: best.0,
        argmin_xt: best.1,
        argmin_ys: best.2,
    })
}

struct NormFn(QuasiNormSpec<f64>);

impl ScalarFn<f64> for NormFn {
    fn eval<S: Scalar<Base = f64>>(&self, z: &[S]) -> S {
        self.0.evaluate_flat(z)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub c: f64,
    pub samples: usize,
    /// Smallest constant for which every sample satisfies one branch.
    pub c0: f64,
    /// Samples whose best branch is a spatial derivative.
    pub spatial_branch: usize,
    /// Samples whose best branch is the `t` derivative.
    pub time_branch: usize,
    pub worst_point: Vec<f64>,
    pub worst_delta: f64,
}

/// Per-point constant: spatial branch `max(|∂_jρ|, 1/|∂_jρ|)` minimized over `j`,
/// time branch `max(v, 1/v)` with `v = |∂_tρ|/δ`. Returns (constant, spatial?).
pub fn dichotomy_constant(grad: &[f64], delta: f64) -> (f64, bool) {
    let sym = |v: f64| if v > 0.0 { v.max(1.0 / v) } else { f64::INFINITY };
    let m = grad.len() - 1;
    let spatial = grad[..m].iter().map(|g| sym(g.abs())).fold(f64::INFINITY, f64::min);
    let time = sym(grad[m].abs() / delta);
    if spatial <= time {
        (spatial, true)
    } else {
        (time, false)
    }
}

/// Largest per-point dichotomy constant over points with `1/c ≤ ρ(δx, δ²t) ≤ c`
/// and `δ` log-uniform in `[1e-3, 1]`.
pub fn annulus_dichotomy(n: usize, spec: &QuasiNormSpec<f64>, sampler: &SamplerSpec, c: f64) -> Result<DichotomyReport> {
    if !(c >= 1.0) {
        return Err(Error::InvalidParameter(format!("annulus constant must be at least 1, got {c}")));
    }
    sampler.validate()?;
    let lo = 1.0 / c;
    let hi = if c > 1.0 { c } else { 1.0 + 1e-12 };
    let m = 2 * n;
    let f = NormFn(*spec);
    let mut report = DichotomyReport {
        c,
        samples: sampler.count,
        c0: 0.0,
        spatial_branch: 0,
        time_branch: 0,
        worst_point: vec![],
        worst_delta: 1.0,
    };
    for u in jittered_sequence(m + 2, sampler.count, sampler.seed) {
        let radius = lo * (hi / lo).powf(u[m]);
        let delta = 1e-3f64.powf(u[m + 1]);
        let w = sphere_point(spec, &cube_to_angles(&u[..m])).dilate(radius)?;
        let p = w.dilate(1.0 / delta)?;
        let g = coordinate_gradient(&f, p.coords());
        let (c0, spatial) = dichotomy_constant(&g, delta);
        if spatial {
            report.spatial_branch += 1;
        } else {
            report.time_branch += 1;
        }
        if c0 > report.c0 {
            report.c0 = c0;
            report.worst_point = p.into_coords();
            report.worst_delta = delta;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_beta_values() {
        assert_eq!(c_beta(0.0).unwrap(), 9.0);
        assert!((c_beta(1.0).unwrap() - 1.5 * (7.0 + 40f64.sqrt())).abs() < 1e-12);
        assert!(c_beta(-0.1).is_err());
    }

    #[test]
    fn discriminant_values() {
        assert_eq!(discriminant(1.0, 1.0), 1.0);
        assert_eq!(discriminant(0.0, 2.0), 144.0);
    }

    #[test]
    fn slopes() {
        assert!(paraboloid_slopes(1.0, 1.0).is_empty());
        let s = paraboloid_slopes(3.0, 0.0);
        assert_eq!(s.len(), 1);
        assert!((s[0] - 3.0).abs() < 1e-12);
        let b: f64 = 1.0;
        let s = paraboloid_slopes(c_beta(b).unwrap().sqrt(), b);
        let expect = (b + 2.0) * (b + 1.0 + ((b + 1.0) * (b + 4.0)).sqrt()) / (2.0 * (b + 1.0));
        assert_eq!(s.len(), 1);
        assert!((s[0] - expect).abs() < 1e-6 * expect);
        assert_eq!(paraboloid_slopes((c_beta(b).unwrap() + 1.0).sqrt(), b).len(), 2);
    }

    #[test]
    fn descent_finds_kink() {
        let (x, v) = coordinate_descent(|x| (x[0] - 0.3).abs() + (x[1] - 1.0).powi(2), &[0.1, 0.5], &[(0.0, 1.0), (0.0, 2.0)], 50);
        assert!(v < 1e-10, "{v}");
        assert!((x[0] - 0.3).abs() < 1e-10);
    }

    #[test]
    fn dichotomy_on_time_axis() {
        // ρ₁ at (0, t): ∂_t ρ = 1/(2√|t|), spatial derivatives vanish.
        let (c0, spatial) = dichotomy_constant(&[0.0, 0.0, 0.5], 1.0);
        assert!(!spatial);
        assert_eq!(c0, 2.0);
    }
}
