//! Seeded low-discrepancy sampling of quasi-spheres and annuli.

use crate::error::{Error, Result};
use crate::group::GroupPoint;
use crate::norms::QuasiNormSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Region {
    /// `ρ = 1`.
    UnitQuasiSphere,
    /// `lo ≤ ρ ≤ hi`.
    Annulus { lo: f64, hi: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub seed: u64,
    pub count: usize,
    pub region: Region,
    /// Local minimization of the sampled objective.
    pub refine: bool,
}

impl SamplerSpec {
    pub fn new(seed: u64, count: usize, region: Region, refine: bool) -> Result<Self> {
        let s = SamplerSpec { seed, count, region, refine };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidParameter("sample count must be at least 1".into()));
        }
        if let Region::Annulus { lo, hi } = self.region {
            if !(lo > 0.0 && lo < hi && hi.is_finite()) {
                return Err(Error::InvalidParameter(format!("annulus needs 0 < lo < hi, got [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    /// Number of unit-cube coordinates one sample consumes for dimension `n`.
    pub fn cube_dim(&self, n: usize) -> usize {
        match self.region {
            Region::UnitQuasiSphere => 2 * n,
            Region::Annulus { .. } => 2 * n + 1,
        }
    }
}

/// Additive recurrence with the generalized golden ratio in `dim` dimensions.
pub fn kronecker_alpha(dim: usize) -> Vec<f64> {
    let mut g = 2.0f64;
    for _ in 0..64 {
        g = (1.0 + g).powf(1.0 / (dim as f64 + 1.0));
    }
    (1..=dim).map(|k| (1.0 / g.powi(k as i32)).fract()).collect()
}

/// `count` points of `[0,1)^dim`: a shifted Kronecker sequence with seeded jitter.
pub fn jittered_sequence(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let alpha = kronecker_alpha(dim);
    let mut rng = seeded_rng(seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
    let amp = 0.25 / (count as f64).powf(1.0 / dim as f64);
    (0..count)
        .map(|k| {
            (0..dim)
                .map(|i| {
                    let base = shift[i] + (k as f64 + 1.0) * alpha[i];
                    (base + amp * (rng.gen::<f64>() - 0.5)).rem_euclid(1.0)
                })
                .collect()
        })
        .collect()
}

/// Angles `(θ, ω-angles)` from a unit-cube vector of length `2n`.
pub fn cube_to_angles(u: &[f64]) -> Vec<f64> {
    let m = u.len();
    u.iter()
        .enumerate()
        .map(|(i, &v)| if i == m - 1 && m > 1 { 2.0 * PI * v } else { PI * v })
        .collect()
}

/// Point of the Koranyi unit sphere `(√sinθ·ω, cosθ)` for angles of length `2n`.
pub fn koranyi_sphere_point(angles: &[f64]) -> Vec<f64> {
    let m = angles.len();
    let theta = angles[0];
    let r = theta.sin().max(0.0).sqrt();
    // Hyperspherical coordinates for ω ∈ S^{m-1}.
    let mut omega = vec![0.0; m];
    let mut prod = 1.0;
    for i in 0..m - 1 {
        let phi = angles[i + 1];
        omega[i] = prod * phi.cos();
        prod *= phi.sin();
    }
    omega[m - 1] = prod;
    let mut z: Vec<f64> = omega.iter().map(|&w| r * w).collect();
    z.push(theta.cos());
    z
}

/// Unit-sphere point of `norm` in the direction given by `angles`.
pub fn sphere_point(norm: &QuasiNormSpec<f64>, angles: &[f64]) -> GroupPoint<f64> {
    let p = GroupPoint::from_coords(koranyi_sphere_point(angles)).expect("odd length");
    let rho = norm.evaluate(&p);
    p.dilate(1.0 / rho).expect("positive factor")
}

/// A sample: angle coordinates, radius and the point itself.
pub type Sample = (Vec<f64>, f64, GroupPoint<f64>);

/// Samples with their angle coordinates and radius.
pub fn sample_region(norm: &QuasiNormSpec<f64>, n: usize, sampler: &SamplerSpec) -> Result<Vec<Sample>> {
    sampler.validate()?;
    let dim = sampler.cube_dim(n);
    Ok(jittered_sequence(dim, sampler.count, sampler.seed)
        .into_iter()
        .map(|u| {
            let angles = cube_to_angles(&u[..2 * n]);
            let radius = match sampler.region {
                Region::UnitQuasiSphere => 1.0,
                Region::Annulus { lo, hi } => lo * (hi / lo).powf(u[2 * n]),
            };
            let p = sphere_point(norm, &angles).dilate(radius).expect("positive radius");
            (angles, radius, p)
        })
        .collect())
}

/// Random points with `lo ≤ ρ ≤ hi` from a uniform cube direction and log-uniform radius.
pub fn random_annulus_points(
    norm: &QuasiNormSpec<f64>,
    n: usize,
    lo: f64,
    hi: f64,
    count: usize,
    seed: u64,
) -> Vec<GroupPoint<f64>> {
    let mut rng = seeded_rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z: Vec<f64> = (0..2 * n + 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p = GroupPoint::from_coords(z).expect("odd length");
        let rho = norm.evaluate(&p);
        if rho < 1e-3 {
            continue;
        }
        let target = lo * (hi / lo).powf(rng.gen::<f64>());
        out.push(p.dilate(target / rho).expect("positive factor"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::NormKind;

    #[test]
    fn sphere_points_have_unit_norm() {
        for kind in [NormKind::Rho1, NormKind::Rho2, NormKind::Rho3] {
            let norm = QuasiNormSpec::unit(kind);
            for u in jittered_sequence(2, 50, 3) {
                let p = sphere_point(&norm, &cube_to_angles(&u));
                assert!((norm.evaluate(&p) - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn sequence_is_deterministic_and_in_range() {
        let a = jittered_sequence(3, 100, 9);
        assert_eq!(a, jittered_sequence(3, 100, 9));
        assert_ne!(a, jittered_sequence(3, 100, 10));
        assert!(a.iter().flatten().all(|&v| (0.0..1.0).contains(&v)));
    }

    #[test]
    fn hypersphere_direction_is_unit() {
        let z = koranyi_sphere_point(&[0.7, 0.3, 2.0, 5.0]);
        let r2: f64 = z[..4].iter().map(|v| v * v).sum();
        assert!((r2 * r2 + z[4] * z[4] - 1.0).abs() < 1e-14);
    }
}
