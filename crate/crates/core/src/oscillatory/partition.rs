//! Smooth cutoffs: the step `ψ`, the dyadic bump `ϑ` and box plateaus.

#[inline]
fn e(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

/// Smooth transition from 1 at `s ≤ 0` to 0 at `s ≥ 1`.
#[inline]
pub fn unit_step_down(s: f64) -> f64 {
    if s <= 0.0 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        let a = e(1.0 - s);
        a / (a + e(s))
    }
}

/// `ψ`: equal to 1 on `(-∞, 1/2]`, 0 on `[1, ∞)`, smooth in between.
#[inline]
pub fn smooth_step(r: f64) -> f64 {
    unit_step_down(2.0 * r - 1.0)
}

/// `ϑ(r) = ψ(r/2) − ψ(r)`, supported in `[1/2, 2]` with `ϑ(1) = 1`.
///
/// The sum over `j ≥ 0` of `ϑ(2^j r)` telescopes to `ψ(r/2) = 1` on `(0, 1]`.
#[inline]
pub fn theta_partition(r: f64) -> f64 {
    smooth_step(0.5 * r) - smooth_step(r)
}

/// `ϑ(2^j r)`.
#[inline]
pub fn dyadic_weight(j: i32, r: f64) -> f64 {
    theta_partition(r * 2f64.powi(j))
}

/// Even cutoff on `[-1, 1]`: 1 for `|u| ≤ flat`, decaying smoothly to 0 at `|u| = 1`.
#[inline]
pub fn plateau(u: f64, flat: f64) -> f64 {
    let a = u.abs();
    if a >= 1.0 {
        0.0
    } else if a <= flat {
        1.0
    } else {
        unit_step_down((a - flat) / (1.0 - flat))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_and_peak() {
        assert_eq!(theta_partition(0.49), 0.0);
        assert_eq!(theta_partition(2.0), 0.0);
        assert_eq!(theta_partition(1.0), 1.0);
        assert!(theta_partition(1.3) > 0.0 && theta_partition(0.7) > 0.0);
        assert_eq!(plateau(0.3, 0.5), 1.0);
        assert_eq!(plateau(-1.0, 0.5), 0.0);
        assert!((plateau(0.75, 0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn partition_at_one() {
        let s: f64 = (0..60).map(|j| dyadic_weight(j, 1.0)).sum();
        assert_eq!(s, 1.0);
    }
}
