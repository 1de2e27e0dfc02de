//! Midpoint quadrature grids on a target box (the `p` variable) and a source box (`q`).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Axis-aligned box `center ± half_widths`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub center: Vec<f64>,
    pub half_widths: Vec<f64>,
}

impl BoxSpec {
    pub fn new(center: Vec<f64>, half_widths: Vec<f64>) -> Result<Self> {
        if center.is_empty() || center.len() != half_widths.len() {
            return Err(Error::DimensionMismatch { expected: center.len(), got: half_widths.len() });
        }
        if half_widths.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidParameter("box half-widths must be positive".into()));
        }
        Ok(BoxSpec { center, half_widths })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Local coordinate in `[-1, 1]` along `axis`.
    #[inline]
    pub fn local(&self, axis: usize, v: f64) -> f64 {
        (v - self.center[axis]) / self.half_widths[axis]
    }
}

/// `N` midpoint nodes per axis on both boxes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub points_per_axis: usize,
    pub target: BoxSpec,
    pub source: BoxSpec,
}

impl GridSpec {
    pub fn new(points_per_axis: usize, target: BoxSpec, source: BoxSpec) -> Result<Self> {
        if points_per_axis < 4 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 4 points per axis, got {points_per_axis}"
            )));
        }
        if target.dim() != source.dim() {
            return Err(Error::DimensionMismatch { expected: target.dim(), got: source.dim() });
        }
        Ok(GridSpec { points_per_axis, target, source })
    }

    /// Same boxes, different resolution.
    pub fn with_points(&self, points_per_axis: usize) -> Result<Self> {
        GridSpec::new(points_per_axis, self.target.clone(), self.source.clone())
    }

    pub fn axes(&self) -> usize {
        self.target.dim()
    }

    /// Nodes per box, `N^axes`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.axes() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, b: &BoxSpec) -> Vec<f64> {
        b.half_widths.iter().map(|h| 2.0 * h / self.points_per_axis as f64).collect()
    }

    pub fn cell_volume(&self, b: &BoxSpec) -> f64 {
        self.spacing(b).iter().product()
    }

    /// Node coordinates along one axis.
    pub fn axis_nodes(&self, b: &BoxSpec, axis: usize) -> Vec<f64> {
        let n = self.points_per_axis;
        let h = 2.0 * b.half_widths[axis] / n as f64;
        let lo = b.center[axis] - b.half_widths[axis];
        (0..n).map(|i| lo + (i as f64 + 0.5) * h).collect()
    }

    /// All nodes, row-major with the last axis fastest, flattened.
    pub fn nodes(&self, b: &BoxSpec) -> Vec<f64> {
        let d = self.axes();
        let per: Vec<Vec<f64>> = (0..d).map(|a| self.axis_nodes(b, a)).collect();
        let total = self.len();
        let mut out = Vec::with_capacity(total * d);
        let n = self.points_per_axis;
        for k in 0..total {
            let mut rem = k;
            let mut idx = vec![0; d];
            for a in (0..d).rev() {
                idx[a] = rem % n;
                rem /= n;
            }
            for a in 0..d {
                out.push(per[a][idx[a]]);
            }
        }
        out
    }
}
