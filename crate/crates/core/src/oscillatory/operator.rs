//! Discretized operators `(Tf)(p_i) = Σ_j K(p_i, q_j) f(q_j) w_q`.

use super::grid::GridSpec;
use super::kernel::{OscKernelSpec, Resolved};
use crate::error::Result;
use num_complex::Complex64;

/// A linear map between weighted `ℓ²` spaces of grid functions.
///
/// Inner products carry the cell volume of their box, so `apply_adjoint` is the
/// adjoint with respect to those weights.
pub trait LinearOperator {
    /// Number of target nodes.
    fn rows(&self) -> usize;
    /// Number of source nodes.
    fn cols(&self) -> usize;
    fn row_weight(&self) -> f64;
    fn col_weight(&self) -> f64;
    fn apply(&self, f: &[Complex64], out: &mut [Complex64]);
    fn apply_adjoint(&self, g: &[Complex64], out: &mut [Complex64]);
}

pub fn weighted_dot(a: &[Complex64], b: &[Complex64], w: f64) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<Complex64>() * w
}

pub fn weighted_norm(a: &[Complex64], w: f64) -> f64 {
    (a.iter().map(|x| x.norm_sqr()).sum::<f64>() * w).sqrt()
}

/// Materialized kernel matrix, row-major.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    rows: usize,
    cols: usize,
    kernel: Vec<Complex64>,
    w_row: f64,
    w_col: f64,
}

impl DenseOperator {
    pub fn new(rows: usize, cols: usize, kernel: Vec<Complex64>, w_row: f64, w_col: f64) -> Self {
        assert_eq!(kernel.len(), rows * cols, "kernel size must be rows * cols");
        DenseOperator { rows, cols, kernel, w_row, w_col }
    }

    pub fn from_spec(spec: &OscKernelSpec, grid: &GridSpec) -> Self {
        let r = spec.resolved();
        let (pn, qn) = (grid.nodes(&grid.target), grid.nodes(&grid.source));
        let d = grid.axes();
        let (rows, cols) = (grid.len(), grid.len());
        let mut buf = vec![0.0; d];
        let mut kernel = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                kernel.push(r.eval(grid, &pn[i * d..(i + 1) * d], &qn[j * d..(j + 1) * d], &mut buf));
            }
        }
        DenseOperator::new(rows, cols, kernel, grid.cell_volume(&grid.target), grid.cell_volume(&grid.source))
    }

    pub fn kernel(&self) -> &[Complex64] {
        &self.kernel
    }
}

impl LinearOperator for DenseOperator {
    fn rows(&self) -> usize {
        self.rows
    }
    fn cols(&self) -> usize {
        self.cols
    }
    fn row_weight(&self) -> f64 {
        self.w_row
    }
    fn col_weight(&self) -> f64 {
        self.w_col
    }
    fn apply(&self, f: &[Complex64], out: &mut [Complex64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.kernel[i * self.cols..(i + 1) * self.cols];
            *o = row.iter().zip(f).map(|(k, v)| k * v).sum::<Complex64>() * self.w_col;
        }
    }
    fn apply_adjoint(&self, g: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for (i, gi) in g.iter().enumerate() {
            let s = gi * self.w_row;
            let row = &self.kernel[i * self.cols..(i + 1) * self.cols];
            for (o, k) in out.iter_mut().zip(row) {
                *o += k.conj() * s;
            }
        }
    }
}

/// Evaluates the kernel on the fly; memory is linear in the node count.
pub struct MatrixFreeOperator {
    r: Resolved,
    grid: GridSpec,
    pn: Vec<f64>,
    qn: Vec<f64>,
}

impl MatrixFreeOperator {
    pub fn new(spec: &OscKernelSpec, grid: &GridSpec) -> Self {
        MatrixFreeOperator {
            r: spec.resolved(),
            grid: grid.clone(),
            pn: grid.nodes(&grid.target),
            qn: grid.nodes(&grid.source),
        }
    }
}

impl LinearOperator for MatrixFreeOperator {
    fn rows(&self) -> usize {
        self.grid.len()
    }
    fn cols(&self) -> usize {
        self.grid.len()
    }
    fn row_weight(&self) -> f64 {
        self.grid.cell_volume(&self.grid.target)
    }
    fn col_weight(&self) -> f64 {
        self.grid.cell_volume(&self.grid.source)
    }
    fn apply(&self, f: &[Complex64], out: &mut [Complex64]) {
        let d = self.grid.axes();
        let mut buf = vec![0.0; d];
        let w = self.col_weight();
        for (i, o) in out.iter_mut().enumerate() {
            let p = &self.pn[i * d..(i + 1) * d];
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, fj) in f.iter().enumerate() {
                if fj.re != 0.0 || fj.im != 0.0 {
                    acc += self.r.eval(&self.grid, p, &self.qn[j * d..(j + 1) * d], &mut buf) * fj;
                }
            }
            *o = acc * w;
        }
    }
    fn apply_adjoint(&self, g: &[Complex64], out: &mut [Complex64]) {
        let d = self.grid.axes();
        let mut buf = vec![0.0; d];
        let w = self.row_weight();
        for (j, o) in out.iter_mut().enumerate() {
            let q = &self.qn[j * d..(j + 1) * d];
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, gi) in g.iter().enumerate() {
                if gi.re != 0.0 || gi.im != 0.0 {
                    acc += self.r.eval(&self.grid, &self.pn[i * d..(i + 1) * d], q, &mut buf).conj() * gi;
                }
            }
            *o = acc * w;
        }
    }
}

/// Group-convolution kernel `ζ_T(p) ζ_S(q) k(q⁻¹p)` cached by `t`-offset.
///
/// With equal `t`-spacing in both boxes, `q⁻¹p` for a fixed pair of spatial
/// nodes depends on `t_i − s_j` only through `i − j`, so each spatial pair
/// stores `2N − 1` values instead of `N²`.
pub struct ConvolutionOperator {
    n_t: usize,
    n_x: usize,
    /// Per spatial pair `(x, y)`, real and imaginary parts over offsets `i − j + N − 1`.
    re: Vec<f64>,
    im: Vec<f64>,
    cut_t: Vec<f64>,
    cut_s: Vec<f64>,
    w_row: f64,
    w_col: f64,
}

impl ConvolutionOperator {
    /// Memory in bytes the cache would need for `grid`.
    pub fn cache_bytes(grid: &GridSpec) -> usize {
        let n = grid.points_per_axis;
        let n_x = n.pow(grid.axes() as u32 - 1);
        n_x * n_x * (2 * n - 1) * 16
    }

    /// Whether the `t`-spacings of the two boxes agree.
    pub fn applicable(spec: &OscKernelSpec, grid: &GridSpec) -> bool {
        let d = grid.axes();
        let ht = grid.target.half_widths[d - 1];
        let hs = grid.source.half_widths[d - 1];
        spec.resolved().is_group_convolution() && (ht - hs).abs() <= 1e-14 * ht.max(hs)
    }

    pub fn new(spec: &OscKernelSpec, grid: &GridSpec) -> Result<Self> {
        let r = spec.resolved();
        let d = grid.axes();
        let m = d - 1;
        let n = grid.points_per_axis;
        let n_x = n.pow(m as u32);
        let pn = grid.nodes(&grid.target);
        let qn = grid.nodes(&grid.source);
        let cut_t: Vec<f64> = (0..grid.len()).map(|i| r.cutoff(&grid.target, &pn[i * d..(i + 1) * d])).collect();
        let cut_s: Vec<f64> = (0..grid.len()).map(|j| r.cutoff(&grid.source, &qn[j * d..(j + 1) * d])).collect();
        let tn = grid.axis_nodes(&grid.target, m);
        let sn = grid.axis_nodes(&grid.source, m);
        let h = tn[1] - tn[0];
        let width = 2 * n - 1;
        let mut re = vec![0.0; n_x * n_x * width];
        let mut im = vec![0.0; n_x * n_x * width];
        let mut z = vec![0.0; d];
        let mut p = vec![0.0; d];
        let mut q = vec![0.0; d];
        for x in 0..n_x {
            p[..m].copy_from_slice(&pn[x * n * d..x * n * d + m]);
            for y in 0..n_x {
                q[..m].copy_from_slice(&qn[y * n * d..y * n * d + m]);
                let base = (x * n_x + y) * width;
                for k in 0..width {
                    let off = k as f64 - (n as f64 - 1.0);
                    // p_t − q_t = (t_0 − s_0) + (i − j) h.
                    p[m] = tn[0] + off * h;
                    q[m] = sn[0];
                    r.ctx.relative_into(&q, &p, &mut z);
                    let v = r.convolution_kernel(&z);
                    re[base + k] = v.re;
                    im[base + k] = v.im;
                }
            }
        }
        Ok(ConvolutionOperator {
            n_t: n,
            n_x,
            re,
            im,
            cut_t,
            cut_s,
            w_row: grid.cell_volume(&grid.target),
            w_col: grid.cell_volume(&grid.source),
        })
    }
}

impl LinearOperator for ConvolutionOperator {
    fn rows(&self) -> usize {
        self.n_x * self.n_t
    }
    fn cols(&self) -> usize {
        self.n_x * self.n_t
    }
    fn row_weight(&self) -> f64 {
        self.w_row
    }
    fn col_weight(&self) -> f64 {
        self.w_col
    }
    fn apply(&self, f: &[Complex64], out: &mut [Complex64]) {
        let n = self.n_t;
        let width = 2 * n - 1;
        let gr: Vec<f64> = f.iter().zip(&self.cut_s).map(|(v, c)| v.re * c * self.w_col).collect();
        let gi: Vec<f64> = f.iter().zip(&self.cut_s).map(|(v, c)| v.im * c * self.w_col).collect();
        let mut acc_r = vec![0.0; n];
        let mut acc_i = vec![0.0; n];
        for x in 0..self.n_x {
            acc_r.iter_mut().for_each(|v| *v = 0.0);
            acc_i.iter_mut().for_each(|v| *v = 0.0);
            for y in 0..self.n_x {
                let base = (x * self.n_x + y) * width;
                let kr = &self.re[base..base + width];
                let ki = &self.im[base..base + width];
                for j in 0..n {
                    let (br, bi) = (gr[y * n + j], gi[y * n + j]);
                    if br == 0.0 && bi == 0.0 {
                        continue;
                    }
                    let kr = &kr[n - 1 - j..2 * n - 1 - j];
                    let ki = &ki[n - 1 - j..2 * n - 1 - j];
                    for i in 0..n {
                        acc_r[i] += kr[i] * br - ki[i] * bi;
                        acc_i[i] += kr[i] * bi + ki[i] * br;
                    }
                }
            }
            for i in 0..n {
                let c = self.cut_t[x * n + i];
                out[x * n + i] = Complex64::new(acc_r[i] * c, acc_i[i] * c);
            }
        }
    }
    fn apply_adjoint(&self, g: &[Complex64], out: &mut [Complex64]) {
        let n = self.n_t;
        let width = 2 * n - 1;
        let hr: Vec<f64> = g.iter().zip(&self.cut_t).map(|(v, c)| v.re * c * self.w_row).collect();
        let hi: Vec<f64> = g.iter().zip(&self.cut_t).map(|(v, c)| v.im * c * self.w_row).collect();
        let mut acc_r = vec![0.0; n];
        let mut acc_i = vec![0.0; n];
        // Reversed offsets make the inner loop run forward over j.
        let mut rev_r = vec![0.0; width];
        let mut rev_i = vec![0.0; width];
        for y in 0..self.n_x {
            acc_r.iter_mut().for_each(|v| *v = 0.0);
            acc_i.iter_mut().for_each(|v| *v = 0.0);
            for x in 0..self.n_x {
                let base = (x * self.n_x + y) * width;
                for k in 0..width {
                    rev_r[k] = self.re[base + width - 1 - k];
                    rev_i[k] = self.im[base + width - 1 - k];
                }
                for i in 0..n {
                    let (br, bi) = (hr[x * n + i], hi[x * n + i]);
                    if br == 0.0 && bi == 0.0 {
                        continue;
                    }
                    // Offset i − j + N − 1 reversed is (N − 1 − i) + j.
                    let kr = &rev_r[n - 1 - i..2 * n - 1 - i];
                    let ki = &rev_i[n - 1 - i..2 * n - 1 - i];
                    for j in 0..n {
                        // conj(k) · b
                        acc_r[j] += kr[j] * br + ki[j] * bi;
                        acc_i[j] += kr[j] * bi - ki[j] * br;
                    }
                }
            }
            for j in 0..n {
                let c = self.cut_s[y * n + j];
                out[y * n + j] = Complex64::new(acc_r[j] * c, acc_i[j] * c);
            }
        }
    }
}

/// `A* B` for two operators sharing a target grid: maps source to source.
pub struct AdjointProduct<'a> {
    pub a: &'a dyn LinearOperator,
    pub b: &'a dyn LinearOperator,
}

impl LinearOperator for AdjointProduct<'_> {
    fn rows(&self) -> usize {
        self.a.cols()
    }
    fn cols(&self) -> usize {
        self.b.cols()
    }
    fn row_weight(&self) -> f64 {
        self.a.col_weight()
    }
    fn col_weight(&self) -> f64 {
        self.b.col_weight()
    }
    fn apply(&self, f: &[Complex64], out: &mut [Complex64]) {
        let mut mid = vec![Complex64::new(0.0, 0.0); self.b.rows()];
        self.b.apply(f, &mut mid);
        self.a.apply_adjoint(&mid, out);
    }
    fn apply_adjoint(&self, g: &[Complex64], out: &mut [Complex64]) {
        let mut mid = vec![Complex64::new(0.0, 0.0); self.a.rows()];
        self.a.apply(g, &mut mid);
        self.b.apply_adjoint(&mid, out);
    }
}

/// Largest kernel cache allowed before falling back to matrix-free evaluation.
pub const CACHE_LIMIT_BYTES: usize = 1 << 30;

/// Chooses the cheapest faithful representation of the discretized operator.
pub fn discretize(spec: &OscKernelSpec, grid: &GridSpec) -> Result<Box<dyn LinearOperator>> {
    spec.validate(grid)?;
    let n2 = grid.len() * grid.len();
    if ConvolutionOperator::applicable(spec, grid) && grid.axes() > 1 && ConvolutionOperator::cache_bytes(grid) <= CACHE_LIMIT_BYTES && n2 > 1 << 16 {
        return Ok(Box::new(ConvolutionOperator::new(spec, grid)?));
    }
    if n2 * 16 <= 1 << 28 {
        return Ok(Box::new(DenseOperator::from_spec(spec, grid)));
    }
    Ok(Box::new(MatrixFreeOperator::new(spec, grid)))
}
