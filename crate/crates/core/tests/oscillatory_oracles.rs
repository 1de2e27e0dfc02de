use heisenberg_core::oscillatory::experiments::{least_squares, DYADIC_PLATEAU};
use heisenberg_core::oscillatory::operator::weighted_dot;
use heisenberg_core::oscillatory::power::start_vector;
use heisenberg_core::oscillatory::*;
use heisenberg_core::{Error, GroupContext, NormKind, PhaseSpec, QuasiNormSpec};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn koranyi_phase(beta: f64) -> PhaseSpec {
    PhaseSpec::new(QuasiNormSpec::unit(NormKind::Rho1), beta).unwrap()
}

fn ctx() -> GroupContext {
    GroupContext::full(1, 1.0).unwrap()
}

fn dyadic_spec(j: i32) -> OscKernelSpec {
    OscKernelSpec::dyadic(ctx(), j, 1.5, 1.0, QuasiNormSpec::unit(NormKind::Rho1), 0.5)
}

fn small_dyadic_grid(n: usize) -> GridSpec {
    let b = BoxSpec::new(vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 1.5]).unwrap();
    GridSpec::new(n, b.clone(), b).unwrap()
}

fn random_vec(len: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn adjoint_defect(op: &dyn LinearOperator, seed: u64) -> f64 {
    let f = random_vec(op.cols(), seed);
    let g = random_vec(op.rows(), seed + 1);
    let mut tf = vec![Complex64::default(); op.rows()];
    let mut tg = vec![Complex64::default(); op.cols()];
    op.apply(&f, &mut tf);
    op.apply_adjoint(&g, &mut tg);
    let lhs = weighted_dot(&tf, &g, op.row_weight());
    let rhs = weighted_dot(&f, &tg, op.col_weight());
    (lhs - rhs).norm() / lhs.norm().max(rhs.norm())
}

fn to_matrix(op: &dyn LinearOperator) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(op.rows(), op.cols());
    let mut e = vec![Complex64::default(); op.cols()];
    let mut col = vec![Complex64::default(); op.rows()];
    let s = (op.row_weight() / op.col_weight()).sqrt();
    for j in 0..op.cols() {
        e[j] = Complex64::new(1.0, 0.0);
        op.apply(&e, &mut col);
        e[j] = Complex64::default();
        for i in 0..op.rows() {
            // Unitary change to unweighted ℓ² on both sides.
            m[(i, j)] = col[i] * s;
        }
    }
    m
}

#[test]
fn adjoint_identity_all_representations() {
    let grid = small_dyadic_grid(6);
    let spec = dyadic_spec(1);
    let ops: Vec<Box<dyn LinearOperator>> = vec![
        Box::new(DenseOperator::from_spec(&spec, &grid)),
        Box::new(MatrixFreeOperator::new(&spec, &grid)),
        Box::new(ConvolutionOperator::new(&spec, &grid).unwrap()),
    ];
    for (k, op) in ops.iter().enumerate() {
        let d = adjoint_defect(op.as_ref(), 10 + k as u64);
        assert!(d <= 1e-12, "representation {k}: adjoint defect {d:e}");
    }
    let (e, g) = euclidean_pair(12.0, 40);
    assert!(adjoint_defect(&DenseOperator::from_spec(&e, &g), 3) <= 1e-12);
}

fn euclidean_pair(lambda: f64, n: usize) -> (OscKernelSpec, GridSpec) {
    let spec = OscKernelSpec::generic(ctx(), lambda, TwoPointPhase::Bilinear, Amplitude::cutoffs(0.5));
    let b = BoxSpec::new(vec![0.0], vec![1.0]).unwrap();
    (spec, GridSpec::new(n, b.clone(), b).unwrap())
}

#[test]
fn cached_convolution_matches_direct_evaluation() {
    let grid = small_dyadic_grid(6);
    let spec = dyadic_spec(2);
    let a = MatrixFreeOperator::new(&spec, &grid);
    let b = ConvolutionOperator::new(&spec, &grid).unwrap();
    let f = random_vec(grid.len(), 5);
    let (mut x, mut y) = (vec![Complex64::default(); grid.len()], vec![Complex64::default(); grid.len()]);
    a.apply(&f, &mut x);
    b.apply(&f, &mut y);
    let scale = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for (u, v) in x.iter().zip(&y) {
        assert!((u - v).norm() <= 1e-12 * scale);
    }
    a.apply_adjoint(&f, &mut x);
    b.apply_adjoint(&f, &mut y);
    for (u, v) in x.iter().zip(&y) {
        assert!((u - v).norm() <= 1e-12 * scale);
    }
}

#[test]
fn power_iteration_matches_dense_svd() {
    // Zero phase, and then an oscillating group kernel, on grids with N ≤ 8.
    let zero = OscKernelSpec::generic(ctx(), 0.0, TwoPointPhase::Zero, Amplitude::cutoffs(0.3));
    let grid = small_dyadic_grid(6);
    for spec in [zero, dyadic_spec(1)] {
        let op = discretize(&spec, &grid).unwrap();
        let est = power_norm(op.as_ref(), 2000, 1);
        assert!(est.converged);
        let svd = to_matrix(op.as_ref()).singular_values();
        let top = svd.iter().cloned().fold(0.0, f64::max);
        assert!((est.value - top).abs() <= 1e-6 * top, "{} vs {}", est.value, top);
    }
}

#[test]
fn rank_one_norm_is_product_of_norms() {
    let spec = OscKernelSpec::generic(ctx(), 0.0, TwoPointPhase::Zero, Amplitude::cutoffs(0.4));
    let tb = BoxSpec::new(vec![0.5, 0.0, 1.0], vec![0.5, 0.5, 0.25]).unwrap();
    let sb = BoxSpec::new(vec![0.0, 0.0, 0.0], vec![0.5, 0.5, 0.25]).unwrap();
    let grid = GridSpec::new(7, tb, sb).unwrap();
    let op = DenseOperator::from_spec(&spec, &grid);
    let direct: f64 = {
        let uu: Vec<f64> = grid.nodes(&grid.target).chunks(3).map(|p| cut(&grid.target, p, 0.4)).collect();
        let vv: Vec<f64> = grid.nodes(&grid.source).chunks(3).map(|q| cut(&grid.source, q, 0.4)).collect();
        let n2 = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>().sqrt();
        n2(&uu) * n2(&vv) * grid.cell_volume(&grid.source)
    };
    let est = power_norm(&op, 200, 3);
    assert!(est.converged);
    assert!((est.value - direct).abs() <= 1e-10 * direct, "{} vs {}", est.value, direct);
}

fn cut(b: &BoxSpec, p: &[f64], flat: f64) -> f64 {
    p.iter().enumerate().map(|(a, &x)| heisenberg_core::oscillatory::partition::plateau(b.local(a, x), flat)).product()
}

#[test]
fn identity_kernel_norm_is_cell_volume() {
    let n = 50;
    let mut k = vec![Complex64::default(); n * n];
    for i in 0..n {
        k[i * n + i] = Complex64::new(1.0, 0.0);
    }
    let w = 0.04;
    let op = DenseOperator::new(n, n, k, w, w);
    let est = power_norm(&op, 100, 9);
    assert!((est.value - w).abs() < 1e-15);
}

#[test]
fn delta_input_returns_weighted_column() {
    let grid = small_dyadic_grid(5);
    let spec = dyadic_spec(0);
    let dense = DenseOperator::from_spec(&spec, &grid);
    let op = MatrixFreeOperator::new(&spec, &grid);
    let j0 = 37;
    let mut f = vec![Complex64::default(); grid.len()];
    f[j0] = Complex64::new(1.0, 0.0);
    let mut out = vec![Complex64::default(); grid.len()];
    op.apply(&f, &mut out);
    let w = grid.cell_volume(&grid.source);
    for (i, v) in out.iter().enumerate() {
        assert!((v - dense.kernel()[i * grid.len() + j0] * w).norm() <= 1e-15);
    }
}

#[test]
fn zero_oscillation_is_plain_quadrature() {
    let spec = OscKernelSpec::generic(ctx(), 0.0, TwoPointPhase::Bilinear, Amplitude::cutoffs(0.5));
    let b = BoxSpec::new(vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 1.0]).unwrap();
    let grid = GridSpec::new(5, b.clone(), b.clone()).unwrap();
    let op = MatrixFreeOperator::new(&spec, &grid);
    let f = random_vec(grid.len(), 4);
    let mut out = vec![Complex64::default(); grid.len()];
    op.apply(&f, &mut out);
    let nodes = grid.nodes(&b);
    let w = grid.cell_volume(&b);
    let total: Complex64 = nodes.chunks(3).zip(&f).map(|(q, v)| v * cut(&b, q, 0.5)).sum::<Complex64>() * w;
    for (i, p) in nodes.chunks(3).enumerate() {
        assert!((out[i] - total * cut(&b, p, 0.5)).norm() <= 1e-13);
    }
}

#[test]
fn nyquist_guard_and_dimension_errors() {
    let grid = small_dyadic_grid(6);
    match operator_norm(&dyadic_spec(6), &grid, 10, 1) {
        Err(Error::Nyquist { scale_name, max_feasible, .. }) => {
            assert_eq!(scale_name, "j");
            assert!(max_feasible < 6.0);
        }
        other => panic!("expected a Nyquist error, got {other:?}"),
    }
    let (spec, _) = euclidean_pair(1e4, 10);
    let (_, g) = euclidean_pair(0.0, 10);
    assert!(matches!(check_resolution(&spec, &g), Err(Error::Nyquist { scale_name: "lambda", .. })));
    let (_, one_d) = euclidean_pair(0.0, 10);
    assert!(matches!(operator_norm(&dyadic_spec(0), &one_d, 10, 1), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn power_iteration_is_seed_stable() {
    let grid = small_dyadic_grid(8);
    let op = discretize(&dyadic_spec(1), &grid).unwrap();
    let a = power_norm(op.as_ref(), 3000, 1);
    let b = power_norm(op.as_ref(), 3000, 99);
    assert!(a.converged && b.converged);
    assert!((a.value - b.value).abs() <= 1e-5 * a.value);
    assert_eq!(a, power_norm(op.as_ref(), 3000, 1));
    assert_ne!(start_vector(10, 1), start_vector(10, 2));
}

#[test]
fn capped_iteration_is_flagged() {
    let grid = small_dyadic_grid(6);
    let op = discretize(&dyadic_spec(1), &grid).unwrap();
    let est = power_norm(op.as_ref(), 2, 1);
    assert!(!est.converged);
    assert!(est.value > 0.0);
}

#[test]
fn euclidean_decay_and_zero_phase() {
    let s = ExperimentSettings { points: 200, iterations: 500, seed: 7 };
    let series = decay_fit(measure_euclidean_decay(&[8.0, 16.0, 32.0, 64.0], false, &s).unwrap()).unwrap();
    assert!((-0.6..=-0.4).contains(&series.slope), "slope {}", series.slope);
    let flat = decay_fit(measure_euclidean_decay(&[8.0, 16.0, 32.0, 64.0], true, &s).unwrap()).unwrap();
    assert!(flat.slope.abs() <= 0.05, "slope {}", flat.slope);
}

#[test]
fn decay_fit_rejects_bad_input() {
    let p = |scale: f64, ok: bool| DecayPoint {
        scale,
        norm: 1.0 / scale,
        coarse_norm: 1.0 / scale,
        rel_change: 0.0,
        grid_converged: ok,
        power_converged: true,
        iterations: 1,
        max_increment: 0.0,
    };
    assert!(matches!(decay_fit(vec![p(1.0, true), p(2.0, true)]), Err(Error::InsufficientData(_))));
    assert!(decay_fit(vec![p(1.0, true), p(2.0, false), p(4.0, true)]).is_err());
    let s = decay_fit(vec![p(1.0, true), p(2.0, true), p(4.0, true)]).unwrap();
    assert!((s.slope + 1.0).abs() < 1e-12 && s.residual < 1e-12);
    let (m, c, r) = least_squares(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
    assert!((m - 2.0).abs() < 1e-15 && (c - 1.0).abs() < 1e-15 && r < 1e-15);
}

#[test]
fn doubling_lambda_lowers_the_norm() {
    let g = GenericGeometry::default();
    let grid = g.grid(1, 10).unwrap();
    let a = operator_norm(&g.spec(ctx(), 2.0, koranyi_phase(1.0)), &grid, 500, 1).unwrap();
    let b = operator_norm(&g.spec(ctx(), 4.0, koranyi_phase(1.0)), &grid, 500, 1).unwrap();
    assert!(b.value < a.value);
}

#[test]
fn dyadic_zero_matches_generic_unit_lambda() {
    let grid = small_dyadic_grid(6);
    let norm = QuasiNormSpec::unit(NormKind::Rho1);
    let d = dyadic_norm(0, 1.5, 1.0, norm, ctx(), &grid, 2000, 4).unwrap();
    let amp = Amplitude { scale: 1.0, plateau: DYADIC_PLATEAU, radial: RadialProfile::Dyadic { alpha: 1.5 } };
    let generic = OscKernelSpec::generic(ctx(), 1.0, TwoPointPhase::Group(koranyi_phase(1.0)), amp);
    let g = operator_norm(&generic, &grid, 2000, 4).unwrap();
    assert_eq!(d.value, g.value);
}

#[test]
fn composition_at_equal_scales_is_the_square() {
    // j = 1 needs a finer spacing than the shared small grid offers.
    let grid = DyadicGeometry { hx: 0.5, ht: 0.75, plateau: DYADIC_PLATEAU }.grid(1, 8).unwrap();
    let norm = QuasiNormSpec::unit(NormKind::Rho1);
    let s = ExperimentSettings { points: 8, iterations: 3000, seed: 2 };
    let rep = almost_orthogonality(ctx(), norm, 1.5, 1.0, 0, &[0, 1], &grid, DYADIC_PLATEAU, &s).unwrap();
    let single = dyadic_norm(0, 1.5, 1.0, norm, ctx(), &grid, 3000, 2).unwrap();
    assert!((rep.norms[0].1 - single.value.powi(2)).abs() <= 1e-12 * rep.norms[0].1);
    // Direct check of the composed norm against a dense SVD.
    let spec = |j| OscKernelSpec::dyadic(ctx(), j, 1.5, 1.0, norm, DYADIC_PLATEAU);
    let a = discretize(&spec(0), &grid).unwrap();
    let b = discretize(&spec(1), &grid).unwrap();
    let m = to_matrix(a.as_ref()).adjoint() * to_matrix(b.as_ref());
    let top = m.singular_values().iter().cloned().fold(0.0, f64::max);
    assert!((rep.norms[1].1 - top).abs() <= 1e-6 * top, "{} vs {}", rep.norms[1].1, top);
}

#[test]
fn kernel_envelope_diagnostics() {
    let g = GenericGeometry::default();
    let d2 = g.delta * g.delta;
    let x = [0.0, 0.0, d2];
    let env = kernel_envelope(ctx(), koranyi_phase(1.0), &g, &[1.0, 2.0], &x, &x, 10).unwrap();
    for &(_, k) in &env.values {
        assert!((k - env.self_value).abs() <= 1e-12 * env.self_value);
    }
    let z = [0.5 * g.c * g.delta, 0.0, d2];
    let env = kernel_envelope(ctx(), koranyi_phase(1.0), &g, &[2.0, 4.0, 8.0, 16.0], &x, &z, 24).unwrap();
    assert!(env.non_increasing, "{:?}", env.values);
    assert!(env.slope <= -1.0, "slope {}", env.slope);
    let silent = GenericGeometry { c: g.c, ..g };
    let spec_zero = Amplitude { scale: 0.0, plateau: 0.5, radial: RadialProfile::Annulus { radius: g.delta } };
    let op = OscKernelSpec::generic(ctx(), 4.0, TwoPointPhase::Group(koranyi_phase(1.0)), spec_zero);
    let grid = silent.grid(1, 6).unwrap();
    assert_eq!(operator_norm(&op, &grid, 10, 1).unwrap().value, 0.0);
}

#[test]
fn partition_identity_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10_000 {
        let r: f64 = 1.0 - rng.gen::<f64>();
        let s: f64 = (0..80).map(|j| dyadic_weight(j, r)).sum();
        assert!((s - 1.0).abs() <= 1e-12, "r = {r}: {s}");
    }
    assert_eq!(theta_partition(2.5), 0.0);
    assert_eq!(theta_partition(0.4), 0.0);
    assert_eq!((0..10).map(|j| dyadic_weight(j, 1.0)).sum::<f64>(), 1.0);
}
