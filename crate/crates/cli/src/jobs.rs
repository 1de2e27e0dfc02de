//! Resolved run configurations and the computations behind each subcommand.

use crate::args::{DecayArgs, DecayMode, HessianArgs, RunArgs, ScanArgs};
use heisenberg_core::closed_forms::{compare_at, ClosedFormCase};
use heisenberg_core::degeneracy::{c_beta, certify, discriminant, paraboloid_slopes, CertReport, Verdict};
use heisenberg_core::oscillatory::{
    decay_fit, measure_dyadic_series, measure_euclidean_decay, measure_generic_decay, DecayPoint, DyadicGeometry,
    ExperimentSettings, GenericGeometry,
};
use heisenberg_core::sampling::{random_annulus_points, Region, SamplerSpec};
use heisenberg_core::group::GroupContext;
use heisenberg_core::norms::{PhaseSpec, QuasiNormSpec};
use heisenberg_core::{Error, NormKind, Variant};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_DEGENERACY: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_INFEASIBLE: i32 = 65;

/// A failure that ends the run without a results document.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Nyquist { .. } => EXIT_INFEASIBLE,
            Error::InsufficientData(_) => EXIT_CHECK_FAILED,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Job {
    Certify(CertifyConfig),
    HessianCheck(HessianConfig),
    ScanDegeneracy(ScanConfig),
    OpnormDecay(DecayConfig),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyConfig {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub beta: f64,
    pub norm: NormKind,
    pub variant: Variant,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HessianConfig {
    pub cases: Vec<String>,
    pub n_values: Vec<usize>,
    pub a_values: Vec<f64>,
    pub beta_values: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub perturb_beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub n: usize,
    pub b: f64,
    pub beta: f64,
    pub norm: NormKind,
    pub variant: Variant,
    pub steps: usize,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayConfig {
    pub mode: DecayMode,
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub beta: f64,
    pub alpha: f64,
    pub norm: NormKind,
    pub grid: usize,
    pub lambdas: Vec<f64>,
    pub js: Vec<i32>,
    pub iterations: usize,
    pub seed: u64,
    pub slope_tol: f64,
    pub factor: f64,
    pub increment_tol: f64,
}

/// Result of a completed run.
pub struct Outcome {
    pub exit: i32,
    pub results: Value,
    pub tolerances: BTreeMap<String, f64>,
    pub csv_header: Vec<String>,
    pub csv_rows: Vec<Vec<String>>,
    /// One-line summary for standard error.
    pub summary: String,
}

fn positive(name: &str, v: f64) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::usage(format!("--{name} must be positive, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<f64, Failure> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::usage(format!("--{name} must be finite")))
    }
}

fn at_least(name: &str, v: usize, min: usize) -> Result<usize, Failure> {
    if v >= min {
        Ok(v)
    } else {
        Err(Failure::usage(format!("--{name} must be at least {min}, got {v}")))
    }
}

impl Job {
    pub fn seed(&self) -> u64 {
        match self {
            Job::Certify(c) => c.seed,
            Job::HessianCheck(c) => c.seed,
            Job::ScanDegeneracy(c) => c.seed,
            Job::OpnormDecay(c) => c.seed,
        }
    }

    pub fn certify(r: &RunArgs) -> Result<Job, Failure> {
        let c = CertifyConfig {
            n: at_least("n", r.n.unwrap_or(1), 1)?,
            a: finite("a", r.a.unwrap_or(1.0))?,
            b: positive("b", r.b.unwrap_or(1.0))?,
            beta: positive("beta", r.beta.unwrap_or(1.0))?,
            norm: r.norm.unwrap_or(NormKind::Rho1),
            variant: r.variant.unwrap_or(Variant::Full),
            samples: at_least("samples", r.samples.unwrap_or(400), 1)?,
            seed: r.seed.unwrap_or(1),
            tol: positive("tol", r.tol.unwrap_or(1e-7))?,
        };
        check_geometry(c.n, c.norm, c.variant)?;
        Ok(Job::Certify(c))
    }

    pub fn hessian(h: &HessianArgs) -> Result<Job, Failure> {
        let r = &h.run;
        let cases: Vec<String> = if h.case.iter().any(|c| c == "all") {
            ClosedFormCase::ALL.iter().map(|c| c.name().to_string()).collect()
        } else {
            h.case.clone()
        };
        for c in &cases {
            if ClosedFormCase::from_name(c).is_none() {
                let known: Vec<&str> = ClosedFormCase::ALL.iter().map(|c| c.name()).collect();
                return Err(Failure::usage(format!("unknown case '{c}'; known cases: {}", known.join(", "))));
            }
        }
        let c = HessianConfig {
            cases,
            n_values: match r.n {
                Some(n) => vec![at_least("n", n, 1)?],
                None => vec![1, 2],
            },
            a_values: match r.a {
                Some(a) => vec![finite("a", a)?],
                None => vec![0.0, 0.3, 1.0, 3.0],
            },
            beta_values: match r.beta {
                Some(b) => vec![positive("beta", b)?],
                None => vec![0.5, 1.0, 2.0],
            },
            samples: at_least("samples", r.samples.unwrap_or(200), 1)?,
            seed: r.seed.unwrap_or(17),
            tol: positive("tol", r.tol.unwrap_or(1e-8))?,
            perturb_beta: finite("perturb-beta", h.perturb_beta)?,
        };
        Ok(Job::HessianCheck(c))
    }

    pub fn scan(s: &ScanArgs) -> Result<Job, Failure> {
        let r = &s.run;
        let c = ScanConfig {
            n: at_least("n", r.n.unwrap_or(1), 1)?,
            b: positive("b", r.b.unwrap_or(1.0))?,
            beta: positive("beta", r.beta.unwrap_or(1.0))?,
            norm: r.norm.unwrap_or(NormKind::Rho1),
            variant: r.variant.unwrap_or(Variant::Full),
            steps: at_least("steps", s.steps, 1)?,
            samples: at_least("samples", r.samples.unwrap_or(200), 1)?,
            seed: r.seed.unwrap_or(1),
            tol: positive("tol", r.tol.unwrap_or(1e-7))?,
        };
        check_geometry(c.n, c.norm, c.variant)?;
        Ok(Job::ScanDegeneracy(c))
    }

    pub fn decay(d: &DecayArgs) -> Result<Job, Failure> {
        let r = &d.run;
        let n = r.n.unwrap_or(1);
        if n != 1 {
            return Err(Failure::usage("operator-norm experiments support n = 1 only"));
        }
        if r.variant == Some(Variant::Polarized) {
            return Err(Failure::usage("operator-norm experiments use the full group law"));
        }
        let beta = positive("beta", r.beta.unwrap_or(1.0))?;
        let (lambdas, grid, iterations, slope_tol) = match d.mode {
            DecayMode::Generic => (vec![8.0, 16.0, 32.0], 24, 80, 0.2),
            DecayMode::Euclidean => (vec![8.0, 16.0, 32.0, 64.0], 200, 500, 0.1),
            DecayMode::Dyadic => (vec![], 24, 80, 0.15),
        };
        let c = DecayConfig {
            mode: d.mode,
            n,
            a: finite("a", r.a.unwrap_or(1.0))?,
            b: positive("b", r.b.unwrap_or(1.0))?,
            beta,
            alpha: finite("alpha", r.alpha.unwrap_or((n as f64 + 0.5) * beta))?,
            norm: r.norm.unwrap_or(NormKind::Rho1),
            grid: at_least("grid", r.grid.unwrap_or(grid), 6)?,
            lambdas: if r.lambdas.is_empty() { lambdas } else { r.lambdas.clone() },
            js: if r.js.is_empty() { vec![0, 1, 2, 3] } else { r.js.clone() },
            iterations: at_least("iterations", d.iterations.unwrap_or(iterations), 1)?,
            seed: r.seed.unwrap_or(7),
            slope_tol: positive("slope-tol", d.slope_tol.or(r.tol).unwrap_or(slope_tol))?,
            factor: positive("factor", d.factor)?,
            increment_tol: positive("slope-tol", d.slope_tol.or(r.tol).unwrap_or(0.15))?,
        };
        if c.norm == NormKind::Rho0 {
            return Err(Failure::usage("rho0 is not smooth and cannot define an oscillatory phase"));
        }
        for &l in &c.lambdas {
            positive("lambdas", l)?;
        }
        let scales = if c.mode == DecayMode::Dyadic { c.js.len() } else { c.lambdas.len() };
        if scales < 3 {
            return Err(Failure::usage("a decay experiment needs at least 3 scales"));
        }
        Ok(Job::OpnormDecay(c))
    }

    /// Validates a configuration read from a document.
    pub fn revalidate(&self) -> Result<(), Failure> {
        match self {
            Job::Certify(c) => {
                positive("b", c.b)?;
                positive("beta", c.beta)?;
                positive("tol", c.tol)?;
                at_least("samples", c.samples, 1)?;
                check_geometry(c.n, c.norm, c.variant)
            }
            Job::HessianCheck(c) => {
                for name in &c.cases {
                    ClosedFormCase::from_name(name).ok_or_else(|| Failure::usage(format!("unknown case '{name}'")))?;
                }
                Ok(())
            }
            Job::ScanDegeneracy(c) => {
                positive("beta", c.beta)?;
                at_least("steps", c.steps, 1)?;
                check_geometry(c.n, c.norm, c.variant)
            }
            Job::OpnormDecay(c) => {
                if c.n != 1 {
                    return Err(Failure::usage("operator-norm experiments support n = 1 only"));
                }
                at_least("grid", c.grid, 6)?;
                Ok(())
            }
        }
    }

    pub fn run(&self) -> Result<Outcome, Failure> {
        match self {
            Job::Certify(c) => run_certify(c),
            Job::HessianCheck(c) => run_hessian(c),
            Job::ScanDegeneracy(c) => run_scan(c),
            Job::OpnormDecay(c) => run_decay(c),
        }
    }
}

fn check_geometry(n: usize, norm: NormKind, variant: Variant) -> Result<(), Failure> {
    if norm == NormKind::Rho0 {
        return Err(Failure::usage("rho0 is not smooth; choose koranyi, minkowski or rho3"));
    }
    if variant == Variant::Polarized && n != 1 {
        return Err(Failure::usage("the polarized variant is defined for n = 1 only"));
    }
    if norm == NormKind::Rho3 && n != 1 {
        return Err(Failure::usage("rho3 certification is supported for n = 1 only"));
    }
    Ok(())
}

fn fmt(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e7).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| fmt(*x)).collect::<Vec<_>>().join(";")
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize to JSON")
}

/// Whether `(a, b, β)` lies in a parameter region where non-degeneracy is proved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionCheck {
    /// `None` when no result covers this norm and variant.
    pub inside: Option<bool>,
    pub text: String,
}

pub fn region_check(norm: NormKind, variant: Variant, a: f64, b: f64, beta: f64) -> RegionCheck {
    let r = (a / b).powi(2);
    let a2 = if b == 1.0 { "a²" } else { "a²/b²" };
    match (norm, variant) {
        (NormKind::Rho1, Variant::Full) => {
            let c = c_beta(beta).unwrap_or(f64::NAN);
            if r == 0.0 {
                RegionCheck { inside: Some(false), text: "outside (a = 0: the determinant vanishes on x = 0)".into() }
            } else if r < c {
                RegionCheck { inside: Some(true), text: format!("inside ({a2} < C_β ≈ {c:.2})") }
            } else {
                RegionCheck { inside: Some(false), text: format!("outside ({a2} ≥ C_β ≈ {c:.2})") }
            }
        }
        (NormKind::Rho2, _) => {
            if r <= 1.0 {
                RegionCheck { inside: Some(true), text: format!("inside ({a2} ≤ 1)") }
            } else {
                RegionCheck { inside: None, text: format!("not covered ({a2} > 1)") }
            }
        }
        (NormKind::Rho1, Variant::Polarized) => {
            RegionCheck { inside: Some(false), text: "outside (the determinant vanishes on the line (0, t))".into() }
        }
        (NormKind::Rho3, _) => {
            RegionCheck { inside: Some(false), text: "outside (the determinant vanishes on the coordinate axes)".into() }
        }
        (NormKind::Rho0, _) => RegionCheck { inside: None, text: "not covered (rho0 is not smooth)".into() },
    }
}

#[derive(Serialize)]
struct CertifyResults<'a> {
    region: &'a RegionCheck,
    report: &'a CertReport,
}

fn verdict_exit(v: Verdict) -> i32 {
    match v {
        Verdict::Certified => EXIT_OK,
        Verdict::DegeneracyFound => EXIT_DEGENERACY,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Certified => "certified",
        Verdict::DegeneracyFound => "degeneracy-found",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn run_certify(c: &CertifyConfig) -> Result<Outcome, Failure> {
    let ctx = GroupContext::new(c.n, c.a, c.variant)?;
    let spec = QuasiNormSpec::new(c.norm, c.b)?;
    let sampler = SamplerSpec::new(c.seed, c.samples, Region::UnitQuasiSphere, true)?;
    let report = certify(&ctx, &spec, c.beta, &sampler, c.tol)?;
    let region = region_check(c.norm, c.variant, c.a, c.b, c.beta);
    let summary = format!(
        "{}: min |normalized det| = {:e}; region check: {}",
        verdict_name(report.verdict),
        report.min_abs_normalized_det,
        region.text
    );
    Ok(Outcome {
        exit: verdict_exit(report.verdict),
        results: to_value(&CertifyResults { region: &region, report: &report }),
        tolerances: BTreeMap::from([("normalized_det".to_string(), c.tol)]),
        csv_header: ["norm", "variant", "n", "a", "b", "beta", "verdict", "min_abs_normalized_det", "argmin", "near_zero_points", "region"]
            .map(String::from)
            .to_vec(),
        csv_rows: vec![vec![
            c.norm.name().into(),
            format!("{:?}", c.variant).to_lowercase(),
            c.n.to_string(),
            fmt(c.a),
            fmt(c.b),
            fmt(c.beta),
            verdict_name(report.verdict).into(),
            fmt(report.min_abs_normalized_det),
            fmt_vec(&report.argmin),
            report.near_zero.len().to_string(),
            region.text.clone(),
        ]],
        summary,
    })
}

#[derive(Clone, Debug, Serialize)]
struct HessianRow {
    case: String,
    n: usize,
    a: f64,
    beta: f64,
    points: usize,
    max_rel_err: f64,
    worst_point: Vec<f64>,
    pass: bool,
}

fn run_hessian(c: &HessianConfig) -> Result<Outcome, Failure> {
    let mut rows = Vec::new();
    for name in &c.cases {
        let case = ClosedFormCase::from_name(name).ok_or_else(|| Failure::usage(format!("unknown case '{name}'")))?;
        let norm = QuasiNormSpec::unit(case.norm_kind());
        for &n in &c.n_values {
            for &a in &c.a_values {
                if !case.applies(n, a) {
                    continue;
                }
                for &beta in &c.beta_values {
                    let mut worst = (0.0f64, Vec::new());
                    let pts = random_annulus_points(&norm, n, 0.5, 2.0, c.samples, c.seed);
                    for p in &pts {
                        let cmp = compare_at(case, n, a, beta, p, c.perturb_beta)?;
                        if cmp.rel_err.is_nan() || cmp.rel_err > worst.0 {
                            worst = (cmp.rel_err, cmp.point);
                        }
                    }
                    rows.push(HessianRow {
                        case: name.clone(),
                        n,
                        a,
                        beta,
                        points: pts.len(),
                        max_rel_err: worst.0,
                        worst_point: worst.1,
                        pass: worst.0 <= c.tol,
                    });
                }
            }
        }
    }
    if rows.is_empty() {
        return Err(Failure::usage("no closed-form case applies to the requested parameters"));
    }
    let all_pass = rows.iter().all(|r| r.pass);
    let max = rows.iter().map(|r| r.max_rel_err).fold(0.0, f64::max);
    let csv_rows = rows
        .iter()
        .map(|r| {
            vec![
                r.case.clone(),
                r.n.to_string(),
                fmt(r.a),
                fmt(r.beta),
                r.points.to_string(),
                fmt(r.max_rel_err),
                fmt_vec(&r.worst_point),
                r.pass.to_string(),
            ]
        })
        .collect();
    Ok(Outcome {
        exit: if all_pass { EXIT_OK } else { EXIT_CHECK_FAILED },
        summary: format!("{} case/parameter combinations, max relative error {max:e} (tol {:e})", rows.len(), c.tol),
        results: serde_json::json!({ "max_rel_err": max, "pass": all_pass, "rows": to_value(&rows) }),
        tolerances: BTreeMap::from([("max_rel_err".to_string(), c.tol)]),
        csv_header: ["case", "n", "a", "beta", "points", "max_rel_err", "worst_point", "pass"].map(String::from).to_vec(),
        csv_rows,
    })
}

#[derive(Clone, Debug, Serialize)]
struct ScanRow {
    a2: f64,
    a: f64,
    beta: f64,
    verdict: Verdict,
    min_abs_normalized_det: f64,
    argmin: Vec<f64>,
    discriminant: f64,
    slopes: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
struct ScanResults {
    c_beta: f64,
    step: f64,
    rows: Vec<ScanRow>,
    /// Midpoint between the last certified row and the next row that is not.
    flip_a2: Option<f64>,
    flip_within_step: Option<bool>,
}

fn run_scan(c: &ScanConfig) -> Result<Outcome, Failure> {
    let cb = c_beta(c.beta)?;
    let top = 2.0 * cb;
    let step = top / c.steps as f64;
    let spec = QuasiNormSpec::new(c.norm, c.b)?;
    let sampler = SamplerSpec::new(c.seed, c.samples, Region::UnitQuasiSphere, true)?;
    let mut rows = Vec::new();
    for k in 0..=c.steps {
        let a2 = k as f64 * step;
        let a = a2.sqrt();
        let ctx = GroupContext::new(c.n, a, c.variant)?;
        let r = certify(&ctx, &spec, c.beta, &sampler, c.tol)?;
        // Slopes refer to the reduced twist a/b.
        let ar = a / c.b;
        rows.push(ScanRow {
            a2,
            a,
            beta: c.beta,
            verdict: r.verdict,
            min_abs_normalized_det: r.min_abs_normalized_det,
            argmin: r.argmin,
            discriminant: discriminant(ar, c.beta),
            slopes: paraboloid_slopes(ar, c.beta),
        });
    }
    let koranyi = c.norm == NormKind::Rho1 && c.variant == Variant::Full;
    let mut flip_a2 = None;
    if let Some(first) = rows.iter().position(|r| r.verdict == Verdict::Certified) {
        if let Some(off) = rows[first..].iter().position(|r| r.verdict != Verdict::Certified) {
            let k = first + off;
            flip_a2 = Some(0.5 * (rows[k - 1].a2 + rows[k].a2));
        }
    }
    let target = cb * c.b * c.b;
    let flip_within_step = if koranyi { Some(flip_a2.is_some_and(|f| (f - target).abs() <= step)) } else { None };
    let exit = if flip_within_step == Some(false) { EXIT_CHECK_FAILED } else { EXIT_OK };
    let summary = match (koranyi, flip_a2) {
        (true, Some(f)) => format!("verdict flips at a² ≈ {f:.4} (C_β b² = {target:.5}, step {step:.4})"),
        (true, None) => "no verdict flip found in the sweep".to_string(),
        _ => format!("{} rows", rows.len()),
    };
    let csv_rows = rows
        .iter()
        .map(|r| {
            vec![
                fmt(r.a2),
                fmt(r.a),
                fmt(r.beta),
                verdict_name(r.verdict).into(),
                fmt(r.min_abs_normalized_det),
                fmt(r.discriminant),
                fmt_vec(&r.slopes),
            ]
        })
        .collect();
    Ok(Outcome {
        exit,
        summary,
        results: to_value(&ScanResults { c_beta: cb, step, rows, flip_a2, flip_within_step }),
        tolerances: BTreeMap::from([("normalized_det".to_string(), c.tol), ("flip_distance".to_string(), step)]),
        csv_header: ["a2", "a", "beta", "verdict", "min_abs_normalized_det", "discriminant", "slopes"].map(String::from).to_vec(),
        csv_rows,
    })
}

#[derive(Clone, Debug, Serialize)]
struct DecayResults {
    mode: DecayMode,
    points: Vec<DecayPoint>,
    /// Predicted log-log slope, or predicted `log₂` increment per `j` in dyadic mode.
    expected: f64,
    slope: Option<f64>,
    intercept: Option<f64>,
    residual: Option<f64>,
    fit_error: Option<String>,
    grid_converged: bool,
    power_converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    dyadic: Option<DyadicSummary>,
    pass: bool,
}

#[derive(Clone, Debug, Serialize)]
struct DyadicSummary {
    check: &'static str,
    median: f64,
    spread: f64,
    increments: Vec<f64>,
}

fn point_rows(points: &[DecayPoint]) -> Vec<Vec<String>> {
    points
        .iter()
        .map(|p| {
            vec![
                fmt(p.scale),
                fmt(p.norm),
                fmt(p.coarse_norm),
                fmt(p.rel_change),
                p.grid_converged.to_string(),
                p.power_converged.to_string(),
                p.iterations.to_string(),
                fmt(p.max_increment),
            ]
        })
        .collect()
}

fn run_decay(c: &DecayConfig) -> Result<Outcome, Failure> {
    let settings = ExperimentSettings { points: c.grid, iterations: c.iterations, seed: c.seed };
    let mut tolerances = BTreeMap::from([("grid_rel_change".to_string(), heisenberg_core::oscillatory::experiments::GRID_TOL)]);
    let results = match c.mode {
        DecayMode::Generic | DecayMode::Euclidean => {
            let (points, expected) = if c.mode == DecayMode::Generic {
                let ctx = GroupContext::full(c.n, c.a)?;
                let phase = PhaseSpec::new(QuasiNormSpec::new(c.norm, c.b)?, c.beta)?;
                let pts = measure_generic_decay(ctx, phase, &GenericGeometry::default(), &c.lambdas, &settings)?;
                (pts, -((2 * c.n + 1) as f64) / 2.0)
            } else {
                (measure_euclidean_decay(&c.lambdas, false, &settings)?, -0.5)
            };
            tolerances.insert("slope".into(), c.slope_tol);
            let grid_converged = points.iter().all(|p| p.grid_converged);
            let power_converged = points.iter().all(|p| p.power_converged);
            match decay_fit(points.clone()) {
                Ok(s) => DecayResults {
                    mode: c.mode,
                    points,
                    expected,
                    slope: Some(s.slope),
                    intercept: Some(s.intercept),
                    residual: Some(s.residual),
                    fit_error: None,
                    grid_converged,
                    power_converged,
                    dyadic: None,
                    pass: (s.slope - expected).abs() <= c.slope_tol,
                },
                Err(e) => DecayResults {
                    mode: c.mode,
                    points,
                    expected,
                    slope: None,
                    intercept: None,
                    residual: None,
                    fit_error: Some(e.to_string()),
                    grid_converged,
                    power_converged,
                    dyadic: None,
                    pass: false,
                },
            }
        }
        DecayMode::Dyadic => {
            let ctx = GroupContext::full(c.n, c.a)?;
            let norm = QuasiNormSpec::new(c.norm, c.b)?;
            let rep = measure_dyadic_series(ctx, norm, c.alpha, c.beta, &c.js, &DyadicGeometry::default(), &settings)?;
            let expected = c.alpha - (c.n as f64 + 0.5) * c.beta;
            let uniform = expected.abs() < 1e-12;
            let ok = if uniform {
                tolerances.insert("spread_factor".into(), c.factor);
                rep.uniform_within(c.factor)
            } else {
                tolerances.insert("increment".into(), c.increment_tol);
                rep.increments_near(expected, c.increment_tol)
            };
            let power_converged = rep.points.iter().all(|p| p.power_converged);
            DecayResults {
                mode: c.mode,
                expected,
                slope: None,
                intercept: None,
                residual: None,
                fit_error: None,
                grid_converged: rep.grid_converged,
                power_converged,
                pass: ok && rep.grid_converged,
                dyadic: Some(DyadicSummary {
                    check: if uniform { "uniformity" } else { "increments" },
                    median: rep.median,
                    spread: rep.spread,
                    increments: rep.increments.clone(),
                }),
                points: rep.points,
            }
        }
    };
    let summary = match (&results.dyadic, results.slope) {
        (Some(d), _) => format!(
            "{}: spread {:.3}, increments {:?}, grid-converged {}",
            d.check, d.spread, d.increments, results.grid_converged
        ),
        (None, Some(s)) => format!("slope {s:.4} (expected {:.2} ± {})", results.expected, c.slope_tol),
        (None, None) => format!("no fit: {}", results.fit_error.clone().unwrap_or_default()),
    };
    Ok(Outcome {
        exit: if results.pass { EXIT_OK } else { EXIT_CHECK_FAILED },
        csv_header: ["scale", "norm", "coarse_norm", "rel_change", "grid_converged", "power_converged", "iterations", "max_increment"]
            .map(String::from)
            .to_vec(),
        csv_rows: point_rows(&results.points),
        results: to_value(&results),
        tolerances,
        summary,
    })
}
