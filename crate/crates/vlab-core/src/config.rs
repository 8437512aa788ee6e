//! Run configuration: parsing, validation, dispatch, and report emission.
//!
//! The JSON config is the one untrusted-input surface of the library;
//! `parse_config` must never panic on arbitrary bytes (fuzzed).

use crate::catalog::{preset_with_cap, PresetId, DEFAULT_N_MAX};
use crate::error::{Error, Result};
use crate::fe::{FunctionalEquationData, PhiPole};
use crate::gamma::GammaSignature;
use crate::identities::{
    aux_modular_report, fe_report, modular_report, riesz_report, EvalPoint, IdentityReport,
};
use crate::kernels::{choose_truncation, eval_kernel, ContourSpec, KernelKind};
use crate::numeric::{Cplx, Real};
use crate::series::{ArithmeticSeriesPair, CoeffGen, Ladder, PhiExpr, SeriesSide, ZeroProgression};
use serde::{Deserialize, Serialize};

/// What a run computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Modular,
    Aux,
    Riesz,
    Fe,
    Kernel,
    Asympt,
}

/// Inline user-defined series. Custom series must declare abscissae, poles
/// (with principal parts where residues are needed) and zero ladders; the
/// artifact trusts these declarations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CustomSeries {
    pub alphas: Vec<Real>,
    pub betas: Vec<(Real, Real)>,
    pub delta: Real,
    pub big_q: Real,
    #[serde(default = "default_omega")]
    pub omega: (Real, Real),
    pub sigma_a: Real,
    pub sigma_b: Real,
    /// coefficients a_n = b_n, explicit
    pub coeffs: Vec<(Real, Real)>,
    #[serde(default)]
    pub lambda: Option<Vec<Real>>,
    #[serde(default)]
    pub coeff_bound: Option<(Real, Real)>,
    /// declared poles of phi: (re, im, order)
    #[serde(default)]
    pub poles: Vec<(Real, Real, usize)>,
    /// declared zero ladders: (start, step, order)
    #[serde(default)]
    pub zeros: Vec<(Real, Real, usize)>,
}

fn default_omega() -> (Real, Real) {
    (1.0, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointSpec {
    #[serde(default)]
    pub x: Option<Real>,
    #[serde(default)]
    pub s: Option<(Real, Real)>,
    #[serde(default)]
    pub rho: Option<Real>,
}

/// The top-level run description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub task: Task,
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub z: Option<Real>,
    #[serde(default)]
    pub k: Option<u32>,
    #[serde(default)]
    pub custom: Option<CustomSeries>,
    pub points: Vec<PointSpec>,
    #[serde(default = "default_tol")]
    pub tol: Real,
    /// interpret tol relative to |lhs| when judging pass/fail
    #[serde(default)]
    pub tol_relative: bool,
    #[serde(default)]
    pub a: Option<Real>,
    #[serde(default)]
    pub n_max: Option<usize>,
    /// kernel task only
    #[serde(default)]
    pub kernel_kind: Option<String>,
    #[serde(default)]
    pub alphas: Option<Vec<Real>>,
    #[serde(default)]
    pub betas: Option<Vec<(Real, Real)>>,
    #[serde(default)]
    pub delta: Option<Real>,
    /// asympt task only
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub contour: Option<ContourSpec>,
    #[serde(default = "default_format")]
    pub output: OutputFormat,
    #[serde(default)]
    pub out_path: Option<String>,
}

fn default_tol() -> Real {
    1e-7
}

fn default_format() -> OutputFormat {
    OutputFormat::Json
}

/// Parse and validate a JSON run configuration.
pub fn parse_config(bytes: &[u8]) -> Result<RunConfig> {
    let cfg: RunConfig =
        serde_json::from_slice(bytes).map_err(|e| Error::Config(format!("bad JSON: {e}")))?;
    validate_config(&cfg)?;
    Ok(cfg)
}

pub fn validate_config(cfg: &RunConfig) -> Result<()> {
    if cfg.points.is_empty() {
        return Err(Error::Config("points must be non-empty".into()));
    }
    if !(cfg.tol > 0.0) || !cfg.tol.is_finite() {
        return Err(Error::Config("tol must be positive and finite".into()));
    }
    for p in &cfg.points {
        if let Some(x) = p.x {
            if !(x > 0.0) || !x.is_finite() {
                return Err(Error::Config(format!("x must be positive and finite, got {x}")));
            }
        }
        if let Some(rho) = p.rho {
            if !(rho >= 0.0) || !rho.is_finite() {
                return Err(Error::Config(format!("rho must be >= 0, got {rho}")));
            }
        }
        if let Some((re, im)) = p.s {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Config("s must be finite".into()));
            }
        }
    }
    match cfg.task {
        Task::Kernel => {
            if cfg.kernel_kind.is_none() || cfg.alphas.is_none() || cfg.betas.is_none() {
                return Err(Error::Config("kernel task needs kind, alphas, betas".into()));
            }
            let _ = kernel_kind_of(cfg)?;
            let alphas = cfg.alphas.as_ref().unwrap();
            let betas = cfg.betas.as_ref().unwrap();
            let betas: Vec<Cplx> = betas.iter().map(|&(re, im)| Cplx::new(re, im)).collect();
            GammaSignature::new_relaxed(alphas.clone(), betas)?;
            if cfg.points.iter().any(|p| p.x.is_none()) {
                return Err(Error::Config("kernel points need x".into()));
            }
        }
        Task::Fe => {
            if cfg.points.iter().any(|p| p.s.is_none()) {
                return Err(Error::Config("fe points need s".into()));
            }
            let _ = resolve_fe(cfg)?;
        }
        Task::Riesz | Task::Asympt => {
            if cfg.points.iter().any(|p| p.x.is_none() || p.rho.is_none()) {
                return Err(Error::Config("riesz/asympt points need x and rho".into()));
            }
            let _ = resolve_fe(cfg)?;
        }
        Task::Modular | Task::Aux => {
            if cfg.points.iter().any(|p| p.x.is_none()) {
                return Err(Error::Config("modular/aux points need x".into()));
            }
            let _ = resolve_fe(cfg)?;
        }
    }
    Ok(())
}

fn kernel_kind_of(cfg: &RunConfig) -> Result<KernelKind> {
    match cfg.kernel_kind.as_deref() {
        Some("Z") | Some("z") => Ok(KernelKind::Z),
        Some("Y") | Some("y") => Ok(KernelKind::Y),
        Some("X") | Some("x") => {
            let delta = cfg
                .delta
                .ok_or_else(|| Error::Config("kernel kind X needs delta".into()))?;
            if !(delta > 0.0) || !delta.is_finite() {
                return Err(Error::Config("delta must be positive and finite".into()));
            }
            Ok(KernelKind::X { delta })
        }
        other => Err(Error::Config(format!("unknown kernel kind {other:?}"))),
    }
}

/// Build the functional-equation data the config names (preset or custom).
pub fn resolve_fe(cfg: &RunConfig) -> Result<FunctionalEquationData> {
    if let Some(custom) = &cfg.custom {
        return custom_fe(custom, cfg.n_max.unwrap_or(DEFAULT_N_MAX));
    }
    let name = cfg
        .preset
        .as_deref()
        .ok_or_else(|| Error::Config("need a preset name or a custom series".into()))?;
    let id = PresetId::parse(name, cfg.z, cfg.k)?;
    Ok(preset_with_cap(id, cfg.n_max.unwrap_or(DEFAULT_N_MAX))?.fe)
}

fn custom_fe(c: &CustomSeries, n_max: usize) -> Result<FunctionalEquationData> {
    let betas: Vec<Cplx> = c.betas.iter().map(|&(re, im)| Cplx::new(re, im)).collect();
    let sig = GammaSignature::new_relaxed(c.alphas.clone(), betas)?;
    let ladder = match &c.lambda {
        Some(v) => Ladder::Explicit(v.clone()),
        None => Ladder::Integers,
    };
    if c.coeffs.is_empty() {
        return Err(Error::Config("custom series needs coefficients".into()));
    }
    let (bc, bp) = c.coeff_bound.unwrap_or_else(|| {
        let max = c.coeffs.iter().map(|&(re, im)| Cplx::new(re, im).norm()).fold(0.0, f64::max);
        (max.max(1.0), 0.0)
    });
    let side = SeriesSide {
        ladder,
        gen: CoeffGen::Explicit(c.coeffs.clone()),
        scale: (1.0, 0.0),
        bound_c: bc,
        bound_p: bp,
    };
    let n_cap = n_max.min(c.coeffs.len());
    let fe = FunctionalEquationData {
        delta: c.delta,
        big_q: c.big_q,
        omega: Cplx::new(c.omega.0, c.omega.1),
        sig,
        series: ArithmeticSeriesPair::new(side.clone(), side, n_cap)?,
        phi: PhiExpr::DeclaredOnly,
        declared_poles: c
            .poles
            .iter()
            .map(|&(re, im, order)| PhiPole { location: Cplx::new(re, im), order })
            .collect(),
        zero_ladders: c
            .zeros
            .iter()
            .map(|&(start, step, order)| ZeroProgression { start, step, order })
            .collect(),
        sigma_a: c.sigma_a,
        sigma_b: c.sigma_b,
    };
    fe.validate()?;
    Ok(fe)
}

/// One emitted row: either an identity report or a kernel/asymptotic value.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunRecord {
    Report(IdentityReport),
    Value {
        label: String,
        point: EvalPoint,
        value: Cplx,
        error: Real,
    },
}

/// Outcome of a run: the emitted records plus the process exit code
/// (0 all passed, 2 identity failure, 1 config/numerical error is an Err).
pub struct RunOutcome {
    pub records: Vec<RunRecord>,
    pub all_passed: bool,
}

pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    validate_config(cfg)?;
    let mut records = Vec::new();
    let mut all_passed = true;
    match cfg.task {
        Task::Kernel => {
            let kind = kernel_kind_of(cfg)?;
            let betas: Vec<Cplx> =
                cfg.betas.as_ref().unwrap().iter().map(|&(re, im)| Cplx::new(re, im)).collect();
            let sig = GammaSignature::new_relaxed(cfg.alphas.clone().unwrap(), betas)?;
            let a = cfg.a.unwrap_or_else(|| crate::kernels::default_line(&sig, kind));
            let spec = match &cfg.contour {
                Some(c) => c.clone(),
                None => choose_truncation(&sig, kind, a, cfg.tol)?,
            };
            for p in &cfg.points {
                let x = p.x.unwrap();
                let kv = eval_kernel(kind, &sig, x, &spec)?;
                records.push(RunRecord::Value {
                    label: format!("kernel_{}", kind_label(kind)),
                    point: EvalPoint { x: Some(x), s: None, rho: None },
                    value: kv.value,
                    error: kv.error,
                });
            }
        }
        Task::Asympt => {
            let fe = resolve_fe(cfg)?;
            let m = cfg.m.unwrap_or(0);
            for p in &cfg.points {
                let (v, _table) = crate::identities::i_rho_asymptotic(
                    &fe,
                    p.rho.unwrap(),
                    p.x.unwrap(),
                    m,
                )?;
                records.push(RunRecord::Value {
                    label: format!("i_rho_asymptotic_m{m}"),
                    point: EvalPoint { x: p.x, s: None, rho: p.rho },
                    value: v,
                    error: 0.0,
                });
            }
        }
        Task::Modular | Task::Aux | Task::Riesz | Task::Fe => {
            let fe = resolve_fe(cfg)?;
            for p in &cfg.points {
                let mut report = match cfg.task {
                    Task::Modular => modular_report(&fe, p.x.unwrap(), cfg.tol)?,
                    Task::Aux => aux_modular_report(&fe, p.x.unwrap(), cfg.a, cfg.tol)?,
                    Task::Riesz => {
                        riesz_report(&fe, p.x.unwrap(), p.rho.unwrap(), cfg.a, cfg.tol)?
                    }
                    Task::Fe => {
                        let (re, im) = p.s.unwrap();
                        fe_report(&fe, Cplx::new(re, im), cfg.tol)?
                    }
                    _ => unreachable!(),
                };
                if cfg.tol_relative {
                    report.passed = report.residual <= cfg.tol * report.lhs.norm().max(1e-300);
                }
                all_passed &= report.passed;
                records.push(RunRecord::Report(report));
            }
        }
    }
    Ok(RunOutcome { records, all_passed })
}

fn kind_label(kind: KernelKind) -> &'static str {
    match kind {
        KernelKind::Z => "Z",
        KernelKind::Y => "Y",
        KernelKind::X { .. } => "X",
    }
}

/// CSV emission: one row per record with the documented column schema.
pub fn to_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(
        "identity,x_or_s,rho,lhs_re,lhs_im,rhs_re,rhs_im,residual,terms_lhs,terms_rhs,trunc_est,passed\n",
    );
    for r in records {
        match r {
            RunRecord::Report(rep) => {
                let x_or_s = match (rep.point.x, rep.point.s) {
                    (Some(x), _) => format!("{x}"),
                    (None, Some(s)) => format!("{}+{}i", s.re, s.im),
                    _ => String::new(),
                };
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    rep.identity,
                    x_or_s,
                    rep.point.rho.map(|r| r.to_string()).unwrap_or_default(),
                    rep.lhs.re,
                    rep.lhs.im,
                    rep.rhs.re,
                    rep.rhs.im,
                    rep.residual,
                    rep.terms_lhs,
                    rep.terms_rhs,
                    rep.truncation_estimate,
                    rep.passed,
                ));
            }
            RunRecord::Value { label, point, value, error } => {
                let x_or_s = point.x.map(|x| x.to_string()).unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{},{},,,,{},,,\n",
                    label,
                    x_or_s,
                    point.rho.map(|r| r.to_string()).unwrap_or_default(),
                    value.re,
                    value.im,
                    error,
                ));
            }
        }
    }
    out
}

/// JSON emission (pretty, stable field order from the struct definitions).
pub fn to_json(records: &[RunRecord]) -> String {
    serde_json::to_string_pretty(records).expect("records serialize")
}
