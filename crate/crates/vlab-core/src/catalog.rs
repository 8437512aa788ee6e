//! Coefficient operations and fully-specified functional-equation presets.

use crate::error::{Error, Result};
use crate::fe::{FunctionalEquationData, PhiPole};
use crate::gamma::GammaSignature;
use crate::numeric::{Cplx, Real};
use crate::series::{
    ArithmeticSeriesPair, CoeffGen, Ladder, PhiExpr, SeriesSide, ZeroProgression,
};

/// d(n): number of positive divisors, by trial division up to sqrt(n).
pub fn coeff_divisor(n: u64) -> u64 {
    debug_assert!(n >= 1);
    let mut count = 0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            count += 2;
            if d * d == n {
                count -= 1;
            }
        }
        d += 1;
    }
    count
}

/// r2(n): representations as an ordered sum of two squares (signs counted),
/// via 4 sum_{d | n} chi_4(d).
pub fn coeff_r2(n: u64) -> i64 {
    debug_assert!(n >= 1);
    let mut acc: i64 = 0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            for q in [d, n / d] {
                if q % 4 == 1 {
                    acc += 1;
                } else if q % 4 == 3 {
                    acc -= 1;
                }
                if d * d == n {
                    break;
                }
            }
        }
        d += 1;
    }
    4 * acc
}

/// Generalized divisor sum: sum of d^z over d with d^k | n.
pub fn coeff_sigma_zk(n: u64, z: Cplx, k: u32) -> Cplx {
    debug_assert!(n >= 1 && k >= 1);
    let mut acc = Cplx::new(0.0, 0.0);
    let mut d: u64 = 1;
    loop {
        let dk = match d.checked_pow(k) {
            Some(p) if p <= n => p,
            _ => break,
        };
        if n % dk == 0 {
            acc += Cplx::new(d as f64, 0.0).powc(z);
        }
        d += 1;
    }
    acc
}

/// Ramanujan tau(1..n_max), exact integers.
pub fn coeff_tau(n_max: usize) -> Result<Vec<i128>> {
    crate::series::tau_coefficients(n_max)
}

/// A preset: descriptor plus the declared F-pole list and the Riesz
/// parameters its identity closure is exercised at.
#[derive(Debug, Clone)]
pub struct SeriesPreset {
    pub name: String,
    pub fe: FunctionalEquationData,
    pub lattice: String,
    pub oracle_tags: Vec<String>,
    /// poles of F(s) = phi(s) * Gamma block, with orders; the enumeration
    /// must reproduce these exactly
    pub expected_f_poles: Vec<(Cplx, usize)>,
    pub riesz_rho: Real,
    pub riesz_rel_tol: Real,
}

/// Preset identifiers; sigma presets carry their parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PresetId {
    ThetaZeta,
    Divisor,
    SigmaZ { z: Real },
    SigmaK { k: u32 },
    RTwo,
    RamanujanTau,
}

impl PresetId {
    /// Parse a CLI name plus optional parameters.
    pub fn parse(name: &str, z: Option<Real>, k: Option<u32>) -> Result<Self> {
        match name {
            "theta-zeta" => Ok(PresetId::ThetaZeta),
            "divisor" => Ok(PresetId::Divisor),
            "sigma-z" => {
                let z = z.ok_or_else(|| Error::Config("sigma-z needs --z".into()))?;
                Ok(PresetId::SigmaZ { z })
            }
            "sigma-k" => {
                let k = k.ok_or_else(|| Error::Config("sigma-k needs --k".into()))?;
                Ok(PresetId::SigmaK { k })
            }
            "r2" => Ok(PresetId::RTwo),
            "ramanujan-tau" => Ok(PresetId::RamanujanTau),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }
}

pub const PRESET_NAMES: [&str; 6] =
    ["theta-zeta", "divisor", "sigma-z", "sigma-k", "r2", "ramanujan-tau"];

pub const DEFAULT_N_MAX: usize = 20_000;

fn c(re: f64) -> Cplx {
    Cplx::new(re, 0.0)
}

fn side(gen: CoeffGen, scale: f64, bound_c: f64, bound_p: f64) -> SeriesSide {
    SeriesSide { ladder: Ladder::Integers, gen, scale: (scale, 0.0), bound_c, bound_p }
}

/// Instantiate a preset with the given coefficient cap.
pub fn preset_with_cap(id: PresetId, n_max: usize) -> Result<SeriesPreset> {
    use std::f64::consts::PI;
    let one = Cplx::new(1.0, 0.0);
    match id {
        PresetId::ThetaZeta => {
            let sig = GammaSignature::new(vec![0.5], vec![c(0.0)])?;
            let s = side(CoeffGen::Ones, 1.0, 1.0, 0.0);
            let fe = FunctionalEquationData {
                delta: 1.0,
                big_q: PI.powf(-0.5),
                omega: one,
                sig,
                series: ArithmeticSeriesPair::new(s.clone(), s, n_max)?,
                phi: PhiExpr::ZetaProduct { scale: (1.0, 0.0), factors: vec![(1.0, 0.0)] },
                declared_poles: vec![PhiPole { location: c(1.0), order: 1 }],
                zero_ladders: vec![ZeroProgression { start: -2.0, step: -2.0, order: 1 }],
                sigma_a: 1.05,
                sigma_b: 1.05,
            };
            fe.validate()?;
            Ok(SeriesPreset {
                name: "theta-zeta".into(),
                fe,
                lattice: "lambda_n = mu_n = n".into(),
                oracle_tags: vec![
                    "theta-identity elementary sums".into(),
                    "single-factor closed form 2 exp(-x^2)".into(),
                ],
                expected_f_poles: vec![(c(1.0), 1), (c(0.0), 1)],
                riesz_rho: 1.0,
                riesz_rel_tol: 1e-6,
            })
        }
        PresetId::Divisor => preset_sigma_z(0.0, n_max),
        PresetId::SigmaZ { z } => {
            if !(z <= 0.0 && z > -1.0) {
                return Err(Error::Config(format!(
                    "sigma-z presets require -1 < z <= 0 (Re beta >= 0 and delta > 0), got z = {z}"
                )));
            }
            preset_sigma_z(z, n_max)
        }
        PresetId::SigmaK { k } => {
            if k == 0 {
                return Err(Error::Config("sigma-k requires k >= 1".into()));
            }
            if k == 1 {
                return preset_sigma_z(0.0, n_max);
            }
            preset_sigma_k(k, n_max)
        }
        PresetId::RTwo => {
            let sig = GammaSignature::new(vec![1.0], vec![c(0.0)])?;
            let s = side(CoeffGen::RTwo, 1.0, 8.0, 0.5);
            let fe = FunctionalEquationData {
                delta: 1.0,
                big_q: 1.0 / PI,
                omega: one,
                sig,
                series: ArithmeticSeriesPair::new(s.clone(), s, n_max)?,
                phi: PhiExpr::ZetaBeta { scale: 4.0 },
                declared_poles: vec![PhiPole { location: c(1.0), order: 1 }],
                // zeta kills even negatives, L(s, chi_4) kills odd negatives
                zero_ladders: vec![ZeroProgression { start: -1.0, step: -1.0, order: 1 }],
                sigma_a: 1.05,
                sigma_b: 1.05,
            };
            fe.validate()?;
            Ok(SeriesPreset {
                name: "r2".into(),
                fe,
                lattice: "lambda_n = mu_n = n".into(),
                oracle_tags: vec!["Y kernel = 2 K0(2 sqrt x)".into(), "J-Bessel closed form".into()],
                expected_f_poles: vec![(c(1.0), 1), (c(0.0), 1)],
                riesz_rho: 2.0,
                riesz_rel_tol: 1e-5,
            })
        }
        PresetId::RamanujanTau => {
            let sig = GammaSignature::new(vec![1.0], vec![c(0.0)])?;
            let s = side(CoeffGen::Tau, 1.0, 2.0, 6.0);
            let fe = FunctionalEquationData {
                delta: 12.0,
                big_q: 1.0 / (2.0 * PI),
                omega: one,
                sig,
                series: ArithmeticSeriesPair::new(s.clone(), s, n_max)?,
                phi: PhiExpr::DeclaredOnly,
                declared_poles: vec![],
                // the completed L-function is entire: phi vanishes at all
                // non-positive integers
                zero_ladders: vec![ZeroProgression { start: 0.0, step: -1.0, order: 1 }],
                sigma_a: 6.55,
                sigma_b: 6.55,
            };
            fe.validate()?;
            Ok(SeriesPreset {
                name: "ramanujan-tau".into(),
                fe,
                lattice: "lambda_n = mu_n = n".into(),
                oracle_tags: vec!["Riesz rhs equals the J_{12+rho} series".into()],
                expected_f_poles: vec![],
                riesz_rho: 1.0,
                riesz_rel_tol: 1e-3,
            })
        }
    }
}

fn preset_sigma_z(z: f64, n_max: usize) -> Result<SeriesPreset> {
    use std::f64::consts::PI;
    let sig = GammaSignature::new(vec![0.5, 0.5], vec![c(0.0), c(-z / 2.0)])?;
    let scale = PI.powf(z / 2.0);
    let gen = if z == 0.0 {
        CoeffGen::Divisor
    } else {
        CoeffGen::SigmaZ { z_re: z, z_im: 0.0 }
    };
    let s = side(gen, scale, 2.0, 0.5);
    let delta = z + 1.0;
    let mut declared = vec![PhiPole { location: c(1.0), order: 1 }];
    if z == 0.0 {
        declared = vec![PhiPole { location: c(1.0), order: 2 }];
    } else {
        declared.push(PhiPole { location: c(1.0 + z), order: 1 });
    }
    let fe = FunctionalEquationData {
        delta,
        big_q: 1.0 / PI,
        omega: Cplx::new(1.0, 0.0),
        sig,
        series: ArithmeticSeriesPair::new(s.clone(), s, n_max)?,
        phi: PhiExpr::ZetaProduct { scale: (scale, 0.0), factors: vec![(1.0, 0.0), (1.0, z)] },
        declared_poles: declared,
        zero_ladders: vec![
            ZeroProgression { start: -2.0, step: -2.0, order: 1 },
            ZeroProgression { start: z - 2.0, step: -2.0, order: 1 },
        ],
        sigma_a: 1.05,
        sigma_b: 1.05,
    };
    fe.validate()?;
    let (name, poles, tags): (String, Vec<(Cplx, usize)>, Vec<String>) = if z == 0.0 {
        (
            "divisor".into(),
            vec![(c(1.0), 2), (c(0.0), 2)],
            vec!["Dirichlet divisor residual x log x + (2 gamma - 1) x".into()],
        )
    } else {
        (
            format!("sigma-z({z})"),
            vec![(c(1.0), 1), (c(1.0 + z), 1), (c(0.0), 1), (c(z), 1)],
            vec!["two-pole residual structure".into()],
        )
    };
    Ok(SeriesPreset {
        name,
        fe,
        lattice: "lambda_n = mu_n = n".into(),
        oracle_tags: tags,
        expected_f_poles: poles,
        riesz_rho: 2.0,
        riesz_rel_tol: 1e-5,
    })
}

fn preset_sigma_k(k: u32, n_max: usize) -> Result<SeriesPreset> {
    use std::f64::consts::PI;
    let kf = k as f64;
    let z = (kf - 1.0) / 2.0;
    // beta_2 = -(k-1)/4 has negative real part; the class definition is
    // relaxed here on purpose (the sigma-k family ships this way).
    let sig = GammaSignature::new_relaxed(vec![0.5, kf / 2.0], vec![c(0.0), c(-(kf - 1.0) / 4.0)])?;
    let scale = PI.powf((kf - 1.0) / 4.0);
    let s = side(
        CoeffGen::SigmaZK { z_re: z, z_im: 0.0, k },
        scale,
        2.0,
        0.5 + (kf - 1.0) / (2.0 * kf),
    );
    // second zeta factor pole: k s - (k-1)/2 = 1
    let pole2 = (kf + 1.0) / (2.0 * kf);
    let fe = FunctionalEquationData {
        delta: 1.0,
        big_q: PI.powf(-(kf + 1.0) / 2.0),
        omega: Cplx::new(1.0, 0.0),
        sig,
        series: ArithmeticSeriesPair::new(s.clone(), s, n_max)?,
        phi: PhiExpr::ZetaProduct { scale: (scale, 0.0), factors: vec![(1.0, 0.0), (kf, z)] },
        declared_poles: vec![
            PhiPole { location: c(1.0), order: 1 },
            PhiPole { location: c(pole2), order: 1 },
        ],
        zero_ladders: vec![
            ZeroProgression { start: -2.0, step: -2.0, order: 1 },
            ZeroProgression { start: (z - 2.0) / kf, step: -2.0 / kf, order: 1 },
        ],
        sigma_a: 1.05,
        sigma_b: 1.05,
    };
    fe.validate()?;
    // Gamma(k s/2 - (k-1)/4) has its first ladder pole at (k-1)/(2k); the
    // deeper steps are cancelled by the zeta(ks - (k-1)/2) trivial zeros.
    let gamma2_first = (kf - 1.0) / (2.0 * kf);
    let mut poles = vec![(c(1.0), 1usize), (c(pole2), 1), (c(gamma2_first), 1)];
    // pole at 0 survives unless zeta(k s - (k-1)/2) vanishes there
    let zero_at_0 = {
        let m = (kf - 1.0) / 4.0;
        m >= 1.0 - 1e-12 && (m - m.round()).abs() < 1e-12
    };
    if !zero_at_0 {
        poles.push((c(0.0), 1));
    }
    Ok(SeriesPreset {
        name: format!("sigma-k({k})"),
        fe,
        lattice: "lambda_n = mu_n = n".into(),
        oracle_tags: vec!["positive gamma-ladder pole inside the strip".into()],
        expected_f_poles: poles,
        riesz_rho: 2.0,
        riesz_rel_tol: 1e-4,
    })
}

/// Instantiate a preset with the default coefficient cap.
pub fn preset(id: PresetId) -> Result<SeriesPreset> {
    preset_with_cap(id, DEFAULT_N_MAX)
}
