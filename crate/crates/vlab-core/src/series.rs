//! Coefficient sequences, lattice ladders, and the analytic-continuation
//! data a series carries for residue work.

use crate::error::{Error, Result};
use crate::numeric::{Cplx, Real};
use crate::zeta::{dirichlet_beta, zeta};
use serde::{Deserialize, Serialize};

/// The exponent lattice lambda_n (or mu_n). Every shipped preset uses the
/// integers; explicit ladders serve user configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Ladder {
    Integers,
    Explicit(Vec<Real>),
}

impl Ladder {
    /// 1-based lattice point.
    pub fn get(&self, n: usize) -> Option<Real> {
        debug_assert!(n >= 1);
        match self {
            Ladder::Integers => Some(n as Real),
            Ladder::Explicit(v) => v.get(n - 1).copied(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Ladder::Explicit(v) = self {
            if v.is_empty() {
                return Err(Error::InvalidData("explicit ladder must be non-empty".into()));
            }
            if v[0] <= 0.0 {
                return Err(Error::InvalidData("lattice points must be positive".into()));
            }
            if v.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidData("lattice must be strictly increasing".into()));
            }
        }
        Ok(())
    }
}

/// Named coefficient generators. Values are produced for a whole prefix at
/// once (sieves for the multiplicative ones) and cached immutably.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CoeffGen {
    Ones,
    Divisor,
    RTwo,
    SigmaZ { z_re: Real, z_im: Real },
    SigmaZK { z_re: Real, z_im: Real, k: u32 },
    Tau,
    Explicit(Vec<(Real, Real)>),
}

impl CoeffGen {
    fn generate(&self, n_max: usize) -> Result<Vec<Cplx>> {
        match self {
            CoeffGen::Ones => Ok(vec![Cplx::new(1.0, 0.0); n_max]),
            CoeffGen::Divisor => {
                let mut v = vec![0.0f64; n_max + 1];
                for d in 1..=n_max {
                    let mut m = d;
                    while m <= n_max {
                        v[m] += 1.0;
                        m += d;
                    }
                }
                Ok(v[1..].iter().map(|&x| Cplx::new(x, 0.0)).collect())
            }
            CoeffGen::RTwo => {
                // r2(n) = 4 sum_{d | n} chi_4(d)
                let mut v = vec![0.0f64; n_max + 1];
                for d in (1..=n_max).step_by(2) {
                    let chi = if d % 4 == 1 { 4.0 } else { -4.0 };
                    let mut m = d;
                    while m <= n_max {
                        v[m] += chi;
                        m += d;
                    }
                }
                Ok(v[1..].iter().map(|&x| Cplx::new(x, 0.0)).collect())
            }
            CoeffGen::SigmaZ { z_re, z_im } => sigma_sieve(n_max, Cplx::new(*z_re, *z_im), 1),
            CoeffGen::SigmaZK { z_re, z_im, k } => {
                sigma_sieve(n_max, Cplx::new(*z_re, *z_im), *k as usize)
            }
            CoeffGen::Tau => {
                let t = tau_coefficients(n_max)?;
                Ok(t.iter().map(|&x| Cplx::new(x as f64, 0.0)).collect())
            }
            CoeffGen::Explicit(v) => {
                if v.len() < n_max {
                    return Err(Error::TruncationInfeasible { needed: n_max, cap: v.len() });
                }
                Ok(v[..n_max].iter().map(|&(re, im)| Cplx::new(re, im)).collect())
            }
        }
    }
}

fn sigma_sieve(n_max: usize, z: Cplx, k: usize) -> Result<Vec<Cplx>> {
    let mut v = vec![Cplx::new(0.0, 0.0); n_max + 1];
    let mut d = 1usize;
    loop {
        let dk = match d.checked_pow(k as u32) {
            Some(p) if p <= n_max => p,
            _ => break,
        };
        let dz = Cplx::new(d as f64, 0.0).powc(z);
        let mut m = dk;
        while m <= n_max {
            v[m] += dz;
            m += dk;
        }
        d += 1;
    }
    Ok(v[1..].to_vec())
}

/// Ramanujan tau via the eta-product log-derivative recurrence.
///
/// With E = prod (1 - q^n) (sparse by pentagonal numbers) and A = E^24,
/// A' E = 24 A E' gives N A_N = sum over pentagonal m of
/// e_m (25 m - N) A_{N-m}; tau(n) = A_{n-1}. Exact in checked i128.
pub fn tau_coefficients(n_max: usize) -> Result<Vec<i128>> {
    if n_max == 0 {
        return Ok(vec![]);
    }
    if n_max > 100_000 {
        return Err(Error::TruncationInfeasible { needed: n_max, cap: 100_000 });
    }
    // pentagonal exponents of E = prod(1 - q^n), with signs
    let mut pent: Vec<(usize, i128)> = Vec::new();
    let mut j = 1i64;
    loop {
        let g1 = (j * (3 * j - 1) / 2) as usize;
        let g2 = (j * (3 * j + 1) / 2) as usize;
        let sign = if j % 2 == 0 { 1i128 } else { -1i128 };
        if g1 >= n_max && g2 >= n_max {
            break;
        }
        if g1 < n_max {
            pent.push((g1, sign));
        }
        if g2 < n_max {
            pent.push((g2, sign));
        }
        j += 1;
    }
    pent.sort_unstable();

    let mut a = vec![0i128; n_max];
    a[0] = 1;
    for n in 1..n_max {
        let mut acc: i128 = 0;
        for &(m, sign) in &pent {
            if m > n {
                break;
            }
            let w = 25 * m as i128 - n as i128;
            let term = sign
                .checked_mul(w)
                .and_then(|v| v.checked_mul(a[n - m]))
                .ok_or(Error::CoefficientOverflow { n })?;
            acc = acc.checked_add(term).ok_or(Error::CoefficientOverflow { n })?;
        }
        debug_assert_eq!(acc % n as i128, 0);
        a[n] = acc / n as i128;
    }
    Ok(a)
}

/// One side of the series pair: lattice, coefficients, normalization and the
/// envelope |a_n| <= bound_c * n^bound_p used for truncation estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSide {
    pub ladder: Ladder,
    pub gen: CoeffGen,
    /// normalization multiplying every coefficient (pi^(z/2) and friends)
    pub scale: (Real, Real),
    pub bound_c: Real,
    pub bound_p: Real,
}

impl SeriesSide {
    pub fn scale_c(&self) -> Cplx {
        Cplx::new(self.scale.0, self.scale.1)
    }

    /// Envelope for |a_n| including normalization.
    pub fn coeff_envelope(&self, n: usize) -> Real {
        self.scale_c().norm() * self.bound_c * (n as Real).powf(self.bound_p)
    }
}

/// The sequences lambda_n, a_n and mu_n, b_n with generation cap.
#[derive(Debug, Clone)]
pub struct ArithmeticSeriesPair {
    pub a_side: SeriesSide,
    pub b_side: SeriesSide,
    pub n_max: usize,
    a_cache: Vec<Cplx>,
    b_cache: Vec<Cplx>,
}

impl ArithmeticSeriesPair {
    pub fn new(a_side: SeriesSide, b_side: SeriesSide, n_max: usize) -> Result<Self> {
        a_side.ladder.validate()?;
        b_side.ladder.validate()?;
        let sa = a_side.scale_c();
        let sb = b_side.scale_c();
        let a_cache: Vec<Cplx> = a_side.gen.generate(n_max)?.into_iter().map(|c| c * sa).collect();
        let b_cache: Vec<Cplx> = b_side.gen.generate(n_max)?.into_iter().map(|c| c * sb).collect();
        if a_cache.iter().all(|c| c.norm() == 0.0) || b_cache.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::InvalidData("coefficients must not be identically zero".into()));
        }
        Ok(Self { a_side, b_side, n_max, a_cache, b_cache })
    }

    pub fn lambda(&self, n: usize) -> Option<Real> {
        self.a_side.ladder.get(n)
    }

    pub fn mu(&self, n: usize) -> Option<Real> {
        self.b_side.ladder.get(n)
    }

    pub fn a(&self, n: usize) -> Option<Cplx> {
        self.a_cache.get(n - 1).copied()
    }

    pub fn b(&self, n: usize) -> Option<Cplx> {
        self.b_cache.get(n - 1).copied()
    }

    /// b_n conjugated, as the conjugate-side sums require.
    pub fn b_bar(&self, n: usize) -> Option<Cplx> {
        self.b(n).map(|c| c.conj())
    }

    pub fn cap(&self) -> usize {
        self.n_max.min(self.a_cache.len()).min(self.b_cache.len())
    }
}

/// Zero ladder of the series factor: zeros at start + j*step for j >= 0
/// (step < 0), each of the given order. These cancel Gamma poles per the
/// catalog rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroProgression {
    pub start: Real,
    pub step: Real,
    pub order: usize,
}

impl ZeroProgression {
    /// Zero order this progression contributes at a (real) location.
    pub fn order_at(&self, re: Real) -> usize {
        let j = (re - self.start) / self.step;
        if j >= -1e-9 && (j - j.round()).abs() < 1e-9 {
            self.order
        } else {
            0
        }
    }
}

/// Declared analytic data for phi: closed continuation where available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PhiExpr {
    /// scale * prod_i zeta(k_i s - z_i)
    ZetaProduct { scale: (Real, Real), factors: Vec<(Real, Real)> },
    /// scale * zeta(s) * L(s, chi_4)
    ZetaBeta { scale: Real },
    /// No closed continuation (tau; declared-data custom series). Values
    /// are unavailable off the half-plane of absolute convergence.
    DeclaredOnly,
}

impl PhiExpr {
    /// Value of the continued phi at s. Fails for DeclaredOnly.
    pub fn eval(&self, s: Cplx) -> Result<Cplx> {
        match self {
            PhiExpr::ZetaProduct { scale, factors } => {
                let mut v = Cplx::new(scale.0, scale.1);
                for &(k, z) in factors {
                    v *= zeta(k * s - z);
                }
                Ok(v)
            }
            PhiExpr::ZetaBeta { scale } => Ok(*scale * zeta(s) * dirichlet_beta(s)),
            PhiExpr::DeclaredOnly => Err(Error::PhiUnavailable {
                s,
                reason: "series carries no closed analytic continuation".into(),
            }),
        }
    }
}
