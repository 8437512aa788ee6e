//! Complex log-Gamma, Gamma-factor products, the elementary Mellin pair
//! f_{alpha,beta}, and Stirling magnitude estimates.
//!
//! Two independent evaluation schemes are exposed: a fixed-coefficient
//! Lanczos core used for |Im z| <= 20 and a shift-and-Stirling scheme with
//! ten correction terms used beyond. Both produce the principal branch of
//! log Gamma; their agreement in the overlap band is a tested invariant.

use crate::error::{Error, Result};
use crate::numeric::{Cplx, KahanComplex, Real};
use serde::{Deserialize, Serialize};

/// Radius around the non-positive integers inside which evaluation fails.
/// Residues near poles are the business of the residues module, never of
/// limiting evaluation.
pub const POLE_GUARD: f64 = 1e-8;

/// Imaginary-part switchover between the Lanczos and Stirling schemes.
pub const SCHEME_SWITCH_IM: f64 = 20.0;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

// Lanczos g = 7, 9 coefficients (GSL set).
const LANCZOS_G: f64 = 7.0;
const LANCZOS_C: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

// Stirling correction coefficients B_{2n} / (2n (2n-1)), n = 1..=10.
const STIRLING_C: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1_260.0,
    -1.0 / 1_680.0,
    1.0 / 1_188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3_617.0 / 122_400.0,
    43_867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// Real part above which the Stirling series with ten corrections is
/// accurate to well below 1e-15 relative.
const STIRLING_RE_MIN: f64 = 10.0;

fn distance_to_nearest_pole(z: Cplx) -> f64 {
    if z.re > 0.5 {
        return f64::INFINITY;
    }
    let k = (-z.re).round().max(0.0);
    (z - Cplx::new(-k, 0.0)).norm()
}

fn check_pole(z: Cplx, factor: usize) -> Result<()> {
    if distance_to_nearest_pole(z) < POLE_GUARD {
        return Err(Error::PoleProximity { z, guard: POLE_GUARD, factor });
    }
    Ok(())
}

/// Stirling asymptotic series for log Gamma, valid once `Re w` is large.
/// Exposed so magnitude estimates and the scheme cross-check can reuse the
/// exact tail the dispatcher uses.
pub fn stirling_series(w: Cplx) -> Cplx {
    let lw = w.ln();
    let mut v = (w - Cplx::new(0.5, 0.0)) * lw - w + Cplx::new(LN_SQRT_2PI, 0.0);
    let w2 = w * w;
    let mut p = w;
    for c in STIRLING_C {
        v += Cplx::new(c, 0.0) / p;
        p *= w2;
    }
    v
}

/// log Gamma by recurrence shifts into the Stirling-accurate region.
pub fn log_gamma_stirling(z: Cplx) -> Result<Cplx> {
    check_pole(z, 0)?;
    let mut w = z;
    let mut shift = KahanComplex::new();
    while w.re < STIRLING_RE_MIN {
        shift.add(w.ln());
        w += 1.0;
    }
    Ok(stirling_series(w) - shift.value())
}

/// log Gamma by the Lanczos rational core (shifted up when `Re z < 0.5`).
pub fn log_gamma_lanczos(z: Cplx) -> Result<Cplx> {
    check_pole(z, 0)?;
    let mut w = z;
    let mut shift = KahanComplex::new();
    while w.re < 0.5 {
        shift.add(w.ln());
        w += 1.0;
    }
    let x = w - 1.0;
    let mut acc = Cplx::new(LANCZOS_C[0], 0.0);
    for (i, c) in LANCZOS_C.iter().enumerate().skip(1) {
        acc += Cplx::new(*c, 0.0) / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    let v = (x + 0.5) * t.ln() - t + Cplx::new(LN_SQRT_2PI, 0.0) + acc.ln();
    Ok(v - shift.value())
}

/// Principal branch of log Gamma(z), continuous on the cut plane.
///
/// Fails with a pole-proximity error inside the guard radius of a
/// non-positive integer.
pub fn log_gamma(z: Cplx) -> Result<Cplx> {
    if z.im.abs() <= SCHEME_SWITCH_IM {
        log_gamma_lanczos(z)
    } else {
        log_gamma_stirling(z)
    }
}

/// Gamma(z) via `exp(log_gamma)`. Convenience for moderate arguments.
pub fn gamma_fn(z: Cplx) -> Result<Cplx> {
    Ok(log_gamma(z)?.exp())
}

/// The vectors (alpha_i), (beta_i) of a Gamma-factor product together with
/// the cached degree d' = sum(alpha_i).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSignature {
    alphas: Vec<Real>,
    betas: Vec<Cplx>,
    dprime: Real,
}

impl GammaSignature {
    /// Checked constructor: r >= 1, alpha_i > 0, Re(beta_i) >= 0.
    pub fn new(alphas: Vec<Real>, betas: Vec<Cplx>) -> Result<Self> {
        for b in &betas {
            if b.re < 0.0 {
                return Err(Error::InvalidSignature(format!(
                    "Re(beta) must be >= 0, got {b}"
                )));
            }
        }
        Self::new_relaxed(alphas, betas)
    }

    /// Constructor allowing Re(beta_i) < 0. The sigma-k family ships with
    /// beta_2 = -(k-1)/4 even though the class definition asks for
    /// non-negative real parts; everything downstream only needs the pole
    /// ladder bookkeeping to stay exact.
    pub fn new_relaxed(alphas: Vec<Real>, betas: Vec<Cplx>) -> Result<Self> {
        if alphas.is_empty() || alphas.len() != betas.len() {
            return Err(Error::InvalidSignature(format!(
                "need r >= 1 with matching lengths, got {} alphas and {} betas",
                alphas.len(),
                betas.len()
            )));
        }
        if alphas.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidSignature("every alpha must be positive".into()));
        }
        if betas.iter().any(|b| !b.re.is_finite() || !b.im.is_finite()) {
            return Err(Error::InvalidSignature("every beta must be finite".into()));
        }
        let mut d = crate::numeric::KahanSum::new();
        for a in &alphas {
            d.add(*a);
        }
        let dprime = d.value();
        Ok(Self { alphas, betas, dprime })
    }

    pub fn r(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[Real] {
        &self.alphas
    }

    pub fn betas(&self) -> &[Cplx] {
        &self.betas
    }

    /// d' = sum of alphas; controls kernel decay and asymptotic frequency.
    pub fn dprime(&self) -> Real {
        self.dprime
    }

    /// Same alphas with conjugated betas (the bar-side signature).
    pub fn conjugate(&self) -> Self {
        Self {
            alphas: self.alphas.clone(),
            betas: self.betas.iter().map(|b| b.conj()).collect(),
            dprime: self.dprime,
        }
    }

    /// True when every beta is real, so kernel values on x > 0 are real.
    pub fn is_real(&self) -> bool {
        self.betas.iter().all(|b| b.im == 0.0)
    }

    /// Sum of log Gamma(alpha_i s + beta_i), ascending i, compensated.
    pub fn log_product(&self, s: Cplx) -> Result<Cplx> {
        let mut acc = KahanComplex::new();
        for (i, (&a, &b)) in self.alphas.iter().zip(&self.betas).enumerate() {
            let z = a * s + b;
            check_pole(z, i).map_err(|e| match e {
                Error::PoleProximity { z, guard, .. } => Error::PoleProximity { z, guard, factor: i },
                other => other,
            })?;
            acc.add(log_gamma(z)?);
        }
        Ok(acc.value())
    }

    /// Poles of factor i sit at s = -(beta_i + k)/alpha_i, k = 0, 1, 2, ...
    pub fn factor_pole(&self, i: usize, k: usize) -> Cplx {
        -(self.betas[i] + k as f64) / self.alphas[i]
    }
}

/// Complex value in the form mantissa * 2^exponent2 with |mantissa| in [1,2).
///
/// Gamma products at large heights overflow f64 range (the delta = 12 preset
/// does on its contour); all products flow through this representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledComplex {
    pub mantissa: Cplx,
    pub exponent2: i64,
}

impl ScaledComplex {
    pub fn zero() -> Self {
        Self { mantissa: Cplx::new(0.0, 0.0), exponent2: 0 }
    }

    /// Build from a value given as its (complex) natural logarithm.
    pub fn from_log(log: Cplx) -> Self {
        if log.re == f64::NEG_INFINITY {
            return Self::zero();
        }
        let e2 = (log.re / std::f64::consts::LN_2).floor();
        let m = (log - Cplx::new(e2 * std::f64::consts::LN_2, 0.0)).exp();
        Self { mantissa: m, exponent2: e2 as i64 }
    }

    /// Convert to a plain complex number; fails when the exponent exceeds
    /// f64 range instead of silently saturating.
    pub fn to_complex(self) -> Result<Cplx> {
        if self.mantissa == Cplx::new(0.0, 0.0) {
            return Ok(Cplx::new(0.0, 0.0));
        }
        if self.exponent2 > 1020 || self.exponent2 < -1060 {
            return Err(Error::RangeOverflow { exp2: self.exponent2 });
        }
        let scale = (self.exponent2 as f64).exp2();
        Ok(self.mantissa * scale)
    }

    /// log2 of the modulus.
    pub fn log2_abs(self) -> f64 {
        if self.mantissa == Cplx::new(0.0, 0.0) {
            return f64::NEG_INFINITY;
        }
        self.exponent2 as f64 + self.mantissa.norm().log2()
    }
}

/// Evaluate the Gamma block Prod Gamma(alpha_i s + beta_i) as a ScaledComplex.
pub fn gamma_product(sig: &GammaSignature, s: Cplx) -> Result<ScaledComplex> {
    Ok(ScaledComplex::from_log(sig.log_product(s)?))
}

/// The elementary Mellin pre-image of Gamma(alpha s + beta):
/// f_{alpha,beta}(x) = x^(beta/alpha) exp(-x^(1/alpha)) / alpha, x > 0,
/// so that integral_0^inf f_{alpha,beta}(x) x^(s-1) dx = Gamma(alpha s + beta).
/// (Substituting u = x^(1/alpha) reduces the integral to Gamma directly;
/// the single-factor kernel inversion test pins the orientation of the
/// x^(beta/alpha) power.)
///
/// Underflows to zero for large x.
pub fn f_alpha_beta(alpha: Real, beta: Cplx, x: Real) -> Cplx {
    debug_assert!(x > 0.0 && alpha > 0.0);
    let lx = x.ln();
    let log = Cplx::new(-(lx / alpha).exp() + lx * (beta.re / alpha) - alpha.ln(), lx * beta.im / alpha);
    log.exp()
}

/// Factorwise Stirling magnitude of the Gamma block on the line Re s = a:
/// prod over i of sqrt(2 pi) e^{-(pi/2)|a_i t + c_i|} |a_i t + c_i|^{a_i a + b_i - 1/2}.
///
/// Requires every |alpha_i t + Im beta_i| to clear the asymptotic threshold.
pub fn gamma_magnitude_estimate(sig: &GammaSignature, a: Real, t: Real) -> Result<Real> {
    const THRESHOLD: f64 = 4.0;
    let mut log_mag = crate::numeric::KahanSum::new();
    for (&alpha, &beta) in sig.alphas().iter().zip(sig.betas()) {
        let ti = alpha * t + beta.im;
        if ti.abs() < THRESHOLD {
            return Err(Error::AsymptoticThreshold { t: ti.abs(), threshold: THRESHOLD });
        }
        let sigma = alpha * a + beta.re;
        log_mag.add(LN_SQRT_2PI);
        log_mag.add(-std::f64::consts::FRAC_PI_2 * ti.abs());
        log_mag.add((sigma - 0.5) * ti.abs().ln());
    }
    Ok(log_mag.value().exp())
}

/// Same factorwise magnitude, returned as log to avoid underflow when sizing
/// contour tails for large-degree products.
pub(crate) fn log_gamma_magnitude(sig: &GammaSignature, a: Real, t: Real) -> Real {
    let mut log_mag = crate::numeric::KahanSum::new();
    for (&alpha, &beta) in sig.alphas().iter().zip(sig.betas()) {
        let ti = (alpha * t + beta.im).abs().max(1e-3);
        let sigma = alpha * a + beta.re;
        log_mag.add(LN_SQRT_2PI);
        log_mag.add(-std::f64::consts::FRAC_PI_2 * ti);
        log_mag.add((sigma - 0.5) * ti.ln());
    }
    log_mag.value()
}
