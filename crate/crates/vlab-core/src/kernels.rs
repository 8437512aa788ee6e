//! Inverse-Mellin kernels Z, Y, X on vertical lines.
//!
//! Z inverts the bare Gamma block, Y carries an extra Gamma(s), X carries
//! Gamma(delta - s). Values come from fixed-order Gauss-Legendre panels on
//! the truncated line with a Stirling tail bound; an independent nested
//! iterated-integral oracle and a calibrated decay envelope live alongside.

use crate::error::{Error, Result};
use crate::gamma::{
    log_gamma, log_gamma_magnitude, GammaSignature, POLE_GUARD,
};
use crate::numeric::{Cplx, KahanComplex, Real};
use crate::quadrature::{adaptive_log_trapezoid, gauss_legendre, PanelLayout};
use serde::{Deserialize, Serialize};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const TWO_PI: f64 = std::f64::consts::TAU;

/// Which kernel to invert. X needs the functional-equation delta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KernelKind {
    Z,
    Y,
    X { delta: Real },
}

impl KernelKind {
    fn extra_gamma_count(self) -> f64 {
        match self {
            KernelKind::Z => 0.0,
            _ => 1.0,
        }
    }
}

/// Vertical-line quadrature description: the line Re s = a truncated at
/// |Im s| = t_max, split into `panels` Gauss-Legendre panels per half-line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub a: Real,
    pub t_max: Real,
    pub panels: usize,
    pub nodes_per_panel: usize,
    pub tol: Real,
}

impl ContourSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.t_max > 0.0 && self.tol > 0.0) {
            return Err(Error::Config("contour needs finite a, t_max > 0, tol > 0".into()));
        }
        let needed = self.panels * self.nodes_per_panel;
        let budget = node_budget();
        if needed > budget {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        Ok(())
    }
}

/// Kernel value with an a-posteriori error estimate (max of the half-order
/// quadrature difference and the Stirling tail bound).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: Cplx,
    pub error: Real,
}

/// Global quadrature node cap, overridable through VLAB_NODE_BUDGET.
pub fn node_budget() -> usize {
    static BUDGET: std::sync::OnceLock<usize> = std::sync::OnceLock::new();
    *BUDGET.get_or_init(|| {
        std::env::var("VLAB_NODE_BUDGET")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(4_000_000)
    })
}

/// Default |log x| range a contour serves; enters the tail bound through
/// x^(-a) and the node density through |log x|.
const X_LOG_MAX: f64 = 3.0;

/// Wider range used inside the identity sums, whose kernel arguments reach
/// lambda_n x ~ 150 before the coefficient envelopes cut them off.
pub(crate) const X_LOG_MAX_WIDE: f64 = 5.0;

fn kind_extra_log_mag(kind: KernelKind, a: f64, t: f64) -> f64 {
    match kind {
        KernelKind::Z => 0.0,
        KernelKind::Y => LN_SQRT_2PI - std::f64::consts::FRAC_PI_2 * t + (a - 0.5) * t.max(1.5).ln(),
        KernelKind::X { delta } => {
            LN_SQRT_2PI - std::f64::consts::FRAC_PI_2 * t + (delta - a - 0.5) * t.max(1.5).ln()
        }
    }
}

/// Logarithm of the Stirling tail bound for the truncated line integral:
/// integral over |t| > T of the factorwise magnitude, divided by 2 pi,
/// bounded via exp-domination. Returns None while T is too small for the
/// bound to be valid.
fn log_tail_bound(sig: &GammaSignature, kind: KernelKind, a: f64, t_max: f64) -> Option<f64> {
    let c_decay = std::f64::consts::FRAC_PI_2 * (sig.dprime() + kind.extra_gamma_count());
    let mut p_poly: f64 = sig
        .alphas()
        .iter()
        .zip(sig.betas())
        .map(|(&al, be)| al * a + be.re - 0.5)
        .sum();
    p_poly += match kind {
        KernelKind::Z => 0.0,
        KernelKind::Y => a - 0.5,
        KernelKind::X { delta } => delta - a - 0.5,
    };
    let denom = c_decay - p_poly.max(0.0) / t_max;
    if denom < 0.5 * c_decay {
        return None;
    }
    let log_m = log_gamma_magnitude(sig, a, t_max) + kind_extra_log_mag(kind, a, t_max);
    // both half-lines, 1/(2 pi) prefactor
    Some(log_m + (2.0 / TWO_PI / denom).ln())
}

/// Pick a truncation height and panel layout so the Stirling tail beyond
/// t_max stays below tol/4 across the served x-range and the node density
/// gives at least eight nodes per oscillation period.
pub fn choose_truncation(
    sig: &GammaSignature,
    kind: KernelKind,
    a: Real,
    tol: Real,
) -> Result<ContourSpec> {
    choose_truncation_with_range(sig, kind, a, tol, X_LOG_MAX)
}

/// As `choose_truncation` with an explicit |log x| serving range.
pub fn choose_truncation_with_range(
    sig: &GammaSignature,
    kind: KernelKind,
    a: Real,
    tol: Real,
    x_log_max: Real,
) -> Result<ContourSpec> {
    if tol <= 0.0 {
        return Err(Error::Config("tolerance must be positive".into()));
    }
    // Worst-case x^{-a} amplification over the served range.
    let log_x_amp = a.abs() * x_log_max;
    let target = (tol / 4.0).ln() - log_x_amp;
    let mut t_max = 8.0;
    let mut ok = false;
    for _ in 0..400 {
        if let Some(lb) = log_tail_bound(sig, kind, a, t_max) {
            if lb <= target {
                ok = true;
                break;
            }
        }
        t_max *= 1.2;
    }
    if !ok {
        let bound = log_tail_bound(sig, kind, a, t_max).map(f64::exp).unwrap_or(f64::INFINITY);
        return Err(Error::TailBound { t_max, bound, tol });
    }

    let alpha_max = sig.alphas().iter().cloned().fold(0.0f64, f64::max);
    let freq = sig.dprime() * (alpha_max * t_max).max(2.0).ln()
        + kind.extra_gamma_count() * t_max.max(2.0).ln()
        + x_log_max;
    let nodes_per_panel = 24usize;
    let density = 8.0 * freq / TWO_PI;
    let total_nodes = (density * t_max).ceil() as usize + nodes_per_panel;
    let panels = total_nodes.div_ceil(nodes_per_panel).max(3);
    let spec = ContourSpec { a, t_max, panels, nodes_per_panel, tol };
    spec.validate()?;
    Ok(spec)
}

fn kind_extra_log(kind: KernelKind, s: Cplx) -> Result<Cplx> {
    match kind {
        KernelKind::Z => Ok(Cplx::new(0.0, 0.0)),
        KernelKind::Y => log_gamma(s),
        KernelKind::X { delta } => log_gamma(Cplx::new(delta, 0.0) - s),
    }
}

fn validate_line(sig: &GammaSignature, kind: KernelKind, a: f64) -> Result<()> {
    for (i, (&al, be)) in sig.alphas().iter().zip(sig.betas()).enumerate() {
        if al * a + be.re <= POLE_GUARD {
            return Err(Error::PoleOnLine {
                a,
                pole: Cplx::new(-(be.re) / al, -(be.im) / al),
                dist: (al * a + be.re).abs(),
            });
        }
        let _ = i;
    }
    match kind {
        KernelKind::Y => {
            if a <= POLE_GUARD {
                return Err(Error::PoleOnLine { a, pole: Cplx::new(0.0, 0.0), dist: a.abs() });
            }
        }
        KernelKind::X { delta } => {
            if a <= POLE_GUARD {
                return Err(Error::PoleOnLine { a, pole: Cplx::new(0.0, 0.0), dist: a.abs() });
            }
            // Gamma(delta - s) poles sit at s = delta + k; the line may lie on
            // either side of them but must not pass through one.
            let mut k = 0.0f64;
            while delta + k < a + 1.0 {
                if (a - (delta + k)).abs() < 1e-3 {
                    return Err(Error::PoleOnLine {
                        a,
                        pole: Cplx::new(delta + k, 0.0),
                        dist: (a - (delta + k)).abs(),
                    });
                }
                k += 1.0;
            }
        }
        KernelKind::Z => {}
    }
    Ok(())
}

/// Precomputed kernel evaluator: Gamma-block node values are frozen once per
/// contour, so evaluating the kernel at many arguments costs one complex
/// exponential per node.
pub struct KernelEvaluator {
    a: f64,
    symmetric: bool,
    /// (s_j, w_j) with w_j = GL weight * panel scale * block(s_j) / (2 pi)
    nodes: Vec<(Cplx, Cplx)>,
    nodes_half: Vec<(Cplx, Cplx)>,
    log_tail: f64,
}

impl KernelEvaluator {
    pub fn new(kind: KernelKind, sig: &GammaSignature, spec: &ContourSpec) -> Result<Self> {
        Self::build(kind, sig, spec, false)
    }

    /// Force evaluation of both half-lines even for real betas; used by the
    /// realness property tests.
    pub fn new_both_halves(
        kind: KernelKind,
        sig: &GammaSignature,
        spec: &ContourSpec,
    ) -> Result<Self> {
        Self::build(kind, sig, spec, true)
    }

    fn build(
        kind: KernelKind,
        sig: &GammaSignature,
        spec: &ContourSpec,
        force_full: bool,
    ) -> Result<Self> {
        spec.validate()?;
        validate_line(sig, kind, spec.a)?;
        let symmetric = sig.is_real() && !force_full;
        let layout = PanelLayout::new(spec.t_max, spec.panels);
        let (xs, ws) = gauss_legendre(spec.nodes_per_panel);
        let (xs_h, ws_h) = gauss_legendre((spec.nodes_per_panel / 2).max(2));

        let block = |s: Cplx| -> Result<Cplx> {
            Ok((sig.log_product(s)? + kind_extra_log(kind, s)?).exp())
        };

        let mut nodes = Vec::new();
        let mut nodes_half = Vec::new();
        for p in 0..layout.panels() {
            let lo = layout.boundaries[p];
            let hi = layout.boundaries[p + 1];
            let c = 0.5 * (lo + hi);
            let h = 0.5 * (hi - lo);
            for (x, w) in xs.iter().zip(&ws) {
                let t = c + h * x;
                let s = Cplx::new(spec.a, t);
                let bw = block(s)? * (w * h / TWO_PI);
                nodes.push((s, bw));
                if !symmetric {
                    let s2 = Cplx::new(spec.a, -t);
                    nodes.push((s2, block(s2)? * (w * h / TWO_PI)));
                }
            }
            for (x, w) in xs_h.iter().zip(&ws_h) {
                let t = c + h * x;
                let s = Cplx::new(spec.a, t);
                let bw = block(s)? * (w * h / TWO_PI);
                nodes_half.push((s, bw));
                if !symmetric {
                    let s2 = Cplx::new(spec.a, -t);
                    nodes_half.push((s2, block(s2)? * (w * h / TWO_PI)));
                }
            }
        }
        let log_tail =
            log_tail_bound(sig, kind, spec.a, spec.t_max).unwrap_or(f64::INFINITY);
        Ok(Self { a: spec.a, symmetric, nodes, nodes_half, log_tail })
    }

    fn sum_nodes(nodes: &[(Cplx, Cplx)], ln_x: f64) -> Cplx {
        let mut acc = KahanComplex::new();
        for (s, w) in nodes {
            acc.add(w * (-s * ln_x).exp());
        }
        acc.value()
    }

    pub fn eval(&self, x: Real) -> KernelValue {
        debug_assert!(x > 0.0);
        let ln_x = x.ln();
        let full = Self::sum_nodes(&self.nodes, ln_x);
        let half = Self::sum_nodes(&self.nodes_half, ln_x);
        let (value, value_half) = if self.symmetric {
            (Cplx::new(2.0 * full.re, 0.0), Cplx::new(2.0 * half.re, 0.0))
        } else {
            (full, half)
        };
        let tail = (self.log_tail - self.a * ln_x).exp();
        let error = (value - value_half).norm().max(tail);
        KernelValue { value, error }
    }
}

/// Line-laddered kernel evaluation for Z and Y. The kernel value does not
/// depend on the line (no poles to the right), but the f64 cancellation
/// floor does: on the line Re s = a the quadrature resolves the
/// exponentially small value only down to machine epsilon times the node
/// magnitude, which is minimized near the saddle
/// a*(x) = (x / exp(sum alpha_i ln alpha_i))^(1/d'). Arguments are bucketed
/// to power-of-two multiples of the base line so evaluators are reused.
pub struct LadderedKernel {
    kind: KernelKind,
    sig: GammaSignature,
    base_a: f64,
    quad_tol: f64,
    ladder: std::cell::RefCell<std::collections::BTreeMap<i32, KernelEvaluator>>,
    log_gm: f64,
}

impl LadderedKernel {
    pub fn new(kind: KernelKind, sig: &GammaSignature, base_a: f64, quad_tol: f64) -> Result<Self> {
        if matches!(kind, KernelKind::X { .. }) {
            return Err(Error::InvalidData(
                "X kernel values are line-dependent; no ladder applies".into(),
            ));
        }
        let log_gm: f64 = sig.alphas().iter().map(|&al| al * al.ln()).sum();
        let me = Self {
            kind,
            sig: sig.clone(),
            base_a,
            quad_tol,
            ladder: std::cell::RefCell::new(std::collections::BTreeMap::new()),
            log_gm,
        };
        me.with_bucket(0, |_| ())?;
        Ok(me)
    }

    /// Degree entering the saddle position (the extra Gamma(s) of Y counts).
    fn d_eff(&self) -> f64 {
        self.sig.dprime() + self.kind.extra_gamma_count()
    }

    fn with_bucket<T>(&self, bucket: i32, f: impl FnOnce(&KernelEvaluator) -> T) -> Result<T> {
        let mut map = self.ladder.borrow_mut();
        if !map.contains_key(&bucket) {
            let a = self.base_a * (bucket as f64).exp2();
            let spec =
                choose_truncation_with_range(&self.sig, self.kind, a, self.quad_tol, X_LOG_MAX_WIDE)?;
            map.insert(bucket, KernelEvaluator::new(self.kind, &self.sig, &spec)?);
        }
        Ok(f(&map[&bucket]))
    }

    pub fn eval(&self, x: Real) -> Result<KernelValue> {
        let saddle = ((x.ln() - self.log_gm) / self.d_eff()).exp();
        let bucket = if saddle <= self.base_a {
            0
        } else {
            ((saddle / self.base_a).log2().round() as i32).clamp(0, 8)
        };
        self.with_bucket(bucket, |ev| ev.eval(x))
    }
}

/// Evaluate one kernel at one argument on the given contour.
pub fn eval_kernel(
    kind: KernelKind,
    sig: &GammaSignature,
    x: Real,
    contour: &ContourSpec,
) -> Result<KernelValue> {
    if x <= 0.0 {
        return Err(Error::Config("kernel argument must be positive".into()));
    }
    Ok(KernelEvaluator::new(kind, sig, contour)?.eval(x))
}

/// Convenience: choose a contour for the requested tolerance, then evaluate.
pub fn eval_kernel_auto(
    kind: KernelKind,
    sig: &GammaSignature,
    x: Real,
    a: Real,
    tol: Real,
) -> Result<KernelValue> {
    let spec = choose_truncation(sig, kind, a, tol)?;
    eval_kernel(kind, sig, x, &spec)
}

/// Independent oracle for the Y kernel: the iterated elementary integral
/// Y(x) = int f_{a_r,b_r}(u_r) du_r/u_r ... int f_{a_1,b_1}(u_1) e^{-x/(u_1..u_r)} du_1/u_1,
/// evaluated by trapezoid sums on the log scale, innermost first.
pub fn eval_kernel_nested(sig: &GammaSignature, x: Real, inner_tol: Real) -> Result<Cplx> {
    if sig.r() > 3 {
        return Err(Error::DimensionLimit { r: sig.r() });
    }
    if x <= 0.0 || inner_tol <= 0.0 {
        return Err(Error::Config("nested oracle needs x > 0 and inner_tol > 0".into()));
    }
    Ok(nested_level(sig, sig.r(), x, inner_tol))
}

fn nested_level(sig: &GammaSignature, level: usize, y: f64, tol: f64) -> Cplx {
    if level == 0 {
        return Cplx::new((-y).exp(), 0.0);
    }
    let alpha = sig.alphas()[level - 1];
    let beta = sig.betas()[level - 1];
    let step = 0.06 * alpha.min(1.0);
    // f_{alpha,beta}(e^v) with the du/u Jacobian absorbed by the log variable
    adaptive_log_trapezoid(
        |v| {
            let g = Cplx::new(-(v / alpha).exp() + v * beta.re / alpha - alpha.ln(), v * beta.im / alpha)
                .exp();
            if g == Cplx::new(0.0, 0.0) {
                return g;
            }
            g * nested_level(sig, level - 1, y * (-v).exp(), tol)
        },
        0.0,
        step,
        tol * 1e-4,
        40_000,
    )
}

/// Calibrated exponential decay envelope C exp(-c x^(1/D)) for the Z and Y
/// kernels, with D = d' and 1 + d' respectively.
#[derive(Debug, Clone, Copy)]
pub struct DecayBound {
    pub big_c: f64,
    pub c: f64,
    pub d_exp: f64,
}

impl DecayBound {
    pub fn eval(&self, x: f64) -> f64 {
        self.big_c * (-self.c * x.powf(1.0 / self.d_exp)).exp()
    }
}

/// Fit the envelope from kernel values at x0 and 2 x0 (x0 = 4^d'), with the
/// prefactor inflated by 1.5.
pub fn calibrate_decay(sig: &GammaSignature, kind: KernelKind) -> Result<DecayBound> {
    let d_exp = match kind {
        KernelKind::Z => sig.dprime(),
        KernelKind::Y => 1.0 + sig.dprime(),
        KernelKind::X { .. } => {
            return Err(Error::InvalidData(
                "X decays algebraically; use the residue envelope instead".into(),
            ))
        }
    };
    let x0 = 4.0f64.powf(sig.dprime());
    let a_line = default_line(sig, kind);
    let k1 = eval_kernel_auto(kind, sig, x0, a_line, 1e-12)?.value.norm();
    let k2 = eval_kernel_auto(kind, sig, 2.0 * x0, a_line, 1e-12)?.value.norm();
    if k1 <= 0.0 || k2 <= 0.0 || !k1.is_finite() || !k2.is_finite() {
        return Err(Error::CalibrationFailure { x: x0 });
    }
    let u1 = x0.powf(1.0 / d_exp);
    let u2 = (2.0 * x0).powf(1.0 / d_exp);
    let c = (k1.ln() - k2.ln()) / (u2 - u1);
    if !(c > 0.0) {
        return Err(Error::CalibrationFailure { x: x0 });
    }
    let mut big_c = 1.5 * k1 * (c * u1).exp();
    // the two-point fit absorbs the kernel's algebraic prefactor into c and
    // can undershoot far out; validate on a log grid and inflate C so the
    // envelope dominates there
    let mut bound = DecayBound { big_c, c, d_exp };
    let ev = KernelEvaluator::new(
        kind,
        sig,
        &choose_truncation(sig, kind, a_line, 1e-12)?,
    )?;
    let mut x = 1.0;
    while x <= 512.0 * x0 {
        let kv = ev.eval(x);
        let v = kv.value.norm();
        // past this point the quadrature only returns its own noise floor
        if v < 10.0 * kv.error || v < 1e-280 {
            break;
        }
        let ratio = v / bound.eval(x);
        if ratio > 0.8 {
            big_c *= ratio / 0.8;
            bound.big_c = big_c;
        }
        x *= 1.9;
    }
    Ok(bound)
}

/// Envelope value at x (x >= 1) for the given kernel kind.
pub fn kernel_decay_bound(sig: &GammaSignature, kind: KernelKind, x: Real) -> Result<Real> {
    if x < 1.0 {
        return Err(Error::Config("decay bound is calibrated for x >= 1".into()));
    }
    Ok(calibrate_decay(sig, kind)?.eval(x))
}

/// A default line placement with every Gamma-block argument comfortably
/// positive: a = max(1, max_i((0.25 - Re beta_i)/alpha_i)).
pub fn default_line(sig: &GammaSignature, kind: KernelKind) -> f64 {
    let mut a: f64 = 1.0;
    for (&al, be) in sig.alphas().iter().zip(sig.betas()) {
        a = a.max((0.25 - be.re) / al);
    }
    if let KernelKind::X { delta } = kind {
        // stay off the Gamma(delta - s) pole lattice
        while ((a - delta).rem_euclid(1.0)).min(1.0 - (a - delta).rem_euclid(1.0)) < 0.05 {
            a += 0.087;
        }
    }
    a
}

/// Left side of the Gamma-cosine transformation on the shifted line Re s = c
/// (c < -1/2, non-integer): (1/2 pi i) int Gamma(s) cos(pi s/2 + angle) x^{-s} ds.
pub fn gamma_cos_calibration(c: Real, angle: Real, x: Real, tol: Real) -> Result<Cplx> {
    if c >= -0.5 || (c - c.round()).abs() < 1e-9 {
        return Err(Error::IntegerC { c });
    }
    if x <= 0.0 {
        return Err(Error::Config("x must be positive".into()));
    }
    let ln_x = x.ln();
    // Point magnitude decays like |t|^(c - 1/2); the phase derivative
    // ln t - ln x ± pi/2 bounds the truncated tail by A(T)/Theta'(T).
    let mut t_max: f64 = 64.0;
    let target = tol / 4.0;
    for _ in 0..80 {
        let amp = 0.4 * x.powf(-c) * t_max.powf(c - 0.5);
        let osc = (t_max.ln() - ln_x).abs().max(0.7);
        if amp / osc < target {
            break;
        }
        t_max *= 1.4;
    }
    let freq = t_max.max(2.0).ln() + ln_x.abs() + 2.0;
    let nodes_per_panel = 24usize;
    let total_nodes = (8.0 * freq / TWO_PI * t_max).ceil() as usize + nodes_per_panel;
    let panels = total_nodes.div_ceil(nodes_per_panel).max(3);
    let budget = node_budget();
    if total_nodes > budget {
        return Err(Error::BudgetExceeded { needed: total_nodes, budget });
    }

    let layout = PanelLayout::new(t_max, panels);
    let (xs, ws) = gauss_legendre(nodes_per_panel);
    // log(cos w) for Im w >> 0 is -i w - ln 2 up to e^{-2 Im w}; combining in
    // log space keeps Gamma * cos finite where either factor alone overflows.
    let log_cos = |w: Cplx| -> Cplx {
        if w.im > 18.0 {
            -Cplx::i() * w - Cplx::new(std::f64::consts::LN_2, 0.0)
                + (Cplx::new(1.0, 0.0) + (Cplx::new(0.0, 2.0) * w).exp()).ln()
        } else if w.im < -18.0 {
            Cplx::i() * w - Cplx::new(std::f64::consts::LN_2, 0.0)
                + (Cplx::new(1.0, 0.0) + (Cplx::new(0.0, -2.0) * w).exp()).ln()
        } else {
            w.cos().ln()
        }
    };
    let mut acc = KahanComplex::new();
    for p in 0..layout.panels() {
        let lo = layout.boundaries[p];
        let hi = layout.boundaries[p + 1];
        let cm = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        for (xn, w) in xs.iter().zip(&ws) {
            let t = cm + h * xn;
            let s = Cplx::new(c, t);
            let lg = log_gamma(s)?;
            let f = (lg + log_cos(std::f64::consts::FRAC_PI_2 * s + angle) - s * ln_x).exp();
            // conjugate symmetry: angle and c are real
            acc.add((f + f.conj()) * (w * h / TWO_PI));
        }
    }
    Ok(acc.value())
}
