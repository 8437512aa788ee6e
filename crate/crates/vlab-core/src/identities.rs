//! Both sides of the modular relation, the Riesz-sum identity and the
//! auxiliary modular relation; numerical reconstruction of the completed
//! functional equation; the oscillatory asymptotics of the I_rho integral.

use crate::error::{Error, Result};
use crate::fe::FunctionalEquationData;
use crate::gamma::log_gamma;
use crate::kernels::{
    calibrate_decay, choose_truncation, node_budget, KernelEvaluator, KernelKind,
};
use crate::numeric::{Cplx, KahanComplex, KahanSum, Real};
use crate::quadrature::{gauss_legendre, PanelLayout};
use crate::residues::{residual_p1_terms, residual_p_terms, residual_q_rho, QRhoResult};
use serde::{Deserialize, Serialize};

const TWO_PI: f64 = std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityTag {
    Modular,
    Riesz,
    AuxModular,
    FunctionalEq,
}

impl std::fmt::Display for IdentityTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            IdentityTag::Modular => "modular",
            IdentityTag::Riesz => "riesz",
            IdentityTag::AuxModular => "aux_modular",
            IdentityTag::FunctionalEq => "functional_eq",
        };
        f.write_str(s)
    }
}

/// Evaluation input of one report: x for the modular/Riesz relations, s for
/// the functional equation, rho where relevant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalPoint {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub s: Option<Cplx>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rho: Option<Real>,
}

/// One identity, one point: both sides, residual, work done, and the
/// truncation estimate backing the pass/fail verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: IdentityTag,
    pub point: EvalPoint,
    pub lhs: Cplx,
    pub rhs: Cplx,
    pub residual: Real,
    pub terms_lhs: usize,
    pub terms_rhs: usize,
    pub truncation_estimate: Real,
    pub passed: bool,
}

impl IdentityReport {
    fn finish(
        identity: IdentityTag,
        point: EvalPoint,
        lhs: Cplx,
        rhs: Cplx,
        terms_lhs: usize,
        terms_rhs: usize,
        truncation_estimate: Real,
        tol: Real,
    ) -> Self {
        let residual = (lhs - rhs).norm();
        Self {
            identity,
            point,
            lhs,
            rhs,
            residual,
            terms_lhs,
            terms_rhs,
            truncation_estimate,
            passed: residual <= tol,
        }
    }

    /// The regression canary: a tight truncation estimate with a failing
    /// residual means the identity itself failed, not the numerics.
    pub fn is_genuine_failure(&self, tol: Real) -> bool {
        self.truncation_estimate < tol / 2.0 && self.residual > tol
    }
}

fn gamma_real(x: Real) -> Real {
    log_gamma(Cplx::new(x, 0.0)).map(|v| v.exp().re).unwrap_or(f64::NAN)
}

/// Real parts at which some integrand factor has a pole; used to keep strip
/// edges clear of them.
fn pole_abscissae(fe: &FunctionalEquationData, depth: Real) -> Vec<Real> {
    let mut out = Vec::new();
    for p in &fe.declared_poles {
        out.push(p.location.re);
    }
    for i in 0..fe.sig.r() {
        for k in 0.. {
            let re = fe.sig.factor_pole(i, k).re;
            if re < -depth {
                break;
            }
            out.push(re);
        }
    }
    let mut k = 0.0;
    while k <= depth {
        out.push(-k);
        k += 1.0;
    }
    out
}

fn dodge_strip_edges(fe: &FunctionalEquationData, mut a: Real) -> Real {
    let margin = 0.02;
    let depth = a.abs() + fe.delta.abs() + 3.0;
    let abscissae = pole_abscissae(fe, depth);
    'outer: for _ in 0..200 {
        for &p in &abscissae {
            if (a - p).abs() < margin || (fe.delta - a - p).abs() < margin {
                a += 0.0831;
                continue 'outer;
            }
        }
        return a;
    }
    a
}

/// Smallest admissible line for the modular/Riesz strips:
/// max{0, sigma_a, sigma_b} + 1/4, nudged off pole abscissae.
pub fn default_a(fe: &FunctionalEquationData) -> Real {
    dodge_strip_edges(fe, fe.sigma_a.max(fe.sigma_b).max(0.0) + 0.25)
}

/// Line for the auxiliary relation: pushed right so the X-side series gains
/// decay mu_n^-(delta + K) with K excluded Gamma(delta - s) poles.
pub fn default_aux_a(fe: &FunctionalEquationData) -> Real {
    let base = fe.sigma_a.max(fe.sigma_b).max(0.0) + 2.55;
    let mut a = dodge_strip_edges(fe, base);
    // stay off the Gamma(delta - s) lattice as well
    for _ in 0..100 {
        let frac = (a - fe.delta).rem_euclid(1.0);
        if a > fe.delta && frac.min(1.0 - frac) < 0.05 {
            a = dodge_strip_edges(fe, a + 0.0831);
        } else {
            break;
        }
    }
    a
}

/// Line for the Riesz identity: above max{0, sigma_a, sigma_b}, but low
/// enough that the defining I_rho integrals converge:
/// rho > (2a - delta) d' - 1.
pub fn riesz_a(fe: &FunctionalEquationData, rho: Real) -> Result<Real> {
    let floor = fe.sigma_a.max(fe.sigma_b).max(0.0);
    let ceil = fe.delta / 2.0 + (rho + 1.0) / (2.0 * fe.dprime()) - 0.05;
    if ceil <= floor + 0.02 {
        return Err(Error::RhoBound { rho, bound: (2.0 * floor - fe.delta) * fe.dprime() - 1.0 });
    }
    let mut a = (floor + 0.25).min(0.5 * (floor + ceil));
    a = dodge_strip_edges(fe, a);
    if a >= ceil {
        // dodging pushed too far; walk down instead
        a = ceil - 0.033;
        while pole_abscissae(fe, a.abs() + fe.delta.abs() + 3.0)
            .iter()
            .any(|&p| (a - p).abs() < 0.02 || (fe.delta - a - p).abs() < 0.02)
        {
            a -= 0.0831;
            if a <= floor {
                return Err(Error::RhoBound { rho, bound: ceil });
            }
        }
    }
    Ok(a)
}

/// Truncated kernel-weighted coefficient sum with tail control from a decay
/// envelope: sum of coeff(n) * eval(arg(n)), stopped once the envelope tail
/// falls below tail_tol.
struct KernelSum {
    value: Cplx,
    terms: usize,
    tail_estimate: Real,
    quad_error: Real,
}

fn kernel_sum<FE, FA, FC>(
    eval: FE,
    bound: &crate::kernels::DecayBound,
    coeff_env: impl Fn(usize) -> Real,
    arg: FA,
    coeff: FC,
    cap: usize,
    tail_tol: Real,
) -> Result<KernelSum>
where
    FE: Fn(Real) -> Result<crate::kernels::KernelValue>,
    FA: Fn(usize) -> Real,
    FC: Fn(usize) -> Cplx,
{
    let mut acc = KahanComplex::new();
    let mut quad = KahanSum::new();
    let mut n = 1usize;
    loop {
        if n > cap {
            return Err(Error::TruncationInfeasible { needed: n, cap });
        }
        let a_n = arg(n);
        let kv = eval(a_n)?;
        let c = coeff(n);
        acc.add(c * kv.value);
        quad.add(c.norm() * kv.error);
        // envelope tail from the next term on, with geometric slack
        let next = arg(n + 1);
        if next >= 1.0 {
            let t1 = bound.eval(next) * coeff_env(n + 1);
            let t2 = bound.eval(arg(n + 2)) * coeff_env(n + 2);
            let ratio = if t1 > 0.0 { (t2 / t1).min(0.75) } else { 0.0 };
            let tail = t1 / (1.0 - ratio);
            if tail < tail_tol {
                return Ok(KernelSum {
                    value: acc.value(),
                    terms: n,
                    tail_estimate: tail,
                    quad_error: quad.value(),
                });
            }
        }
        n += 1;
    }
}

/// The modular relation at one x: sum a_n Z(lambda_n x) against
/// P(x) + omega (xQ)^-delta sum conj(b_n) Z_conj(mu_n / (Q^2 x)).
pub fn modular_report(fe: &FunctionalEquationData, x: Real, tol: Real) -> Result<IdentityReport> {
    fe.validate()?;
    if !(x > 0.0 && tol > 0.0) {
        return Err(Error::Config("modular relation needs x > 0, tol > 0".into()));
    }
    let sig = fe.sig.clone();
    let sig_c = fe.sig_conj();
    let quad_tol = (tol * 1e-4).max(1e-16);

    let a_line = crate::kernels::default_line(&sig, KernelKind::Z);
    let ev = crate::kernels::LadderedKernel::new(KernelKind::Z, &sig, a_line, quad_tol)?;
    let bound = calibrate_decay(&sig, KernelKind::Z)?;

    let a_line_c = crate::kernels::default_line(&sig_c, KernelKind::Z);
    let ev_c = crate::kernels::LadderedKernel::new(KernelKind::Z, &sig_c, a_line_c, quad_tol)?;
    let bound_c = calibrate_decay(&sig_c, KernelKind::Z)?;

    let cap = fe.series.cap();
    let q2 = fe.big_q * fe.big_q;
    let lhs_sum = kernel_sum(
        |y| ev.eval(y),
        &bound,
        |n| fe.series.a_side.coeff_envelope(n),
        |n| fe.series.lambda(n).unwrap_or(f64::INFINITY) * x,
        |n| fe.series.a(n).unwrap_or(Cplx::new(0.0, 0.0)),
        cap,
        tol / 4.0,
    )?;

    let pref = fe.omega * (x * fe.big_q).powf(-fe.delta);
    let rhs_sum = kernel_sum(
        |y| ev_c.eval(y),
        &bound_c,
        |n| fe.series.b_side.coeff_envelope(n),
        |n| fe.series.mu(n).unwrap_or(f64::INFINITY) / (q2 * x),
        |n| fe.series.b_bar(n).unwrap_or(Cplx::new(0.0, 0.0)),
        cap,
        tol / (4.0 * pref.norm()),
    )?;

    let (p_terms, _) = residual_p_terms(fe, default_a(fe))?;
    let p_x = p_terms.eval(x);

    let lhs = lhs_sum.value;
    let rhs = p_x + pref * rhs_sum.value;
    let trunc = lhs_sum.tail_estimate
        + pref.norm() * rhs_sum.tail_estimate
        + lhs_sum.quad_error
        + pref.norm() * rhs_sum.quad_error;
    Ok(IdentityReport::finish(
        IdentityTag::Modular,
        EvalPoint { x: Some(x), s: None, rho: None },
        lhs,
        rhs,
        lhs_sum.terms,
        rhs_sum.terms,
        trunc,
        tol,
    ))
}

/// The dashed Riesz sum: (1/Gamma(rho+1)) sum'_{lambda_n <= x} a_n (x - lambda_n)^rho,
/// with half weight on the boundary term when rho = 0 and x = lambda_n.
pub fn riesz_lhs_direct(fe: &FunctionalEquationData, x: Real, rho: Real) -> Result<Cplx> {
    if rho < 0.0 {
        return Err(Error::RhoBound { rho, bound: 0.0 });
    }
    let mut acc = KahanComplex::new();
    let mut n = 1usize;
    loop {
        let Some(lam) = fe.series.lambda(n) else {
            break;
        };
        if lam > x {
            break;
        }
        if n > fe.series.cap() {
            return Err(Error::TruncationInfeasible { needed: n, cap: fe.series.cap() });
        }
        let a_n = fe.series.a(n).unwrap();
        let w = (x - lam).powf(rho);
        if lam == x {
            // dash convention: the boundary term carries 1/2 when rho = 0
            // ((x - lam)^rho is 0 anyway for rho > 0)
            acc.add(a_n * (0.5 * w));
        } else {
            acc.add(a_n * w);
        }
        n += 1;
    }
    Ok(acc.value() / gamma_real(rho + 1.0))
}

/// Perron route for the same Riesz sum: vertical-line quadrature of
/// phi(s) Gamma(s) x^(s+rho) / Gamma(s+rho+1), with phi as the truncated
/// Dirichlet sum (terms beyond the cutoff contribute exactly zero to the
/// full-line integral; their finite-T cross terms enter the tail bound).
pub fn riesz_lhs_perron(
    fe: &FunctionalEquationData,
    x: Real,
    rho: Real,
    a: Real,
    tol: Real,
) -> Result<Cplx> {
    if rho < 1.0 {
        return Err(Error::SlowDecay { rho });
    }
    if a <= fe.sigma_a.max(0.0) {
        return Err(Error::Config(format!(
            "Perron line must satisfy a > max(0, sigma_a) = {}",
            fe.sigma_a.max(0.0)
        )));
    }
    if x <= 0.0 {
        return Err(Error::Config("x must be positive".into()));
    }

    // Terms up to lambda_n >= 8x carry the Riesz mass; everything beyond
    // only enters through the truncation tail.
    let cap = fe.series.cap();
    let mut n_used = 0usize;
    let mut terms: Vec<(Real, Cplx, Real)> = Vec::new(); // (ln(x/lambda), a_n, |omega_n|)
    for n in 1..=cap {
        let lam = fe.series.lambda(n).unwrap();
        let w = (x / lam).ln();
        if lam <= 8.0 * x || n <= 64 {
            terms.push((w, fe.series.a(n).unwrap(), w.abs()));
            n_used = n;
        } else {
            break;
        }
    }
    if fe.series.lambda(n_used).unwrap() < x {
        return Err(Error::TruncationInfeasible { needed: n_used + 1, cap });
    }

    // cross-tail of the dropped terms, summed over the available range
    let mut cross_coef = KahanSum::new();
    for n in (n_used + 1)..=cap {
        let lam = fe.series.lambda(n).unwrap();
        let w = (lam / x).ln().max(0.1);
        cross_coef.add(fe.series.a(n).unwrap().norm() * (x / lam).powf(a) / w);
    }

    // truncation height: per-term integration-by-parts tails
    let mut t_max: f64 = 256.0;
    let target = tol / 2.0;
    for _ in 0..40 {
        let mut e = cross_coef.value() * 2.0 / t_max.powf(rho + 1.0);
        for (w, c, wabs) in &terms {
            let amp = c.norm() * (a * w).exp(); // |a_n| (x/lambda_n)^a
            let osc = 2.0 / (wabs.max(1.0 / t_max) * t_max.powf(rho + 1.0));
            let no_osc = 2.0 / (rho * t_max.powf(rho));
            e += amp * osc.min(no_osc);
        }
        e *= x.powf(rho) / TWO_PI;
        if e < target {
            break;
        }
        t_max *= 1.6;
    }

    let freq = terms.iter().map(|t| t.2).fold(0.0f64, f64::max) + 1.0;
    let nodes_per_panel = 24usize;
    let total_nodes = (8.0 * freq / TWO_PI * t_max).ceil() as usize + nodes_per_panel;
    let budget = node_budget();
    if total_nodes > budget {
        return Err(Error::BudgetExceeded { needed: total_nodes, budget });
    }
    let panels = total_nodes.div_ceil(nodes_per_panel).max(3);
    let layout = PanelLayout::new(t_max, panels);
    let (xs, ws) = gauss_legendre(nodes_per_panel);

    let real_coeffs = terms.iter().all(|t| t.1.im == 0.0);
    let mut acc = KahanComplex::new();
    for p in 0..layout.panels() {
        let lo = layout.boundaries[p];
        let hi = layout.boundaries[p + 1];
        let c0 = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        for (xn, wq) in xs.iter().zip(&ws) {
            let t = c0 + h * xn;
            for s in [Cplx::new(a, t), Cplx::new(a, -t)] {
                let kern = (log_gamma(s)? - log_gamma(s + (rho + 1.0))?).exp();
                let mut dir = KahanComplex::new();
                for (w, c, _) in &terms {
                    dir.add(c * (s * *w).exp());
                }
                acc.add(kern * dir.value() * (wq * h / TWO_PI));
                if real_coeffs {
                    break;
                }
            }
        }
    }
    let total = if real_coeffs {
        let v = acc.value();
        Cplx::new(2.0 * v.re, 2.0 * v.im * 0.0)
    } else {
        acc.value()
    };
    Ok(total * x.powf(rho))
}

/// Constants of the oscillatory expansion of the I_rho integral for
/// one (signature, delta, rho) family.
#[derive(Debug, Clone, Copy)]
pub struct IRhoParams {
    pub nu: Real,
    pub omega_prime: Real,
    pub h: Real,
    pub mu: Cplx,
    pub gamma: Real,
    pub k: Cplx,
    pub a0: Cplx,
    pub dprime: Real,
    pub delta: Real,
    pub rho: Real,
}

impl IRhoParams {
    pub fn new(fe: &FunctionalEquationData, rho: Real) -> Self {
        let d = fe.dprime();
        let delta = fe.delta;
        let nu: f64 = fe.sig.betas().iter().map(|b| b.im).sum();
        let omega_prime = d * delta + (2.0 * d - 1.0) * rho;
        let sum_2a_ln_a: f64 =
            fe.sig.alphas().iter().map(|&al| 2.0 * al * al.ln()).sum();
        let h = (sum_2a_ln_a - 2.0 * d * (2.0 * d).ln()).exp();
        let mu = Cplx::new(0.5, 0.0)
            + fe.sig.betas().iter().map(|&b| b - 0.5).sum::<Cplx>();
        let gamma = -(delta / 2.0 + rho / (2.0 * d) + 1.0 / (4.0 * d));
        let mut k_log = Cplx::new(
            0.5 * (TWO_PI / 2.0 * 2.0).ln() * 0.0 + 0.5 * (TWO_PI).ln() * 0.0,
            0.0,
        );
        // k = sqrt(2 pi) (2 d)^(-2 d gamma + 2 i nu + 1/2) exp(-sum (a_i delta + 2 i c_i) ln a_i)
        k_log += Cplx::new(0.5 * (TWO_PI).ln(), 0.0);
        k_log += Cplx::new(-2.0 * d * gamma + 0.5, 2.0 * nu) * (2.0 * d).ln();
        for (&al, be) in fe.sig.alphas().iter().zip(fe.sig.betas()) {
            k_log -= Cplx::new(al * delta, 2.0 * be.im) * al.ln();
        }
        let k = k_log.exp();
        // A_0 = k/(2 pi d) * h^((0 + 2 i nu)/(2 d) - gamma)
        let a0 = k / (TWO_PI * d)
            * (Cplx::new(0.0, 2.0 * nu) / (2.0 * d) - gamma).exp_base(h);
        Self { nu, omega_prime, h, mu, gamma, k, a0, dprime: d, delta, rho }
    }

    /// Coefficient A_n given its v_n (v_0 = 1).
    pub fn a_n(&self, n: usize, v_n: Cplx) -> Cplx {
        v_n * self.k / (TWO_PI * self.dprime)
            * (Cplx::new(n as f64, 2.0 * self.nu) / (2.0 * self.dprime) - self.gamma)
                .exp_base(self.h)
    }

    /// Exponent of y in the n-th term of the expansion of the plain
    /// y^(-s) integral (the paper's x^(rho+delta) prefactor removed).
    pub fn exponent(&self, n: usize) -> Cplx {
        (Cplx::new(self.omega_prime - n as f64 - 0.5, -2.0 * self.nu)) / (2.0 * self.dprime)
            - (self.rho + self.delta)
    }

    /// Oscillation argument (h^-1 y)^(1/(2 d)) + pi (d gamma + n/2 + i nu - mu).
    pub fn phase(&self, n: usize, y: Real) -> Cplx {
        Cplx::new((y / self.h).powf(1.0 / (2.0 * self.dprime)), 0.0)
            + std::f64::consts::PI
                * (Cplx::new(self.dprime * self.gamma + n as f64 / 2.0, self.nu) - self.mu)
    }

    /// One expansion term at y.
    pub fn term(&self, n: usize, a_n: Cplx, y: Real) -> Cplx {
        a_n * (self.exponent(n) * y.ln()).exp() * self.phase(n, y).cos()
    }
}

trait ExpBase {
    fn exp_base(self, base: f64) -> Cplx;
}

impl ExpBase for Cplx {
    /// base^self for positive real base.
    fn exp_base(self, base: f64) -> Cplx {
        (self * base.ln()).exp()
    }
}

/// Reusable evaluator for I(y) = (1/2 pi i) int G_rho(s) y^-s ds on the line
/// Re s = a, computed on the pole-free line inside (max gamma pole, delta)
/// plus closed-form residue corrections for the Gamma(delta - s) poles
/// crossed on the way to a.
pub struct IRhoEvaluator {
    nodes: Vec<(Cplx, Cplx)>,
    nodes_half: Vec<(Cplx, Cplx)>,
    symmetric: bool,
    a_eval: Real,
    /// (delta + k, residue coefficient); adds coeff * y^-(delta+k)
    crossed: Vec<(Real, Cplx)>,
    tail_kappa: Real,
    tail_q: Real,
    /// endpoint data for the first integration-by-parts tail term:
    /// integrand value G(a ± i t_max) and d/dt arg G at each endpoint
    t_end: Real,
    g_end_up: Cplx,
    dphase_up: Real,
    g_end_lo: Cplx,
    dphase_lo: Real,
}

impl IRhoEvaluator {
    /// The pole-free evaluation line used internally: midway between the
    /// rightmost numerator-block pole and delta.
    pub fn eval_line(fe: &FunctionalEquationData) -> Real {
        let lower = fe
            .sig
            .alphas()
            .iter()
            .zip(fe.sig.betas())
            .map(|(&al, be)| -be.re / al)
            .fold(0.0f64, f64::max)
            .max(0.0);
        lower + 0.5 * (fe.delta - lower)
    }

    pub fn new(
        fe: &FunctionalEquationData,
        rho: Real,
        a: Real,
        y_min: Real,
        y_max: Real,
        tol: Real,
    ) -> Result<Self> {
        let d = fe.dprime();
        let delta = fe.delta;
        // the defining line integral must converge (conditionally):
        // |G_rho| ~ t^(-1-rho+(2a-delta)d') must decay
        let bound = (2.0 * a - delta) * d - 1.0;
        if rho <= bound {
            return Err(Error::DecayCondition { rho, bound });
        }
        let sig_c = fe.sig_conj();
        let a_eval = Self::eval_line(fe);
        let symmetric = fe.sig.is_real();

        let g_rho = |s: Cplx| -> Result<Cplx> {
            let mut lg = log_gamma(Cplx::new(delta, 0.0) - s)?;
            lg += sig_c.log_product(s)?;
            lg -= log_gamma(Cplx::new(delta + rho + 1.0, 0.0) - s)?;
            lg -= fe.sig.log_product(Cplx::new(delta, 0.0) - s)?;
            Ok(lg.exp())
        };

        // stationary point of the phase 2 d ln t + c0 - ln y
        let c0: f64 = fe.sig.alphas().iter().map(|&al| 2.0 * al * al.ln()).sum();
        let t_star = ((y_max.ln() - c0) / (2.0 * d)).exp();
        let q = 1.0 + rho - (2.0 * a_eval - delta) * d;
        let mut t_max = (2.5 * t_star).max(32.0);
        // empirical t^-q prefactor
        let mut kappa = 0.0f64;
        for &ts in &[0.6 * t_max, t_max, 1.7 * t_max] {
            kappa = kappa.max(g_rho(Cplx::new(a_eval, ts))?.norm() * ts.powf(q));
        }
        kappa *= 1.5;
        // With the endpoint term of the integration-by-parts tail removed
        // analytically, the remaining tail error carries an extra
        // (q + 2 d)/(t theta') factor.
        let theta_at = |t: f64, ln_y: f64| (2.0 * d * t.ln() + c0 - ln_y).max(0.3);
        for _ in 0..60 {
            let th_min = theta_at(t_max, y_max.ln());
            let th_lo = theta_at(t_max, y_min.ln());
            let worst = (y_min.powf(-a_eval) / (th_lo * th_lo)).max(
                y_max.powf(-a_eval) / (th_min * th_min),
            );
            let tail = kappa * t_max.powf(-q) * worst * (q + 2.0 * d) / t_max;
            if tail < tol {
                break;
            }
            t_max *= 1.5;
        }

        let dens_freq = (2.0 * d * t_max.max(3.0).ln() + c0).abs()
            + y_min.ln().abs().max(y_max.ln().abs())
            + 2.0;
        let nodes_per_panel = 24usize;
        let total_nodes = (8.0 * dens_freq / TWO_PI * t_max).ceil() as usize + nodes_per_panel;
        let budget = node_budget();
        if total_nodes > budget {
            return Err(Error::BudgetExceeded { needed: total_nodes, budget });
        }
        let panels = total_nodes.div_ceil(nodes_per_panel).max(3);
        let layout = PanelLayout::new(t_max, panels);
        let (xs, ws) = gauss_legendre(nodes_per_panel);
        let (xs_h, ws_h) = gauss_legendre(nodes_per_panel / 2);

        let mut nodes = Vec::new();
        let mut nodes_half = Vec::new();
        for p in 0..layout.panels() {
            let lo = layout.boundaries[p];
            let hi = layout.boundaries[p + 1];
            let cm = 0.5 * (lo + hi);
            let hw = 0.5 * (hi - lo);
            for (xn, wq) in xs.iter().zip(&ws) {
                let t = cm + hw * xn;
                let s = Cplx::new(a_eval, t);
                nodes.push((s, g_rho(s)? * (wq * hw / TWO_PI)));
                if !symmetric {
                    let s2 = Cplx::new(a_eval, -t);
                    nodes.push((s2, g_rho(s2)? * (wq * hw / TWO_PI)));
                }
            }
            for (xn, wq) in xs_h.iter().zip(&ws_h) {
                let t = cm + hw * xn;
                let s = Cplx::new(a_eval, t);
                nodes_half.push((s, g_rho(s)? * (wq * hw / TWO_PI)));
                if !symmetric {
                    let s2 = Cplx::new(a_eval, -t);
                    nodes_half.push((s2, g_rho(s2)? * (wq * hw / TWO_PI)));
                }
            }
        }

        // Gamma(delta - s) poles between the evaluation line and a: the
        // line-a value is the evaluated line plus those residues.
        let mut crossed = Vec::new();
        let mut k = 0usize;
        while delta + (k as f64) < a {
            if delta + (k as f64) > a_eval {
                let coeff = gamma_ladder_residue(fe, rho, k)?;
                if coeff.norm() > 0.0 {
                    crossed.push((delta + k as f64, coeff));
                }
            }
            k += 1;
        }

        // endpoint data: G at both endpoints plus the branch-safe phase
        // derivatives d/dt arg G(a ± i t) there
        let hstep = 1e-4 * t_max;
        let g_end_up = g_rho(Cplx::new(a_eval, t_max))?;
        let dphase_up = (g_rho(Cplx::new(a_eval, t_max + hstep))? / g_end_up).ln().im / hstep;
        let g_end_lo = g_rho(Cplx::new(a_eval, -t_max))?;
        let dphase_lo = (g_rho(Cplx::new(a_eval, -t_max - hstep))? / g_end_lo).ln().im / hstep;

        Ok(Self {
            nodes,
            nodes_half,
            symmetric,
            a_eval,
            crossed,
            tail_kappa: kappa,
            tail_q: q,
            t_end: t_max,
            g_end_up,
            dphase_up,
            g_end_lo,
            dphase_lo,
        })
    }

    pub fn t_max(&self) -> Real {
        self.t_end
    }

    pub fn eval(&self, y: Real) -> (Cplx, Real) {
        let ln_y = y.ln();
        let mut full = KahanComplex::new();
        for (s, w) in &self.nodes {
            full.add(w * (-s * ln_y).exp());
        }
        let mut half = KahanComplex::new();
        for (s, w) in &self.nodes_half {
            half.add(w * (-s * ln_y).exp());
        }
        // first integration-by-parts terms of the two truncated tails:
        // int_T^inf f(a+it) dt = -f(T)/(i theta'(T)) + O(f (q+2d)/(t theta'^2))
        // and the mirror of it below.
        let th_up = self.dphase_up - ln_y;
        let th_lo = self.dphase_lo + ln_y;
        let f_up = self.g_end_up * (-Cplx::new(self.a_eval, self.t_end) * ln_y).exp() / TWO_PI;
        let corr_ok = th_up.abs() > 0.2 && th_lo.abs() > 0.2;
        let mut tail_term = Cplx::new(0.0, 0.0);
        if corr_ok {
            tail_term = -f_up / (Cplx::i() * th_up);
            if !self.symmetric {
                // lower endpoint handled explicitly (d/dt over t decreasing)
                let f_lo =
                    self.g_end_lo * (-Cplx::new(self.a_eval, -self.t_end) * ln_y).exp() / TWO_PI;
                tail_term += -f_lo / (Cplx::i() * th_lo);
            }
        }
        let (mut v, vh) = if self.symmetric {
            (
                Cplx::new(2.0 * (full.value() + tail_term).re, 0.0),
                Cplx::new(2.0 * (half.value() + tail_term).re, 0.0),
            )
        } else {
            (full.value() + tail_term, half.value() + tail_term)
        };
        let quad_err = (v - vh).norm();
        for (p, c) in &self.crossed {
            v += c * (-p * ln_y).exp();
        }
        let theta_safe = th_up.abs().min(th_lo.abs()).max(0.3);
        let tail = self.tail_kappa
            * self.t_end.powf(-self.tail_q)
            * y.powf(-self.a_eval)
            * if corr_ok {
                (self.tail_q + 2.0) / (self.t_end * theta_safe * theta_safe)
            } else {
                1.0 / theta_safe
            };
        (v, quad_err.max(tail))
    }
}

/// Residue of G_rho(s) y^-s at s = delta + k, divided by y^-(delta+k):
/// -(-1)^k/k! prod Gamma(a_i (delta+k) + conj b_i)
///   / (Gamma(1 + rho - k) prod Gamma(b_i - a_i k)).
/// Zero whenever a reciprocal Gamma factor sits on a non-positive integer.
fn gamma_ladder_residue(fe: &FunctionalEquationData, rho: Real, k: usize) -> Result<Cplx> {
    let kf = k as f64;
    let delta = fe.delta;
    let sig_c = fe.sig_conj();
    let mut coeff =
        Cplx::new(-(if k % 2 == 0 { 1.0 } else { -1.0 }), 0.0) / gamma_real(kf + 1.0);
    for (&al, be) in sig_c.alphas().iter().zip(sig_c.betas()) {
        coeff *= log_gamma(al * (delta + kf) + be)?.exp();
    }
    let denom_args: Vec<Cplx> = fe
        .sig
        .betas()
        .iter()
        .zip(fe.sig.alphas())
        .map(|(&be, &al)| be - al * kf)
        .chain(std::iter::once(Cplx::new(1.0 + rho - kf, 0.0)))
        .collect();
    for w in denom_args {
        if w.im == 0.0 && w.re <= 0.5 && (w.re - w.re.round()).abs() < 1e-9 {
            return Ok(Cplx::new(0.0, 0.0)); // 1/Gamma vanishes there
        }
        coeff /= log_gamma(w)?.exp();
    }
    Ok(coeff)
}

/// Algebraic part of the large-y behavior of the line-a integral: the
/// Gamma(delta - s) poles right of the line enter with a minus sign,
/// I_a(y) = cos-expansion - sum res_k y^-(delta+k). These terms sit at the
/// same power scale as the leading cosine for small-degree signatures.
fn algebraic_far_terms(
    fe: &FunctionalEquationData,
    rho: Real,
    a: Real,
    k_max: usize,
) -> Result<Vec<(Real, Cplx)>> {
    let mut out = Vec::new();
    for k in 0..=k_max {
        let p = fe.delta + k as f64;
        if p > a {
            let coeff = gamma_ladder_residue(fe, rho, k)?;
            if coeff.norm() > 0.0 {
                out.push((p, -coeff));
            }
        }
    }
    Ok(out)
}

fn eval_algebraic(terms: &[(Real, Cplx)], y: Real) -> Cplx {
    let mut v = Cplx::new(0.0, 0.0);
    for (p, c) in terms {
        v += c * (-p * y.ln()).exp();
    }
    v
}

/// One-shot I_rho value at y on the line Re s = a.
pub fn i_rho_quadrature(
    fe: &FunctionalEquationData,
    rho: Real,
    a: Real,
    y: Real,
    tol: Real,
) -> Result<(Cplx, Real)> {
    let ev = IRhoEvaluator::new(fe, rho, a, y, y, tol)?;
    Ok(ev.eval(y))
}

/// The Riesz-sum identity at one x.
pub fn riesz_report(
    fe: &FunctionalEquationData,
    x: Real,
    rho: Real,
    a: Option<Real>,
    tol: Real,
) -> Result<IdentityReport> {
    fe.validate()?;
    let admissible = (2.0 * fe.sigma_b - fe.delta) * fe.dprime() - 0.5;
    if rho < admissible + 0.25 - 1e-12 {
        return Err(Error::RhoBound { rho, bound: admissible + 0.25 });
    }
    let a = match a {
        Some(v) => v,
        None => riesz_a(fe, rho)?,
    };
    let lhs = riesz_lhs_direct(fe, x, rho)?;
    let terms_lhs = (1..=fe.series.cap())
        .take_while(|&n| fe.series.lambda(n).map(|l| l <= x).unwrap_or(false))
        .count();

    let q: QRhoResult = residual_q_rho(fe, x, rho, a)?;

    let params = IRhoParams::new(fe, rho);
    let p_env = params.exponent(0).re;
    let pref = fe.omega * x.powf(fe.delta + rho) / fe.big_q.powf(fe.delta);
    let q2 = fe.big_q * fe.big_q;
    let q2f = x / q2;
    let y_of = |n: usize| fe.series.mu(n).unwrap_or(f64::INFINITY) * x / q2;
    let theta = fe.series.b_side.bound_p;
    // Conjugate-side tail: the absolute envelope sums C m^(theta + p_env);
    // when that integral diverges or converges too slowly, the Dirichlet
    // bound on the oscillating sum (one envelope term per phase cycle)
    // takes over; the series converges conditionally once rho clears its
    // admissibility bound.
    let decay = theta + p_env;
    let d2 = 2.0 * params.dprime;
    let env_term = |n: usize| {
        pref.norm()
            * fe.series.b_side.coeff_envelope(n)
            * params.a0.norm()
            * y_of(n).powf(p_env)
    };
    let phase_step =
        |n: usize| (q2f / params.h).powf(1.0 / d2) * (n as f64).powf(1.0 / d2 - 1.0) / d2;
    let tail_at = |n: usize| {
        let damped = env_term(n + 1) * (std::f64::consts::PI / phase_step(n + 1) + 1.0);
        if decay < -1.05 {
            let abs_sum = env_term(n + 1) * (n as f64) / (-decay - 1.0);
            damped.min(abs_sum)
        } else {
            damped
        }
    };
    let mut n_terms = 4usize;
    let hard_cap = 2000.min(fe.series.cap());
    while tail_at(n_terms) > tol / 4.0 && n_terms < hard_cap {
        n_terms = ((n_terms * 5 / 4).max(n_terms + 1)).min(hard_cap);
    }
    let trunc_series = tail_at(n_terms);

    // Near terms by line quadrature; far terms by the fitted m = 2
    // asymptotic expansion, whose remainder decays three powers of y below
    // the leading term. The split keeps the contour short of the stationary
    // point (y/h)^(1/(2d')) of the farthest quadrature argument, but never
    // enters the region where the expansion itself is invalid: by the
    // Bessel analogy the oscillation argument must clear ~4 (delta+rho)^2
    // before the leading term is trustworthy.
    let nu_eff = fe.delta + rho;
    let validity = params.h * (4.0 * nu_eff * nu_eff).powf(2.0 * params.dprime);
    let y_split = 900.0f64.max(y_of(1) * 1.2).max(validity);
    let n_quad = (1..=n_terms).take_while(|&n| y_of(n) <= y_split).count().clamp(1, n_terms);

    // Per-eval error budget: the dominant per-term quadrature errors carry
    // the endpoint phase e^{-i T ln y_n}, which decorrelates across n, so
    // they add incoherently (root-sum-square with the y^-a_eval envelope).
    let a_eval = IRhoEvaluator::eval_line(fe);
    let mut incoherent = KahanSum::new();
    for n in 1..=n_quad {
        let w =
            fe.series.b(n).map(|c| c.norm()).unwrap_or(0.0) * (y_of(1) / y_of(n)).powf(a_eval);
        incoherent.add(w * w);
    }
    let tol_eval = tol / (8.0 * pref.norm() * incoherent.value().sqrt().max(1.0));
    let ev = IRhoEvaluator::new(fe, rho, a, y_of(1), y_of(n_quad), tol_eval)?;

    let mut acc = KahanComplex::new();
    let mut quad = KahanSum::new();
    for n in 1..=n_quad {
        let (v, e) = ev.eval(y_of(n));
        let b = fe.series.b_bar(n).unwrap();
        acc.add(b * v);
        quad.add(b.norm() * e);
    }
    let algebraic = algebraic_far_terms(fe, rho, a, 4)?;
    if n_quad < n_terms {
        let higher = fit_higher_coefficients(fe, rho, a, &params, &algebraic, 2)?;
        let c3 = params.a0.norm().max(higher[0].norm()).max(higher[1].norm()) * 3.0;
        let rem_exp = params.exponent(3).re;
        for n in (n_quad + 1)..=n_terms {
            let y = y_of(n);
            let v = params.term(0, params.a0, y)
                + params.term(1, higher[0], y)
                + params.term(2, higher[1], y)
                + eval_algebraic(&algebraic, y);
            let b = fe.series.b_bar(n).unwrap();
            acc.add(b * v);
            quad.add(b.norm() * c3 * y.powf(rem_exp));
        }
    }

    // Tail beyond the explicit terms. The algebraic component does not
    // oscillate, so it is summed to infinity in closed form through the
    // declared continuation: sum_{n>N} conj(b_n) mu_n^-p = conj(phi(p)) - partial.
    let mut trunc_tail = 0.0;
    let mut tail_alg = Cplx::new(0.0, 0.0);
    for (p, c) in &algebraic {
        let can_close = !matches!(fe.phi, crate::series::PhiExpr::DeclaredOnly)
            && fe.series.b_side.ladder == crate::series::Ladder::Integers
            && *p > fe.sigma_b + 0.05;
        if can_close {
            let full = fe.phi_value(Cplx::new(*p, 0.0))?.conj();
            let mut partial = KahanComplex::new();
            for n in 1..=n_terms {
                partial.add(fe.series.b_bar(n).unwrap() * (n as f64).powf(-p));
            }
            tail_alg += c * q2f.powf(-p) * (full - partial.value());
        } else {
            // envelope estimate only
            let dec = fe.series.b_side.bound_p - p;
            if dec < -1.0 {
                trunc_tail += c.norm()
                    * q2f.powf(-p)
                    * fe.series.b_side.coeff_envelope(1)
                    * (n_terms as f64).powf(dec + 1.0)
                    / (-dec - 1.0);
            } else {
                return Err(Error::TruncationInfeasible { needed: usize::MAX, cap: n_terms });
            }
        }
    }
    acc.add(tail_alg);

    let rhs = q.value + pref * acc.value();
    let trunc = pref.norm() * (quad.value() + trunc_tail) + trunc_series;
    Ok(IdentityReport::finish(
        IdentityTag::Riesz,
        EvalPoint { x: Some(x), s: None, rho: Some(rho) },
        lhs,
        rhs,
        terms_lhs,
        n_terms,
        trunc,
        tol,
    ))
}

/// The auxiliary modular relation at one x: sum a_n Y(lambda_n x) against
/// P1(x) + omega (xQ)^-delta sum conj(b_n) X(mu_n/(Q^2 x)), with X on the
/// same line Re s = a as the identity (right of ceil(a - delta) poles of
/// Gamma(delta - s); that exclusion is what makes the X-side sum converge).
pub fn aux_modular_report(
    fe: &FunctionalEquationData,
    x: Real,
    a: Option<Real>,
    tol: Real,
) -> Result<IdentityReport> {
    fe.validate()?;
    let a = a.unwrap_or_else(|| default_aux_a(fe));
    if a <= fe.sigma_a.max(fe.sigma_b).max(0.0) {
        return Err(Error::Config(format!("aux relation needs a > max(0, sigma_a, sigma_b), got {a}")));
    }
    let quad_tol = (tol * 1e-4).max(1e-16);
    let sig = fe.sig.clone();
    let sig_c = fe.sig_conj();

    let a_y = crate::kernels::default_line(&sig, KernelKind::Y);
    let ev_y = crate::kernels::LadderedKernel::new(KernelKind::Y, &sig, a_y, quad_tol)?;
    let bound_y = calibrate_decay(&sig, KernelKind::Y)?;

    let kind_x = KernelKind::X { delta: fe.delta };
    let spec_x = choose_truncation(&sig_c, kind_x, a, quad_tol)?;
    let ev_x = KernelEvaluator::new(kind_x, &sig_c, &spec_x)?;

    let cap = fe.series.cap();
    let q2 = fe.big_q * fe.big_q;
    let lhs_sum = kernel_sum(
        |y| ev_y.eval(y),
        &bound_y,
        |n| fe.series.a_side.coeff_envelope(n),
        |n| fe.series.lambda(n).unwrap_or(f64::INFINITY) * x,
        |n| fe.series.a(n).unwrap_or(Cplx::new(0.0, 0.0)),
        cap,
        tol / 4.0,
    )?;

    // X-side truncation: first excluded Gamma(delta - s) residue envelope
    let k_excl = if a > fe.delta { (a - fe.delta).ceil().max(0.0) } else { 0.0 };
    let mut env_coeff = 1.0 / gamma_real(k_excl + 1.0);
    for (&al, be) in sig_c.alphas().iter().zip(sig_c.betas()) {
        env_coeff *= log_gamma(al * (fe.delta + k_excl) + be)?.exp().norm();
    }
    let x_exp = fe.delta + k_excl;
    let pref = fe.omega * (x * fe.big_q).powf(-fe.delta);
    let theta = fe.series.b_side.bound_p;
    if theta - x_exp >= -1.0 {
        return Err(Error::TruncationInfeasible { needed: usize::MAX, cap });
    }
    let env_bc = fe.series.b_side.coeff_envelope(1);
    let y_of = |n: usize| fe.series.mu(n).unwrap_or(f64::INFINITY) / (q2 * x);
    let tail_at = |n: usize| {
        2.0 * pref.norm() * env_bc * env_coeff * y_of(1).powf(-x_exp)
            * (n as f64).powf(theta - x_exp + 1.0)
            / (x_exp - theta - 1.0)
    };
    let mut n_terms = 4usize;
    while tail_at(n_terms) > tol / 4.0 && n_terms < cap {
        n_terms = (n_terms * 5 / 4).max(n_terms + 1);
    }
    let trunc_x = tail_at(n_terms);

    let mut acc = KahanComplex::new();
    let mut quad = KahanSum::new();
    for n in 1..=n_terms {
        let kv = ev_x.eval(y_of(n));
        let b = fe.series.b_bar(n).unwrap();
        acc.add(b * kv.value);
        quad.add(b.norm() * kv.error);
    }

    let (p1_terms, _) = residual_p1_terms(fe, a)?;
    let p1 = p1_terms.eval(x);
    let lhs = lhs_sum.value;
    let rhs = p1 + pref * acc.value();
    let trunc = lhs_sum.tail_estimate
        + lhs_sum.quad_error
        + trunc_x
        + pref.norm() * quad.value();
    Ok(IdentityReport::finish(
        IdentityTag::AuxModular,
        EvalPoint { x: Some(x), s: None, rho: None },
        lhs,
        rhs,
        lhs_sum.terms,
        n_terms,
        trunc,
        tol,
    ))
}

/// Numerical value of Q^s F(s) rebuilt from coefficient data, kernels and
/// the residual function only: Q^s [ int_0^split P + int_split^inf (Psi x^-s-1 + Phi x^s-1) ],
/// the P piece integrated term-by-term analytically (its meromorphic
/// continuation in s).
pub fn reconstruct_completed_function(
    fe: &FunctionalEquationData,
    s: Cplx,
    split: Real,
) -> Result<Cplx> {
    fe.validate()?;
    if !(split > 0.0) {
        return Err(Error::Config("split must be positive".into()));
    }
    let (p_terms, _) = residual_p_terms(fe, default_a(fe))?;
    // analytic piece: int_0^S x^(w-1) log^m x dx with w = s + exponent
    let mut analytic = KahanComplex::new();
    let ln_s = split.ln();
    for t in &p_terms.terms {
        let w = s + t.exponent;
        if w.norm() < 1e-6 {
            return Err(Error::ConvergenceStrip { sigma: s.re });
        }
        let m = t.logpower;
        let mut piece = Cplx::new(0.0, 0.0);
        for i in 0..=m {
            let binom = gamma_real(m as f64 + 1.0)
                / (gamma_real(i as f64 + 1.0) * gamma_real((m - i) as f64 + 1.0));
            let sign = if (m - i) % 2 == 0 { 1.0 } else { -1.0 };
            piece += binom
                * ln_s.powi(i as i32)
                * sign
                * gamma_real((m - i) as f64 + 1.0)
                / w.powu((m - i) as u32 + 1);
        }
        analytic.add(t.coefficient * (w * ln_s).exp() * piece);
    }

    // kernel sums Phi and Psi on [split, X_up]
    let quad_tol = 1e-15;
    let sig = fe.sig.clone();
    let sig_c = fe.sig_conj();
    let a_line = crate::kernels::default_line(&sig, KernelKind::Z);
    let ev = crate::kernels::LadderedKernel::new(KernelKind::Z, &sig, a_line, quad_tol)?;
    let bound = calibrate_decay(&sig, KernelKind::Z)?;
    let a_line_c = crate::kernels::default_line(&sig_c, KernelKind::Z);
    let ev_c = crate::kernels::LadderedKernel::new(KernelKind::Z, &sig_c, a_line_c, quad_tol)?;
    let bound_c = calibrate_decay(&sig_c, KernelKind::Z)?;

    let q2 = fe.big_q * fe.big_q;
    let cap = fe.series.cap();
    let phi_at = |x: Real| -> Result<Cplx> {
        Ok(kernel_sum(
            |y| ev.eval(y),
            &bound,
            |n| fe.series.a_side.coeff_envelope(n),
            |n| fe.series.lambda(n).unwrap_or(f64::INFINITY) * x,
            |n| fe.series.a(n).unwrap_or(Cplx::new(0.0, 0.0)),
            cap,
            1e-13,
        )?
        .value)
    };
    let psi_at = |x: Real| -> Result<Cplx> {
        let sum = kernel_sum(
            |y| ev_c.eval(y),
            &bound_c,
            |n| fe.series.b_side.coeff_envelope(n),
            |n| fe.series.mu(n).unwrap_or(f64::INFINITY) * x / q2,
            |n| fe.series.b_bar(n).unwrap_or(Cplx::new(0.0, 0.0)),
            cap,
            1e-13,
        )?
        .value;
        Ok(fe.omega * x.powf(fe.delta) / fe.big_q.powf(fe.delta) * sum)
    };

    // upper endpoint: kernels decay like exp(-c x^(1/d'))
    let lam1 = fe.series.lambda(1).unwrap();
    let mut x_up = split.max(2.0);
    for _ in 0..200 {
        let head = bound.eval((lam1 * x_up).max(1.0)) * x_up.powf(s.re.abs() + fe.delta + 1.0);
        if head < 1e-14 {
            break;
        }
        x_up *= 1.2;
    }

    let panels = ((x_up - split) * (2.0 + s.im.abs())).ceil() as usize + 8;
    let layout = PanelLayout::new(x_up - split, panels.min(4000));
    let (xs, ws) = gauss_legendre(16);
    let mut tail = KahanComplex::new();
    for p in 0..layout.panels() {
        let lo = split + layout.boundaries[p];
        let hi = split + layout.boundaries[p + 1];
        let cm = 0.5 * (lo + hi);
        let hw = 0.5 * (hi - lo);
        for (xn, wq) in xs.iter().zip(&ws) {
            let x = cm + hw * xn;
            let lx = x.ln();
            let v = psi_at(x)? * ((-s - 1.0) * lx).exp() + phi_at(x)? * ((s - 1.0) * lx).exp();
            tail.add(v * (wq * hw));
        }
    }

    Ok((s * fe.big_q.ln()).exp() * (analytic.value() + tail.value()))
}

/// Functional-equation residual via two reconstructions:
/// |Q^s F(s) - omega conj(Q^(delta - conj s) G(delta - conj s))|.
pub fn fe_report(fe: &FunctionalEquationData, s: Cplx, tol: Real) -> Result<IdentityReport> {
    let lhs = reconstruct_completed_function(fe, s, 1.0)?;
    let dual = fe.dual();
    let rhs = fe.omega * reconstruct_completed_function(&dual, fe.delta - s.conj(), 1.0)?.conj();
    Ok(IdentityReport::finish(
        IdentityTag::FunctionalEq,
        EvalPoint { x: None, s: Some(s), rho: None },
        lhs,
        rhs,
        0,
        0,
        tol / 2.0,
        tol,
    ))
}

/// One term of the I_rho asymptotic expansion.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AsymptoticTerm {
    pub n: usize,
    pub coeff: Cplx,
    pub exponent: Cplx,
    pub value: Cplx,
}

/// Oscillatory expansion of the y^(-s) integral at large y. A_0 comes from
/// the closed constants; A_1, A_2 are calibrated per descriptor by least
/// squares of (quadrature - leading term) against the known powers.
pub fn i_rho_asymptotic(
    fe: &FunctionalEquationData,
    rho: Real,
    y: Real,
    m: usize,
) -> Result<(Cplx, Vec<AsymptoticTerm>)> {
    const THRESHOLD: f64 = 30.0;
    const M_MAX: usize = 2;
    if y < THRESHOLD {
        return Err(Error::AsymptoticThreshold { t: y, threshold: THRESHOLD });
    }
    if m > M_MAX {
        return Err(Error::FitUnavailable { n: m, m_max: M_MAX });
    }
    let params = IRhoParams::new(fe, rho);
    let mut coeffs = vec![params.a0];
    if m >= 1 {
        let a = riesz_a(fe, rho)?;
        let algebraic = algebraic_far_terms(fe, rho, a, 4)?;
        coeffs.extend(fit_higher_coefficients(fe, rho, a, &params, &algebraic, m)?);
    }
    let mut table = Vec::new();
    let mut total = Cplx::new(0.0, 0.0);
    for (n, &a_n) in coeffs.iter().enumerate().take(m + 1) {
        let value = params.term(n, a_n, y);
        total += value;
        table.push(AsymptoticTerm { n, coeff: a_n, exponent: params.exponent(n), value });
    }
    Ok((total, table))
}

fn fit_higher_coefficients(
    fe: &FunctionalEquationData,
    rho: Real,
    a: Real,
    params: &IRhoParams,
    algebraic: &[(Real, Cplx)],
    m: usize,
) -> Result<Vec<Cplx>> {
    let y_lo = 60.0;
    let y_hi = 900.0;
    let n_pts = 24;
    let ev = IRhoEvaluator::new(fe, rho, a, y_lo, y_hi, 1e-11)?;
    // residual after the leading cosine and the closed-form algebraic part,
    // fitted against the cosine basis n = 1..=m
    let mut ys = Vec::with_capacity(n_pts);
    for i in 0..n_pts {
        let f = i as f64 / (n_pts - 1) as f64;
        ys.push(y_lo * (y_hi / y_lo).powf(f));
    }
    let mut rvec = Vec::with_capacity(n_pts);
    let mut basis = vec![vec![Cplx::new(0.0, 0.0); m]; n_pts];
    for (i, &y) in ys.iter().enumerate() {
        let (q, _) = ev.eval(y);
        rvec.push(q - params.term(0, params.a0, y) - eval_algebraic(algebraic, y));
        for n in 1..=m {
            basis[i][n - 1] = params.term(n, Cplx::new(1.0, 0.0), y);
        }
    }
    // complex least squares through the normal equations (m <= 2)
    let mut ata = vec![vec![Cplx::new(0.0, 0.0); m]; m];
    let mut atb = vec![Cplx::new(0.0, 0.0); m];
    for i in 0..n_pts {
        for r in 0..m {
            atb[r] += basis[i][r].conj() * rvec[i];
            for c in 0..m {
                ata[r][c] += basis[i][r].conj() * basis[i][c];
            }
        }
    }
    // A vanishing basis (large delta makes the cosine terms microscopic)
    // means the corrections are numerically irrelevant: fit zeros.
    let scale: f64 = (0..m).map(|r| ata[r][r].norm()).product();
    let out = match m {
        1 => {
            if scale < 1e-60 {
                vec![Cplx::new(0.0, 0.0)]
            } else {
                vec![atb[0] / ata[0][0]]
            }
        }
        2 => {
            let det = ata[0][0] * ata[1][1] - ata[0][1] * ata[1][0];
            if scale < 1e-60 || det.norm() < 1e-12 * scale {
                vec![Cplx::new(0.0, 0.0); 2]
            } else {
                vec![
                    (atb[0] * ata[1][1] - atb[1] * ata[0][1]) / det,
                    (ata[0][0] * atb[1] - ata[1][0] * atb[0]) / det,
                ]
            }
        }
        _ => return Err(Error::FitUnavailable { n: m, m_max: 2 }),
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{preset_with_cap, PresetId};

    #[test]
    fn riesz_direct_dash_convention() {
        // divisor preset, rho = 0, x = 4: d(1)+d(2)+d(3)+d(4)/2 = 6.5
        let p = preset_with_cap(PresetId::Divisor, 64).unwrap();
        let v = riesz_lhs_direct(&p.fe, 4.0, 0.0).unwrap();
        assert_eq!(v.re, 6.5);
        // rho = 1, x = 4.5: 3.5 + 2*2.5 + 2*1.5 + 3*0.5 = 13
        let v = riesz_lhs_direct(&p.fe, 4.5, 1.0).unwrap();
        assert!((v.re - 13.0).abs() < 1e-12);
    }

    #[test]
    fn riesz_direct_quadratic_weight() {
        // ones coefficients, rho = 2, x = 2.2: ((1.2)^2 + (0.2)^2)/2
        let p = preset_with_cap(PresetId::ThetaZeta, 64).unwrap();
        let v = riesz_lhs_direct(&p.fe, 2.2, 2.0).unwrap();
        assert!((v.re - 0.5 * (1.44 + 0.04)).abs() < 1e-12);
    }

    #[test]
    fn default_lines_clear_of_poles() {
        let p = preset_with_cap(PresetId::SigmaZ { z: -0.7 }, 64).unwrap();
        let a = default_a(&p.fe);
        // edge delta - a must not sit on the Gamma(s) ladder
        let edge = p.fe.delta - a;
        assert!((edge - edge.round()).abs() > 0.01, "edge {edge} sits on the ladder");
    }

    #[test]
    fn irho_params_single_gamma_case() {
        // r = 1, alpha = 1, beta = 0, delta = 1 (the r2 preset): the
        // expansion must match the J_{delta+rho} asymptotics: h = 1/4,
        // A0 = 1/sqrt(pi), phase offset -(delta+rho) pi/2 - pi/4.
        let p = preset_with_cap(PresetId::RTwo, 64).unwrap();
        let rho = 1.0;
        let params = IRhoParams::new(&p.fe, rho);
        assert!((params.h - 0.25).abs() < 1e-14);
        assert!((params.a0.re - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!(params.a0.im.abs() < 1e-14);
        // exponent of the n = 0 term: -(delta+rho)/2 - 1/4
        assert!((params.exponent(0).re - (-(1.0 + rho) / 2.0 - 0.25)).abs() < 1e-12);
        let w = params.phase(0, 123.0);
        let expect = 2.0 * 123.0f64.sqrt()
            - (1.0 + rho) * std::f64::consts::FRAC_PI_2
            - std::f64::consts::FRAC_PI_4;
        assert!((w.re - expect).abs() < 1e-9);
        assert!(w.im.abs() < 1e-14);
    }

    #[test]
    fn rho_bound_is_enforced() {
        let p = preset_with_cap(PresetId::Divisor, 64).unwrap();
        // admissibility bound for divisor: (2*1.05 - 1)*1 - 0.5 = 0.6; margin 1/4
        assert!(matches!(
            riesz_report(&p.fe, 5.0, 0.5, None, 1e-6),
            Err(Error::RhoBound { .. })
        ));
    }
}
