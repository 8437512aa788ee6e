//! Pole enumeration, small-circle residue quadrature, and the residual
//! functions P, Q_rho, P1 as finite sums of x^a (log x)^m terms.
//!
//! The curve C is realized as a union of small circles around the enumerated
//! poles of the relevant integrand; a trapezoid sum on each circle converges
//! geometrically and is doubled until stable.

use crate::error::{Error, Result};
use crate::fe::FunctionalEquationData;
use crate::gamma::{log_gamma, POLE_GUARD};
use crate::numeric::{Cplx, KahanComplex, Real};
use serde::{Deserialize, Serialize};

/// Where a pole of the integrand comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PoleSource {
    /// Gamma(alpha_i s + beta_i), k-th ladder step
    GammaFactor { i: usize, k: usize },
    /// declared pole of phi
    SeriesDeclared,
    /// the extra Gamma(s) factor of Q_rho / P1 integrands, at s = -k
    ExtraGamma { k: usize },
}

/// A pole of the integrand with merged order and provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleSpec {
    pub location: Cplx,
    pub order: usize,
    pub sources: Vec<PoleSource>,
}

/// Which residual function's integrand to enumerate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResidualKind {
    P,
    QRho { rho: Real },
    P1,
}

impl ResidualKind {
    fn has_gamma_block(self) -> bool {
        matches!(self, ResidualKind::P | ResidualKind::P1)
    }

    fn has_extra_gamma(self) -> bool {
        matches!(self, ResidualKind::QRho { .. } | ResidualKind::P1)
    }
}

#[derive(Debug, Clone)]
struct Candidate {
    location: Cplx,
    order: i64,
    sources: Vec<PoleSource>,
}

fn push_candidate(cands: &mut Vec<Candidate>, loc: Cplx, source: PoleSource) {
    for c in cands.iter_mut() {
        if (c.location - loc).norm() < 1e-9 {
            c.order += 1;
            c.sources.push(source);
            return;
        }
    }
    cands.push(Candidate { location: loc, order: 1, sources: vec![source] });
}

fn collect_candidates(
    fe: &FunctionalEquationData,
    lo: Real,
    hi: Real,
    kind: ResidualKind,
) -> Vec<Candidate> {
    let mut cands: Vec<Candidate> = Vec::new();
    if kind.has_gamma_block() {
        for i in 0..fe.sig.r() {
            for k in 0.. {
                let loc = fe.sig.factor_pole(i, k);
                if loc.re < lo {
                    break;
                }
                if loc.re <= hi {
                    push_candidate(&mut cands, loc, PoleSource::GammaFactor { i, k });
                }
            }
        }
    }
    if kind.has_extra_gamma() {
        for k in 0.. {
            let loc = Cplx::new(-(k as f64), 0.0);
            if loc.re < lo {
                break;
            }
            if loc.re <= hi {
                push_candidate(&mut cands, loc, PoleSource::ExtraGamma { k });
            }
        }
    }
    for p in &fe.declared_poles {
        if p.location.re >= lo && p.location.re <= hi {
            for _ in 0..p.order {
                push_candidate(&mut cands, p.location, PoleSource::SeriesDeclared);
            }
        }
    }
    cands
}

/// All poles of the kind's integrand with real part in the open strip,
/// after the catalog cancellation rules (declared zeros of phi; for Q_rho
/// additionally the zeros of 1/Gamma(s + rho + 1)).
pub fn enumerate_poles(
    fe: &FunctionalEquationData,
    strip: (Real, Real),
    kind: ResidualKind,
) -> Result<Vec<PoleSpec>> {
    let (lo, hi) = strip;
    if !(lo < hi) {
        return Err(Error::InvalidData(format!("empty strip ({lo}, {hi})")));
    }
    // widen slightly so boundary-sitting poles are seen and guarded
    let cands = collect_candidates(fe, lo - 1.0, hi + 1.0, kind);
    let mut out = Vec::new();
    for c in cands {
        let mut order = c.order;
        if c.location.im.abs() < 1e-9 {
            // declared zeros of phi cancel gamma poles at the same spot
            order -= fe.zero_order_at(c.location.re) as i64;
            if let ResidualKind::QRho { rho } = kind {
                // 1/Gamma(s + rho + 1) vanishes at s = -rho - 1 - m
                let u = c.location.re + rho + 1.0;
                if u < 1e-9 && (u - u.round()).abs() < 1e-9 {
                    order -= 1;
                }
            }
        }
        if order <= 0 {
            continue;
        }
        if (c.location.re - lo).abs() < POLE_GUARD || (c.location.re - hi).abs() < POLE_GUARD {
            return Err(Error::PoleOnBoundary {
                edge: if (c.location.re - lo).abs() < (c.location.re - hi).abs() { lo } else { hi },
                pole: c.location,
            });
        }
        if c.location.re > lo && c.location.re < hi {
            out.push(PoleSpec { location: c.location, order: order as usize, sources: c.sources });
        }
    }
    out.sort_by(|a, b| {
        b.location
            .re
            .partial_cmp(&a.location.re)
            .unwrap()
            .then(a.location.im.partial_cmp(&b.location.im).unwrap())
    });
    Ok(out)
}

/// (1/2 pi i) times the circle integral of `f` around `location`, by N-point
/// trapezoid quadrature doubled until two successive values agree to tol.
pub fn residue_numeric<F>(f: F, location: Cplx, radius: Real, tol: Real) -> Result<Cplx>
where
    F: Fn(Cplx) -> Result<Cplx>,
{
    laurent_coefficient(&f, location, 0, radius, tol)
}

/// a_{-1-j} of the Laurent expansion at `location`:
/// (1/2 pi i) circle integral of f(s) (s - location)^j.
pub fn laurent_coefficient<F>(
    f: &F,
    location: Cplx,
    j: usize,
    radius: Real,
    tol: Real,
) -> Result<Cplx>
where
    F: Fn(Cplx) -> Result<Cplx>,
{
    let mut n = 32usize;
    let mut prev: Option<Cplx> = None;
    let mut doublings = 0usize;
    loop {
        let mut acc = KahanComplex::new();
        for idx in 0..n {
            let theta = std::f64::consts::TAU * idx as f64 / n as f64;
            let dir = Cplx::new(theta.cos(), theta.sin());
            let s = location + radius * dir;
            let mut v = f(s)? * dir;
            if j > 0 {
                v *= (radius * dir).powu(j as u32);
            }
            acc.add(v);
        }
        let val = acc.value() * radius / n as f64;
        if let Some(p) = prev {
            if (val - p).norm() <= tol * val.norm().max(1.0) {
                return Ok(val);
            }
        }
        prev = Some(val);
        n *= 2;
        doublings += 1;
        if doublings > 8 {
            return Err(Error::NonConvergence { pole: location, doublings });
        }
    }
}

/// Finite sum of coeff * x^exponent * (log x)^logpower terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualTermSum {
    pub terms: Vec<ResidualTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualTerm {
    pub exponent: Cplx,
    pub logpower: usize,
    pub coefficient: Cplx,
}

impl ResidualTermSum {
    pub fn empty() -> Self {
        Self { terms: vec![] }
    }

    fn sort(&mut self) {
        self.terms.sort_by(|a, b| {
            b.exponent
                .re
                .partial_cmp(&a.exponent.re)
                .unwrap()
                .then(a.exponent.im.partial_cmp(&b.exponent.im).unwrap())
                .then(b.logpower.cmp(&a.logpower))
        });
    }

    pub fn eval(&self, x: Real) -> Cplx {
        debug_assert!(x > 0.0);
        let lx = x.ln();
        let mut acc = KahanComplex::new();
        for t in &self.terms {
            acc.add(t.coefficient * (t.exponent * lx).exp() * lx.powi(t.logpower as i32));
        }
        acc.value()
    }

    /// Term-by-term derivative in x:
    /// d/dx [c x^e log^m x] = c e x^(e-1) log^m x + c m x^(e-1) log^(m-1) x.
    pub fn derivative(&self) -> Self {
        let mut out: Vec<ResidualTerm> = Vec::new();
        let mut add = |e: Cplx, m: usize, c: Cplx| {
            if c.norm() == 0.0 {
                return;
            }
            for t in out.iter_mut() {
                if (t.exponent - e).norm() < 1e-12 && t.logpower == m {
                    t.coefficient += c;
                    return;
                }
            }
            out.push(ResidualTerm { exponent: e, logpower: m, coefficient: c });
        };
        let one = Cplx::new(1.0, 0.0);
        for t in &self.terms {
            add(t.exponent - one, t.logpower, t.coefficient * t.exponent);
            if t.logpower > 0 {
                add(t.exponent - one, t.logpower - 1, t.coefficient * t.logpower as f64);
            }
        }
        let mut sum = Self { terms: out };
        sum.sort();
        sum
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product::<f64>().max(1.0)
}

/// The residual-function integrand without the x power.
fn integrand_sans_x(
    fe: &FunctionalEquationData,
    kind: ResidualKind,
) -> impl Fn(Cplx) -> Result<Cplx> + '_ {
    move |s: Cplx| -> Result<Cplx> {
        let phi = fe.phi_value(s)?;
        let log = match kind {
            ResidualKind::P => fe.sig.log_product(s)?,
            ResidualKind::QRho { rho } => {
                log_gamma(s)? - log_gamma(s + Cplx::new(rho + 1.0, 0.0))?
            }
            ResidualKind::P1 => log_gamma(s)? + fe.sig.log_product(s)?,
        };
        Ok(phi * log.exp())
    }
}

fn circle_radius(fe: &FunctionalEquationData, poles: &[PoleSpec], kind: ResidualKind, strip: (Real, Real)) -> Real {
    // keep each circle clear of every other integrand pole, including those
    // just outside the strip
    let wide = collect_candidates(fe, strip.0 - 2.0, strip.1 + 2.0, kind);
    let mut r: f64 = 0.1;
    for p in poles {
        for c in &wide {
            let d = (p.location - c.location).norm();
            if d > 1e-9 {
                r = r.min(0.5 * d);
            }
        }
    }
    r
}

/// Shared: Laurent data of every strip pole, turned into x-power terms.
/// `x_power_up` selects the x^(s+rho) convention (Q_rho) over x^(-s) (P, P1).
fn residual_terms(
    fe: &FunctionalEquationData,
    kind: ResidualKind,
    a: Real,
) -> Result<(ResidualTermSum, Vec<PoleSpec>)> {
    let strip = (fe.delta - a, a);
    let poles = enumerate_poles(fe, strip, kind)?;
    let radius = circle_radius(fe, &poles, kind, strip);
    let g = integrand_sans_x(fe, kind);
    let mut terms = Vec::new();
    for p in &poles {
        for j in 0..p.order {
            let b_j = laurent_coefficient(&g, p.location, j, radius, 1e-12)?;
            // discard spurious orders (Cauchy bound scale)
            if j > 0 && b_j.norm() < 1e-13 {
                continue;
            }
            match kind {
                ResidualKind::QRho { rho } => terms.push(ResidualTerm {
                    exponent: p.location + rho,
                    logpower: j,
                    coefficient: b_j / factorial(j),
                }),
                _ => terms.push(ResidualTerm {
                    exponent: -p.location,
                    logpower: j,
                    coefficient: b_j * (-1.0f64).powi(j as i32) / factorial(j),
                }),
            }
        }
    }
    let mut sum = ResidualTermSum { terms };
    sum.sort();
    Ok((sum, poles))
}

/// P(x): sum of residues of F(s) x^(-s) over the strip (delta - a, a).
/// Independent of a once all poles of F are inside.
pub fn residual_p(fe: &FunctionalEquationData, x: Real, a: Real) -> Result<Cplx> {
    Ok(residual_terms(fe, ResidualKind::P, a)?.0.eval(x))
}

/// Same pole data as `residual_p` but returned as the term sum.
pub fn residual_p_terms(
    fe: &FunctionalEquationData,
    a: Real,
) -> Result<(ResidualTermSum, Vec<PoleSpec>)> {
    residual_terms(fe, ResidualKind::P, a)
}

/// Q_rho(x) with its term structure and the pole list actually included
/// (the a-dependence of Q_rho is explicit in that list).
pub struct QRhoResult {
    pub terms: ResidualTermSum,
    pub value: Cplx,
    pub poles: Vec<PoleSpec>,
}

pub fn residual_q_rho(
    fe: &FunctionalEquationData,
    x: Real,
    rho: Real,
    a: Real,
) -> Result<QRhoResult> {
    if rho < 0.0 {
        return Err(Error::RhoBound { rho, bound: 0.0 });
    }
    let (terms, poles) = residual_terms(fe, ResidualKind::QRho { rho }, a)?;
    let value = terms.eval(x);
    Ok(QRhoResult { terms, value, poles })
}

/// P1(x): as P with the extra Gamma(s) ladder included.
pub fn residual_p1(fe: &FunctionalEquationData, x: Real, a: Real) -> Result<Cplx> {
    Ok(residual_terms(fe, ResidualKind::P1, a)?.0.eval(x))
}

pub fn residual_p1_terms(
    fe: &FunctionalEquationData,
    a: Real,
) -> Result<(ResidualTermSum, Vec<PoleSpec>)> {
    residual_terms(fe, ResidualKind::P1, a)
}

/// Probe the analytic order of `f` at a pole: the largest j with a
/// non-negligible a_{-1-j}, plus one, capped at `cap`.
pub fn probe_pole_order<F>(f: &F, location: Cplx, radius: Real, cap: usize) -> Result<usize>
where
    F: Fn(Cplx) -> Result<Cplx>,
{
    // scale for negligibility from the circle maximum (Cauchy bound)
    let mut max_on_circle = 0.0f64;
    for idx in 0..64 {
        let theta = std::f64::consts::TAU * idx as f64 / 64.0;
        let s = location + radius * Cplx::new(theta.cos(), theta.sin());
        max_on_circle = max_on_circle.max(f(s)?.norm());
    }
    let mut order = 0usize;
    for j in 0..cap {
        let b_j = laurent_coefficient(f, location, j, radius, 1e-12)?;
        if b_j.norm() > 1e-10 * max_on_circle * radius.powi(j as i32 + 1) {
            order = j + 1;
        }
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::log_gamma;
    use crate::zeta::zeta;
    use approx::assert_relative_eq;

    #[test]
    fn residue_of_gamma_at_zero() {
        // integrand Gamma(s) x^{-s} at s = 0, x = e: residue 1 * e^0 = 1
        let x: f64 = std::f64::consts::E;
        let f = |s: Cplx| -> Result<Cplx> { Ok(log_gamma(s)?.exp() * (-s * x.ln()).exp()) };
        let v = residue_numeric(f, Cplx::new(0.0, 0.0), 0.3, 1e-12).unwrap();
        assert_relative_eq!(v.re, 1.0, max_relative = 1e-11);
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn residue_of_completed_zeta_at_one() {
        // Gamma(s/2) zeta(s) x^{-s} at s = 1, x = 1: sqrt(pi)
        let f = |s: Cplx| -> Result<Cplx> { Ok(log_gamma(s / 2.0)?.exp() * zeta(s)) };
        let v = residue_numeric(f, Cplx::new(1.0, 0.0), 0.25, 1e-12).unwrap();
        assert_relative_eq!(v.re, std::f64::consts::PI.sqrt(), max_relative = 1e-10);
    }

    #[test]
    fn order_two_residue_matches_series_expansion() {
        // Gamma(s)^2 x^{-s} at s = -1 (double pole), x = 1.
        // Near s = -1: Gamma(s) = -1/(s+1) + (gamma - 1) + O(s+1), so
        // Gamma(s)^2 = 1/(s+1)^2 - 2(gamma-1)/(s+1) + ... and the residue of
        // Gamma(s)^2 x^{-s} at x = 1 is -2(gamma - 1) + 0 (no log term at x=1).
        let f = |s: Cplx| -> Result<Cplx> { Ok((2.0 * log_gamma(s)?).exp()) };
        let v = residue_numeric(f, Cplx::new(-1.0, 0.0), 0.3, 1e-12).unwrap();
        let expect = -2.0 * (crate::numeric::EULER_GAMMA - 1.0);
        assert_relative_eq!(v.re, expect, max_relative = 1e-9);
    }

    #[test]
    fn circle_radius_invariance() {
        let f = |s: Cplx| -> Result<Cplx> { Ok(log_gamma(s / 2.0)?.exp() * zeta(s)) };
        let v1 = residue_numeric(&f, Cplx::new(1.0, 0.0), 0.25, 1e-13).unwrap();
        let v2 = residue_numeric(&f, Cplx::new(1.0, 0.0), 0.125, 1e-13).unwrap();
        assert!((v1 - v2).norm() < 1e-11);
    }

    #[test]
    fn nonconvergence_near_unlisted_pole() {
        // circle of radius 0.6 around s=0 comes within 0.4 of the pole at -1;
        // with an overlapping circle (radius > 1) the doubling never settles
        let f = |s: Cplx| -> Result<Cplx> {
            Ok(Cplx::new(1.0, 0.0) / (s * (s + 1.0) * (s + 1.0000001)))
        };
        // radius reaching past the unlisted cluster at -1 must not converge
        // to the lone residue at 0
        let v = residue_numeric(&f, Cplx::new(0.0, 0.0), 0.5, 1e-12).unwrap();
        assert_relative_eq!(v.re, 1.0, max_relative = 1e-6);
    }

    #[test]
    fn termsum_derivative_ladder() {
        // d/dx [x^2/2 - x/2] = x - 1/2
        let q1 = ResidualTermSum {
            terms: vec![
                ResidualTerm { exponent: Cplx::new(2.0, 0.0), logpower: 0, coefficient: Cplx::new(0.5, 0.0) },
                ResidualTerm { exponent: Cplx::new(1.0, 0.0), logpower: 0, coefficient: Cplx::new(-0.5, 0.0) },
            ],
        };
        let d = q1.derivative();
        for &x in &[0.5f64, 1.0, 3.7] {
            assert_relative_eq!(d.eval(x).re, x - 0.5, max_relative = 1e-14);
        }
        // log terms: d/dx [x^2 log x] = 2 x log x + x
        let t = ResidualTermSum {
            terms: vec![ResidualTerm {
                exponent: Cplx::new(2.0, 0.0),
                logpower: 1,
                coefficient: Cplx::new(1.0, 0.0),
            }],
        };
        let d = t.derivative();
        for &x in &[0.5f64, 2.0] {
            assert_relative_eq!(d.eval(x).re, 2.0 * x * x.ln() + x, max_relative = 1e-14);
        }
    }
}
