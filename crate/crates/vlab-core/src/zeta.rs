//! Riemann zeta and Dirichlet beta by alternating-series acceleration.
//!
//! The d_k acceleration of Cohen, Rodriguez-Villegas and Zagier applied to
//! eta(s) = sum (-1)^(k-1) k^(-s) continues zeta into the region the residue
//! circles need (Re s >= -4, |Im s| <= ~12) with error far below 1e-13.
//! Evaluation right at s = 1 (or at the 1 + 2 pi i k / ln 2 lattice of the
//! eta denominator) is excluded; the catalog declares those poles instead.

use crate::numeric::{Cplx, KahanComplex};

const N_TERMS: usize = 72;

/// Accelerated value of sum_{k>=0} (-1)^k a_k for a a_k given by a closure.
fn cvz_alternating<F: Fn(usize) -> Cplx>(a: F) -> Cplx {
    let n = N_TERMS;
    let mut d = (3.0 + 8.0f64.sqrt()).powi(n as i32);
    d = 0.5 * (d + 1.0 / d);
    let mut b = -1.0f64;
    let mut c = -d;
    let mut acc = KahanComplex::new();
    for k in 0..n {
        c = b - c;
        acc.add(a(k) * c);
        let kf = k as f64;
        b *= 2.0 * (kf + n as f64) * (kf - n as f64) / ((2.0 * kf + 1.0) * (kf + 1.0));
    }
    acc.value() / d
}

/// eta(s) = sum (-1)^(k-1) k^(-s), entire.
pub fn eta(s: Cplx) -> Cplx {
    cvz_alternating(|k| Cplx::new((k + 1) as f64, 0.0).powc(-s))
}

/// Riemann zeta via eta(s) / (1 - 2^(1-s)), reflected through the
/// functional equation for Re s < -1/2 where the accelerated sum loses
/// absolute precision.
///
/// Accurate to better than 1e-13 for moderate |Im s|; do not call at s = 1
/// (pole); the catalog carries that as a declared pole.
pub fn zeta(s: Cplx) -> Cplx {
    if s.re < -0.5 {
        // zeta(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s)
        let one = Cplx::new(1.0, 0.0);
        let pi = std::f64::consts::PI;
        let lg = crate::gamma::log_gamma(one - s).expect("1-s has Re > 3/2, off the poles");
        return Cplx::new(2.0, 0.0).powc(s)
            * Cplx::new(pi, 0.0).powc(s - one)
            * (pi * s / 2.0).sin()
            * lg.exp()
            * zeta(one - s);
    }
    let denom = Cplx::new(1.0, 0.0) - Cplx::new(2.0, 0.0).powc(Cplx::new(1.0, 0.0) - s);
    eta(s) / denom
}

/// Dirichlet beta: sum (-1)^k (2k+1)^(-s); the acceleration continues it
/// directly (no denominator factor).
pub fn dirichlet_beta(s: Cplx) -> Cplx {
    cvz_alternating(|k| Cplx::new((2 * k + 1) as f64, 0.0).powc(-s))
}
