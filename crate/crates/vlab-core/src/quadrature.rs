//! Gauss-Legendre panel quadrature and the trapezoid rule on log scale.

use crate::numeric::{Cplx, KahanComplex};

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre polynomial. Deterministic; symmetric pairs are generated from
/// one half.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_n'(x) by the three-term recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Panel layout on [0, t_max]: widths grow geometrically from a fine start
/// and plateau at `WIDTH_CAP` times the first width, so the oscillatory tail
/// stays resolved while the origin region is sampled densely.
#[derive(Debug, Clone)]
pub struct PanelLayout {
    pub boundaries: Vec<f64>,
}

pub const PANEL_GROWTH: f64 = 1.35;
const WIDTH_CAP: f64 = 8.0;

impl PanelLayout {
    pub fn new(t_max: f64, panels: usize) -> Self {
        assert!(t_max > 0.0 && panels >= 1);
        let rel: Vec<f64> = (0..panels)
            .map(|k| PANEL_GROWTH.powi(k as i32).min(WIDTH_CAP))
            .collect();
        let total: f64 = rel.iter().sum();
        let mut boundaries = Vec::with_capacity(panels + 1);
        boundaries.push(0.0);
        let mut t = 0.0;
        for w in &rel {
            t += w / total * t_max;
            boundaries.push(t);
        }
        *boundaries.last_mut().unwrap() = t_max;
        Self { boundaries }
    }

    pub fn panels(&self) -> usize {
        self.boundaries.len() - 1
    }

    /// Maximum panel width (the last one).
    pub fn max_width(&self) -> f64 {
        let b = &self.boundaries;
        b[b.len() - 1] - b[b.len() - 2]
    }
}

/// Integrate a complex-valued function over [0, t_max] with fixed-order
/// Gauss-Legendre per panel, reducing panels in ascending order with
/// compensated summation. Also returns the half-order result for a
/// cheap a-posteriori error estimate.
pub fn integrate_panels<F: FnMut(f64) -> Cplx>(
    layout: &PanelLayout,
    nodes_per_panel: usize,
    mut f: F,
) -> (Cplx, Cplx) {
    let (xs, ws) = gauss_legendre(nodes_per_panel);
    let (xs_h, ws_h) = gauss_legendre((nodes_per_panel / 2).max(2));
    let mut full = KahanComplex::new();
    let mut half = KahanComplex::new();
    for p in 0..layout.panels() {
        let a = layout.boundaries[p];
        let b = layout.boundaries[p + 1];
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = KahanComplex::new();
        for (x, w) in xs.iter().zip(&ws) {
            acc.add(f(c + h * x) * *w);
        }
        full.add(acc.value() * h);
        let mut acc_h = KahanComplex::new();
        for (x, w) in xs_h.iter().zip(&ws_h) {
            acc_h.add(f(c + h * x) * *w);
        }
        half.add(acc_h.value() * h);
    }
    (full.value(), half.value())
}

/// Trapezoid sum of `f(e^v) * e^v`-style integrands on the log line,
/// expanding outward from `start` until `consec` consecutive terms on each
/// side fall below `cutoff` times the running maximum.
///
/// Suited to integrands with (double-)exponential decay in both directions;
/// the nested-kernel oracle is the only consumer.
pub fn adaptive_log_trapezoid<F: FnMut(f64) -> Cplx>(
    mut f: F,
    start: f64,
    step: f64,
    cutoff: f64,
    max_steps: usize,
) -> Cplx {
    let mut acc = KahanComplex::new();
    let center = f(start);
    acc.add(center);
    let mut peak: f64 = center.norm();
    for dir in [1.0f64, -1.0] {
        let mut below = 0usize;
        for k in 1..=max_steps {
            let v = f(start + dir * step * k as f64);
            acc.add(v);
            peak = peak.max(v.norm());
            if v.norm() < cutoff * peak.max(1e-300) {
                below += 1;
                if below >= 8 {
                    break;
                }
            } else {
                below = 0;
            }
        }
    }
    acc.value() * step
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        let (xs, ws) = gauss_legendre(8);
        // integral of x^14 over [-1,1] = 2/15, exact for order 8 (degree 15)
        let v: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(14)).sum();
        assert_relative_eq!(v, 2.0 / 15.0, max_relative = 1e-13);
        let s: f64 = ws.iter().sum();
        assert_relative_eq!(s, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn panels_cover_interval() {
        let layout = PanelLayout::new(37.5, 9);
        assert_eq!(layout.panels(), 9);
        assert_eq!(layout.boundaries[0], 0.0);
        assert_relative_eq!(*layout.boundaries.last().unwrap(), 37.5);
        for w in layout.boundaries.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn panel_quadrature_gaussian() {
        // integral_0^6 e^{-t^2} dt = sqrt(pi)/2 erf(6) ~ sqrt(pi)/2
        let layout = PanelLayout::new(6.0, 6);
        let (v, v_half) = integrate_panels(&layout, 20, |t| Cplx::new((-t * t).exp(), 0.0));
        assert_relative_eq!(v.re, std::f64::consts::PI.sqrt() / 2.0, max_relative = 1e-12);
        assert!((v - v_half).norm() < 1e-8);
    }

    #[test]
    fn log_trapezoid_gamma_integral() {
        // integral_0^infty e^{-u} u^{3} du/u = Gamma(3) = 2, on log scale
        let v = adaptive_log_trapezoid(
            |ln_u| {
                let u = ln_u.exp();
                Cplx::new((-u).exp() * u.powi(3), 0.0)
            },
            0.0,
            0.05,
            1e-18,
            4000,
        );
        assert_relative_eq!(v.re, 2.0, max_relative = 1e-12);
    }
}
