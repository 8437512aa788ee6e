//! Randomized property suites for the module invariants.

mod common;

use proptest::prelude::*;
use vlab_core::gamma::{
    gamma_magnitude_estimate, gamma_product, log_gamma, GammaSignature, ScaledComplex,
};
use vlab_core::numeric::Cplx;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z) in the critical strip.
    #[test]
    fn gamma_reflection(re in 0.02f64..0.98, im in -12.0f64..12.0) {
        let z = Cplx::new(re, im);
        prop_assume!(z.norm() > 1e-3 && (Cplx::new(1.0, 0.0) - z).norm() > 1e-3);
        let lhs = (log_gamma(z).unwrap() + log_gamma(Cplx::new(1.0, 0.0) - z).unwrap()).exp();
        let rhs = Cplx::new(std::f64::consts::PI, 0.0) / (std::f64::consts::PI * z).sin();
        prop_assert!((lhs - rhs).norm() < 1e-10 * rhs.norm());
    }

    // Recurrence: Gamma(z+1) = z Gamma(z) for |z| <= 20 off the poles.
    #[test]
    fn gamma_recurrence(re in -19.0f64..19.0, im in -19.0f64..19.0) {
        let z = Cplx::new(re, im);
        let near_pole = re <= 0.5
            && im.abs() < 0.05
            && (re - re.round()).abs() < 0.05;
        prop_assume!(!near_pole && z.norm() > 0.05 && z.norm() <= 20.0);
        let lhs = log_gamma(z + 1.0).unwrap().exp();
        let rhs = z * log_gamma(z).unwrap().exp();
        prop_assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1e-280));
    }

    // Conjugate symmetry (exact up to rounding).
    #[test]
    fn gamma_conjugate_symmetry(re in -8.0f64..12.0, im in 0.01f64..25.0) {
        let z = Cplx::new(re, im);
        let a = log_gamma(z.conj()).unwrap();
        let b = log_gamma(z).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-13 * (1.0 + b.norm()));
    }

    // gamma_product with the unit signature is log_gamma bitwise after
    // scaling normalization.
    #[test]
    fn unit_signature_bitwise(re in 0.5f64..6.0, im in -15.0f64..15.0) {
        let sig = GammaSignature::new(vec![1.0], vec![Cplx::new(0.0, 0.0)]).unwrap();
        let s = Cplx::new(re, im);
        let a = gamma_product(&sig, s).unwrap();
        let b = ScaledComplex::from_log(log_gamma(s).unwrap());
        prop_assert_eq!(a, b);
    }

    // Stirling magnitude estimate within a constant factor of the truth.
    #[test]
    fn magnitude_estimate_constant_factor(a in 0.5f64..3.0, t in 12.0f64..200.0) {
        let sig = GammaSignature::new(
            vec![0.5, 1.0],
            vec![Cplx::new(0.25, 0.0), Cplx::new(0.0, 0.0)],
        ).unwrap();
        let est = gamma_magnitude_estimate(&sig, a, t).unwrap();
        let exact = gamma_product(&sig, Cplx::new(a, t)).unwrap();
        let log_ratio = est.ln() - exact.log2_abs() * std::f64::consts::LN_2;
        // documented factor: within 25% once every |alpha t + c| >= 4
        prop_assert!(log_ratio.abs() < 0.25, "log ratio {log_ratio}");
    }

    // Riesz dash convention: the boundary term carries half weight at
    // rho = 0 and the direct sum is exact for integer data.
    #[test]
    fn riesz_dash_weight(xi in 1u32..60) {
        let p = vlab_core::catalog::preset_with_cap(
            vlab_core::catalog::PresetId::Divisor, 128,
        ).unwrap();
        let x = xi as f64;
        let v = vlab_core::identities::riesz_lhs_direct(&p.fe, x, 0.0).unwrap();
        let mut expect = 0.0;
        for n in 1..=xi as u64 {
            let w = if n == xi as u64 { 0.5 } else { 1.0 };
            expect += w * vlab_core::catalog::coeff_divisor(n) as f64;
        }
        prop_assert_eq!(v.re, expect);
    }

    // Identity reports serialize to JSON and re-parse into identical values.
    #[test]
    fn report_roundtrip(lhs_re in -10.0f64..10.0, lhs_im in -10.0f64..10.0,
                        resid in 0.0f64..1.0, terms in 1usize..5000) {
        let rep = vlab_core::IdentityReport {
            identity: vlab_core::identities::IdentityTag::Riesz,
            point: vlab_core::identities::EvalPoint {
                x: Some(7.25), s: None, rho: Some(2.0),
            },
            lhs: Cplx::new(lhs_re, lhs_im),
            rhs: Cplx::new(lhs_re - resid, lhs_im),
            residual: resid,
            terms_lhs: terms,
            terms_rhs: terms * 2,
            truncation_estimate: resid / 2.0,
            passed: resid < 0.5,
        };
        let json = serde_json::to_string(&rep).unwrap();
        let back: vlab_core::IdentityReport = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, rep);
    }

    // Run configs round-trip through serialization unchanged.
    #[test]
    fn config_roundtrip(x in 0.1f64..20.0, tol_exp in -10i32..-3) {
        let raw = format!(
            r#"{{"task":"modular","preset":"theta-zeta","points":[{{"x":{x}}}],"tol":1e{tol_exp}}}"#
        );
        let cfg = vlab_core::config::parse_config(raw.as_bytes()).unwrap();
        let json = serde_json::to_vec(&cfg).unwrap();
        let cfg2 = vlab_core::config::parse_config(&json).unwrap();
        prop_assert_eq!(cfg2.points[0].x, cfg.points[0].x);
        prop_assert_eq!(cfg2.tol, cfg.tol);
    }
}

// Line independence of Z on randomized admissible abscissae.
proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn z_line_independence(a1 in 0.6f64..2.0, shift in 0.5f64..1.5, x in 0.3f64..5.0) {
        use vlab_core::kernels::{choose_truncation, KernelEvaluator, KernelKind};
        let sig = GammaSignature::new(vec![0.5], vec![Cplx::new(0.0, 0.0)]).unwrap();
        let e1 = KernelEvaluator::new(
            KernelKind::Z, &sig, &choose_truncation(&sig, KernelKind::Z, a1, 1e-11).unwrap(),
        ).unwrap();
        let e2 = KernelEvaluator::new(
            KernelKind::Z, &sig, &choose_truncation(&sig, KernelKind::Z, a1 + shift, 1e-11).unwrap(),
        ).unwrap();
        let v1 = e1.eval(x);
        let v2 = e2.eval(x);
        prop_assert!((v1.value - v2.value).norm() <= 2.0 * (v1.error + v2.error).max(5e-13));
    }
}

// Determinism: identical runs produce byte-identical serialized reports.
#[test]
fn determinism_byte_identical() {
    let cfg = vlab_core::config::parse_config(
        br#"{"task":"modular","preset":"divisor","points":[{"x":1.3},{"x":0.7}],"tol":1e-7}"#,
    )
    .unwrap();
    let a = vlab_core::config::run(&cfg).unwrap();
    let b = vlab_core::config::run(&cfg).unwrap();
    assert_eq!(
        vlab_core::config::to_json(&a.records),
        vlab_core::config::to_json(&b.records)
    );
    assert_eq!(vlab_core::config::to_csv(&a.records), vlab_core::config::to_csv(&b.records));
}
