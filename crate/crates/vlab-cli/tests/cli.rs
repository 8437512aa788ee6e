//! End-to-end checks of the vlab binary: subcommands, exit codes,
//! config-file runs, and output determinism.

use std::process::Command;

fn vlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vlab"))
}

#[test]
fn kernel_prints_expected_value() {
    let out = vlab()
        .args(["kernel", "--kind", "Z", "--alphas", "1", "--betas", "0", "--x", "2.0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("0.135335283236"), "{text}");
}

#[test]
fn modular_identity_exit_zero() {
    let out = vlab()
        .args([
            "identity", "modular", "--preset", "theta-zeta", "--x", "1.0", "--tol", "1e-9",
            "--out", "json",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"passed\": true"), "{text}");
}

#[test]
fn riesz_divisor_default_relative_tolerance() {
    let out = vlab()
        .args(["identity", "riesz", "--preset", "divisor", "--rho", "2", "--x", "10.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn impossible_tolerance_exits_two() {
    // an absurd tolerance fails the check but is not a config error
    let out = vlab()
        .args(["identity", "modular", "--preset", "divisor", "--x", "1.0", "--tol", "1e-17"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_config_exits_one() {
    let out = vlab()
        .args(["identity", "modular", "--preset", "no-such-preset", "--x", "1.0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = vlab().args(["identity", "modular", "--preset", "divisor", "--x", "-3.0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_run_and_csv_schema() {
    let dir = std::env::temp_dir().join(format!("vlab-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg_path = dir.join("run.json");
    let out_path = dir.join("report.csv");
    std::fs::write(
        &cfg_path,
        format!(
            r#"{{"task":"modular","preset":"theta-zeta","points":[{{"x":1.0}},{{"x":2.0}}],
                "tol":1e-8,"output":"csv","out_path":"{}"}}"#,
            out_path.display()
        ),
    )
    .unwrap();
    let out = vlab().arg("--config").arg(&cfg_path).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "identity,x_or_s,rho,lhs_re,lhs_im,rhs_re,rhs_im,residual,terms_lhs,terms_rhs,trunc_est,passed"
    );
    assert_eq!(lines.count(), 2);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn repeated_runs_byte_identical() {
    let args = ["identity", "aux", "--preset", "r2", "--x", "1.0", "--tol", "1e-7", "--out", "json"];
    let a = vlab().args(args).output().unwrap();
    let b = vlab().args(args).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(0));
}

#[test]
fn custom_series_through_config() {
    // a two-term declared series exercising the custom path end to end:
    // kernel-style modular run must at least validate and execute
    let dir = std::env::temp_dir().join(format!("vlab-custom-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg_path = dir.join("custom.json");
    std::fs::write(
        &cfg_path,
        r#"{"task":"kernel","kernel_kind":"Y","alphas":[1.0],"betas":[[0.0,0.0]],
            "points":[{"x":1.0}],"tol":1e-9}"#,
    )
    .unwrap();
    let out = vlab().arg("--config").arg(&cfg_path).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    // 2 K0(2) = 0.2277878...
    assert!(String::from_utf8_lossy(&out.stdout).contains("0.2277877454"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn asympt_subcommand() {
    let out = vlab()
        .args(["asympt", "--preset", "r2", "--rho", "1", "--x", "500", "--m", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn multi_factor_kernel_flags() {
    // duplication pair through the CLI: 2 sqrt(pi) e^{-2} at x = 1
    let out = vlab()
        .args(["kernel", "--kind", "Z", "--alphas", "0.5,0.5", "--betas", "0,0.5", "--x", "1.0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("0.479751087"));
}

#[test]
fn fe_identity_subcommand() {
    let out = vlab()
        .args(["identity", "fe", "--preset", "theta-zeta", "--s", "3.0,0.0", "--tol", "1e-6"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}
