//! Exit-code contract of the binary: 0 all PASS, 1 any FAIL, 2 any
//! INCONCLUSIVE without FAIL, 3 error.

use std::path::PathBuf;
use std::process::Command;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.cfg"))
}

fn run(args: &[&str]) -> (Option<i32>, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_odoforge"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn validate_passes_with_exit_zero() {
    let path = fixture("dyadic");
    let (code, stdout, _) = run(&["validate", "--config", path.to_str().unwrap()]);
    assert_eq!(code, Some(0), "{stdout}");
    assert!(stdout.contains("residuality"));
}

#[test]
fn factor_onto_triadic_fails_with_exit_one() {
    let dir = std::env::temp_dir().join("odoforge-cli-factor");
    let cfg = dir.join("factor.cfg");
    std::fs::create_dir_all(&dir).unwrap();
    let base = std::fs::read_to_string(fixture("dyadic")).unwrap();
    // replace the 4-adic second chain by a triadic one
    let cut = base.split("[chain2]").next().unwrap();
    std::fs::write(&cfg, format!("{cut}\n[chain2]\nlevel = t^3\n")).unwrap();
    let (code, stdout, _) = run(&["factor", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, Some(1), "{stdout}");
    assert!(stdout.contains("witness"));
}

#[test]
fn shallow_residuality_is_inconclusive_exit_two() {
    let dir = std::env::temp_dir().join("odoforge-cli-shallow");
    let cfg = dir.join("shallow.cfg");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(
        &cfg,
        "[group]\nkind = free-abelian\nrank = 1\ngenerators = t\n\n[chain]\nlevel = t^2\n\n[run]\nball_radius = 7\n",
    )
    .unwrap();
    let (code, stdout, _) = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, Some(2), "{stdout}");
}

#[test]
fn errors_exit_three() {
    let (code, _, stderr) = run(&["validate", "--config", "/nonexistent.cfg"]);
    assert_eq!(code, Some(3));
    assert!(stderr.contains("error"));
    let (code, _, _) = run(&["frobnicate", "--config", "x"]);
    assert_eq!(code, Some(3));
    // factor without a second chain is a config error
    let path = fixture("triadic");
    let (code, _, stderr) = run(&["factor", "--config", path.to_str().unwrap()]);
    assert_eq!(code, Some(3), "{stderr}");
}

#[test]
fn out_dir_receives_artifacts() {
    let dir = std::env::temp_dir().join("odoforge-cli-artifacts");
    let _ = std::fs::remove_dir_all(&dir);
    let path = fixture("dyadic");
    let (code, _, _) =
        run(&["toeplitz", "--config", path.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(code, Some(0));
    assert!(dir.join("report.json").is_file());
    let dump = std::fs::read_to_string(dir.join("array.dump")).unwrap();
    assert!(dump.starts_with("e 0 exact 0\nt 1 exact 1\n"));
}

#[test]
fn adversarial_external_array_fails_with_witnesses() {
    let dir = std::env::temp_dir().join("odoforge-cli-external");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("external.cfg");
    let pattern = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/step.pattern");
    std::fs::write(
        &cfg,
        format!(
            "[group]\nkind = free-abelian\nrank = 1\ngenerators = t\n\n\
             [chain]\nlevel = t^2\nlevel = t^4\nlevel = t^8\nlevel = t^16\n\n\
             [run]\nwindow_level = 2\ntest_radius = 32\nexternal_array = {}\n",
            pattern.display()
        ),
    )
    .unwrap();
    let (code, stdout, _) = run(&["toeplitz", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, Some(1), "{stdout}");
    assert!(stdout.contains("external-array"));
    assert!(stdout.contains("witness"));
}

#[test]
fn depth_and_radius_overrides() {
    let path = fixture("dyadic");
    let (code, stdout, _) = run(&[
        "validate",
        "--config",
        path.to_str().unwrap(),
        "--depth",
        "3",
        "--radius",
        "7",
    ]);
    // at depth 3 the radius-7 ball meets 8Z only at the identity
    assert_eq!(code, Some(0), "{stdout}");
    assert!(stdout.contains("level-3"));
    assert!(!stdout.contains("level-4"));
}
