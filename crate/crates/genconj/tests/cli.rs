//! End-to-end tests of the `genconj` binary: scan determinism, config error
//! handling, and tolerance fault injection.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_genconj"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("genconj-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const SCAN_CONFIG: &str = "\
[scenario]
name = quad_euclid
function = quad
dim = 1
family = euclidean
gamma = 1.0
y_min = -2.0
y_max = 2.0
y_points = 9
checks = envelope, gradient, jacobian

[scenario]
name = dwell_bregman
function = double_well
dim = 1
family = left_bregman
kernel = boltzmann_shannon
gamma = 0.5
y_min = 0.2
y_max = 2.0
y_points = 7
";

#[test]
fn scan_is_deterministic() {
    let dir = temp_dir("det");
    let cfg = dir.join("scan.ini");
    std::fs::write(&cfg, SCAN_CONFIG).unwrap();
    let out1 = dir.join("run1");
    let out2 = dir.join("run2");
    for out in [&out1, &out2] {
        let st = bin()
            .args(["scan", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .arg("--seed")
            .arg("7")
            .status()
            .unwrap();
        assert!(st.success(), "scan failed");
    }
    for f in ["quad_euclid.csv", "dwell_bregman.csv", "summary.csv"] {
        let a = std::fs::read(out1.join(f)).unwrap();
        let b = std::fs::read(out2.join(f)).unwrap();
        assert_eq!(a, b, "{f} differs between identical runs");
    }
    let csv = std::fs::read_to_string(out1.join("quad_euclid.csv")).unwrap();
    assert!(csv.lines().count() == 10, "expected header + 9 rows:\n{csv}");
    // closed form: envelope at y = 2 is -1
    assert!(csv.contains("-1.0000000000000000e0"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn corrupted_config_exits_2() {
    let dir = temp_dir("bad");
    let cfg = dir.join("bad.ini");
    std::fs::write(&cfg, "[scenario]\nname = x\nfunction = quad\nbogus = 3\n").unwrap();
    let out = bin()
        .args(["scan", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 4"), "stderr: {stderr}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn missing_config_exits_2() {
    let out = bin()
        .args(["scan", "--config", "/nonexistent/nope.ini", "--out", "/tmp/genconj-none"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_passes_at_default_tolerance() {
    let out = bin()
        .args(["check", "--name", "closed_form_desk_values"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn check_fails_under_injected_tolerance() {
    // shrinking every tolerance to 1e-14 of its pinned value must trip the
    // closed-form criterion, proving the gate actually bites
    let out = bin()
        .args(["check", "--name", "closed_form_desk_values", "--tol-scale", "1e-14"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("closed_form_desk_values"), "stderr: {stderr}");
}

#[test]
fn unknown_criterion_exits_2() {
    let out = bin().args(["check", "--name", "no_such_criterion"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown criterion"));
}
