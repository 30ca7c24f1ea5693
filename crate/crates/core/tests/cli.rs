use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn roughwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roughwave")).args(args).output().unwrap()
}

fn config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const FLAT: &str = r#"{
    "profile": {"kind": "flat"},
    "medium": {"k_plus": 3, "k_minus": 1, "mu": 2},
    "mesh": {"a": 10, "a_core": 5, "n": 96},
    "outputs": {"grid": {"x1_min": -2, "x1_max": 2, "x2_min": -1, "x2_max": 1, "n1": 5, "n2": 4}}
}"#;

#[test]
fn solve_writes_three_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "flat.json", FLAT);
    let out = dir.path().join("out");
    let o = roughwave(&["solve", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let dens = std::fs::read_to_string(out.join("densities.csv")).unwrap();
    let mut lines = dens.lines();
    assert!(lines.next().unwrap().starts_with("# roughwave "));
    assert_eq!(lines.next().unwrap(), "x1,x2,weight,phi_re,phi_im,psi_re,psi_im");
    assert_eq!(lines.count(), 96);

    let field = std::fs::read_to_string(out.join("field.csv")).unwrap();
    assert!(field.lines().next().unwrap().contains("config_sha256="));
    assert_eq!(field.lines().nth(1).unwrap(), "x1,x2,region,masked,u_re,u_im");
    assert_eq!(field.lines().count(), 2 + 20);

    let diag: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("diagnostics.json")).unwrap()).unwrap();
    assert!(diag["residual"].as_f64().unwrap() < 1e-8);
    assert_eq!(diag["meta"]["tool"], "roughwave");
    assert_eq!(diag["meta"]["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn inadmissible_exits_3_unless_forced() {
    let dir = tempfile::tempdir().unwrap();
    let body = FLAT.replace(r#""k_plus": 3, "k_minus": 1, "mu": 2"#, r#""k_plus": 1, "k_minus": 2, "mu": 2"#);
    let cfg = config(dir.path(), "bad.json", &body);
    let out = dir.path().join("out");
    let o = roughwave(&["solve", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(mu - 1)(k_+^2 - k_-^2 mu)"));
    assert!(!out.join("densities.csv").exists());

    let o = roughwave(&["solve", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--force"]);
    assert_ne!(o.status.code(), Some(3));
    if o.status.success() {
        let diag = std::fs::read_to_string(out.join("diagnostics.json")).unwrap();
        assert!(diag.contains("\"forced\": true"));
    }
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = config(dir.path(), "u.json", &FLAT.replace("\"mesh\"", "\"meshh\""));
    assert_eq!(roughwave(&["solve", unknown.to_str().unwrap()]).status.code(), Some(2));
    let broken = config(dir.path(), "b.json", "{ not json");
    assert_eq!(roughwave(&["solve", broken.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("nope.json");
    assert_eq!(roughwave(&["solve", missing.to_str().unwrap()]).status.code(), Some(2));
    let neg = config(dir.path(), "n.json", &FLAT.replace("\"mu\": 2", "\"mu\": -2"));
    assert_eq!(roughwave(&["solve", neg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn spline_profile_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.csv"), "x1,f\n-3,0\n-1,0.1\n0,0.2\n1,0.1\n3,0\n").unwrap();
    let body = FLAT.replace(r#"{"kind": "flat"}"#, r#"{"spline_csv": "s.csv"}"#);
    let cfg = config(dir.path(), "spline.json", &body);
    let out = dir.path().join("out");
    let o = roughwave(&["solve", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_writes_report_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = roughwave(&["verify", "specfun", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("PASS") && !stdout.contains("FAIL"));
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("specfun_report.json")).unwrap()).unwrap();
    let checks = rep["checks"].as_array().unwrap();
    assert!(!checks.is_empty() && checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn verify_inadmissible_medium_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = roughwave(&["verify", "fresnel", "--out", dir.path().to_str().unwrap(), "--kp", "2", "--km", "2", "--mu", "1", "--n", "100"]);
    assert_eq!(o.status.code(), Some(3));
}
