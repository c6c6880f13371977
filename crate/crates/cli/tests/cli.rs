use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn zesc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zesc")).args(args).output().expect("spawn zesc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn fixture(k: usize) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("../../fixtures/report_k{k}.json"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn graph_summary() {
    let o = zesc(&["graph", "--k", "7"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("vertices 64"));
    assert!(stdout(&o).contains("edges 1120"));
}

#[test]
fn params_of_h7_are_eight() {
    let o = zesc(&["params", "--k", "7", "--json"]);
    assert!(o.status.success());
    let v = json(&o);
    for p in v.as_array().unwrap() {
        assert_eq!(p["value"], 8, "{p}");
        assert_eq!(p["status"], "exact");
    }
}

#[test]
fn theta_of_complement_h11_is_exact() {
    let o = zesc(&["theta", "--k", "11", "--complement", "--json"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["lambda-exact"], "12");
    assert_eq!(v["method"], "cayley-lp");
}

#[test]
fn theta_of_a_graph_file() {
    let path = scratch("c5.txt");
    std::fs::write(&path, "p 5\ne 0 1\ne 1 2\ne 2 3\ne 3 4\ne 0 4\n").unwrap();
    let o = zesc(&["theta", "--graph", path.to_str().unwrap(), "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let lambda = json(&o)["lambda"].as_f64().unwrap();
    assert!((lambda - 5f64.sqrt()).abs() < 1e-5, "{lambda}");
}

#[test]
fn hadamard_orders() {
    let o = zesc(&["hadamard", "--order", "12"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("order 12"));
    assert_eq!(zesc(&["hadamard", "--order", "6"]).status.code(), Some(2));
}

#[test]
fn polybound_k11() {
    let o = zesc(&["polybound", "--k", "11"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("D = 67"), "{s}");
    assert!(s.contains("16 <= alpha(H_11) <= 67"), "{s}");
    assert_eq!(zesc(&["polybound", "--k", "7"]).status.code(), Some(2));
}

#[test]
fn rsp_batch_passes() {
    let o = zesc(&["qsim", "rsp", "--d", "8", "--trials", "20", "--json"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["pass"], true);
}

#[test]
fn report_then_audit() {
    let path = scratch("report_k3.json");
    let o = zesc(&["report", "--k", "3", "--no-sim", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let o = zesc(&["audit", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("audit pass"));
}

#[test]
fn fixtures_audit_clean() {
    for k in [3, 5, 7, 11] {
        let o = zesc(&["audit", fixture(k).to_str().unwrap()]);
        assert!(o.status.success(), "k = {k}: {}", stdout(&o));
    }
}

#[test]
fn tampered_report_fails_audit() {
    let text = std::fs::read_to_string(fixture(7)).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["theta"][0]["value"] = serde_json::json!(3.0);
    let path = scratch("tampered_k7.json");
    std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
    let o = zesc(&["audit", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("violated"));
}

#[test]
fn degenerate_and_invalid_k() {
    let o = zesc(&["report", "--k", "5", "--table", "--no-sim"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("has no edges"), "{}", stdout(&o));
    assert_eq!(zesc(&["report", "--k", "4"]).status.code(), Some(2));
}
