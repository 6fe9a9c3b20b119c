use std::path::Path;
use std::process::{Command, Output};

fn lb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lapbounds"))
        .args(args)
        .env_remove("LB_TOL")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn spectrum_of_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "k3.json",
        r#"{"n": 3, "edges": [[0,1],[1,2],[0,2]]}"#,
    );
    let o = lb(&["spectrum", &f]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["instance_id"], "k3");
    let eig: Vec<f64> = v["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!((eig[0] - 3.0).abs() < 1e-9 && (eig[1] - 3.0).abs() < 1e-9 && eig[2].abs() < 1e-9);
}

#[test]
fn check_prints_reports() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "star.json",
        r#"{"facets": [[0,1],[0,2],[0,3]]}"#,
    );
    let o = lb(&[
        "check",
        &f,
        "--bounds",
        "degree_sum_main,brouwer",
        "--k",
        "1",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let lines: Vec<serde_json::Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["bound_id"], "degree_sum_main");
    assert_eq!(lines[0]["holds"], true);
}

#[test]
fn check_with_assumption() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "p4.json",
        r#"{"n": 4, "edges": [[0,1],[1,2],[2,3]]}"#,
    );
    let o = lb(&[
        "check",
        &f,
        "--bounds",
        "hereditary_f:forest",
        "--assume",
        "forest",
    ]);
    assert_eq!(code(&o), 0);
    assert!(!stdout(&o).is_empty());
    // A false assumption is refused rather than silently used.
    let c = write(
        dir.path(),
        "c3.json",
        r#"{"n": 3, "edges": [[0,1],[1,2],[0,2]]}"#,
    );
    let o = lb(&[
        "check",
        &c,
        "--bounds",
        "hereditary_f:forest",
        "--assume",
        "forest",
        "--strict",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn search_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = lb(&[
        "search",
        "--enumerate",
        "4",
        "--bounds",
        "k_squared,bai",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["instances"], 64);
    assert_eq!(v["theorem_violations"], 0);
    for f in ["reports.jsonl", "violations.jsonl", "summary.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let csv = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(csv.starts_with("bound_id,instances,min_slack,argmin_instance,violations"));
}

#[test]
fn search_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let cfg = format!(
        r#"{{"family": "random_graph:n=6,p=0.5,seed=2,count=20", "bounds": "brouwer", "k": "1..n", "out": {:?}, "no_reports": true}}"#,
        out.to_str().unwrap()
    );
    let c = write(dir.path(), "cfg.json", &cfg);
    let o = lb(&["--config", &c, "search"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.join("reports.jsonl").exists());
    assert!(out.join("summary.csv").exists());
    let bad = write(dir.path(), "bad.json", r#"{"colour": 1}"#);
    assert_eq!(
        code(&lb(&["--config", &bad, "search", "--enumerate", "3"])),
        2
    );
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&lb(&["search"])), 2);
    assert_eq!(code(&lb(&["nonsense"])), 2);
    assert_eq!(
        code(&lb(&[
            "search",
            "--enumerate",
            "3",
            "--bounds",
            "no_such_bound"
        ])),
        2
    );
    assert_eq!(code(&lb(&["search", "--enumerate", "3", "--k", "x..y"])), 2);
    assert_eq!(code(&lb(&["search", "--enumerate", "3", "--tol", "-1"])), 2);
    assert_eq!(code(&lb(&["spectrum", "/no/such/file.json"])), 2);
    assert_eq!(code(&lb(&["--help"])), 0);
}

#[test]
fn tolerance_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_lapbounds"))
        .args(["search", "--enumerate", "3", "--out"])
        .arg(tempfile::tempdir().unwrap().path())
        .env("LB_TOL", "nope")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn identities_on_edge() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "k2.json", r#"{"n": 2, "edges": [[0,1]]}"#);
    let o = lb(&["identities", &f]);
    assert_eq!(code(&o), 0);
    let rows: Vec<serde_json::Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(rows.iter().any(|r| r["identity"] == "coning:1"));
    assert!(rows.iter().all(|r| r["residual"].as_f64().unwrap() < 1e-9));
}

#[test]
fn gen_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("inst");
    let o = lb(&[
        "gen",
        "matching:r=2,m=3,s=1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let files: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(files.len(), 1);
    let o = lb(&[
        "check",
        files[0].to_str().unwrap(),
        "--bounds",
        "degree_sum_main",
        "--r",
        "2",
    ]);
    assert_eq!(code(&o), 0);
    for line in stdout(&o).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["slack"].as_f64().unwrap().abs() < 1e-9);
    }
}

#[test]
fn list_has_registry() {
    let o = lb(&["list"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("brouwer\tconjecture"));
    assert!(s.contains("degree_sum_main\ttheorem"));
}
