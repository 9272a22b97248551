use std::path::PathBuf;
use std::process::{Command, Output};

fn trigonal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trigonal")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("trigonal-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn hw_reports_superspecial() {
    let o = trigonal(&["hw", "--q", "11", "--poly", "x*y*z^3 + x^5 + y^5"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("rank 0: superspecial"), "{s}");
    assert!(s.starts_with("[0, 0, 0, 0, 0]"), "{s}");
}

#[test]
fn hw_json_for_non_split_model() {
    let o = trigonal(&["--json", "hw", "--q", "11", "--poly", "(x^2 - 2*y^2)*z^3 + x^5"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["superspecial"], false);
}

#[test]
fn singular_points_and_automorphisms() {
    let o = trigonal(&["singular", "--q", "11", "--poly", "x*y*z^3 + x^5 + y^5"]);
    assert!(stdout(&o).contains("SplitNode"), "{}", stdout(&o));
    let o = trigonal(&["points", "--q", "11", "--poly", "x*y*z^3 + x^5 + y^5", "--ext", "2"]);
    assert_eq!(stdout(&o), "232 points over F_121\n");
    let o = trigonal(&["--json", "aut", "--q", "11", "--poly", "x*y*z^3 + x^5 + y^5", "--over", "closure", "--sigma"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["order"], 30);
    assert_eq!(v["name"], "C3 x D5");
    assert_eq!(v["sigma_classes"]["class_sizes"].as_array().unwrap().len(), 4);
    let o = trigonal(&["irred", "--q", "11", "--poly", "(x + y)*(x^4 + z^4)"]);
    assert_eq!(stdout(&o), "reducible over closure\n");
}

#[test]
fn usage_errors() {
    assert_eq!(trigonal(&["hw", "--q", "11"]).status.code(), Some(2));
    assert_eq!(trigonal(&["enumerate", "--q", "11", "--case", "split2", "--slice", "5..2"]).status.code(), Some(2));
    let cfg = scratch("bad.conf");
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    let o = trigonal(&["--config", cfg.to_str().unwrap(), "points", "--q", "11", "--poly", "x^5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_accepts_runs_and_rejects_corruption() {
    let out = scratch("split2.json");
    let o = trigonal(&["enumerate", "--q", "11", "--case", "split2", "--slice", "0..1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = trigonal(&["verify", "--in", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("100 survivors checked, 0 discrepancies"));

    let mut report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    report["survivors"][0]["form"] = "x*y*z^3 + x^5 + 2*x*y^4".into();
    let bad = scratch("corrupt.json");
    std::fs::write(&bad, serde_json::to_string(&report).unwrap()).unwrap();
    let o = trigonal(&["verify", "--in", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("x*y*z^3 + x^5 + 2*x*y^4"), "{}", stdout(&o));
}

#[test]
fn budget_exhaustion_saves_partial_report() {
    let out = scratch("partial.json");
    let o = trigonal(&[
        "enumerate",
        "--q",
        "11",
        "--case",
        "split2",
        "--slice",
        "0..1",
        "--max-pairs",
        "1",
        "--exhaustive-threshold",
        "0",
        "--exhaustive-cap",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["verdict"], "incomplete");
    assert_eq!(report["counters"]["unresolved"], 1);
}
