use std::path::Path;
use std::process::{Command, Output};

fn lesys(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lesys"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn prefix(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn sublinear_exponents_are_a_usage_error() {
    let o = lesys(&["solve", "--p", "1", "--q", "0.5", "--out", "/tmp/unused"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("pq > 1"), "{}", stderr(&o));
}

#[test]
fn unknown_flags_exit_with_one() {
    let o = lesys(&["solve", "--p", "2", "--q", "2", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--bogus"));
}

#[test]
fn solve_writes_solution_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = prefix(dir.path(), "run");
    let o = lesys(&[
        "solve", "--p", "1", "--q", "64", "--domain", "disk", "--grid", "512", "--out", &out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let sol: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{out}.solution.json")).unwrap())
            .unwrap();
    assert_eq!(sol["schema"], "1");
    assert_eq!(sol["u"].as_array().unwrap().len(), 513);
    assert!(sol["provenance"]["argv"]
        .as_array()
        .unwrap()
        .iter()
        .any(|a| a == "--grid"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{out}.report.json")).unwrap())
            .unwrap();
    assert_eq!(report["lower_bound_check"], true);
    assert!(report["M"].as_f64().unwrap() > 1.0);
}

#[test]
fn exhausted_budget_exits_two_and_keeps_best_iterate() {
    let dir = tempfile::tempdir().unwrap();
    let out = prefix(dir.path(), "short");
    let o = lesys(&[
        "solve",
        "--p",
        "2",
        "--q",
        "3",
        "--domain",
        "rect",
        "--grid",
        "31",
        "--max-iter",
        "1",
        "--out",
        &out,
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let sol: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{out}.solution.json")).unwrap())
            .unwrap();
    assert_eq!(sol["converged"], false);
}

#[test]
fn verify_stored_solution_prints_requested_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = prefix(dir.path(), "v");
    let o = lesys(&[
        "solve", "--p", "2", "--q", "3", "--grid", "256", "--out", &out,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let input = format!("{out}.solution.json");
    let o = lesys(&["verify", "--in", &input, "--checks", "pohozaev,energy,flux"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|l| l.ends_with("PASS")));

    let o = lesys(&[
        "verify",
        "--in",
        &input,
        "--checks",
        "brezis-merle",
        "--delta",
        "6.283185307",
    ]);
    assert_eq!(o.status.code(), Some(0));
    // (4π²/δ)·diam² with δ = 2π and diam = 2
    assert!(
        stdout(&o).contains("threshold=2.513274e1"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn unknown_check_lists_valid_names() {
    let o = lesys(&["verify", "--checks", "nosuch"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("pohozaev"));
}

#[test]
fn sweep_exports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = prefix(dir.path(), name);
        let o = lesys(&[
            "sweep",
            "--mode",
            "fixed-p",
            "--p",
            "1",
            "--q-dyadic",
            "2:5",
            "--grid",
            "128",
            "--out",
            &out,
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_eq!(stdout(&o).lines().count(), 4);
        std::fs::read_to_string(format!("{out}.csv")).unwrap()
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 5);
    assert!(a.starts_with(
        "p,q,M,N,energy,p_energy,L1_u,L1_v,L1_uq,L1_uq1,pohozaev_rel,energy_id_rel,converged\n"
    ));
}

#[test]
fn parallel_sweeps_need_cold_starts() {
    let o = lesys(&[
        "sweep",
        "--mode",
        "diagonal",
        "--q-list",
        "2,4",
        "--jobs",
        "2",
        "--out",
        "/tmp/unused",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let out = prefix(dir.path(), "cold");
    let o = lesys(&[
        "sweep", "--mode", "ray", "--K", "2", "--q-list", "2,4", "--grid", "128", "--cold",
        "--jobs", "2", "--out", &out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn eigen_on_the_unit_square() {
    let o = lesys(&["eigen", "--domain", "rect", "--grid", "127"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lambda: f64 = text
        .split_whitespace()
        .find_map(|t| t.strip_prefix("lambda="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((lambda - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-6);
}
