use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn potnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_potnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus_file(name: &str) -> String {
    corpus().join(name).to_string_lossy().into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn generate_is_deterministic_and_counts_match() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.toml");
    let b = dir.path().join("b.toml");
    for p in [&a, &b] {
        let o = potnet(&["generate", "multipath", "--segments", "8", "--options", "3", "--seed", "1", "-o", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let stats = json(&potnet(&["stats", a.to_str().unwrap(), "--format", "json"]));
    assert_eq!(stats["nodes"], 9);
    assert_eq!(stats["arcs"], 24);

    let single = potnet(&["generate", "multipath", "--segments", "1", "--options", "1"]);
    assert!(single.status.success());
    assert_eq!(stdout(&single).matches("[[arc]]").count(), 1);
}

#[test]
fn brute_force_and_branch_and_cut_agree_on_guarded_corpus() {
    let mut checked = 0;
    for entry in fs::read_dir(corpus()).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        if text.matches("[[arc]]").count() > 14 {
            continue;
        }
        let p = path.to_str().unwrap();
        let brute = potnet(&["solve", p, "--brute-force", "--format", "json"]);
        let bc = potnet(&["solve", p, "--format", "json"]);
        assert_eq!(brute.status.code(), bc.status.code(), "{p}");
        let (brute, bc) = (json(&brute), json(&bc));
        assert_eq!(brute["status"], bc["status"], "{p}");
        let (x, y) = (brute["cost"].as_f64().unwrap(), bc["cost"].as_f64().unwrap());
        assert!((x - y).abs() <= 1e-6 * x.abs().max(1.0), "{p}: {x} vs {y}");
        checked += 1;
    }
    assert!(checked >= 5);
}

#[test]
fn cost_lines_identical_on_twelve_arc_instance() {
    let p = corpus_file("random_7x12_s3.toml");
    let cost_line = |extra: &[&str]| {
        let mut args = vec!["solve", p.as_str()];
        args.extend_from_slice(extra);
        let o = potnet(&args);
        assert_eq!(o.status.code(), Some(0));
        stdout(&o).lines().find(|l| l.starts_with("cost ")).unwrap().to_string()
    };
    assert_eq!(cost_line(&["--brute-force"]), cost_line(&[]));
}

#[test]
fn cuts_solve_path_at_root_and_no_cuts_branch() {
    let p = corpus_file("path8_s1.toml");
    let with = potnet(&["solve", &p, "--k", "8", "--format", "json"]);
    assert_eq!(with.status.code(), Some(0));
    let with = json(&with);
    assert_eq!(with["branch_nodes"], 0);
    assert_eq!(with["status"], "optimal");

    let without = potnet(&["solve", &p, "--no-cuts", "--node-limit", "20", "--format", "json"]);
    assert!(matches!(without.status.code(), Some(0) | Some(2)));
    assert!(json(&without)["branch_nodes"].as_u64().unwrap() > 0);
}

#[test]
fn solve_csv_has_table_columns() {
    let o = potnet(&["solve", &corpus_file("two_entries.toml"), "--k-max", "2", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("instance,cuts_enabled,k_max,pi_bar,time_s,nodes,gap_pct"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "two_entries");
    assert_eq!(row[1], "true");
    assert_eq!(row[2], "2");
}

#[test]
fn check_reports_feasibility_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let inst = corpus_file("two_entries.toml");
    let all = write(dir.path(), "all.x", "s1v 1\nvt 1\ns2t 1\n");
    let o = potnet(&["check", &inst, &all]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("feasible, spread ≤ π̄"));

    let cut = write(dir.path(), "cut.x", "# s2 is isolated\ns1v 1\nvt 1\n");
    let o = potnet(&["check", &inst, &cut]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("infeasible"));
}

#[test]
fn infeasible_instance_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(corpus().join("two_entries.toml")).unwrap();
    let tight = write(dir.path(), "tight.toml", &text.replace("pi_bar = 4.0", "pi_bar = 0.5"));
    assert_eq!(potnet(&["solve", &tight]).status.code(), Some(1));
    assert_eq!(potnet(&["solve", &tight, "--brute-force"]).status.code(), Some(1));
}

#[test]
fn input_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(potnet(&["solve", "/nonexistent/file.toml"]).status.code(), Some(3));
    assert_eq!(potnet(&["solve"]).status.code(), Some(3));
    let text = fs::read_to_string(corpus().join("three_two_parallel.toml")).unwrap();
    let bad = write(dir.path(), "bad.toml", &text.replace("balance = -1.66", "balance = -1.5"));
    let o = potnet(&["stats", &bad]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("balance rule"));
    let x = write(dir.path(), "x", "nope 1\n");
    assert_eq!(potnet(&["check", &corpus_file("three_two_parallel.toml"), &x]).status.code(), Some(3));
    assert_eq!(potnet(&["solve", &corpus_file("path8_s1.toml"), "--brute-force"]).status.code(), Some(3));
}

#[test]
fn separate_finds_violated_inequality() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(dir.path(), "x", "a1 0.1\nb1 0.1\n");
    let o = potnet(&["separate", &corpus_file("three_two_parallel.toml"), &x, "--k-max", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = json(&o);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r["violated"] == true));
    assert_eq!(rows.iter().filter(|r| r["best"] == true).count(), 1);
    assert!(rows[0]["inequality"].as_str().unwrap().contains("x[a1]"));
}

#[test]
fn reduce_matches_parallel_series_formula() {
    let o = potnet(&["reduce", &corpus_file("three_two_parallel.toml"), "s", "t", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o)["resistance"].as_f64().unwrap();
    // Conductances add in parallel (3 and 2); resistances 1/U^2 add in series.
    let expected = 1.0 / 9.0 + 1.0 / 4.0;
    assert!((r - expected).abs() <= 1e-9 * expected, "{r}");
}
