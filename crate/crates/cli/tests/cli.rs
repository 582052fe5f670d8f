use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treewise"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_treewise"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn path(name: &str) -> String {
    golden(name).to_string_lossy().into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

/// Error output is exactly one line starting with `e `.
fn assert_error_line(out: &Output) {
    let err = stderr(out);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("e "), "{err}");
}

#[test]
fn golden_outputs() {
    let cases: [(&[&str], &str, i32); 9] = [
        (&["count", "chain.cnf"], "chain.count", 10),
        (&["count", "mixed.cnf"], "mixed.count", 10),
        (&["solve", "mixed.cnf"], "mixed.solve", 10),
        (&["asp", "loop.lp"], "loop.asp", 10),
        (&["decompose", "grid.gr"], "grid.td", 0),
        (&["decompose", "grid.gr", "--heuristic", "min-degree", "--seed", "7"], "grid_md7.td", 0),
        (&["reduce", "asp2sat", "loop.lp"], "loop.reduce", 0),
        (&["stats", "loop.lp"], "loop.stats", 0),
        (&["stats", "grid.gr"], "grid.stats", 0),
    ];
    for (args, expected, code) in cases {
        let args: Vec<String> = args
            .iter()
            .map(|a| if a.contains('.') { path(a) } else { a.to_string() })
            .collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = run(&args);
        assert_eq!(out.status.code(), Some(code), "{args:?}: {}", stderr(&out));
        assert_eq!(stdout(&out), fs::read_to_string(golden(expected)).unwrap(), "{args:?}");
        assert_eq!(run(&args).stdout, out.stdout, "output changes between runs");
    }
}

#[test]
fn count_prints_the_model_counter_line() {
    let out = run(&["count", &path("chain.cnf")]);
    assert_eq!(stdout(&out), "c s exact arb int 4\n");
    assert_eq!(out.status.code(), Some(10));
}

#[test]
fn unsatisfiable_inputs_exit_20() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(dir.path(), "u.cnf", "p cnf 1 2\n1 0\n-1 0\n");
    let out = run(&["count", &cnf]);
    assert_eq!((stdout(&out).as_str(), out.status.code()), ("c s exact arb int 0\n", Some(20)));
    let out = run(&["solve", &cnf]);
    assert_eq!((stdout(&out).as_str(), out.status.code()), ("s UNSATISFIABLE\n", Some(20)));
    let lp = write(dir.path(), "p.lp", "a :- not a.\n");
    let out = run(&["asp", &lp]);
    assert_eq!((stdout(&out).as_str(), out.status.code()), ("UNSAT\n", Some(20)));
}

#[test]
fn asp_modes() {
    let dir = tempfile::tempdir().unwrap();
    let tight = write(dir.path(), "t.lp", "a :- not b.\nb :- not a.\n");
    for mode in ["auto", "tight", "normal"] {
        let out = run(&["asp", &tight, "--mode", mode]);
        assert_eq!((stdout(&out).as_str(), out.status.code()), ("SAT\n", Some(10)), "{mode}");
    }
    let out = run(&["asp", &path("loop.lp"), "--mode", "tight"]);
    assert_eq!(out.status.code(), Some(2));
    assert_error_line(&out);
}

#[test]
fn validate_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["validate", "--td", &path("grid.td"), "--graph", &path("grid.gr")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "");
    let gr = write(dir.path(), "g.gr", "p tw 3 2\n1 2\n2 3\n");
    let td = write(dir.path(), "t.td", "s td 1 2 3\nb 1 1 2\n");
    let out = run(&["validate", "--td", &td, "--graph", &gr]);
    assert_eq!(out.status.code(), Some(20));
    assert_eq!(stdout(&out), "vertex 3 in no bag\nedge {2,3} in no bag\n");
}

#[test]
fn reduce_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("out");
    let out = run(&["reduce", "asp2sat", &path("loop.lp"), "-o", &prefix.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let cnf = dir.path().join("out.cnf").to_string_lossy().into_owned();
    let td = dir.path().join("out.td").to_string_lossy().into_owned();
    let report = fs::read_to_string(dir.path().join("out.width.jsonl")).unwrap();
    let last: serde_json::Value = serde_json::from_str(report.lines().last().unwrap()).unwrap();
    assert_eq!(last["boundHolds"], true);
    let valid = run(&["validate", "--td", &td, "--graph", &cnf]);
    assert_eq!(valid.status.code(), Some(0), "{}", stdout(&valid));
    let solved = run(&["solve", &cnf]);
    assert_eq!(solved.status.code(), Some(10));
}

#[test]
fn reduce_accepts_a_given_decomposition() {
    let dir = tempfile::tempdir().unwrap();
    let lp = write(dir.path(), "p.lp", "a :- b.\nb :- a.\n:- not a.\n");
    let td = write(dir.path(), "p.td", "s td 1 2 2\nb 1 1 2\n");
    let out = run(&["reduce", "asp2sat", &lp, "--td", &td, "-o", &dir.path().join("r").to_string_lossy()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let solved = run(&["solve", &dir.path().join("r.cnf").to_string_lossy()]);
    assert_eq!(solved.status.code(), Some(20));
    let bad = write(dir.path(), "bad.td", "s td 1 1 2\nb 1 1\n");
    let out = run(&["reduce", "asp2sat", &lp, "--td", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert_error_line(&out);
}

#[test]
fn stdin_needs_a_format() {
    let text = fs::read_to_string(golden("chain.cnf")).unwrap();
    let out = run_with_stdin(&["count", "-", "--format", "cnf"], &text);
    assert_eq!(stdout(&out), "c s exact arb int 4\n");
    let out = run_with_stdin(&["count", "-"], &text);
    assert_eq!(out.status.code(), Some(1));
    assert_error_line(&out);
}

#[test]
fn hybrid_flags_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("p cnf 9 36\n");
    for u in 1..=9 {
        for v in u + 1..=9 {
            text.push_str(&format!("{u} -{v} 0\n"));
        }
    }
    let cnf = write(dir.path(), "k9.cnf", &text);
    let stats = dir.path().join("stats.json");
    for (w, d) in [("1", "0"), ("2", "1"), ("3", "2"), ("10", "1")] {
        let out = run(&["count", &cnf, "-W", w, "-D", d, "--stats-out", &stats.to_string_lossy()]);
        assert_eq!(stdout(&out), "c s exact arb int 10\n", "W={w} D={d}");
        let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&stats).unwrap()).unwrap();
        assert!(json["maxDepthUsed"].as_u64().unwrap() <= d.parse().unwrap());
        assert_eq!(json["projectedCounting"], "unsupported");
    }
    let out = run(&["count", &cnf, "-W", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert_error_line(&out);
}

#[cfg(unix)]
#[test]
fn failing_sub_solver_exits_3() {
    let mut text = String::from("p cnf 8 28\n");
    for u in 1..=8 {
        for v in u + 1..=8 {
            text.push_str(&format!("{u} {v} 0\n"));
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(dir.path(), "k8.cnf", &text);
    let out = run(&["count", &cnf, "-W", "2", "-D", "0", "--sub-solver", "false {file}"]);
    assert_eq!(out.status.code(), Some(3));
    assert_error_line(&out);
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = [
        ("a.cnf", "p cnf 2 1\n1 5 0\n"),
        ("b.cnf", "1 2 0\n"),
        ("c.cnf", "p cnf x 1\n"),
        ("d.lp", "a | b.\n"),
        ("e.lp", "a :- \n"),
        ("f.gr", "p tw 2 1\n1 3\n"),
        ("g.cnf", "\u{0}\u{1}garbage"),
    ];
    for (name, text) in inputs {
        let file = write(dir.path(), name, text);
        let sub = if name.ends_with(".gr") { "decompose" } else if name.ends_with(".lp") { "asp" } else { "count" };
        let out = run(&[sub, &file]);
        assert_eq!(out.status.code(), Some(2), "{name}: {}", stderr(&out));
        assert_error_line(&out);
    }
    let out = run(&["count", &dir.path().join("missing.cnf").to_string_lossy()]);
    assert_eq!(out.status.code(), Some(2));
    assert_error_line(&out);
}

#[test]
fn usage_errors_exit_1() {
    for args in [
        &[][..],
        &["bogus"][..],
        &["count"][..],
        &["count", "x.cnf", "--heuristic", "random"][..],
        &["asp", "x.lp", "--mode", "disjunctive"][..],
        &["stats", "file.unknown"][..],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", stderr(&out));
        assert_error_line(&out);
    }
}

#[test]
fn help_and_version_succeed_everywhere() {
    let subcommands: [&[&str]; 9] = [
        &[],
        &["decompose"],
        &["validate"],
        &["solve"],
        &["count"],
        &["asp"],
        &["reduce"],
        &["reduce", "asp2sat"],
        &["stats"],
    ];
    for sub in subcommands {
        for flag in ["--help", "--version"] {
            let mut args = sub.to_vec();
            args.push(flag);
            let out = run(&args);
            assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stderr(&out));
            assert!(!out.stdout.is_empty());
        }
    }
}
