use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn tdcount(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tdcount"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Reference parser for the result block: (type, status, log10, value).
fn parse_block(text: &str) -> (String, String, Option<String>, Option<String>) {
    let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with("c o ")).collect();
    let kind = lines[0].strip_prefix("c s type ").expect("type line").to_string();
    let status = lines[1].strip_prefix("s ").expect("status line").to_string();
    let log10 = lines.get(2).map(|l| l.strip_prefix("c s log10-estimate ").expect("log10 line").to_string());
    let value = lines.get(3).map(|l| {
        let rest = l.strip_prefix("c s exact arb ").expect("value line");
        rest.split_once(' ').expect("kind and value").1.to_string()
    });
    (kind, status, log10, value)
}

/// Deterministic pseudo-random 3-CNF in DIMACS form.
fn random_cnf(seed: u64, n: u32, m: u32) -> String {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = move |bound: u32| {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 33) % bound as u64) as u32
    };
    let mut text = format!("p cnf {n} {m}\n");
    for _ in 0..m {
        let mut vars: Vec<u32> = Vec::new();
        while vars.len() < 3 {
            let v = next(n) + 1;
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        for v in vars {
            let sign = if next(2) == 0 { "-" } else { "" };
            text.push_str(&format!("{sign}{v} "));
        }
        text.push_str("0\n");
    }
    text
}

fn temp_path(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tdcount-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn documented_examples() {
    let out = tdcount(&["--mode", "mc"], "p cnf 2 1\n1 2 0\n");
    assert!(out.status.success());
    assert!(stdout(&out).ends_with("c s exact arb int 3\n"));

    let out = tdcount(&[], "p cnf 1 1\nc p weight 1 0.3 0\nc p weight -1 0.7 0\n1 0\n");
    let (kind, status, log10, value) = parse_block(&stdout(&out));
    assert_eq!((kind.as_str(), status.as_str()), ("wmc", "SATISFIABLE"));
    assert!(log10.unwrap().starts_with("-0.5228787"));
    assert_eq!(value.unwrap(), "0.3");

    let out = tdcount(&[], "p cnf 1 2\n1 0\n-1 0\n");
    assert_eq!(
        parse_block(&stdout(&out)),
        ("mc".into(), "UNSATISFIABLE".into(), Some("-inf".into()), Some("0".into()))
    );
}

#[test]
fn log_lines_precede_the_block() {
    let text = stdout(&tdcount(&[], &random_cnf(1, 12, 30)));
    let first_block = text.lines().position(|l| l.starts_with("c s ")).unwrap();
    assert!(text.lines().take(first_block).all(|l| l.starts_with("c o ")));
    assert_eq!(text.lines().skip(first_block).count(), 4);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let input = random_cnf(7, 40, 100);
    let a = tdcount(&["--seed", "5"], &input);
    let b = tdcount(&["--seed", "5"], &input);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn options_do_not_change_the_count() {
    let variants: [&[&str]; 6] = [
        &[],
        &["--no-preproc"],
        &["--branching", "base"],
        &["--cache-mb", "1"],
        &["--no-merge-equivalences", "--no-eliminate-defined", "--seed", "9"],
        &["--no-vivify-propagation", "--no-vivify-complete", "--no-sparsify"],
    ];
    for seed in 0..5 {
        let input = random_cnf(seed, 14, 40);
        let path = temp_path(&format!("opt{seed}.cnf"));
        std::fs::write(&path, &input).unwrap();
        let oracle = stdout(&tdcount(&["oracle", path.to_str().unwrap()], ""));
        let expected = oracle.lines().find_map(|l| l.strip_prefix("c s exact arb int ")).map(str::to_string);
        assert!(expected.is_some());
        for args in variants {
            let got = parse_block(&stdout(&tdcount(args, &input))).3;
            assert_eq!(got, expected, "seed {seed}, args {args:?}");
        }
    }
}

#[test]
fn input_errors_exit_with_one() {
    assert_eq!(tdcount(&["--bogus"], "").status.code(), Some(1));
    assert_eq!(tdcount(&[], "p cnf 2 1\n1 3 0\n").status.code(), Some(1));
    assert_eq!(tdcount(&["/no/such/file.cnf"], "").status.code(), Some(1));
    let td = temp_path("bad.td");
    std::fs::write(&td, "s td 1 1 2\nb 1 1\n").unwrap();
    let out = tdcount(&["--td-import", td.to_str().unwrap()], "p cnf 2 1\n1 2 0\n");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn timeout_prints_unknown_and_exits_with_two() {
    let out = tdcount(&["--timeout", "0.5", "--no-preproc"], &random_cnf(3, 300, 600));
    assert_eq!(out.status.code(), Some(2));
    let (kind, status, log10, value) = parse_block(&stdout(&out));
    assert_eq!((kind.as_str(), status.as_str()), ("mc", "UNKNOWN"));
    assert!(log10.is_none() && value.is_none());
}

#[test]
fn imported_decomposition_is_used() {
    let td = temp_path("path.td");
    std::fs::write(&td, "s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n").unwrap();
    let out = tdcount(&["--td-import", td.to_str().unwrap()], "p cnf 3 2\n1 2 0\n2 3 0\n");
    assert!(out.status.success());
    assert!(stdout(&out).ends_with("c s exact arb int 5\n"));
}

#[test]
fn preprocessed_formula_is_written() {
    let path = temp_path("pp.cnf");
    let out = tdcount(&["--preproc-out", path.to_str().unwrap()], "p cnf 3 2\n2 0\n1 3 0\n");
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("c t pp-multiplier 1\n"));
    assert!(text.contains("c t pp-map 3 2\n"));
}
