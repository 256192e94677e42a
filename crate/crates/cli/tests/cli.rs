use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const GLOVE: &str = r#"{ "players": ["1", "2", "3"], "mode": "rational",
  "values": { "[0,1]": "1", "[0,2]": "1", "[0,1,2]": "1" } }"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hodgeshap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn glove(dir: &Path) -> String {
    write(dir, "glove.json", GLOVE).display().to_string()
}

#[test]
fn decompose_prints_the_unweighted_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["decompose", "--game", &glove(dir.path())]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("{1}      0   5/12  -5/24  -5/24"), "{text}");
    assert!(text.ends_with("allocation v_i(N): (2/3, 1/6, 1/6)\n"));
}

#[test]
fn shapley_methods_agree_on_the_full_cube() {
    let dir = tempfile::tempdir().unwrap();
    let game = glove(dir.path());
    for method in ["direct", "permutation", "hodge", "precedence"] {
        let out = run(&["shapley", "--game", &game, "--method", method]);
        assert_eq!(stdout(&out), "(2/3, 1/6, 1/6)\n", "{method}");
    }
}

#[test]
fn weight_shortcuts() {
    let dir = tempfile::tempdir().unwrap();
    let game = glove(dir.path());
    let out = run(&["decompose", "--game", &game, "--weights", "size-plus-one", "--format", "csv"]);
    assert!(stdout(&out).contains("{1},0,16/31,-8/31,-8/31"));

    let w = write(
        dir.path(),
        "w.json",
        r#"{"kind":"explicit","entries":[{"base":"[]","player":0,"w":"1/2"}]}"#,
    );
    let out = run(&["shapley", "--game", &game, "--weights", &format!("file:{}", w.display())]);
    assert_eq!(stdout(&out), "(13/17, 2/17, 2/17)\n");

    let c = write(dir.path(), "c.json", r#"{"removed_coalitions":["[1]"]}"#);
    let c = c.display().to_string();
    let out = run(&["shapley", "--game", &game, "--constraints", &c, "--weights", "degree-product"]);
    assert_eq!(stdout(&out), "(1/2, 1/4, 1/4)\n");
    let out = run(&["shapley", "--game", &game, "--constraints", &c, "--weights", "constant:3"]);
    assert_eq!(stdout(&out), "(1/2, 3/10, 1/5)\n");
}

#[test]
fn compare_on_restricted_graph() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c.json", r#"{"removed_coalitions":["[1]"]}"#);
    let out = run(&[
        "compare",
        "--game",
        &glove(dir.path()),
        "--constraints",
        &c.display().to_string(),
        "--format",
        "json",
    ]);
    let text = stdout(&out);
    assert!(text.contains("\"hodge\": \"3/10\""), "{text}");
    assert!(text.contains("\"precedence\": \"1/4\""));
}

#[test]
fn verify_and_fixtures_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--game", &glove(dir.path()), "--backend", "dense-float"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().filter(|l| l.starts_with("PASS")).count(), 4);

    let out = run(&["fixtures"]);
    assert!(out.status.success());
    assert!(stdout(&out).ends_with("6/6 tables reproduced\n"));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let game = glove(dir.path());
    let a = run(&["decompose", "--game", &game, "--format", "json"]);
    let b = run(&["decompose", "--game", &game, "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let game = glove(dir.path());

    let bad = write(dir.path(), "bad.json", r#"{"players": ["a"], "mode": "rational", "values": {"[0": "1"}}"#);
    let out = run(&["decompose", "--game", &bad.display().to_string()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("values.[0"));

    let cut = write(dir.path(), "cut.json", r#"{"removed_coalitions":["[0]","[1]","[2]"]}"#);
    let out = run(&["decompose", "--game", &game, "--constraints", &cut.display().to_string()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("coalition"));

    let mut values = String::new();
    for bits in 1..64u32 {
        let members: Vec<String> = (0..6).filter(|k| bits >> k & 1 == 1).map(|k| k.to_string()).collect();
        values.push_str(&format!("\"[{}]\": {}.{},", members.join(","), bits % 7, bits % 5));
    }
    values.pop();
    let six = write(
        dir.path(),
        "six.json",
        &format!(r#"{{"players":["a","b","c","d","e","f"],"mode":"float","values":{{{values}}}}}"#),
    );
    let out = run(&[
        "decompose",
        "--game",
        &six.display().to_string(),
        "--weights",
        "size-plus-one",
        "--max-iters",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("residual"));

    let out = run(&["decompose", "--game", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
}
