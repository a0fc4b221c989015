use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn running() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/running_example.txt")
}

fn script(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/scripts").join(name)
}

fn relctl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relctl")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = relctl(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn code(args: &[&str]) -> i32 {
    relctl(args).status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn winners_on_running_example() {
    let f = running();
    let text = ok(&["winners", path(&f)]);
    assert!(text.starts_with("winner: a\n"));
    assert!(text.contains("  a .1111111\n"));
    assert!(text.ends_with("uncovered: a\n"));
    let v = json(&["winners", path(&f), "--json"]);
    assert_eq!(v["winner"], "a");
    assert_eq!(v["uncovered"], serde_json::json!(["a"]));
    assert_eq!(v["dominance"][0].as_array().unwrap().iter().filter(|b| **b == true).count(), 7);
}

#[test]
fn winners_without_voters() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("e.txt");
    std::fs::write(&f, "alternatives: x y z\n").unwrap();
    let v = json(&["winners", path(&f), "--json"]);
    assert_eq!(v["winner"], Value::Null);
    assert_eq!(v["uncovered"], serde_json::json!(["x", "y", "z"]));
}

#[test]
fn control_examples() {
    let f = running();
    let b = json(&["control", path(&f), "--target", "b", "--rule", "condorcet", "--json"]);
    assert_eq!((b["min_deletions"].as_u64(), b["num_optimal"].as_str()), (Some(8), Some("45")));
    assert_eq!(b["solutions"].as_array().unwrap().len(), 10);
    assert_eq!(b["truncated"], true);
    assert_eq!(b["solutions"][0]["delete"], serde_json::json!([1, 2, 3, 4, 5, 6, 10, 11]));

    let g = json(&["control", path(&f), "--target", "g", "--rule", "uncovered", "--json"]);
    assert_eq!((g["min_deletions"].as_u64(), g["num_optimal"].as_str()), (Some(5), Some("15")));

    let out = relctl(&["control", path(&f), "--target", "c", "--rule", "condorcet", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let c: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(c["feasible"], false);

    let text = ok(&["control", path(&f), "--target", "b", "--rule", "condorcet", "--enumerate", "1"]);
    assert!(text.contains("minimum deletions: 8"));
    assert!(text.contains("delete 1,2,3,4,5,6,10,11"));
}

#[test]
fn oracle_and_symbolic_json_agree() {
    let f = running();
    for rule in ["condorcet", "uncovered"] {
        for t in ["a", "b", "c", "d", "e", "f", "g", "h"] {
            let args = ["control", path(&f), "--target", t, "--rule", rule, "--json", "--enumerate", "200"];
            let mut sym = json(&args);
            let mut with_oracle = args.to_vec();
            with_oracle.push("--oracle");
            let mut ora = json(&with_oracle);
            assert_eq!(sym["backend"], "symbolic");
            assert_eq!(ora["backend"], "oracle");
            sym.as_object_mut().unwrap().remove("backend");
            ora.as_object_mut().unwrap().remove("backend");
            assert_eq!(sym, ora, "{t} {rule}");
        }
    }
}

#[test]
fn oracle_cap_comes_from_the_environment() {
    let f = running();
    let out = Command::new(env!("CARGO_BIN_EXE_relctl"))
        .args(["control", path(&f), "--target", "a", "--rule", "condorcet", "--oracle"])
        .env("RELCTL_ORACLE_CAP", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap of 5"));
}

#[test]
fn output_is_deterministic() {
    let f = running();
    let args = ["control", path(&f), "--target", "h", "--rule", "uncovered", "--json", "--enumerate", "50"];
    assert_eq!(ok(&args), ok(&args));
    assert_eq!(ok(&["winners", path(&f)]), ok(&["winners", path(&f)]));
}

#[test]
fn check_examples() {
    let f = running();
    let text = ok(&["check", path(&f), "--target", "e", "--rule", "uncovered", "--delete", "1,2,4,5,6"]);
    assert!(text.starts_with("target e wins under uncovered: true\n"));
    assert!(text.ends_with("uncovered: a e f h\n"));
    let v = json(&["check", path(&f), "--target", "a", "--rule", "condorcet", "--json"]);
    assert_eq!(v["wins"], true);
    let all = (1..=13).map(|i| i.to_string()).collect::<Vec<_>>().join(",");
    let v = json(&["check", path(&f), "--target", "a", "--rule", "condorcet", "--delete", &all, "--json"]);
    assert_eq!(v["wins"], false);
    assert_eq!(code(&["check", path(&f), "--target", "a", "--rule", "condorcet", "--delete", "14"]), 1);
    assert_eq!(code(&["check", path(&f), "--target", "a", "--rule", "condorcet", "--delete", "0"]), 1);
}

#[test]
fn eval_examples() {
    let f = running();
    let dir = tempfile::tempdir().unwrap();
    let id = dir.path().join("id.ra");
    std::fs::write(&id, "eval I[A]\n").unwrap();
    let text = ok(&["eval", path(&id), "--election", path(&f)]);
    let rows: Vec<&str> = text.lines().skip(3).collect();
    assert_eq!(rows.len(), 8);
    for (i, r) in rows.iter().enumerate() {
        let bits: String = (0..8).map(|j| if i == j { '1' } else { '.' }).collect();
        assert!(r.ends_with(&bits));
    }

    let c = ok(&["eval", path(&script("cv1.ra")), "--election", path(&f)]);
    assert!(c.contains("a .1111111\n"));

    let sol = json(&["eval", path(&script("cv5.ra")), "--election", path(&f), "--target", "e", "--json"]);
    let solved = json(&["control", path(&f), "--target", "e", "--rule", "uncovered", "--json"]);
    assert_eq!(sol["entries"], solved["num_optimal"]);
    assert_eq!(sol["type"], "pow N <-> unit");

    let dot = ok(&["eval", path(&id), "--election", path(&f), "--dot"]);
    assert!(dot.starts_with("digraph"));
}

#[test]
fn exit_codes() {
    let f = running();
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "alternatives: a b\na c\n").unwrap();
    assert_eq!(code(&["winners", path(&bad)]), 2);
    assert_eq!(code(&["control", path(&bad), "--target", "a", "--rule", "condorcet"]), 2);

    assert_eq!(code(&["control", path(&f), "--target", "a", "--rule", "plurality"]), 1);
    assert_eq!(code(&["control", path(&f), "--target", "z", "--rule", "condorcet"]), 1);
    assert_eq!(code(&["control", path(&f), "--rule", "condorcet"]), 1);
    assert_eq!(code(&["nonsense"]), 1);
    assert_eq!(code(&["winners", "/nonexistent/file"]), 1);
    assert_eq!(code(&["--help"]), 0);

    let syntax = dir.path().join("s.ra");
    std::fs::write(&syntax, "let = P;\neval P").unwrap();
    assert_eq!(code(&["eval", path(&syntax), "--election", path(&f)]), 2);
    let types = dir.path().join("t.ra");
    std::fs::write(&types, "eval P | I[A]").unwrap();
    assert_eq!(code(&["eval", path(&types), "--election", path(&f)]), 3);
    let err = relctl(&["eval", path(&types), "--election", path(&f)]);
    assert!(String::from_utf8_lossy(&err.stderr).contains("line 1, column"));
}

#[test]
fn reduction_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.json");
    let e = dir.path().join("e.txt");
    ok(&["gen-x4c", "--n", "16", "--seed", "1", "--out", path(&x)]);
    let text = ok(&["reduce", path(&x), "--out", path(&e), "--audit"]);
    assert!(text.contains("77 voters"));
    assert!(text.contains("budget 4"));
    assert!(text.contains("\"deviations\": []"));
    let layout: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("e.txt.layout.json")).unwrap()).unwrap();
    assert_eq!(layout["budget"], 4);
    assert_eq!(layout["target"], "astar");
    assert_eq!(layout["voters"].as_array().unwrap().len(), 77);

    let election = std::fs::read_to_string(&e).unwrap();
    assert!(election.starts_with("alternatives: astar s1"));
    let w = json(&["winners", path(&e), "--json"]);
    assert!(!w["uncovered"].as_array().unwrap().contains(&"astar".into()));

    assert_eq!(ok(&["gen-x4c", "--n", "16", "--seed", "1"]), std::fs::read_to_string(&x).unwrap());
    assert_eq!(code(&["gen-x4c", "--n", "10"]), 1);
    ok(&["gen-x4c", "--n", "20", "--random", "--seed", "2"]);
}

#[test]
fn invalid_instances_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.json");
    std::fs::write(&x, r#"{"n": 16, "sets": [[1, 2, 3, 3]]}"#).unwrap();
    let out = relctl(&["reduce", path(&x), "--out", path(&dir.path().join("e.txt"))]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("lists element 3 twice"));
    assert!(err.contains("expected 12"));
}

#[test]
fn one_in_three_translation() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("s.json");
    let x = dir.path().join("x.json");
    ok(&["gen-x4c", "--n", "16", "--seed", "5", "--out", path(&x)]);
    let inst: Value = serde_json::from_str(&std::fs::read_to_string(&x).unwrap()).unwrap();
    let sets = inst["sets"].as_array().unwrap();
    // dual instance: one variable per set, one clause per element
    let mut clauses = vec![Vec::new(); 16];
    for (k, s) in sets.iter().enumerate() {
        for e in s.as_array().unwrap() {
            clauses[e.as_u64().unwrap() as usize - 1].push(k + 1);
        }
    }
    let sat = serde_json::json!({ "vars": sets.len(), "clauses": clauses });
    std::fs::write(&f, sat.to_string()).unwrap();
    let back = json(&["reduce-1in3", path(&f)]);
    assert_eq!(back, inst);

    std::fs::write(&f, r#"{"vars": 3, "clauses": [[1, 2, 2]]}"#).unwrap();
    assert_eq!(code(&["reduce-1in3", path(&f)]), 1);
}
