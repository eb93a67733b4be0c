use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finegraph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("each line is JSON"))
        .collect()
}

#[test]
fn analyze_tree_passes_with_zero_delta() {
    let out = run(&["analyze", "--graph", &data("tree.json")]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let recs = records(&out);
    let delta = recs
        .iter()
        .find(|r| r["assertion"] == "hyperbolicity-estimate")
        .unwrap();
    assert_eq!(delta["witness"]["estimate"]["delta-doubled"], 0);
    assert!(recs.iter().all(|r| r["verdict"] == "pass"));
}

#[test]
fn coned_off_free_group_certifies_qi() {
    let out = run(&[
        "certify",
        "--lemma",
        "qi53",
        "--group",
        &data("f2.json"),
        "--gens",
        "b",
    ]);
    assert_eq!(code(&out), 0);
    let recs = records(&out);
    assert_eq!(recs.len(), 3);
    let x = recs[1]["witness"]["x"].as_array().unwrap();
    assert!(x.contains(&Value::from("b")) && x.contains(&Value::from("b^-1")));
}

#[test]
fn free_abelian_fineness_is_inconclusive() {
    let out = run(&[
        "analyze",
        "--group",
        &data("z2.json"),
        "--gens",
        "y",
        "--fineness",
        "--window",
        "4",
    ]);
    assert_eq!(code(&out), 2);
    let probes: Vec<Value> = records(&out)
        .into_iter()
        .filter(|r| r["assertion"] == "fineness-probe")
        .collect();
    assert!(!probes.is_empty());
    assert!(probes.iter().all(|r| r["verdict"] == "window-inconclusive"));
}

#[test]
fn free_group_fineness_is_stable() {
    let out = run(&[
        "analyze",
        "--group",
        &data("f2.json"),
        "--gens",
        "b",
        "--fineness",
        "--vertex",
        "H",
        "--window",
        "4",
    ]);
    assert_eq!(code(&out), 0);
}

#[test]
fn malformed_inputs_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind": "free", "generators": ["a"], "extra": 1}"#).unwrap();
    assert_eq!(
        code(&run(&["analyze", "--group", bad.to_str().unwrap()])),
        3
    );
    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(
        code(&run(&["analyze", "--graph", bad.to_str().unwrap()])),
        3
    );
    std::fs::write(&bad, r#"{"vertices": ["a"], "edges": [["a", "z"]]}"#).unwrap();
    assert_eq!(
        code(&run(&["analyze", "--graph", bad.to_str().unwrap()])),
        3
    );
    assert_eq!(
        code(&run(&[
            "analyze",
            "--window",
            "0",
            "--graph",
            &data("tree.json")
        ])),
        3
    );
    assert_eq!(code(&run(&["certify", "--lemma", "nonsense"])), 3);
    assert_eq!(
        code(&run(&[
            "hat-distance",
            "--group",
            &data("f2.json"),
            "--from",
            "c",
            "--to",
            "e"
        ])),
        3
    );
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let args = |name: &str| {
        vec![
            "certify".to_string(),
            "--lemma".into(),
            "wz".into(),
            "--group".into(),
            data("s3.json"),
            "--gens".into(),
            "s".into(),
            "--out".into(),
            dir.path().join(name).to_string_lossy().into_owned(),
        ]
    };
    for name in ["one", "two"] {
        let a = args(name);
        let out = run(&a.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(code(&out), 0);
    }
    let one = std::fs::read(dir.path().join("one")).unwrap();
    let two = std::fs::read(dir.path().join("two")).unwrap();
    assert!(!one.is_empty());
    assert_eq!(one, two);
}

#[test]
fn escaping_certificate_depends_only_on_seed() {
    let a = run(&[
        "certify",
        "--lemma",
        "escaping",
        "--samples",
        "4",
        "--seed",
        "9",
    ]);
    let b = run(&[
        "certify",
        "--lemma",
        "escaping",
        "--samples",
        "4",
        "--seed",
        "9",
    ]);
    let c = run(&[
        "certify",
        "--lemma",
        "escaping",
        "--samples",
        "4",
        "--seed",
        "10",
    ]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn build_thicken_extract_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let coned = dir.path().join("coned.json");
    let thick = dir.path().join("thick.json");
    let s3 = data("s3.json");
    let out = run(&[
        "build-coned-off",
        "--group",
        &s3,
        "--gens",
        "s",
        "--out",
        coned.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let out = run(&[
        "thicken",
        "--group",
        &s3,
        "--graph",
        coned.to_str().unwrap(),
        "--gens",
        "s",
        "--out",
        thick.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&[
        "extract-x",
        "--group",
        &s3,
        "--graph",
        thick.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let rec = &records(&out)[0];
    let xs: Vec<&str> = rec["witness"]["x"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["element"].as_str().unwrap())
        .collect();
    // The generator outside H, plus H itself (e and the two 3-cycles).
    assert_eq!(xs, ["e", "(1 2)", "(1 2 3)", "(1 3 2)"]);
}

#[test]
fn attaching_a_diagonal_adds_one_edge() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sq.json");
    let out = run(&[
        "attach",
        "--graph",
        &data("square.json"),
        "--u",
        "p",
        "--v",
        "r",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let g: Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    assert_eq!(g["edges"].as_array().unwrap().len(), 5);
}

#[test]
fn hat_distance_in_a_finite_group_is_finite() {
    let out = run(&[
        "hat-distance",
        "--group",
        &data("s3.json"),
        "--gens",
        "s",
        "--from",
        "e",
        "--to",
        "(1 2 3)",
    ]);
    assert_eq!(code(&out), 0);
    let rec = &records(&out)[0];
    assert!(rec["witness"]["value"].is_u64(), "{rec}");
}

#[test]
fn alpha_certificate_on_the_free_product() {
    let out = run(&[
        "certify",
        "--lemma",
        "alpha",
        "--group",
        &data("z2_free_z3.json"),
        "--gens",
        "a",
        "--u",
        "e",
        "--v",
        "ab",
        "--window",
        "3",
    ]);
    assert!(
        matches!(code(&out), 0 | 2),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    assert!(records(&out).iter().all(|r| r["verdict"] != "fail"));
}
