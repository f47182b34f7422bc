use std::path::Path;
use std::process::{Command, Output};

fn wnlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wnlab")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const SUMMATION: &str = r#"
seed = 3
output = "out"

[grid]
lower = -4.0
upper = 4.0
log2 = 8

[[experiment]]
id = "sum"
kind = "summation"
decay_alphas = [0.5]
theta = [THETA]
"#;

fn write_config(dir: &Path, theta: &str, extra: &str) -> std::path::PathBuf {
    let path = dir.join("suite.toml");
    let text = format!("{extra}{}", SUMMATION.replace("THETA", theta));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn unit_weight_constants_are_one() {
    let out = wnlab(&["--grid", "8", "constants", "constant:1"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let header = rows.headers().unwrap().clone();
    let col = header.iter().position(|h| h == "a_p").unwrap();
    let mut n = 0;
    for row in rows.records() {
        assert_eq!(row.unwrap()[col].parse::<f64>().unwrap(), 1.0);
        n += 1;
    }
    assert_eq!(n, 3);
}

#[test]
fn transform_emits_json() {
    let out = wnlab(&["--grid", "6", "--format", "json", "transform", "--function", "bump:0:1"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 64);
}

#[test]
fn maximal_and_sparse_run() {
    assert_eq!(code(&wnlab(&["--grid", "6", "maximal", "--operator", "orlicz:llogl:1"])), 0);
    assert_eq!(code(&wnlab(&["--grid", "5", "--format", "json", "sparse", "--dim", "2"])), 0);
}

#[test]
fn verify_passes_and_lists() {
    assert_eq!(code(&wnlab(&["verify", "summation"])), 0);
    let list = wnlab(&["verify", "list"]);
    assert_eq!(code(&list), 0);
    assert!(stdout(&list).contains("two-weight"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&wnlab(&["verify", "no-such-lemma"])), 2);
    assert_eq!(code(&wnlab(&["--scope", "sideways", "verify", "rhi"])), 2);
    assert_eq!(code(&wnlab(&["--grid", "40", "constants", "constant:1"])), 2);
    assert_eq!(code(&wnlab(&["constants", "not-a-weight"])), 2);
    assert_eq!(code(&wnlab(&[])), 2);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "1.0", "");
    let out = wnlab(&["sweep", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("theta"));
}

#[test]
fn failed_assertion_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("tight.toml"),
        "[constants.summation]\nvalue = 0.5\n",
    )
    .unwrap();
    let path = write_config(dir.path(), "0.5", "registry = \"tight.toml\"\n");
    assert_eq!(code(&wnlab(&["sweep", path.to_str().unwrap()])), 1);
}

#[test]
fn nonconvergent_summation_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "1e-18", "");
    assert_eq!(code(&wnlab(&["sweep", path.to_str().unwrap()])), 3);
}

#[test]
fn sweeps_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "0.25, 0.5", "");
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let res = wnlab(&["--out", out.to_str().unwrap(), "sweep", path.to_str().unwrap()]);
        assert_eq!(code(&res), 0);
        outputs.push(std::fs::read(out.join("rows.csv")).unwrap());
    }
    assert!(!outputs[0].is_empty());
    assert_eq!(outputs[0], outputs[1]);
}
