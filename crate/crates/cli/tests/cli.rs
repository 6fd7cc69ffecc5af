use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn lotus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lotus")).args(args).output().unwrap()
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).to_string_lossy().into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn text_report() {
    let o = lotus(&["invariants", &fixture("branch.steps")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("semigroup (6, 9, 22)"), "{text}");
    assert!(text.contains("delta 24  milnor 48"), "{text}");
}

#[test]
fn exports() {
    let cusp = fixture("cusp.steps");
    let tikz = stdout(&lotus(&["export", &cusp, "--format", "tikz"]));
    assert_eq!(tikz.matches("\\fill[pink!60").count(), 3);
    let dual = stdout(&lotus(&["export", &cusp, "--format", "dot", "--graph", "dual"]));
    assert!(dual.starts_with("graph dual"));
    assert_eq!(dual.matches("weight=").count(), 3);
    let prox = stdout(&lotus(&["export", &cusp, "--format", "dot", "--graph", "proximity"]));
    assert_eq!(prox.matches("->").count(), 3);
    let tree = stdout(&lotus(&["export", &fixture("three-branch.series"), "--format", "dot", "--graph", "tree"]));
    assert!(tree.contains("29/12"));
}

#[test]
fn build_writes_every_decomposition() {
    let out = scratch("build-all");
    let o = lotus(&[
        "build",
        &fixture("three-branch.tree.json"),
        "--trunks",
        "all",
        "--format",
        "svg",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["lotus-0.json", "lotus-0.svg", "lotus-1.json", "lotus-1.svg", "tree.json"] {
        assert!(out.join(name).exists(), "{name} missing");
    }
    // a written lotus reads back with the same report
    let back = lotus(&["invariants", out.join("lotus-0.json").to_str().unwrap(), "--check"]);
    assert_eq!(back.status.code(), Some(0));
    let direct = lotus(&["invariants", &fixture("three-branch.steps"), "--check"]);
    assert_eq!(stdout(&back), stdout(&direct));
}

#[test]
fn trunk_index_selects_a_decomposition() {
    let tree = fixture("three-branch.tree.json");
    let a = stdout(&lotus(&["invariants", &tree, "--trunks", "index", "1", "--format", "json"]));
    let b = stdout(&lotus(&["invariants", &tree, "--trunks", "index:1", "--format", "json"]));
    assert_eq!(a, b);
    assert_eq!(lotus(&["invariants", &tree, "--trunks", "index", "2"]).status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let dir = scratch("exit-codes");
    let steps = dir.join("bad.steps");
    fs::write(&steps, "lotus L L1\npetal L X\n").unwrap();
    let o = lotus(&["invariants", steps.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.steps:2:"));

    let series = dir.join("bad.series");
    fs::write(&series, "char 0\nA = x^(3/2) +\n").unwrap();
    let o = lotus(&["invariants", series.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.series:2:"));

    assert_eq!(lotus(&["invariants", dir.join("missing").to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(lotus(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(lotus(&["export", &fixture("cusp.steps"), "--format", "svg", "--graph", "dual"]).status.code(), Some(1));
}

#[test]
fn incomplete_trees_need_completion() {
    let dir = scratch("incomplete");
    let out = lotus(&["build", &fixture("three-branch.series"), "-o", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    // drop the auxiliary curvetta leaves (the root keeps its own) to get an incomplete tree
    let mut tree: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("tree.json")).unwrap()).unwrap();
    let root = tree["edges"].as_array().unwrap().iter().map(|e| e["from"].as_u64().unwrap()).min().unwrap();
    let aux: Vec<u64> = tree["leaves"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|l| l["aux"].as_bool() == Some(true) && l["id"].as_u64() != Some(root))
        .map(|l| l["id"].as_u64().unwrap())
        .collect();
    assert_eq!(aux.len(), 3);
    let keep = |v: &serde_json::Value, key: &str| !aux.contains(&v[key].as_u64().unwrap());
    tree["leaves"].as_array_mut().unwrap().retain(|l| keep(l, "id"));
    tree["nodes"].as_array_mut().unwrap().retain(|n| keep(n, "id"));
    tree["edges"].as_array_mut().unwrap().retain(|e| keep(e, "to"));
    let path = dir.join("incomplete.json");
    fs::write(&path, serde_json::to_string(&tree).unwrap()).unwrap();
    assert_eq!(lotus(&["invariants", path.to_str().unwrap()]).status.code(), Some(1));
    let o = lotus(&["invariants", path.to_str().unwrap(), "--complete", "--check"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("delta 339  milnor 676"));
}
