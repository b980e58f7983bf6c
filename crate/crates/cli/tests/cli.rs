use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn ramsey(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ramsey"))
        .args(args)
        .output()
        .expect("binary runs")
}

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, value: &Value) -> String {
        let path = self.path(name);
        fs::write(&path, value.to_string()).unwrap();
        path.to_str().unwrap().to_string()
    }

    fn chain(&self, n: usize) -> String {
        self.write(
            &format!("chain{n}.json"),
            &json!({"kind": "rel", "signature": [], "size": n, "relations": {}}),
        )
    }

    fn out(&self, name: &str) -> String {
        self.path(name).to_str().unwrap().to_string()
    }
}

fn read(path: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn check(path: &str) -> (Option<i32>, Value) {
    let o = ramsey(&["check", path]);
    (
        o.status.code(),
        serde_json::from_slice(&o.stdout).unwrap_or(Value::Null),
    )
}

#[test]
fn verify_exit_codes() {
    let ws = Workspace::new();
    let (c1, c2, c3) = (ws.chain(1), ws.chain(2), ws.chain(3));
    assert_eq!(
        ramsey(&["verify", &c1, &c2, &c3, "--k", "2"]).status.code(),
        Some(0)
    );

    let report = ws.out("refuted.json");
    let o = ramsey(&["verify", &c1, &c2, &c2, "--k", "2", "--out", &report]);
    assert_eq!(o.status.code(), Some(1));
    let v = read(&report);
    assert_eq!(v["construction"]["verdict"], "refuted");
    assert_eq!(v["construction"]["coloring"], json!([1, 2]));

    let bad = ws.path("bad.json");
    fs::write(&bad, "{not json").unwrap();
    let o = ramsey(&["verify", bad.to_str().unwrap(), &c2, &c3]);
    assert_eq!(o.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "parse");

    let missing = ws.out("missing.json");
    assert_eq!(
        ramsey(&["verify", &missing, &c2, &c3]).status.code(),
        Some(3)
    );
}

#[test]
fn verify_budget_exit() {
    let ws = Workspace::new();
    let (c2, c3, c6) = (ws.chain(2), ws.chain(3), ws.chain(6));
    let o = ramsey(&["verify", &c2, &c3, &c6, "--cap-nodes", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verification"], "budget-exceeded");
}

#[test]
fn usage_errors() {
    assert_eq!(ramsey(&["transfer", "nope"]).status.code(), Some(4));
    assert_eq!(ramsey(&["verify"]).status.code(), Some(4));
    assert_eq!(ramsey(&["frobnicate"]).status.code(), Some(4));
    assert_eq!(ramsey(&["--help"]).status.code(), Some(0));
}

#[test]
fn dagger_certificate_inverts() {
    let ws = Workspace::new();
    let a = ws.write(
        "pair.json",
        &json!({"kind": "rel", "signature": [{"name": "R", "arity": 2}], "size": 2, "relations": {"R": [[2, 1]]}}),
    );
    let out = ws.out("dagger.json");
    assert_eq!(
        ramsey(&["transfer", "dagger", "--a", &a, "--out", &out])
            .status
            .code(),
        Some(0)
    );
    let cert = read(&out);
    assert_eq!(cert["construction"]["star_hash"], cert["inputs"]["a"]);
    assert_eq!(check(&out).0, Some(0));

    let star_in = ws.write("dagger_out.json", &cert["construction"]["output"]);
    let star_out = ws.out("star.json");
    assert_eq!(
        ramsey(&["transfer", "star", "--b", &star_in, "--out", &star_out])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        read(&star_out)["construction"]["output"],
        cert["construction"]["input"]["a"]
    );
    assert_eq!(check(&star_out).0, Some(0));
}

#[test]
fn pipeline_certificate() {
    let ws = Workspace::new();
    let (c1, c2) = (ws.chain(1), ws.chain(2));
    let out = ws.out("pipeline.json");
    let o = ramsey(&[
        "transfer", "pipeline", "--a", &c1, "--b", &c2, "--k", "2", "--out", &out,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let cert = read(&out);
    let trace = &cert["construction"]["trace"];
    assert_eq!(trace["outcome"]["witness"]["size"], 3);
    assert_eq!(
        trace["stages"].as_array().unwrap().last().unwrap()["stage"],
        "direct-check"
    );
    assert_eq!(cert["verification"], "exhaustive");
    assert_eq!(check(&out).0, Some(0));
}

#[test]
fn pipeline_budget_is_reported() {
    let ws = Workspace::new();
    let point = ws.write(
        "point.json",
        &json!({"kind": "rel", "signature": [{"name": "E", "arity": 2}], "size": 1, "relations": {"E": []}}),
    );
    let edge = ws.write(
        "edge.json",
        &json!({"kind": "rel", "signature": [{"name": "E", "arity": 2}], "size": 2, "relations": {"E": [[1, 2]]}}),
    );
    let out = ws.out("budget.json");
    let o = ramsey(&[
        "transfer",
        "pipeline",
        "--a",
        &point,
        "--b",
        &edge,
        "--k",
        "2",
        "--cap-nodes",
        "10000",
        "--out",
        &out,
    ]);
    assert_eq!(o.status.code(), Some(2));
    let cert = read(&out);
    assert_eq!(cert["verification"], "budget-exceeded");
    assert!(
        cert["construction"]["trace"]["outcome"]["budget_exceeded"]["stage"]
            .as_str()
            .unwrap()
            .starts_with("gr-search")
    );
}

#[test]
fn tampered_certificates() {
    let ws = Workspace::new();
    let (c1, c2) = (ws.chain(1), ws.chain(2));
    let out = ws.out("refuted.json");
    ramsey(&["verify", &c1, &c2, &c2, "--out", &out]);
    assert_eq!(check(&out).0, Some(0));

    let mut cert = read(&out);
    cert["construction"]["coloring"][1] = json!(1);
    let flipped = ws.write("flipped.json", &cert);
    let (code, report) = check(&flipped);
    assert_eq!(code, Some(1));
    assert_eq!(report["claim"], "construction.coloring");

    let mut cert = read(&out);
    cert["seed"] = json!(7);
    let reseeded = ws.write("reseeded.json", &cert);
    assert_eq!(check(&reseeded).0, Some(1));

    let garbage = ws.write("garbage.json", &json!({"stage": "verify"}));
    assert_eq!(check(&garbage).0, Some(3));
}

#[test]
fn exhaustive_claim_beyond_caps() {
    let ws = Workspace::new();
    let (c1, c2, c3) = (ws.chain(1), ws.chain(2), ws.chain(3));
    let factors = ws.write(
        "factors.json",
        &json!([
            {"a": read(&c1), "b": read(&c2), "c": read(&c3)},
            {"a": read(&c1), "b": read(&c1), "c": read(&c1)},
        ]),
    );
    let out = ws.out("product.json");
    assert_eq!(
        ramsey(&[
            "transfer",
            "product",
            "--factors",
            &factors,
            "--k",
            "2",
            "--out",
            &out
        ])
        .status
        .code(),
        Some(0)
    );
    let mut cert = read(&out);
    assert_eq!(cert["verification"], "exhaustive");
    assert_eq!(check(&out).0, Some(0));
    cert["config"]["max_exhaustive"] = json!(4);
    let capped = ws.write("capped.json", &cert);
    let (code, report) = check(&capped);
    assert_eq!(code, Some(2));
    assert_eq!(report["result"], "unreplayable");
}

#[test]
fn word_stages_replay() {
    let ws = Workspace::new();
    let vertex = json!({"kind": "hypergraph", "b": 2, "size": 1, "edges": []});
    let edge = json!({"kind": "hypergraph", "b": 2, "size": 2, "edges": [[1, 2]]});
    let h = ws.write("edge.json", &edge);
    let out = ws.out("phi.json");
    let o = ramsey(&[
        "transfer",
        "phi",
        "--h",
        &h,
        "--u",
        "x1 0 x2 x3",
        "--out",
        &out,
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(read(&out)["construction"]["n"], 4);
    assert_eq!(check(&out).0, Some(0));

    let input = ws.write(
        "lift.json",
        &json!({"a": edge, "b": vertex, "f": {"map": [2], "codomain": 2}}),
    );
    let out = ws.out("lift_cert.json");
    let o = ramsey(&["transfer", "lift", "--input", &input, "--out", &out]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let cert = read(&out);
    // downsets {1}, {2}, {1,2} pull back along 1 ↦ 2 to ∅, {1}, {1}
    assert_eq!(cert["construction"]["word"], "0 x1 x1");
    assert_eq!(check(&out).0, Some(0));
}

#[test]
fn lift_rejects_non_embedding() {
    let ws = Workspace::new();
    let edge = json!({"kind": "hypergraph", "b": 2, "size": 2, "edges": [[1, 2]]});
    let two = json!({"kind": "hypergraph", "b": 2, "size": 2, "edges": []});
    let input = ws.write(
        "lift.json",
        &json!({"a": edge, "b": two, "f": {"map": [1, 2], "codomain": 2}}),
    );
    let o = ramsey(&["transfer", "lift", "--input", &input]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "construction");
}

#[test]
fn closure_and_sigma_stages_replay() {
    let ws = Workspace::new();
    let sig = json!([{"name": "E", "arity": 2}, {"name": "F", "arity": 2}]);
    let point = ws.write(
        "point.json",
        &json!({"kind": "rel", "signature": sig, "size": 1, "relations": {}}),
    );
    let edge = ws.write(
        "edge.json",
        &json!({"kind": "rel", "signature": sig, "size": 2, "relations": {"E": [[1, 2]], "F": [[1, 2]]}}),
    );
    let out = ws.out("sigma.json");
    assert_eq!(
        ramsey(&[
            "transfer",
            "sigma-reduce",
            "--a",
            &point,
            "--b",
            &edge,
            "--out",
            &out
        ])
        .status
        .code(),
        Some(0)
    );
    let cert = read(&out);
    assert_eq!(cert["construction"]["sigma"], json!([["E", 2]]));
    assert_eq!(cert["construction"]["remap"], json!([["F", "E"]]));
    assert_eq!(check(&out).0, Some(0));

    let single = json!([{"name": "E", "arity": 2}]);
    let a = ws.write(
        "a.json",
        &json!({"kind": "rel", "signature": single, "size": 1, "relations": {}}),
    );
    let b = ws.write(
        "b.json",
        &json!({"kind": "rel", "signature": single, "size": 1, "relations": {}}),
    );
    let apex = ws.write(
        "apex.json",
        &json!({"kind": "rel", "signature": single, "size": 3, "relations": {}}),
    );
    let out = ws.out("closure.json");
    let o = ramsey(&[
        "transfer", "closure", "--a", &a, "--b", &b, "--apex", &apex, "--k", "2", "--out", &out,
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let cert = read(&out);
    assert!(ramsey_core::cert::closure_legs_embed(&cert).unwrap());
    assert_eq!(check(&out).0, Some(0));
}

#[test]
fn outputs_are_canonical() {
    let ws = Workspace::new();
    let messy = ws.path("messy.json");
    fs::write(
        &messy,
        r#"{ "size": 2, "relations": {"R": [[2,1],[1,2]]}, "signature": [{"arity":2,"name":"R"}], "kind":"rel" }"#,
    )
    .unwrap();
    let out = ws.out("dagger.json");
    ramsey(&[
        "transfer",
        "dagger",
        "--a",
        messy.to_str().unwrap(),
        "--out",
        &out,
    ]);
    let bytes = fs::read_to_string(&out).unwrap();
    let reparsed: Value = serde_json::from_str(&bytes).unwrap();
    assert_eq!(
        ramsey_core::canon::to_canonical_string(&reparsed) + "\n",
        bytes
    );
    let structure = &reparsed["construction"]["output"];
    let again = ramsey_core::ordstruct::json::parse_structure(structure).unwrap();
    assert_eq!(&ramsey_core::ordstruct::json::to_value(&again), structure);
}
