use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }
}

fn finish(out: Output) -> Run {
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn tressec(args: &[&str]) -> Run {
    finish(Command::new(env!("CARGO_BIN_EXE_tressec")).args(args).output().unwrap())
}

fn tressec_stdin(args: &[&str], input: &str) -> Run {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tressec"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    finish(child.wait_with_output().unwrap())
}

struct Files(TempDir);

impl Files {
    fn new() -> Self {
        Files(tempfile::tempdir().unwrap())
    }

    fn write(&self, name: &str, value: &Value) -> String {
        let path: PathBuf = self.0.path().join(name);
        std::fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
        path.to_str().unwrap().to_string()
    }
}

fn envelope(kind: &str, payload: Value) -> Value {
    json!({ "format_version": "1", "kind": kind, "payload": payload })
}

fn p3_tree() -> Value {
    envelope("tree", json!({ "nodes": ["a", "b", "c"], "edges": [["a", "b"], ["b", "c"]] }))
}

fn star_tree() -> Value {
    envelope(
        "tree",
        json!({ "nodes": ["c", "x", "y", "z"], "edges": [["c", "x"], ["c", "y"], ["c", "z"]] }),
    )
}

fn p3_system() -> Value {
    envelope(
        "system",
        json!({ "count": 4, "inv": [1, 0, 3, 2], "le": [[0, 2], [3, 1]],
                "labels": ["(a,b)", "(b,a)", "(b,c)", "(c,b)"] }),
    )
}

fn status(report: &Value, name: &str) -> String {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))["status"]
        .as_str()
        .unwrap()
        .to_string()
}

#[test]
fn validate_p3_system() {
    let files = Files::new();
    let run = tressec(&["validate", &files.write("p3.json", &p3_system())]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let report = run.json();
    assert_eq!(report["valid"], true);
    assert_eq!(report["properties"]["tree_set"], true);
    assert_eq!(status(&report, "involution_order_reversing"), "pass");
}

#[test]
fn validate_names_order_reversal_violation() {
    let files = Files::new();
    let broken = envelope("system", json!({ "count": 4, "inv": [1, 0, 3, 2], "le": [[0, 2]] }));
    let run = tressec(&["validate", &files.write("broken.json", &broken)]);
    assert_eq!(run.code, 1);
    let report = run.json();
    assert_eq!(report["valid"], false);
    assert_eq!(status(&report, "partial_order"), "pass");
    assert_eq!(status(&report, "involution_order_reversing"), "fail");
    assert_eq!(status(&report, "labels"), "skipped");
}

#[test]
fn validate_reports_bad_involution_and_cycles() {
    let files = Files::new();
    let bad = envelope("system", json!({ "count": 3, "inv": [1, 2, 0], "le": [] }));
    let report = tressec(&["validate", &files.write("bad.json", &bad)]);
    assert_eq!(report.code, 1);
    assert_eq!(status(&report.json(), "involution"), "fail");
    let cyclic = envelope("system", json!({ "count": 2, "inv": [1, 0], "le": [[0, 1], [1, 0]] }));
    let report = tressec(&["validate", &files.write("cyclic.json", &cyclic)]);
    assert_eq!(report.code, 1);
    assert_eq!(status(&report.json(), "partial_order"), "fail");
}

#[test]
fn malformed_input_exits_two() {
    assert_eq!(tressec_stdin(&["validate", "-"], "{not json").code, 2);
    let files = Files::new();
    let wrong_shape = envelope("tree", json!({ "nodes": 3 }));
    assert_eq!(tressec(&["validate", &files.write("shape.json", &wrong_shape)]).code, 2);
    let version = json!({ "format_version": "2", "kind": "tree", "payload": {} });
    assert_eq!(tressec(&["validate", &files.write("v2.json", &version)]).code, 2);
    assert_eq!(tressec(&["validate", "/nonexistent/file.json"]).code, 2);
}

#[test]
fn validate_other_kinds() {
    let files = Files::new();
    let run = tressec(&["validate", &files.write("tree.json", &p3_tree())]);
    assert_eq!(run.code, 0);
    assert_eq!(run.json()["properties"]["degree_two_free"], false);
    let cycle = envelope(
        "tree",
        json!({ "nodes": ["a", "b", "c"], "edges": [["a", "b"], ["b", "c"], ["c", "a"]] }),
    );
    let run = tressec(&["validate", &files.write("cycle.json", &cycle)]);
    assert_eq!(run.code, 1);
    assert_eq!(status(&run.json(), "tree"), "fail");
    let order = envelope(
        "order_tree",
        json!({ "elements": ["x", "y", "z"], "lt": [["x", "z"], ["y", "z"]] }),
    );
    let run = tressec(&["validate", &files.write("v.json", &order)]);
    assert_eq!(run.code, 1);
    assert_eq!(status(&run.json(), "order_tree"), "fail");
}

#[test]
fn system_to_tree_on_p3() {
    let files = Files::new();
    let run = tressec(&["convert", &files.write("p3.json", &p3_system()), "--to", "tree"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let out = run.json();
    assert_eq!(out["kind"], "tree");
    assert_eq!(out["payload"]["nodes"].as_array().unwrap().len(), 3);
    assert_eq!(out["payload"]["edges"].as_array().unwrap().len(), 2);
    assert_eq!(out["witness"]["edge_of"].as_object().unwrap().len(), 4);
}

#[test]
fn tree_system_tree_is_isomorphic() {
    let files = Files::new();
    let tree = envelope(
        "tree",
        json!({ "nodes": ["a", "b", "c", "d", "e"], "edges": [["a", "b"], ["b", "c"], ["b", "d"], ["d", "e"]] }),
    );
    let sys = tressec(&["convert", &files.write("t.json", &tree), "--to", "system"]);
    assert_eq!(sys.code, 0);
    let back = tressec(&["convert", &files.write("s.json", &sys.json()), "--to", "tree"]);
    assert_eq!(back.code, 0);
    let back = back.json();
    let mut degrees: Vec<usize> = {
        let nodes: Vec<String> = back["payload"]["nodes"]
            .as_array()
            .unwrap()
            .iter()
            .map(|n| n.as_str().unwrap().into())
            .collect();
        nodes
            .iter()
            .map(|n| {
                back["payload"]["edges"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .filter(|e| e[0] == *n || e[1] == *n)
                    .count()
            })
            .collect()
    };
    degrees.sort_unstable();
    assert_eq!(degrees, vec![1, 1, 1, 2, 3]);
}

#[test]
fn sparse_bipartitions_of_p3_are_not_injective() {
    let files = Files::new();
    let run =
        tressec(&["convert", &files.write("p3.json", &p3_system()), "--to", "bipartitions-sparse"]);
    assert_eq!(run.code, 1);
    let report = run.json();
    assert_eq!(report["error"], "not_injective");
    assert_eq!(report["collisions"][0], json!(["(a,b)", "(b,c)"]));
}

#[test]
fn bipartitions_and_order_tree_targets() {
    let files = Files::new();
    let star = files.write("star.json", &star_tree());
    let run = tressec(&["convert", &star, "--to", "bipartitions"]);
    assert_eq!(run.code, 0);
    let family = run.json();
    assert_eq!(family["kind"], "bipartition_family");
    assert_eq!(family["payload"]["ground"].as_array().unwrap().len(), 4);
    assert_eq!(family["payload"]["pairs"].as_array().unwrap().len(), 6);
    let sparse = tressec(&["convert", &star, "--to", "bipartitions-sparse"]);
    assert_eq!(sparse.code, 0);
    assert_eq!(sparse.json()["payload"]["ground"].as_array().unwrap().len(), 3);

    let p3 = files.write("p3.json", &p3_system());
    assert_eq!(tressec(&["convert", &p3, "--to", "order-tree"]).code, 2);
    let orientation = files.write("o.json", &json!(["(a,b)", "(c,b)"]));
    let run = tressec(&["convert", &p3, "--to", "order-tree", "--orientation", &orientation]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let out = run.json();
    assert_eq!(out["payload"]["elements"], json!(["(b,a)", "(b,c)"]));
    assert_eq!(out["payload"]["lt"], json!([]));
    assert_eq!(out["witness"]["canonization"]["(a,b)"], "(b,a)*");
    let inconsistent = files.write("bad.json", &json!({ "orientation": ["(b,a)", "(b,c)"] }));
    assert_eq!(
        tressec(&["convert", &p3, "--to", "order-tree", "--orientation", &inconsistent]).code,
        1
    );
}

#[test]
fn roundtrip_theorems() {
    let files = Files::new();
    let star = files.write("star.json", &star_tree());
    let p3 = files.write("p3.json", &p3_system());
    for theorem in ["trees-i", "trees-ii", "order-i", "bipartitions", "sparse", "stree"] {
        let run = tressec(&["roundtrip", &star, "--theorem", theorem]);
        assert_eq!(run.code, 0, "{theorem}: {}{}", run.stdout, run.stderr);
        assert_eq!(run.json()["passed"], true);
    }
    let run = tressec(&["roundtrip", &p3, "--theorem", "sparse"]);
    assert_eq!(run.code, 1);
    let report = run.json();
    assert_eq!(report["passed"], false);
    assert_eq!(report["counterexample"]["maximal_two_star"], json!(["(a,b)", "(c,b)"]));
    let generated = tressec(&["generate", "--kind", "tree", "--seed", "9", "--max-size", "10"]);
    let random = files.write("random.json", &generated.json());
    assert_eq!(tressec(&["roundtrip", &random, "--theorem", "trees-ii"]).code, 0);
    let order = tressec(&["generate", "--kind", "order-tree", "--seed", "4"]);
    let order = files.write("order.json", &order.json());
    assert_eq!(tressec(&["roundtrip", &order, "--theorem", "order-ii"]).code, 0);
    assert_eq!(tressec(&["roundtrip", &p3, "--theorem", "trees-ii"]).code, 1);
}

fn stree(alpha: Value) -> Value {
    envelope(
        "stree",
        json!({
            "tree": { "nodes": ["t1", "t2", "t3"], "edges": [["t1", "t2"], ["t2", "t3"]] },
            "alpha": alpha,
            "system": p3_system()["payload"],
        }),
    )
}

#[test]
fn canonicalize_leaves_essential_input_alone() {
    let files = Files::new();
    let input = stree(json!([["t1", "t2", 0], ["t2", "t1", 1], ["t2", "t3", 2], ["t3", "t2", 3]]));
    let run = tressec(&["canonicalize", &files.write("st.json", &input)]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let out = run.json();
    assert_eq!(out["witness"]["log"], json!([]));
    assert_eq!(out["payload"], input["payload"]);
}

#[test]
fn canonicalize_logs_contraction_and_pruning() {
    let files = Files::new();
    let slack = stree(json!([["t1", "t2", 0], ["t2", "t3", 0]]));
    let run = tressec(&["canonicalize", &files.write("slack.json", &slack)]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let log = run.json()["witness"]["log"].clone();
    assert_eq!(log[0]["step"], "contracted");
    assert_eq!(log[0]["node"], "t2");

    let redundant = stree(json!([["t2", "t1", 0], ["t2", "t3", 0]]));
    let run = tressec(&["canonicalize", &files.write("redundant.json", &redundant)]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let out = run.json();
    assert_eq!(out["witness"]["log"][0]["step"], "pruned");
    assert_eq!(out["payload"]["tree"]["nodes"].as_array().unwrap().len(), 2);
}

#[test]
fn canonicalize_deletes_trivial_pendant() {
    let files = Files::new();
    let system = json!({
        "count": 4, "inv": [1, 0, 3, 2], "le": [[2, 0], [2, 1], [0, 3], [1, 3]],
        "labels": ["s", "s*", "r", "r*"],
    });
    let input = envelope(
        "stree",
        json!({
            "tree": { "nodes": ["a", "b", "p"], "edges": [["a", "b"], ["p", "a"]] },
            "alpha": [["a", "b", 0], ["p", "a", 2]],
            "system": system,
        }),
    );
    let run = tressec(&["canonicalize", &files.write("pendant.json", &input)]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let out = run.json();
    let log = out["witness"]["log"].as_array().unwrap();
    assert_eq!(log.len(), 1);
    assert_eq!(log[0]["step"], "deleted");
    assert_eq!(log[0]["tail"], "p");
    assert_eq!(log[0]["label"], "r");
    assert_eq!(out["payload"]["tree"]["nodes"], json!(["a", "b"]));
}

#[test]
fn generate_is_deterministic_and_valid() {
    let files = Files::new();
    for kind in ["system", "tree", "order-tree", "stree", "graph", "tree-decomposition"] {
        let a = tressec(&["generate", "--kind", kind, "--seed", "3", "--max-size", "7"]);
        let b = tressec(&["generate", "--kind", kind, "--seed", "3", "--max-size", "7"]);
        assert_eq!(a.code, 0, "{kind}: {}", a.stderr);
        assert_eq!(a.stdout, b.stdout);
        let path = files.write("generated.json", &a.json());
        let check = tressec(&["validate", &path]);
        assert_eq!(check.code, 0, "{kind}: {}", check.stdout);
    }
}

#[test]
fn decomposition_round_trip_through_cli() {
    let files = Files::new();
    let td = envelope(
        "tree_decomposition",
        json!({
            "graph": { "vertices": ["a", "b", "c", "d"], "edges": [["a", "b"], ["b", "c"], ["c", "d"]] },
            "tree": { "nodes": ["t0", "t1", "t2"], "edges": [["t0", "t1"], ["t1", "t2"]] },
            "parts": { "t0": ["a", "b"], "t1": ["b", "c"], "t2": ["c", "d"] },
        }),
    );
    let path = files.write("td.json", &td);
    let run = tressec(&["convert", &path, "--to", "decomposition"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let mut parts: Vec<Value> =
        run.json()["payload"]["parts"].as_object().unwrap().values().cloned().collect();
    parts.sort_by_key(|p| p.to_string());
    assert_eq!(parts, vec![json!(["a", "b"]), json!(["b", "c"]), json!(["c", "d"])]);

    let sys = tressec(&["convert", &path, "--to", "system"]);
    assert_eq!(sys.code, 0);
    assert_eq!(sys.json()["payload"]["count"], 4);
}

#[test]
fn max_oriented_env_caps_enumeration() {
    let files = Files::new();
    let crossing = envelope("system", json!({ "count": 4, "inv": [1, 0, 3, 2], "le": [] }));
    let path = files.write("crossing.json", &crossing);
    let run = Command::new(env!("CARGO_BIN_EXE_tressec"))
        .args(["roundtrip", &path, "--theorem", "stree"])
        .env("TRESSEC_MAX_ORIENTED", "2")
        .output()
        .unwrap();
    let run = finish(run);
    assert_eq!(run.code, 1);
    assert!(run.stdout.contains("limit is 2"), "{}", run.stdout);
}
