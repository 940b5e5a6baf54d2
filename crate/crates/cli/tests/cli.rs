use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use crystalk_core::toruskt::Report;
use serde_json::Value;

fn crystalk(args: &[&str], stdin: Option<&str>) -> Output {
    crystalk_env(args, stdin, &[])
}

fn crystalk_env(args: &[&str], stdin: Option<&str>, env: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_crystalk"));
    cmd.args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("binary runs");
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(s) = stdin {
            pipe.write_all(s.as_bytes()).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn ranks_of(v: &Value) -> (u64, u64) {
    (v["ranks"]["k0"].as_u64().unwrap(), v["ranks"]["k1"].as_u64().unwrap())
}

const SWAP: &str = r#"{"n":2,"matrix":[[0,1],[1,0]]}"#;
const PM: &str = r#"{"n":2,"matrix":[[1,0],[0,-1]]}"#;
const MINUS_I3: &str = r#"{"n":3,"matrix":[[-1,0,0],[0,-1,0],[0,0,-1]]}"#;

#[test]
fn classify_examples() {
    let o = crystalk(&["classify", "--format", "json"], Some(SWAP));
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["class"], "MixedNonSplit");
    assert_eq!(v["invariants"], serde_json::json!({"a": 0, "b": 0, "c": 1}));
    assert_eq!(v["spec_version"], "1.0.0");

    let o = crystalk(&["classify", "--format", "json"], Some(r#"{"n":1,"matrix":[[-1]]}"#));
    assert_eq!(json(&o)["class"], "FreeOutsideOrigin");
}

#[test]
fn shear_is_not_an_involution() {
    let o = crystalk(&["classify"], Some(r#"{"n":2,"matrix":[[1,1],[0,1]]}"#));
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("entry (0, 1) of A·A is 2"), "{}", stderr(&o));
}

#[test]
fn malformed_input_exits_2() {
    for bad in ["not json", r#"{"n":2}"#, r#"{"n":3,"matrix":[[1,0],[0,1]]}"#, r#"{"n":2,"matrix":[[1,0],[0]]}"#, r#"{"n":0,"matrix":[]}"#] {
        let o = crystalk(&["classify"], Some(bad));
        assert_eq!(code(&o), 2, "{bad}");
    }
    assert_eq!(code(&crystalk(&["classify", "--entry", "no-such-entry"], None)), 2);
    assert_eq!(code(&crystalk(&["ranks", "--route", "sideways"], Some(PM))), 2);
}

#[test]
fn input_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pm.json");
    std::fs::write(&path, PM).unwrap();
    let o = crystalk(&["cstar", "--format", "json", path.to_str().unwrap()], None);
    assert_eq!(code(&o), 0);
    assert_eq!(ranks_of(&json(&o)), (3, 3));
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&crystalk(&["cstar", missing.to_str().unwrap()], None)), 2);
}

#[test]
fn ranks_both_routes_agree_on_pm() {
    let o = crystalk(&["ranks", "--route", "both", "--format", "json"], Some(PM));
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["agree"], true);
    let routes = v["routes"].as_array().unwrap();
    assert_eq!(routes.len(), 2);
    assert_eq!(routes[0]["route"], "delocalized");
    assert_eq!(routes[1]["route"], "kunneth");
    for r in routes {
        assert_eq!(ranks_of(&r["report"]), (3, 3));
    }
}

#[test]
fn ranks_free_delocalized() {
    let o = crystalk(&["ranks", "--route", "delocalized", "--format", "json"], Some(MINUS_I3));
    assert_eq!(code(&o), 0);
    assert_eq!(ranks_of(&json(&o)["routes"][0]["report"]), (12, 0));
}

#[test]
fn kunneth_on_swap_is_a_scope_error() {
    let o = crystalk(&["ranks", "--route", "kunneth"], Some(SWAP));
    assert_eq!(code(&o), 5);
    assert!(stderr(&o).contains("MixedNonSplit"));
}

#[test]
fn swap_both_routes_use_the_exterior_oracle() {
    let o = crystalk(&["ranks", "--format", "json"], Some(SWAP));
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let routes = v["routes"].as_array().unwrap();
    assert_eq!(routes[1]["route"], "exterior-oracle");
    for r in routes {
        assert_eq!(ranks_of(&r["report"]), (2, 2));
        assert_eq!(r["report"]["scope_flag"], "RationalOnly");
        assert!(r["report"]["caveat"].as_str().unwrap().contains("does not apply"));
    }
    assert_eq!(v["skipped"][0]["route"], "kunneth");
}

#[test]
fn cstar_catalog_examples() {
    for (entry, ranks, scope) in [
        ("infinite-dihedral", (3, 0), "Validated"),
        ("pm-type", (3, 3), "Validated"),
        ("cm-swap", (2, 2), "RationalOnly"),
    ] {
        let o = crystalk(&["cstar", "--entry", entry, "--format", "json"], None);
        assert_eq!(code(&o), 0, "{entry}");
        let v = json(&o);
        assert_eq!(ranks_of(&v), ranks, "{entry}");
        assert_eq!(v["scope_flag"], scope, "{entry}");
        assert_eq!(v["quantity"], "group-cstar-k");
    }
    let v = json(&crystalk(&["cstar", "--entry", "cm-swap", "--format", "json"], None));
    assert!(v["caveat"].as_str().unwrap().contains("3*2^(n-2)"));
}

#[test]
fn json_report_round_trips() {
    for entry in ["infinite-dihedral", "pm-type", "cm-swap", "split-3"] {
        let o = crystalk(&["cstar", "--entry", entry, "--format", "json"], None);
        let v = json(&o);
        let report: Report = serde_json::from_value(v.clone()).unwrap();
        assert_eq!(serde_json::to_value(&report).unwrap(), v, "{entry}");
    }
}

#[test]
fn text_and_json_carry_the_same_numbers() {
    let list = json(&crystalk(&["catalog", "list", "--format", "json"], None));
    for e in list.as_array().unwrap() {
        let name = e["name"].as_str().unwrap();
        let v = json(&crystalk(&["cstar", "--entry", name, "--format", "json"], None));
        let text = stdout(&crystalk(&["cstar", "--entry", name], None));
        let (k0, k1) = ranks_of(&v);
        assert!(text.contains(&format!("K0 rank: {k0}\n")), "{name}: {text}");
        assert!(text.contains(&format!("K1 rank: {k1}\n")), "{name}: {text}");
        assert!(text.contains(&format!("scope: {}\n", v["scope_flag"].as_str().unwrap())), "{name}");
        let inv = &v["invariants"];
        assert!(text.contains(&format!("(a, b, c) = ({}, {}, {})", inv["a"], inv["b"], inv["c"])), "{name}");
    }
}

#[test]
fn catalog_commands() {
    let o = crystalk(&["catalog", "check"], None);
    assert_eq!(code(&o), 0);
    assert!(!stdout(&o).contains("FAIL"));
    let v = json(&crystalk(&["catalog", "show", "infinite-dihedral", "--format", "json"], None));
    assert_eq!(v["expected"], serde_json::json!({"k0": 3, "k1": 0}));
    assert_eq!(v["provenance"], "closed-form");
    assert_eq!(code(&crystalk(&["catalog", "show", "p4m"], None)), 2);
}

#[test]
fn verify_examples() {
    let o = crystalk(&["verify", "3", "--seed", "7", "--count", "3"], None);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("result: all checks pass"));

    let o = crystalk(&["verify", "9"], None);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("grid oracle"));

    let o = crystalk(&["verify", "2", "--seed", "1", "--count", "1", "--format", "json"], None);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let rational: Vec<&Value> =
        v["members"].as_array().unwrap().iter().filter(|m| m["scope_flag"] == "RationalOnly").collect();
    assert_eq!(rational.len(), 1);
    assert_eq!(rational[0]["invariants"], serde_json::json!({"a": 0, "b": 0, "c": 1}));
    let text = stdout(&crystalk(&["verify", "2", "--seed", "1", "--count", "1"], None));
    assert!(text.contains("RationalOnly members: 1"));
}

#[test]
fn verify_saves_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corpus.json");
    let o = crystalk(&["verify", "2", "--count", "2", "--save-corpus", path.to_str().unwrap()], None);
    assert_eq!(code(&o), 0);
    let corpus: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(corpus["members"].as_array().unwrap().len(), 8);
}

#[test]
fn cache_is_append_only_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let c = cache.to_str().unwrap();
    let first = crystalk(&["cstar", "--cache", c, "--format", "json"], Some(PM));
    let second = crystalk(&["cstar", "--cache", c, "--format", "json"], Some(PM));
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    let lines = |p: &Path| std::fs::read_to_string(p).unwrap().lines().count();
    assert_eq!(lines(&cache), 1);
    crystalk(&["ranks", "--cache", c], Some(PM));
    crystalk(&["cstar", "--cache", c], Some(SWAP));
    assert_eq!(lines(&cache), 3);
    let record: Value = serde_json::from_str(std::fs::read_to_string(&cache).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(record["key"]["command"], "cstar");
    assert_eq!(record["key"]["n"], 2);
    assert_eq!(record["key"]["matrix_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn table_path_override() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("tables.json");
    std::fs::write(&good, crystalk_core::repring::BUILTIN_TABLE).unwrap();
    let o = crystalk_env(&["cstar", "--entry", "pm-type"], None, &[("CRYSTALK_TABLE_PATH", &good)]);
    assert_eq!(code(&o), 0);

    let bad = dir.path().join("tampered.json");
    std::fs::write(&bad, crystalk_core::repring::BUILTIN_TABLE.replacen("\"tor_f2\": 1", "\"tor_f2\": 3", 1)).unwrap();
    let o = crystalk_env(&["cstar", "--entry", "pm-type"], None, &[("CRYSTALK_TABLE_PATH", &bad)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("checksum"), "{}", stderr(&o));
}
