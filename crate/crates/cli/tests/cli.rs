use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ggs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ggs"))
        .args(args)
        .env_remove("GGS_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn schema() -> jsonschema::JSONSchema {
    let src: Value = serde_json::from_str(include_str!("../schema/verification-report.schema.json")).unwrap();
    jsonschema::JSONSchema::compile(&src).expect("schema compiles")
}

fn assert_valid_report(report: &Value) {
    let schema = schema();
    let msgs: Vec<String> = match schema.validate(report) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("report violates schema: {msgs:?}");
}

#[test]
fn classify_headlines() {
    let out = ggs(&["classify", "-p", "3", "-e", "1,2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("torsion: yes"));
    assert!(text.contains("CSP: yes"));
    assert!(text.contains("witness (1,1,1)"));

    let out = ggs(&["classify", "-p", "3", "-e", "1,1", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["class"]["is_constant"], true);
    let known: Vec<&str> = v["known_results"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert!(known.contains(&"CSP: no, infinite congruence kernel"));
    assert!(known.contains(&"not branch"));
    assert_eq!(v["class"]["tf_status"]["status"], "holds");
}

#[test]
fn classify_reports_scalar_multiples_without_canonicalizing() {
    let v = json(&ggs(&["classify", "-p", "5", "-e", "1,2,2,1", "--format", "json"]));
    assert_eq!(v["e"], serde_json::json!([1, 2, 2, 1]));
    let multiples = v["scalar_multiples"].as_array().unwrap();
    assert_eq!(multiples.len(), 3);
    assert_eq!(multiples[0]["e"], serde_json::json!([2, 4, 4, 2]));
}

#[test]
fn classify_validation_and_refusal_codes() {
    assert_eq!(code(&ggs(&["classify", "-p", "5", "-e", "0,0,0,0"])), 2);
    assert_eq!(code(&ggs(&["classify", "-p", "4", "-e", "1,1,1"])), 2);
    assert_eq!(code(&ggs(&["classify", "-p", "5", "-e", "1,1"])), 2);
    assert_eq!(code(&ggs(&["classify", "-p", "3"])), 2);
    let out = ggs(&["classify", "-p", "11", "-e", "1,0,0,0,0,0,0,0,0,0"]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("TF: not run"));
    // negative residues are accepted and reduced
    let v = json(&ggs(&["classify", "-p", "3", "-e", "1,-1", "--format", "json"]));
    assert_eq!(v["e"], serde_json::json!([1, 2]));
}

#[test]
fn quotient_orders_and_indices() {
    let v = json(&ggs(&["quotient", "-p", "3", "-e", "1,1", "--level", "1", "--format", "json"]));
    assert_eq!(v["order"]["value"], "3");
    let v = json(&ggs(&["quotient", "-p", "3", "-e", "1,2", "--level", "3", "--format", "json"]));
    assert_eq!(v["derived_index"]["value"], "9");
    assert_eq!(v["gamma3_index"]["value"], "27");
    assert_eq!(v["level_kernels"][2]["order"]["value"], "1");
    let v = json(&ggs(&["quotient", "-p", "3", "-e", "1,1", "--level", "4", "--what", "k", "--format", "json"]));
    assert_eq!(v["k"]["index"]["value"], "3");
    assert_eq!(v["k"]["abelian_invariants"], serde_json::json!([2, 2]));
    assert!(v.get("order").is_none());
}

#[test]
fn quotient_budget_refusals() {
    assert_eq!(code(&ggs(&["quotient", "-p", "5", "-e", "1,1,1,1", "--level", "5"])), 3);
    assert_eq!(code(&ggs(&["quotient", "-p", "3", "-e", "1,1", "--level", "9"])), 3);
    assert_eq!(code(&ggs(&["quotient", "-p", "3", "-e", "1,1", "--level", "3", "--budget-degree", "20"])), 3);
    assert_eq!(code(&ggs(&["quotient", "-p", "3", "-e", "1,1", "--level", "0"])), 2);
}

fn cache_files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".ggsq"))
        .collect();
    names.sort();
    names
}

#[test]
fn cached_quotients_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["quotient", "-p", "3", "-e", "1,2", "--level", "3", "--format", "json"];
    let plain = ggs(&args);
    let mut with_cache = args.to_vec();
    with_cache.extend(["--cache-dir", d]);
    let first = ggs(&with_cache);
    assert_eq!(cache_files(dir.path()).len(), 1);
    let second = ggs(&with_cache);
    assert_eq!(plain.stdout, first.stdout);
    assert_eq!(first.stdout, second.stdout);

    // a corrupted file is a miss, not an error
    let file = dir.path().join(&cache_files(dir.path())[0]);
    let mut bytes = std::fs::read(&file).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0xff;
    std::fs::write(&file, bytes).unwrap();
    let third = ggs(&with_cache);
    assert_eq!(code(&third), 0);
    assert_eq!(third.stdout, plain.stdout);

    let purged = ggs(&["cache", "purge", "--cache-dir", d]);
    assert_eq!(code(&purged), 0);
    assert!(cache_files(dir.path()).is_empty());
}

#[test]
fn cache_dir_from_environment_and_flag_precedence() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec!["quotient", "-p", "3", "-e", "1,1", "--level", "2"];
        args.extend_from_slice(extra);
        Command::new(env!("CARGO_BIN_EXE_ggs"))
            .args(&args)
            .env("GGS_CACHE_DIR", env_dir.path())
            .output()
            .unwrap()
    };
    assert_eq!(code(&run(&[])), 0);
    assert_eq!(cache_files(env_dir.path()).len(), 1);
    assert_eq!(code(&run(&["--cache-dir", flag_dir.path().to_str().unwrap()])), 0);
    assert_eq!(cache_files(flag_dir.path()).len(), 1);
    assert_eq!(cache_files(env_dir.path()).len(), 1);
}

#[test]
fn purge_without_directory_is_a_usage_error() {
    assert_eq!(code(&ggs(&["cache", "purge"])), 2);
}

#[test]
fn verify_empty_grid() {
    let out = ggs(&["verify", "--grid", "", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["results"], serde_json::json!([]));
    assert_valid_report(&v);
}

#[test]
fn verify_injected_fault_exits_one() {
    let out = ggs(&["verify", "--grid", "3:1,2:3", "--checks", "C3", "--inject-fault", "wrong-subgroup", "--format", "json"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["results"][0]["verdict"]["status"], "fail");
    assert_eq!(v["results"][0]["verdict"]["counterexample"]["kind"], "not_member");
    assert_valid_report(&v);
}

#[test]
fn verify_default_grid_is_deterministic_and_valid() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let (a, b) = (path("a.json"), path("b.json"));
    let first = ggs(&["verify", "--seed", "7", "--output", &a]);
    let second = ggs(&["verify", "--seed", "7", "--output", &b]);
    assert_eq!(code(&first), 0, "{}", stdout(&first));
    assert_eq!(code(&second), 0);
    let strip = |p: &str| {
        let mut v: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        assert_valid_report(&v);
        for r in v["results"].as_array_mut().unwrap() {
            r.as_object_mut().unwrap().remove("wall_time_ms");
        }
        v
    };
    let (va, vb) = (strip(&a), strip(&b));
    assert_eq!(va, vb);
    assert_eq!(va["seed"], 7);
    assert_eq!(va["summary"]["fail"], 0);
    assert!(stdout(&first).contains("0 fail"));
}

#[test]
fn verify_usage_errors() {
    assert_eq!(code(&ggs(&["verify", "--grid", "3:0,0"])), 2);
    assert_eq!(code(&ggs(&["verify", "--checks", "C10"])), 2);
}

#[test]
fn order_queries() {
    let out = ggs(&["order", "-p", "3", "-e", "1,1", "b*a^-1", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["result"]["tag"], "infinite");
    assert_eq!(v["certificate_rechecked"], true);
    assert_eq!(v["result"]["certificate"]["vertex"], serde_json::json!([3]));

    let text = stdout(&ggs(&["order", "-p", "3", "-e", "1,1", "a"]));
    assert_eq!(text, "order(a) = 3^1 = 3\n");
    let v = json(&ggs(&["order", "-p", "3", "-e", "1,2", "a*b", "--format", "json"]));
    assert_eq!(v["result"]["tag"], "finite");

    let v = json(&ggs(&["order", "-p", "3", "-e", "1,1", "b*a^-1", "--budget-closure", "1", "--format", "json"]));
    assert_eq!(v["result"]["tag"], "unknown");
    assert_eq!(code(&ggs(&["order", "-p", "3", "-e", "1,1", "a*c"])), 2);
}

#[test]
fn emitted_words_round_trip() {
    for src in ["[b,a]", "y_0^a", "b_2*a^2", "[b,a,a]^-1", "(a*b)^4", "b^a*b^-1", "1"] {
        let v = json(&ggs(&["order", "-p", "5", "-e", "1,2,2,1", src, "--format", "json"]));
        let printed = v["word"].as_str().unwrap().to_string();
        let again = json(&ggs(&["order", "-p", "5", "-e", "1,2,2,1", &printed, "--format", "json"]));
        assert_eq!(again["word"], printed.as_str(), "{src}");
    }
}

#[test]
fn portrait_of_b() {
    let out = ggs(&["portrait", "-p", "3", "-e", "1,1", "b", "--depth", "2"]);
    assert_eq!(code(&out), 0);
    let dot = stdout(&out);
    assert!(dot.starts_with("digraph"));
    for (node, label) in [("v", 0), ("v1", 1), ("v2", 1), ("v3", 0), ("v11", 0), ("v31", 1), ("v32", 1), ("v33", 0)] {
        assert!(dot.contains(&format!("\"{node}\" [label=\"{label}\"]")), "{node}");
    }
    let v = json(&ggs(&["portrait", "-p", "3", "-e", "1,1", "b", "--depth", "1", "--format", "json"]));
    assert_eq!(v["portrait"]["labels"], serde_json::json!([[0], [1, 1, 0]]));
    assert_eq!(code(&ggs(&["portrait", "-p", "3", "-e", "1,1", "b", "--depth", "20"])), 3);
}

#[test]
fn schema_subcommand_prints_the_shipped_schema() {
    let out = ggs(&["schema"]);
    assert_eq!(code(&out), 0);
    let printed: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(printed["$id"].as_str().unwrap().ends_with("v1.json"));
}
