mod common;

use std::collections::BTreeSet;

use assert_cmd::Command;
use serde_json::Value as Json;

use jumpgen::golden::EXAMPLE_GOLDEN;
use jumpgen::grouplat::PairVec;

const EXAMPLE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/example.json");
const SCHEMA: &str = include_str!("../schema/report.schema.json");

fn jumpgen() -> Command {
    Command::cargo_bin("jumpgen").unwrap()
}

fn json_of(out: &[u8]) -> Json {
    serde_json::from_slice(out).expect("valid JSON on stdout")
}

fn pair(j: &Json) -> PairVec {
    let v = |k: &str| -> Vec<u32> {
        j[k].as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_u64().unwrap() as u32)
            .collect()
    };
    PairVec::new(v("p"), v("t"))
}

fn assert_schema(report: &Json) {
    let schema: Json = serde_json::from_str(SCHEMA).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    let msgs: Vec<String> = match compiled.validate(report) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    assert!(msgs.is_empty(), "report violates the schema: {msgs:#?}");
}

#[test]
fn build_writes_both_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    jumpgen()
        .args(["build", "--quiet", "--config", EXAMPLE, "--out"])
        .arg(&out)
        .assert()
        .success()
        .stdout("");
    let report: Json = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["t_chain"][2]["gamma"]["expr"], "-2 + sqrt(51)");
    assert_eq!(report["generating_sequence"]["members"].as_array().unwrap().len(), 7);
    assert_schema(&report);
    let text = std::fs::read_to_string(out.with_extension("txt")).unwrap();
    assert!(text.contains("T3 = x^3*z - x^2*y^2 - y*z^2"), "{text}");
    assert!(text.contains("elapsed:"));
}

#[test]
fn json_on_stdout_is_deterministic() {
    let run = || jumpgen().args(["build", "--json", "--config", EXAMPLE]).output().unwrap();
    let a = run();
    let b = run();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut report = json_of(&a.stdout);
    assert_schema(&report);
    report["flags"]["stop"] = Json::from("sometime");
    let schema: Json = serde_json::from_str(SCHEMA).unwrap();
    assert!(!jsonschema::JSONSchema::compile(&schema).unwrap().is_valid(&report));
}

#[test]
fn second_model_report_validates() {
    let out = jumpgen()
        .args(["build", "--json", "--config"])
        .arg(common::fixture("second_model.json"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let report = json_of(&out.stdout);
    assert_schema(&report);
    assert_eq!(report["p_chain"][2]["poly"], "-x + y");
    assert_eq!(report["gr_relations"][0]["scalar"], "1");
}

#[test]
fn malformed_polynomial_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let text = std::fs::read_to_string(EXAMPLE).unwrap().replace("\"image\": \"y\"", "\"image\": \"y^^2\"");
    std::fs::write(&bad, text).unwrap();
    let out = jumpgen().args(["build", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains(":10:"), "{err}");
    assert!(err.contains("image of `y`"), "{err}");
}

#[test]
fn missing_config_exits_2() {
    jumpgen()
        .args(["build", "--config", "/nonexistent/config.json"])
        .assert()
        .code(2);
}

#[test]
fn small_index_bound_is_flagged() {
    let out = jumpgen()
        .args(["build", "--json", "--max-t-index", "2", "--config", EXAMPLE])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_of(&out.stdout);
    assert_eq!(report["flags"]["truncated"], true);
    assert_eq!(report["flags"]["stop"], "index_bound");
    assert_eq!(report["generating_sequence"]["certified"], false);
    assert_eq!(report["t_chain"].as_array().unwrap().len(), 2);
}

#[test]
fn bad_max_value_exits_2() {
    jumpgen()
        .args(["build", "--max-value", "sqrt(7)", "--config", EXAMPLE])
        .assert()
        .code(2);
}

fn ideal(sigma: &str) -> BTreeSet<PairVec> {
    let out = jumpgen()
        .args(["ideal", "--json", "--config", EXAMPLE, "--sigma", sigma])
        .output()
        .unwrap();
    assert!(out.status.success());
    let row = json_of(&out.stdout);
    row["generators"].as_array().unwrap().iter().map(|g| pair(&g["vec"])).collect()
}

#[test]
fn ideal_of_zero_is_the_unit() {
    assert_eq!(ideal("0"), BTreeSet::from([PairVec::zero()]));
}

#[test]
fn ideal_matches_brute_force() {
    let (c, s) = common::example();
    for sigma in ["1", "2*sqrt(2)"] {
        assert_eq!(ideal(sigma), common::naive_ideal(&s, &common::val(&c, sigma)), "sigma = {sigma}");
    }
    let g = ideal("2*sqrt(2)");
    assert!(g.contains(&PairVec::new(vec![0, 2], vec![])));
    assert!(g.contains(&PairVec::new(vec![1], vec![1])));
}

#[test]
fn ideal_text_output() {
    jumpgen()
        .args(["ideal", "--config", EXAMPLE, "--sigma", "1"])
        .assert()
        .success()
        .stdout(predicates::str::contains("(1|0)  value 1"));
}

#[test]
fn unparsable_sigma_exits_2() {
    jumpgen()
        .args(["ideal", "--config", EXAMPLE, "--sigma", "two"])
        .assert()
        .code(2);
    jumpgen()
        .args(["ideal", "--config", EXAMPLE, "--sigma", "-1"])
        .assert()
        .code(2);
}

#[test]
fn verify_example_passes() {
    jumpgen()
        .arg("verify-example")
        .assert()
        .success()
        .stdout("example reproduced exactly\n");
}

#[test]
fn verify_example_reports_flipped_sign() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("golden.json");
    std::fs::write(
        &bad,
        EXAMPLE_GOLDEN.replace("[\"T8\", \"-x^5*z^2", "[\"T8\", \"x^5*z^2"),
    )
    .unwrap();
    let out = jumpgen().args(["verify-example", "--golden"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("sequence.T8"), "{err}");
}
