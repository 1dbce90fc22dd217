mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::*;
use muse_anno::jams::{lower_document, parse_jams, LoweringOptions};
use muse_anno::model::Modality;
use muse_anno::rdf::{emit_graph, parse_turtle, serialize_turtle};
use muse_anno::validate::Code;
use serde_json::Value;

fn muse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_muse-anno")).args(args).env_remove("MUSE_ANNO_BASE_IRI").output().unwrap()
}

fn fixture(rel: &str) -> String {
    fixture_dir().join(rel).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json_lines(text: &str) -> Vec<Value> {
    text.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn convert_listing_to_turtle_file() {
    let out = tempfile::tempdir().unwrap();
    let o = muse(&[
        "convert",
        &fixture("jams/bohemian.jams"),
        "--modality",
        "audio",
        "--format",
        "ttl",
        "-o",
        out.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let written = fs::read_to_string(out.path().join("bohemian.ttl")).unwrap();

    let mut opts = LoweringOptions::new(Modality::Audio, "http://example.org/");
    opts.document_key = Some("bohemian".into());
    let expected = emit_graph(&lower_document(&parse_jams(BOHEMIAN).unwrap(), &opts).unwrap()).unwrap();
    assert_eq!(written, serialize_turtle(&expected));
    assert!(parse_turtle(&written).unwrap().same_triples(&expected));

    // Spot checks against the minting rule and the listing values.
    assert!(written.contains("<http://example.org/observation/bohemian/0/2-index-0> a ma:MusicTimeIndexComponent ;\n    ma:hasMusicTimeValueType ma:Seconds ;\n    ma:hasTimeValue \"4.122\"^^xsd:decimal .\n"));
    assert!(written.contains("<http://example.org/track/bohemian> dcterms:creator \"Queen\" ;\n    dcterms:title \"01 Bohemian Rhapsody\" ;\n    a ma:Track ;\n"));
    assert!(written.contains("ma:hasConfidence \"1.0\"^^xsd:decimal"));

    let lines = json_lines(&stdout(&o));
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0]["triples"], Value::from(expected.len()));
    let leftovers: Vec<_> = fs::read_dir(out.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(leftovers, ["bohemian.ttl"]);
}

#[test]
fn convert_to_ntriples_on_stdout() {
    let o = muse(&["convert", &fixture("score/mozart.jams"), "--modality", "score", "--format", "nt"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.ends_with(" .")));
    assert!(text.contains(
        "<http://example.org/observation/mozart/0/1-index-0> <https://purl.org/andreapoltronieri/music-annotation-pattern#hasTimeValue> \"2\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n"
    ));
}

#[test]
fn missing_input_is_named_on_stderr() {
    let o = muse(&["convert", "missing.jams"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).is_empty());
    let lines = json_lines(&stderr(&o));
    assert_eq!(lines[0]["file"], "missing.jams");
}

#[test]
fn unknown_format_is_a_usage_error() {
    let o = muse(&["convert", &fixture("jams/bohemian.jams"), "--format", "pdf"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
}

#[test]
fn stats_over_both_listing_fixtures() {
    let o = muse(&["stats", &fixture("jams")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(report["files"], 2);
    assert_eq!(report["namespaces"], serde_json::json!({"chord": 1, "segment": 1}));
    assert_eq!(report["observations"], 5);
    assert_eq!(report["annotator_types"], serde_json::json!({"human": 2}));
    assert_eq!(report["min_time"].to_string(), "0.0");
    assert_eq!(report["max_time"].to_string(), "9.520");
    assert_eq!(stdout(&o), stdout(&muse(&["stats", &fixture("jams")])));
}

#[test]
fn query_value_of_observation() {
    let o = muse(&[
        "query",
        "--cq",
        "7",
        "--subject",
        "http://example.org/observation/bohemian/0/0",
        &fixture("jams/bohemian.jams"),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "value\tvalue_kind\tlabel\nhttp://example.org/value/bohemian/0/0\thttps://w3id.org/muse-anno/vocab#Chord\tN\n"
    );
}

#[test]
fn query_json_output() {
    let o = muse(&["query", "--cq", "10", "--json", &fixture("jams/michelle.jams")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["cq"], 10);
    assert_eq!(v["rows"][0]["object"], "http://example.org/track/michelle");
}

#[test]
fn query_exit_codes() {
    let bohemian = fixture("jams/bohemian.jams");
    let o = muse(&["query", "--cq", "7", "--subject", "http://example.org/nothing", &bohemian]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).is_empty());
    assert_eq!(muse(&["query", "--cq", "3", &bohemian]).status.code(), Some(2));
    assert_eq!(muse(&["query", "--cq", "11", &bohemian]).status.code(), Some(2));
    assert_eq!(muse(&["query", "--cq", "7", "--subject", "not an iri", &bohemian]).status.code(), Some(2));
}

#[test]
fn validate_clean_fixtures_prints_nothing() {
    for f in ["jams/bohemian.jams", "jams/michelle.jams", "score/mozart.jams", "golden/mozart.ttl"] {
        let o = muse(&["validate", &fixture(f)]);
        assert_eq!(o.status.code(), Some(0), "{f}: {}", stderr(&o));
        assert!(stdout(&o).is_empty(), "{f}");
    }
}

#[test]
fn validate_reports_graph_violations() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.ttl");
    fs::write(&path, serialize_turtle(&graph_injection(Code::V10))).unwrap();
    let o = muse(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let lines = json_lines(&stdout(&o));
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0]["code"], "V10");
    assert_eq!(lines[0]["subject"], "http://example.org/SegmentObservation1");
    assert_eq!(lines[0]["severity"], "error");
}

#[test]
fn warnings_alone_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("short.jams");
    fs::write(&path, MICHELLE.replace("160.0", "5.0")).unwrap();
    let o = muse(&["validate", path.to_str().unwrap(), "--modality", "audio"]);
    assert_eq!(o.status.code(), Some(0));
    let lines = json_lines(&stdout(&o));
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0]["code"], "W1");
}

#[test]
fn auto_modality_refuses_to_guess() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mixed.jams");
    let mixed = r#"{"annotations":[{"namespace":"chord","data":[
        {"time":0.0,"duration":1.0,"value":"C","sandbox":{"measure":1,"beat":1}},
        {"time":1.0,"duration":1.0,"value":"G"}]}],
        "file_metadata":{"jams_version":"0.3.4"}}"#;
    fs::write(&path, mixed).unwrap();
    let o = muse(&["convert", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).contains("--modality"));
}

#[test]
fn directories_are_processed_in_path_order() {
    let out = tempfile::tempdir().unwrap();
    let o = muse(&["convert", &fixture("jams"), "-o", out.path().to_str().unwrap(), "--modality", "audio"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let files: Vec<String> =
        json_lines(&stdout(&o)).iter().map(|l| l["file"].as_str().unwrap().to_owned()).collect();
    let names: Vec<&str> = files.iter().map(|f| Path::new(f).file_name().unwrap().to_str().unwrap()).collect();
    assert_eq!(names, ["bohemian.jams", "michelle.jams"]);
}

#[test]
fn base_iri_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_muse-anno"))
        .args(["convert", &fixture("jams/michelle.jams"), "--format", "nt"])
        .env("MUSE_ANNO_BASE_IRI", "https://data.example.net/music#")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("<https://data.example.net/music#annotation/michelle/0> "));
    let flag = muse(&["convert", &fixture("jams/michelle.jams"), "--format", "nt", "--base-iri", "http://x.org/kb"]);
    assert!(stdout(&flag).starts_with("<http://x.org/kb/annotation/michelle/0> "));
}

#[test]
fn strict_rejects_generic_namespaces() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("keys.jams");
    fs::write(&path, BOHEMIAN.replace("\"chord\"", "\"key_mode\"")).unwrap();
    assert_eq!(muse(&["validate", path.to_str().unwrap()]).status.code(), Some(0));
    let o = muse(&["validate", path.to_str().unwrap(), "--strict"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("key_mode"));
}

#[test]
fn pretty_diagnostics_are_plain_text() {
    let o = muse(&["convert", "missing.jams", "--pretty"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr(&o), "missing.jams: no such file or directory\n");
}

#[test]
fn explain_codes() {
    let o = muse(&["explain", "V2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("min 1 MusicTimeIndexComponent"));
    assert_eq!(muse(&["explain", "V99"]).status.code(), Some(2));
}

#[test]
fn in_process_runner_matches_binary() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = muse_anno::cli::run(["muse-anno", "stats", &fixture("jams")], &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(String::from_utf8(out).unwrap(), stdout(&muse(&["stats", &fixture("jams")])));
    assert!(err.is_empty());
}
