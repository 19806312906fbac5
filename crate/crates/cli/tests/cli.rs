use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use datscore::pipeline::read_scores;

const BIN: &str = env!("CARGO_BIN_EXE_datscore");

fn core_fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).current_dir(dir).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(core_fixture("fixture.jsonl"), dir.path().join("fixture.jsonl")).unwrap();
    dir
}

#[test]
fn score_fixture_matches_golden_file() {
    let dir = setup();
    let o = run(
        dir.path(),
        &[
            "score", "--dataset", "fixture.jsonl", "--backend", "toy", "--mode", "mt8", "--term-weighting", "entropy",
            "--averaging", "one-vs-rest", "--output", "scores.jsonl",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let got = read_scores(&fs::read_to_string(dir.path().join("scores.jsonl")).unwrap()).unwrap();
    let golden: BTreeMap<String, f64> =
        serde_json::from_str(&fs::read_to_string(core_fixture("golden_datscores.json")).unwrap()).unwrap();
    assert_eq!(got.len(), 8);
    for (id, want) in &golden {
        assert!((got[id] - want).abs() < 1e-9, "{id}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("scores.jsonl.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["mode"], "mt8");
    assert_eq!(manifest["weight_provenance"], "one-vs-rest");
    assert_eq!(manifest["directions"].as_array().unwrap().len(), 8);
    assert_eq!(manifest["dataset_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn missing_dataset_exits_2_and_names_path() {
    let dir = setup();
    let o = run(dir.path(), &["score", "--dataset", "no/such/file.jsonl", "--output", "s.jsonl"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("no/such/file.jsonl"));
}

#[test]
fn ref4_augments_on_the_fly() {
    let dir = setup();
    let o = run(dir.path(), &["score", "--dataset", "fixture.jsonl", "--mode", "ref4", "--output", "s.jsonl"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let line = fs::read_to_string(dir.path().join("s.jsonl")).unwrap();
    let first: serde_json::Value = serde_json::from_str(line.lines().next().unwrap()).unwrap();
    let dirs: Vec<&String> = first["per_direction"].as_object().unwrap().keys().collect();
    assert_eq!(dirs, ["hypo->ref", "hypo->trans2", "ref->hypo", "trans2->hypo"]);
}

#[test]
fn rerun_from_manifest_is_byte_identical() {
    let dir = setup();
    let o = run(
        dir.path(),
        &["score", "--dataset", "fixture.jsonl", "--averaging", "uniform", "--raw-sum", "--workers", "3", "--output", "a.jsonl"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = run(dir.path(), &["score", "--config", "a.jsonl.manifest.json", "--workers", "1", "--output", "b.jsonl"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let read = |n: &str| fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("a.jsonl"), read("b.jsonl"));
    assert_eq!(read("a.jsonl.manifest.json"), read("b.jsonl.manifest.json"));
}

#[test]
fn flags_override_config_file() {
    let dir = setup();
    fs::write(dir.path().join("run.json"), r#"{"dataset":"fixture.jsonl","mode":"ref4"}"#).unwrap();
    let o = run(dir.path(), &["score", "--config", "run.json", "--mode", "mt8", "--output", "s.jsonl"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let m = fs::read_to_string(dir.path().join("s.jsonl.manifest.json")).unwrap();
    assert!(m.contains("\"mode\": \"mt8\""));
}

#[test]
fn augment_then_score_from_synth_traces() {
    let dir = setup();
    let o = run(
        dir.path(),
        &["synth", "--n", "30", "--seed", "7", "--dataset-out", "syn.jsonl", "--traces-out", "syn.traces.jsonl"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(code(&run(dir.path(), &["check-traces", "--traces", "syn.traces.jsonl"])), 0);
    assert_eq!(code(&run(dir.path(), &["validate", "--dataset", "syn.jsonl"])), 0);

    let o = run(
        dir.path(),
        &["score", "--dataset", "syn.jsonl", "--backend", "trace:syn.traces.jsonl", "--output", "s.jsonl"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = run(dir.path(), &["meta-eval", "--dataset", "syn.jsonl", "--scores", "s.jsonl", "--report", "meta"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("de-en") && stdout.contains("kendall-tau-like"), "{stdout}");
    assert!(dir.path().join("meta.tsv").exists() && dir.path().join("meta.json").exists());

    let o = run(
        dir.path(),
        &["ablate", "--dataset", "syn.jsonl", "--backend", "trace:syn.traces.jsonl", "--report", "ab"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let tsv = fs::read_to_string(dir.path().join("ab.tsv")).unwrap();
    assert_eq!(tsv.lines().count(), 1 + 1 + 8 + 8 + 4);
}

#[test]
fn augment_writes_translations() {
    let dir = setup();
    let o = run(dir.path(), &["augment", "--dataset", "fixture.jsonl", "--output", "aug.jsonl"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("aug.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 8);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["trans1_lang"], "en");
        assert_eq!(v["trans2_lang"], "es");
    }
}

#[test]
fn trace_backend_cannot_augment() {
    let dir = setup();
    fs::write(dir.path().join("empty.jsonl"), "").unwrap();
    let o = run(dir.path(), &["score", "--dataset", "fixture.jsonl", "--backend", "trace:empty.jsonl", "--output", "s.jsonl"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn invalid_dataset_exits_2_with_violations() {
    let dir = setup();
    let text = fs::read_to_string(dir.path().join("fixture.jsonl")).unwrap();
    let first = text.lines().next().unwrap().to_string();
    fs::write(dir.path().join("dup.jsonl"), format!("{text}{first}\n")).unwrap();
    let o = run(dir.path(), &["validate", "--dataset", "dup.jsonl"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("duplicate id"));
    let o = run(dir.path(), &["score", "--dataset", "dup.jsonl", "--output", "s.jsonl"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn too_few_examples_exits_4() {
    let dir = setup();
    let text = fs::read_to_string(dir.path().join("fixture.jsonl")).unwrap();
    let two: String = text.lines().take(2).map(|l| format!("{l}\n")).collect();
    fs::write(dir.path().join("two.jsonl"), two).unwrap();
    let o = run(dir.path(), &["score", "--dataset", "two.jsonl", "--output", "s.jsonl"]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
}

#[test]
fn unknown_backend_is_an_input_error() {
    let dir = setup();
    let o = run(dir.path(), &["score", "--dataset", "fixture.jsonl", "--backend", "gpu", "--output", "s.jsonl"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("unknown backend"));
}
