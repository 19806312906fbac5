//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Two operations, both on data that ships with the library:
//!
//! * [`score_hypothesis`] scores a user sentence with the toy lexical model,
//!   showing the augmented translations, every direction's per-token trace
//!   and the one-vs-rest weights it gets next to the built-in fixture.
//! * [`explore_weights`] generates a synthetic ranked dataset and compares
//!   one-vs-rest against uniform averaging.
//!
//! Results are returned as JSON strings.

use std::collections::BTreeMap;

use datscore::backend::toy::ToyBackend;
use datscore::backend::trace::TraceBackend;
use datscore::fixture::fixture_dataset;
use datscore::meta::synth::{synth_generate, SynthConfig};
use datscore::meta::{correlate, TiePolicy};
use datscore::model::validate_dataset;
use datscore::pipeline::{self, Averaging, Mode, PipelineConfig};
use datscore::scoring::TermScheme;
use datscore::{Direction, Entity, EntityKind, EvalExample, LanguageCode};
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

const INPUT_ID: &str = "input";

fn config(mode: Mode) -> PipelineConfig {
    let mut c = PipelineConfig::new(mode);
    c.fill.workers = 1;
    c
}

fn lang(code: &str) -> Result<LanguageCode, String> {
    LanguageCode::new(code)
}

#[derive(Serialize)]
struct DirectionView {
    direction: String,
    tokens: Vec<String>,
    logprobs: Vec<f64>,
    entropies: Vec<f64>,
    score: f64,
    weight: f64,
}

pub fn score_json(
    src: &str,
    src_lang: &str,
    reference: &str,
    hyp: &str,
    tgt_lang: &str,
    term_weighting: &str,
) -> Result<String, String> {
    let tgt = lang(tgt_lang)?;
    let example = EvalExample {
        id: INPUT_ID.into(),
        src: Entity::new(EntityKind::Src, src.trim(), lang(src_lang)?),
        reference: Entity::new(EntityKind::Ref, reference.trim(), tgt.clone()),
        hyp: Entity::new(EntityKind::Hypo, hyp.trim(), tgt),
        trans1: None,
        trans2: None,
        human: None,
    };
    let mut dataset = fixture_dataset();
    dataset.push(example);
    let report = validate_dataset(&dataset);
    if let Some(v) = report.violations.first() {
        return Err(v.message.clone());
    }

    let mut c = config(Mode::Mt8);
    c.term_scheme = term_weighting.parse::<TermScheme>()?;
    let out = pipeline::run(&dataset, &ToyBackend::fixture(), &c).map_err(|e| e.to_string())?;
    let row = out.matrix.row_ids.iter().position(|id| id == INPUT_ID).ok_or("input row missing")?;
    let augmented = &out.dataset[out.dataset.len() - 1];

    let directions: Vec<DirectionView> = out
        .matrix
        .directions
        .iter()
        .enumerate()
        .map(|(col, d)| {
            let t = out.traces.get(row, col);
            DirectionView {
                direction: d.to_string(),
                tokens: t.tokens.clone(),
                logprobs: t.logprobs.clone(),
                entropies: t.entropies.clone(),
                score: out.matrix.get(row, col),
                weight: out.weights.get(*d).unwrap_or(0.0),
            }
        })
        .collect();
    let cells = out.matrix.row(row);
    let entity = |e: &Option<Entity>| e.as_ref().map(|e| json!({"text": e.text, "lang": e.lang.as_str()}));
    Ok(json!({
        "trans1": entity(&augmented.trans1),
        "trans2": entity(&augmented.trans2),
        "directions": directions,
        "datscore": out.scores[row],
        "uniform_average": cells.iter().sum::<f64>() / cells.len() as f64,
        "weight_provenance": out.weights.provenance,
    })
    .to_string())
}

pub fn explore_json(n: usize, noise: f64, outlier: &str, seed: u64) -> Result<String, String> {
    let outlier = match outlier.trim() {
        "" | "none" => None,
        d => Some(d.parse::<Direction>()?),
    };
    let cfg = SynthConfig {
        n,
        noise,
        outlier,
        seed,
        ..Default::default()
    };
    let data = synth_generate(&cfg).map_err(|e| e.to_string())?;
    let backend = TraceBackend::new(data.traces, "synthetic");
    let mut result = serde_json::Map::new();
    for averaging in [Averaging::OneVsRest, Averaging::Uniform] {
        let mut c = config(cfg.mode);
        c.averaging = averaging;
        let out = pipeline::run(&data.dataset, &backend, &c).map_err(|e| e.to_string())?;
        let by_id: BTreeMap<String, f64> = out.matrix.row_ids.iter().cloned().zip(out.scores).collect();
        let groups = correlate(&data.dataset, &by_id, TiePolicy::Discordant).map_err(|e| e.to_string())?;
        let weights: Vec<_> = out
            .weights
            .iter()
            .map(|(d, w)| json!({"direction": d.to_string(), "weight": w}))
            .collect();
        result.insert(
            averaging.as_str().into(),
            json!({
                "tau": groups[0].result.value,
                "weights": weights,
                "provenance": out.weights.provenance,
            }),
        );
    }
    Ok(serde_json::Value::Object(result).to_string())
}

#[wasm_bindgen]
pub fn score_hypothesis(
    src: &str,
    src_lang: &str,
    reference: &str,
    hyp: &str,
    tgt_lang: &str,
    term_weighting: &str,
) -> Result<String, JsValue> {
    score_json(src, src_lang, reference, hyp, tgt_lang, term_weighting).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn explore_weights(n: usize, noise: f64, outlier: &str, seed: u64) -> Result<String, JsValue> {
    explore_json(n, noise, outlier, seed).map_err(|e| JsValue::from_str(&e))
}

/// Directions the explorer accepts as an outlier.
#[wasm_bindgen]
pub fn directions() -> String {
    let names: Vec<String> = pipeline::DirectionSet::full(Mode::Mt8)
        .directions
        .iter()
        .map(|d| d.to_string())
        .collect();
    serde_json::to_string(&names).expect("strings serialize")
}

/// Sentences of the built-in corpus, as `[en, fr, es]` rows.
#[wasm_bindgen]
pub fn corpus() -> String {
    serde_json::to_string(&datscore::backend::toy::FIXTURE_CORPUS).expect("strings serialize")
}
