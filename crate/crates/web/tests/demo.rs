use datscore_web::{corpus, directions, explore_json, score_json};
use serde_json::Value;

#[test]
fn scores_a_fixture_sentence() {
    let v: Value = serde_json::from_str(
        &score_json("le chat est assis sur le tapis", "fr", "the cat sits on the mat", "the cat sits on mat", "en", "entropy")
            .unwrap(),
    )
    .unwrap();
    assert_eq!(v["trans1"]["lang"], "en");
    assert_eq!(v["trans2"]["lang"], "es");
    let dirs = v["directions"].as_array().unwrap();
    assert_eq!(dirs.len(), 8);
    assert_eq!(dirs[0]["direction"], "src->hypo");
    assert_eq!(dirs[0]["tokens"].as_array().unwrap().len(), 5);
    let total: f64 = dirs.iter().map(|d| d["weight"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
    let s = v["datscore"].as_f64().unwrap();
    let lo = dirs.iter().map(|d| d["score"].as_f64().unwrap()).fold(f64::INFINITY, f64::min);
    let hi = dirs.iter().map(|d| d["score"].as_f64().unwrap()).fold(f64::NEG_INFINITY, f64::max);
    assert!(lo - 1e-12 <= s && s <= hi + 1e-12);
}

#[test]
fn rejects_bad_input() {
    assert!(score_json("le chat", "fr", "the cat", "  ", "en", "entropy").is_err());
    assert!(score_json("le chat", "fr", "the cat", "a cat", "en", "loud").is_err());
    assert!(score_json("le chat", "FR", "the cat", "a cat", "en", "entropy").is_err());
    assert!(score_json("der Hund", "de", "the dog", "a dog", "en", "entropy").is_err());
}

#[test]
fn explorer_prefers_one_vs_rest_with_outlier() {
    let v: Value = serde_json::from_str(&explore_json(300, 0.3, "trans1->hypo", 42).unwrap()).unwrap();
    let ovr = v["one-vs-rest"]["tau"].as_f64().unwrap();
    let uni = v["uniform"]["tau"].as_f64().unwrap();
    assert!(ovr > uni, "{ovr} {uni}");
    assert_eq!(v["uniform"]["weights"].as_array().unwrap().len(), 8);
    assert!(explore_json(50, 0.3, "none", 1).is_ok());
    assert!(explore_json(50, 2.0, "none", 1).is_err());
    assert!(explore_json(50, 0.3, "src->ref", 1).is_err());
}

#[test]
fn static_lists() {
    let d: Vec<String> = serde_json::from_str(&directions()).unwrap();
    assert_eq!(d.len(), 8);
    let c: Vec<Vec<String>> = serde_json::from_str(&corpus()).unwrap();
    assert_eq!(c.len(), 8);
}
