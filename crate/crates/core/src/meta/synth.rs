//! Synthetic relative-ranking data with known ground truth.
//!
//! Each example has two hypotheses with latent qualities drawn uniformly from
//! `[0, 1)`; the higher one is the human-preferred hypothesis. Every
//! direction's score for a hypothesis is
//!
//! ```text
//! OFFSET + signal * q + noise * N(0, 1)      (regular direction)
//! OFFSET - signal * q + noise * N(0, 1)      (outlier direction)
//! ```
//!
//! capped at 0, with `OFFSET = -10`. Draw order, per example: two uniforms for
//! the qualities (redrawn while equal), then for the preferred and then the
//! dispreferred hypothesis one normal per direction in direction-set order.
//! See [`crate::rng`] for the generator.
//!
//! Traces have two tokens with the score as both log-probabilities and
//! `ln 2` as both entropies, so uniform and entropy weighting recover the
//! intended value exactly.

use serde::{Deserialize, Serialize};

use crate::backend::trace::TraceStore;
use crate::backend::TokenTrace;
use crate::meta::MetaError;
use crate::model::{better_id, worse_id, Direction, Entity, EntityKind, EvalExample, HumanJudgment, LanguageCode};
use crate::pipeline::{DirectionSet, Mode};
use crate::rng::SynthRng;

pub const OFFSET: f64 = -10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n: usize,
    pub noise: f64,
    /// Coefficient of the latent quality in every direction score.
    pub signal: f64,
    pub outlier: Option<Direction>,
    pub seed: u64,
    pub mode: Mode,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n: 100,
            noise: 0.3,
            signal: 1.0,
            outlier: None,
            seed: 42,
            mode: Mode::Mt8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthData {
    pub dataset: Vec<EvalExample>,
    pub traces: TraceStore,
}

fn trace_for(score: f64) -> TokenTrace {
    let h = std::f64::consts::LN_2;
    TokenTrace::new(vec!["tok0".into(), "tok1".into()], vec![score, score], vec![h, h])
        .expect("synthetic trace is valid")
}

pub fn synth_generate(cfg: &SynthConfig) -> Result<SynthData, MetaError> {
    if !(0.0..=1.0).contains(&cfg.noise) {
        return Err(MetaError::InvalidConfig(format!("noise {} outside [0, 1]", cfg.noise)));
    }
    if !cfg.signal.is_finite() {
        return Err(MetaError::InvalidConfig("signal must be finite".into()));
    }
    let directions = DirectionSet::full(cfg.mode).directions;
    if let Some(o) = cfg.outlier {
        if !directions.contains(&o) {
            return Err(MetaError::InvalidConfig(format!(
                "outlier direction {o} is not part of mode {}",
                cfg.mode.as_str()
            )));
        }
    }

    let lc = |s: &str| LanguageCode::new(s).expect("static language code");
    let (src_lang, tgt_lang, t1_lang, t2_lang) = (lc("de"), lc("en"), lc("en"), lc("es"));
    let mut rng = SynthRng::new(cfg.seed);
    let mut dataset = Vec::with_capacity(cfg.n);
    let mut traces = TraceStore::new();

    for i in 0..cfg.n {
        let id = format!("syn-{i:06}");
        let (a, b) = loop {
            let (a, b) = (rng.uniform(), rng.uniform());
            if a != b {
                break (a, b);
            }
        };
        let (q_better, q_worse) = (a.max(b), a.min(b));
        for (row_id, q) in [(better_id(&id), q_better), (worse_id(&id), q_worse)] {
            for &d in &directions {
                let sign = if Some(d) == cfg.outlier { -1.0 } else { 1.0 };
                let score = (OFFSET + sign * cfg.signal * q + cfg.noise * rng.normal()).min(0.0);
                traces.insert(row_id.clone(), d, trace_for(score));
            }
        }
        let hypo = |tag: &str| Entity::new(EntityKind::Hypo, format!("hypothesis {i} {tag}"), tgt_lang.clone());
        let better = hypo("a");
        let worse = hypo("b");
        dataset.push(EvalExample {
            src: Entity::new(EntityKind::Src, format!("source {i}"), src_lang.clone()),
            reference: Entity::new(EntityKind::Ref, format!("reference {i}"), tgt_lang.clone()),
            hyp: better.clone(),
            trans1: Some(Entity::new(EntityKind::Trans1, format!("trans1 {i}"), t1_lang.clone())),
            trans2: Some(Entity::new(EntityKind::Trans2, format!("trans2 {i}"), t2_lang.clone())),
            human: Some(HumanJudgment::RelativeRanking { better, worse }),
            id,
        });
    }
    Ok(SynthData { dataset, traces })
}
