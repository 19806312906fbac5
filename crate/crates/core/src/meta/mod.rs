//! Meta-evaluation: how well metric scores agree with human judgments.
//!
//! Relative-ranking data uses the WMT Kendall-tau-like statistic
//! `(|Concordant| - |Discordant|) / (|Concordant| + |Discordant|)` over
//! human-ranked hypothesis pairs; direct-assessment data uses the absolute
//! Pearson correlation.

pub mod ablation;
pub mod synth;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{better_id, worse_id, EvalExample, HumanJudgment};
use crate::pipeline::PipelineError;
use crate::stats::pearson;

#[derive(Debug, Error)]
pub enum MetaError {
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),
    #[error("non-finite value in correlation input")]
    NonFinite,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrelationKind {
    KendallTauLike,
    AbsPearson,
}

impl CorrelationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CorrelationKind::KendallTauLike => "kendall-tau-like",
            CorrelationKind::AbsPearson => "abs-pearson",
        }
    }
}

/// How pairs the metric scores equally are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TiePolicy {
    /// Ties count against the metric.
    #[default]
    Discordant,
    /// Ties are dropped from both counts.
    Excluded,
}

impl TiePolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            TiePolicy::Discordant => "discordant",
            TiePolicy::Excluded => "excluded",
        }
    }
}

impl std::str::FromStr for TiePolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "discordant" => Ok(TiePolicy::Discordant),
            "excluded" => Ok(TiePolicy::Excluded),
            _ => Err(format!("unknown tie policy {s:?} (discordant|excluded)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub kind: CorrelationKind,
    pub value: f64,
    pub n_used: usize,
    /// Kendall only.
    pub n_ties: usize,
    pub tie_policy: Option<TiePolicy>,
}

/// Kendall-tau-like correlation over `(metric score of the human-preferred
/// hypothesis, metric score of the dispreferred one)` pairs.
pub fn kendall_tau_like(pairs: &[(f64, f64)], tie_policy: TiePolicy) -> Result<CorrelationResult, MetaError> {
    let (mut concordant, mut discordant, mut ties) = (0usize, 0usize, 0usize);
    for &(better, worse) in pairs {
        if !better.is_finite() || !worse.is_finite() {
            return Err(MetaError::NonFinite);
        }
        if better > worse {
            concordant += 1;
        } else if better < worse {
            discordant += 1;
        } else {
            ties += 1;
        }
    }
    if tie_policy == TiePolicy::Discordant {
        discordant += ties;
    }
    let used = concordant + discordant;
    if used == 0 {
        return Err(MetaError::InsufficientData("no usable ranked pairs".into()));
    }
    Ok(CorrelationResult {
        kind: CorrelationKind::KendallTauLike,
        value: (concordant as f64 - discordant as f64) / used as f64,
        n_used: used,
        n_ties: ties,
        tie_policy: Some(tie_policy),
    })
}

/// `|r|` over `(metric, human)` points.
pub fn abs_pearson(points: &[(f64, f64)]) -> Result<CorrelationResult, MetaError> {
    if points.len() < 3 {
        return Err(MetaError::InsufficientData(format!(
            "pearson needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|(m, h)| !m.is_finite() || !h.is_finite()) {
        return Err(MetaError::NonFinite);
    }
    let (metric, human): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    let r = pearson(&metric, &human).ok_or_else(|| {
        let constant_metric = metric.iter().all(|&m| m == metric[0]);
        MetaError::ZeroVariance(if constant_metric { "metric scores" } else { "human scores" })
    })?;
    Ok(CorrelationResult {
        kind: CorrelationKind::AbsPearson,
        value: r.abs(),
        n_used: points.len(),
        n_ties: 0,
        tie_policy: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupResult {
    pub lang_pair: String,
    #[serde(flatten)]
    pub result: CorrelationResult,
}

#[derive(Default)]
struct Group {
    points: Vec<(f64, f64)>,
    pairs: Vec<(f64, f64)>,
}

/// Joins metric scores (keyed by scored-row id) with the dataset's human
/// judgments and correlates them per language pair. Relative-ranking and
/// direct-assessment examples of the same pair form separate groups.
/// Examples without a judgment or without scores are skipped.
pub fn correlate(
    dataset: &[EvalExample],
    scores: &BTreeMap<String, f64>,
    tie_policy: TiePolicy,
) -> Result<Vec<GroupResult>, MetaError> {
    let mut groups: BTreeMap<String, Group> = BTreeMap::new();
    for e in dataset {
        let key = format!("{}-{}", e.src.lang, e.hyp.lang);
        match &e.human {
            Some(HumanJudgment::DirectAssessment(h)) => {
                if let Some(&m) = scores.get(&e.id) {
                    groups.entry(key).or_default().points.push((m, *h));
                }
            }
            Some(HumanJudgment::RelativeRanking { .. }) => {
                if let (Some(&b), Some(&w)) = (scores.get(&better_id(&e.id)), scores.get(&worse_id(&e.id))) {
                    groups.entry(key).or_default().pairs.push((b, w));
                }
            }
            None => {}
        }
    }
    if groups.is_empty() {
        return Err(MetaError::InsufficientData(
            "no scored examples with human judgments".into(),
        ));
    }
    let mut out = Vec::new();
    for (lang_pair, g) in groups {
        let with_pair = |e: MetaError| match e {
            MetaError::InsufficientData(m) => MetaError::InsufficientData(format!("{lang_pair}: {m}")),
            other => other,
        };
        if !g.points.is_empty() {
            out.push(GroupResult {
                lang_pair: lang_pair.clone(),
                result: abs_pearson(&g.points).map_err(with_pair)?,
            });
        }
        if !g.pairs.is_empty() {
            out.push(GroupResult {
                lang_pair: lang_pair.clone(),
                result: kendall_tau_like(&g.pairs, tie_policy).map_err(with_pair)?,
            });
        }
    }
    Ok(out)
}

/// Mean of the group values, with the shared kind or `None` when mixed.
pub fn summarize(groups: &[GroupResult]) -> (f64, Option<CorrelationKind>) {
    let value = groups.iter().map(|g| g.result.value).sum::<f64>() / groups.len() as f64;
    let kind = groups[0].result.kind;
    let same = groups.iter().all(|g| g.result.kind == kind);
    (value, same.then_some(kind))
}

impl fmt::Display for CorrelationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {:.4} (n={}", self.kind.as_str(), self.value, self.n_used)?;
        if let Some(p) = self.tie_policy {
            write!(f, ", ties={} {}", self.n_ties, p.as_str())?;
        }
        f.write_str(")")
    }
}

/// Tab-separated rendering of per-group results with a header row.
pub fn groups_to_tsv(groups: &[GroupResult]) -> String {
    let mut out = String::from("lang_pair\tkind\tvalue\tn_used\tn_ties\ttie_policy\n");
    for g in groups {
        let r = &g.result;
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            g.lang_pair,
            r.kind.as_str(),
            r.value,
            r.n_used,
            r.n_ties,
            r.tie_policy.map_or("-", TiePolicy::as_str)
        ));
    }
    out
}
