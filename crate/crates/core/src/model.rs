//! Dataset types and the canonical JSON Lines representation.
//!
//! A dataset file holds one record per line. Direct-assessment records carry
//! a single hypothesis and an optional numeric judgment; relative-ranking
//! records carry a preferred and a dispreferred hypothesis for the same
//! source/reference. Field order on output is fixed so that a canonically
//! formatted file survives `parse` + `serialize` byte for byte.

use std::collections::HashSet;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Lowercase ISO-style language tag, two or three ASCII letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct LanguageCode(String);

impl LanguageCode {
    pub fn new(code: &str) -> Result<Self, String> {
        let ok = (2..=3).contains(&code.len()) && code.bytes().all(|b| b.is_ascii_lowercase());
        if ok {
            Ok(LanguageCode(code.to_string()))
        } else {
            Err(format!("invalid language code {code:?}"))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for LanguageCode {
    type Error = String;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        LanguageCode::new(&value)
    }
}

impl From<LanguageCode> for String {
    fn from(value: LanguageCode) -> Self {
        value.0
    }
}

impl FromStr for LanguageCode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LanguageCode::new(s)
    }
}

impl fmt::Display for LanguageCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Src,
    Ref,
    Hypo,
    Trans1,
    Trans2,
}

impl EntityKind {
    pub const ALL: [EntityKind; 5] = [
        EntityKind::Src,
        EntityKind::Ref,
        EntityKind::Hypo,
        EntityKind::Trans1,
        EntityKind::Trans2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Src => "src",
            EntityKind::Ref => "ref",
            EntityKind::Hypo => "hypo",
            EntityKind::Trans1 => "trans1",
            EntityKind::Trans2 => "trans2",
        }
    }
}

impl FromStr for EntityKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EntityKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown entity {s:?}"))
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entity {
    pub kind: EntityKind,
    pub text: String,
    pub lang: LanguageCode,
}

impl Entity {
    pub fn new(kind: EntityKind, text: impl Into<String>, lang: LanguageCode) -> Self {
        Entity {
            kind,
            text: text.into(),
            lang,
        }
    }
}

/// An ordered generation direction `from -> to`, e.g. `src->hypo`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction {
    pub from: EntityKind,
    pub to: EntityKind,
}

impl Direction {
    pub fn new(from: EntityKind, to: EntityKind) -> Result<Self, String> {
        if from == to {
            return Err(format!("direction {from}->{to} connects an entity to itself"));
        }
        Ok(Direction { from, to })
    }

    pub fn involves(&self, kind: EntityKind) -> bool {
        self.from == kind || self.to == kind
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.from, self.to)
    }
}

impl FromStr for Direction {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (from, to) = s
            .split_once("->")
            .ok_or_else(|| format!("direction {s:?} is not of the form from->to"))?;
        Direction::new(from.trim().parse()?, to.trim().parse()?)
    }
}

impl Serialize for Direction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HumanJudgment {
    DirectAssessment(f64),
    RelativeRanking { better: Entity, worse: Entity },
}

/// One evaluated segment.
///
/// For relative-ranking records `hyp` holds the preferred hypothesis and both
/// hypotheses are also present in `human`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalExample {
    pub id: String,
    pub src: Entity,
    pub reference: Entity,
    pub hyp: Entity,
    pub trans1: Option<Entity>,
    pub trans2: Option<Entity>,
    pub human: Option<HumanJudgment>,
}

impl EvalExample {
    pub fn entity(&self, kind: EntityKind) -> Option<&Entity> {
        match kind {
            EntityKind::Src => Some(&self.src),
            EntityKind::Ref => Some(&self.reference),
            EntityKind::Hypo => Some(&self.hyp),
            EntityKind::Trans1 => self.trans1.as_ref(),
            EntityKind::Trans2 => self.trans2.as_ref(),
        }
    }

    pub fn is_relative_ranking(&self) -> bool {
        matches!(self.human, Some(HumanJudgment::RelativeRanking { .. }))
    }

    /// Hypotheses that must be scored for this example, with the id each
    /// scored row is reported under.
    pub fn scored_hypotheses(&self) -> Vec<(String, &Entity)> {
        match &self.human {
            Some(HumanJudgment::RelativeRanking { better, worse }) => vec![
                (better_id(&self.id), better),
                (worse_id(&self.id), worse),
            ],
            _ => vec![(self.id.clone(), &self.hyp)],
        }
    }
}

/// Row id of the preferred hypothesis of a relative-ranking record.
pub fn better_id(id: &str) -> String {
    format!("{id}#better")
}

/// Row id of the dispreferred hypothesis of a relative-ranking record.
pub fn worse_id(id: &str) -> String {
    format!("{id}#worse")
}

// Wire record. Field declaration order is the canonical output order.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    id: String,
    src: String,
    src_lang: String,
    #[serde(rename = "ref")]
    reference: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hyp: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hyp_better: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hyp_worse: Option<String>,
    tgt_lang: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    human: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trans1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trans1_lang: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trans2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trans2_lang: Option<String>,
}

fn lang(code: &str) -> Result<LanguageCode, String> {
    LanguageCode::new(code)
}

fn optional_entity(
    kind: EntityKind,
    text: Option<String>,
    code: Option<String>,
) -> Result<Option<Entity>, String> {
    match (text, code) {
        (None, None) => Ok(None),
        (Some(text), Some(code)) => Ok(Some(Entity::new(kind, text.trim(), lang(&code)?))),
        (Some(_), None) => Err(format!("{kind} present without {kind}_lang")),
        (None, Some(_)) => Err(format!("{kind}_lang present without {kind}")),
    }
}

impl TryFrom<Record> for EvalExample {
    type Error = String;

    fn try_from(r: Record) -> Result<Self, Self::Error> {
        let src_lang = lang(&r.src_lang)?;
        let tgt_lang = lang(&r.tgt_lang)?;
        let trans1 = optional_entity(EntityKind::Trans1, r.trans1, r.trans1_lang)?;
        let trans2 = optional_entity(EntityKind::Trans2, r.trans2, r.trans2_lang)?;
        let hypo = |text: String| Entity::new(EntityKind::Hypo, text.trim(), tgt_lang.clone());
        let (hyp, human) = match (r.hyp, r.hyp_better, r.hyp_worse) {
            (Some(hyp), None, None) => (hypo(hyp), r.human.map(HumanJudgment::DirectAssessment)),
            (None, Some(better), Some(worse)) => {
                if r.human.is_some() {
                    return Err("relative-ranking record must not carry \"human\"".into());
                }
                let better = hypo(better);
                let worse = hypo(worse);
                (
                    better.clone(),
                    Some(HumanJudgment::RelativeRanking { better, worse }),
                )
            }
            _ => {
                return Err(
                    "record needs either \"hyp\" or both \"hyp_better\" and \"hyp_worse\"".into(),
                )
            }
        };
        Ok(EvalExample {
            id: r.id,
            src: Entity::new(EntityKind::Src, r.src.trim(), src_lang),
            reference: Entity::new(EntityKind::Ref, r.reference.trim(), tgt_lang),
            hyp,
            trans1,
            trans2,
            human,
        })
    }
}

impl From<&EvalExample> for Record {
    fn from(e: &EvalExample) -> Self {
        let mut r = Record {
            id: e.id.clone(),
            src: e.src.text.clone(),
            src_lang: e.src.lang.to_string(),
            reference: e.reference.text.clone(),
            tgt_lang: e.hyp.lang.to_string(),
            trans1: e.trans1.as_ref().map(|t| t.text.clone()),
            trans1_lang: e.trans1.as_ref().map(|t| t.lang.to_string()),
            trans2: e.trans2.as_ref().map(|t| t.text.clone()),
            trans2_lang: e.trans2.as_ref().map(|t| t.lang.to_string()),
            ..Default::default()
        };
        match &e.human {
            Some(HumanJudgment::RelativeRanking { better, worse }) => {
                r.hyp_better = Some(better.text.clone());
                r.hyp_worse = Some(worse.text.clone());
            }
            Some(HumanJudgment::DirectAssessment(score)) => {
                r.hyp = Some(e.hyp.text.clone());
                r.human = Some(*score);
            }
            None => r.hyp = Some(e.hyp.text.clone()),
        }
        r
    }
}

/// Parses one JSON Lines record. `line` is only used for error positions.
pub fn parse_record(text: &str, line: usize) -> Result<EvalExample, DatasetError> {
    let record: Record = serde_json::from_str(text).map_err(|e| DatasetError::Parse {
        line,
        message: e.to_string(),
    })?;
    EvalExample::try_from(record).map_err(|message| DatasetError::Parse { line, message })
}

/// Reads a dataset; blank lines are skipped, line numbers are 1-based.
pub fn read_dataset<R: BufRead>(reader: R) -> Result<Vec<EvalExample>, DatasetError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_record(&line, idx + 1)?);
    }
    Ok(out)
}

pub fn parse_dataset(text: &str) -> Result<Vec<EvalExample>, DatasetError> {
    read_dataset(text.as_bytes())
}

pub fn serialize_record(example: &EvalExample) -> String {
    serde_json::to_string(&Record::from(example)).expect("record serialization is infallible")
}

pub fn serialize_dataset(examples: &[EvalExample]) -> String {
    let mut out = String::new();
    for e in examples {
        out.push_str(&serialize_record(e));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub id: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub records: usize,
    pub violations: Vec<Violation>,
    pub accepted: bool,
}

/// Checks dataset-level invariants that parsing alone does not enforce.
pub fn validate_dataset(records: &[EvalExample]) -> ValidationReport {
    let mut violations = Vec::new();
    let mut seen = HashSet::new();
    let mut push = |id: &str, message: String| {
        violations.push(Violation {
            id: id.to_string(),
            message,
        })
    };

    for r in records {
        if !seen.insert(r.id.as_str()) {
            push(&r.id, "duplicate id".into());
        }
        let mut entities: Vec<&Entity> = vec![&r.src, &r.reference, &r.hyp];
        entities.extend(r.trans1.iter());
        entities.extend(r.trans2.iter());
        if let Some(HumanJudgment::RelativeRanking { worse, .. }) = &r.human {
            entities.push(worse);
        }
        for e in entities {
            if e.text.trim().is_empty() {
                push(&r.id, format!("empty entity text ({})", e.kind));
            }
        }
        if r.reference.lang != r.hyp.lang {
            push(
                &r.id,
                format!(
                    "reference language {} differs from hypothesis language {}",
                    r.reference.lang, r.hyp.lang
                ),
            );
        }
        match &r.human {
            Some(HumanJudgment::DirectAssessment(score)) if !score.is_finite() => {
                push(&r.id, "non-finite human score".into())
            }
            Some(HumanJudgment::RelativeRanking { better, worse }) if better.text == worse.text => {
                push(&r.id, "relative ranking compares identical hypotheses".into())
            }
            _ => {}
        }
    }

    let accepted = violations.is_empty();
    ValidationReport {
        records: records.len(),
        violations,
        accepted,
    }
}
