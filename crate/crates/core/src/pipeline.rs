//! Multi-direction scoring.
//!
//! A run has two passes. The first fills a dense matrix with one forced
//! decoding trace per (scored hypothesis, direction); cells are independent
//! and are computed in parallel. The second pass is sequential: traces are
//! reduced to direction scores, direction weights are derived from the
//! whole matrix, and each hypothesis gets the weighted average of its row.
//!
//! One-vs-rest weighting gives each direction the sum of the Pearson
//! correlations between its score column and every other column. A column
//! that disagrees with the rest (a failed evaluation direction) ends up with
//! a small or zero weight. Negative sums are clamped to zero, and if every
//! weight is zero the average falls back to uniform.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::backend::{Backend, BackendError, CellKey, ScoreRequest, TokenTrace};
use crate::model::{Direction, Entity, EntityKind, EvalExample, LanguageCode};
use crate::parallel::ordered_map;
use crate::scoring::{score_trace, Normalization, TermScheme};
use crate::stats::pearson;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    InvalidDirections(String),
    #[error("example {id}: augmentation failed: {source}")]
    Augment { id: String, source: BackendError },
    #[error("{excluded} of {total} examples excluded (limit {limit:.0}%); first: {first}")]
    TooManyExclusions {
        excluded: usize,
        total: usize,
        limit: f64,
        first: String,
    },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("direction weights do not match the matrix: {0}")]
    WeightMismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Src, Ref, Trans1 and Trans2, each to and from the hypothesis.
    Mt8,
    /// Ref and Trans2 to and from the hypothesis, for tasks where the source
    /// cannot be translated.
    Ref4,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Mt8 => "mt8",
            Mode::Ref4 => "ref4",
        }
    }

    fn partners(self) -> &'static [EntityKind] {
        match self {
            Mode::Mt8 => &[
                EntityKind::Src,
                EntityKind::Ref,
                EntityKind::Trans1,
                EntityKind::Trans2,
            ],
            Mode::Ref4 => &[EntityKind::Ref, EntityKind::Trans2],
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mt8" => Ok(Mode::Mt8),
            "ref4" => Ok(Mode::Ref4),
            _ => Err(format!("unknown mode {s:?} (mt8|ref4)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DirectionSet {
    pub mode: Mode,
    pub directions: Vec<Direction>,
}

impl DirectionSet {
    /// All directions of `mode`, partner->hypo before hypo->partner.
    pub fn full(mode: Mode) -> Self {
        let directions = mode
            .partners()
            .iter()
            .flat_map(|&p| {
                [
                    Direction { from: p, to: EntityKind::Hypo },
                    Direction { from: EntityKind::Hypo, to: p },
                ]
            })
            .collect();
        DirectionSet { mode, directions }
    }

    /// Restricts the full set: keep only `include` (when non-empty), then
    /// drop `exclude`. Every named direction must belong to the mode.
    pub fn subset(mode: Mode, include: &[Direction], exclude: &[Direction]) -> Result<Self, PipelineError> {
        let full = Self::full(mode);
        for d in include.iter().chain(exclude) {
            if !full.directions.contains(d) {
                return Err(PipelineError::InvalidDirections(format!(
                    "direction {d} is not part of mode {}",
                    mode.as_str()
                )));
            }
        }
        let directions: Vec<Direction> = full
            .directions
            .into_iter()
            .filter(|d| include.is_empty() || include.contains(d))
            .filter(|d| !exclude.contains(d))
            .collect();
        if directions.is_empty() {
            return Err(PipelineError::InvalidDirections("no directions left".into()));
        }
        Ok(DirectionSet { mode, directions })
    }

    pub fn needs(&self, kind: EntityKind) -> bool {
        self.directions.iter().any(|d| d.involves(kind))
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

/// Languages for the two augmented translations. Unset languages follow the
/// default rule: to-English data uses (en, es), from-English data uses
/// (es, en), anything else pivots through English for both.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentPolicy {
    pub trans1: Option<LanguageCode>,
    pub trans2: Option<LanguageCode>,
}

impl AugmentPolicy {
    pub fn resolve(&self, src: &LanguageCode, tgt: &LanguageCode) -> (LanguageCode, LanguageCode) {
        let code = |s: &str| LanguageCode::new(s).expect("static language code");
        let (t1, t2) = if tgt.as_str() == "en" {
            (code("en"), code("es"))
        } else if src.as_str() == "en" {
            (code("es"), code("en"))
        } else {
            (code("en"), code("en"))
        };
        (
            self.trans1.clone().unwrap_or(t1),
            self.trans2.clone().unwrap_or(t2),
        )
    }
}

/// Fills missing augmented translations: Trans1 translates the source,
/// Trans2 the reference. Existing translations are kept and only the
/// entities listed in `needed` are produced.
pub fn augment(
    example: &EvalExample,
    policy: &AugmentPolicy,
    backend: &dyn Backend,
    needed: &[EntityKind],
) -> Result<EvalExample, PipelineError> {
    let mut out = example.clone();
    let (lang1, lang2) = policy.resolve(&example.src.lang, &example.hyp.lang);
    let fail = |source| PipelineError::Augment {
        id: example.id.clone(),
        source,
    };
    if needed.contains(&EntityKind::Trans1) && out.trans1.is_none() {
        let text = backend
            .translate(&example.src.text, &example.src.lang, &lang1)
            .map_err(fail)?;
        out.trans1 = Some(Entity::new(EntityKind::Trans1, text.trim(), lang1));
    }
    if needed.contains(&EntityKind::Trans2) && out.trans2.is_none() {
        let text = backend
            .translate(&example.reference.text, &example.reference.lang, &lang2)
            .map_err(fail)?;
        out.trans2 = Some(Entity::new(EntityKind::Trans2, text.trim(), lang2));
    }
    Ok(out)
}

pub fn augment_dataset(
    dataset: &[EvalExample],
    policy: &AugmentPolicy,
    backend: &dyn Backend,
    directions: &DirectionSet,
    workers: usize,
) -> Result<Vec<EvalExample>, PipelineError> {
    let needed: Vec<EntityKind> = [EntityKind::Trans1, EntityKind::Trans2]
        .into_iter()
        .filter(|&k| directions.needs(k))
        .collect();
    ordered_map(dataset, workers, |e| augment(e, policy, backend, &needed))
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Copy)]
pub struct FillOptions {
    pub workers: usize,
    pub batch_size: usize,
    /// Fraction of examples that may be excluded before the run aborts.
    pub max_exclusion_ratio: f64,
}

impl Default for FillOptions {
    fn default() -> Self {
        FillOptions {
            workers: crate::parallel::available_workers(),
            batch_size: 16,
            max_exclusion_ratio: 0.1,
        }
    }
}

/// Dense matrix of traces, rows are scored hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceMatrix {
    pub row_ids: Vec<String>,
    pub directions: Vec<Direction>,
    traces: Vec<TokenTrace>,
    pub exclusions: Vec<Exclusion>,
}

impl TraceMatrix {
    pub fn get(&self, row: usize, col: usize) -> &TokenTrace {
        &self.traces[row * self.directions.len() + col]
    }

    pub fn scores(&self, scheme: TermScheme, normalization: Normalization) -> ScoreMatrix {
        let cells = self
            .traces
            .iter()
            .map(|t| score_trace(t, scheme, normalization))
            .collect();
        ScoreMatrix {
            row_ids: self.row_ids.clone(),
            directions: self.directions.clone(),
            cells,
        }
    }
}

struct Cell {
    example: usize,
    key: CellKey,
    request: Result<ScoreRequest, String>,
}

fn cell_request(example: &EvalExample, hyp: &Entity, d: Direction) -> Result<ScoreRequest, String> {
    let pick = |kind: EntityKind| -> Result<&Entity, String> {
        if kind == EntityKind::Hypo {
            return Ok(hyp);
        }
        example
            .entity(kind)
            .ok_or_else(|| format!("missing {kind} (dataset not augmented)"))
    };
    let (input, output) = (pick(d.from)?, pick(d.to)?);
    Ok(ScoreRequest {
        input_text: input.text.clone(),
        input_lang: input.lang.clone(),
        output_text: output.text.clone(),
        output_lang: output.lang.clone(),
    })
}

/// First pass: one forced-decoding trace per (hypothesis, direction).
///
/// Examples with any failing cell are excluded as a whole (both hypotheses of
/// a ranked pair go together) and listed in the result; the run aborts when
/// more than `max_exclusion_ratio` of the examples are lost.
pub fn collect_traces(
    dataset: &[EvalExample],
    directions: &DirectionSet,
    backend: &dyn Backend,
    opts: &FillOptions,
) -> Result<TraceMatrix, PipelineError> {
    let mut cells = Vec::new();
    let mut row_ids = Vec::new();
    let mut row_example = Vec::new();
    for (ei, example) in dataset.iter().enumerate() {
        for (row_id, hyp) in example.scored_hypotheses() {
            for &d in &directions.directions {
                cells.push(Cell {
                    example: ei,
                    key: CellKey {
                        unit_id: row_id.clone(),
                        direction: d,
                    },
                    request: cell_request(example, hyp, d),
                });
            }
            row_ids.push(row_id);
            row_example.push(ei);
        }
    }

    let chunks: Vec<&[Cell]> = cells.chunks(opts.batch_size.max(1)).collect();
    let results: Vec<Result<TokenTrace, String>> = ordered_map(&chunks, opts.workers, |chunk| {
        let ready: Vec<(CellKey, ScoreRequest)> = chunk
            .iter()
            .filter_map(|c| c.request.as_ref().ok().map(|r| (c.key.clone(), r.clone())))
            .collect();
        let mut scored = backend.forced_score_batch(&ready).into_iter();
        chunk
            .iter()
            .map(|c| match &c.request {
                Err(reason) => Err(reason.clone()),
                Ok(_) => scored
                    .next()
                    .expect("backend returned one result per request")
                    .map_err(|e| e.to_string()),
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();

    let mut failed: BTreeMap<usize, String> = BTreeMap::new();
    for (cell, result) in cells.iter().zip(&results) {
        if let Err(reason) = result {
            failed
                .entry(cell.example)
                .or_insert_with(|| format!("{} {}: {reason}", cell.key.unit_id, cell.key.direction));
        }
    }
    let exclusions: Vec<Exclusion> = failed
        .iter()
        .map(|(&ei, reason)| Exclusion {
            id: dataset[ei].id.clone(),
            reason: reason.clone(),
        })
        .collect();
    for x in &exclusions {
        log::warn!("excluding {}: {}", x.id, x.reason);
    }
    if !dataset.is_empty() && exclusions.len() as f64 > opts.max_exclusion_ratio * dataset.len() as f64 {
        return Err(PipelineError::TooManyExclusions {
            excluded: exclusions.len(),
            total: dataset.len(),
            limit: opts.max_exclusion_ratio * 100.0,
            first: format!("{}: {}", exclusions[0].id, exclusions[0].reason),
        });
    }

    let n_dir = directions.len();
    let mut kept_ids = Vec::new();
    let mut traces = Vec::new();
    let mut results = results.into_iter();
    for (row_id, ei) in row_ids.into_iter().zip(row_example) {
        let row: Vec<_> = results.by_ref().take(n_dir).collect();
        if failed.contains_key(&ei) {
            continue;
        }
        kept_ids.push(row_id);
        traces.extend(row.into_iter().map(|r| r.expect("failed rows were excluded")));
    }

    Ok(TraceMatrix {
        row_ids: kept_ids,
        directions: directions.directions.clone(),
        traces,
        exclusions,
    })
}

/// Direction scores, one row per scored hypothesis and one column per
/// direction.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    pub row_ids: Vec<String>,
    pub directions: Vec<Direction>,
    cells: Vec<f64>,
}

impl ScoreMatrix {
    pub fn new(row_ids: Vec<String>, directions: Vec<Direction>, rows: Vec<Vec<f64>>) -> Self {
        assert_eq!(row_ids.len(), rows.len(), "one id per row");
        assert!(rows.iter().all(|r| r.len() == directions.len()), "dense rows");
        ScoreMatrix {
            row_ids,
            directions,
            cells: rows.into_iter().flatten().collect(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.directions.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.cells[row * self.n_cols() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let n = self.n_cols();
        &self.cells[row * n..(row + 1) * n]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|r| self.get(r, col)).collect()
    }

    pub fn column_of(&self, d: Direction) -> Option<Vec<f64>> {
        self.directions.iter().position(|&x| x == d).map(|c| self.column(c))
    }

    /// Copy restricted to `keep`, in the given order.
    pub fn select(&self, keep: &[Direction]) -> ScoreMatrix {
        let idx: Vec<usize> = keep
            .iter()
            .map(|d| {
                self.directions
                    .iter()
                    .position(|x| x == d)
                    .unwrap_or_else(|| panic!("direction {d} not in matrix"))
            })
            .collect();
        let rows = (0..self.n_rows())
            .map(|r| idx.iter().map(|&c| self.get(r, c)).collect())
            .collect();
        ScoreMatrix::new(self.row_ids.clone(), keep.to_vec(), rows)
    }

    pub fn without(&self, d: Direction) -> ScoreMatrix {
        let keep: Vec<Direction> = self.directions.iter().copied().filter(|&x| x != d).collect();
        self.select(&keep)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Averaging {
    OneVsRest,
    Uniform,
}

impl Averaging {
    pub fn as_str(self) -> &'static str {
        match self {
            Averaging::OneVsRest => "one-vs-rest",
            Averaging::Uniform => "uniform",
        }
    }
}

impl std::str::FromStr for Averaging {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "one-vs-rest" => Ok(Averaging::OneVsRest),
            "uniform" => Ok(Averaging::Uniform),
            _ => Err(format!("unknown averaging {s:?} (one-vs-rest|uniform)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightProvenance {
    OneVsRest,
    UniformAvg,
}

/// Non-negative direction weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionWeights {
    directions: Vec<Direction>,
    weights: Vec<f64>,
    pub provenance: WeightProvenance,
}

impl DirectionWeights {
    pub fn uniform(directions: &[Direction]) -> Self {
        DirectionWeights {
            directions: directions.to_vec(),
            weights: vec![1.0 / directions.len() as f64; directions.len()],
            provenance: WeightProvenance::UniformAvg,
        }
    }

    /// Weights given explicitly; they must be non-negative and are
    /// normalized to sum to one.
    pub fn from_pairs(pairs: &[(Direction, f64)]) -> Result<Self, PipelineError> {
        let total: f64 = pairs.iter().map(|(_, w)| w).sum();
        if pairs.iter().any(|(_, w)| w.is_nan() || *w < 0.0) || total.is_nan() || total <= 0.0 {
            return Err(PipelineError::WeightMismatch(
                "weights must be non-negative with a positive sum".into(),
            ));
        }
        Ok(DirectionWeights {
            directions: pairs.iter().map(|(d, _)| *d).collect(),
            weights: pairs.iter().map(|(_, w)| w / total).collect(),
            provenance: WeightProvenance::OneVsRest,
        })
    }

    pub fn get(&self, d: Direction) -> Option<f64> {
        self.directions.iter().position(|&x| x == d).map(|i| self.weights[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Direction, f64)> + '_ {
        self.directions.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Weights keyed by direction name, in a stable order.
    pub fn to_map(&self) -> BTreeMap<String, f64> {
        self.iter().map(|(d, w)| (d.to_string(), w)).collect()
    }
}

/// Correlation used for direction weighting: zero when a column is constant.
fn agreement(a: &[f64], b: &[f64]) -> f64 {
    pearson(a, b).unwrap_or(0.0)
}

/// One-vs-rest direction weights over the whole matrix.
pub fn one_vs_rest_weights(matrix: &ScoreMatrix) -> Result<DirectionWeights, PipelineError> {
    if matrix.n_rows() < 3 {
        return Err(PipelineError::InsufficientData(format!(
            "one-vs-rest weighting needs at least 3 scored rows, got {}",
            matrix.n_rows()
        )));
    }
    if matrix.n_cols() < 2 {
        return Err(PipelineError::InsufficientData(
            "one-vs-rest weighting needs at least 2 directions".into(),
        ));
    }
    let columns: Vec<Vec<f64>> = (0..matrix.n_cols()).map(|c| matrix.column(c)).collect();
    let raw: Vec<f64> = (0..columns.len())
        .map(|i| {
            (0..columns.len())
                .filter(|&j| j != i)
                .map(|j| agreement(&columns[i], &columns[j]))
                .sum::<f64>()
                .max(0.0)
        })
        .collect();
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        return Ok(DirectionWeights::uniform(&matrix.directions));
    }
    Ok(DirectionWeights {
        directions: matrix.directions.clone(),
        weights: raw.iter().map(|w| w / total).collect(),
        provenance: WeightProvenance::OneVsRest,
    })
}

pub fn direction_weights(matrix: &ScoreMatrix, averaging: Averaging) -> Result<DirectionWeights, PipelineError> {
    match averaging {
        Averaging::OneVsRest => one_vs_rest_weights(matrix),
        Averaging::Uniform => Ok(DirectionWeights::uniform(&matrix.directions)),
    }
}

/// Weighted average of each row: `sum_d weight(d) * cell(row, d)`.
pub fn datscore(matrix: &ScoreMatrix, weights: &DirectionWeights) -> Result<Vec<f64>, PipelineError> {
    let per_col: Vec<f64> = matrix
        .directions
        .iter()
        .map(|&d| {
            weights
                .get(d)
                .ok_or_else(|| PipelineError::WeightMismatch(format!("no weight for {d}")))
        })
        .collect::<Result<_, _>>()?;
    if weights.len() != matrix.n_cols() {
        return Err(PipelineError::WeightMismatch(format!(
            "{} weights for {} directions",
            weights.len(),
            matrix.n_cols()
        )));
    }
    Ok((0..matrix.n_rows())
        .map(|r| matrix.row(r).iter().zip(&per_col).map(|(c, w)| c * w).sum())
        .collect())
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub directions: DirectionSet,
    pub term_scheme: TermScheme,
    pub normalization: Normalization,
    pub averaging: Averaging,
    pub augment: AugmentPolicy,
    pub fill: FillOptions,
}

impl PipelineConfig {
    pub fn new(mode: Mode) -> Self {
        PipelineConfig {
            directions: DirectionSet::full(mode),
            term_scheme: TermScheme::Entropy,
            normalization: Normalization::Mean,
            averaging: Averaging::OneVsRest,
            augment: AugmentPolicy::default(),
            fill: FillOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    /// Input dataset with augmentations filled in.
    pub dataset: Vec<EvalExample>,
    pub traces: TraceMatrix,
    pub matrix: ScoreMatrix,
    pub weights: DirectionWeights,
    pub scores: Vec<f64>,
}

impl RunOutput {
    pub fn rows(&self) -> Vec<ScoreRow<'_>> {
        self.matrix
            .row_ids
            .iter()
            .zip(&self.scores)
            .enumerate()
            .map(|(r, (id, &datscore))| ScoreRow {
                id,
                datscore,
                directions: &self.matrix.directions,
                per_direction: self.matrix.row(r),
            })
            .collect()
    }

    /// Scores as JSON Lines, one row per scored hypothesis.
    pub fn write_scores<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for row in self.rows() {
            serde_json::to_writer(&mut out, &row)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// `{"id":str,"datscore":num,"per_direction":{"src->hypo":num,...}}`
#[derive(Debug, Clone, Copy)]
pub struct ScoreRow<'a> {
    pub id: &'a str,
    pub datscore: f64,
    pub directions: &'a [Direction],
    pub per_direction: &'a [f64],
}

struct PerDirection<'a>(&'a [Direction], &'a [f64]);

impl Serialize for PerDirection<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (d, v) in self.0.iter().zip(self.1) {
            map.serialize_entry(&d.to_string(), v)?;
        }
        map.end()
    }
}

impl Serialize for ScoreRow<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(3))?;
        map.serialize_entry("id", self.id)?;
        map.serialize_entry("datscore", &self.datscore)?;
        map.serialize_entry("per_direction", &PerDirection(self.directions, self.per_direction))?;
        map.end()
    }
}

/// Reads a scores file back into `id -> datscore`.
pub fn read_scores(text: &str) -> Result<BTreeMap<String, f64>, String> {
    #[derive(Deserialize)]
    struct Row {
        id: String,
        datscore: f64,
    }
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Row = serde_json::from_str(line).map_err(|e| format!("line {}: {e}", i + 1))?;
        if out.insert(row.id.clone(), row.datscore).is_some() {
            return Err(format!("line {}: duplicate id {}", i + 1, row.id));
        }
    }
    Ok(out)
}

/// Full run: augment, fill the trace matrix, weight, average.
pub fn run(dataset: &[EvalExample], backend: &dyn Backend, config: &PipelineConfig) -> Result<RunOutput, PipelineError> {
    let dataset = augment_dataset(
        dataset,
        &config.augment,
        backend,
        &config.directions,
        config.fill.workers,
    )?;
    let traces = collect_traces(&dataset, &config.directions, backend, &config.fill)?;
    let matrix = traces.scores(config.term_scheme, config.normalization);
    let weights = direction_weights(&matrix, config.averaging)?;
    let scores = datscore(&matrix, &weights)?;
    Ok(RunOutput {
        dataset,
        traces,
        matrix,
        weights,
        scores,
    })
}

impl fmt::Display for DirectionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.directions.iter().map(|d| d.to_string()).collect();
        write!(f, "{} [{}]", self.mode.as_str(), names.join(", "))
    }
}
