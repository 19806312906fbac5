//! Ablation report: how much each direction and each weighting strategy
//! contributes to the correlation with human judgments.
//!
//! All cells are derived from one trace matrix, so the backend is queried
//! once per (hypothesis, direction) regardless of how many cells the report
//! has.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::backend::Backend;
use crate::meta::{correlate, summarize, CorrelationKind, MetaError, TiePolicy};
use crate::model::{Direction, EvalExample};
use crate::parallel::ordered_map;
use crate::pipeline::{
    augment_dataset, collect_traces, datscore, direction_weights, Averaging, Mode, PipelineConfig, ScoreMatrix,
    TraceMatrix,
};
use crate::scoring::{Normalization, TermScheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Section {
    /// The configured metric over all directions.
    Full,
    /// One direction alone.
    Single,
    /// All directions but one.
    LeaveOneOut,
    /// Entropy weighting on/off crossed with one-vs-rest on/off.
    Weighting,
}

impl Section {
    pub fn as_str(self) -> &'static str {
        match self {
            Section::Full => "full",
            Section::Single => "single",
            Section::LeaveOneOut => "leave-one-out",
            Section::Weighting => "weighting",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationCell {
    pub section: Section,
    pub label: String,
    pub term_weighting: TermScheme,
    /// `one-vs-rest`, `uniform`, or `none` for single-direction cells.
    pub averaging: String,
    pub directions: Vec<String>,
    /// `None` when language pairs mix correlation kinds.
    pub kind: Option<CorrelationKind>,
    /// Mean over language pairs.
    pub value: f64,
    pub groups: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationReport {
    pub mode: Mode,
    pub normalization: Normalization,
    pub tie_policy: TiePolicy,
    pub cells: Vec<AblationCell>,
}

impl AblationReport {
    pub fn section(&self, section: Section) -> impl Iterator<Item = &AblationCell> {
        self.cells.iter().filter(move |c| c.section == section)
    }

    pub fn full(&self) -> &AblationCell {
        self.section(Section::Full).next().expect("report has a full cell")
    }

    pub fn weighting(&self, term: TermScheme, averaging: Averaging) -> Option<&AblationCell> {
        self.section(Section::Weighting)
            .find(|c| c.term_weighting == term && c.averaging == averaging.as_str())
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("section\tlabel\tterm_weighting\taveraging\tdirections\tkind\tvalue\tgroups\n");
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                c.section.as_str(),
                c.label,
                c.term_weighting.as_str(),
                c.averaging,
                c.directions.join(","),
                c.kind.map_or("mixed", CorrelationKind::as_str),
                c.value,
                c.groups
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Aligned plain-text table.
    pub fn render(&self) -> String {
        let header = ["section", "label", "terms", "averaging", "kind", "value"];
        let rows: Vec<[String; 6]> = self
            .cells
            .iter()
            .map(|c| {
                [
                    c.section.as_str().to_string(),
                    c.label.clone(),
                    c.term_weighting.as_str().to_string(),
                    c.averaging.clone(),
                    c.kind.map_or("mixed", CorrelationKind::as_str).to_string(),
                    format!("{:.4}", c.value),
                ]
            })
            .collect();
        let mut widths = header.map(str::len);
        for r in &rows {
            for (w, cell) in widths.iter_mut().zip(r) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let mut line = |cells: Vec<&str>| {
            let parts: Vec<String> = cells
                .iter()
                .zip(widths)
                .enumerate()
                .map(|(i, (c, w))| if i == 5 { format!("{c:>w$}") } else { format!("{c:<w$}") })
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(header.to_vec());
        for r in &rows {
            line(r.iter().map(String::as_str).collect());
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
enum Job {
    Full,
    Single(Direction),
    LeaveOut(Direction),
    Grid(TermScheme, Averaging),
}

/// Augments, fills the trace matrix once, then evaluates every cell.
pub fn ablation_report(
    dataset: &[EvalExample],
    backend: &dyn Backend,
    config: &PipelineConfig,
    tie_policy: TiePolicy,
) -> Result<AblationReport, MetaError> {
    let dataset = augment_dataset(dataset, &config.augment, backend, &config.directions, config.fill.workers)?;
    let traces = collect_traces(&dataset, &config.directions, backend, &config.fill)?;
    ablation_from_traces(&dataset, &traces, config, tie_policy)
}

pub fn ablation_from_traces(
    dataset: &[EvalExample],
    traces: &TraceMatrix,
    config: &PipelineConfig,
    tie_policy: TiePolicy,
) -> Result<AblationReport, MetaError> {
    let norm = config.normalization;
    let uniform = traces.scores(TermScheme::Uniform, norm);
    let entropy = traces.scores(TermScheme::Entropy, norm);
    let matrix_for = |scheme| match scheme {
        TermScheme::Uniform => &uniform,
        TermScheme::Entropy => &entropy,
    };
    let base = matrix_for(config.term_scheme);

    let mut jobs = vec![Job::Full];
    jobs.extend(traces.directions.iter().map(|&d| Job::Single(d)));
    if traces.directions.len() > 1 {
        jobs.extend(traces.directions.iter().map(|&d| Job::LeaveOut(d)));
    }
    for scheme in [TermScheme::Entropy, TermScheme::Uniform] {
        for averaging in [Averaging::OneVsRest, Averaging::Uniform] {
            jobs.push(Job::Grid(scheme, averaging));
        }
    }

    let names = |ds: &[Direction]| ds.iter().map(|d| d.to_string()).collect::<Vec<_>>();
    let evaluate = |job: &Job| -> Result<AblationCell, MetaError> {
        let (section, label, scheme, averaging, matrix): (Section, String, TermScheme, Option<Averaging>, ScoreMatrix) =
            match *job {
                Job::Full => (Section::Full, "all".into(), config.term_scheme, Some(config.averaging), base.clone()),
                Job::Single(d) => (Section::Single, d.to_string(), config.term_scheme, None, base.select(&[d])),
                Job::LeaveOut(d) => (
                    Section::LeaveOneOut,
                    format!("without {d}"),
                    config.term_scheme,
                    Some(config.averaging),
                    base.without(d),
                ),
                Job::Grid(s, a) => (
                    Section::Weighting,
                    format!("{}+{}", s.as_str(), a.as_str()),
                    s,
                    Some(a),
                    matrix_for(s).clone(),
                ),
            };
        let scores = match averaging {
            Some(a) if matrix.n_cols() > 1 => {
                let w = direction_weights(&matrix, a)?;
                datscore(&matrix, &w)?
            }
            _ => matrix.column(0),
        };
        let by_id: BTreeMap<String, f64> = matrix.row_ids.iter().cloned().zip(scores).collect();
        let groups = correlate(dataset, &by_id, tie_policy)?;
        let (value, kind) = summarize(&groups);
        Ok(AblationCell {
            section,
            label,
            term_weighting: scheme,
            averaging: averaging.map_or("none", Averaging::as_str).to_string(),
            directions: names(&matrix.directions),
            kind,
            value,
            groups: groups.len(),
        })
    };
    let cells = ordered_map(&jobs, config.fill.workers, evaluate)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;

    Ok(AblationReport {
        mode: config.directions.mode,
        normalization: norm,
        tie_policy,
        cells,
    })
}
