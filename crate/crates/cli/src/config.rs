//! Run configuration: JSON file merged with command-line flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use datscore::backend::http::HttpBackend;
use datscore::backend::toy::ToyBackend;
use datscore::backend::trace::TraceBackend;
use datscore::meta::TiePolicy;
use datscore::pipeline::{AugmentPolicy, Averaging, DirectionSet, FillOptions, Mode, PipelineConfig};
use datscore::scoring::{Normalization, TermScheme};
use datscore::{Backend, Direction, LanguageCode};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_BATCH_SIZE: usize = 16;

/// Every field is optional so a file and a set of flags can be layered.
/// After [`RunConfig::resolve`] all fields except the augmentation languages
/// and the dataset are set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub backend: Option<String>,
    pub mode: Option<Mode>,
    pub term_weighting: Option<TermScheme>,
    pub averaging: Option<Averaging>,
    pub raw_sum: Option<bool>,
    pub tie_policy: Option<TiePolicy>,
    pub include: Option<Vec<Direction>>,
    pub exclude: Option<Vec<Direction>>,
    pub trans1_lang: Option<LanguageCode>,
    pub trans2_lang: Option<LanguageCode>,
    pub seed: Option<u64>,
    pub batch_size: Option<usize>,
    pub dataset: Option<PathBuf>,
}

impl RunConfig {
    /// Reads a config file. A run manifest is accepted too; its `config`
    /// member is used.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        let mut value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))?;
        if let Some(inner) = value.get_mut("config").filter(|v| v.is_object()) {
            value = inner.take();
        }
        serde_json::from_value(value).map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))
    }

    /// Fields set in `self` win over `lower`.
    pub fn over(self, lower: RunConfig) -> RunConfig {
        RunConfig {
            backend: self.backend.or(lower.backend),
            mode: self.mode.or(lower.mode),
            term_weighting: self.term_weighting.or(lower.term_weighting),
            averaging: self.averaging.or(lower.averaging),
            raw_sum: self.raw_sum.or(lower.raw_sum),
            tie_policy: self.tie_policy.or(lower.tie_policy),
            include: self.include.or(lower.include),
            exclude: self.exclude.or(lower.exclude),
            trans1_lang: self.trans1_lang.or(lower.trans1_lang),
            trans2_lang: self.trans2_lang.or(lower.trans2_lang),
            seed: self.seed.or(lower.seed),
            batch_size: self.batch_size.or(lower.batch_size),
            dataset: self.dataset.or(lower.dataset),
        }
    }

    pub fn resolve(self) -> Result<RunConfig, CliError> {
        let c = RunConfig {
            backend: self.backend.or(Some("toy".into())),
            mode: self.mode.or(Some(Mode::Mt8)),
            term_weighting: self.term_weighting.or(Some(TermScheme::Entropy)),
            averaging: self.averaging.or(Some(Averaging::OneVsRest)),
            raw_sum: self.raw_sum.or(Some(false)),
            tie_policy: self.tie_policy.or(Some(TiePolicy::Discordant)),
            include: self.include.or(Some(Vec::new())),
            exclude: self.exclude.or(Some(Vec::new())),
            seed: self.seed.or(Some(DEFAULT_SEED)),
            batch_size: self.batch_size.or(Some(DEFAULT_BATCH_SIZE)),
            ..self
        };
        if c.batch_size == Some(0) {
            return Err(CliError::Input("batch_size must be at least 1".into()));
        }
        BackendSpec::from_str(c.backend())?;
        c.direction_set()?;
        Ok(c)
    }

    pub fn backend(&self) -> &str {
        self.backend.as_deref().unwrap_or("toy")
    }

    pub fn mode(&self) -> Mode {
        self.mode.unwrap_or(Mode::Mt8)
    }

    pub fn tie_policy(&self) -> TiePolicy {
        self.tie_policy.unwrap_or_default()
    }

    pub fn dataset(&self) -> Result<&Path, CliError> {
        self.dataset
            .as_deref()
            .ok_or_else(|| CliError::Input("no dataset given (--dataset or \"dataset\" in the config)".into()))
    }

    pub fn direction_set(&self) -> Result<DirectionSet, CliError> {
        let none = Vec::new();
        DirectionSet::subset(
            self.mode(),
            self.include.as_ref().unwrap_or(&none),
            self.exclude.as_ref().unwrap_or(&none),
        )
        .map_err(|e| CliError::Input(e.to_string()))
    }

    pub fn pipeline_config(&self, workers: usize) -> Result<PipelineConfig, CliError> {
        let mut p = PipelineConfig::new(self.mode());
        p.directions = self.direction_set()?;
        p.term_scheme = self.term_weighting.unwrap_or(TermScheme::Entropy);
        p.averaging = self.averaging.unwrap_or(Averaging::OneVsRest);
        p.normalization = if self.raw_sum == Some(true) {
            Normalization::RawSum
        } else {
            Normalization::Mean
        };
        p.augment = AugmentPolicy {
            trans1: self.trans1_lang.clone(),
            trans2: self.trans2_lang.clone(),
        };
        p.fill = FillOptions {
            workers: workers.max(1),
            batch_size: self.batch_size.unwrap_or(DEFAULT_BATCH_SIZE),
            ..FillOptions::default()
        };
        Ok(p)
    }

    pub fn open_backend(&self) -> Result<Box<dyn Backend>, CliError> {
        BackendSpec::from_str(self.backend())?.open(self.batch_size.unwrap_or(DEFAULT_BATCH_SIZE))
    }
}

/// `toy`, `trace:<path>` or `http:<url>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackendSpec {
    Toy,
    Trace(PathBuf),
    Http(String),
}

impl FromStr for BackendSpec {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        if s == "toy" {
            return Ok(BackendSpec::Toy);
        }
        if let Some(path) = s.strip_prefix("trace:").filter(|p| !p.is_empty()) {
            return Ok(BackendSpec::Trace(path.into()));
        }
        if s.starts_with("http://") || s.starts_with("https://") {
            return Ok(BackendSpec::Http(s.into()));
        }
        if let Some(url) = s.strip_prefix("http:").filter(|u| !u.is_empty()) {
            return Ok(BackendSpec::Http(url.into()));
        }
        Err(CliError::Input(format!(
            "unknown backend {s:?} (toy | trace:<path> | http:<url>)"
        )))
    }
}

impl BackendSpec {
    pub fn open(&self, batch_size: usize) -> Result<Box<dyn Backend>, CliError> {
        Ok(match self {
            BackendSpec::Toy => Box::new(ToyBackend::fixture()),
            BackendSpec::Trace(path) => Box::new(
                TraceBackend::open(path)
                    .map_err(|e| CliError::Input(format!("trace file {}: {e}", path.display())))?,
            ),
            BackendSpec::Http(url) => Box::new(HttpBackend::new(url.as_str()).with_batch_size(batch_size)),
        })
    }
}
