//! Sources of forced-decoding traces and translations.
//!
//! Three implementations share the [`Backend`] trait: a deterministic
//! lexical toy model ([`toy`]), a reader for pre-computed trace files
//! ([`trace`]) and, with the `http` feature, a client for an external
//! inference service ([`http`]).

#[cfg(feature = "http")]
pub mod http;
pub mod toy;
pub mod trace;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Direction, LanguageCode};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error("empty trace")]
    Empty,
    #[error("array lengths differ: {tokens} tokens, {logprobs} logprobs, {entropies} entropies")]
    LengthMismatch {
        tokens: usize,
        logprobs: usize,
        entropies: usize,
    },
    #[error("logprob > 0 at step {0}")]
    PositiveLogprob(usize),
    #[error("non-finite logprob at step {0}")]
    NonFiniteLogprob(usize),
    #[error("entropy outside [0, {max}] at step {step}")]
    EntropyOutOfRange { step: usize, max: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BackendError {
    #[error("unsupported language: {0}")]
    UnsupportedLanguage(String),
    #[error("empty input text")]
    EmptyInput,
    #[error("backend unavailable: {0}")]
    Unavailable(String),
    #[error("backend rejected request: {0}")]
    Rejected(String),
    #[error("backend cannot translate (trace files hold scores only)")]
    TranslateUnsupported,
    #[error("no trace for {unit_id} {direction}")]
    MissingTrace { unit_id: String, direction: Direction },
    #[error("invalid trace: {0}")]
    InvalidTrace(#[from] TraceError),
}

impl BackendError {
    /// Transport-level failures that a retry may fix.
    pub fn is_retryable(&self) -> bool {
        matches!(self, BackendError::Unavailable(_))
    }
}

/// Per-step record of teacher-forcing one target sequence.
///
/// `logprobs[t]` is the natural-log probability of `tokens[t]` given the
/// input and the preceding target tokens; `entropies[t]` is the Shannon
/// entropy (nats) of the full step distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenTrace {
    pub tokens: Vec<String>,
    pub logprobs: Vec<f64>,
    pub entropies: Vec<f64>,
}

impl TokenTrace {
    pub fn new(
        tokens: Vec<String>,
        logprobs: Vec<f64>,
        entropies: Vec<f64>,
    ) -> Result<Self, TraceError> {
        let trace = TokenTrace {
            tokens,
            logprobs,
            entropies,
        };
        trace.validate(None)?;
        Ok(trace)
    }

    /// Checks shape and value invariants; `vocab_size` bounds entropies by
    /// `ln v` when the producing backend declares one.
    pub fn validate(&self, vocab_size: Option<usize>) -> Result<(), TraceError> {
        let (n_tok, n_lp, n_ent) = (self.tokens.len(), self.logprobs.len(), self.entropies.len());
        if n_tok != n_lp || n_tok != n_ent {
            return Err(TraceError::LengthMismatch {
                tokens: n_tok,
                logprobs: n_lp,
                entropies: n_ent,
            });
        }
        if n_tok == 0 {
            return Err(TraceError::Empty);
        }
        for (t, &lp) in self.logprobs.iter().enumerate() {
            if !lp.is_finite() {
                return Err(TraceError::NonFiniteLogprob(t));
            }
            if lp > 0.0 {
                return Err(TraceError::PositiveLogprob(t));
            }
        }
        // Backends compute entropies in floating point; allow rounding slack
        // at the ln v ceiling.
        let max = vocab_size.map_or(f64::INFINITY, |v| (v as f64).ln());
        for (t, &h) in self.entropies.iter().enumerate() {
            if !(h >= 0.0 && h <= max + 1e-9) || !h.is_finite() {
                return Err(TraceError::EntropyOutOfRange { step: t, max });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// `ln P(Y | X)`, the sum of per-step log-probabilities.
    pub fn sequence_logprob(&self) -> f64 {
        self.logprobs.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreRequest {
    pub input_text: String,
    pub input_lang: LanguageCode,
    pub output_text: String,
    pub output_lang: LanguageCode,
}

impl ScoreRequest {
    pub fn check_non_empty(&self) -> Result<(), BackendError> {
        if self.input_text.trim().is_empty() || self.output_text.trim().is_empty() {
            Err(BackendError::EmptyInput)
        } else {
            Ok(())
        }
    }
}

/// Identifies one cell of a score matrix. Backends that compute scores from
/// text ignore it; the trace-file backend looks traces up by it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellKey {
    pub unit_id: String,
    pub direction: Direction,
}

pub trait Backend: Send + Sync {
    /// Stable description recorded in run manifests.
    fn identity(&self) -> String;

    fn forced_score(&self, key: &CellKey, req: &ScoreRequest) -> Result<TokenTrace, BackendError>;

    /// Scores several requests; results are returned in input order.
    fn forced_score_batch(
        &self,
        items: &[(CellKey, ScoreRequest)],
    ) -> Vec<Result<TokenTrace, BackendError>> {
        items
            .iter()
            .map(|(key, req)| self.forced_score(key, req))
            .collect()
    }

    fn translate(
        &self,
        text: &str,
        src_lang: &LanguageCode,
        tgt_lang: &LanguageCode,
    ) -> Result<String, BackendError>;

    /// Output vocabulary size for `lang`, when the backend knows it.
    fn vocab_size(&self, _lang: &LanguageCode) -> Option<usize> {
        None
    }
}
