//! Pre-computed traces stored as JSON Lines, one record per
//! `(example_id, direction)`:
//!
//! ```text
//! {"example_id":str,"from":str,"to":str,"tokens":[str],"logprobs":[num],"entropies":[num]}
//! ```

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::backend::{Backend, BackendError, CellKey, ScoreRequest, TokenTrace, TraceError};
use crate::model::{Direction, EntityKind, LanguageCode};

#[derive(Debug, Error)]
pub enum TraceFileError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate trace for {example_id} {direction}")]
    Duplicate {
        line: usize,
        example_id: String,
        direction: Direction,
    },
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: TraceError },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TraceRecord {
    example_id: String,
    from: EntityKind,
    to: EntityKind,
    tokens: Vec<String>,
    logprobs: Vec<f64>,
    entropies: Vec<f64>,
}

/// Read-only map from `(example_id, direction)` to a validated trace.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TraceStore {
    traces: BTreeMap<(String, Direction), TokenTrace>,
}

impl TraceStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        example_id: impl Into<String>,
        direction: Direction,
        trace: TokenTrace,
    ) -> Option<TokenTrace> {
        self.traces.insert((example_id.into(), direction), trace)
    }

    pub fn get(&self, example_id: &str, direction: Direction) -> Option<&TokenTrace> {
        self.traces.get(&(example_id.to_string(), direction))
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Direction, &TokenTrace)> {
        self.traces.iter().map(|((id, d), t)| (id.as_str(), *d, t))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TraceFileError> {
        Self::read(BufReader::new(File::open(path)?))
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self, TraceFileError> {
        let mut store = TraceStore::new();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: TraceRecord = serde_json::from_str(&line).map_err(|e| TraceFileError::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            let direction = Direction::new(rec.from, rec.to).map_err(|message| {
                TraceFileError::Parse {
                    line: line_no,
                    message,
                }
            })?;
            let trace = TokenTrace::new(rec.tokens, rec.logprobs, rec.entropies)
                .map_err(|source| TraceFileError::Invalid {
                    line: line_no,
                    source,
                })?;
            if store.get(&rec.example_id, direction).is_some() {
                return Err(TraceFileError::Duplicate {
                    line: line_no,
                    example_id: rec.example_id,
                    direction,
                });
            }
            store.insert(rec.example_id, direction, trace);
        }
        Ok(store)
    }

    /// Writes records in key order, one JSON object per line.
    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for ((id, d), t) in &self.traces {
            let rec = TraceRecord {
                example_id: id.clone(),
                from: d.from,
                to: d.to,
                tokens: t.tokens.clone(),
                logprobs: t.logprobs.clone(),
                entropies: t.entropies.clone(),
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }
}

/// Serves scores from a [`TraceStore`]. Cannot translate.
#[derive(Debug, Clone)]
pub struct TraceBackend {
    store: TraceStore,
    identity: String,
}

impl TraceBackend {
    pub fn new(store: TraceStore, identity: impl Into<String>) -> Self {
        TraceBackend {
            store,
            identity: identity.into(),
        }
    }

    /// Loads a trace file; the identity records the path and content hash.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, TraceFileError> {
        let path = path.as_ref();
        let bytes = std::fs::read(path)?;
        let store = TraceStore::read(bytes.as_slice())?;
        let digest = hex::encode(Sha256::digest(&bytes));
        Ok(TraceBackend::new(
            store,
            format!("trace:{} sha256:{digest}", path.display()),
        ))
    }

    pub fn store(&self) -> &TraceStore {
        &self.store
    }
}

impl Backend for TraceBackend {
    fn identity(&self) -> String {
        self.identity.clone()
    }

    fn forced_score(&self, key: &CellKey, _req: &ScoreRequest) -> Result<TokenTrace, BackendError> {
        self.store
            .get(&key.unit_id, key.direction)
            .cloned()
            .ok_or_else(|| BackendError::MissingTrace {
                unit_id: key.unit_id.clone(),
                direction: key.direction,
            })
    }

    fn translate(
        &self,
        _text: &str,
        _src_lang: &LanguageCode,
        _tgt_lang: &LanguageCode,
    ) -> Result<String, BackendError> {
        Err(BackendError::TranslateUnsupported)
    }
}
