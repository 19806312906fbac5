//! Client for an inference service speaking the JSON bridge protocol:
//!
//! * `POST /v1/score` `{"input_text","input_lang","output_text","output_lang"}`
//!   -> `{"tokens":[..],"logprobs":[..],"entropies":[..]}`; a JSON array of
//!   requests returns an array of traces in the same order.
//! * `POST /v1/translate` `{"text","src_lang","tgt_lang"}` -> `{"translation":str}`.
//!
//! Errors come back as 4xx/5xx with `{"error":str}`. Transport failures,
//! 5xx and malformed bodies are retried with exponential backoff; 4xx is not.

use std::thread;
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::backend::{Backend, BackendError, CellKey, ScoreRequest, TokenTrace};
use crate::model::LanguageCode;

pub const DEFAULT_BATCH_SIZE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub initial_backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            attempts: 3,
            initial_backoff: Duration::from_millis(250),
        }
    }
}

#[derive(Debug, Serialize)]
struct TranslateBody<'a> {
    text: &'a str,
    src_lang: &'a str,
    tgt_lang: &'a str,
}

#[derive(Debug, Deserialize)]
struct TranslateReply {
    translation: String,
}

#[derive(Debug, Deserialize)]
struct ErrorReply {
    error: String,
}

pub struct HttpBackend {
    base_url: String,
    agent: ureq::Agent,
    batch_size: usize,
    retry: RetryPolicy,
}

impl HttpBackend {
    pub fn new(base_url: impl Into<String>) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(300)))
            .build()
            .new_agent();
        HttpBackend {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            agent,
            batch_size: DEFAULT_BATCH_SIZE,
            retry: RetryPolicy::default(),
        }
    }

    pub fn with_batch_size(mut self, batch_size: usize) -> Self {
        self.batch_size = batch_size.max(1);
        self
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    fn post_once<B: Serialize + ?Sized, R: DeserializeOwned>(
        &self,
        path: &str,
        body: &B,
    ) -> Result<R, BackendError> {
        let url = format!("{}{}", self.base_url, path);
        let mut resp = self
            .agent
            .post(&url)
            .send_json(body)
            .map_err(|e| BackendError::Unavailable(format!("{url}: {e}")))?;
        let status = resp.status().as_u16();
        if (200..300).contains(&status) {
            return resp
                .body_mut()
                .read_json::<R>()
                .map_err(|e| BackendError::Unavailable(format!("{url}: malformed response: {e}")));
        }
        let message = resp
            .body_mut()
            .read_json::<ErrorReply>()
            .map(|r| r.error)
            .unwrap_or_else(|_| format!("http status {status}"));
        if status >= 500 {
            Err(BackendError::Unavailable(format!("{url}: {status} {message}")))
        } else {
            Err(BackendError::Rejected(message))
        }
    }

    fn post<B: Serialize + ?Sized, R: DeserializeOwned>(
        &self,
        path: &str,
        body: &B,
    ) -> Result<R, BackendError> {
        let mut delay = self.retry.initial_backoff;
        let mut attempt = 1;
        loop {
            match self.post_once(path, body) {
                Err(e) if e.is_retryable() && attempt < self.retry.attempts => {
                    log::warn!("{e}; retrying in {delay:?}");
                    thread::sleep(delay);
                    delay *= 2;
                    attempt += 1;
                }
                other => return other,
            }
        }
    }

    fn check_trace(&self, trace: TokenTrace, req: &ScoreRequest) -> Result<TokenTrace, BackendError> {
        trace.validate(self.vocab_size(&req.output_lang))?;
        Ok(trace)
    }
}

impl Backend for HttpBackend {
    fn identity(&self) -> String {
        format!("http:{}", self.base_url)
    }

    fn forced_score(&self, _key: &CellKey, req: &ScoreRequest) -> Result<TokenTrace, BackendError> {
        req.check_non_empty()?;
        let trace: TokenTrace = self.post("/v1/score", req)?;
        self.check_trace(trace, req)
    }

    fn forced_score_batch(
        &self,
        items: &[(CellKey, ScoreRequest)],
    ) -> Vec<Result<TokenTrace, BackendError>> {
        let mut out = Vec::with_capacity(items.len());
        for chunk in items.chunks(self.batch_size) {
            if let Some(bad) = chunk.iter().position(|(_, r)| r.check_non_empty().is_err()) {
                // Keep the rest of the chunk usable; score it item by item.
                log::debug!("empty input at batch position {bad}; scoring chunk individually");
                out.extend(chunk.iter().map(|(k, r)| self.forced_score(k, r)));
                continue;
            }
            let body: Vec<&ScoreRequest> = chunk.iter().map(|(_, r)| r).collect();
            match self.post::<_, Vec<TokenTrace>>("/v1/score", &body) {
                Ok(traces) if traces.len() == chunk.len() => out.extend(
                    traces
                        .into_iter()
                        .zip(chunk)
                        .map(|(t, (_, r))| self.check_trace(t, r)),
                ),
                Ok(traces) => {
                    let e = BackendError::Unavailable(format!(
                        "batch of {} returned {} traces",
                        chunk.len(),
                        traces.len()
                    ));
                    out.extend(chunk.iter().map(|_| Err(e.clone())));
                }
                // One rejected request fails the whole batch; find it.
                Err(BackendError::Rejected(_)) => {
                    out.extend(chunk.iter().map(|(k, r)| self.forced_score(k, r)))
                }
                Err(e) => out.extend(chunk.iter().map(|_| Err(e.clone()))),
            }
        }
        out
    }

    fn translate(
        &self,
        text: &str,
        src_lang: &LanguageCode,
        tgt_lang: &LanguageCode,
    ) -> Result<String, BackendError> {
        if text.trim().is_empty() {
            return Err(BackendError::EmptyInput);
        }
        let body = TranslateBody {
            text,
            src_lang: src_lang.as_str(),
            tgt_lang: tgt_lang.as_str(),
        };
        let reply: TranslateReply = self.post("/v1/translate", &body)?;
        if reply.translation.trim().is_empty() {
            return Err(BackendError::Unavailable("empty translation".into()));
        }
        Ok(reply.translation)
    }
}
