//! Per-direction scores: a weighted sum of the forced-decoding
//! log-probabilities of the target tokens.
//!
//! Weights are either uniform or proportional to the entropy of each step
//! distribution, so that steps the model was unsure about (content words)
//! count more than steps it was sure about (function words). By default the
//! weights are normalized to sum to one, which turns every score into a
//! weighted mean log-probability and makes sequences of different lengths
//! comparable. [`Normalization::RawSum`] keeps the unnormalized weights.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::TokenTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermScheme {
    Uniform,
    Entropy,
}

impl TermScheme {
    pub fn as_str(self) -> &'static str {
        match self {
            TermScheme::Uniform => "uniform",
            TermScheme::Entropy => "entropy",
        }
    }
}

impl std::str::FromStr for TermScheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(TermScheme::Uniform),
            "entropy" => Ok(TermScheme::Entropy),
            _ => Err(format!("unknown term weighting {s:?} (uniform|entropy)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Weights sum to one.
    #[default]
    Mean,
    /// Uniform weights are all one, entropy weights are the raw entropies.
    RawSum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermWeights {
    pub weights: Vec<f64>,
    pub scheme: TermScheme,
    pub normalization: Normalization,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScoringError {
    #[error("{weights} weights for a trace of {steps} steps")]
    LengthMismatch { weights: usize, steps: usize },
}

pub fn term_weights(trace: &TokenTrace, scheme: TermScheme, normalization: Normalization) -> TermWeights {
    let m = trace.len();
    let uniform = |normalization| match normalization {
        Normalization::Mean => vec![1.0 / m as f64; m],
        Normalization::RawSum => vec![1.0; m],
    };
    let weights = match scheme {
        TermScheme::Uniform => uniform(normalization),
        TermScheme::Entropy => {
            let total: f64 = trace.entropies.iter().sum();
            if total <= 0.0 {
                // A fully confident model gives no signal to rank steps by.
                uniform(normalization)
            } else {
                match normalization {
                    Normalization::Mean => trace.entropies.iter().map(|h| h / total).collect(),
                    Normalization::RawSum => trace.entropies.clone(),
                }
            }
        }
    };
    TermWeights {
        weights,
        scheme,
        normalization,
    }
}

/// `sum_t w_t * logprobs[t]`.
pub fn direction_score(trace: &TokenTrace, weights: &TermWeights) -> Result<f64, ScoringError> {
    if weights.weights.len() != trace.len() {
        return Err(ScoringError::LengthMismatch {
            weights: weights.weights.len(),
            steps: trace.len(),
        });
    }
    Ok(weights
        .weights
        .iter()
        .zip(&trace.logprobs)
        .map(|(w, lp)| w * lp)
        .sum())
}

/// Weights a trace under `scheme` and scores it.
pub fn score_trace(trace: &TokenTrace, scheme: TermScheme, normalization: Normalization) -> f64 {
    let weights = term_weights(trace, scheme, normalization);
    direction_score(trace, &weights).expect("weights built from the same trace")
}
