//! DATScore: an untrained machine-translation metric that averages
//! forced-decoding log-probability scores over several generation directions
//! centered on the hypothesis.
//!
//! Besides the source, reference and hypothesis, two extra entities are
//! produced by machine translation: `trans1` (the source translated into a
//! pivot language) and `trans2` (the reference translated into another
//! pivot). Every direction `X -> hypo` and `hypo -> X` is scored with a
//! sequence-to-sequence model, token log-probabilities are weighted by the
//! entropy of the model's step distribution, and direction scores are
//! averaged with weights derived from how well each direction agrees with
//! the others across the dataset.
//!
//! Modules, bottom up:
//! * [`model`]: dataset types and the JSON Lines format
//! * [`backend`]: forced-decoding traces and translations
//! * [`scoring`]: per-direction scores and term weights
//! * [`pipeline`]: augmentation, score matrix, direction weights, final score
//! * [`meta`]: correlation with human judgments, ablations, synthetic data

pub mod backend;
pub mod fixture;
pub mod meta;
pub mod model;
pub mod parallel;
pub mod pipeline;
pub mod rng;
pub mod scoring;
pub mod stats;

pub use backend::{Backend, BackendError, CellKey, ScoreRequest, TokenTrace};
pub use model::{Direction, Entity, EntityKind, EvalExample, HumanJudgment, LanguageCode};
pub use pipeline::{Averaging, DirectionSet, DirectionWeights, Mode, PipelineConfig, ScoreMatrix};
pub use scoring::{Normalization, TermScheme};
