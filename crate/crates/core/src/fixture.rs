//! Built-in eight-example French-to-English dataset, aligned with the toy
//! backend's corpus. Hypotheses range from exact to badly garbled and carry
//! made-up direct-assessment scores in the same order.

use crate::model::{parse_dataset, EvalExample};

pub const FIXTURE_JSONL: &str = include_str!("../fixtures/fixture.jsonl");

pub fn fixture_dataset() -> Vec<EvalExample> {
    parse_dataset(FIXTURE_JSONL).expect("built-in fixture parses")
}
