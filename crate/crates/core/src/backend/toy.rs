//! Deterministic bag-of-words lexical model.
//!
//! Built from a small parallel corpus. For a language pair `(a, b)` the
//! lexical table is
//!
//! ```text
//! T(z | x) = (c(x, z) + 1) / (c(x) + |V_b|)
//! c(x, z)  = sum over aligned sentence pairs of count(x in a-side) * count(z in b-side)
//! c(x)     = sum_z c(x, z)
//! ```
//!
//! and every decoding step uses the same distribution
//!
//! ```text
//! P(z) = LAMBDA * mean_{x in X} T(z | x) + (1 - LAMBDA) / |V_b|
//! ```
//!
//! where `V_b` is the set of corpus tokens of language `b` plus `<unk>`.
//! Unknown source tokens get the uniform row; unknown target tokens are
//! looked up as `<unk>`. Tokenization is lowercase whitespace splitting.
//! Translation quality is not a goal: the model exists so that every score
//! can be recomputed by hand.

use std::collections::{BTreeSet, HashMap};

use crate::backend::{Backend, BackendError, CellKey, ScoreRequest, TokenTrace};
use crate::model::LanguageCode;

pub const LAMBDA: f64 = 0.5;
pub const UNK: &str = "<unk>";

/// Languages of [`FIXTURE_CORPUS`], in column order.
pub const FIXTURE_LANGS: [&str; 3] = ["en", "fr", "es"];

/// Eight aligned sentences in English, French and Spanish.
pub const FIXTURE_CORPUS: [[&str; 3]; 8] = [
    [
        "the cat sits on the mat",
        "le chat est assis sur le tapis",
        "el gato está sentado en la alfombra",
    ],
    [
        "the dog eats the red apple",
        "le chien mange la pomme rouge",
        "el perro come la manzana roja",
    ],
    [
        "my house is very big",
        "ma maison est très grande",
        "mi casa es muy grande",
    ],
    [
        "she reads a good book",
        "elle lit un bon livre",
        "ella lee un buen libro",
    ],
    [
        "we drink cold water",
        "nous buvons de l'eau froide",
        "bebemos agua fría",
    ],
    [
        "the children play in the garden",
        "les enfants jouent dans le jardin",
        "los niños juegan en el jardín",
    ],
    [
        "he walks to the old station",
        "il marche vers la vieille gare",
        "él camina hacia la vieja estación",
    ],
    [
        "the sun is hot today",
        "le soleil est chaud aujourd'hui",
        "el sol está caliente hoy",
    ],
];

pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_lowercase).collect()
}

#[derive(Debug, Clone)]
struct LexicalTable {
    /// Sorted target vocabulary, `<unk>` included.
    vocab: Vec<String>,
    index: HashMap<String, usize>,
    /// `T(. | x)` for every source token seen in the corpus.
    rows: HashMap<String, Vec<f64>>,
    uniform: Vec<f64>,
}

impl LexicalTable {
    fn build(pairs: &[(Vec<String>, Vec<String>)]) -> Self {
        let mut vocab: BTreeSet<String> = pairs.iter().flat_map(|(_, t)| t.iter().cloned()).collect();
        vocab.insert(UNK.to_string());
        let vocab: Vec<String> = vocab.into_iter().collect();
        let index: HashMap<String, usize> = vocab
            .iter()
            .enumerate()
            .map(|(i, z)| (z.clone(), i))
            .collect();
        let v = vocab.len();

        let mut counts: HashMap<String, Vec<f64>> = HashMap::new();
        for (src, tgt) in pairs {
            for x in src {
                let row = counts.entry(x.clone()).or_insert_with(|| vec![0.0; v]);
                for z in tgt {
                    row[index[z]] += 1.0;
                }
            }
        }
        let rows = counts
            .into_iter()
            .map(|(x, row)| {
                let total: f64 = row.iter().sum();
                let denom = total + v as f64;
                (x, row.into_iter().map(|c| (c + 1.0) / denom).collect())
            })
            .collect();

        LexicalTable {
            uniform: vec![1.0 / v as f64; v],
            vocab,
            index,
            rows,
        }
    }

    fn row(&self, x: &str) -> &[f64] {
        self.rows.get(x).map_or(&self.uniform, Vec::as_slice)
    }

    fn lookup(&self, z: &str) -> usize {
        self.index.get(z).copied().unwrap_or_else(|| self.index[UNK])
    }
}

#[derive(Debug, Clone)]
pub struct ToyBackend {
    tables: HashMap<(LanguageCode, LanguageCode), LexicalTable>,
    lambda: f64,
}

impl ToyBackend {
    /// Backend over the built-in [`FIXTURE_CORPUS`].
    pub fn fixture() -> Self {
        let rows: Vec<Vec<&str>> = FIXTURE_CORPUS.iter().map(|r| r.to_vec()).collect();
        Self::from_parallel(&FIXTURE_LANGS, &rows)
    }

    /// Builds tables for every ordered language pair of an aligned corpus.
    /// Each row of `sentences` holds one sentence per entry of `langs`.
    pub fn from_parallel(langs: &[&str], sentences: &[Vec<&str>]) -> Self {
        let codes: Vec<LanguageCode> = langs
            .iter()
            .map(|l| LanguageCode::new(l).expect("corpus language code"))
            .collect();
        let mut tables = HashMap::new();
        for (a, la) in codes.iter().enumerate() {
            for (b, lb) in codes.iter().enumerate() {
                let pairs: Vec<(Vec<String>, Vec<String>)> = sentences
                    .iter()
                    .map(|row| (tokenize(row[a]), tokenize(row[b])))
                    .collect();
                tables.insert((la.clone(), lb.clone()), LexicalTable::build(&pairs));
            }
        }
        ToyBackend {
            tables,
            lambda: LAMBDA,
        }
    }

    fn table(&self, src: &LanguageCode, tgt: &LanguageCode) -> Result<&LexicalTable, BackendError> {
        self.tables.get(&(src.clone(), tgt.clone())).ok_or_else(|| {
            let unsupported = if self.supports(src) { tgt } else { src };
            BackendError::UnsupportedLanguage(unsupported.to_string())
        })
    }

    pub fn supports(&self, lang: &LanguageCode) -> bool {
        self.tables.keys().any(|(a, _)| a == lang)
    }

    /// `T(z | x)` for one language pair.
    pub fn lexical_probability(
        &self,
        src: &LanguageCode,
        tgt: &LanguageCode,
        x: &str,
        z: &str,
    ) -> Result<f64, BackendError> {
        let table = self.table(src, tgt)?;
        Ok(table.row(x)[table.lookup(z)])
    }

    /// Full step distribution for a request, as `(token, probability)` in
    /// vocabulary order. Every step of the request shares it.
    pub fn step_distribution(&self, req: &ScoreRequest) -> Result<Vec<(String, f64)>, BackendError> {
        let table = self.table(&req.input_lang, &req.output_lang)?;
        let probs = self.distribution(table, &tokenize(&req.input_text))?;
        Ok(table.vocab.iter().cloned().zip(probs).collect())
    }

    fn distribution(&self, table: &LexicalTable, input: &[String]) -> Result<Vec<f64>, BackendError> {
        if input.is_empty() {
            return Err(BackendError::EmptyInput);
        }
        let v = table.vocab.len();
        let mut mean = vec![0.0; v];
        for x in input {
            for (acc, p) in mean.iter_mut().zip(table.row(x)) {
                *acc += p;
            }
        }
        let n = input.len() as f64;
        let floor = (1.0 - self.lambda) / v as f64;
        Ok(mean
            .into_iter()
            .map(|s| self.lambda * (s / n) + floor)
            .collect())
    }
}

fn entropy(probs: &[f64]) -> f64 {
    let plogp: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum();
    // avoid reporting -0.0 for a certain step
    0.0 - plogp
}

impl Backend for ToyBackend {
    fn identity(&self) -> String {
        format!("toy-lexical/v1 lambda={}", self.lambda)
    }

    fn forced_score(&self, _key: &CellKey, req: &ScoreRequest) -> Result<TokenTrace, BackendError> {
        req.check_non_empty()?;
        let table = self.table(&req.input_lang, &req.output_lang)?;
        let probs = self.distribution(table, &tokenize(&req.input_text))?;
        let h = entropy(&probs);
        let tokens = tokenize(&req.output_text);
        let logprobs = tokens.iter().map(|y| probs[table.lookup(y)].ln()).collect();
        let entropies = vec![h; tokens.len()];
        Ok(TokenTrace::new(tokens, logprobs, entropies)?)
    }

    /// Same-language requests return the input unchanged. Otherwise each
    /// source token is replaced by its most probable target token under `T`
    /// (`<unk>` excluded, ties broken towards the lexicographically smallest).
    fn translate(
        &self,
        text: &str,
        src_lang: &LanguageCode,
        tgt_lang: &LanguageCode,
    ) -> Result<String, BackendError> {
        let table = self.table(src_lang, tgt_lang)?;
        if text.trim().is_empty() {
            return Err(BackendError::EmptyInput);
        }
        if src_lang == tgt_lang {
            return Ok(text.to_string());
        }
        let unk = table.index[UNK];
        let words: Vec<&str> = tokenize(text)
            .iter()
            .map(|x| {
                let row = table.row(x);
                let mut best = usize::MAX;
                for (i, &p) in row.iter().enumerate() {
                    if i != unk && (best == usize::MAX || p > row[best]) {
                        best = i;
                    }
                }
                table.vocab[best].as_str()
            })
            .collect();
        Ok(words.join(" "))
    }

    fn vocab_size(&self, lang: &LanguageCode) -> Option<usize> {
        self.tables
            .iter()
            .find(|((_, b), _)| b == lang)
            .map(|(_, t)| t.vocab.len())
    }
}
