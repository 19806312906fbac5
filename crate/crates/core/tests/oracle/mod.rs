//! Brute-force reference computations for the toy lexical model and the
//! scoring pipeline. Written directly from the model definition with plain
//! loops over the raw corpus; shares no code with the library beyond the
//! corpus constants and the dataset parser.

#![allow(dead_code)]

use datscore::backend::toy::{FIXTURE_CORPUS, FIXTURE_LANGS};

pub const LAMBDA: f64 = 0.5;
pub const UNK: &str = "<unk>";

pub fn words(text: &str) -> Vec<String> {
    text.split_whitespace().map(|w| w.to_lowercase()).collect()
}

fn column(lang: &str) -> usize {
    FIXTURE_LANGS.iter().position(|l| *l == lang).expect("fixture language")
}

pub fn sentences(lang: &str) -> Vec<Vec<String>> {
    let c = column(lang);
    FIXTURE_CORPUS.iter().map(|row| words(row[c])).collect()
}

/// Sorted target vocabulary including `<unk>`.
pub fn vocabulary(lang: &str) -> Vec<String> {
    let mut v: Vec<String> = sentences(lang).into_iter().flatten().collect();
    v.push(UNK.to_string());
    v.sort();
    v.dedup();
    v
}

/// Lexical table for one language pair, filled by enumerating every token
/// pair of every aligned sentence pair.
pub struct PairTable {
    pub src_words: Vec<String>,
    pub vocab: Vec<String>,
    /// `t[i][j] = T(vocab[j] | src_words[i])`
    pub t: Vec<Vec<f64>>,
}

impl PairTable {
    pub fn new(src_lang: &str, tgt_lang: &str) -> Self {
        let (s, tg) = (sentences(src_lang), sentences(tgt_lang));
        let vocab = vocabulary(tgt_lang);
        let mut src_words: Vec<String> = s.iter().flatten().cloned().collect();
        src_words.sort();
        src_words.dedup();
        let mut t = Vec::new();
        for x in &src_words {
            let mut counts = vec![0.0; vocab.len()];
            for (j, z) in vocab.iter().enumerate() {
                for i in 0..s.len() {
                    for a in &s[i] {
                        for b in &tg[i] {
                            if a == x && b == z {
                                counts[j] += 1.0;
                            }
                        }
                    }
                }
            }
            let total: f64 = counts.iter().sum();
            t.push(counts.iter().map(|c| (c + 1.0) / (total + vocab.len() as f64)).collect());
        }
        PairTable { src_words, vocab, t }
    }

    /// Add-one smoothed `T(z | x)`; unseen source words get the uniform row,
    /// unknown targets are looked up as `<unk>`.
    pub fn get(&self, x: &str, z: &str) -> f64 {
        let j = self
            .vocab
            .iter()
            .position(|w| w == z)
            .unwrap_or_else(|| self.vocab.iter().position(|w| w == UNK).unwrap());
        match self.src_words.iter().position(|w| w == x) {
            Some(i) => self.t[i][j],
            None => 1.0 / self.vocab.len() as f64,
        }
    }
}

pub fn table(src_lang: &str, tgt_lang: &str, x: &str, z: &str) -> f64 {
    PairTable::new(src_lang, tgt_lang).get(x, z)
}

/// Step distribution over `vocabulary(tgt_lang)`.
pub fn step_distribution(input: &str, src_lang: &str, tgt_lang: &str) -> Vec<f64> {
    distribution(&PairTable::new(src_lang, tgt_lang), input)
}

pub fn distribution(pt: &PairTable, input: &str) -> Vec<f64> {
    let xs = words(input);
    pt.vocab
        .iter()
        .map(|z| {
            let mut acc = 0.0;
            for x in &xs {
                acc += pt.get(x, z);
            }
            LAMBDA * acc / xs.len() as f64 + (1.0 - LAMBDA) / pt.vocab.len() as f64
        })
        .collect()
}

pub struct OracleTrace {
    pub logprobs: Vec<f64>,
    pub entropies: Vec<f64>,
}

pub fn trace(input: &str, src_lang: &str, output: &str, tgt_lang: &str) -> OracleTrace {
    trace_with(&PairTable::new(src_lang, tgt_lang), input, output)
}

pub fn trace_with(pt: &PairTable, input: &str, output: &str) -> OracleTrace {
    let vocab = &pt.vocab;
    let p = distribution(pt, input);
    let mut h = 0.0;
    for &q in &p {
        h -= q * q.ln();
    }
    let mut logprobs = Vec::new();
    let mut entropies = Vec::new();
    for y in words(output) {
        let idx = vocab
            .iter()
            .position(|w| *w == y)
            .unwrap_or_else(|| vocab.iter().position(|w| w == UNK).unwrap());
        logprobs.push(p[idx].ln());
        entropies.push(h);
    }
    OracleTrace { logprobs, entropies }
}

pub fn uniform_score(t: &OracleTrace) -> f64 {
    t.logprobs.iter().sum::<f64>() / t.logprobs.len() as f64
}

pub fn entropy_score(t: &OracleTrace) -> f64 {
    let total: f64 = t.entropies.iter().sum();
    if total == 0.0 {
        return uniform_score(t);
    }
    let mut s = 0.0;
    for (lp, h) in t.logprobs.iter().zip(&t.entropies) {
        s += h / total * lp;
    }
    s
}

/// Per-position argmax of `T(. | x)` without `<unk>`; ties go to the
/// alphabetically first token.
pub fn translate(text: &str, src_lang: &str, tgt_lang: &str) -> String {
    if src_lang == tgt_lang {
        return text.to_string();
    }
    let pt = PairTable::new(src_lang, tgt_lang);
    let mut out = Vec::new();
    for x in words(text) {
        let mut best: Option<(&String, f64)> = None;
        for z in &pt.vocab {
            if z == UNK {
                continue;
            }
            let p = pt.get(&x, z);
            match best {
                Some((_, bp)) if p <= bp => {}
                _ => best = Some((z, p)),
            }
        }
        out.push(best.unwrap().0.clone());
    }
    out.join(" ")
}

/// Pearson correlation from raw sums, 0 for a constant column.
pub fn corr(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    let saa: f64 = a.iter().map(|x| x * x).sum();
    let sbb: f64 = b.iter().map(|x| x * x).sum();
    let sab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let va = n * saa - sa * sa;
    let vb = n * sbb - sb * sb;
    if va.abs() < 1e-18 || vb.abs() < 1e-18 {
        return 0.0;
    }
    (n * sab - sa * sb) / (va * vb).sqrt()
}

/// One-vs-rest weights over columns, clamped and normalized, with the
/// uniform fallback.
pub fn one_vs_rest(columns: &[Vec<f64>]) -> Vec<f64> {
    let k = columns.len();
    let mut raw = vec![0.0; k];
    for i in 0..k {
        for j in 0..k {
            if i != j {
                raw[i] += corr(&columns[i], &columns[j]);
            }
        }
        if raw[i] < 0.0 {
            raw[i] = 0.0;
        }
    }
    let total: f64 = raw.iter().sum();
    if total == 0.0 {
        return vec![1.0 / k as f64; k];
    }
    raw.iter().map(|r| r / total).collect()
}

/// Fixture example after oracle augmentation, as
/// `(id, [(entity name, text, lang)])`.
pub struct OracleExample {
    pub id: String,
    pub human: f64,
    pub entities: Vec<(&'static str, String, String)>,
}

impl OracleExample {
    pub fn get(&self, name: &str) -> (&str, &str) {
        let e = self.entities.iter().find(|e| e.0 == name).unwrap();
        (e.1.as_str(), e.2.as_str())
    }
}

pub fn fixture_examples() -> Vec<OracleExample> {
    datscore::fixture::FIXTURE_JSONL
        .lines()
        .map(|line| {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            let s = |k: &str| v[k].as_str().unwrap().to_string();
            let src = s("src");
            let reference = s("ref");
            OracleExample {
                id: s("id"),
                human: v["human"].as_f64().unwrap(),
                entities: vec![
                    ("src", src.clone(), "fr".into()),
                    ("ref", reference.clone(), "en".into()),
                    ("hypo", s("hyp"), "en".into()),
                    ("trans1", translate(&src, "fr", "en"), "en".into()),
                    ("trans2", translate(&reference, "en", "es"), "es".into()),
                ],
            }
        })
        .collect()
}

/// MT8 directions in the order the pipeline uses.
pub const MT8: [(&str, &str); 8] = [
    ("src", "hypo"),
    ("hypo", "src"),
    ("ref", "hypo"),
    ("hypo", "ref"),
    ("trans1", "hypo"),
    ("hypo", "trans1"),
    ("trans2", "hypo"),
    ("hypo", "trans2"),
];

/// `cells[example][direction]` for the augmented fixture.
pub fn fixture_matrix(entropy: bool) -> Vec<Vec<f64>> {
    let mut tables: Vec<((String, String), PairTable)> = Vec::new();
    fixture_examples()
        .iter()
        .map(|e| {
            MT8.iter()
                .map(|(from, to)| {
                    let (xt, xl) = e.get(from);
                    let (yt, yl) = e.get(to);
                    let key = (xl.to_string(), yl.to_string());
                    let i = match tables.iter().position(|(k, _)| *k == key) {
                        Some(i) => i,
                        None => {
                            tables.push((key, PairTable::new(xl, yl)));
                            tables.len() - 1
                        }
                    };
                    let t = trace_with(&tables[i].1, xt, yt);
                    if entropy {
                        entropy_score(&t)
                    } else {
                        uniform_score(&t)
                    }
                })
                .collect()
        })
        .collect()
}

pub fn columns(matrix: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..matrix[0].len())
        .map(|c| matrix.iter().map(|row| row[c]).collect())
        .collect()
}

/// End-to-end scores with entropy term weights and one-vs-rest averaging.
pub fn fixture_datscores() -> Vec<f64> {
    let m = fixture_matrix(true);
    let w = one_vs_rest(&columns(&m));
    m.iter()
        .map(|row| row.iter().zip(&w).map(|(c, w)| c * w).sum())
        .collect()
}
