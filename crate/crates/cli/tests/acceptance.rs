//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run with `cargo test -p datscore-cli --test acceptance`.

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use datscore::backend::toy::ToyBackend;
use datscore::backend::trace::TraceBackend;
use datscore::backend::{Backend, CellKey, ScoreRequest, TokenTrace};
use datscore::fixture::fixture_dataset;
use datscore::meta::synth::{synth_generate, SynthConfig};
use datscore::meta::{correlate, kendall_tau_like, TiePolicy};
use datscore::pipeline::{
    self, one_vs_rest_weights, Averaging, Mode, PipelineConfig, ScoreMatrix, WeightProvenance,
};
use datscore::rng::SynthRng;
use datscore::scoring::{term_weights, Normalization, TermScheme};
use datscore::{Direction, LanguageCode};

const ENTROPY_TOL: f64 = 1e-9;
const ORACLE_TOL: f64 = 1e-12;
const WEIGHT_TOL: f64 = 1e-9;
const ORACLE_BUDGET: Duration = Duration::from_secs(1);
const OUTLIER_BUDGET: Duration = Duration::from_secs(10);
const NOISE_BOUND: f64 = 0.05;
const SWAP_CASES: usize = 1000;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn lc(s: &str) -> LanguageCode {
    LanguageCode::new(s).unwrap()
}

fn request(input: &str, il: &str, output: &str, ol: &str) -> ScoreRequest {
    ScoreRequest {
        input_text: input.into(),
        input_lang: lc(il),
        output_text: output.into(),
        output_lang: lc(ol),
    }
}

fn key() -> CellKey {
    CellKey {
        unit_id: "acceptance".into(),
        direction: "src->hypo".parse().unwrap(),
    }
}

fn entropy_term_weights() -> Check {
    // Empty target side: the only target token is <unk>, probability one.
    let certain = ToyBackend::from_parallel(&["xx", "yy"], &[vec!["a b", ""]]);
    let t = certain.forced_score(&key(), &request("a", "xx", "q", "yy")).map_err(|e| e.to_string())?;
    ensure(t.logprobs == [0.0] && t.entropies == [0.0], format!("degenerate trace {t:?}"))?;
    let w = term_weights(&t, TermScheme::Entropy, Normalization::Mean);
    ensure(w.weights == [1.0], format!("degenerate weights {:?}", w.weights))?;
    let mixed = TokenTrace::new(vec!["a".into(), "b".into()], vec![-1.0, -2.0], vec![0.0, 4f64.ln()]).unwrap();
    let w = term_weights(&mixed, TermScheme::Entropy, Normalization::Mean);
    ensure(w.weights[0] == 0.0, format!("zero-entropy step weight {}", w.weights[0]))?;

    // Three target tokens plus <unk>; an unseen source word gives a uniform row.
    let flat = ToyBackend::from_parallel(&["xx", "yy"], &[vec!["a", "p q r"]]);
    let t = flat.forced_score(&key(), &request("zzz", "xx", "p", "yy")).map_err(|e| e.to_string())?;
    let h = t.entropies[0];
    ensure((h - 4f64.ln()).abs() < ENTROPY_TOL, format!("entropy {h} vs ln 4"))?;
    ensure(format!("{h:.7}") == "1.3862944", format!("entropy {h:.7}"))?;
    Ok(format!("H(uniform over 4) = {h:.10}, degenerate weight 0"))
}

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    let toy = ToyBackend::fixture();
    let mut config = PipelineConfig::new(Mode::Mt8);
    config.fill.workers = 1;
    let out = pipeline::run(&fixture_dataset(), &toy, &config).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (scheme, entropy) in [(TermScheme::Uniform, false), (TermScheme::Entropy, true)] {
        let got = out.traces.scores(scheme, Normalization::Mean);
        let want = oracle::fixture_matrix(entropy);
        ensure(got.n_rows() == 8 && got.n_cols() == 8, "matrix is not 8x8")?;
        for (r, row) in want.iter().enumerate() {
            for (c, w) in row.iter().enumerate() {
                worst = worst.max((got.get(r, c) - w).abs());
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(worst <= ORACLE_TOL, format!("max deviation {worst:e}"))?;
    ensure(elapsed < ORACLE_BUDGET, format!("took {elapsed:?}"))?;
    Ok(format!("64 cells x 2 schemes, max deviation {worst:e}, {elapsed:.2?}"))
}

fn weight_algebra() -> Check {
    let dirs: Vec<Direction> = ["src->hypo", "hypo->src", "ref->hypo"].iter().map(|d| d.parse().unwrap()).collect();
    let col = [-1.0, -2.5, -0.5, -3.0];
    let rows: Vec<Vec<f64>> = col.iter().map(|&v| vec![v; 3]).collect();
    let w = one_vs_rest_weights(&ScoreMatrix::new((0..4).map(|i| i.to_string()).collect(), dirs.clone(), rows))
        .map_err(|e| e.to_string())?;
    ensure(
        w.iter().all(|(_, x)| (x - 1.0 / 3.0).abs() < WEIGHT_TOL) && w.provenance == WeightProvenance::OneVsRest,
        format!("identical columns gave {:?}", w.to_map()),
    )?;

    let rows: Vec<Vec<f64>> = col.iter().map(|&v| vec![v, -v]).collect();
    let w = one_vs_rest_weights(&ScoreMatrix::new((0..4).map(|i| i.to_string()).collect(), dirs[..2].to_vec(), rows))
        .map_err(|e| e.to_string())?;
    ensure(
        w.provenance == WeightProvenance::UniformAvg && w.iter().all(|(_, x)| x == 0.5),
        format!("antisymmetric columns gave {:?} {:?}", w.provenance, w.to_map()),
    )?;

    let out = pipeline::run(&fixture_dataset(), &ToyBackend::fixture(), &PipelineConfig::new(Mode::Mt8))
        .map_err(|e| e.to_string())?;
    let want = oracle::one_vs_rest(&oracle::columns(&oracle::fixture_matrix(true)));
    let worst = out.weights.iter().zip(&want).map(|((_, g), w)| (g - w).abs()).fold(0.0, f64::max);
    ensure(worst <= WEIGHT_TOL, format!("fixture weights deviate by {worst:e}"))?;
    Ok(format!("uniform on identical columns, fallback on antisymmetric, fixture max deviation {worst:e}"))
}

fn kendall_suite() -> Check {
    let pairs = [(2.0, 1.0), (3.0, 1.0), (4.0, 1.0), (0.0, 1.0), (1.0, 1.0)];
    let d = kendall_tau_like(&pairs, TiePolicy::Discordant).map_err(|e| e.to_string())?.value;
    let x = kendall_tau_like(&pairs, TiePolicy::Excluded).map_err(|e| e.to_string())?.value;
    ensure(d == 0.2 && x == 0.5, format!("(3,1,1) gave {d} / {x}"))?;

    let mut rng = SynthRng::new(20_240_917);
    let mut ties_seen = 0;
    for case in 0..SWAP_CASES {
        let n = 1 + (rng.next_u64() % 40) as usize;
        let with_ties = case % 2 == 1;
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let a = rng.uniform();
                if with_ties && rng.uniform() < 0.3 {
                    (a, a)
                } else {
                    (a, rng.uniform())
                }
            })
            .collect();
        let swapped: Vec<(f64, f64)> = pairs.iter().map(|&(a, b)| (b, a)).collect();
        // Ties count against both orientations under the discordant policy,
        // so it is only antisymmetric on tie-free inputs.
        let policies: &[TiePolicy] = if with_ties {
            &[TiePolicy::Excluded]
        } else {
            &[TiePolicy::Excluded, TiePolicy::Discordant]
        };
        for &p in policies {
            let (a, b) = match (kendall_tau_like(&pairs, p), kendall_tau_like(&swapped, p)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(_), Err(_)) => continue,
                other => return Err(format!("case {case}: one orientation failed: {other:?}")),
            };
            ties_seen += a.n_ties;
            ensure(a.value == -b.value, format!("case {case} {p:?}: {} vs {}", a.value, b.value))?;
        }
    }
    Ok(format!(
        "(3,1,1) -> 0.2 / 0.5; {SWAP_CASES} swap cases exact ({ties_seen} ties, discordant policy on tie-free half)"
    ))
}

fn kendall_of(cfg: &SynthConfig, averaging: Averaging) -> Result<(f64, pipeline::RunOutput), String> {
    let data = synth_generate(cfg).map_err(|e| e.to_string())?;
    let backend = TraceBackend::new(data.traces, "synthetic");
    let mut config = PipelineConfig::new(cfg.mode);
    config.averaging = averaging;
    let out = pipeline::run(&data.dataset, &backend, &config).map_err(|e| e.to_string())?;
    let by_id: BTreeMap<String, f64> = out.matrix.row_ids.iter().cloned().zip(out.scores.iter().copied()).collect();
    let groups = correlate(&out.dataset, &by_id, TiePolicy::Discordant).map_err(|e| e.to_string())?;
    ensure(groups.len() == 1, "expected a single language pair")?;
    Ok((groups[0].result.value, out))
}

fn outlier_robustness() -> Check {
    let start = Instant::now();
    let outlier: Direction = "trans1->hypo".parse().unwrap();
    let cfg = SynthConfig {
        n: 1000,
        noise: 0.3,
        outlier: Some(outlier),
        seed: 42,
        ..Default::default()
    };
    let (ovr, out) = kendall_of(&cfg, Averaging::OneVsRest)?;
    let (uni, _) = kendall_of(&cfg, Averaging::Uniform)?;
    let elapsed = start.elapsed();
    let w_out = out.weights.get(outlier).unwrap();
    let min_other = out.weights.iter().filter(|(d, _)| *d != outlier).map(|(_, w)| w).fold(f64::INFINITY, f64::min);
    ensure(ovr > uni, format!("one-vs-rest {ovr} <= uniform {uni}"))?;
    ensure(w_out < min_other, format!("outlier weight {w_out} >= {min_other}"))?;
    ensure(elapsed < OUTLIER_BUDGET, format!("took {elapsed:?}"))?;
    Ok(format!(
        "tau one-vs-rest {ovr:.4} > uniform {uni:.4}; outlier weight {w_out:.4} < {min_other:.4}; {elapsed:.2?}"
    ))
}

fn noise_extremes() -> Check {
    let (clean, _) = kendall_of(
        &SynthConfig {
            n: 100,
            noise: 0.0,
            ..Default::default()
        },
        Averaging::OneVsRest,
    )?;
    ensure(clean == 1.0, format!("noiseless tau {clean}"))?;
    let (noisy, _) = kendall_of(
        &SynthConfig {
            n: 10_000,
            noise: 1.0,
            signal: 0.0,
            seed: 42,
            ..Default::default()
        },
        Averaging::OneVsRest,
    )?;
    ensure(noisy.abs() < NOISE_BOUND, format!("pure-noise tau {noisy}"))?;
    Ok(format!("noiseless tau {clean}; pure noise n=10000 tau {noisy:.4}"))
}

fn score_cli(dir: &Path, dataset: &str, backend: &str, workers: &str, out: &str) -> Result<(Vec<u8>, Vec<u8>), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_datscore"))
        .current_dir(dir)
        .args(["score", "--dataset", dataset, "--backend", backend, "--workers", workers, "--output", out])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(o.status.success(), format!("score failed: {}", String::from_utf8_lossy(&o.stderr)))?;
    let read = |p: &str| fs::read(dir.join(p)).map_err(|e| e.to_string());
    Ok((read(out)?, read(&format!("{out}.manifest.json"))?))
}

fn reproducibility() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    fs::write(d.join("fixture.jsonl"), datscore::fixture::FIXTURE_JSONL).map_err(|e| e.to_string())?;
    let data = synth_generate(&SynthConfig {
        n: 200,
        outlier: Some("hypo->src".parse().unwrap()),
        ..Default::default()
    })
    .map_err(|e| e.to_string())?;
    fs::write(d.join("syn.jsonl"), datscore::model::serialize_dataset(&data.dataset)).map_err(|e| e.to_string())?;
    fs::write(d.join("syn.traces.jsonl"), data.traces.to_jsonl()).map_err(|e| e.to_string())?;

    let mut runs = 0;
    for (dataset, backend) in [("fixture.jsonl", "toy"), ("syn.jsonl", "trace:syn.traces.jsonl")] {
        let first = score_cli(d, dataset, backend, "1", "a.jsonl")?;
        for (workers, out) in [("1", "b.jsonl"), ("8", "c.jsonl"), ("8", "d.jsonl")] {
            let again = score_cli(d, dataset, backend, workers, out)?;
            ensure(again == first, format!("{backend}: workers={workers} output differs"))?;
            runs += 1;
        }
    }
    Ok(format!("toy and trace backends, {runs} reruns, scores and manifests byte-identical"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("entropy term weights", entropy_term_weights),
        ("direction scores match brute-force oracle", oracle_equivalence),
        ("one-vs-rest weight algebra", weight_algebra),
        ("kendall tau-like", kendall_suite),
        ("outlier robustness", outlier_robustness),
        ("noiseless and pure-noise recovery", noise_extremes),
        ("reproducible score command", reproducibility),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
