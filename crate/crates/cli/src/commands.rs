use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use datscore::backend::trace::TraceStore;
use datscore::meta::ablation::ablation_report;
use datscore::meta::synth::{synth_generate, SynthConfig};
use datscore::meta::{correlate, groups_to_tsv, summarize, CorrelationKind, GroupResult, TiePolicy};
use datscore::model::{parse_dataset, serialize_dataset, validate_dataset, ValidationReport};
use datscore::pipeline::{self, augment_dataset, read_scores, Exclusion, WeightProvenance};
use datscore::EvalExample;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::CliError;

fn read(path: &Path, what: &str) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Input(format!("cannot read {what} {}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

/// Parsed dataset plus the SHA-256 of its bytes.
fn load_dataset(path: &Path) -> Result<(Vec<EvalExample>, String), CliError> {
    let bytes = read(path, "dataset")?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::Input(format!("dataset {} is not UTF-8", path.display())))?;
    let dataset =
        parse_dataset(&text).map_err(|e| CliError::Input(format!("dataset {}: {e}", path.display())))?;
    Ok((dataset, digest))
}

fn print_violations(report: &ValidationReport) {
    for v in &report.violations {
        eprintln!("{}: {}", v.id, v.message);
    }
}

fn load_valid_dataset(path: &Path) -> Result<(Vec<EvalExample>, String), CliError> {
    let (dataset, digest) = load_dataset(path)?;
    let report = validate_dataset(&dataset);
    if !report.accepted {
        print_violations(&report);
        return Err(CliError::Input(format!(
            "dataset {} has {} violation(s)",
            path.display(),
            report.violations.len()
        )));
    }
    Ok((dataset, digest))
}

pub fn validate(path: &Path, json: bool) -> Result<(), CliError> {
    let (dataset, _) = load_dataset(path)?;
    let report = validate_dataset(&dataset);
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print_violations(&report);
        println!(
            "{} records, {} violations, {}",
            report.records,
            report.violations.len(),
            if report.accepted { "accepted" } else { "rejected" }
        );
    }
    if report.accepted {
        Ok(())
    } else {
        Err(CliError::Input("dataset rejected".into()))
    }
}

pub fn check_traces(path: &Path) -> Result<(), CliError> {
    let store = TraceStore::load(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    println!("{} traces ok", store.len());
    Ok(())
}

/// Everything needed to rerun a score command. Deliberately free of
/// timestamps, output paths and worker counts so reruns compare equal.
#[derive(Serialize)]
struct Manifest<'a> {
    tool: String,
    config: &'a RunConfig,
    dataset_sha256: &'a str,
    backend: String,
    directions: Vec<String>,
    weights: BTreeMap<String, f64>,
    weight_provenance: WeightProvenance,
    rows: usize,
    exclusions: &'a [Exclusion],
}

pub fn default_manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    output.with_file_name(name)
}

fn check_recorded_hash(config_path: Option<&Path>, digest: &str) {
    let Some(path) = config_path else { return };
    let recorded = fs::read_to_string(path)
        .ok()
        .and_then(|t| serde_json::from_str::<serde_json::Value>(&t).ok())
        .and_then(|v| v.get("dataset_sha256").and_then(|h| h.as_str()).map(str::to_string));
    if let Some(h) = recorded {
        if h != digest {
            log::warn!("dataset differs from the one recorded in {} ({h})", path.display());
        }
    }
}

pub fn score(
    config: &RunConfig,
    config_path: Option<&Path>,
    workers: usize,
    output: &Path,
    manifest: Option<&Path>,
) -> Result<(), CliError> {
    let (dataset, digest) = load_valid_dataset(config.dataset()?)?;
    check_recorded_hash(config_path, &digest);
    let backend = config.open_backend()?;
    let out = pipeline::run(&dataset, backend.as_ref(), &config.pipeline_config(workers)?)?;

    let mut buf = Vec::new();
    out.write_scores(&mut buf).expect("writing to memory");
    write(output, &buf)?;

    let m = Manifest {
        tool: format!("datscore {}", env!("CARGO_PKG_VERSION")),
        config,
        dataset_sha256: &digest,
        backend: backend.identity(),
        directions: out.matrix.directions.iter().map(|d| d.to_string()).collect(),
        weights: out.weights.to_map(),
        weight_provenance: out.weights.provenance,
        rows: out.matrix.n_rows(),
        exclusions: &out.traces.exclusions,
    };
    let manifest_path = manifest.map_or_else(|| default_manifest_path(output), Path::to_path_buf);
    write(
        &manifest_path,
        (serde_json::to_string_pretty(&m).expect("manifest serializes") + "\n").as_bytes(),
    )?;

    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{} rows -> {}", out.matrix.n_rows(), output.display());
    for (d, w) in out.weights.iter() {
        let _ = writeln!(stdout, "  {:<14} {w:.4}", d.to_string());
    }
    if !out.traces.exclusions.is_empty() {
        let _ = writeln!(stdout, "{} example(s) excluded", out.traces.exclusions.len());
    }
    Ok(())
}

pub fn augment(config: &RunConfig, workers: usize, output: &Path) -> Result<(), CliError> {
    let (dataset, _) = load_valid_dataset(config.dataset()?)?;
    let backend = config.open_backend()?;
    let p = config.pipeline_config(workers)?;
    let augmented = augment_dataset(&dataset, &p.augment, backend.as_ref(), &p.directions, p.fill.workers)?;
    write(output, serialize_dataset(&augmented).as_bytes())?;
    println!("{} records -> {}", augmented.len(), output.display());
    Ok(())
}

#[derive(Serialize)]
struct MetaReport<'a> {
    tie_policy: TiePolicy,
    groups: &'a [GroupResult],
    mean: f64,
    kind: Option<CorrelationKind>,
}

fn render_groups(groups: &[GroupResult]) -> String {
    let rows: Vec<[String; 4]> = groups
        .iter()
        .map(|g| {
            [
                g.lang_pair.clone(),
                g.result.kind.as_str().to_string(),
                format!("{:.4}", g.result.value),
                g.result.n_used.to_string(),
            ]
        })
        .collect();
    let header = ["lang_pair", "kind", "value", "n"];
    let mut w = header.map(str::len);
    for r in &rows {
        for (w, c) in w.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = format!(
        "{:<a$}  {:<b$}  {:>c$}  {:>d$}\n",
        header[0],
        header[1],
        header[2],
        header[3],
        a = w[0],
        b = w[1],
        c = w[2],
        d = w[3]
    );
    for r in rows {
        out += &format!(
            "{:<a$}  {:<b$}  {:>c$}  {:>d$}\n",
            r[0],
            r[1],
            r[2],
            r[3],
            a = w[0],
            b = w[1],
            c = w[2],
            d = w[3]
        );
    }
    out
}

fn write_report(prefix: &Path, tsv: &str, json: &str) -> Result<(), CliError> {
    let with_ext = |ext: &str| {
        let mut name = prefix.as_os_str().to_os_string();
        name.push(ext);
        PathBuf::from(name)
    };
    write(&with_ext(".tsv"), tsv.as_bytes())?;
    write(&with_ext(".json"), json.as_bytes())
}

pub fn meta_eval(config: &RunConfig, scores: &Path, report: Option<&Path>) -> Result<(), CliError> {
    let (dataset, _) = load_valid_dataset(config.dataset()?)?;
    let text = String::from_utf8(read(scores, "scores")?)
        .map_err(|_| CliError::Input(format!("scores {} is not UTF-8", scores.display())))?;
    let by_id = read_scores(&text).map_err(|e| CliError::Input(format!("scores {}: {e}", scores.display())))?;
    let groups = correlate(&dataset, &by_id, config.tie_policy())?;
    let (mean, kind) = summarize(&groups);
    print!("{}", render_groups(&groups));
    println!("mean {:.4} ({})", mean, kind.map_or("mixed", CorrelationKind::as_str));
    if let Some(prefix) = report {
        let r = MetaReport {
            tie_policy: config.tie_policy(),
            groups: &groups,
            mean,
            kind,
        };
        let json = serde_json::to_string_pretty(&r).expect("report serializes") + "\n";
        write_report(prefix, &groups_to_tsv(&groups), &json)?;
    }
    Ok(())
}

pub fn ablate(config: &RunConfig, workers: usize, report: Option<&Path>) -> Result<(), CliError> {
    let (dataset, _) = load_valid_dataset(config.dataset()?)?;
    let backend = config.open_backend()?;
    let r = ablation_report(&dataset, backend.as_ref(), &config.pipeline_config(workers)?, config.tie_policy())?;
    print!("{}", r.render());
    if let Some(prefix) = report {
        write_report(prefix, &r.to_tsv(), &r.to_json())?;
    }
    Ok(())
}

pub fn synth(cfg: &SynthConfig, dataset_out: &Path, traces_out: &Path) -> Result<(), CliError> {
    let data = synth_generate(cfg)?;
    write(dataset_out, serialize_dataset(&data.dataset).as_bytes())?;
    write(traces_out, data.traces.to_jsonl().as_bytes())?;
    println!(
        "{} examples -> {}, {} traces -> {}",
        data.dataset.len(),
        dataset_out.display(),
        data.traces.len(),
        traces_out.display()
    );
    Ok(())
}
