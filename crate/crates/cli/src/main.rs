mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use datscore::meta::synth::SynthConfig;
use datscore::meta::TiePolicy;
use datscore::pipeline::{Averaging, Mode};
use datscore::scoring::TermScheme;
use datscore::{Direction, LanguageCode};

use config::RunConfig;
use error::CliError;

#[derive(Parser)]
#[command(name = "datscore", version, about = "Multi-direction generation-probability MT metric")]
struct Cli {
    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a dataset against the format invariants.
    Validate {
        #[arg(long)]
        dataset: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Load and validate a trace file.
    CheckTraces {
        #[arg(long)]
        traces: PathBuf,
    },
    /// Score every hypothesis; writes JSON Lines plus a run manifest.
    Score {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        output: PathBuf,
        /// Defaults to `<output>.manifest.json`.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Fill in missing trans1/trans2 with the backend's translations.
    Augment {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        output: PathBuf,
    },
    /// Correlate a scores file with the dataset's human judgments.
    MetaEval {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        scores: PathBuf,
        /// Write `<prefix>.tsv` and `<prefix>.json`.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Per-direction, leave-one-out and weighting-grid correlations.
    Ablate {
        #[command(flatten)]
        run: RunArgs,
        /// Write `<prefix>.tsv` and `<prefix>.json`.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Generate a synthetic ranked dataset and matching trace file.
    Synth {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0.3)]
        noise: f64,
        /// Coefficient of the latent quality; 0 gives pure noise.
        #[arg(long, default_value_t = 1.0)]
        signal: f64,
        /// Direction whose scores run against the quality.
        #[arg(long)]
        outlier: Option<Direction>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        dataset_out: PathBuf,
        #[arg(long)]
        traces_out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON run config or a previous run's manifest; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// toy | trace:<path> | http:<url>
    #[arg(long)]
    backend: Option<String>,
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    term_weighting: Option<TermScheme>,
    #[arg(long)]
    averaging: Option<Averaging>,
    /// Sum weighted log-probabilities instead of averaging them.
    #[arg(long)]
    raw_sum: bool,
    #[arg(long)]
    tie_policy: Option<TiePolicy>,
    /// Keep only these directions (comma separated).
    #[arg(long, value_delimiter = ',')]
    include: Option<Vec<Direction>>,
    #[arg(long, value_delimiter = ',')]
    exclude: Option<Vec<Direction>>,
    #[arg(long, value_parser = LanguageCode::new)]
    trans1_lang: Option<LanguageCode>,
    #[arg(long, value_parser = LanguageCode::new)]
    trans2_lang: Option<LanguageCode>,
    #[arg(long)]
    seed: Option<u64>,
    /// Requests per backend call.
    #[arg(long)]
    batch_size: Option<usize>,
    /// Defaults to the available hardware parallelism.
    #[arg(long)]
    workers: Option<usize>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            backend: self.backend.clone(),
            mode: self.mode,
            term_weighting: self.term_weighting,
            averaging: self.averaging,
            raw_sum: self.raw_sum.then_some(true),
            tie_policy: self.tie_policy,
            include: self.include.clone(),
            exclude: self.exclude.clone(),
            trans1_lang: self.trans1_lang.clone(),
            trans2_lang: self.trans2_lang.clone(),
            seed: self.seed,
            batch_size: self.batch_size,
            dataset: self.dataset.clone(),
        };
        flags.over(file).resolve()
    }

    fn workers(&self) -> usize {
        self.workers.unwrap_or_else(datscore::parallel::available_workers)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { dataset, json } => commands::validate(&dataset, json),
        Command::CheckTraces { traces } => commands::check_traces(&traces),
        Command::Score { run, output, manifest } => commands::score(
            &run.resolve()?,
            run.config.as_deref(),
            run.workers(),
            &output,
            manifest.as_deref(),
        ),
        Command::Augment { run, output } => commands::augment(&run.resolve()?, run.workers(), &output),
        Command::MetaEval { run, scores, report } => commands::meta_eval(&run.resolve()?, &scores, report.as_deref()),
        Command::Ablate { run, report } => commands::ablate(&run.resolve()?, run.workers(), report.as_deref()),
        Command::Synth {
            n,
            noise,
            signal,
            outlier,
            seed,
            mode,
            config,
            dataset_out,
            traces_out,
        } => {
            let file = match &config {
                Some(p) => RunConfig::load(p)?,
                None => RunConfig::default(),
            };
            let cfg = SynthConfig {
                n,
                noise,
                signal,
                outlier,
                seed: seed.or(file.seed).unwrap_or(config::DEFAULT_SEED),
                mode: mode.or(file.mode).unwrap_or(Mode::Mt8),
            };
            commands::synth(&cfg, &dataset_out, &traces_out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
