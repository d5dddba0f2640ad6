mod commands;
mod config;
mod roster;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use patsim_core::eval::Format;

use commands::StageError;
use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "patsim", version, about = "Patent text similarity pipeline")]
struct Cli {
    /// Flat TOML run configuration. Relative paths inside it are resolved
    /// against its directory.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides `seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Pin training to a fixed worker count when --workers is not given.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    deterministic: Option<bool>,
    /// Report format.
    #[arg(long, global = true, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the clean patent corpus from the CPC, application and patent tables.
    Ingest,
    /// Build anchor/positive/negative triplets and the sampled split.
    Triplets,
    /// Build the interference benchmark of true and random claim pairs.
    Bench,
    /// Train the word2vec model with idf-weighted pooling.
    #[command(name = "train-w2v")]
    TrainW2v,
    /// Train the distributed bag-of-words document model.
    #[command(name = "train-dbow")]
    TrainDbow,
    /// Embed `id<TAB>text` lines (or a corpus file) into a vector file.
    Embed {
        /// Roster name, `w2v`, `dbow`, or a spec such as `hash:300`.
        #[arg(long)]
        model: String,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Score every benchmark pair with every roster model and write the report.
    Eval,
    /// Render a report written by `eval` in another format.
    Report {
        /// Defaults to `scores_file` from the config.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Defaults to standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print the resolved configuration, every key included.
    Config,
}

fn load_config(cli: &Cli) -> Result<RunConfig, StageError> {
    let err = |e: config::ConfigError| StageError {
        stage: "config",
        message: e.to_string(),
    };
    let mut cfg = match &cli.config {
        Some(path) => {
            let mut cfg = RunConfig::load(path).map_err(err)?;
            let base = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            cfg.resolve_paths(base);
            cfg
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(workers) = cli.workers {
        cfg.workers = workers;
    }
    if let Some(d) = cli.deterministic {
        cfg.deterministic = d;
    }
    cfg.validate().map_err(err)?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), StageError> {
    let cfg = load_config(&cli)?;
    if cfg.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build_global()
            .map_err(|e| StageError {
                stage: "config",
                message: e.to_string(),
            })?;
    }
    match &cli.command {
        Command::Ingest => commands::ingest(&cfg),
        Command::Triplets => commands::triplets(&cfg),
        Command::Bench => commands::bench(&cfg),
        Command::TrainW2v => commands::train_w2v(&cfg),
        Command::TrainDbow => commands::train_dbow(&cfg),
        Command::Embed { model, input, output } => commands::embed(&cfg, model, input, output),
        Command::Eval => commands::eval(&cfg, cli.format),
        Command::Report { input, output } => commands::report(&cfg, cli.format, input.as_deref(), output.as_deref()),
        Command::Config => {
            print!("{}", cfg.to_toml());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}
