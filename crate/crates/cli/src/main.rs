//! `galimp`: binarize symbolic tables, build concept lattices and mine
//! descriptive and Bayesian-filtered implicative graphs.
//!
//! Exit status: 0 on success, 1 on an IO failure, 2 on invalid input or usage.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_prior, ConfigLayer, Format};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Input(#[from] galimp::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Input(_) | CliError::Usage(_) => 2,
        }
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Parser)]
#[command(
    name = "galimp",
    version,
    about = "Concept lattices and implicative graphs from term-usage data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Turn a symbolic object × informant table into a binary context CSV.
    Binarize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Comma-separated attribute order for the output columns.
        #[arg(long, value_delimiter = ',')]
        attribute_order: Option<Vec<String>>,
    },
    /// Enumerate the concepts of a binary context and its Hasse diagram.
    Lattice {
        #[arg(long)]
        context: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Contingency tables, Loevinger indices and the descriptive graph.
    Describe {
        #[command(flatten)]
        usage: UsageArgs,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Lower credibility bounds and the filtered inductive graph.
    Induce {
        #[command(flatten)]
        usage: UsageArgs,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        #[command(flatten)]
        bayes: BayesArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Every stage in sequence, with a manifest of the run.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
struct UsageArgs {
    /// Long-form `user_id,term` usage log.
    #[arg(long, conflicts_with = "tables")]
    observations: Option<PathBuf>,
    /// Number of users in the population, including those absent from the log.
    #[arg(long, requires = "observations")]
    population: Option<usize>,
    /// Pair contingency tables as `a,b,n11,n10,n01,n00`.
    #[arg(long)]
    tables: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[arg(long)]
    h_tend: Option<f64>,
    #[arg(long)]
    h_quasi: Option<f64>,
    #[arg(long)]
    h_floor: Option<f64>,
}

#[derive(Debug, Args)]
struct BayesArgs {
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Falls back to the GALIMP_SEED environment variable.
    #[arg(long)]
    seed: Option<u64>,
    /// Dirichlet prior weights for n11,n10,n01,n00.
    #[arg(long, value_parser = parse_prior)]
    prior: Option<[f64; 4]>,
    /// Draw mutual implications as one double-headed edge.
    #[arg(long)]
    merge_equivalences: bool,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Artifact formats to write.
    #[arg(long, value_enum, value_delimiter = ',')]
    emit: Option<Vec<Format>>,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    #[arg(long, conflicts_with = "context")]
    symbolic: Option<PathBuf>,
    #[arg(long)]
    context: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    attribute_order: Option<Vec<String>>,
    #[command(flatten)]
    usage: UsageArgs,
    /// Stop after the lattice stage.
    #[arg(long)]
    skip_stats: bool,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    #[command(flatten)]
    bayes: BayesArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long, conflicts_with = "from_manifest")]
    config: Option<PathBuf>,
    /// Rerun with the configuration recorded in a manifest; flags still override it.
    #[arg(long)]
    from_manifest: Option<PathBuf>,
}

fn flag_layer(
    usage: &UsageArgs,
    th: &ThresholdArgs,
    bayes: Option<&BayesArgs>,
    output: &OutputArgs,
) -> ConfigLayer {
    let mut layer = ConfigLayer {
        observations: usage.observations.clone(),
        tables: usage.tables.clone(),
        population: usage.population,
        h_tend: th.h_tend,
        h_quasi: th.h_quasi,
        h_floor: th.h_floor,
        out_dir: output.out_dir.clone(),
        emit: output.emit.clone(),
        ..ConfigLayer::default()
    };
    if let Some(b) = bayes {
        layer.delta = b.delta;
        layer.samples = b.samples;
        layer.seed = b.seed;
        layer.prior_weights = b.prior;
        layer.merge_equivalences = b.merge_equivalences.then_some(true);
    }
    layer
}

fn layered(
    flags: ConfigLayer,
    file: Option<ConfigLayer>,
) -> Result<config::PipelineConfig, CliError> {
    let env = ConfigLayer::from_env()?;
    Ok(flags.over(env.over(file.unwrap_or_default())).resolve())
}

fn file_layer(path: Option<&Path>) -> Result<Option<ConfigLayer>, CliError> {
    path.map(ConfigLayer::from_toml_file).transpose()
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Binarize {
            input,
            output,
            attribute_order,
        } => commands::binarize(&input, &output, attribute_order.as_deref()),
        Command::Lattice { context, json, dot } => {
            commands::lattice(&context, json.as_deref(), dot.as_deref())
        }
        Command::Describe {
            usage,
            thresholds,
            output,
            config,
        } => {
            let flags = flag_layer(&usage, &thresholds, None, &output);
            let cfg = layered(flags, file_layer(config.as_deref())?)?;
            commands::describe(&cfg).map(drop)
        }
        Command::Induce {
            usage,
            thresholds,
            bayes,
            output,
            config,
        } => {
            let flags = flag_layer(&usage, &thresholds, Some(&bayes), &output);
            let cfg = layered(flags, file_layer(config.as_deref())?)?;
            commands::induce(&cfg).map(drop)
        }
        Command::Pipeline(p) => {
            let mut flags = flag_layer(&p.usage, &p.thresholds, Some(&p.bayes), &p.output);
            flags.symbolic = p.symbolic;
            flags.context = p.context;
            flags.attribute_order = p.attribute_order;
            flags.skip_stats = p.skip_stats.then_some(true);
            let cfg = match &p.from_manifest {
                // a recorded run is already resolved, so the environment does not apply
                Some(path) => flags
                    .over(commands::manifest_config(path)?.into())
                    .resolve(),
                None => layered(flags, file_layer(p.config.as_deref())?)?,
            };
            commands::pipeline(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
