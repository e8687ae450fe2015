//! `embedfair`: summarize graphs, score embeddings, build artifacts, and serve them.

mod output;

use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use embedfair_core::pipeline::ingest::{load_attributes, load_embeddings, load_graph, DEFAULT_LABEL};
use embedfair_core::pipeline::{precompute_to, Artifact};
use embedfair_core::summary::DEFAULT_BINS;
use embedfair_core::{group_score_table, individual_score_table, summarize, FairnessConfig};
use embedfair_server::{diagnostic_bundle, AppState, Dataset, LoadError};

#[derive(Debug, Parser)]
#[command(name = "embedfair", version, about = "Fairness audits for graph embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SummaryFormat {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScoreFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Notion {
    Individual,
    Group,
}

#[derive(Debug, clap::Args)]
struct ConfigArgs {
    #[arg(long, value_enum)]
    notion: Notion,
    /// Hop count (individual) or recommendation count (group).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    /// Attribute name; defaults to the attribute file's second column header.
    #[arg(long)]
    attr: Option<String>,
    /// Attribute value scored by the group notion.
    #[arg(long)]
    value: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print network statistics and the degree histogram.
    Summarize {
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BINS as u64, value_parser = clap::value_parser!(u64).range(1..))]
        bins: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: SummaryFormat,
    },
    /// Score every node of a graph under one embedding.
    Score {
        graph: PathBuf,
        embeddings: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        /// `id,<attribute>` CSV; required by the group notion.
        #[arg(long)]
        attrs_file: Option<PathBuf>,
        /// Label for nodes missing from the attribute file.
        #[arg(long, default_value = DEFAULT_LABEL)]
        default_label: String,
        #[arg(long, value_enum, default_value = "json")]
        format: ScoreFormat,
    },
    /// Print the diagnostic bundle for one node of a precomputed artifact.
    Diagnose {
        artifact: PathBuf,
        node: String,
        #[arg(long)]
        embedding: String,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Compute every configured table for a dataset manifest and write its artifact.
    Precompute {
        manifest: PathBuf,
        #[arg(long, default_value = "artifacts")]
        out_dir: PathBuf,
    },
    /// Serve the artifacts in a directory over HTTP.
    Serve {
        #[arg(long, env = "EMBEDFAIR_ARTIFACTS", default_value = "artifacts")]
        artifacts: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        listen: SocketAddr,
        /// Directory with the UI bundle, served at `/`.
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
}

/// Exit code 1 for bad input, 2 for everything else.
#[derive(Debug)]
enum Failure {
    Input(String),
    Internal(String),
}

impl From<embedfair_core::Error> for Failure {
    fn from(e: embedfair_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        Failure::Input(e.to_string())
    }
}

fn internal(e: impl std::fmt::Display) -> Failure {
    Failure::Internal(e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(message)) => {
            eprintln!("internal error: {message}");
            ExitCode::from(2)
        }
    }
}

fn config(args: &ConfigArgs, attribute: Option<String>) -> Result<FairnessConfig, Failure> {
    let k = args.k as usize;
    Ok(match args.notion {
        Notion::Individual => FairnessConfig::Individual { hops: k },
        Notion::Group => FairnessConfig::Group {
            k,
            attribute: attribute
                .or_else(|| args.attr.clone())
                .ok_or_else(|| Failure::Input("the group notion needs --attr".into()))?,
            value: args
                .value
                .clone()
                .ok_or_else(|| Failure::Input("the group notion needs --value".into()))?,
        },
    })
}

/// The second column of the first non-comment line of an attribute CSV.
fn attribute_header(path: &Path) -> Result<String, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .and_then(|l| l.split(',').nth(1))
        .map(|h| h.trim().to_string())
        .filter(|h| !h.is_empty())
        .ok_or_else(|| Failure::Input(format!("{}: missing \"id,<attribute>\" header", path.display())))
}

fn run(command: Command) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::Summarize { graph, bins, format } => {
            let (g, _) = load_graph(&graph)?;
            let report = summarize(&g, bins as usize);
            match format {
                SummaryFormat::Json => output::json(&mut out, &output::summary_json(&report))?,
                SummaryFormat::Table => output::summary_table(&mut out, &report).map_err(internal)?,
            }
        }
        Command::Score {
            graph,
            embeddings,
            config: args,
            attrs_file,
            default_label,
            format,
        } => {
            let (g, _) = load_graph(&graph)?;
            let (y, _) = load_embeddings(&embeddings, &g)?;
            match args.notion {
                Notion::Individual => {
                    let table = individual_score_table(&g, &y, args.k as usize)?;
                    output::individual(&mut out, format == ScoreFormat::Csv, &g, &table)?;
                }
                Notion::Group => {
                    let path =
                        attrs_file.ok_or_else(|| Failure::Input("the group notion needs --attrs-file".into()))?;
                    let name = match &args.attr {
                        Some(a) => a.clone(),
                        None => attribute_header(&path)?,
                    };
                    let FairnessConfig::Group { k, value, .. } = config(&args, Some(name.clone()))? else {
                        unreachable!("group notion")
                    };
                    let (attrs, _) = load_attributes(&path, &name, &g, &default_label)?;
                    let table = group_score_table(&g, &y, &attrs, k, &value)?;
                    output::group(&mut out, format == ScoreFormat::Csv, &g, &table)?;
                }
            }
        }
        Command::Diagnose {
            artifact,
            node,
            embedding,
            config: args,
        } => {
            let a = Artifact::read(&artifact)?;
            let dataset = Dataset::from_artifact(a, artifact)?;
            let config = config(&args, None)?;
            let bundle = diagnostic_bundle(&dataset, &embedding, &config, &node)
                .map_err(|e| Failure::Input(e.message().to_string()))?;
            output::json(&mut out, &bundle)?;
        }
        Command::Precompute { manifest, out_dir } => {
            let (artifact, path) = precompute_to(&manifest, &out_dir)?;
            let tables: usize = artifact
                .embeddings
                .iter()
                .map(|e| e.individual.len() + e.group.len())
                .sum();
            writeln!(out, "{}", path.display()).map_err(internal)?;
            log::info!("{}: {} score tables", artifact.id(), tables);
        }
        Command::Serve {
            artifacts,
            listen,
            static_dir,
        } => {
            let state = Arc::new(AppState::load_dir(&artifacts)?);
            let runtime = tokio::runtime::Runtime::new().map_err(internal)?;
            eprintln!(
                "serving {} datasets from {} on http://{listen}",
                state.len(),
                artifacts.display()
            );
            runtime.block_on(embedfair_server::serve_state(state, listen, static_dir.as_deref()))?;
        }
    }
    out.flush().map_err(internal)
}
