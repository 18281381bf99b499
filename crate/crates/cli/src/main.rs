use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use bayesorch::config::ExperimentConfig;
use bayesorch::evaluation::Method;

mod commands;
mod output;

#[derive(Debug, Parser)]
#[command(name = "bayesorch", version, about = "Run cost-aware multi-provider screening experiments")]
struct Cli {
    /// TOML experiment config. Defaults reproduce the reference setup.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Overrides population.seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a candidate population and write it as JSON lines.
    Generate {
        /// Output file. Defaults to <output_dir>/corpus.jsonl.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run methods on a corpus and write traces, reports and a comparison table.
    Run {
        #[command(flatten)]
        io: CorpusIo,
        /// Comma-separated methods. Defaults to the config's list.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
    },
    /// Replay decisions under perturbed settings and write a sweep table.
    Sweep {
        #[command(flatten)]
        io: CorpusIo,
        #[arg(long, value_enum)]
        parameter: SweepName,
    },
}

#[derive(Debug, Args)]
struct CorpusIo {
    /// Population file written by `generate`.
    #[arg(long)]
    corpus: PathBuf,
    /// Output directory. Defaults to the config's output_dir.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SweepName {
    CostScale,
    TauD,
    Rho,
    Prior,
}

impl SweepName {
    fn key(self) -> &'static str {
        match self {
            Self::CostScale => "cost_scale",
            Self::TauD => "tau_d",
            Self::Rho => "rho",
            Self::Prior => "prior",
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.population.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_methods(names: &[String]) -> Result<Vec<Method>> {
    names.iter().map(|n| n.trim().parse::<Method>().with_context(|| "in --methods")).collect()
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = load_config(&cli)?;
    match &cli.command {
        Command::Generate { out } => {
            let out = out.clone().unwrap_or_else(|| cfg.output_dir.join("corpus.jsonl"));
            commands::generate(&cfg, &out).map(|_| true)
        }
        Command::Run { io, methods } => {
            let methods = match methods {
                Some(m) => parse_methods(m)?,
                None => cfg.methods.clone(),
            };
            let out = io.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
            commands::run(&cfg, &io.corpus, &out, &methods, cli.workers)
        }
        Command::Sweep { io, parameter } => {
            let out = io.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
            commands::sweep(&cfg, &io.corpus, &out, parameter.key(), cli.workers).map(|_| true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
