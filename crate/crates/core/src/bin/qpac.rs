use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qpac::concept::PartitionOptions;
use qpac::harness::{
    self, emit, to_csv, to_json, validate_document, ClassManifest, ExperimentConfig, HarnessError, ModeKind,
    EXIT_INFEASIBLE, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION,
};
use qpac::qerm::PartitionStrategy;

#[derive(Parser, Debug)]
#[command(name = "qpac", version, about = "Quantum PAC learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    strategy: Option<StrategyArg>,
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Overrides the config trial count.
    #[arg(long, global = true)]
    trials: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a class, environment, POVM or state manifest and print residuals.
    Validate { manifest: PathBuf },
    /// Partition a class into compatible subclasses and report sample bounds.
    Partition {
        /// Class manifest; otherwise the class of --config is used.
        manifest: Option<PathBuf>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Run QERM trials over the config grid.
    Qerm {
        /// Where to write the per-grid-point summary JSON in CSV mode.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Run the one-batch-per-predictor baseline over the config grid.
    Naive {
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Sample demand and failure rates of QERM against the baseline.
    Compare,
    /// Empirical exceedance of the concentration bounds.
    Concentration,
    /// Embed the classical problem of the config and compare risks.
    EmbedClassical,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Greedy,
    Exact,
    Best,
    Singleton,
}

impl From<StrategyArg> for PartitionStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Greedy => PartitionStrategy::Greedy,
            StrategyArg::Exact => PartitionStrategy::Exact,
            StrategyArg::Best => PartitionStrategy::Best,
            StrategyArg::Singleton => PartitionStrategy::Singleton,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Complexity,
    Budget,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn load_config(cli: &Cli) -> Result<(ExperimentConfig, PathBuf), HarnessError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| HarnessError::Usage("--config is required for this command".into()))?;
    let mut config = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(trials) = cli.trials {
        config.trials = trials;
    }
    if let Some(s) = cli.strategy {
        config.strategy = s.into();
    }
    if let Some(m) = cli.mode {
        config.mode = match m {
            ModeArg::Complexity => ModeKind::Complexity,
            ModeArg::Budget => ModeKind::Budget,
        };
    }
    config.check()?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((config, base))
}

fn run(cli: &Cli) -> Result<u8, HarnessError> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Validate { manifest } => {
            let text = std::fs::read_to_string(manifest).map_err(|source| HarnessError::Io {
                path: manifest.clone(),
                source,
            })?;
            let report = validate_document(&text)?;
            let body = match cli.format {
                Some(Format::Json) => to_json(&report),
                Some(Format::Csv) => to_csv(&report.checks)?,
                None => report.to_text(),
            };
            emit(&body, out)?;
            for c in report.failures() {
                log::error!("{} failed for {}", c.name, c.subject);
            }
            Ok(if report.passed() { EXIT_OK } else { EXIT_VALIDATION })
        }
        Command::Partition {
            manifest,
            epsilon,
            delta,
        } => {
            let (class, mut eps, mut del, mut strategy, options) = match manifest {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
                        path: path.clone(),
                        source,
                    })?;
                    let m: ClassManifest =
                        serde_json::from_str(&text).map_err(|e| HarnessError::Parse(e.to_string()))?;
                    (
                        m.to_class()?,
                        0.2,
                        0.1,
                        PartitionStrategy::Best,
                        PartitionOptions::default(),
                    )
                }
                None => {
                    let (config, base) = load_config(cli)?;
                    let scenario = config.scenario(&base)?;
                    let options = config.partition_options();
                    (
                        scenario.class,
                        config.epsilon[0],
                        config.delta[0],
                        config.strategy,
                        options,
                    )
                }
            };
            if let Some(s) = cli.strategy {
                strategy = s.into();
            }
            eps = epsilon.unwrap_or(eps);
            del = delta.unwrap_or(del);
            let report = harness::partition_report(&class, strategy, eps, del, options)?;
            log::info!("winning strategy: {} (m = {})", report.winner, report.partition.m);
            let body = match cli.format {
                Some(Format::Csv) => to_csv(&report.objectives)?,
                _ => to_json(&report),
            };
            emit(&body, out)?;
            Ok(EXIT_OK)
        }
        Command::Qerm { summary } | Command::Naive { summary } => {
            let naive = matches!(cli.command, Command::Naive { .. });
            let (config, base) = load_config(cli)?;
            let scenario = config.scenario(&base)?;
            let sweep = harness::run_sweep(&config, &scenario, naive)?;
            match cli.format {
                Some(Format::Json) => emit(&to_json(&sweep), out)?,
                _ => {
                    emit(&to_csv(&sweep.rows)?, out)?;
                    let text = to_json(&sweep.summary);
                    match summary {
                        Some(path) => emit(&text, Some(path))?,
                        None => eprint!("{text}"),
                    }
                }
            }
            Ok(if sweep.any_infeasible() {
                EXIT_INFEASIBLE
            } else {
                EXIT_OK
            })
        }
        Command::Compare => {
            let (config, base) = load_config(cli)?;
            let scenario = config.scenario(&base)?;
            let rows = harness::compare(&config, &scenario)?;
            for r in &rows {
                log::info!(
                    "epsilon={} delta={}: naive {} / qerm {} = {:.4}",
                    r.epsilon,
                    r.delta,
                    r.naive_n,
                    r.qerm_n,
                    r.ratio
                );
            }
            let body = match cli.format {
                Some(Format::Json) => to_json(&rows),
                _ => to_csv(&rows)?,
            };
            emit(&body, out)?;
            Ok(EXIT_OK)
        }
        Command::Concentration => {
            let (config, base) = load_config(cli)?;
            let scenario = match config.class {
                Some(_) => Some(config.scenario(&base)?),
                None => None,
            };
            let rows = harness::concentration(&config, scenario.as_ref())?;
            let body = match cli.format {
                Some(Format::Json) => to_json(&rows),
                _ => to_csv(&rows)?,
            };
            emit(&body, out)?;
            Ok(EXIT_OK)
        }
        Command::EmbedClassical => {
            let (config, _) = load_config(cli)?;
            let report = harness::embed_classical(&config)?;
            let body = match cli.format {
                Some(Format::Csv) => to_csv(&report.risks)?,
                _ => to_json(&report),
            };
            emit(&body, out)?;
            Ok(EXIT_OK)
        }
    }
}
