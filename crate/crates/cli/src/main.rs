use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use defectbench::evaluation::Metric;

mod bench;
mod profile;
mod report;

#[derive(Parser, Debug)]
#[command(name = "defectbench", version, about = "Software defect prediction benchmark")]
struct Cli {
    /// Master seed; overrides the config file and every model seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: available processors).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Where `bench` writes its artifacts; overrides the config file.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Summarize a dataset file (.arff or .csv).
    Profile {
        path: PathBuf,
        /// Label column for CSV input.
        #[arg(long)]
        label_column: Option<String>,
    },
    /// Run the model x dataset cross-validation grid from a JSON config.
    Bench {
        config: PathBuf,
        /// Restrict to these datasets (repeatable).
        #[arg(long = "dataset")]
        datasets: Vec<String>,
        /// Restrict to these model kinds (repeatable).
        #[arg(long = "model")]
        models: Vec<String>,
        /// Number of folds; overrides the config file.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Re-aggregate a `folds.jsonl` file without retraining.
    Report {
        folds: PathBuf,
        #[arg(long, default_value = "accuracy", value_parser = parse_metric)]
        metric: Metric,
        /// Show published accuracies and the difference for each cell.
        #[arg(long)]
        against_paper: bool,
    },
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse()
}

/// Failure with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

/// Writes to stdout, treating a closed pipe as success.
pub fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|()| out.flush());
}

pub struct Style {
    pub color: bool,
}

impl Style {
    pub fn bold(&self, s: &str) -> String {
        if self.color {
            format!("\x1b[1m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .write_style(if no_color {
            env_logger::WriteStyle::Never
        } else {
            env_logger::WriteStyle::Auto
        })
        .init();
    let style = Style {
        color: !no_color && std::io::stdout().is_terminal(),
    };

    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }

    let result = match cli.command {
        Command::Profile { path, label_column } => profile::run(&path, label_column.as_deref(), cli.format),
        Command::Bench {
            config,
            datasets,
            models,
            k,
        } => bench::run(
            &config,
            &bench::Overrides {
                seed: cli.seed,
                output_dir: cli.output_dir,
                datasets,
                models,
                k,
            },
            cli.format,
            &style,
        ),
        Command::Report {
            folds,
            metric,
            against_paper,
        } => report::run(&folds, metric, against_paper, cli.format, &style),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
