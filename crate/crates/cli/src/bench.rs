use std::fs;
use std::path::{Path, PathBuf};

use defectbench::evaluation::{run_benchmark, BenchmarkConfig, Metric};
use defectbench::ingest::normalize_name;
use defectbench::models::ModelKind;

use crate::{emit, CliError, Format, Style};

pub struct Overrides {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub datasets: Vec<String>,
    pub models: Vec<String>,
    pub k: Option<usize>,
}

/// Reads the config and applies command-line overrides. Relative paths in
/// the file are taken relative to the file's directory; an `--output-dir`
/// flag is taken as given.
pub fn load_config(path: &Path, o: &Overrides) -> Result<BenchmarkConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut config = BenchmarkConfig::from_json(&text)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?
        .resolve_paths(base);
    if let Some(seed) = o.seed {
        config = config.with_seed(seed);
    }
    if let Some(dir) = &o.output_dir {
        config.output_dir = dir.clone();
    }
    if let Some(k) = o.k {
        config.k = k;
    }
    if !o.datasets.is_empty() {
        let wanted: Vec<String> = o.datasets.iter().map(|d| normalize_name(d)).collect();
        config.datasets.retain(|d| wanted.contains(&normalize_name(&d.name)));
    }
    if !o.models.is_empty() {
        let wanted = o
            .models
            .iter()
            .map(|m| m.parse::<ModelKind>().map_err(|e| CliError::input(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        config.models.retain(|m| wanted.contains(&m.kind()));
    }
    config.validate().map_err(|e| CliError::input(e.to_string()))?;
    Ok(config)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

pub fn run(config_path: &Path, o: &Overrides, format: Format, style: &Style) -> Result<u8, CliError> {
    let config = load_config(config_path, o)?;
    fs::create_dir_all(&config.output_dir)
        .map_err(|e| CliError::input(format!("{}: {e}", config.output_dir.display())))?;
    let table = run_benchmark(&config).map_err(|e| CliError::input(e.to_string()))?;

    let dir = &config.output_dir;
    let csv = table.to_csv(Metric::Accuracy);
    let markdown = table.to_markdown(Metric::Accuracy);
    write(dir, "table.md", &markdown)?;
    write(dir, "table.csv", &csv)?;
    write(dir, "folds.jsonl", &table.folds_jsonl())?;
    let resolved = serde_json::to_string_pretty(&table.config).expect("config serializes") + "\n";
    write(dir, "config.resolved.json", &resolved)?;

    match format {
        Format::Text => {
            emit(&format!("{}\n{markdown}", style.bold(&format!("Results written to {}", dir.display()))));
        }
        Format::Csv => emit(&csv),
        Format::Json => emit(&(serde_json::to_string_pretty(&table).expect("table serializes") + "\n")),
    }
    Ok(if table.has_errors() { 3 } else { 0 })
}
