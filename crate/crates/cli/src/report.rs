use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use defectbench::evaluation::{aggregate_folds, FoldDetail, Metric, MetricsReport};
use defectbench::models::ModelKind;
use defectbench::reference;
use serde::Serialize;

use crate::{emit, CliError, Format, Style};

#[derive(Debug, Serialize)]
struct Row {
    dataset: String,
    model: ModelKind,
    metric: Metric,
    /// Percent.
    value: f64,
    folds: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    paper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
}

pub fn read_folds(path: &Path) -> Result<Vec<FoldDetail>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let r: FoldDetail = serde_json::from_str(line)
            .map_err(|e| CliError::input(format!("{}:{}: {e}", path.display(), i + 1)))?;
        records.push(r);
    }
    if records.is_empty() {
        return Err(CliError::input(format!("{}: no fold records", path.display())));
    }
    Ok(records)
}

fn rows(reports: &[(String, ModelKind, MetricsReport)], metric: Metric, against_paper: bool) -> Vec<Row> {
    reports
        .iter()
        .map(|(dataset, model, r)| {
            let value = 100.0 * metric.value(r);
            let paper = (against_paper && metric == Metric::Accuracy)
                .then(|| reference::accuracy(*model, dataset))
                .flatten();
            Row {
                dataset: dataset.clone(),
                model: *model,
                metric,
                value,
                folds: r.per_fold_accuracy.len(),
                paper,
                delta: paper.map(|p| value - p),
            }
        })
        .collect()
}

pub fn run(path: &Path, metric: Metric, against_paper: bool, format: Format, style: &Style) -> Result<u8, CliError> {
    let records = read_folds(path)?;
    let reports = aggregate_folds(&records).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    if against_paper && metric != Metric::Accuracy {
        log::warn!("published values are accuracies; --against-paper ignored for {}", metric.as_str());
    }
    let rows = rows(&reports, metric, against_paper);
    let show_paper = against_paper && metric == Metric::Accuracy;
    let mut out = String::new();
    match format {
        Format::Json => out = serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n",
        Format::Csv => {
            let _ = write!(out, "dataset,model,{}", metric.as_str());
            out.push_str(if show_paper { ",paper,delta\n" } else { "\n" });
            for r in &rows {
                let _ = write!(out, "{},{},{:.1}", r.dataset, r.model, r.value);
                match (show_paper, r.paper, r.delta) {
                    (true, Some(p), Some(d)) => {
                        let _ = writeln!(out, ",{p:.1},{d:+.1}");
                    }
                    (true, _, _) => out.push_str(",N/A,N/A\n"),
                    _ => out.push('\n'),
                }
            }
        }
        Format::Text => {
            let mut header = format!("{:<8} {:<24} {:>8}", "dataset", "model", metric.as_str());
            if show_paper {
                let _ = write!(header, " {:>8} {:>8}", "paper", "delta");
            }
            let _ = writeln!(out, "{}", style.bold(&header));
            for r in &rows {
                let _ = write!(out, "{:<8} {:<24} {:>8.1}", r.dataset, r.model.display_name(), r.value);
                if show_paper {
                    match (r.paper, r.delta) {
                        (Some(p), Some(d)) => {
                            let _ = write!(out, " {p:>8.1} {d:>+8.1}");
                        }
                        _ => {
                            let _ = write!(out, " {:>8} {:>8}", "N/A", "N/A");
                        }
                    }
                }
                out.push('\n');
            }
        }
    }
    emit(&out);
    Ok(0)
}
