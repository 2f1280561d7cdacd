use std::path::Path;

use defectbench::ingest::{load_dataset, profile, DatasetProfile, IngestError};

use crate::{emit, CliError, Format};

fn render_text(p: &DatasetProfile) -> String {
    let mut out = format!(
        "{}: instances={} attributes={} faulty={:.1}% ({} defective)\n",
        p.name,
        p.n_instances,
        p.n_attributes,
        100.0 * p.faulty_fraction,
        p.n_faulty
    );
    out.push_str(&format!(
        "{:<24} {:>12} {:>12} {:>12} {:>12} {:>8}\n",
        "feature", "min", "max", "mean", "std", "missing"
    ));
    for s in &p.per_feature_stats {
        out.push_str(&format!(
            "{:<24} {:>12.4} {:>12.4} {:>12.4} {:>12.4} {:>8}\n",
            s.name, s.min, s.max, s.mean, s.std, s.missing_count
        ));
    }
    out
}

fn render_csv(p: &DatasetProfile) -> String {
    let mut out = String::from("dataset,instances,attributes,faulty_percent,feature,min,max,mean,std,missing\n");
    for s in &p.per_feature_stats {
        out.push_str(&format!(
            "{},{},{},{:.2},{},{},{},{},{},{}\n",
            p.name,
            p.n_instances,
            p.n_attributes,
            100.0 * p.faulty_fraction,
            s.name,
            s.min,
            s.max,
            s.mean,
            s.std,
            s.missing_count
        ));
    }
    out
}

pub fn run(path: &Path, label_column: Option<&str>, format: Format) -> Result<u8, CliError> {
    let d = load_dataset(path, label_column).map_err(|e| match e {
        IngestError::Io { .. } => CliError::input(e.to_string()),
        _ => CliError::input(format!("{}: {e}", path.display())),
    })?;
    let p = profile(&d);
    let text = match format {
        Format::Text => render_text(&p),
        Format::Csv => render_csv(&p),
        Format::Json => serde_json::to_string_pretty(&p).expect("profile serializes") + "\n",
    };
    emit(&text);
    Ok(0)
}
