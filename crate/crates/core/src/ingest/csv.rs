use crate::numerics::Matrix;

use super::arff::label_from_token;
use super::{Dataset, IngestError, ParseError, ParseErrorKind};

/// Parses a headed CSV file. `label_column` names the defect column; every
/// other column must be numeric. Empty cells and `?` are missing values.
pub fn parse_csv(text: &str, label_column: &str) -> Result<Dataset, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| ParseError::new(1, ParseErrorKind::MalformedHeader(e.to_string())))?
        .clone();
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        return Err(ParseError::new(1, ParseErrorKind::MalformedHeader("empty header".into())).into());
    }
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .or_else(|| {
            headers
                .iter()
                .position(|h| h.eq_ignore_ascii_case(label_column))
        })
        .ok_or_else(|| IngestError::UnknownColumn(label_column.to_string()))?;

    let n_cols = headers.len();
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != label_idx)
        .map(|(_, h)| h.to_string())
        .collect();

    let mut values = Vec::new();
    let mut labels = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            ParseError::new(line, ParseErrorKind::MalformedHeader(e.to_string()))
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != n_cols {
            return Err(ParseError::new(
                line,
                ParseErrorKind::Arity {
                    expected: n_cols,
                    found: record.len(),
                },
            )
            .into());
        }
        for (i, cell) in record.iter().enumerate() {
            if i == label_idx {
                let label = label_from_token(cell).ok_or_else(|| {
                    ParseError::new(
                        line,
                        ParseErrorKind::BadLabel {
                            token: cell.to_string(),
                        },
                    )
                })?;
                labels.push(label);
            } else if cell.is_empty() || cell == "?" {
                values.push(f64::NAN);
            } else {
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => values.push(v),
                    _ => {
                        return Err(ParseError::new(
                            line,
                            ParseErrorKind::NonNumeric {
                                token: cell.to_string(),
                            },
                        )
                        .into())
                    }
                }
            }
        }
    }
    if labels.is_empty() {
        return Err(ParseError::new(1, ParseErrorKind::EmptyData).into());
    }
    let features = Matrix::from_vec(labels.len(), n_cols - 1, values)
        .expect("row arity checked per record");
    Dataset::new("UNNAMED", features, labels, feature_names)
}

/// Renders a dataset as CSV with the label in a trailing `defects` column.
pub fn to_csv(d: &Dataset) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = d.feature_names.iter().map(String::as_str).collect();
    header.push("defects");
    w.write_record(&header).expect("in-memory write");
    for (row, label) in d.features.row_iter().zip(&d.labels) {
        let mut cells: Vec<String> = row
            .iter()
            .map(|v| if v.is_nan() { "?".into() } else { format!("{v:?}") })
            .collect();
        cells.push(label.to_string());
        w.write_record(&cells).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_csv() {
        let d = parse_csv("a,b,defects\n1,2,1\n", "defects").unwrap();
        assert_eq!(d.n_features(), 2);
        assert_eq!(d.labels, vec![1]);
        assert_eq!(d.feature_names, vec!["a", "b"]);
    }

    #[test]
    fn unknown_label_column() {
        assert!(matches!(
            parse_csv("a,b,defects\n1,2,1\n", "nope"),
            Err(IngestError::UnknownColumn(c)) if c == "nope"
        ));
    }

    #[test]
    fn ragged_row_reports_line() {
        let err = parse_csv("a,b,defects\n1,2,1\n3,1\n", "defects").unwrap_err();
        match err {
            IngestError::Parse(p) => {
                assert_eq!(p.line, 3);
                assert!(matches!(p.kind, ParseErrorKind::Arity { expected: 3, found: 2 }));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unparseable_cell() {
        let err = parse_csv("a,defects\nx1,0\n", "defects").unwrap_err();
        assert!(matches!(
            err,
            IngestError::Parse(ParseError {
                kind: ParseErrorKind::NonNumeric { .. },
                ..
            })
        ));
    }

    #[test]
    fn labels_and_missing_cells() {
        let d = parse_csv("x,\"bug\"\n1,TRUE\n,no\n?,Yes\n\"4\",false\n", "bug").unwrap();
        assert_eq!(d.labels, vec![1, 0, 1, 0]);
        assert_eq!(d.missing_count(), 2);
        assert_eq!(d.features[(3, 0)], 4.0);
    }

    #[test]
    fn csv_round_trip() {
        let d = parse_csv("a,b,defects\n1.5,-2,1\n0.1,3e5,0\n", "defects").unwrap();
        let again = parse_csv(&to_csv(&d), "defects").unwrap();
        assert_eq!(d, again);
    }
}
