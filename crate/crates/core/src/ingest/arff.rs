//! Parser for the dense, numeric ARFF subset the Promise datasets use.
//!
//! Supported: `%` comments, `@relation`, `@attribute <name> numeric|real|integer`,
//! `@attribute <name> {a,b}` (class only) and a comma-separated `@data`
//! section where `?` marks a missing value. Keywords are case-insensitive;
//! LF and CRLF line endings are both accepted.

use crate::numerics::Matrix;

use super::{Dataset, IngestError, ParseError, ParseErrorKind};

const CLASS_NAMES: [&str; 3] = ["defects", "label", "problems"];

#[derive(Debug, Clone)]
enum AttributeType {
    Numeric,
    Nominal(Vec<String>),
}

#[derive(Debug, Clone)]
struct Attribute {
    name: String,
    kind: AttributeType,
    line: usize,
}

/// Maps a class token to 1 (defective) / 0. `None` if unrecognized.
pub(crate) fn label_from_token(token: &str) -> Option<u8> {
    let t = token.trim_matches(|c: char| !c.is_alphanumeric());
    match t.to_ascii_lowercase().as_str() {
        "true" | "yes" | "y" | "1" | "t" => Some(1),
        "false" | "no" | "n" | "0" | "f" => Some(0),
        _ => None,
    }
}

fn is_defective_token(token: &str) -> bool {
    label_from_token(token) == Some(1)
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    if s.len() >= 2
        && ((s.starts_with('\'') && s.ends_with('\'')) || (s.starts_with('"') && s.ends_with('"')))
    {
        &s[1..s.len() - 1]
    } else {
        s
    }
}

/// Splits `@attribute <name> <type>` into name and type text, honoring quotes.
fn split_attribute(rest: &str) -> Option<(String, String)> {
    let rest = rest.trim();
    let first = rest.chars().next()?;
    if first == '\'' || first == '"' {
        let close = rest[1..].find(first)? + 1;
        let name = rest[1..close].to_string();
        let kind = rest[close + 1..].trim().to_string();
        if kind.is_empty() {
            return None;
        }
        Some((name, kind))
    } else {
        let split = rest.find(|c: char| c.is_whitespace() || c == '{')?;
        let name = rest[..split].to_string();
        let kind = rest[split..].trim().to_string();
        if kind.is_empty() {
            return None;
        }
        Some((name, kind))
    }
}

fn parse_attribute(rest: &str, line: usize) -> Result<Attribute, ParseError> {
    let (name, kind_text) = split_attribute(rest).ok_or_else(|| {
        ParseError::new(
            line,
            ParseErrorKind::MalformedHeader(format!("cannot read attribute declaration {rest:?}")),
        )
    })?;
    let kind = if kind_text.starts_with('{') {
        let close = kind_text.rfind('}').ok_or_else(|| {
            ParseError::new(
                line,
                ParseErrorKind::MalformedHeader("unterminated nominal value list".into()),
            )
        })?;
        let values: Vec<String> = kind_text[1..close]
            .split(',')
            .map(|v| unquote(v).to_string())
            .filter(|v| !v.is_empty())
            .collect();
        AttributeType::Nominal(values)
    } else {
        match kind_text.to_ascii_lowercase().as_str() {
            "numeric" | "real" | "integer" => AttributeType::Numeric,
            other => {
                return Err(ParseError::new(
                    line,
                    ParseErrorKind::UnsupportedType {
                        attribute: name,
                        kind: other.to_string(),
                    },
                ))
            }
        }
    };
    Ok(Attribute { name, kind, line })
}

/// Picks the class attribute: an explicit name match first, else the last
/// nominal attribute.
fn find_class(attrs: &[Attribute]) -> Option<usize> {
    attrs
        .iter()
        .position(|a| CLASS_NAMES.iter().any(|n| a.name.eq_ignore_ascii_case(n)))
        .or_else(|| {
            attrs
                .iter()
                .rposition(|a| matches!(a.kind, AttributeType::Nominal(_)))
        })
}

/// Parses an ARFF document into a [`Dataset`] named after its `@relation`.
pub fn parse_arff(text: &str) -> Result<Dataset, IngestError> {
    let mut relation: Option<String> = None;
    let mut attrs: Vec<Attribute> = Vec::new();
    let mut data_line: Option<usize> = None;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    for (no, raw) in lines.by_ref() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if !line.starts_with('@') {
            return Err(ParseError::new(
                no,
                ParseErrorKind::MalformedHeader(format!("unexpected line before @data: {line:?}")),
            )
            .into());
        }
        let (keyword, rest) = line
            .split_once(|c: char| c.is_whitespace())
            .unwrap_or((line, ""));
        match keyword.to_ascii_lowercase().as_str() {
            "@relation" => relation = Some(unquote(rest).to_string()),
            "@attribute" => attrs.push(parse_attribute(rest, no)?),
            "@data" => {
                data_line = Some(no);
                break;
            }
            other => {
                return Err(ParseError::new(
                    no,
                    ParseErrorKind::MalformedHeader(format!("unknown keyword {other}")),
                )
                .into())
            }
        }
    }

    let data_line = data_line.ok_or_else(|| {
        ParseError::new(
            text.lines().count().max(1),
            ParseErrorKind::MalformedHeader("missing @data section".into()),
        )
    })?;
    if attrs.is_empty() {
        return Err(ParseError::new(
            data_line,
            ParseErrorKind::MalformedHeader("no attributes declared".into()),
        )
        .into());
    }

    let class_idx = find_class(&attrs)
        .ok_or_else(|| ParseError::new(data_line, ParseErrorKind::NoClassAttribute))?;
    let class_attr = &attrs[class_idx];
    let class_values = match &class_attr.kind {
        AttributeType::Nominal(values) => {
            if values.len() != 2 {
                return Err(ParseError::new(
                    class_attr.line,
                    ParseErrorKind::ClassArity {
                        attribute: class_attr.name.clone(),
                        count: values.len(),
                    },
                )
                .into());
            }
            Some(values.clone())
        }
        AttributeType::Numeric => None,
    };
    // Which nominal value denotes a defect; otherwise numeric 0/1 tokens.
    let defective_value = match &class_values {
        Some(values) => {
            let hits: Vec<usize> = (0..2).filter(|&i| is_defective_token(&values[i])).collect();
            if hits.len() != 1 {
                return Err(ParseError::new(
                    class_attr.line,
                    ParseErrorKind::MalformedHeader(format!(
                        "cannot tell which of {values:?} marks a defective module"
                    )),
                )
                .into());
            }
            Some(values[hits[0]].clone())
        }
        None => None,
    };

    for (i, a) in attrs.iter().enumerate() {
        if i != class_idx && matches!(a.kind, AttributeType::Nominal(_)) {
            return Err(ParseError::new(
                a.line,
                ParseErrorKind::NominalFeature {
                    attribute: a.name.clone(),
                },
            )
            .into());
        }
    }

    let n_attrs = attrs.len();
    let n_features = n_attrs - 1;
    let mut values: Vec<f64> = Vec::new();
    let mut labels: Vec<u8> = Vec::new();
    for (no, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if line.starts_with('{') {
            return Err(ParseError::new(
                no,
                ParseErrorKind::MalformedHeader("sparse ARFF rows are not supported".into()),
            )
            .into());
        }
        let tokens: Vec<&str> = line.split(',').map(unquote).collect();
        if tokens.len() != n_attrs {
            return Err(ParseError::new(
                no,
                ParseErrorKind::Arity {
                    expected: n_attrs,
                    found: tokens.len(),
                },
            )
            .into());
        }
        for (i, tok) in tokens.iter().enumerate() {
            if i == class_idx {
                let label = match &defective_value {
                    _ if *tok == "?" => None,
                    Some(def) => {
                        let vals = class_values.as_ref().expect("nominal class");
                        if tok == def {
                            Some(1)
                        } else if vals.iter().any(|v| v == tok) {
                            Some(0)
                        } else {
                            None
                        }
                    }
                    None => label_from_token(tok),
                };
                let label = label.ok_or_else(|| {
                    ParseError::new(
                        no,
                        ParseErrorKind::BadLabel {
                            token: tok.to_string(),
                        },
                    )
                })?;
                labels.push(label);
            } else if *tok == "?" {
                values.push(f64::NAN);
            } else {
                let v: f64 = tok.parse().map_err(|_| {
                    ParseError::new(
                        no,
                        ParseErrorKind::NonNumeric {
                            token: tok.to_string(),
                        },
                    )
                })?;
                if !v.is_finite() {
                    return Err(ParseError::new(
                        no,
                        ParseErrorKind::NonNumeric {
                            token: tok.to_string(),
                        },
                    )
                    .into());
                }
                values.push(v);
            }
        }
    }

    if labels.is_empty() {
        return Err(ParseError::new(data_line, ParseErrorKind::EmptyData).into());
    }

    let feature_names: Vec<String> = attrs
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != class_idx)
        .map(|(_, a)| a.name.clone())
        .collect();
    let features = Matrix::from_vec(labels.len(), n_features, values)
        .expect("row arity checked per line");
    let mut d = Dataset::new(
        relation.as_deref().unwrap_or("UNNAMED"),
        features,
        labels,
        feature_names,
    )?;
    d.declared_attributes = n_attrs;
    Ok(d)
}

/// Writes a complete dataset back out as ARFF (class last, `{false,true}`).
pub fn to_arff(d: &Dataset) -> String {
    let mut out = String::new();
    out.push_str(&format!("@relation {}\n\n", d.name));
    for name in &d.feature_names {
        out.push_str(&format!("@attribute '{name}' numeric\n"));
    }
    out.push_str("@attribute defects {false,true}\n\n@data\n");
    for (row, label) in d.features.row_iter().zip(&d.labels) {
        for v in row {
            if v.is_nan() {
                out.push_str("?,");
            } else {
                // `{:?}` prints the shortest string that round-trips exactly.
                out.push_str(&format!("{v:?},"));
            }
        }
        out.push_str(if *label == 1 { "true\n" } else { "false\n" });
    }
    out
}
