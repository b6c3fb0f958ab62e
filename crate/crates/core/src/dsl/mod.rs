//! Scenario files: parsing, canonical serialization and the catalog.
//!
//! A `.3cs` file is a TOML document with a top-level `schema_version` and a
//! `[scenario]` table. Unknown keys anywhere are rejected.

pub mod catalog;

use serde::{Deserialize, Serialize};

use crate::model::{validate_scenario, ScenarioSpec, ValidationReport};

pub use catalog::{default_catalog_dir, load_catalog, query_catalog, Catalog, CatalogError, CatalogFilter, ScenarioSummary};

pub const SCHEMA_VERSION: u32 = 1;
pub const FILE_EXTENSION: &str = "3cs";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub schema_version: u32,
    pub scenario: ScenarioSpec,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported schema_version {found} (this build reads {supported})")]
    SchemaVersion { found: i64, supported: u32 },
    #[error("scenario is invalid:\n{0}")]
    Semantic(ValidationReport),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SerializeError {
    #[error("refusing to serialize an invalid scenario:\n{0}")]
    Invalid(ValidationReport),
    #[error("serialization failed: {0}")]
    Encode(String),
}

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |nl| before.len() - nl - 1) + 1;
    (line, col)
}

fn syntax_error(text: &str, err: &toml::de::Error) -> ParseError {
    let (line, column) = err.span().map_or((1, 1), |s| line_col(text, s.start));
    ParseError::Syntax {
        line,
        column,
        message: err.message().to_string(),
    }
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: Option<toml::Value>,
}

/// Parse and validate one scenario file.
pub fn parse_scenario(bytes: &[u8]) -> Result<ScenarioSpec, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let (line, column) = line_col(
            std::str::from_utf8(&bytes[..e.valid_up_to()]).unwrap_or(""),
            e.valid_up_to(),
        );
        ParseError::Syntax {
            line,
            column,
            message: "input is not valid UTF-8".into(),
        }
    })?;
    if text.trim().is_empty() {
        return Err(ParseError::Syntax {
            line: 1,
            column: 1,
            message: "empty document".into(),
        });
    }
    let probe: VersionProbe = toml::from_str(text).map_err(|e| syntax_error(text, &e))?;
    match probe.schema_version {
        None => {
            return Err(ParseError::Syntax {
                line: 1,
                column: 1,
                message: "missing `schema_version`".into(),
            })
        }
        Some(toml::Value::Integer(v)) if v == i64::from(SCHEMA_VERSION) => {}
        Some(toml::Value::Integer(v)) => {
            return Err(ParseError::SchemaVersion {
                found: v,
                supported: SCHEMA_VERSION,
            })
        }
        Some(_) => {
            return Err(ParseError::Syntax {
                line: 1,
                column: 1,
                message: "`schema_version` must be an integer".into(),
            })
        }
    }
    let doc: ScenarioDocument = toml::from_str(text).map_err(|e| syntax_error(text, &e))?;
    let report = validate_scenario(&doc.scenario);
    if !report.is_valid() {
        return Err(ParseError::Semantic(report));
    }
    Ok(doc.scenario)
}

/// Canonical text: keys sorted, shortest round-trip floats, trailing newline.
pub fn serialize_scenario(spec: &ScenarioSpec) -> Result<String, SerializeError> {
    let report = validate_scenario(spec);
    if !report.is_valid() {
        return Err(SerializeError::Invalid(report));
    }
    let doc = ScenarioDocument {
        schema_version: SCHEMA_VERSION,
        scenario: spec.clone(),
    };
    // Round through a Value: its tables are ordered maps, which sorts keys.
    let value = toml::Value::try_from(&doc).map_err(|e| SerializeError::Encode(e.to_string()))?;
    let mut text = toml::to_string(&value).map_err(|e| SerializeError::Encode(e.to_string()))?;
    if !text.ends_with('\n') {
        text.push('\n');
    }
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_syntax_error_at_origin() {
        match parse_scenario(b"") {
            Err(ParseError::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 1)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_scenario(b"   \n"), Err(ParseError::Syntax { line: 1, column: 1, .. })));
    }

    #[test]
    fn garbage_reports_position() {
        let err = parse_scenario(b"schema_version = 1\n[scenario\n").unwrap_err();
        match err {
            ParseError::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_schema_version() {
        let err = parse_scenario(b"schema_version = 7\n").unwrap_err();
        assert_eq!(err, ParseError::SchemaVersion { found: 7, supported: 1 });
    }

    #[test]
    fn line_col_counts_from_one() {
        assert_eq!(line_col("ab\ncd", 0), (1, 1));
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
    }
}
