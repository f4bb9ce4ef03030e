//! JSON shape files: `{"h": 0.05, "a": [{"k": 2, "l": 0, "coeff": 1.0}]}`.

use std::fs;
use std::path::Path;

use npspec_core::{HarmonicIndex, ShapeSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeTerm {
    pub k: usize,
    pub l: i64,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeFile {
    pub h: f64,
    pub a: Vec<ShapeTerm>,
}

impl ShapeFile {
    pub fn from_shape(shape: &ShapeSpec) -> Self {
        Self {
            h: shape.h(),
            a: shape
                .coeffs()
                .iter()
                .map(|&(j, coeff)| ShapeTerm {
                    k: j.k(),
                    l: j.l(),
                    coeff,
                })
                .collect(),
        }
    }

    pub fn to_shape(&self) -> npspec_core::Result<ShapeSpec> {
        let coeffs = self
            .a
            .iter()
            .map(|t| Ok((HarmonicIndex::new(t.k, t.l)?, t.coeff)))
            .collect::<npspec_core::Result<Vec<_>>>()?;
        ShapeSpec::new(self.h, coeffs)
    }
}

pub fn parse_shape(text: &str, path: &Path) -> CliResult<ShapeSpec> {
    let schema = |reason: String| CliError::Schema {
        path: path.to_path_buf(),
        reason,
    };
    if text.trim().is_empty() {
        return Err(schema(
            r#"empty file; expected {"h": number, "a": [{"k": int, "l": int, "coeff": number}]}"#
                .into(),
        ));
    }
    let file: ShapeFile = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
    file.to_shape().map_err(|e| schema(e.to_string()))
}

pub fn load_shape(path: &Path) -> CliResult<ShapeSpec> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Schema {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    parse_shape(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = r#"{"h": 0.05, "a": [{"k": 2, "l": 0, "coeff": 1.0}, {"k": 3, "l": -1, "coeff": 0.5}]}"#;
        let shape = parse_shape(text, Path::new("x.json")).unwrap();
        assert_eq!(shape.h(), 0.05);
        assert_eq!(shape.coeffs().len(), 2);
        let back = ShapeFile::from_shape(&shape);
        let again: ShapeFile = serde_json::from_str(&serde_json::to_string(&back).unwrap()).unwrap();
        assert_eq!(back, again);
    }

    #[test]
    fn rejects_bad_files() {
        let p = Path::new("bad.json");
        for text in [
            "",
            "  \n",
            "{}",
            r#"{"h": 0.1}"#,
            r#"{"h": 0.1, "a": [{"k": 1, "l": 2, "coeff": 1.0}]}"#,
            r#"{"h": 0.1, "a": [], "extra": 1}"#,
            r#"{"h": 2.0, "a": [{"k": 0, "l": 0, "coeff": -10.0}]}"#,
        ] {
            let err = parse_shape(text, p).unwrap_err();
            assert_eq!(err.exit_code(), crate::error::EXIT_CONFIG, "{text}");
        }
    }
}
