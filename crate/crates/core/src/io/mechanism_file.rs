//! JSON mechanism files.

use std::fs;
use std::path::Path;

use serde_json::Value;

use super::IoError;
use crate::linkage::spec::{LinkageSpec, FORMAT_VERSION};

pub fn parse_mechanism_str(text: &str) -> Result<LinkageSpec, IoError> {
    let value: Value = serde_json::from_str(text).map_err(|e| IoError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    match value.get("format_version") {
        None => {
            return Err(IoError::Schema { path: "format_version".into(), message: "missing field".into() });
        }
        Some(v) if v.as_u64() != Some(FORMAT_VERSION as u64) => {
            return Err(IoError::Version { found: v.to_string(), expected: FORMAT_VERSION });
        }
        _ => {}
    }
    let spec: LinkageSpec = serde_path_to_error::deserialize(value).map_err(|e| IoError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    for (i, link) in spec.links.iter().enumerate() {
        if !(link.length > 0.0) {
            return Err(IoError::Schema {
                path: format!("links[{i}].length"),
                message: format!("link `{}` must have positive length, got {}", link.id, link.length),
            });
        }
    }
    for (i, g) in spec.gears.iter().enumerate() {
        if g.ratio == 0.0 {
            return Err(IoError::Schema { path: format!("gears[{i}].ratio"), message: "ratio must be nonzero".into() });
        }
    }
    Ok(spec)
}

pub fn parse_mechanism_file(path: impl AsRef<Path>) -> Result<LinkageSpec, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    parse_mechanism_str(&text)
}

/// Pretty-printed JSON with a trailing newline. Floats use the shortest
/// representation that reads back exactly, so rewriting is byte-stable.
pub fn mechanism_to_string(spec: &LinkageSpec) -> String {
    let mut s = serde_json::to_string_pretty(spec).expect("specs always serialize");
    s.push('\n');
    s
}

pub fn write_mechanism_file(spec: &LinkageSpec, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    fs::write(path, mechanism_to_string(spec)).map_err(|e| IoError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
  "format_version": 1,
  "name": "bar",
  "pivots": [{"id": "o", "x": 0, "y": 0}],
  "links": [{"id": "crank", "length": 2}],
  "joints": [{"id": "j", "a": "ground.o", "b": "crank.a"}]
}"#;

    #[test]
    fn minimal_parses() {
        let spec = parse_mechanism_str(MINIMAL).unwrap();
        assert_eq!(spec.links.len(), 1);
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_mechanism_str("{\n  \"format_version\": 1,\n  oops\n}").unwrap_err();
        match err {
            IoError::Syntax { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn version_is_checked() {
        let text = MINIMAL.replace("\"format_version\": 1", "\"format_version\": 2");
        assert!(matches!(parse_mechanism_str(&text), Err(IoError::Version { .. })));
    }

    #[test]
    fn negative_length_names_field() {
        let text = MINIMAL.replace("\"length\": 2", "\"length\": -2");
        match parse_mechanism_str(&text).unwrap_err() {
            IoError::Schema { path, .. } => assert_eq!(path, "links[0].length"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn schema_errors_carry_path() {
        let text = MINIMAL.replace("\"x\": 0", "\"x\": \"zero\"");
        match parse_mechanism_str(&text).unwrap_err() {
            IoError::Schema { path, .. } => assert_eq!(path, "pivots[0].x"),
            other => panic!("unexpected {other:?}"),
        }
        let text = MINIMAL.replace("\"name\": \"bar\"", "\"name\": \"bar\", \"colour\": 3");
        assert!(matches!(parse_mechanism_str(&text), Err(IoError::Schema { .. })));
    }
}
