//! Loading spaces from files: either a distance table or a generator spec.

use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::generators::GenSpec;
use crate::space::{DistanceTable, FiniteMetricSpace};

/// What a space file contains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceDocument {
    Table(DistanceTable),
    Generator(GenSpec),
}

impl SpaceDocument {
    pub fn parse(text: &str) -> Result<Self> {
        // Peek for the generator tag without losing error positions.
        let is_gen = matches!(
            serde_json::from_str::<Value>(text)?,
            Value::Object(ref m) if m.contains_key("gen")
        );
        if is_gen {
            Ok(SpaceDocument::Generator(GenSpec::from_json(text)?))
        } else {
            Ok(SpaceDocument::Table(DistanceTable::from_json(text)?))
        }
    }

    /// Validates (tables) or generates (specs).
    pub fn build(&self) -> Result<FiniteMetricSpace> {
        match self {
            SpaceDocument::Table(t) => FiniteMetricSpace::try_from(t),
            SpaceDocument::Generator(g) => g.build(),
        }
    }
}

/// Parses and validates a space from JSON text. Non-metric tables are
/// rejected with their witness.
pub fn parse_space(text: &str) -> Result<FiniteMetricSpace> {
    SpaceDocument::parse(text)?.build()
}

pub fn load_space(path: impl AsRef<Path>) -> Result<FiniteMetricSpace> {
    parse_space(&std::fs::read_to_string(path)?)
}

pub fn save_space(space: &FiniteMetricSpace, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, space.to_table().to_json()).map_err(Error::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_and_generator_documents() {
        let s = parse_space(r#"{"gen":"zero_one","n":4}"#).unwrap();
        assert_eq!(s.len(), 4);
        let t = parse_space(r#"{"labels":["a","b"],"dist":[["0","1/2"],["1/2","0"]]}"#).unwrap();
        assert_eq!(t.diameter(), "1/2".parse().unwrap());
    }

    #[test]
    fn non_metric_rejected() {
        let text = r#"{"labels":["1","2","3"],"dist":[["0","5","1"],["5","0","1"],["1","1","0"]]}"#;
        assert!(matches!(parse_space(text), Err(Error::NotMetric(_))));
    }

    #[test]
    fn malformed_json_has_position() {
        match parse_space("{\"labels\": [\"a\"],\n  \"dist\": [[\"0\"]") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn file_roundtrip() {
        let dir = std::env::temp_dir().join(format!("besicover-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("space.json");
        let s = crate::generators::make_paper_ultrametric(7);
        save_space(&s, &p).unwrap();
        let back = load_space(&p).unwrap();
        assert_eq!(back.content_hash(), s.content_hash());
        std::fs::remove_dir_all(dir).ok();
    }
}
