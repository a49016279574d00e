//! JSON tree files: `{"root": "A", "edges": [["A", "B", 0.9], ...]}`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Deserialize;
use treescore_core::{BuildOptions, EdgeSpec, Error as CoreError, ScoringTree};

use crate::error::{CliError, CliResult};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeDoc {
    root: String,
    edges: Vec<EdgeRow>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum EdgeRow {
    Weighted(String, String, f64),
    Bare(String, String),
}

impl From<EdgeRow> for EdgeSpec {
    fn from(row: EdgeRow) -> Self {
        match row {
            EdgeRow::Weighted(p, c, w) => EdgeSpec::new(p, c, w),
            EdgeRow::Bare(p, c) => EdgeSpec::unweighted(p, c),
        }
    }
}

/// A parsed but not yet validated tree file.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeSource {
    pub root: String,
    pub edges: Vec<EdgeSpec>,
}

impl TreeSource {
    pub fn parse(text: &str, path: &Path) -> CliResult<Self> {
        let doc: TreeDoc = serde_json::from_str(text).map_err(|e| CliError::TreeSyntax {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        })?;
        Ok(Self {
            root: doc.root,
            edges: doc.edges.into_iter().map(EdgeSpec::from).collect(),
        })
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    /// Every problem with the file, in the order the checks run.
    pub fn diagnose(&self, options: BuildOptions) -> Vec<CoreError> {
        let mut errors = ScoringTree::diagnose(&self.edges, options);
        if errors.is_empty() {
            if let Err(e) = self.build(options) {
                errors.push(e);
            }
        }
        errors
    }

    pub fn build(&self, options: BuildOptions) -> Result<ScoringTree, CoreError> {
        let tree = ScoringTree::build_with(&self.edges, options)?;
        let found = tree.label(tree.root());
        if found != self.root {
            return Err(CoreError::RootMismatch {
                declared: self.root.clone(),
                found: found.to_string(),
            });
        }
        Ok(tree)
    }
}

/// serde_json appends " at line L column C" to its messages; the position is
/// reported separately.
fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

/// Reads and validates a tree file, reporting every violation on failure.
pub fn load_tree(path: &Path, options: BuildOptions) -> CliResult<ScoringTree> {
    let source = TreeSource::read(path)?;
    source
        .build(options)
        .map_err(|_| CliError::InvalidTree(source.diagnose(options)))
}

/// Canonical text form of `tree`. Weights use the shortest representation that
/// parses back to the same bits, so `parse(serialize(t))` reproduces `t`
/// exactly and serializing again yields identical bytes.
pub fn serialize_tree(tree: &ScoringTree) -> String {
    let quote = |s: &str| serde_json::to_string(s).expect("strings always serialize");
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"root\": {},", quote(tree.label(tree.root())));
    out.push_str("  \"edges\": [");
    for (i, (p, c, w)) in tree.edges().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        let _ = write!(out, "    [{}, {}, {:?}]", quote(tree.label(p)), quote(tree.label(c)), w);
    }
    out.push_str("\n  ]\n}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use treescore_core::harness::{paper_tree, weighted_tree, WeightStrategy};

    fn parse(text: &str) -> CliResult<TreeSource> {
        TreeSource::parse(text, Path::new("t.json"))
    }

    #[test]
    fn round_trip_is_exact() {
        let mut trees: Vec<ScoringTree> = WeightStrategy::ALL.into_iter().map(weighted_tree).collect();
        trees.push(paper_tree());
        for tree in trees {
            let text = serialize_tree(&tree);
            let back = parse(&text).unwrap().build(BuildOptions::default()).unwrap();
            assert_eq!(serialize_tree(&back), text);
            let a: Vec<_> = tree
                .edges()
                .map(|(p, c, w)| (tree.label(p), tree.label(c), w.to_bits()))
                .collect();
            let b: Vec<_> = back
                .edges()
                .map(|(p, c, w)| (back.label(p), back.label(c), w.to_bits()))
                .collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn bare_edges_need_uniform_mode() {
        let src = parse(r#"{"root": "r", "edges": [["r", "a"], ["r", "b"]]}"#).unwrap();
        assert!(matches!(
            src.build(BuildOptions::default()),
            Err(CoreError::MissingWeight { .. })
        ));
        let tree = src.build(BuildOptions::uniform()).unwrap();
        assert_eq!(tree.len(), 3);
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse("{\"root\": \"A\",\n \"edges\": [[\"A\", \"B\", 1.0],]}").unwrap_err();
        match err {
            CliError::TreeSyntax { line, column, .. } => assert_eq!((line, column), (2, 28)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse(r#"{"root": "A", "edges": [], "extra": 1}"#),
            Err(CliError::TreeSyntax { .. })
        ));
    }

    #[test]
    fn declared_root_must_match() {
        let src = parse(r#"{"root": "X", "edges": [["A", "B", 1.0], ["A", "C", 1.0]]}"#).unwrap();
        assert!(matches!(
            src.diagnose(BuildOptions::default())[..],
            [CoreError::RootMismatch { .. }]
        ));
    }
}
