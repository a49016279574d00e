//! Pairs files (`truth,predicted,count`) and confusion-matrix files
//! (`truth,<predicted labels...>`).

use std::fs::File;
use std::io::Read;
use std::path::Path;

use treescore_core::{ClassRef, Error as CoreError, PredictionCounts, ScoringTree};

use crate::error::{CliError, CliResult};

/// How no-detection is spelled in a delimited file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum NoneToken {
    /// An empty field.
    #[default]
    Empty,
    Custom(String),
}

impl NoneToken {
    pub fn from_flag(flag: Option<String>) -> Self {
        flag.map_or(NoneToken::Empty, NoneToken::Custom)
    }

    fn matches(&self, field: &str) -> bool {
        match self {
            NoneToken::Empty => field.is_empty(),
            NoneToken::Custom(t) => field == t,
        }
    }
}

struct Resolver<'a> {
    tree: &'a ScoringTree,
    none: &'a NoneToken,
    path: &'a Path,
}

impl Resolver<'_> {
    fn class(&self, field: &str, row: u64) -> CliResult<ClassRef> {
        if self.none.matches(field) {
            return Ok(ClassRef::NoDetection);
        }
        self.tree.class_ref(field).map_err(|e| match e {
            CoreError::UnknownNode(label) => CliError::UnknownLabel {
                path: self.path.to_path_buf(),
                row,
                label,
            },
            other => self.bad_row(row, other.to_string()),
        })
    }

    fn bad_row(&self, row: u64, message: impl Into<String>) -> CliError {
        CliError::BadRow {
            path: self.path.to_path_buf(),
            row,
            message: message.into(),
        }
    }

    fn count(&self, field: &str, row: u64) -> CliResult<u64> {
        field
            .parse()
            .map_err(|_| self.bad_row(row, format!("count {field:?} is not a non-negative integer")))
    }

    fn add(&self, counts: &mut PredictionCounts, t: ClassRef, p: ClassRef, c: u64, row: u64) -> CliResult<()> {
        counts
            .add(self.tree, t, p, c)
            .map_err(|e| self.bad_row(row, e.to_string()))
    }
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input)
}

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    let row = e.position().map_or(0, |p| p.line());
    CliError::BadRow {
        path: path.to_path_buf(),
        row,
        message: e.to_string(),
    }
}

/// Counts every label node of `tree` as a declared class so flat averages
/// cover classes that never occur.
fn empty_counts(tree: &ScoringTree) -> PredictionCounts {
    PredictionCounts::new(tree, tree.label_nodes().map(ClassRef::Node)).expect("label nodes are valid classes")
}

/// Parses a pairs file. The count column may be left out entirely or per row,
/// defaulting to 1. Rows are numbered by file line, header included.
pub fn parse_pairs<R: Read>(
    input: R,
    tree: &ScoringTree,
    none: &NoneToken,
    path: &Path,
) -> CliResult<PredictionCounts> {
    let resolver = Resolver { tree, none, path };
    let mut records = reader(input).into_records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| csv_error(path, e))?,
        None => return Err(resolver.bad_row(1, "missing header truth,predicted,count")),
    };
    let fields: Vec<&str> = header.iter().collect();
    if fields != ["truth", "predicted", "count"] && fields != ["truth", "predicted"] {
        return Err(resolver.bad_row(
            1,
            format!("expected header truth,predicted,count, found {}", fields.join(",")),
        ));
    }
    let mut counts = empty_counts(tree);
    for record in records {
        let record = record.map_err(|e| csv_error(path, e))?;
        let row = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if !(2..=3).contains(&record.len()) {
            return Err(resolver.bad_row(row, format!("expected 2 or 3 fields, found {}", record.len())));
        }
        let t = resolver.class(&record[0], row)?;
        let p = resolver.class(&record[1], row)?;
        let c = match record.get(2) {
            Some(f) if !f.is_empty() => resolver.count(f, row)?,
            _ => 1,
        };
        resolver.add(&mut counts, t, p, c, row)?;
    }
    Ok(counts)
}

/// Parses a confusion matrix with truth labels down the first column and
/// predicted labels across the header.
pub fn parse_matrix<R: Read>(
    input: R,
    tree: &ScoringTree,
    none: &NoneToken,
    path: &Path,
) -> CliResult<PredictionCounts> {
    let resolver = Resolver { tree, none, path };
    let mut records = reader(input).into_records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| csv_error(path, e))?,
        None => return Err(resolver.bad_row(1, "missing header truth,<labels>")),
    };
    if header.get(0) != Some("truth") || header.len() < 2 {
        return Err(resolver.bad_row(1, "header must start with truth followed by predicted labels"));
    }
    let columns = header
        .iter()
        .skip(1)
        .map(|f| resolver.class(f, 1))
        .collect::<CliResult<Vec<_>>>()?;
    let mut counts = empty_counts(tree);
    for record in records {
        let record = record.map_err(|e| csv_error(path, e))?;
        let row = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(resolver.bad_row(row, format!("expected {} fields, found {}", header.len(), record.len())));
        }
        let t = resolver.class(&record[0], row)?;
        for (field, &p) in record.iter().skip(1).zip(&columns) {
            let c = if field.is_empty() {
                0
            } else {
                resolver.count(field, row)?
            };
            resolver.add(&mut counts, t, p, c, row)?;
        }
    }
    Ok(counts)
}

pub fn read_pairs(path: &Path, tree: &ScoringTree, none: &NoneToken) -> CliResult<PredictionCounts> {
    parse_pairs(open(path)?, tree, none, path)
}

pub fn read_matrix(path: &Path, tree: &ScoringTree, none: &NoneToken) -> CliResult<PredictionCounts> {
    parse_matrix(open(path)?, tree, none, path)
}
