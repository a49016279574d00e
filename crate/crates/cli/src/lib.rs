//! Command-line front end: tree, pairs and matrix ingestion, scoring reports
//! and table reproduction.

pub mod error;
pub mod observations;
pub mod report;
pub mod tree_file;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use treescore_core::harness::reproduce_table;
use treescore_core::{BuildOptions, Offset, PredictionCounts};

pub use error::{exit, CliError, CliResult};
use observations::{read_matrix, read_pairs, NoneToken};
use report::{render_score, render_tables_csv, render_tables_text, score, MetricChoice, OutputFormat};
use tree_file::{load_tree, TreeSource};

#[derive(Debug, Parser)]
#[command(
    name = "treescore",
    version,
    about = "Hierarchy-aware scoring of classifier predictions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a tree file and report every violation.
    ValidateTree(TreeArgs),
    /// Score predictions with one metric or all of them.
    Score {
        #[command(flatten)]
        input: ScoreArgs,
        #[arg(long, value_enum, default_value = "all")]
        metric: MetricChoice,
    },
    /// Same as `score --metric all`.
    Evaluate {
        #[command(flatten)]
        input: ScoreArgs,
    },
    /// Recompute the reference tables and compare them with the published cells.
    Reproduce {
        #[arg(long, value_enum, default_value = "both", allow_hyphen_values = true)]
        offset: TableOffset,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    /// Tree JSON with root and parent, child, weight edges.
    #[arg(long)]
    pub tree: PathBuf,
    /// Derive weights from the tree shape; edges must then omit them.
    #[arg(long)]
    pub uniform_weights: bool,
}

#[derive(Debug, Args)]
#[group(id = "observations", required = true, multiple = false, args = ["pairs", "matrix"])]
pub struct ScoreArgs {
    #[command(flatten)]
    pub tree: TreeArgs,
    /// CSV with header truth,predicted,count.
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    /// CSV confusion matrix with header truth,<predicted labels>.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Detection-error offset, 0 or negative.
    #[arg(long, default_value = "0", allow_hyphen_values = true, value_parser = parse_offset)]
    pub offset: Offset,
    /// Recall weight in the F-measures.
    #[arg(long, default_value_t = 1.0, value_parser = parse_beta)]
    pub beta: f64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
    /// Field value meaning no detection, instead of an empty field.
    #[arg(long)]
    pub none_token: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableOffset {
    #[value(name = "0")]
    Zero,
    #[value(name = "-1")]
    MinusOne,
    Both,
}

fn parse_offset(s: &str) -> Result<Offset, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    Offset::new(v).map_err(|e| e.to_string())
}

fn parse_beta(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(b) if b.is_finite() && b >= 0.0 => Ok(b),
        _ => Err(format!("beta must be a finite number >= 0, got {s:?}")),
    }
}

fn options(args: &TreeArgs) -> BuildOptions {
    if args.uniform_weights {
        BuildOptions::uniform()
    } else {
        BuildOptions::default()
    }
}

fn validate_tree(args: &TreeArgs) -> CliResult<String> {
    let opts = options(args);
    let source = TreeSource::read(&args.tree)?;
    let errors = source.diagnose(opts);
    if !errors.is_empty() {
        return Err(CliError::InvalidTree(errors));
    }
    let tree = source.build(opts).map_err(|e| CliError::InvalidTree(vec![e]))?;
    Ok(format!("OK: {} nodes, diameter {}\n", tree.len(), tree.diameter()))
}

fn run_score(args: &ScoreArgs, metric: MetricChoice) -> CliResult<String> {
    let tree = load_tree(&args.tree.tree, options(&args.tree))?;
    let none = NoneToken::from_flag(args.none_token.clone());
    let counts: PredictionCounts = match (&args.pairs, &args.matrix) {
        (Some(p), None) => read_pairs(p, &tree, &none)?,
        (None, Some(m)) => read_matrix(m, &tree, &none)?,
        _ => {
            return Err(CliError::Usage(
                "exactly one of --pairs and --matrix is required".into(),
            ))
        }
    };
    let report = score(&tree, &counts, metric, args.offset, args.beta)?;
    Ok(render_score(&report, args.format))
}

fn run_reproduce(offset: TableOffset, format: OutputFormat) -> String {
    let offsets: &[f64] = match offset {
        TableOffset::Zero => &[0.0],
        TableOffset::MinusOne => &[-1.0],
        TableOffset::Both => &[0.0, -1.0],
    };
    let tables: Vec<_> = offsets
        .iter()
        .map(|&o| reproduce_table(Offset::new(o).expect("valid offset")))
        .collect();
    match format {
        OutputFormat::Csv => render_tables_csv(&tables),
        OutputFormat::Text => render_tables_text(&tables),
    }
}

pub fn execute(command: &Command) -> CliResult<String> {
    match command {
        Command::ValidateTree(args) => validate_tree(args),
        Command::Score { input, metric } => run_score(input, *metric),
        Command::Evaluate { input } => run_score(input, MetricChoice::All),
        Command::Reproduce { offset, format } => Ok(run_reproduce(*offset, *format)),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// status. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                exit::USAGE
            } else {
                let _ = write!(out, "{text}");
                exit::OK
            };
        }
    };
    match execute(&cli.command) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            exit::OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.to_string().replace('\n', "\nerror: "));
            e.exit_code()
        }
    }
}
