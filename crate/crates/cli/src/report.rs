//! Score reports and reproduced tables, as aligned text or CSV.

use std::fmt::Write as _;

use clap::ValueEnum;
use treescore_core::harness::{annotate, AnnotatedCell, CellStatus, ModelId, ScoreTable};
use treescore_core::{
    ancestor_prf, evaluate, flat_macro, flat_micro, Metric, MetricConfig, Offset, PredictionCounts, ScoringTree,
};

use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricChoice {
    Pl,
    L,
    Lpp,
    Tps,
    Pps,
    /// Harmonic mean of micro PPS and TPS.
    Hf1,
    /// Mean of per-class hierarchical F-beta.
    Hf,
    /// Ancestor-set hierarchical precision, recall and F-beta.
    Ancestor,
    Flat,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Csv,
}

/// Named values, in display order.
pub type Rows = Vec<(String, f64)>;

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub offset: Offset,
    pub beta: f64,
    pub rows: Rows,
    pub per_class: Option<Rows>,
    pub total: u64,
    pub detections: u64,
}

fn flat_rows(counts: &PredictionCounts) -> CliResult<Rows> {
    let m = flat_macro(counts)?;
    let u = flat_micro(counts)?;
    Ok(vec![
        ("R_M".into(), m.recall),
        ("P_M".into(), m.precision),
        ("F1_M".into(), m.f1),
        ("R_mu".into(), u.recall),
        ("P_mu".into(), u.precision),
        ("F1_mu".into(), u.f1),
    ])
}

pub fn score(
    tree: &ScoringTree,
    counts: &PredictionCounts,
    choice: MetricChoice,
    offset: Offset,
    beta: f64,
) -> CliResult<ScoreReport> {
    counts.ensure_nonempty()?;
    let run = |metric: Metric| {
        evaluate(
            tree,
            counts,
            &MetricConfig::new(metric).with_offset(offset).with_beta(beta),
        )
    };
    let labelled = |per: Option<Vec<(treescore_core::ClassRef, f64)>>| {
        per.map(|v| {
            v.into_iter()
                .map(|(c, s)| (tree.class_label(c).to_string(), s))
                .collect()
        })
    };
    let single = |metric: Metric, name: &str| -> CliResult<(Rows, Option<Rows>)> {
        let r = run(metric)?;
        Ok((vec![(name.to_string(), r.overall)], labelled(r.per_class)))
    };
    let (rows, per_class) = match choice {
        MetricChoice::Pl => single(Metric::PathLength, "PL")?,
        MetricChoice::L => single(Metric::Lca, "L")?,
        MetricChoice::Lpp => single(Metric::LcaPathPenalty, "LPP")?,
        MetricChoice::Tps => single(Metric::TruthStandardized, "TPS")?,
        MetricChoice::Pps => single(Metric::PredictionStandardized, "PPS")?,
        MetricChoice::Hf1 => single(Metric::HierarchicalF1Micro, "hF1")?,
        MetricChoice::Hf => single(Metric::HierarchicalFBeta, "hF_beta")?,
        MetricChoice::Ancestor => {
            let s = ancestor_prf(tree, &counts.pairs(), beta)?;
            (
                vec![
                    ("hP".into(), s.precision),
                    ("hR".into(), s.recall),
                    ("hF_beta".into(), s.f_beta),
                ],
                None,
            )
        }
        MetricChoice::Flat => (flat_rows(counts)?, labelled(run(Metric::Flat)?.per_class)),
        MetricChoice::All => {
            let mut rows = flat_rows(counts)?;
            for (metric, name) in [
                (Metric::PathLength, "PL"),
                (Metric::Lca, "L"),
                (Metric::LcaPathPenalty, "LPP"),
                (Metric::TruthStandardized, "TPS"),
                (Metric::PredictionStandardized, "PPS"),
                (Metric::HierarchicalF1Micro, "hF1"),
            ] {
                rows.push((name.into(), run(metric)?.overall));
            }
            (rows, None)
        }
    };
    Ok(ScoreReport {
        offset,
        beta,
        rows,
        per_class,
        total: counts.total(),
        detections: counts.detection_total(),
    })
}

/// CSV writer that always ends records with LF.
fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 output")
}

pub fn render_score(report: &ScoreReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut w = csv_writer();
            w.write_record(["metric", "value", "display"])
                .expect("in-memory writer");
            for (name, v) in &report.rows {
                w.write_record([name.as_str(), &v.to_string(), &format!("{v:.2}")])
                    .expect("in-memory writer");
            }
            finish(w)
        }
        OutputFormat::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "observations: {} ({} with no detection)\noffset: {}  beta: {}\n",
                report.total, report.detections, report.offset, report.beta
            );
            let _ = writeln!(out, "{:<8} {:<22} display", "metric", "value");
            for (name, v) in &report.rows {
                let _ = writeln!(out, "{name:<8} {:<22} {v:.2}", v.to_string());
            }
            if let Some(per) = &report.per_class {
                out.push_str("\nper class:\n");
                for (label, v) in per {
                    let _ = writeln!(out, "  {label:<6} {:<22} {v:.2}", v.to_string());
                }
            }
            out
        }
    }
}

fn marker(status: CellStatus) -> &'static str {
    match status {
        CellStatus::Match => " ",
        CellStatus::Boundary => "~",
        CellStatus::KnownDeviation => "*",
        CellStatus::Mismatch => "!",
    }
}

fn statuses(table: &ScoreTable) -> Option<Vec<AnnotatedCell>> {
    annotate(table)
}

/// Reproduced tables as CSV: one header, then one record per table row with
/// unrounded values followed by the per-cell status.
pub fn render_tables_csv(tables: &[ScoreTable]) -> String {
    let mut w = csv_writer();
    let mut header = vec!["offset".to_string(), "metric".to_string()];
    header.extend(ModelId::ALL.iter().map(|m| m.name().to_string()));
    header.extend(ModelId::ALL.iter().map(|m| format!("status_{}", m.name())));
    w.write_record(&header).expect("in-memory writer");
    for table in tables {
        let cells = statuses(table);
        for (r, row) in table.rows.iter().enumerate() {
            let mut record = vec![table.offset.to_string(), row.metric.name()];
            record.extend(row.values.iter().map(|v| v.to_string()));
            for c in 0..ModelId::ALL.len() {
                let status = cells
                    .as_ref()
                    .map_or("", |cells| cells[r * ModelId::ALL.len() + c].status.name());
                record.push(status.to_string());
            }
            w.write_record(&record).expect("in-memory writer");
        }
    }
    finish(w)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StatusCounts {
    pub matched: usize,
    pub boundary: usize,
    pub known_deviation: usize,
    pub mismatch: usize,
}

impl StatusCounts {
    fn add(&mut self, status: CellStatus) {
        match status {
            CellStatus::Match => self.matched += 1,
            CellStatus::Boundary => self.boundary += 1,
            CellStatus::KnownDeviation => self.known_deviation += 1,
            CellStatus::Mismatch => self.mismatch += 1,
        }
    }
}

/// Reproduced tables as aligned text with two-decimal cells. Each cell is
/// followed by a marker: blank for a match, `~` boundary, `*` known deviation,
/// `!` mismatch.
pub fn render_tables_text(tables: &[ScoreTable]) -> String {
    let mut out = String::new();
    let mut total = StatusCounts::default();
    for table in tables {
        let cells = statuses(table);
        let _ = writeln!(out, "Scores at offset {}", table.offset);
        let _ = write!(out, "{:<8}", "metric");
        for m in ModelId::ALL {
            let _ = write!(out, "{:>7}", m.name());
        }
        out.push('\n');
        let mut flagged = Vec::new();
        for (r, row) in table.rows.iter().enumerate() {
            let _ = write!(out, "{:<8}", row.metric.name());
            for (c, v) in row.values.iter().enumerate() {
                let cell = cells.as_ref().map(|cells| cells[r * ModelId::ALL.len() + c]);
                let mark = cell.map_or(" ", |cell| marker(cell.status));
                let _ = write!(out, "{:>6}{mark}", format!("{v:.2}"));
                if let Some(cell) = cell {
                    total.add(cell.status);
                    if matches!(cell.status, CellStatus::Boundary | CellStatus::Mismatch) {
                        flagged.push(cell);
                    }
                }
            }
            out.push('\n');
        }
        for cell in flagged {
            let _ = writeln!(
                out,
                "  {} {} model {}: computed {:.5}, published {:.2}",
                cell.status,
                cell.metric.name(),
                cell.model,
                cell.value,
                cell.published
            );
        }
        out.push('\n');
    }
    out.push_str("legend: ~ boundary, * known deviation, ! mismatch\n");
    let _ = writeln!(
        out,
        "summary: {} match, {} boundary, {} known deviation, {} mismatch",
        total.matched, total.boundary, total.known_deviation, total.mismatch
    );
    out
}
