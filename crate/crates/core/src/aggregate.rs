//! Aggregation of pairwise scores over a confusion matrix.
//!
//! All reductions walk the matrix cells in a canonical order (truth node,
//! then predicted node, tree order, no-detection last), so results do not
//! depend on how classes or cells were inserted.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::pairwise::{check_beta, f_measure, Offset, PredictionPair, Scorer};
use crate::taxonomy::{ClassRef, NodeId, ScoringTree};

/// Counts per (truth, predicted) pair, plus the list of declared classes.
///
/// Declared classes matter only for flat macro averages, where a class that
/// never occurs still contributes a per-class score.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PredictionCounts {
    classes: Vec<ClassRef>,
    cells: BTreeMap<(ClassRef, ClassRef), u64>,
}

impl PredictionCounts {
    /// An empty matrix declaring `classes`.
    pub fn new(tree: &ScoringTree, classes: impl IntoIterator<Item = ClassRef>) -> Result<Self> {
        let mut counts = Self::default();
        for class in classes {
            counts.declare(tree, class)?;
        }
        Ok(counts)
    }

    /// Collects pairs into a matrix declaring every label node of `tree`,
    /// plus no-detection when any pair involves it.
    pub fn from_pairs(tree: &ScoringTree, pairs: &[PredictionPair]) -> Result<Self> {
        let mut counts = Self::new(tree, tree.label_nodes().map(ClassRef::Node))?;
        for pair in pairs {
            counts.add(tree, pair.truth, pair.predicted, pair.count)?;
        }
        Ok(counts)
    }

    pub fn declare(&mut self, tree: &ScoringTree, class: ClassRef) -> Result<()> {
        tree.check_label(class)?;
        if let Err(at) = self.classes.binary_search(&class) {
            self.classes.insert(at, class);
        }
        Ok(())
    }

    /// Adds `count` observations of (truth, predicted), declaring both classes.
    pub fn add(&mut self, tree: &ScoringTree, truth: ClassRef, predicted: ClassRef, count: u64) -> Result<()> {
        if truth.is_detection() && predicted.is_detection() {
            if count == 0 {
                return Ok(());
            }
            return Err(Error::EmptyPair);
        }
        self.declare(tree, truth)?;
        self.declare(tree, predicted)?;
        if count > 0 {
            *self.cells.entry((truth, predicted)).or_insert(0) += count;
        }
        Ok(())
    }

    /// Declared classes in canonical order.
    pub fn classes(&self) -> &[ClassRef] {
        &self.classes
    }

    pub fn get(&self, truth: ClassRef, predicted: ClassRef) -> u64 {
        self.cells.get(&(truth, predicted)).copied().unwrap_or(0)
    }

    /// Non-zero cells in canonical order.
    pub fn cells(&self) -> impl Iterator<Item = (ClassRef, ClassRef, u64)> + '_ {
        self.cells.iter().map(|(&(t, p), &c)| (t, p, c))
    }

    pub fn total(&self) -> u64 {
        self.cells.values().sum()
    }

    pub fn detection_total(&self) -> u64 {
        self.cells()
            .filter(|(t, p, _)| t.is_detection() || p.is_detection())
            .map(|(_, _, c)| c)
            .sum()
    }

    /// One pair per non-zero cell.
    pub fn pairs(&self) -> Vec<PredictionPair> {
        self.cells()
            .map(|(truth, predicted, count)| PredictionPair {
                truth,
                predicted,
                count,
            })
            .collect()
    }

    /// Every observation as its own pair with count 1.
    pub fn explode(&self) -> Vec<PredictionPair> {
        self.cells()
            .flat_map(|(truth, predicted, count)| {
                std::iter::repeat_n(
                    PredictionPair {
                        truth,
                        predicted,
                        count: 1,
                    },
                    count as usize,
                )
            })
            .collect()
    }

    /// Every count multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Self {
        Self {
            classes: self.classes.clone(),
            cells: self
                .cells
                .iter()
                .filter(|_| factor > 0)
                .map(|(&k, &c)| (k, c * factor))
                .collect(),
        }
    }

    /// Total count, or [`Error::EmptyMatrix`] when there is nothing to score.
    pub fn ensure_nonempty(&self) -> Result<u64> {
        match self.total() {
            0 => Err(Error::EmptyMatrix),
            total => Ok(total),
        }
    }
}

/// Count-weighted mean of `scorer` over every cell.
pub fn micro_mean(tree: &ScoringTree, counts: &PredictionCounts, scorer: Scorer, offset: Offset) -> Result<f64> {
    let total = counts.ensure_nonempty()?;
    let mut sum = 0.0;
    for (t, p, c) in counts.cells() {
        sum += c as f64 * scorer.score(tree, t, p, offset)?;
    }
    Ok(sum / total as f64)
}

/// Score of one node's bucket: every pair in which it is truth or prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BucketMean {
    pub node: NodeId,
    pub mean: f64,
    /// Number of observations in the bucket.
    pub support: u64,
}

/// Per-node count-weighted mean of `scorer` over each node's bucket. Nodes
/// with empty buckets are omitted.
pub fn bucket_means(
    tree: &ScoringTree,
    counts: &PredictionCounts,
    scorer: Scorer,
    offset: Offset,
) -> Result<Vec<BucketMean>> {
    counts.ensure_nonempty()?;
    let mut sums: BTreeMap<NodeId, (f64, u64)> = BTreeMap::new();
    for (t, p, c) in counts.cells() {
        let score = scorer.score(tree, t, p, offset)?;
        let mut credit = |node: Option<NodeId>| {
            if let Some(node) = node {
                let entry = sums.entry(node).or_insert((0.0, 0));
                entry.0 += c as f64 * score;
                entry.1 += c;
            }
        };
        credit(t.node());
        if p != t {
            credit(p.node());
        }
    }
    Ok(sums
        .into_iter()
        .map(|(node, (sum, support))| BucketMean {
            node,
            mean: sum / support as f64,
            support,
        })
        .collect())
}

/// Per-node hierarchical precision (mean PPS) and recall (mean TPS).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassPrecisionRecall {
    pub node: NodeId,
    pub precision: f64,
    pub recall: f64,
    pub support: u64,
}

pub fn per_class_hp_hr(
    tree: &ScoringTree,
    counts: &PredictionCounts,
    offset: Offset,
) -> Result<Vec<ClassPrecisionRecall>> {
    let precision = bucket_means(tree, counts, Scorer::PredictionStandardized, offset)?;
    let recall = bucket_means(tree, counts, Scorer::TruthStandardized, offset)?;
    Ok(precision
        .into_iter()
        .zip(recall)
        .map(|(p, r)| {
            debug_assert_eq!(p.node, r.node);
            ClassPrecisionRecall {
                node: p.node,
                precision: p.mean,
                recall: r.mean,
                support: p.support,
            }
        })
        .collect())
}

/// Per-node hierarchical F-measures and their unweighted mean.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassFMeasure {
    pub per_class: Vec<(NodeId, f64)>,
    pub overall: f64,
}

pub fn hf_beta(tree: &ScoringTree, counts: &PredictionCounts, offset: Offset, beta: f64) -> Result<ClassFMeasure> {
    check_beta(beta)?;
    let per_class: Vec<(NodeId, f64)> = per_class_hp_hr(tree, counts, offset)?
        .into_iter()
        .map(|c| (c.node, f_measure(c.precision, c.recall, beta)))
        .collect();
    let overall = per_class.iter().map(|(_, f)| f).sum::<f64>() / per_class.len() as f64;
    Ok(ClassFMeasure { per_class, overall })
}

/// Harmonic mean of micro-averaged PPS and TPS; 0 when both vanish.
pub fn hf1_micro(tree: &ScoringTree, counts: &PredictionCounts, offset: Offset) -> Result<f64> {
    let pps = micro_mean(tree, counts, Scorer::PredictionStandardized, offset)?;
    let tps = micro_mean(tree, counts, Scorer::TruthStandardized, offset)?;
    Ok(f_measure(pps, tps, 1.0))
}

/// Flat precision, recall and F1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl FlatScores {
    /// Ratios with undefined (0/0) precision or recall set to 1.
    fn from_counts(tp: u64, fp: u64, fn_: u64) -> Self {
        let ratio = |num: u64, den: u64| if den == 0 { 1.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        Self {
            precision,
            recall,
            f1: f_measure(precision, recall, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    tp: u64,
    fp: u64,
    fn_: u64,
}

fn tallies(counts: &PredictionCounts) -> Vec<(ClassRef, Tally)> {
    let mut by_class: BTreeMap<ClassRef, Tally> = counts.classes().iter().map(|&c| (c, Tally::default())).collect();
    for (t, p, c) in counts.cells() {
        if t == p {
            by_class.entry(t).or_default().tp += c;
        } else {
            by_class.entry(p).or_default().fp += c;
            by_class.entry(t).or_default().fn_ += c;
        }
    }
    by_class.into_iter().collect()
}

/// Per-class flat scores for every declared class, no-detection included.
pub fn flat_per_class(counts: &PredictionCounts) -> Result<Vec<(ClassRef, FlatScores)>> {
    counts.ensure_nonempty()?;
    Ok(tallies(counts)
        .into_iter()
        .map(|(class, t)| (class, FlatScores::from_counts(t.tp, t.fp, t.fn_)))
        .collect())
}

/// Unweighted mean of the per-class scores.
pub fn flat_macro(counts: &PredictionCounts) -> Result<FlatScores> {
    let per_class = flat_per_class(counts)?;
    let n = per_class.len() as f64;
    let mean = |f: fn(&FlatScores) -> f64| per_class.iter().map(|(_, s)| f(s)).sum::<f64>() / n;
    Ok(FlatScores {
        precision: mean(|s| s.precision),
        recall: mean(|s| s.recall),
        f1: mean(|s| s.f1),
    })
}

/// Scores from pooled true positive, false positive and false negative counts.
pub fn flat_micro(counts: &PredictionCounts) -> Result<FlatScores> {
    counts.ensure_nonempty()?;
    let pooled = tallies(counts).into_iter().fold(Tally::default(), |acc, (_, t)| Tally {
        tp: acc.tp + t.tp,
        fp: acc.fp + t.fp,
        fn_: acc.fn_ + t.fn_,
    });
    Ok(FlatScores::from_counts(pooled.tp, pooled.fp, pooled.fn_))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    PathLength,
    Lca,
    LcaPathPenalty,
    TruthStandardized,
    PredictionStandardized,
    /// Harmonic mean of micro PPS and micro TPS.
    HierarchicalF1Micro,
    /// Unweighted mean of per-class hierarchical F-beta.
    HierarchicalFBeta,
    Flat,
}

impl Metric {
    pub fn scorer(self) -> Option<Scorer> {
        match self {
            Metric::PathLength => Some(Scorer::PathLength),
            Metric::Lca => Some(Scorer::Lca),
            Metric::LcaPathPenalty => Some(Scorer::LcaPathPenalty),
            Metric::TruthStandardized => Some(Scorer::TruthStandardized),
            Metric::PredictionStandardized => Some(Scorer::PredictionStandardized),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::PathLength => "PL",
            Metric::Lca => "L",
            Metric::LcaPathPenalty => "LPP",
            Metric::TruthStandardized => "TPS",
            Metric::PredictionStandardized => "PPS",
            Metric::HierarchicalF1Micro => "hF1_mu",
            Metric::HierarchicalFBeta => "hF_beta",
            Metric::Flat => "F1",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Averaging {
    #[default]
    Micro,
    /// Flat metrics only.
    Macro,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricConfig {
    pub metric: Metric,
    pub offset: Offset,
    pub beta: f64,
    pub averaging: Averaging,
}

impl MetricConfig {
    pub fn new(metric: Metric) -> Self {
        Self {
            metric,
            offset: Offset::ZERO,
            beta: 1.0,
            averaging: Averaging::Micro,
        }
    }

    pub fn with_offset(mut self, offset: Offset) -> Self {
        self.offset = offset;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_averaging(mut self, averaging: Averaging) -> Self {
        self.averaging = averaging;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_beta(self.beta)?;
        if self.averaging == Averaging::Macro && self.metric != Metric::Flat {
            return Err(Error::UnsupportedAveraging);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub config: MetricConfig,
    pub overall: f64,
    pub per_class: Option<Vec<(ClassRef, f64)>>,
    pub total_count: u64,
    pub detection_count: u64,
}

/// Scores `counts` under `config`.
///
/// Per-class values are bucket means for the pairwise metrics, per-class
/// F-beta for the hierarchical F-measures, and per-class F1 for flat.
pub fn evaluate(tree: &ScoringTree, counts: &PredictionCounts, config: &MetricConfig) -> Result<EvaluationReport> {
    config.validate()?;
    let offset = config.offset;
    let nodes = |v: Vec<(NodeId, f64)>| Some(v.into_iter().map(|(n, s)| (ClassRef::Node(n), s)).collect());
    let (overall, per_class) = match config.metric {
        Metric::HierarchicalF1Micro => {
            let per = hf_beta(tree, counts, offset, config.beta)?;
            (hf1_micro(tree, counts, offset)?, nodes(per.per_class))
        }
        Metric::HierarchicalFBeta => {
            let per = hf_beta(tree, counts, offset, config.beta)?;
            (per.overall, nodes(per.per_class))
        }
        Metric::Flat => {
            let overall = match config.averaging {
                Averaging::Micro => flat_micro(counts)?.f1,
                Averaging::Macro => flat_macro(counts)?.f1,
            };
            let per = flat_per_class(counts)?.into_iter().map(|(c, s)| (c, s.f1)).collect();
            (overall, Some(per))
        }
        metric => {
            let scorer = metric.scorer().expect("pairwise metric");
            let buckets = bucket_means(tree, counts, scorer, offset)?;
            (
                micro_mean(tree, counts, scorer, offset)?,
                nodes(buckets.into_iter().map(|b| (b.node, b.mean)).collect()),
            )
        }
    };
    Ok(EvaluationReport {
        config: *config,
        overall,
        per_class,
        total_count: counts.total(),
        detection_count: counts.detection_total(),
    })
}
