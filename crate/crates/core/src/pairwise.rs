//! Scores for a single (truth, prediction) pair.
//!
//! Every scorer maps into `[0, 1]`. A detection pair (either side is
//! [`ClassRef::NoDetection`]) scores exactly 0 under every hierarchical
//! metric regardless of where the other label sits in the tree. A negative
//! [`Offset`] lifts misclassification scores off the bottom of the scale so
//! that detection errors rank below every classification error.

use std::fmt;

use crate::error::{Error, Result};
use crate::taxonomy::{ClassRef, NodeId, ScoringTree};

/// Detection-error offset. Always finite and non-positive; zero leaves the
/// scores untouched.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Offset(f64);

impl Offset {
    pub const ZERO: Offset = Offset(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value <= 0.0 {
            // Normalise -0.0 so it prints as 0.
            Ok(Offset(value + 0.0))
        } else {
            Err(Error::InvalidOffset(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Offset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A (truth, prediction) pair with a multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PredictionPair {
    pub truth: ClassRef,
    pub predicted: ClassRef,
    pub count: u64,
}

impl PredictionPair {
    pub fn new(truth: ClassRef, predicted: ClassRef, count: u64) -> Result<Self> {
        if truth.is_detection() && predicted.is_detection() {
            return Err(Error::EmptyPair);
        }
        Ok(Self {
            truth,
            predicted,
            count,
        })
    }

    /// Resolves labels against `tree`; `None` stands for no detection.
    pub fn from_labels(tree: &ScoringTree, truth: Option<&str>, predicted: Option<&str>, count: u64) -> Result<Self> {
        let resolve = |label: Option<&str>| match label {
            Some(l) => tree.class_ref(l),
            None => Ok(ClassRef::NoDetection),
        };
        Self::new(resolve(truth)?, resolve(predicted)?, count)
    }

    pub fn is_detection(&self) -> bool {
        self.truth.is_detection() || self.predicted.is_detection()
    }
}

/// The pairwise hierarchical scorers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scorer {
    /// Normalised edge distance.
    PathLength,
    /// Weight from the root down to the lowest common ancestor.
    Lca,
    /// LCA reward plus symmetric-difference penalty.
    LcaPathPenalty,
    /// LCA path penalty standardised by the truth node's best score.
    TruthStandardized,
    /// LCA path penalty standardised by the predicted node's best score.
    PredictionStandardized,
}

impl Scorer {
    pub const ALL: [Scorer; 5] = [
        Scorer::PathLength,
        Scorer::Lca,
        Scorer::LcaPathPenalty,
        Scorer::TruthStandardized,
        Scorer::PredictionStandardized,
    ];

    pub fn score(self, tree: &ScoringTree, truth: ClassRef, predicted: ClassRef, offset: Offset) -> Result<f64> {
        match self {
            Scorer::PathLength => score_pl(tree, truth, predicted, offset),
            Scorer::Lca => score_l(tree, truth, predicted, offset),
            Scorer::LcaPathPenalty => score_lpp(tree, truth, predicted, offset),
            Scorer::TruthStandardized => score_tps(tree, truth, predicted, offset),
            Scorer::PredictionStandardized => score_pps(tree, truth, predicted, offset),
        }
    }

    /// Whether swapping truth and prediction leaves the score unchanged.
    pub fn is_symmetric(self) -> bool {
        matches!(self, Scorer::PathLength | Scorer::Lca | Scorer::LcaPathPenalty)
    }

    pub fn name(self) -> &'static str {
        match self {
            Scorer::PathLength => "PL",
            Scorer::Lca => "L",
            Scorer::LcaPathPenalty => "LPP",
            Scorer::TruthStandardized => "TPS",
            Scorer::PredictionStandardized => "PPS",
        }
    }
}

impl fmt::Display for Scorer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Validates a pair and returns its two nodes, or `None` for a detection pair.
fn label_nodes(tree: &ScoringTree, truth: ClassRef, predicted: ClassRef) -> Result<Option<(NodeId, NodeId)>> {
    tree.check_label(truth)?;
    tree.check_label(predicted)?;
    match (truth, predicted) {
        (ClassRef::Node(t), ClassRef::Node(p)) => Ok(Some((t, p))),
        (ClassRef::NoDetection, ClassRef::NoDetection) => Err(Error::EmptyPair),
        _ => Ok(None),
    }
}

fn unit(score: f64) -> f64 {
    score.clamp(0.0, 1.0)
}

/// Sum of weights on the edges shared by both root paths, i.e. the path
/// weight of the lowest common ancestor.
pub fn reward(tree: &ScoringTree, t: NodeId, p: NodeId) -> f64 {
    tree.path_weight(tree.lca(t, p))
}

/// Negated weight of the edges on exactly one of the two root paths.
/// Zero iff `t == p`; never below -2.
pub fn penalty(tree: &ScoringTree, t: NodeId, p: NodeId) -> f64 {
    if t == p {
        return 0.0;
    }
    let shared = reward(tree, t, p);
    -((tree.path_weight(t) - shared) + (tree.path_weight(p) - shared))
}

fn lpp_nodes(tree: &ScoringTree, t: NodeId, p: NodeId, offset: Offset) -> f64 {
    let o = offset.value();
    (reward(tree, t, p) + penalty(tree, t, p) + 2.0 - o) / (3.0 - o)
}

/// Path-length score `(max - o - d) / (max - o)` with `max` the tree diameter.
pub fn score_pl(tree: &ScoringTree, truth: ClassRef, predicted: ClassRef, offset: Offset) -> Result<f64> {
    let Some((t, p)) = label_nodes(tree, truth, predicted)? else {
        return Ok(0.0);
    };
    let max = tree.diameter() as f64 - offset.value();
    Ok(unit((max - tree.edge_distance(t, p) as f64) / max))
}

/// LCA reward rescaled as `(rew - o) / (1 - o)`.
pub fn score_l(tree: &ScoringTree, truth: ClassRef, predicted: ClassRef, offset: Offset) -> Result<f64> {
    let Some((t, p)) = label_nodes(tree, truth, predicted)? else {
        return Ok(0.0);
    };
    let o = offset.value();
    Ok(unit((reward(tree, t, p) - o) / (1.0 - o)))
}

/// Reward plus penalty rescaled from `[-2, 1]` onto `[0, 1]`, with the offset
/// widening the lower end: `(rew + pen + 2 - o) / (3 - o)`.
pub fn score_lpp(tree: &ScoringTree, truth: ClassRef, predicted: ClassRef, offset: Offset) -> Result<f64> {
    let Some((t, p)) = label_nodes(tree, truth, predicted)? else {
        return Ok(0.0);
    };
    Ok(unit(lpp_nodes(tree, t, p, offset)))
}

/// LPP divided by the best LPP attainable for the truth node. Not symmetric.
pub fn score_tps(tree: &ScoringTree, truth: ClassRef, predicted: ClassRef, offset: Offset) -> Result<f64> {
    let Some((t, p)) = label_nodes(tree, truth, predicted)? else {
        return Ok(0.0);
    };
    let best = lpp_nodes(tree, t, t, offset);
    // (w + 2 - o) / (3 - o) with w >= 0 and o <= 0 is at least 2/3.
    assert!(best > 0.0, "identity LPP must be positive");
    Ok(unit(lpp_nodes(tree, t, p, offset) / best))
}

/// LPP divided by the best LPP attainable for the predicted node. Not symmetric.
pub fn score_pps(tree: &ScoringTree, truth: ClassRef, predicted: ClassRef, offset: Offset) -> Result<f64> {
    let Some((t, p)) = label_nodes(tree, truth, predicted)? else {
        return Ok(0.0);
    };
    let best = lpp_nodes(tree, p, p, offset);
    assert!(best > 0.0, "identity LPP must be positive");
    Ok(unit(lpp_nodes(tree, t, p, offset) / best))
}

/// Weighted F-measure `(b^2 + 1) p r / (b^2 p + r)`.
///
/// Returns 0 when the denominator vanishes, except that `beta == 0` always
/// yields the precision.
pub fn f_measure(precision: f64, recall: f64, beta: f64) -> f64 {
    if beta == 0.0 {
        return precision;
    }
    let b2 = beta * beta;
    let denom = b2 * precision + recall;
    if denom == 0.0 {
        0.0
    } else {
        (b2 + 1.0) * precision * recall / denom
    }
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidBeta(beta))
    }
}

/// Ancestor-overlap precision, recall and F-measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AncestorScores {
    pub precision: f64,
    pub recall: f64,
    pub f_beta: f64,
}

/// Set-based hierarchical precision and recall. Ancestor sets contain the
/// node itself and exclude the root.
pub fn ancestor_prf(tree: &ScoringTree, pairs: &[PredictionPair], beta: f64) -> Result<AncestorScores> {
    check_beta(beta)?;
    let mut overlap = 0u64;
    let mut predicted_size = 0u64;
    let mut truth_size = 0u64;
    let mut total = 0u64;
    for pair in pairs {
        let (t, p) = label_nodes(tree, pair.truth, pair.predicted)?.ok_or(Error::DetectionPairUnsupported)?;
        // Excluding the root, a node's ancestor-or-self set has `depth` members
        // and two such sets share exactly the LCA's.
        overlap += pair.count * tree.depth(tree.lca(t, p)) as u64;
        predicted_size += pair.count * tree.depth(p) as u64;
        truth_size += pair.count * tree.depth(t) as u64;
        total += pair.count;
    }
    if total == 0 {
        return Err(Error::EmptyInput);
    }
    let precision = overlap as f64 / predicted_size as f64;
    let recall = overlap as f64 / truth_size as f64;
    Ok(AncestorScores {
        precision,
        recall,
        f_beta: f_measure(precision, recall, beta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{paper_tree, weighted_tree, WeightStrategy};

    fn c(tree: &ScoringTree, label: &str) -> ClassRef {
        tree.class_ref(label).unwrap()
    }

    fn n(tree: &ScoringTree, label: &str) -> NodeId {
        tree.node(label).unwrap()
    }

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-12, "{a} != {b}");
    }

    const NONE: ClassRef = ClassRef::NoDetection;

    #[test]
    fn path_length() {
        let t = paper_tree();
        let o0 = Offset::ZERO;
        close(score_pl(&t, c(&t, "C"), c(&t, "E"), o0).unwrap(), 0.4);
        close(score_pl(&t, c(&t, "D"), c(&t, "L"), o0).unwrap(), 0.0);
        close(score_pl(&t, c(&t, "C"), c(&t, "C"), o0).unwrap(), 1.0);
        let o1 = Offset::new(-1.0).unwrap();
        close(score_pl(&t, c(&t, "C"), c(&t, "E"), o1).unwrap(), 0.5);
        for o in [o0, o1] {
            assert_eq!(score_pl(&t, c(&t, "H"), NONE, o).unwrap(), 0.0);
            assert_eq!(score_pl(&t, NONE, c(&t, "H"), o).unwrap(), 0.0);
        }
    }

    #[test]
    fn reward_and_penalty() {
        let d = weighted_tree(WeightStrategy::Decreasing);
        close(reward(&d, n(&d, "B"), n(&d, "C")), 0.0);
        close(reward(&d, n(&d, "H"), n(&d, "L")), 0.9);
        close(penalty(&d, n(&d, "D"), n(&d, "L")), -2.0);
        close(penalty(&d, n(&d, "D"), n(&d, "B")), -0.1);
        for s in WeightStrategy::ALL {
            let t = weighted_tree(s);
            close(reward(&t, n(&t, "L"), n(&t, "L")), 1.0);
            assert_eq!(penalty(&t, n(&t, "G"), n(&t, "G")), 0.0);
        }
        let ni = weighted_tree(WeightStrategy::NonIncreasing);
        close(penalty(&ni, n(&ni, "D"), n(&ni, "B")), -0.5);
    }

    #[test]
    fn lca_score() {
        let ni = weighted_tree(WeightStrategy::NonIncreasing);
        close(score_l(&ni, c(&ni, "F"), c(&ni, "G"), Offset::ZERO).unwrap(), 0.5);
        close(score_l(&ni, c(&ni, "H"), c(&ni, "L"), Offset::ZERO).unwrap(), 0.5);
        close(score_l(&ni, c(&ni, "C"), c(&ni, "C"), Offset::ZERO).unwrap(), 0.5);
        for s in WeightStrategy::ALL {
            let t = weighted_tree(s);
            close(
                score_l(&t, c(&t, "B"), c(&t, "C"), Offset::new(-1.0).unwrap()).unwrap(),
                0.5,
            );
            assert_eq!(score_l(&t, NONE, c(&t, "K"), Offset::ZERO).unwrap(), 0.0);
        }
    }

    #[test]
    fn lca_path_penalty() {
        let d = weighted_tree(WeightStrategy::Decreasing);
        close(score_lpp(&d, c(&d, "D"), c(&d, "L"), Offset::ZERO).unwrap(), 0.0);
        let ni = weighted_tree(WeightStrategy::NonIncreasing);
        close(
            score_lpp(&ni, c(&ni, "D"), c(&ni, "B"), Offset::ZERO).unwrap(),
            2.0 / 3.0,
        );
        let inc = weighted_tree(WeightStrategy::Increasing);
        close(
            score_lpp(&inc, c(&inc, "B"), c(&inc, "B"), Offset::new(-1.0).unwrap()).unwrap(),
            0.775,
        );
    }

    #[test]
    fn standardized() {
        let d = weighted_tree(WeightStrategy::Decreasing);
        let o1 = Offset::new(-1.0).unwrap();
        close(score_tps(&d, c(&d, "C"), c(&d, "C"), Offset::ZERO).unwrap(), 1.0);
        close(score_tps(&d, c(&d, "D"), c(&d, "B"), Offset::ZERO).unwrap(), 2.8 / 3.0);
        close(score_tps(&d, c(&d, "B"), c(&d, "L"), o1).unwrap(), 1.1 / 3.9);
        close(score_pps(&d, c(&d, "D"), c(&d, "B"), Offset::ZERO).unwrap(), 2.8 / 2.9);
        assert_eq!(score_pps(&d, c(&d, "D"), NONE, o1).unwrap(), 0.0);
        assert_eq!(score_tps(&d, NONE, c(&d, "D"), o1).unwrap(), 0.0);
        // Asymmetric in general.
        assert!(
            score_tps(&d, c(&d, "B"), c(&d, "D"), Offset::ZERO).unwrap()
                > score_tps(&d, c(&d, "D"), c(&d, "B"), Offset::ZERO).unwrap()
        );
    }

    #[test]
    fn invalid_pairs() {
        let t = paper_tree();
        let root = ClassRef::Node(t.root());
        assert_eq!(
            score_lpp(&t, root, c(&t, "B"), Offset::ZERO),
            Err(Error::RootAsLabel("A".into()))
        );
        assert_eq!(score_pl(&t, NONE, NONE, Offset::ZERO), Err(Error::EmptyPair));
        assert!(PredictionPair::new(NONE, NONE, 1).is_err());
        assert!(matches!(PredictionPair::from_labels(&t, Some("Z"), None, 1), Err(Error::UnknownNode(z)) if z == "Z"));
        assert!(Offset::new(0.5).is_err());
        assert!(Offset::new(f64::NAN).is_err());
        assert_eq!(Offset::new(-0.0).unwrap().to_string(), "0");
    }

    #[test]
    fn ancestor_overlap() {
        let t = paper_tree();
        let pair = |a, b| PredictionPair::from_labels(&t, Some(a), Some(b), 1).unwrap();
        let all_correct: Vec<_> = ["D", "E", "H", "I", "J", "K", "L"].iter().map(|l| pair(l, l)).collect();
        let s = ancestor_prf(&t, &all_correct, 1.0).unwrap();
        assert_eq!((s.precision, s.recall, s.f_beta), (1.0, 1.0, 1.0));

        let s = ancestor_prf(&t, &[pair("D", "B")], 1.0).unwrap();
        close(s.precision, 1.0);
        close(s.recall, 0.5);
        close(s.f_beta, 2.0 / 3.0);

        let s = ancestor_prf(&t, &[pair("B", "C")], 1.0).unwrap();
        assert_eq!((s.precision, s.recall, s.f_beta), (0.0, 0.0, 0.0));

        assert_eq!(ancestor_prf(&t, &[], 1.0), Err(Error::EmptyInput));
        let missed = PredictionPair::from_labels(&t, Some("D"), None, 1).unwrap();
        assert_eq!(ancestor_prf(&t, &[missed], 1.0), Err(Error::DetectionPairUnsupported));
        assert!(ancestor_prf(&t, &[pair("D", "B")], -1.0).is_err());
    }

    #[test]
    fn f_measure_edges() {
        assert_eq!(f_measure(0.3, 0.0, 0.0), 0.3);
        assert_eq!(f_measure(0.0, 0.0, 1.0), 0.0);
        close(f_measure(1.0, 0.5, 1.0), 2.0 / 3.0);
        close(f_measure(0.5, 0.5, 2.0), 0.5);
    }
}
