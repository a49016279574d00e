//! Independent re-derivations of the core quantities, computed from plain edge
//! lists and label strings instead of the tree's own indexes.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use treescore_core::harness::{model_matrix, paper_tree, weighted_tree, ModelId, WeightStrategy, PAPER_EDGES};
use treescore_core::{
    ancestor_prf, bucket_means, flat_macro, flat_micro, hf_beta, micro_mean, per_class_hp_hr, ClassRef, Offset,
    PredictionCounts, PredictionPair, Scorer, ScoringTree,
};

const LABELS: [&str; 11] = ["B", "C", "D", "E", "F", "G", "H", "I", "J", "K", "L"];

fn parent_of(label: &str) -> Option<&'static str> {
    PAPER_EDGES.iter().find(|(_, c)| *c == label).map(|(p, _)| *p)
}

/// Edges on the path from the root to `label`, named by their child.
fn edge_set(label: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut cur = label;
    while let Some(p) = parent_of(cur) {
        out.insert(cur.to_string());
        cur = p;
    }
    out
}

fn weight_of(strategy: WeightStrategy, child: &str) -> f64 {
    // Transcribed independently of the harness ladders.
    let table: &[(&str, f64, f64, f64)] = &[
        ("B", 0.9, 0.5, 0.1),
        ("C", 0.9, 0.5, 0.1),
        ("D", 0.1, 0.5, 0.9),
        ("E", 0.1, 0.5, 0.9),
        ("F", 0.09, 0.25, 0.2),
        ("G", 0.09, 0.25, 0.2),
        ("H", 0.01, 0.25, 0.7),
        ("I", 0.01, 0.25, 0.7),
        ("J", 0.01, 0.25, 0.7),
        ("K", 0.01, 0.25, 0.7),
        ("L", 0.01, 0.25, 0.7),
    ];
    let row = table.iter().find(|r| r.0 == child).unwrap();
    match strategy {
        WeightStrategy::Decreasing => row.1,
        WeightStrategy::NonIncreasing => row.2,
        WeightStrategy::Increasing => row.3,
    }
}

fn bfs_distance(a: &str, b: &str) -> usize {
    let mut adj: HashMap<&str, Vec<&str>> = HashMap::new();
    for (p, c) in PAPER_EDGES {
        adj.entry(p).or_default().push(c);
        adj.entry(c).or_default().push(p);
    }
    let mut seen: HashMap<&str, usize> = HashMap::from([(a, 0)]);
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        let d = seen[x];
        for &y in &adj[x] {
            if !seen.contains_key(y) {
                seen.insert(y, d + 1);
                queue.push_back(y);
            }
        }
    }
    seen[b]
}

fn oracle_score(scorer: Scorer, s: WeightStrategy, t: &str, p: &str, o: f64) -> f64 {
    let sum = |set: &BTreeSet<String>| set.iter().map(|e| weight_of(s, e)).sum::<f64>();
    let lpp = |t: &str, p: &str| {
        let (et, ep) = (edge_set(t), edge_set(p));
        let rew = sum(&et.intersection(&ep).cloned().collect());
        let pen = -sum(&et.symmetric_difference(&ep).cloned().collect());
        (rew + pen + 2.0 - o) / (3.0 - o)
    };
    match scorer {
        Scorer::PathLength => (5.0 - o - bfs_distance(t, p) as f64) / (5.0 - o),
        Scorer::Lca => {
            let rew = sum(&edge_set(t).intersection(&edge_set(p)).cloned().collect());
            (rew - o) / (1.0 - o)
        }
        Scorer::LcaPathPenalty => lpp(t, p),
        Scorer::TruthStandardized => lpp(t, p) / lpp(t, t),
        Scorer::PredictionStandardized => lpp(t, p) / lpp(p, p),
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn distances_match_bfs() {
    let tree = paper_tree();
    let mut widest = 0;
    for a in tree.nodes() {
        for b in tree.nodes() {
            let d = bfs_distance(tree.label(a), tree.label(b));
            assert_eq!(tree.edge_distance(a, b), d, "{} {}", tree.label(a), tree.label(b));
            widest = widest.max(d);
        }
    }
    assert_eq!(tree.diameter(), widest);
}

#[test]
fn pair_scores_match_edge_set_oracle() {
    for s in WeightStrategy::ALL {
        let tree = weighted_tree(s);
        for o in [0.0, -0.5, -1.0, -3.0] {
            let offset = Offset::new(o).unwrap();
            for t in LABELS {
                for p in LABELS {
                    for scorer in Scorer::ALL {
                        let got = scorer
                            .score(&tree, tree.class_ref(t).unwrap(), tree.class_ref(p).unwrap(), offset)
                            .unwrap();
                        let want = oracle_score(scorer, s, t, p, o).clamp(0.0, 1.0);
                        assert!(
                            close(got, want, 1e-12),
                            "{scorer} {s:?} {t}->{p} o={o}: {got} vs {want}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn ancestor_sets_match_brute_force() {
    let tree = paper_tree();
    let ancestors = |l: &str| edge_set(l);
    for t in LABELS {
        for p in LABELS {
            let pair = PredictionPair::from_labels(&tree, Some(t), Some(p), 1).unwrap();
            let got = ancestor_prf(&tree, &[pair], 1.0).unwrap();
            let (at, ap) = (ancestors(t), ancestors(p));
            let shared = at.intersection(&ap).count() as f64;
            assert!(close(got.precision, shared / ap.len() as f64, 1e-15));
            assert!(close(got.recall, shared / at.len() as f64, 1e-15));
        }
    }
}

fn exploded_mean(tree: &ScoringTree, counts: &PredictionCounts, scorer: Scorer, offset: Offset) -> f64 {
    let pairs = counts.explode();
    let sum: f64 = pairs
        .iter()
        .map(|p| scorer.score(tree, p.truth, p.predicted, offset).unwrap())
        .sum();
    sum / pairs.len() as f64
}

#[test]
fn matrix_means_equal_exploded_pair_means() {
    for s in WeightStrategy::ALL {
        let tree = weighted_tree(s);
        for id in ModelId::ALL {
            let counts = model_matrix(id, &tree);
            for scorer in Scorer::ALL {
                let a = micro_mean(&tree, &counts, scorer, Offset::ZERO).unwrap();
                let b = exploded_mean(&tree, &counts, scorer, Offset::ZERO);
                assert!(close(a, b, 1e-12), "{id} {scorer}");
            }
        }
    }
}

#[test]
fn buckets_match_manual_enumeration() {
    let tree = weighted_tree(WeightStrategy::NonIncreasing);
    for id in ModelId::ALL {
        let counts = model_matrix(id, &tree);
        let pairs = counts.explode();
        let got = bucket_means(&tree, &counts, Scorer::TruthStandardized, Offset::ZERO).unwrap();
        let mut manual: BTreeMap<String, (f64, u64)> = BTreeMap::new();
        for pair in &pairs {
            let score = Scorer::TruthStandardized
                .score(&tree, pair.truth, pair.predicted, Offset::ZERO)
                .unwrap();
            let mut members: BTreeSet<String> = BTreeSet::new();
            for side in [pair.truth, pair.predicted] {
                if let ClassRef::Node(n) = side {
                    members.insert(tree.label(n).to_string());
                }
            }
            for m in members {
                let e = manual.entry(m).or_default();
                e.0 += score;
                e.1 += 1;
            }
        }
        assert_eq!(got.len(), manual.len(), "{id}");
        for b in got {
            let (sum, n) = manual[tree.label(b.node)];
            assert_eq!(b.support, n);
            assert!(close(b.mean, sum / n as f64, 1e-12), "{id} {}", tree.label(b.node));
        }
    }
}

#[test]
fn flat_scores_match_hand_counts() {
    // Model 3b: 11 classes plus no-detection, 1100 detections split over rows.
    let tree = paper_tree();
    let counts = model_matrix(ModelId::M3b, &tree);
    let micro = flat_micro(&counts).unwrap();
    // Diagonal cells: B->B 90 and C->C 90.
    let tp = 180.0;
    let total = 1100.0;
    assert!(close(micro.precision, tp / total, 1e-15));
    assert!(close(micro.recall, tp / total, 1e-15));
    let macro_ = flat_macro(&counts).unwrap();
    // B: precision 90/270, recall 90/100; C: precision 90/495, recall 90/100.
    // F and G are predicted but never right. The seven remaining labels are
    // never predicted, so their precision is undefined (= 1). No-detection is
    // predicted 110 times and never a truth.
    let recall = (0.9 + 0.9 + 1.0) / 12.0;
    let precision = (90.0 / 270.0 + 90.0 / 495.0 + 7.0) / 12.0;
    assert!(close(macro_.recall, recall, 1e-15));
    assert!(close(macro_.precision, precision, 1e-15));
}

#[test]
fn frozen_hierarchical_values() {
    // Frozen from the edge-set oracle above.
    let tree = weighted_tree(WeightStrategy::NonIncreasing);
    let counts = model_matrix(ModelId::M3, &tree);
    let d = tree.node("D").unwrap();
    let row = per_class_hp_hr(&tree, &counts, Offset::ZERO)
        .unwrap()
        .into_iter()
        .find(|c| c.node == d)
        .unwrap();
    assert!(close(row.recall, 2.0 / 3.0, 1e-12));
    assert!(close(row.precision, 0.8, 1e-12));

    let expected = [
        (WeightStrategy::Decreasing, 0.967_15),
        (WeightStrategy::NonIncreasing, 0.801_98),
        (WeightStrategy::Increasing, 0.585_28),
    ];
    for (s, want) in expected {
        let tree = weighted_tree(s);
        let counts = model_matrix(ModelId::M3, &tree);
        let got = hf_beta(&tree, &counts, Offset::ZERO, 1.0).unwrap().overall;
        assert!(close(got, want, 5e-6), "{s:?}: {got}");
    }
}
