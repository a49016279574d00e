//! Fixtures shared by the benchmarks.

use treescore_core::{BuildOptions, EdgeSpec, ScoringTree};

/// A complete tree with the given branching factor and depth, nodes named
/// `n0`, `n1`, ... in breadth-first order, with uniform weights.
pub fn complete_tree(branching: usize, depth: usize) -> ScoringTree {
    let mut edges = Vec::new();
    let mut level = vec![0usize];
    let mut next_id = 1;
    for _ in 0..depth {
        let mut below = Vec::with_capacity(level.len() * branching);
        for &parent in &level {
            for _ in 0..branching {
                edges.push(EdgeSpec::unweighted(format!("n{parent}"), format!("n{next_id}")));
                below.push(next_id);
                next_id += 1;
            }
        }
        level = below;
    }
    ScoringTree::build_with(&edges, BuildOptions::uniform()).expect("complete trees are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let t = complete_tree(3, 4);
        assert_eq!(t.len(), 1 + 3 + 9 + 27 + 81);
        assert_eq!(t.diameter(), 8);
    }
}
