//! Scoring trees: a rooted tree over class labels whose edge weights encode
//! how much each level of the hierarchy is worth.
//!
//! Every root-to-leaf path must carry a total weight of 1 (within
//! [`PATH_SUM_TOLERANCE`]). Trees are immutable once built; every structural
//! query (lowest common ancestor, root paths, edge distance, diameter) is
//! answered from tables precomputed at construction time.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Absolute tolerance on root-to-leaf weight sums.
pub const PATH_SUM_TOLERANCE: f64 = 1e-9;

/// Index of a node inside one [`ScoringTree`].
///
/// Ids are only meaningful for the tree that issued them; passing an id from
/// another tree to a query panics if it is out of range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// One side of a prediction pair: a tree label or the no-detection marker.
///
/// Ordering puts every node (in tree order) before `NoDetection`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassRef {
    Node(NodeId),
    NoDetection,
}

impl ClassRef {
    pub fn node(self) -> Option<NodeId> {
        match self {
            ClassRef::Node(id) => Some(id),
            ClassRef::NoDetection => None,
        }
    }

    pub fn is_detection(self) -> bool {
        matches!(self, ClassRef::NoDetection)
    }
}

/// Display label for [`ClassRef::NoDetection`].
pub const NO_DETECTION_LABEL: &str = "∅";

/// Input edge as read from a file or written by hand.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSpec {
    pub parent: String,
    pub child: String,
    pub weight: Option<f64>,
}

impl EdgeSpec {
    pub fn new(parent: impl Into<String>, child: impl Into<String>, weight: f64) -> Self {
        Self {
            parent: parent.into(),
            child: child.into(),
            weight: Some(weight),
        }
    }

    pub fn unweighted(parent: impl Into<String>, child: impl Into<String>) -> Self {
        Self {
            parent: parent.into(),
            child: child.into(),
            weight: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum BuildMode {
    /// At least two non-root nodes are required.
    #[default]
    Strict,
    /// Allows the degenerate single-edge tree.
    Lenient,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildOptions {
    pub mode: BuildMode,
    /// Assign convenience weights instead of reading them from the edges.
    /// Every edge must then be unweighted.
    pub uniform_weights: bool,
}

impl BuildOptions {
    pub fn lenient() -> Self {
        Self {
            mode: BuildMode::Lenient,
            ..Self::default()
        }
    }

    pub fn uniform() -> Self {
        Self {
            uniform_weights: true,
            ..Self::default()
        }
    }
}

/// A validated, immutable scoring tree.
#[derive(Debug, Clone)]
pub struct ScoringTree {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    root: NodeId,
    parent: Vec<Option<NodeId>>,
    /// Weight of the edge entering each node; zero for the root.
    weight: Vec<f64>,
    children: Vec<Vec<NodeId>>,
    depth: Vec<usize>,
    path_weight: Vec<f64>,
    /// `lift[k][v]` is the 2^k-th ancestor of `v`, saturating at the root.
    lift: Vec<Vec<NodeId>>,
    /// Child end of every edge, in input order.
    edge_order: Vec<NodeId>,
    diameter: usize,
}

/// Structure shared by validation and construction.
struct Skeleton {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    parent: Vec<Option<NodeId>>,
    children: Vec<Vec<NodeId>>,
    edge_order: Vec<NodeId>,
    root: NodeId,
    depth: Vec<usize>,
    /// Nodes in breadth-first order from the root.
    bfs: Vec<NodeId>,
}

impl ScoringTree {
    /// Builds a tree in strict mode with explicit weights.
    pub fn build(edges: &[EdgeSpec]) -> Result<Self> {
        Self::build_with(edges, BuildOptions::default())
    }

    pub fn build_with(edges: &[EdgeSpec], options: BuildOptions) -> Result<Self> {
        match Self::assemble(edges, options) {
            Ok(tree) => Ok(tree),
            Err(mut errors) => Err(errors.swap_remove(0)),
        }
    }

    /// Reports every violation found in `edges` instead of stopping at the
    /// first one. Structural problems (roots, cycles, duplicate parents) are
    /// reported alone since weight checks are meaningless without a tree.
    pub fn diagnose(edges: &[EdgeSpec], options: BuildOptions) -> Vec<Error> {
        match Self::assemble(edges, options) {
            Ok(_) => Vec::new(),
            Err(errors) => errors,
        }
    }

    fn assemble(edges: &[EdgeSpec], options: BuildOptions) -> std::result::Result<Self, Vec<Error>> {
        let skeleton = Skeleton::new(edges)?;
        let n = skeleton.labels.len();
        let mut errors = Vec::new();

        let weight = if options.uniform_weights {
            for edge in edges {
                if edge.weight.is_some() {
                    errors.push(Error::MixedWeights {
                        parent: edge.parent.clone(),
                        child: edge.child.clone(),
                    });
                }
            }
            skeleton.uniform_weights()
        } else {
            let mut weight = vec![0.0; n];
            for (edge, &child) in edges.iter().zip(&skeleton.edge_order) {
                match edge.weight {
                    None => errors.push(Error::MissingWeight {
                        parent: edge.parent.clone(),
                        child: edge.child.clone(),
                    }),
                    Some(w) if !w.is_finite() => errors.push(Error::NonFiniteWeight {
                        parent: edge.parent.clone(),
                        child: edge.child.clone(),
                    }),
                    Some(w) => {
                        if w < 0.0 {
                            errors.push(Error::NegativeWeight {
                                parent: edge.parent.clone(),
                                child: edge.child.clone(),
                                weight: w,
                            });
                        }
                        weight[child.0] = w;
                    }
                }
            }
            weight
        };

        if options.mode == BuildMode::Strict && n < 3 {
            errors.push(Error::TooFewNodes { nodes: n });
        }

        let weights_readable = !errors
            .iter()
            .any(|e| matches!(e, Error::MissingWeight { .. } | Error::NonFiniteWeight { .. }));
        let mut path_weight = vec![0.0; n];
        for &v in &skeleton.bfs[1..] {
            let p = skeleton.parent[v.0].expect("non-root node has a parent");
            path_weight[v.0] = path_weight[p.0] + weight[v.0];
        }
        for &v in &skeleton.bfs {
            if weights_readable && skeleton.children[v.0].is_empty() {
                let sum = path_weight[v.0];
                if (sum - 1.0).abs() > PATH_SUM_TOLERANCE {
                    errors.push(Error::PathSumViolation {
                        leaf: skeleton.labels[v.0].clone(),
                        sum,
                    });
                }
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }

        let lift = skeleton.lifting_table();
        let diameter = skeleton.diameter();
        let Skeleton {
            labels,
            index,
            parent,
            children,
            edge_order,
            root,
            depth,
            ..
        } = skeleton;
        Ok(Self {
            labels,
            index,
            root,
            parent,
            weight,
            children,
            depth,
            path_weight,
            lift,
            edge_order,
            diameter,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    /// All nodes in first-appearance order of the input edges.
    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        (0..self.labels.len()).map(NodeId)
    }

    /// Every node that may be used as a label, i.e. all but the root.
    pub fn label_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes().filter(move |&v| v != self.root)
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes().filter(move |&v| self.is_leaf(v))
    }

    pub fn node(&self, label: &str) -> Result<NodeId> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownNode(label.to_string()))
    }

    /// Resolves a label into a [`ClassRef`], rejecting the root.
    pub fn class_ref(&self, label: &str) -> Result<ClassRef> {
        let id = self.node(label)?;
        self.check_label(ClassRef::Node(id))?;
        Ok(ClassRef::Node(id))
    }

    /// Fails if `class` names the root.
    pub fn check_label(&self, class: ClassRef) -> Result<()> {
        match class {
            ClassRef::Node(id) if id == self.root => Err(Error::RootAsLabel(self.label(id).to_string())),
            ClassRef::Node(id) if id.0 >= self.labels.len() => Err(Error::UnknownNode(format!("#{}", id.0))),
            _ => Ok(()),
        }
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id.0]
    }

    pub fn class_label(&self, class: ClassRef) -> &str {
        match class {
            ClassRef::Node(id) => self.label(id),
            ClassRef::NoDetection => NO_DETECTION_LABEL,
        }
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.parent[id.0]
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.children[id.0]
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.children[id.0].is_empty()
    }

    pub fn depth(&self, id: NodeId) -> usize {
        self.depth[id.0]
    }

    /// Weight of the edge from `id`'s parent to `id`; zero for the root.
    pub fn edge_weight(&self, id: NodeId) -> f64 {
        self.weight[id.0]
    }

    /// Edges as `(parent, child, weight)` in the order they were supplied.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = (NodeId, NodeId, f64)> + '_ {
        self.edge_order.iter().map(move |&c| {
            let p = self.parent[c.0].expect("edge child has a parent");
            (p, c, self.weight[c.0])
        })
    }

    /// Deepest node that is an ancestor-or-self of both `a` and `b`.
    pub fn lca(&self, a: NodeId, b: NodeId) -> NodeId {
        let (mut a, mut b) = (a, b);
        if self.depth[a.0] < self.depth[b.0] {
            std::mem::swap(&mut a, &mut b);
        }
        let mut gap = self.depth[a.0] - self.depth[b.0];
        let mut k = 0;
        while gap > 0 {
            if gap & 1 == 1 {
                a = self.lift[k][a.0];
            }
            gap >>= 1;
            k += 1;
        }
        if a == b {
            return a;
        }
        for level in self.lift.iter().rev() {
            if level[a.0] != level[b.0] {
                a = level[a.0];
                b = level[b.0];
            }
        }
        self.lift[0][a.0]
    }

    /// Edges `(parent, child)` from the root down to `x`.
    pub fn root_path_edges(&self, x: NodeId) -> Vec<(NodeId, NodeId)> {
        let mut path = Vec::with_capacity(self.depth[x.0]);
        let mut v = x;
        while let Some(p) = self.parent[v.0] {
            path.push((p, v));
            v = p;
        }
        path.reverse();
        path
    }

    /// Total weight from the root to `x`. Exactly 1 (within tolerance) for
    /// leaves and 0 for the root.
    pub fn path_weight(&self, x: NodeId) -> f64 {
        self.path_weight[x.0]
    }

    /// Number of edges on the unique path between `a` and `b`.
    pub fn edge_distance(&self, a: NodeId, b: NodeId) -> usize {
        let l = self.lca(a, b);
        self.depth[a.0] + self.depth[b.0] - 2 * self.depth[l.0]
    }

    /// Longest edge distance between any two nodes.
    pub fn diameter(&self) -> usize {
        self.diameter
    }
}

impl Skeleton {
    fn new(edges: &[EdgeSpec]) -> std::result::Result<Self, Vec<Error>> {
        if edges.is_empty() {
            return Err(vec![Error::EmptyInput]);
        }
        let mut labels: Vec<String> = Vec::new();
        let mut index: HashMap<String, NodeId> = HashMap::new();
        let mut intern = |label: &str| -> NodeId {
            if let Some(&id) = index.get(label) {
                return id;
            }
            let id = NodeId(labels.len());
            labels.push(label.to_string());
            index.insert(label.to_string(), id);
            id
        };
        let ends: Vec<(NodeId, NodeId)> = edges.iter().map(|e| (intern(&e.parent), intern(&e.child))).collect();

        let n = labels.len();
        let mut errors = Vec::new();
        let mut parent: Vec<Option<NodeId>> = vec![None; n];
        let mut children: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        let mut edge_order = Vec::with_capacity(edges.len());
        for &(p, c) in &ends {
            if p == c {
                errors.push(Error::CycleDetected(vec![labels[c.0].clone()]));
                continue;
            }
            if let Some(first) = parent[c.0] {
                errors.push(Error::DuplicateChild {
                    child: labels[c.0].clone(),
                    first: labels[first.0].clone(),
                    second: labels[p.0].clone(),
                });
                continue;
            }
            parent[c.0] = Some(p);
            children[p.0].push(c);
            edge_order.push(c);
        }
        if !errors.is_empty() {
            return Err(errors);
        }

        let roots: Vec<NodeId> = (0..n).map(NodeId).filter(|v| parent[v.0].is_none()).collect();
        let root = match roots.as_slice() {
            [] => return Err(vec![Error::CycleDetected(labels.clone())]),
            [root] => *root,
            _ => {
                return Err(vec![Error::MultipleRoots(
                    roots.iter().map(|v| labels[v.0].clone()).collect(),
                )])
            }
        };

        let mut depth = vec![usize::MAX; n];
        let mut bfs = Vec::with_capacity(n);
        let mut queue = VecDeque::from([root]);
        depth[root.0] = 0;
        while let Some(v) = queue.pop_front() {
            bfs.push(v);
            for &c in &children[v.0] {
                depth[c.0] = depth[v.0] + 1;
                queue.push_back(c);
            }
        }
        if bfs.len() < n {
            let stranded = (0..n)
                .filter(|&v| depth[v] == usize::MAX)
                .map(|v| labels[v].clone())
                .collect();
            return Err(vec![Error::CycleDetected(stranded)]);
        }

        Ok(Self {
            labels,
            index,
            parent,
            children,
            edge_order,
            root,
            depth,
            bfs,
        })
    }

    /// Convenience weights: leaves are visited deepest first; the unassigned
    /// suffix of each root path splits whatever budget its assigned prefix
    /// left over.
    fn uniform_weights(&self) -> Vec<f64> {
        let n = self.labels.len();
        let mut leaves: Vec<NodeId> = (0..n).map(NodeId).filter(|v| self.children[v.0].is_empty()).collect();
        leaves.sort_by(|a, b| self.depth[b.0].cmp(&self.depth[a.0]).then(a.cmp(b)));

        let mut weight: Vec<Option<f64>> = vec![None; n];
        weight[self.root.0] = Some(0.0);
        for leaf in leaves {
            let mut path = Vec::new();
            let mut v = leaf;
            while let Some(p) = self.parent[v.0] {
                path.push(v);
                v = p;
            }
            path.reverse();
            let assigned: f64 = path.iter().filter_map(|v| weight[v.0]).sum();
            let open: Vec<NodeId> = path.into_iter().filter(|v| weight[v.0].is_none()).collect();
            let share = (1.0 - assigned) / open.len() as f64;
            for v in open {
                weight[v.0] = Some(share);
            }
        }
        weight.into_iter().map(|w| w.unwrap_or(0.0)).collect()
    }

    fn lifting_table(&self) -> Vec<Vec<NodeId>> {
        let n = self.labels.len();
        let levels = (usize::BITS - n.leading_zeros()).max(1) as usize;
        let base: Vec<NodeId> = (0..n).map(|v| self.parent[v].unwrap_or(self.root)).collect();
        let mut lift = vec![base];
        for k in 1..levels {
            let prev = &lift[k - 1];
            let next = (0..n).map(|v| prev[prev[v].0]).collect();
            lift.push(next);
        }
        lift
    }

    fn diameter(&self) -> usize {
        // The deepest node is one end of a longest path.
        let far = *self
            .bfs
            .iter()
            .max_by_key(|v| (self.depth[v.0], std::cmp::Reverse(v.0)))
            .expect("tree is non-empty");
        let n = self.labels.len();
        let mut dist = vec![usize::MAX; n];
        dist[far.0] = 0;
        let mut queue = VecDeque::from([far]);
        let mut best = 0;
        while let Some(v) = queue.pop_front() {
            best = best.max(dist[v.0]);
            let neighbours = self.children[v.0].iter().copied().chain(self.parent[v.0]);
            for u in neighbours {
                if dist[u.0] == usize::MAX {
                    dist[u.0] = dist[v.0] + 1;
                    queue.push_back(u);
                }
            }
        }
        best
    }
}

impl fmt::Display for ScoringTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "scoring tree rooted at {} ({} nodes, diameter {})",
            self.label(self.root),
            self.len(),
            self.diameter
        )
    }
}
