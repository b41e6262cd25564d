//! Divide and conquer over a tree decomposition of the box intersection
//! graph.
//!
//! When the intersection graph has a decomposition into small bags, the
//! instance splits at any decomposition node `t` into a "left" and "right"
//! box set whose unions overlap exactly in the union of bag `t`:
//!
//! ```text
//! measure(B) = measure(B_L) + measure(B_R) - measure(B_t)
//! ```
//!
//! Recursing at a centroid keeps the two sides balanced, and every
//! subtraction term is a single bag, so the expensive solver only ever sees
//! box sets the size of a bag. Decompositions can be supplied externally,
//! derived from connected components or slab partitions, or built with a
//! minimum-fill elimination heuristic.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{AxisBox, Instance};
use crate::maxima;
use crate::profile;
use crate::report::{Algorithm, MeasureReport, Stats};
use crate::solver::{self, SolverConfig};

/// Undirected graph over box indices with an edge per intersecting pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionGraph {
    adj: Vec<Vec<usize>>,
}

impl IntersectionGraph {
    /// Builds a graph on `n` vertices from an edge list. Self-loops are
    /// rejected; duplicate edges collapse.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for n = {n}");
            assert_ne!(u, v, "self-loop at vertex {u}");
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        IntersectionGraph { adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// All edges as pairs `(u, v)` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if u < v {
                    edges.push((u, v));
                }
            }
        }
        edges
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// Pairwise intersection graph of the instance's boxes (closed boxes, so
/// face contact counts).
pub fn build_intersection_graph(inst: &Instance) -> IntersectionGraph {
    let boxes = inst.boxes();
    let mut edges = Vec::new();
    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            if boxes[i].intersects(&boxes[j]) {
                edges.push((i, j));
            }
        }
    }
    IntersectionGraph::new(boxes.len(), &edges)
}

/// A tree decomposition: one bag of vertex indices per node, plus the tree
/// edges between nodes.
///
/// Construction performs no validation; [`validate_decomposition`] checks a
/// decomposition against a concrete graph and reports every violated clause.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    bags: Vec<BTreeSet<usize>>,
    #[serde(rename = "edges")]
    tree_edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn new(bags: Vec<BTreeSet<usize>>, tree_edges: Vec<(usize, usize)>) -> Self {
        TreeDecomposition { bags, tree_edges }
    }

    pub fn bags(&self) -> &[BTreeSet<usize>] {
        &self.bags
    }

    pub fn tree_edges(&self) -> &[(usize, usize)] {
        &self.tree_edges
    }

    /// Number of decomposition nodes.
    pub fn node_count(&self) -> usize {
        self.bags.len()
    }

    /// Largest bag size minus one; zero for an empty decomposition.
    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(BTreeSet::len)
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }
}

/// One violated clause of the tree decomposition definition, with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A bag names a vertex the graph does not have.
    BagVertexOutOfRange { node: usize, vertex: usize },
    /// A tree edge endpoint is not a node index.
    TreeEdgeOutOfRange { edge: (usize, usize) },
    /// A tree on `nodes` nodes needs exactly `nodes - 1` edges.
    WrongEdgeCount { nodes: usize, edges: usize },
    /// Node `node` is unreachable from node 0 along tree edges.
    TreeNotConnected { node: usize },
    /// A decomposition must have at least one node.
    NoNodes,
    /// Node coverage: the vertex appears in no bag.
    MissingVertex { vertex: usize },
    /// Edge coverage: no bag contains both endpoints.
    UncoveredEdge { u: usize, v: usize },
    /// Coherence: the bags containing the vertex do not form a connected
    /// subtree.
    IncoherentVertex { vertex: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BagVertexOutOfRange { node, vertex } => write!(
                f,
                "tree structure violated: bag {node} names vertex {vertex} outside the graph"
            ),
            Violation::TreeEdgeOutOfRange { edge } => write!(
                f,
                "tree structure violated: edge ({}, {}) points outside the node range",
                edge.0, edge.1
            ),
            Violation::WrongEdgeCount { nodes, edges } => write!(
                f,
                "tree structure violated: {nodes} nodes need {} edges, found {edges}",
                nodes - 1
            ),
            Violation::TreeNotConnected { node } => write!(
                f,
                "tree structure violated: node {node} is unreachable from node 0"
            ),
            Violation::NoNodes => {
                write!(f, "tree structure violated: decomposition has no nodes")
            }
            Violation::MissingVertex { vertex } => {
                write!(f, "node coverage violated: vertex {vertex} appears in no bag")
            }
            Violation::UncoveredEdge { u, v } => {
                write!(f, "edge coverage violated: no bag contains edge ({u}, {v})")
            }
            Violation::IncoherentVertex { vertex } => write!(
                f,
                "coherence violated: bags containing vertex {vertex} are not connected in the tree"
            ),
        }
    }
}

/// Result of validating a decomposition against a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    violations: Vec<Violation>,
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// A decomposition passed where a valid one was required.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error("invalid tree decomposition: {0}")]
    Invalid(Verdict),
}

/// Checks every clause of the tree decomposition definition for `td`
/// against `g`: tree structure, node coverage, edge coverage and coherence.
/// All violations are collected, each with a witness.
pub fn validate_decomposition(g: &IntersectionGraph, td: &TreeDecomposition) -> Verdict {
    let mut violations = Vec::new();
    let n = g.vertex_count();
    let rho = td.node_count();

    if rho == 0 {
        violations.push(Violation::NoNodes);
        for vertex in 0..n {
            violations.push(Violation::MissingVertex { vertex });
        }
        for (u, v) in g.edges() {
            violations.push(Violation::UncoveredEdge { u, v });
        }
        return Verdict { violations };
    }

    for (node, bag) in td.bags().iter().enumerate() {
        for &vertex in bag {
            if vertex >= n {
                violations.push(Violation::BagVertexOutOfRange { node, vertex });
            }
        }
    }

    let mut valid_edges = Vec::new();
    for &(a, b) in td.tree_edges() {
        if a >= rho || b >= rho {
            violations.push(Violation::TreeEdgeOutOfRange { edge: (a, b) });
        } else {
            valid_edges.push((a, b));
        }
    }
    if td.tree_edges().len() != rho - 1 {
        violations.push(Violation::WrongEdgeCount {
            nodes: rho,
            edges: td.tree_edges().len(),
        });
    }

    let mut tree_adj = vec![Vec::new(); rho];
    for &(a, b) in &valid_edges {
        tree_adj[a].push(b);
        tree_adj[b].push(a);
    }
    let reached = bfs(&tree_adj, rho, std::iter::once(0));
    if let Some(node) = (0..rho).find(|&t| !reached[t]) {
        violations.push(Violation::TreeNotConnected { node });
    }

    // Which nodes hold each vertex, for coverage and coherence.
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (node, bag) in td.bags().iter().enumerate() {
        for &vertex in bag {
            if vertex < n {
                holders[vertex].push(node);
            }
        }
    }

    for (vertex, nodes) in holders.iter().enumerate() {
        if nodes.is_empty() {
            violations.push(Violation::MissingVertex { vertex });
        }
    }

    for (u, v) in g.edges() {
        let covered = holders[u].iter().any(|t| td.bags()[*t].contains(&v));
        if !covered {
            violations.push(Violation::UncoveredEdge { u, v });
        }
    }

    for (vertex, nodes) in holders.iter().enumerate() {
        if nodes.len() < 2 {
            continue;
        }
        let members: BTreeSet<usize> = nodes.iter().copied().collect();
        let mut seen = vec![false; rho];
        let mut stack = vec![nodes[0]];
        seen[nodes[0]] = true;
        let mut count = 1;
        while let Some(t) = stack.pop() {
            for &u in &tree_adj[t] {
                if members.contains(&u) && !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        if count != members.len() {
            violations.push(Violation::IncoherentVertex { vertex });
        }
    }

    Verdict { violations }
}

fn bfs(adj: &[Vec<usize>], n: usize, starts: impl Iterator<Item = usize>) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut stack: Vec<usize> = starts.filter(|&s| s < n).collect();
    for &s in &stack {
        seen[s] = true;
    }
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen
}

/// Repeatedly folds a bag into an adjacent bag containing it (equal bags
/// fold into the lower-numbered node) until no adjacent pair is nested.
///
/// The result has at most as many nodes as the graph has vertices (at least
/// one vertex), identical width, and stays valid for the same graph.
/// Requires a structurally sound tree (edges in range).
pub fn fold_nonredundant(td: &TreeDecomposition) -> TreeDecomposition {
    let rho = td.node_count();
    let mut bags: Vec<BTreeSet<usize>> = td.bags().to_vec();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); rho];
    for &(a, b) in td.tree_edges() {
        assert!(a < rho && b < rho, "tree edge ({a}, {b}) out of range");
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let mut alive = vec![true; rho];

    loop {
        let mut fold: Option<(usize, usize)> = None;
        'search: for i in 0..rho {
            if !alive[i] {
                continue;
            }
            for &j in &adj[i] {
                if j <= i || !alive[j] {
                    continue;
                }
                // (drop, keep), preferring to keep the lower node on ties.
                if bags[i].is_subset(&bags[j]) && !bags[j].is_subset(&bags[i]) {
                    fold = Some((i, j));
                } else if bags[j].is_subset(&bags[i]) {
                    fold = Some((j, i));
                } else {
                    continue;
                }
                break 'search;
            }
        }
        let Some((drop, keep)) = fold else { break };
        let moved: Vec<usize> = adj[drop].iter().copied().filter(|&u| u != keep).collect();
        for u in moved {
            adj[u].remove(&drop);
            adj[u].insert(keep);
            adj[keep].insert(u);
        }
        adj[keep].remove(&drop);
        adj[drop].clear();
        alive[drop] = false;
    }

    let mut index = vec![usize::MAX; rho];
    let mut new_bags = Vec::new();
    for i in 0..rho {
        if alive[i] {
            index[i] = new_bags.len();
            new_bags.push(std::mem::take(&mut bags[i]));
        }
    }
    let mut new_edges = Vec::new();
    for i in 0..rho {
        if !alive[i] {
            continue;
        }
        for &j in &adj[i] {
            if i < j {
                new_edges.push((index[i], index[j]));
            }
        }
    }
    TreeDecomposition::new(new_bags, new_edges)
}

/// A balanced split of a tree decomposition at one shared node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentroidSplit {
    /// The node both sides share.
    pub node: usize,
    /// Nodes of the left subtree, ascending, including `node`.
    pub left: Vec<usize>,
    /// Nodes of the right subtree, ascending, including `node`.
    pub right: Vec<usize>,
}

/// Splits the decomposition's tree at a centroid into two subtrees that
/// overlap exactly in the centroid node.
///
/// The components hanging off the centroid are packed greedily (largest
/// first) into the two sides, so neither side exceeds roughly three
/// quarters of the tree. With exactly two nodes the split degenerates to
/// one side holding both nodes. Requires at least two nodes and a
/// structurally sound tree.
pub fn centroid_split(td: &TreeDecomposition) -> CentroidSplit {
    let rho = td.node_count();
    assert!(rho >= 2, "centroid_split needs at least 2 nodes, got {rho}");
    let mut adj = vec![Vec::new(); rho];
    for &(a, b) in td.tree_edges() {
        assert!(a < rho && b < rho, "tree edge ({a}, {b}) out of range");
        adj[a].push(b);
        adj[b].push(a);
    }
    let nodes: Vec<usize> = (0..rho).collect();
    split_node_set(&adj, &nodes)
}

/// Centroid split of the subtree induced by `nodes` (ascending, connected,
/// at least two of them).
fn split_node_set(adj: &[Vec<usize>], nodes: &[usize]) -> CentroidSplit {
    if nodes.len() == 2 {
        return CentroidSplit {
            node: nodes[0],
            left: vec![nodes[0]],
            right: nodes.to_vec(),
        };
    }

    let member: BTreeSet<usize> = nodes.iter().copied().collect();
    let local = |adj: &[Vec<usize>], v: usize| -> Vec<usize> {
        adj[v].iter().copied().filter(|u| member.contains(u)).collect()
    };

    // Subtree sizes from a DFS rooted at the first node.
    let root = nodes[0];
    let mut parent: HashMap<usize, usize> = HashMap::new();
    let mut order = Vec::with_capacity(nodes.len());
    let mut stack = vec![root];
    parent.insert(root, root);
    while let Some(v) = stack.pop() {
        order.push(v);
        for u in local(adj, v) {
            if let std::collections::hash_map::Entry::Vacant(slot) = parent.entry(u) {
                slot.insert(v);
                stack.push(u);
            }
        }
    }
    debug_assert_eq!(order.len(), nodes.len(), "induced subtree is connected");
    let mut size: HashMap<usize, usize> = nodes.iter().map(|&v| (v, 1)).collect();
    for &v in order.iter().rev() {
        if v != root {
            *size.get_mut(&parent[&v]).unwrap() += size[&v];
        }
    }

    // Centroid: minimizes the largest component left by its removal;
    // ties go to the smallest node id (nodes are ascending).
    let total = nodes.len();
    let mut centroid = root;
    let mut best = usize::MAX;
    for &v in nodes {
        let mut worst = total - size[&v];
        for u in local(adj, v) {
            if parent.get(&u) == Some(&v) {
                worst = worst.max(size[&u]);
            }
        }
        if worst < best {
            best = worst;
            centroid = v;
        }
    }

    // Components of the subtree minus the centroid.
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    seen.insert(centroid);
    let mut components: Vec<Vec<usize>> = Vec::new();
    for &start in nodes {
        if seen.contains(&start) {
            continue;
        }
        let mut comp = vec![start];
        seen.insert(start);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for u in local(adj, v) {
                if !seen.contains(&u) {
                    seen.insert(u);
                    comp.push(u);
                    stack.push(u);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));

    let mut left = vec![centroid];
    let mut right = vec![centroid];
    for comp in components {
        let target = if left.len() <= right.len() {
            &mut left
        } else {
            &mut right
        };
        target.extend(comp);
    }
    left.sort_unstable();
    right.sort_unstable();
    CentroidSplit {
        node: centroid,
        left,
        right,
    }
}

/// Measures the instance by recursive centroid splits over `td`.
///
/// The decomposition is validated against the instance's intersection graph
/// first; an invalid one is rejected with every violated clause. Each
/// distinct bag is solved at most once thanks to memoization.
pub fn tw_measure(
    inst: &Instance,
    td: &TreeDecomposition,
    cfg: &SolverConfig,
) -> Result<MeasureReport, DecompositionError> {
    let g = build_intersection_graph(inst);
    let verdict = validate_decomposition(&g, td);
    if !verdict.is_ok() {
        return Err(DecompositionError::Invalid(verdict));
    }

    let rho = td.node_count();
    let mut adj = vec![Vec::new(); rho];
    for &(a, b) in td.tree_edges() {
        adj[a].push(b);
        adj[b].push(a);
    }
    let nodes: Vec<usize> = (0..rho).collect();
    let mut memo: HashMap<usize, f64> = HashMap::new();
    let volume = solve_node_set(inst, td, &adj, &mut memo, &nodes, cfg);

    let mut stats = Stats::new(inst.len(), inst.dim());
    stats.rho = Some(rho);
    stats.width = Some(td.width());
    Ok(MeasureReport::new(volume, Algorithm::Treewidth, stats))
}

/// Measure of the union of all boxes appearing in bags of `nodes`.
fn solve_node_set(
    inst: &Instance,
    td: &TreeDecomposition,
    adj: &[Vec<usize>],
    memo: &mut HashMap<usize, f64>,
    nodes: &[usize],
    cfg: &SolverConfig,
) -> f64 {
    if nodes.len() == 1 {
        return solve_bag(inst, td, memo, nodes[0], cfg);
    }
    if nodes.len() == 2 {
        // Both bags at once; the three-term formula would cancel exactly
        // here anyway, minus the float noise.
        return solver::measure(&union_instance(inst, td, nodes), cfg);
    }
    let split = split_node_set(adj, nodes);
    let left = solve_node_set(inst, td, adj, memo, &split.left, cfg);
    let right = solve_node_set(inst, td, adj, memo, &split.right, cfg);
    let shared = solve_bag(inst, td, memo, split.node, cfg);
    left + right - shared
}

fn solve_bag(
    inst: &Instance,
    td: &TreeDecomposition,
    memo: &mut HashMap<usize, f64>,
    node: usize,
    cfg: &SolverConfig,
) -> f64 {
    if let Some(&v) = memo.get(&node) {
        return v;
    }
    #[cfg(test)]
    tests::BAG_SOLVES.with(|c| c.set(c.get() + 1));
    let indices: Vec<usize> = td.bags()[node].iter().copied().collect();
    let v = solver::measure(&inst.restrict(&indices), cfg);
    memo.insert(node, v);
    v
}

fn union_instance(inst: &Instance, td: &TreeDecomposition, nodes: &[usize]) -> Instance {
    let mut union: BTreeSet<usize> = BTreeSet::new();
    for &t in nodes {
        union.extend(td.bags()[t].iter().copied());
    }
    let indices: Vec<usize> = union.into_iter().collect();
    inst.restrict(&indices)
}

/// One bag per connected component of `g`, strung on a path.
///
/// Components are numbered by their smallest vertex. A graph with no
/// vertices still gets one empty bag so the result is a tree.
pub fn decomposition_from_components(g: &IntersectionGraph) -> TreeDecomposition {
    let n = g.vertex_count();
    if n == 0 {
        return TreeDecomposition::new(vec![BTreeSet::new()], Vec::new());
    }
    let mut component = vec![usize::MAX; n];
    let mut bags: Vec<BTreeSet<usize>> = Vec::new();
    for v in 0..n {
        if component[v] != usize::MAX {
            continue;
        }
        let id = bags.len();
        let mut bag = BTreeSet::new();
        let mut stack = vec![v];
        component[v] = id;
        bag.insert(v);
        while let Some(w) = stack.pop() {
            for &u in g.neighbors(w) {
                if component[u] == usize::MAX {
                    component[u] = id;
                    bag.insert(u);
                    stack.push(u);
                }
            }
        }
        bags.push(bag);
    }
    let edges: Vec<(usize, usize)> = (1..bags.len()).map(|i| (i - 1, i)).collect();
    TreeDecomposition::new(bags, edges)
}

/// Splits every box at profile-guided slab boundaries and decomposes the
/// resulting pieces along the slab path.
///
/// Returns the piece instance together with a decomposition that is valid
/// for it: bag `j` holds every piece whose closed extent meets closed slab
/// `j`, which covers pieces of one original box that touch across a cut.
/// The pieces tile the original boxes inside the domain, so measuring the
/// piece instance gives the original measure.
pub fn decomposition_from_slabs(inst: &Instance) -> (Instance, TreeDecomposition) {
    let report = profile::compute_profile(inst);
    let partition = profile::split_domain(inst, &report);
    let axis = partition.split_dim;
    let slab_count = partition.slabs.len();

    let mut pieces: Vec<AxisBox> = Vec::new();
    let mut bags: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); slab_count];
    for (j, (slab, members)) in partition
        .slabs
        .iter()
        .zip(&partition.per_slab_boxes)
        .enumerate()
    {
        let (a, b) = (slab.lo()[axis], slab.hi()[axis]);
        for &bi in members {
            let piece = inst.boxes()[bi]
                .clip(slab)
                .expect("slab members overlap their slab");
            let id = pieces.len();
            bags[j].insert(id);
            if piece.lo()[axis] == a && j > 0 {
                bags[j - 1].insert(id);
            }
            if piece.hi()[axis] == b && j + 1 < slab_count {
                bags[j + 1].insert(id);
            }
            pieces.push(piece);
        }
    }

    let edges: Vec<(usize, usize)> = (1..slab_count).map(|j| (j - 1, j)).collect();
    let piece_instance =
        Instance::new(inst.domain().clone(), pieces).expect("pieces share the domain dimension");
    (piece_instance, TreeDecomposition::new(bags, edges))
}

/// Builds a decomposition with the minimum-fill elimination heuristic.
///
/// Vertices are eliminated cheapest-fill-first (ties to the lowest index);
/// each elimination contributes the bag of the vertex plus its remaining
/// neighbors, wired to the bag of its earliest-eliminated neighbor. No
/// width guarantee, but the result is always a valid decomposition of `g`.
pub fn heuristic_decomposition(g: &IntersectionGraph) -> TreeDecomposition {
    let n = g.vertex_count();
    if n == 0 {
        return TreeDecomposition::new(vec![BTreeSet::new()], Vec::new());
    }

    let mut adj: Vec<BTreeSet<usize>> = (0..n)
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let mut alive = vec![true; n];
    let mut bags: Vec<BTreeSet<usize>> = Vec::with_capacity(n);
    let mut elim_step = vec![usize::MAX; n];
    let mut elim_neighbors: Vec<Vec<usize>> = Vec::with_capacity(n);

    for step in 0..n {
        let mut best = usize::MAX;
        let mut best_fill = usize::MAX;
        for v in 0..n {
            if !alive[v] {
                continue;
            }
            let mut fill = 0usize;
            let neighbors: Vec<usize> = adj[v].iter().copied().collect();
            for (i, &a) in neighbors.iter().enumerate() {
                for &b in &neighbors[i + 1..] {
                    if !adj[a].contains(&b) {
                        fill += 1;
                    }
                }
            }
            if fill < best_fill {
                best_fill = fill;
                best = v;
            }
        }
        let v = best;
        let neighbors: Vec<usize> = adj[v].iter().copied().collect();
        let mut bag: BTreeSet<usize> = neighbors.iter().copied().collect();
        bag.insert(v);
        bags.push(bag);
        elim_step[v] = step;
        for (i, &a) in neighbors.iter().enumerate() {
            for &b in &neighbors[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        for &a in &neighbors {
            adj[a].remove(&v);
        }
        adj[v].clear();
        alive[v] = false;
        elim_neighbors.push(neighbors);
    }

    let mut edges = Vec::with_capacity(n - 1);
    let mut roots = Vec::new();
    for (step, neighbors) in elim_neighbors.iter().enumerate() {
        match neighbors.iter().map(|&u| elim_step[u]).min() {
            Some(parent) => edges.push((step, parent)),
            None => roots.push(step),
        }
    }
    for pair in roots.windows(2) {
        edges.push((pair[0], pair[1]));
    }

    let td = TreeDecomposition::new(bags, edges);
    let verdict = validate_decomposition(g, &td);
    assert!(verdict.is_ok(), "heuristic decomposition invalid: {verdict}");
    td
}

/// Treewidth route end to end: heuristic decomposition of the instance's
/// intersection graph, folded, then measured with [`tw_measure`].
pub fn measure_treewidth_heuristic(inst: &Instance, cfg: &SolverConfig) -> MeasureReport {
    let g = build_intersection_graph(inst);
    let td = fold_nonredundant(&heuristic_decomposition(&g));
    tw_measure(inst, &td, cfg).expect("internally built decomposition is valid")
}

/// Maxima filter followed by the treewidth route on the surviving boxes.
///
/// A supplied decomposition must be valid for the intersection graph of the
/// filtered instance, whose vertex `i` is the `i`-th kept box in index
/// order. Without one, a folded heuristic decomposition is built.
pub fn measure_combined(
    inst: &Instance,
    td: Option<&TreeDecomposition>,
    cfg: &SolverConfig,
) -> Result<MeasureReport, DecompositionError> {
    let result = maxima::box_maxima(inst.boxes());
    let filtered = inst.restrict(&result.kept);
    let td = match td {
        Some(td) => fold_nonredundant(td),
        None => fold_nonredundant(&heuristic_decomposition(&build_intersection_graph(
            &filtered,
        ))),
    };
    let inner = tw_measure(&filtered, &td, cfg)?;

    let mut stats = Stats::new(inst.len(), inst.dim());
    stats.h = Some(result.h());
    stats.rho = inner.stats.rho;
    stats.width = inner.stats.width;
    Ok(MeasureReport::new(inner.volume, Algorithm::Combined, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::grid_measure;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn boxx(lo: &[f64], hi: &[f64]) -> AxisBox {
        AxisBox::new(lo.to_vec(), hi.to_vec()).unwrap()
    }

    fn inst(domain: AxisBox, boxes: Vec<AxisBox>) -> Instance {
        Instance::new(domain, boxes).unwrap()
    }

    fn bag(vs: &[usize]) -> BTreeSet<usize> {
        vs.iter().copied().collect()
    }

    thread_local! {
        pub(super) static BAG_SOLVES: std::cell::Cell<usize> =
            const { std::cell::Cell::new(0) };
    }

    /// Intervals [0,3], [2,5], [4,7], ...: consecutive ones overlap, others
    /// are separated, so the intersection graph is a path.
    fn interval_chain(n: usize) -> Instance {
        let hi = 2.0 * (n.max(1) as f64) + 2.0;
        let boxes = (0..n)
            .map(|i| boxx(&[2.0 * i as f64], &[2.0 * i as f64 + 3.0]))
            .collect();
        inst(boxx(&[0.0], &[hi]), boxes)
    }

    fn path_decomposition(n: usize) -> TreeDecomposition {
        let bags = (0..n - 1).map(|i| bag(&[i, i + 1])).collect();
        let edges = (1..n - 1).map(|i| (i - 1, i)).collect();
        TreeDecomposition::new(bags, edges)
    }

    fn random_instance(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Instance {
        let domain = AxisBox::cube(d, 0.0, 1.0).unwrap();
        let boxes = (0..n)
            .map(|_| {
                let mut lo = Vec::with_capacity(d);
                let mut hi = Vec::with_capacity(d);
                for _ in 0..d {
                    let a: f64 = rng.gen();
                    let b: f64 = rng.gen();
                    lo.push(a.min(b));
                    hi.push(a.max(b));
                }
                AxisBox::new(lo, hi).unwrap()
            })
            .collect();
        Instance::new(domain, boxes).unwrap()
    }

    #[test]
    fn graph_of_interval_chain_is_a_path() {
        let g = build_intersection_graph(&interval_chain(5));
        assert_eq!(g.edges(), vec![(0, 1), (1, 2), (2, 3), (3, 4)]);
    }

    #[test]
    fn graph_of_nested_boxes_is_complete() {
        let boxes: Vec<AxisBox> = (0..5)
            .map(|i| AxisBox::cube(2, i as f64 * 0.05, 1.0 - i as f64 * 0.05).unwrap())
            .collect();
        let g = build_intersection_graph(&inst(AxisBox::cube(2, 0.0, 1.0).unwrap(), boxes));
        assert_eq!(g.edge_count(), 10);
    }

    #[test]
    fn face_touching_boxes_are_adjacent() {
        let i = inst(
            AxisBox::cube(2, 0.0, 2.0).unwrap(),
            vec![
                boxx(&[0.0, 0.0], &[1.0, 1.0]),
                boxx(&[1.0, 0.0], &[2.0, 1.0]),
            ],
        );
        assert!(build_intersection_graph(&i).has_edge(0, 1));
    }

    #[test]
    fn valid_path_decomposition_passes() {
        let g = build_intersection_graph(&interval_chain(4));
        let td = path_decomposition(4);
        assert!(validate_decomposition(&g, &td).is_ok());
    }

    #[test]
    fn missing_vertex_is_reported() {
        let g = IntersectionGraph::new(3, &[(0, 1)]);
        let td = TreeDecomposition::new(vec![bag(&[0, 1])], vec![]);
        let verdict = validate_decomposition(&g, &td);
        assert_eq!(
            verdict.violations(),
            &[Violation::MissingVertex { vertex: 2 }]
        );
        assert!(verdict.to_string().contains("node coverage"));
    }

    #[test]
    fn uncovered_edge_is_reported() {
        // Delete vertex 1 from the middle bag of a path decomposition:
        // vertex 1 is still covered, but edge (1, 2) no longer is.
        let g = build_intersection_graph(&interval_chain(4));
        let td = TreeDecomposition::new(
            vec![bag(&[0, 1]), bag(&[2]), bag(&[2, 3])],
            vec![(0, 1), (1, 2)],
        );
        let verdict = validate_decomposition(&g, &td);
        assert_eq!(verdict.violations(), &[Violation::UncoveredEdge { u: 1, v: 2 }]);
        assert!(verdict.to_string().contains("edge coverage"));
    }

    #[test]
    fn incoherent_vertex_is_reported() {
        // Vertex 0 appears in the two end bags but not in the middle one.
        let g = IntersectionGraph::new(3, &[(0, 1), (1, 2)]);
        let td = TreeDecomposition::new(
            vec![bag(&[0, 1]), bag(&[1, 2]), bag(&[0, 2])],
            vec![(0, 1), (1, 2)],
        );
        let verdict = validate_decomposition(&g, &td);
        assert_eq!(
            verdict.violations(),
            &[Violation::IncoherentVertex { vertex: 0 }]
        );
        assert!(verdict.to_string().contains("coherence"));
    }

    #[test]
    fn broken_tree_is_reported() {
        let g = IntersectionGraph::new(2, &[]);
        // A cycle on three nodes.
        let td = TreeDecomposition::new(
            vec![bag(&[0]), bag(&[1]), bag(&[0])],
            vec![(0, 1), (1, 2), (2, 0)],
        );
        let verdict = validate_decomposition(&g, &td);
        assert!(verdict
            .violations()
            .contains(&Violation::WrongEdgeCount { nodes: 3, edges: 3 }));

        let disconnected = TreeDecomposition::new(vec![bag(&[0]), bag(&[1])], vec![]);
        let verdict = validate_decomposition(&g, &disconnected);
        assert!(verdict
            .violations()
            .iter()
            .any(|v| matches!(v, Violation::TreeNotConnected { .. })));
    }

    #[test]
    fn out_of_range_indices_are_reported() {
        let g = IntersectionGraph::new(1, &[]);
        let td = TreeDecomposition::new(vec![bag(&[0, 5])], vec![(0, 3)]);
        let verdict = validate_decomposition(&g, &td);
        assert!(verdict
            .violations()
            .contains(&Violation::BagVertexOutOfRange { node: 0, vertex: 5 }));
        assert!(verdict
            .violations()
            .contains(&Violation::TreeEdgeOutOfRange { edge: (0, 3) }));
    }

    #[test]
    fn fold_merges_nested_bags() {
        // Bags {0} - {0,1} - {0,1,2} fold into the largest.
        let td = TreeDecomposition::new(
            vec![bag(&[0]), bag(&[0, 1]), bag(&[0, 1, 2])],
            vec![(0, 1), (1, 2)],
        );
        let folded = fold_nonredundant(&td);
        assert_eq!(folded.node_count(), 1);
        assert_eq!(folded.bags()[0], bag(&[0, 1, 2]));
        assert_eq!(folded.width(), td.width());
    }

    #[test]
    fn fold_keeps_antichain_bags() {
        let td = path_decomposition(4);
        let folded = fold_nonredundant(&td);
        assert_eq!(folded, td);
    }

    #[test]
    fn fold_is_idempotent_and_bounded_by_vertex_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..40 {
            let n = rng.gen_range(1..=10);
            let i = random_instance(&mut rng, n, 2);
            let g = build_intersection_graph(&i);
            let td = heuristic_decomposition(&g);
            let folded = fold_nonredundant(&td);
            assert!(folded.node_count() <= n, "{} bags for {n} boxes", folded.node_count());
            assert_eq!(folded.width(), td.width());
            assert!(validate_decomposition(&g, &folded).is_ok());
            assert_eq!(fold_nonredundant(&folded), folded);
        }
    }

    #[test]
    fn centroid_of_a_path_is_the_middle() {
        let td = path_decomposition(6); // 5 nodes on a path
        let split = centroid_split(&td);
        assert_eq!(split.node, 2);
        assert_eq!(split.left, vec![0, 1, 2]);
        assert_eq!(split.right, vec![2, 3, 4]);
    }

    #[test]
    fn centroid_of_a_star_balances_leaves() {
        // Star with center node 0 and four leaves.
        let td = TreeDecomposition::new(
            vec![bag(&[0]), bag(&[1]), bag(&[2]), bag(&[3]), bag(&[4])],
            vec![(0, 1), (0, 2), (0, 3), (0, 4)],
        );
        let split = centroid_split(&td);
        assert_eq!(split.node, 0);
        assert_eq!(split.left.len(), 3);
        assert_eq!(split.right.len(), 3);
        assert_eq!(split.left[0], 0);
        assert_eq!(split.right[0], 0);
    }

    #[test]
    fn two_node_split_degenerates() {
        let td = TreeDecomposition::new(vec![bag(&[0]), bag(&[1])], vec![(0, 1)]);
        let split = centroid_split(&td);
        assert_eq!(split.node, 0);
        assert_eq!(split.left, vec![0]);
        assert_eq!(split.right, vec![0, 1]);
    }

    #[test]
    fn splits_cover_overlap_once_and_stay_balanced() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..40 {
            let n = rng.gen_range(2..=12);
            let i = random_instance(&mut rng, n, 2);
            let g = build_intersection_graph(&i);
            let td = heuristic_decomposition(&g);
            if td.node_count() < 2 {
                continue;
            }
            let split = centroid_split(&td);
            let rho = td.node_count();
            let mut all: Vec<usize> = split.left.clone();
            all.extend(&split.right);
            all.sort_unstable();
            all.dedup();
            assert_eq!(all, (0..rho).collect::<Vec<_>>());
            let overlap: Vec<usize> = split
                .left
                .iter()
                .filter(|v| split.right.contains(v))
                .copied()
                .collect();
            assert_eq!(overlap, vec![split.node]);
            if rho > 2 {
                let cap = 3 * rho / 4 + 2;
                assert!(split.left.len() <= cap && split.right.len() <= cap);
            }
        }
    }

    #[test]
    fn split_separates_boxes_outside_the_shared_bag() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..40 {
            let n = rng.gen_range(2..=12);
            let i = random_instance(&mut rng, n, 2);
            let g = build_intersection_graph(&i);
            let td = fold_nonredundant(&heuristic_decomposition(&g));
            if td.node_count() < 2 {
                continue;
            }
            let split = centroid_split(&td);
            let collect = |nodes: &[usize]| -> BTreeSet<usize> {
                nodes
                    .iter()
                    .flat_map(|&t| td.bags()[t].iter().copied())
                    .collect()
            };
            let left = collect(&split.left);
            let right = collect(&split.right);
            let shared = &td.bags()[split.node];
            for &a in left.difference(shared) {
                for &b in right.difference(shared) {
                    assert!(
                        !g.has_edge(a, b),
                        "edge ({a}, {b}) crosses the split outside bag {}",
                        split.node
                    );
                }
            }
        }
    }

    #[test]
    fn tw_measure_interval_chain_with_path_decomposition() {
        // Intervals [0,2], [1.5,3.5], [3,5], [4.5,6.5] under bags
        // {0,1},{1,2},{2,3}: the split at the middle bag solves [0,5] and
        // [1.5,6.5] and subtracts their overlap [1.5,5].
        let i = inst(
            boxx(&[0.0], &[10.0]),
            vec![
                boxx(&[0.0], &[2.0]),
                boxx(&[1.5], &[3.5]),
                boxx(&[3.0], &[5.0]),
                boxx(&[4.5], &[6.5]),
            ],
        );
        let td = path_decomposition(4);
        let report = tw_measure(&i, &td, &SolverConfig::default()).unwrap();
        assert_eq!(report.volume, 5.0 + 5.0 - 3.5);
        assert_eq!(report.stats.rho, Some(3));
        assert_eq!(report.stats.width, Some(1));
    }

    #[test]
    fn tw_measure_matches_oracle_on_chains() {
        let cfg = SolverConfig::default();
        for n in [2, 3, 5, 8, 12] {
            let i = interval_chain(n);
            let td = path_decomposition(n);
            let report = tw_measure(&i, &td, &cfg).unwrap();
            let expected = grid_measure(&i).unwrap();
            assert!(
                (report.volume - expected).abs() <= cfg.tolerance * expected.max(1.0),
                "n = {n}: {} vs {expected}",
                report.volume
            );
        }
    }

    #[test]
    fn tw_measure_rejects_invalid_decomposition() {
        let i = interval_chain(4);
        let td = TreeDecomposition::new(
            vec![bag(&[0, 1]), bag(&[2]), bag(&[2, 3])],
            vec![(0, 1), (1, 2)],
        );
        let err = tw_measure(&i, &td, &SolverConfig::default()).unwrap_err();
        let DecompositionError::Invalid(verdict) = err;
        assert_eq!(verdict.violations(), &[Violation::UncoveredEdge { u: 1, v: 2 }]);
    }

    #[test]
    fn tw_measure_single_node_equals_plain_measure() {
        let i = interval_chain(3);
        let td = TreeDecomposition::new(vec![bag(&[0, 1, 2])], vec![]);
        let report = tw_measure(&i, &td, &SolverConfig::default()).unwrap();
        assert_eq!(report.volume, solver::measure(&i, &SolverConfig::default()));
        assert_eq!(report.stats.rho, Some(1));
    }

    #[test]
    fn each_bag_is_solved_at_most_once() {
        let i = interval_chain(9);
        let td = path_decomposition(9);
        BAG_SOLVES.with(|c| c.set(0));
        tw_measure(&i, &td, &SolverConfig::default()).unwrap();
        let solves = BAG_SOLVES.with(|c| c.get());
        assert!(
            solves <= td.node_count(),
            "{solves} bag solves for {} nodes",
            td.node_count()
        );
    }

    #[test]
    fn tw_measure_chain_is_exact_on_integer_coordinates() {
        // Chain of [2i, 2i+3]: the union is [0, 19] and every bag measure
        // is an integer, so inclusion-exclusion stays exact.
        let i = interval_chain(9);
        let td = path_decomposition(9);
        let report = tw_measure(&i, &td, &SolverConfig::default()).unwrap();
        assert_eq!(report.volume, 19.0);
    }

    #[test]
    fn components_decomposition_of_two_clusters() {
        let i = inst(
            boxx(&[0.0], &[10.0]),
            vec![
                boxx(&[0.0], &[2.0]),
                boxx(&[1.0], &[3.0]),
                boxx(&[6.0], &[8.0]),
                boxx(&[7.0], &[9.0]),
            ],
        );
        let g = build_intersection_graph(&i);
        let td = decomposition_from_components(&g);
        assert_eq!(td.node_count(), 2);
        assert_eq!(td.bags()[0], bag(&[0, 1]));
        assert_eq!(td.bags()[1], bag(&[2, 3]));
        assert!(validate_decomposition(&g, &td).is_ok());
        let report = tw_measure(&i, &td, &SolverConfig::default()).unwrap();
        assert_eq!(report.volume, grid_measure(&i).unwrap());
    }

    #[test]
    fn components_decomposition_of_edgeless_graph() {
        let g = IntersectionGraph::new(4, &[]);
        let td = decomposition_from_components(&g);
        assert_eq!(td.node_count(), 4);
        assert_eq!(td.width(), 0);
        assert!(validate_decomposition(&g, &td).is_ok());
    }

    #[test]
    fn slab_decomposition_is_valid_and_preserves_measure() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let cfg = SolverConfig::default();
        for _ in 0..40 {
            let n = rng.gen_range(1..=10);
            let d = rng.gen_range(1..=3);
            let i = random_instance(&mut rng, n, d);
            let (pieces, td) = decomposition_from_slabs(&i);
            let g = build_intersection_graph(&pieces);
            let verdict = validate_decomposition(&g, &td);
            assert!(verdict.is_ok(), "{verdict}");
            let report = tw_measure(&pieces, &td, &cfg).unwrap();
            let expected = grid_measure(&i).unwrap();
            assert!(
                (report.volume - expected).abs() <= cfg.tolerance * expected.max(1.0),
                "{} vs {expected}",
                report.volume
            );
        }
    }

    #[test]
    fn slab_decomposition_bags_follow_slabs() {
        // Disjoint unit intervals: one slab per box, singleton bags except
        // where a piece touches a cut.
        let boxes: Vec<AxisBox> = (0..4)
            .map(|i| boxx(&[2.0 * i as f64], &[2.0 * i as f64 + 1.0]))
            .collect();
        let i = inst(boxx(&[0.0], &[7.0]), boxes);
        let (pieces, td) = decomposition_from_slabs(&i);
        assert_eq!(pieces.len(), 4);
        assert_eq!(td.node_count(), 4);
        let g = build_intersection_graph(&pieces);
        assert!(validate_decomposition(&g, &td).is_ok());
    }

    #[test]
    fn heuristic_on_complete_graph_has_full_width() {
        let edges: Vec<(usize, usize)> = (0..6)
            .flat_map(|i| ((i + 1)..6).map(move |j| (i, j)))
            .collect();
        let g = IntersectionGraph::new(6, &edges);
        let td = heuristic_decomposition(&g);
        assert_eq!(td.width(), 5);
        assert!(validate_decomposition(&g, &td).is_ok());
    }

    #[test]
    fn heuristic_on_path_graph_has_width_one() {
        let g = IntersectionGraph::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]);
        let td = heuristic_decomposition(&g);
        assert_eq!(td.width(), 1);
        assert!(validate_decomposition(&g, &td).is_ok());
    }

    #[test]
    fn heuristic_handles_disconnected_graphs() {
        let g = IntersectionGraph::new(5, &[(0, 1), (3, 4)]);
        let td = heuristic_decomposition(&g);
        assert!(validate_decomposition(&g, &td).is_ok());
    }

    #[test]
    fn heuristic_measure_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let cfg = SolverConfig::default();
        for _ in 0..40 {
            let n = rng.gen_range(0..=12);
            let i = random_instance(&mut rng, n, 2);
            let report = measure_treewidth_heuristic(&i, &cfg);
            let expected = grid_measure(&i).unwrap();
            assert!(
                (report.volume - expected).abs() <= cfg.tolerance * expected.max(1.0),
                "{} vs {expected}",
                report.volume
            );
        }
    }

    #[test]
    fn combined_filters_then_decomposes() {
        // A chain of maximal boxes with dominated clutter inside them.
        let mut boxes = vec![
            boxx(&[0.0, 0.0], &[3.0, 3.0]),
            boxx(&[2.0, 0.0], &[5.0, 3.0]),
            boxx(&[4.0, 0.0], &[7.0, 3.0]),
        ];
        for i in 0..3 {
            let base = 2.0 * i as f64;
            boxes.push(boxx(&[base + 0.5, 0.5], &[base + 1.5, 1.5]));
        }
        let i = inst(boxx(&[0.0, 0.0], &[7.0, 3.0]), boxes);
        let report = measure_combined(&i, None, &SolverConfig::default()).unwrap();
        assert_eq!(report.stats.h, Some(3));
        assert_eq!(report.algorithm, Algorithm::Combined);
        assert_eq!(report.volume, grid_measure(&i).unwrap());
    }

    #[test]
    fn combined_accepts_external_decomposition() {
        let i = interval_chain(4);
        let td = path_decomposition(4);
        let report = measure_combined(&i, Some(&td), &SolverConfig::default()).unwrap();
        let expected = grid_measure(&i).unwrap();
        assert!((report.volume - expected).abs() <= 1e-9 * expected.max(1.0));
        assert_eq!(report.stats.h, Some(4));
    }

    #[test]
    fn combined_rejects_decomposition_for_wrong_graph() {
        let i = interval_chain(4);
        let td = TreeDecomposition::new(vec![bag(&[0, 1])], vec![]);
        let err = measure_combined(&i, Some(&td), &SolverConfig::default()).unwrap_err();
        let DecompositionError::Invalid(verdict) = err;
        assert!(!verdict.is_ok());
    }

    #[test]
    fn combined_matches_oracle_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let cfg = SolverConfig::default();
        for _ in 0..40 {
            let n = rng.gen_range(0..=12);
            let d = rng.gen_range(1..=3);
            let i = random_instance(&mut rng, n, d);
            let report = measure_combined(&i, None, &cfg).unwrap();
            let expected = grid_measure(&i).unwrap();
            assert!(
                (report.volume - expected).abs() <= cfg.tolerance * expected.max(1.0),
                "{} vs {expected}",
                report.volume
            );
        }
    }

    #[test]
    fn empty_instance_routes_cleanly() {
        let i = inst(AxisBox::cube(2, 0.0, 1.0).unwrap(), vec![]);
        let report = measure_combined(&i, None, &SolverConfig::default()).unwrap();
        assert_eq!(report.volume, 0.0);
        assert_eq!(report.stats.h, Some(0));
        let report = measure_treewidth_heuristic(&i, &SolverConfig::default());
        assert_eq!(report.volume, 0.0);
    }

    #[test]
    fn decomposition_json_round_trip() {
        let td = path_decomposition(4);
        let text = serde_json::to_string(&td).unwrap();
        assert!(text.contains("\"bags\""));
        assert!(text.contains("\"edges\""));
        let back: TreeDecomposition = serde_json::from_str(&text).unwrap();
        assert_eq!(back, td);
    }
}
