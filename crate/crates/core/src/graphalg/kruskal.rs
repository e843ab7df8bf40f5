use petgraph::unionfind::UnionFind;

use super::GraphError;
use crate::tsplib::Edge;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    pub edges: Vec<Edge>,
    pub degree: Vec<usize>,
    pub weight: i64,
}

/// Spanning tree over nodes `0..n` that contains every edge of `fixed`,
/// completed greedily from `edges` (ascending weight).
///
/// The result is minimum among the spanning trees containing `fixed`.
pub fn kruskal_with_fixed(
    n: usize,
    edges: impl IntoIterator<Item = Edge>,
    fixed: &[Edge],
) -> Result<SpanningTree, GraphError> {
    let mut uf = UnionFind::<usize>::new(n);
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    for e in fixed {
        if !uf.union(e.u, e.v) {
            return Err(GraphError::FixedCycle);
        }
        tree.push(*e);
    }
    let target = n.saturating_sub(1);
    for e in edges {
        if tree.len() >= target {
            break;
        }
        if uf.union(e.u, e.v) {
            tree.push(e);
        }
    }
    if tree.len() < target {
        return Err(GraphError::Disconnected);
    }
    Ok(finish_tree(n, tree))
}

fn finish_tree(n: usize, edges: Vec<Edge>) -> SpanningTree {
    let mut degree = vec![0; n];
    for e in &edges {
        degree[e.u] += 1;
        degree[e.v] += 1;
    }
    let weight = edges.iter().map(|e| e.w).sum();
    SpanningTree {
        edges,
        degree,
        weight,
    }
}

/// A spanning tree of `V ∖ {root}` plus two edges at `root`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneTree {
    pub root: usize,
    pub tree: Vec<Edge>,
    pub root_edges: [Edge; 2],
    pub weight: i64,
    /// Degree of every node counting only the tree part.
    pub tree_degree: Vec<usize>,
}

impl OneTree {
    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.tree.iter().chain(self.root_edges.iter())
    }

    /// Degree counting both the tree part and the root edges.
    pub fn degree(&self, v: usize) -> usize {
        self.tree_degree[v] + self.root_edges.iter().filter(|e| e.touches(v)).count()
    }

    /// A 1-tree in which every node has degree two is a Hamiltonian circuit.
    pub fn is_circuit(&self) -> bool {
        (0..self.tree_degree.len()).all(|v| self.degree(v) == 2)
    }

    /// The circuit as a node sequence starting at the root, if it is one.
    pub fn circuit(&self) -> Option<Vec<usize>> {
        if !self.is_circuit() {
            return None;
        }
        let n = self.tree_degree.len();
        let mut adj = vec![Vec::with_capacity(2); n];
        for e in self.edges() {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        let mut order = Vec::with_capacity(n);
        let (mut prev, mut cur) = (usize::MAX, self.root);
        loop {
            order.push(cur);
            let next = if adj[cur][0] != prev {
                adj[cur][0]
            } else {
                adj[cur][1]
            };
            prev = cur;
            cur = next;
            if cur == self.root {
                break;
            }
        }
        (order.len() == n).then_some(order)
    }
}

/// Minimum 1-tree rooted at `root` containing every edge of `fixed`.
///
/// Forced edges go to the root pair or to the tree. While scanning `edges`
/// in ascending order, an edge at the root joins the root pair unless it
/// already holds two edges; the other edges complete the tree Kruskal-style.
pub fn min_one_tree(
    n: usize,
    edges: impl IntoIterator<Item = Edge>,
    root: usize,
    fixed: &[Edge],
) -> Result<OneTree, GraphError> {
    let mut uf = UnionFind::<usize>::new(n);
    let mut tree = Vec::with_capacity(n.saturating_sub(2));
    let mut root_edges: Vec<Edge> = Vec::with_capacity(2);
    for e in fixed {
        if e.touches(root) {
            if root_edges.contains(e) {
                continue;
            }
            if root_edges.len() == 2 {
                return Err(GraphError::TooManyFixedAtRoot(root));
            }
            root_edges.push(*e);
        } else {
            if !uf.union(e.u, e.v) {
                return Err(GraphError::FixedCycle);
            }
            tree.push(*e);
        }
    }
    let target = n.saturating_sub(2);
    for e in edges {
        if tree.len() >= target && root_edges.len() == 2 {
            break;
        }
        if e.touches(root) {
            if root_edges.len() < 2 && !root_edges.contains(&e) {
                root_edges.push(e);
            }
        } else if tree.len() < target && uf.union(e.u, e.v) {
            tree.push(e);
        }
    }
    if tree.len() < target || root_edges.len() < 2 {
        return Err(GraphError::Disconnected);
    }
    let t = finish_tree(n, tree);
    let root_edges = [root_edges[0], root_edges[1]];
    Ok(OneTree {
        root,
        weight: t.weight + root_edges[0].w + root_edges[1].w,
        tree: t.edges,
        root_edges,
        tree_degree: t.degree,
    })
}
