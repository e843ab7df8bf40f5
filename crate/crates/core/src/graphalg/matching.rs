use crate::tsplib::Edge;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Matching {
    pub pairs: Vec<Edge>,
    pub unmatched: Vec<usize>,
}

/// Greedy maximal matching on `nodes` using `allowed` edges in the given
/// (ascending weight) order. Edges with an endpoint outside `nodes` are
/// ignored.
pub fn greedy_matching(
    n: usize,
    nodes: &[usize],
    allowed: impl IntoIterator<Item = Edge>,
) -> Matching {
    let mut wanted = vec![false; n];
    for &v in nodes {
        wanted[v] = true;
    }
    let mut open = nodes.len();
    let mut pairs = Vec::with_capacity(nodes.len() / 2);
    for e in allowed {
        if open < 2 {
            break;
        }
        if e.u != e.v && wanted[e.u] && wanted[e.v] {
            wanted[e.u] = false;
            wanted[e.v] = false;
            open -= 2;
            pairs.push(e);
        }
    }
    let unmatched = nodes.iter().copied().filter(|&v| wanted[v]).collect();
    Matching { pairs, unmatched }
}
