#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shortcut {
    pub tour: Vec<usize>,
    pub weight: i64,
    /// Every edge of the tour, including the closing one, is in the subgraph.
    pub used_only_subgraph: bool,
}

/// Turn a closed walk into a Hamiltonian circuit by skipping nodes already
/// visited. Weights come from the full graph; `in_subgraph` reports whether
/// an (undirected) edge belongs to the restricted graph.
pub fn shortcut(
    walk: &[usize],
    n: usize,
    weight: impl Fn(usize, usize) -> i64,
    in_subgraph: impl Fn(usize, usize) -> bool,
) -> Shortcut {
    let mut seen = vec![false; n];
    let mut tour = Vec::with_capacity(n);
    for &v in walk {
        if !seen[v] {
            seen[v] = true;
            tour.push(v);
        }
    }
    let mut total = 0;
    let mut inside = true;
    for k in 0..tour.len() {
        let (a, b) = (tour[k], tour[(k + 1) % tour.len()]);
        if a == b {
            continue;
        }
        total += weight(a, b);
        inside &= in_subgraph(a, b);
    }
    Shortcut {
        tour,
        weight: total,
        used_only_subgraph: inside,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(a: usize, b: usize) -> i64 {
        [[0, 3, 4], [3, 0, 5], [4, 5, 0]][a][b]
    }

    #[test]
    fn skips_repeated_nodes() {
        let s = shortcut(&[0, 1, 0, 2, 0], 3, w, |_, _| true);
        assert_eq!(s.tour, vec![0, 1, 2]);
        assert_eq!(s.weight, 3 + 5 + 4);
        assert!(s.used_only_subgraph);
    }

    #[test]
    fn hamiltonian_walk_unchanged() {
        let s = shortcut(&[2, 0, 1, 2], 3, w, |_, _| true);
        assert_eq!(s.tour, vec![2, 0, 1]);
        assert_eq!(s.weight, 12);
    }

    #[test]
    fn skip_edge_outside_subgraph() {
        // Walk 0-1-2-1-3-4-3-0 on 5 nodes; the shortcut jumps 2 -> 3, which
        // is not an edge of the subgraph (only the walk edges are).
        let walk = [0, 1, 2, 1, 3, 4, 3, 0];
        let sub = |a: usize, b: usize| {
            let e = (a.min(b), a.max(b));
            [(0, 1), (1, 2), (1, 3), (3, 4), (0, 3), (0, 4)].contains(&e)
        };
        let s = shortcut(&walk, 5, |_, _| 1, sub);
        assert_eq!(s.tour, vec![0, 1, 2, 3, 4]);
        assert!(!s.used_only_subgraph);
        assert_eq!(s.weight, 5);
    }
}
