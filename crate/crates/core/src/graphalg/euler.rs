use super::GraphError;

/// Closed walk using every edge of the multigraph exactly once
/// (Hierholzer, explicit stack). Parallel edges are allowed.
///
/// Returns the node sequence with the start repeated at the end. Nodes with
/// no edges are ignored; the edges themselves must form one connected
/// component with all degrees even.
pub fn euler_circuit(n: usize, edges: &[(usize, usize)]) -> Result<Vec<usize>, GraphError> {
    if edges.is_empty() {
        return Ok(Vec::new());
    }
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (k, &(a, b)) in edges.iter().enumerate() {
        adj[a].push((b, k));
        adj[b].push((a, k));
    }
    if let Some(v) = (0..n).find(|&v| adj[v].len() % 2 == 1) {
        return Err(GraphError::OddDegree(v));
    }

    let mut used = vec![false; edges.len()];
    let mut next = vec![0usize; n];
    let mut stack = vec![edges[0].0];
    let mut walk = Vec::with_capacity(edges.len() + 1);
    while let Some(&v) = stack.last() {
        let mut advanced = false;
        while next[v] < adj[v].len() {
            let (w, k) = adj[v][next[v]];
            next[v] += 1;
            if !used[k] {
                used[k] = true;
                stack.push(w);
                advanced = true;
                break;
            }
        }
        if !advanced {
            walk.push(v);
            stack.pop();
        }
    }
    if walk.len() != edges.len() + 1 {
        return Err(GraphError::Disconnected);
    }
    walk.reverse();
    Ok(walk)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge_multiset(walk: &[usize]) -> Vec<(usize, usize)> {
        let mut es: Vec<(usize, usize)> = walk
            .windows(2)
            .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
            .collect();
        es.sort();
        es
    }

    #[test]
    fn triangle() {
        let edges = [(0, 1), (1, 2), (2, 0)];
        let walk = euler_circuit(3, &edges).unwrap();
        assert_eq!(walk.len(), 4);
        assert_eq!(walk.first(), walk.last());
        assert_eq!(edge_multiset(&walk), vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn bowtie() {
        let edges = [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)];
        let walk = euler_circuit(5, &edges).unwrap();
        assert_eq!(walk.len(), 7);
        let mut expect: Vec<(usize, usize)> =
            edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        expect.sort();
        assert_eq!(edge_multiset(&walk), expect);
    }

    #[test]
    fn doubled_edge() {
        assert_eq!(euler_circuit(2, &[(0, 1), (0, 1)]).unwrap(), vec![0, 1, 0]);
    }

    #[test]
    fn contract_violations() {
        assert_eq!(
            euler_circuit(3, &[(0, 1), (1, 2)]),
            Err(GraphError::OddDegree(0))
        );
        assert_eq!(
            euler_circuit(4, &[(0, 1), (0, 1), (2, 3), (2, 3)]),
            Err(GraphError::Disconnected)
        );
    }
}
