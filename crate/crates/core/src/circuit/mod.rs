//! The successor model of cost-circuit and its standard filtering.
//!
//! Variables are laid out as `S_0..S_{n-1}` (successors), then
//! `P_0..P_{n-1}` (predecessors), then the cost `c`.

mod props;

use std::sync::Arc;

pub use props::{AllDiffValue, CostBounds, InverseChannel, SubtourElim};

use crate::kernel::{Domain, Problem, PropRef, Store, VarId, Wipeout};
use crate::tsplib::{Edge, TspInstance};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("a circuit needs at least 3 nodes, instance has {0}")]
    TooSmall(usize),
}

#[derive(Debug, Clone)]
pub struct CircuitModel {
    inst: Arc<TspInstance>,
}

impl CircuitModel {
    pub fn new(inst: Arc<TspInstance>) -> Result<Self, ModelError> {
        if inst.n() <= 2 {
            return Err(ModelError::TooSmall(inst.n()));
        }
        Ok(Self { inst })
    }

    pub fn n(&self) -> usize {
        self.inst.n()
    }

    pub fn instance(&self) -> &Arc<TspInstance> {
        &self.inst
    }

    pub fn succ(&self, i: usize) -> VarId {
        VarId(i)
    }

    pub fn pred(&self, j: usize) -> VarId {
        VarId(self.n() + j)
    }

    pub fn cost(&self) -> VarId {
        VarId(2 * self.n())
    }

    pub fn succ_vars(&self) -> Vec<VarId> {
        (0..self.n()).map(VarId).collect()
    }

    pub fn pred_vars(&self) -> Vec<VarId> {
        (self.n()..2 * self.n()).map(VarId).collect()
    }

    pub fn num_vars(&self) -> usize {
        2 * self.n() + 1
    }

    /// `S_i, P_i ∈ V ∖ {i}` and `c ∈ [0, Σ_i max_j w(i,j)]`.
    pub fn root_store(&self) -> Store {
        let n = self.n();
        let mut store = Store::new();
        for _ in 0..2 {
            for i in 0..n {
                store.add_var(Domain::set_of(n, (0..n).filter(|&j| j != i)));
            }
        }
        let hi: i64 = (0..n)
            .map(|i| (0..n).map(|j| self.inst.weight(i, j)).max().unwrap_or(0))
            .sum();
        store.add_var(Domain::interval(0, hi));
        store
    }

    /// Value alldifferent on `S` and `P`, subtour elimination, cost bounds
    /// and the inverse channel.
    pub fn standard_propagators(&self) -> Vec<PropRef> {
        vec![
            Arc::new(AllDiffValue::new("alldiff-s", self.succ_vars())),
            Arc::new(AllDiffValue::new("alldiff-p", self.pred_vars())),
            Arc::new(InverseChannel::new(self)),
            Arc::new(SubtourElim::new(self)),
            Arc::new(CostBounds::new(self)),
        ]
    }

    /// Minimise `c` over the root store; solutions are checked with
    /// [`check_solution`].
    pub fn problem(&self) -> Problem {
        let inst = self.inst.clone();
        Problem::new(self.root_store())
            .minimize(self.cost())
            .with_checker(move |values: &[i64]| check_solution(&inst, values))
    }

    /// Whether `{i, j}` is still usable as a tour edge in either direction.
    pub fn edge_available(&self, store: &Store, i: usize, j: usize) -> bool {
        store.contains(self.succ(i), j as i64) || store.contains(self.succ(j), i as i64)
    }

    /// Undirected edges fixed by assigned successor variables, deduplicated.
    pub fn fixed_edges(&self, store: &Store) -> Vec<Edge> {
        let mut out: Vec<Edge> = (0..self.n())
            .filter_map(|i| {
                let j = store.value(self.succ(i))? as usize;
                Some(self.inst.edge(i, j))
            })
            .collect();
        out.sort_by_key(Edge::key);
        out.dedup();
        out
    }

    /// Every available undirected edge in ascending weight order.
    pub fn available_edges(&self, store: &Store) -> Vec<Edge> {
        self.inst
            .edges_by_weight()
            .iter()
            .copied()
            .filter(|e| self.edge_available(store, e.u, e.v))
            .collect()
    }

    /// The tour encoded by fully assigned successors, starting at 0, if it
    /// is a single Hamiltonian circuit.
    pub fn tour_of(&self, store: &Store) -> Option<Vec<usize>> {
        let succ: Option<Vec<i64>> = (0..self.n()).map(|i| store.value(self.succ(i))).collect();
        tour_from_successors(&succ?)
    }

    /// Shared full-assignment check for the half-checking propagators:
    /// once all successors are assigned they must form one circuit and
    /// `c` is fixed to its weight.
    pub(crate) fn close_full_assignment(&self, store: &mut Store) -> Result<bool, Wipeout> {
        if !(0..self.n()).all(|i| store.is_assigned(self.succ(i))) {
            return Ok(false);
        }
        match self.tour_of(store) {
            Some(tour) => {
                let w = self.inst.tour_weight(&tour);
                store.assign(self.cost(), w)?;
                Ok(true)
            }
            None => {
                store.fail();
                Err(Wipeout)
            }
        }
    }
}

/// Follow `succ` from 0. Returns the node order when it visits every node
/// exactly once before returning to 0.
pub fn tour_from_successors(succ: &[i64]) -> Option<Vec<usize>> {
    let n = succ.len();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut cur = 0usize;
    for _ in 0..n {
        if seen[cur] {
            return None;
        }
        seen[cur] = true;
        order.push(cur);
        let next = succ[cur];
        if next < 0 || next as usize >= n {
            return None;
        }
        cur = next as usize;
    }
    (cur == 0).then_some(order)
}

/// Independent check of a full assignment `S, P, c` (or just `S, c`).
///
/// `values` holds `n` successors, optionally `n` predecessors, and the cost
/// last. The successors must form one Hamiltonian circuit whose weight is
/// the cost; predecessors, when present, must be its inverse.
pub fn check_solution(inst: &TspInstance, values: &[i64]) -> bool {
    let n = inst.n();
    if values.len() != 2 * n + 1 && values.len() != n + 1 {
        return false;
    }
    let succ = &values[..n];
    let Some(tour) = tour_from_successors(succ) else {
        return false;
    };
    if values.len() == 2 * n + 1 {
        let pred = &values[n..2 * n];
        if (0..n).any(|i| pred[succ[i] as usize] != i as i64) {
            return false;
        }
    }
    inst.tour_weight(&tour) == values[values.len() - 1]
}

/// Fixed path fragments induced by assigned successors.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChainTable {
    /// `(start, end, edges)` for each maximal fixed path.
    pub chains: Vec<(usize, usize, usize)>,
    /// The assigned successors form one circuit through every node.
    pub closed: bool,
}

/// Why the assigned successors cannot be part of a Hamiltonian circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Subtour;

impl ChainTable {
    /// Read the chains off the assigned successors. Fails when two
    /// successors share a value or a cycle shorter than `n` is closed.
    pub fn from_store(store: &Store, succ: &[VarId]) -> Result<Self, Subtour> {
        let n = succ.len();
        let next: Vec<Option<usize>> = succ
            .iter()
            .map(|&x| store.value(x).map(|v| v as usize))
            .collect();
        let mut has_pred = vec![false; n];
        for j in next.iter().flatten() {
            if std::mem::replace(&mut has_pred[*j], true) {
                return Err(Subtour);
            }
        }
        let mut visited = vec![false; n];
        let mut chains = Vec::new();
        for a in 0..n {
            if has_pred[a] || next[a].is_none() {
                continue;
            }
            let (mut b, mut len) = (a, 0);
            visited[a] = true;
            while let Some(s) = next[b] {
                b = s;
                visited[b] = true;
                len += 1;
            }
            chains.push((a, b, len));
        }
        // What is left unvisited with a successor lies on a cycle.
        let mut closed = false;
        if let Some(start) = (0..n).find(|&v| !visited[v] && next[v].is_some()) {
            let (mut v, mut len) = (start, 0);
            loop {
                v = next[v].expect("cycle nodes are assigned");
                len += 1;
                if v == start {
                    break;
                }
            }
            if len < n {
                return Err(Subtour);
            }
            closed = true;
        }
        Ok(Self { chains, closed })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    pub(crate) fn square() -> Arc<TspInstance> {
        let pts = [(0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0)];
        Arc::new(TspInstance::from_coords(
            "square",
            pts.iter().map(|&(x, y)| Point::new(x, y)).collect(),
        ))
    }

    #[test]
    fn layout_and_root() {
        let m = CircuitModel::new(square()).unwrap();
        assert_eq!(m.num_vars(), 9);
        let s = m.root_store();
        assert!(!s.contains(m.succ(2), 2));
        assert!(!s.contains(m.pred(1), 1));
        assert_eq!(s.size(m.succ(0)), 3);
        assert_eq!(s.min(m.cost()), 0);
    }

    #[test]
    fn rejects_tiny_instances() {
        let two = Arc::new(TspInstance::from_coords(
            "two",
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)],
        ));
        assert_eq!(CircuitModel::new(two).unwrap_err(), ModelError::TooSmall(2));
    }

    #[test]
    fn checker() {
        let inst = square();
        assert!(check_solution(&inst, &[1, 2, 3, 0, 40]));
        assert!(!check_solution(&inst, &[1, 2, 3, 0, 39]));
        assert!(!check_solution(&inst, &[1, 0, 3, 2, 40]));
        assert!(check_solution(&inst, &[1, 2, 3, 0, 3, 0, 1, 2, 40]));
        assert!(!check_solution(&inst, &[1, 2, 3, 0, 3, 0, 2, 1, 40]));
    }

    #[test]
    fn chains() {
        let m = CircuitModel::new(square()).unwrap();
        let mut s = m.root_store();
        s.assign(m.succ(0), 1).unwrap();
        s.assign(m.succ(1), 2).unwrap();
        let t = ChainTable::from_store(&s, &m.succ_vars()).unwrap();
        assert_eq!(t.chains, vec![(0, 2, 2)]);
        s.assign(m.succ(2), 0).unwrap();
        assert_eq!(ChainTable::from_store(&s, &m.succ_vars()), Err(Subtour));
    }
}
