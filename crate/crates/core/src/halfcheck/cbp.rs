use crate::circuit::{ChainTable, CircuitModel};
use crate::graphalg::{euler_circuit, greedy_matching, kruskal_with_fixed, shortcut};
use crate::kernel::{Priority, PropStatus, Propagator, Store, VarId, Wipeout};
use crate::tsplib::Edge;

/// Above this fraction of the full edge set, the available edges are taken
/// from the globally sorted list instead of being rebuilt and sorted.
pub const DEFAULT_CBP_THRESHOLD: f64 = 0.25;

/// A Hamiltonian circuit of the full graph found by the Christofides-style
/// pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CbpWitness {
    pub tour: Vec<usize>,
    pub weight: i64,
    /// Every edge of the tour is still available in the store.
    pub used_only_subgraph: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CbpOutcome {
    Bound(CbpWitness),
    /// The fixed edges close a subtour or the available graph is disconnected.
    Infeasible,
    /// Odd nodes were left unmatched; nothing is deduced.
    NoBound,
}

/// Edges of the graph of available successors, ascending.
fn subgraph_edges(model: &CircuitModel, store: &Store, threshold: f64) -> Vec<Edge> {
    let n = model.n();
    let directed: u64 = (0..n).map(|i| store.size(model.succ(i))).sum();
    let total = (n * (n - 1) / 2) as f64;
    if directed as f64 / 2.0 > threshold * total {
        return model.available_edges(store);
    }
    let inst = model.instance();
    let mut edges: Vec<Edge> = (0..n)
        .flat_map(|i| {
            store
                .domain(model.succ(i))
                .values()
                .map(move |j| (i, j as usize))
        })
        .map(|(i, j)| inst.edge(i, j))
        .collect();
    edges.sort_by_key(Edge::key);
    edges.dedup();
    edges
}

/// Spanning tree of the available graph with the fixed edges, greedy
/// matching of its odd nodes (inside the available graph first, then in the
/// full graph), Euler circuit, shortcut.
pub fn cbp_bound(model: &CircuitModel, store: &Store, threshold: f64) -> CbpOutcome {
    let n = model.n();
    if ChainTable::from_store(store, &model.succ_vars()).is_err() {
        return CbpOutcome::Infeasible;
    }
    let inst = model.instance();
    let edges = subgraph_edges(model, store, threshold);
    let fixed = model.fixed_edges(store);
    let tree = if fixed.len() == n {
        // A closed circuit: it is its own Euler tour.
        fixed.clone()
    } else {
        match kruskal_with_fixed(n, edges.iter().copied(), &fixed) {
            Ok(t) => t.edges,
            Err(_) => return CbpOutcome::Infeasible,
        }
    };
    let mut degree = vec![0usize; n];
    for e in &tree {
        degree[e.u] += 1;
        degree[e.v] += 1;
    }
    let odd: Vec<usize> = (0..n).filter(|&v| degree[v] % 2 == 1).collect();
    let inner = greedy_matching(n, &odd, edges.iter().copied());
    let outer = greedy_matching(n, &inner.unmatched, inst.edges_by_weight().iter().copied());
    if !outer.unmatched.is_empty() {
        return CbpOutcome::NoBound;
    }
    let multi: Vec<(usize, usize)> = tree
        .iter()
        .chain(&inner.pairs)
        .chain(&outer.pairs)
        .map(|e| (e.u, e.v))
        .collect();
    let Ok(walk) = euler_circuit(n, &multi) else {
        return CbpOutcome::NoBound;
    };
    let s = shortcut(
        &walk,
        n,
        |a, b| inst.weight(a, b),
        |a, b| model.edge_available(store, a, b),
    );
    if s.tour.len() != n {
        return CbpOutcome::NoBound;
    }
    CbpOutcome::Bound(CbpWitness {
        tour: s.tour,
        weight: s.weight,
        used_only_subgraph: s.used_only_subgraph,
    })
}

/// Christofides bounds propagation: `max(c)` is lowered to the weight of
/// the circuit found by [`cbp_bound`].
#[derive(Debug, Clone)]
pub struct Cbp {
    model: CircuitModel,
    threshold: f64,
    scope: Vec<VarId>,
}

impl Cbp {
    pub fn new(model: &CircuitModel) -> Self {
        let mut scope = model.succ_vars();
        scope.push(model.cost());
        Self {
            model: model.clone(),
            threshold: DEFAULT_CBP_THRESHOLD,
            scope,
        }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    fn run(&self, store: &mut Store) -> Result<PropStatus, Wipeout> {
        if self.model.close_full_assignment(store)? {
            return Ok(PropStatus::Subsumed);
        }
        match cbp_bound(&self.model, store, self.threshold) {
            CbpOutcome::Bound(w) => {
                store.set_max(self.model.cost(), w.weight)?;
            }
            CbpOutcome::Infeasible => {
                store.fail();
                return Err(Wipeout);
            }
            CbpOutcome::NoBound => {}
        }
        Ok(PropStatus::AtFixpoint)
    }
}

impl Propagator for Cbp {
    fn name(&self) -> &str {
        "cbp"
    }

    fn scope(&self) -> &[VarId] {
        &self.scope
    }

    fn half_checking(&self) -> bool {
        true
    }

    fn priority(&self) -> Priority {
        Priority::Low
    }

    fn propagate(&self, store: &mut Store) -> PropStatus {
        self.run(store).into()
    }
}
