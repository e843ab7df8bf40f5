use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{ChainTable, CircuitModel};
use crate::graphalg::{min_one_tree, OneTree as Tree};
use crate::kernel::{Priority, PropStatus, Propagator, Store, VarId, Wipeout};
use crate::tsplib::Edge;

/// Dedicated node for the 1-tree: among nodes with an unassigned successor,
/// the one whose two cheapest available edges weigh most. Ties are broken
/// by a generator seeded from `seed` and the store, so the choice is a
/// function of both. `None` when no candidate has two available edges.
pub fn select_root(model: &CircuitModel, store: &Store, seed: u64) -> Option<usize> {
    let n = model.n();
    let inst = model.instance();
    let mut best = i64::MIN;
    let mut ties = Vec::new();
    for i in (0..n).filter(|&i| !store.is_assigned(model.succ(i))) {
        let (mut a, mut b) = (i64::MAX, i64::MAX);
        for j in (0..n).filter(|&j| j != i && model.edge_available(store, i, j)) {
            let w = inst.weight(i, j);
            if w < a {
                b = a;
                a = w;
            } else if w < b {
                b = w;
            }
        }
        if b == i64::MAX {
            continue;
        }
        let score = a + b;
        if score > best {
            best = score;
            ties.clear();
        }
        if score == best {
            ties.push(i);
        }
    }
    let fingerprint = (0..model.num_vars()).fold(0u64, |h, x| {
        h.wrapping_mul(0x100_0000_01b3)
            ^ store
                .size(VarId(x))
                .wrapping_add(store.min(VarId(x)) as u64)
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fingerprint);
    ties.choose(&mut rng).copied()
}

/// Minimum 1-tree of the available graph rooted at `root` that keeps every
/// fixed edge. `None` when the fixed edges or the graph rule it out.
pub fn onetree_bound(model: &CircuitModel, store: &Store, root: usize) -> Option<Tree> {
    ChainTable::from_store(store, &model.succ_vars()).ok()?;
    let edges = model.available_edges(store);
    let fixed = model.fixed_edges(store);
    min_one_tree(model.n(), edges, root, &fixed).ok()
}

/// 1-tree propagation: raise `min(c)` to the 1-tree weight, take the 1-tree
/// as the solution when it is a circuit, and otherwise drop the longest
/// free edge at a node of maximum degree.
#[derive(Debug, Clone)]
pub struct OneTree {
    model: CircuitModel,
    seed: u64,
    scope: Vec<VarId>,
}

impl OneTree {
    pub fn new(model: &CircuitModel, seed: u64) -> Self {
        let mut scope = model.succ_vars();
        scope.push(model.cost());
        Self {
            model: model.clone(),
            seed,
            scope,
        }
    }

    fn fail(store: &mut Store) -> Result<PropStatus, Wipeout> {
        store.fail();
        Err(Wipeout)
    }

    fn run(&self, store: &mut Store) -> Result<PropStatus, Wipeout> {
        let m = &self.model;
        if m.close_full_assignment(store)? {
            return Ok(PropStatus::Subsumed);
        }
        let Some(root) = select_root(m, store, self.seed) else {
            return Self::fail(store);
        };
        let Some(tree) = onetree_bound(m, store, root) else {
            return Self::fail(store);
        };
        store.set_min(m.cost(), tree.weight)?;

        if let Some(order) = tree.circuit() {
            let n = order.len();
            let forward: Vec<(usize, usize)> =
                (0..n).map(|k| (order[k], order[(k + 1) % n])).collect();
            let backward: Vec<(usize, usize)> = forward.iter().map(|&(a, b)| (b, a)).collect();
            let fits = |arcs: &[(usize, usize)]| {
                arcs.iter()
                    .all(|&(a, b)| store.contains(m.succ(a), b as i64))
            };
            let chosen = if fits(&forward) {
                Some(forward)
            } else if fits(&backward) {
                Some(backward)
            } else {
                None
            };
            if let Some(arcs) = chosen {
                for (a, b) in arcs {
                    store.assign(m.succ(a), b as i64)?;
                }
                m.close_full_assignment(store)?;
                return Ok(PropStatus::Subsumed);
            }
            return Ok(PropStatus::AtFixpoint);
        }

        let fixed = m.fixed_edges(store);
        let degree = |v: usize| tree.degree(v);
        let hub = (0..m.n())
            .max_by_key(|&v| (degree(v), std::cmp::Reverse(v)))
            .unwrap();
        if degree(hub) > 2 {
            let longest = tree
                .edges()
                .filter(|e| e.touches(hub) && !fixed.contains(e))
                .max_by_key(|e| e.key())
                .copied();
            if let Some(Edge { u, v, .. }) = longest {
                store.remove(m.succ(u), v as i64)?;
                store.remove(m.succ(v), u as i64)?;
            }
        }
        Ok(PropStatus::AtFixpoint)
    }
}

impl Propagator for OneTree {
    fn name(&self) -> &str {
        "onetree"
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

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::geometry::Point;
    use crate::tsplib::TspInstance;

    fn model(pts: &[(f64, f64)]) -> CircuitModel {
        let inst =
            TspInstance::from_coords("t", pts.iter().map(|&(x, y)| Point::new(x, y)).collect());
        CircuitModel::new(Arc::new(inst)).unwrap()
    }

    #[test]
    fn unit_square_bound() {
        // Rounded diagonals weigh 1 as well, so every tour costs 4.
        let m = model(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let s = m.root_store();
        let root = select_root(&m, &s, 7).unwrap();
        assert_eq!(onetree_bound(&m, &s, root).unwrap().weight, 4);
    }

    #[test]
    fn square_one_tree_is_the_tour() {
        let m = model(&[(0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0)]);
        let mut s = m.root_store();
        assert_eq!(OneTree::new(&m, 7).propagate(&mut s), PropStatus::Subsumed);
        assert_eq!(s.value(m.cost()), Some(40));
        assert!(m.tour_of(&s).is_some());
    }

    #[test]
    fn circuit_graph_is_assigned() {
        // Only the pentagon edges remain available.
        let m = model(&[(0.0, 0.0), (4.0, 0.0), (5.0, 3.0), (2.0, 5.0), (-1.0, 3.0)]);
        let mut s = m.root_store();
        for i in 0..5usize {
            for j in 0..5usize {
                let adjacent = (i + 1) % 5 == j || (j + 1) % 5 == i;
                if i != j && !adjacent {
                    s.remove(m.succ(i), j as i64).unwrap();
                }
            }
        }
        assert_eq!(OneTree::new(&m, 0).propagate(&mut s), PropStatus::Subsumed);
        assert!(m.tour_of(&s).is_some());
    }

    #[test]
    fn star_loses_its_longest_free_edge() {
        // Hub 0 with four spokes and a far cycle between the leaves: the
        // minimum 1-tree is a star at 0 plus two root edges.
        let m = model(&[
            (0.0, 0.0),
            (10.0, 0.0),
            (0.0, 11.0),
            (-12.0, 0.0),
            (0.0, -13.0),
        ]);
        let mut s = m.root_store();
        let root = select_root(&m, &s, 0).unwrap();
        let t = onetree_bound(&m, &s, root).unwrap();
        let hub_degree = t.degree(0);
        assert!(hub_degree > 2);
        let longest = t
            .edges()
            .filter(|e| e.touches(0))
            .max_by_key(|e| e.key())
            .copied()
            .unwrap();
        let before = s.clone();
        OneTree::new(&m, 0).propagate(&mut s);
        let removed: Vec<(usize, i64)> = (0..5)
            .flat_map(|i| before.domain(m.succ(i)).values().map(move |v| (i, v)))
            .filter(|&(i, v)| !s.contains(m.succ(i), v))
            .collect();
        let other = longest.other(0);
        assert_eq!(removed, vec![(0, other as i64), (other, 0)]);
    }
}
