//! Warnsdorff-style branching: extend the fixed path from a start node,
//! preferring short edges.

use rand::Rng;

use crate::circuit::CircuitModel;
use crate::kernel::{Brancher, SearchRng, Store, VarId};

/// Default probability of picking the second cheapest value.
pub const DEFAULT_EPSILON: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct WarnsdorffBrancher {
    model: CircuitModel,
    start: usize,
    epsilon: f64,
}

impl WarnsdorffBrancher {
    pub fn new(model: &CircuitModel, start: usize, epsilon: f64) -> Self {
        assert!(start < model.n(), "start node out of range");
        assert!(
            (0.0..=1.0).contains(&epsilon),
            "epsilon must be a probability"
        );
        Self {
            model: model.clone(),
            start,
            epsilon,
        }
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// The successor variable at the end of the fixed path from the start
    /// node. When that path closes early the first unassigned successor is
    /// used; `None` once every successor is assigned.
    pub fn select_variable(&self, store: &Store) -> Option<VarId> {
        let n = self.model.n();
        let mut cur = self.start;
        for _ in 0..n {
            let x = self.model.succ(cur);
            match store.value(x) {
                None => return Some(x),
                Some(next) => cur = next as usize,
            }
            if cur == self.start {
                break;
            }
        }
        (0..n)
            .map(|i| self.model.succ(i))
            .find(|&x| !store.is_assigned(x))
    }

    /// The cheapest value of `var` (lowest node on ties); with probability
    /// `epsilon` a uniform pick between the two cheapest.
    pub fn select_value(&self, store: &Store, var: VarId, rng: &mut SearchRng) -> i64 {
        let from = var.index();
        let inst = self.model.instance();
        let key = |v: i64| (inst.weight(from, v as usize), v);
        let mut best: Option<i64> = None;
        let mut second: Option<i64> = None;
        for v in store.domain(var).values() {
            if best.is_none_or(|b| key(v) < key(b)) {
                second = best;
                best = Some(v);
            } else if second.is_none_or(|s| key(v) < key(s)) {
                second = Some(v);
            }
        }
        let best = best.expect("branching on an empty domain");
        match second {
            Some(s) if self.epsilon > 0.0 && rng.gen_bool(self.epsilon) => {
                if rng.gen_bool(0.5) {
                    s
                } else {
                    best
                }
            }
            _ => best,
        }
    }
}

impl Brancher for WarnsdorffBrancher {
    fn name(&self) -> &str {
        "warnsdorff"
    }

    fn choose(&self, store: &Store, rng: &mut SearchRng) -> Option<(VarId, i64)> {
        let x = self.select_variable(store)?;
        Some((x, self.select_value(store, x, rng)))
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::SeedableRng;

    use super::*;
    use crate::geometry::Point;
    use crate::tsplib::TspInstance;

    fn model() -> CircuitModel {
        // From node 0: w(0,1)=5, w(0,2)=2, w(0,3)=9.
        let pts = [(0.0, 0.0), (3.0, 4.0), (0.0, 2.0), (0.0, -9.0)];
        let inst =
            TspInstance::from_coords("t", pts.iter().map(|&(x, y)| Point::new(x, y)).collect());
        CircuitModel::new(Arc::new(inst)).unwrap()
    }

    #[test]
    fn variable_follows_the_path() {
        let m = model();
        let b = WarnsdorffBrancher::new(&m, 0, 0.0);
        let mut s = m.root_store();
        assert_eq!(b.select_variable(&s), Some(m.succ(0)));
        s.assign(m.succ(0), 2).unwrap();
        assert_eq!(b.select_variable(&s), Some(m.succ(2)));
        for (i, j) in [(2, 1), (1, 3), (3, 0)] {
            s.assign(m.succ(i), j).unwrap();
        }
        assert_eq!(b.select_variable(&s), None);
    }

    #[test]
    fn cheapest_value() {
        let m = model();
        let b = WarnsdorffBrancher::new(&m, 0, 0.0);
        let mut rng = SearchRng::seed_from_u64(1);
        assert_eq!(b.select_value(&m.root_store(), m.succ(0), &mut rng), 2);
    }

    #[test]
    fn ties_go_to_the_lowest_node() {
        let pts = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0)];
        let inst =
            TspInstance::from_coords("t", pts.iter().map(|&(x, y)| Point::new(x, y)).collect());
        let m = CircuitModel::new(Arc::new(inst)).unwrap();
        let b = WarnsdorffBrancher::new(&m, 0, 0.0);
        let mut rng = SearchRng::seed_from_u64(1);
        assert_eq!(b.select_value(&m.root_store(), m.succ(0), &mut rng), 1);
    }

    #[test]
    fn epsilon_one_splits_evenly() {
        let m = model();
        let b = WarnsdorffBrancher::new(&m, 0, 1.0);
        let mut s = m.root_store();
        s.remove(m.succ(0), 3).unwrap();
        let mut rng = SearchRng::seed_from_u64(42);
        let draws = 10_000;
        let cheap = (0..draws)
            .filter(|_| b.select_value(&s, m.succ(0), &mut rng) == 2)
            .count() as f64;
        let expect = draws as f64 / 2.0;
        let sigma = (draws as f64 * 0.25).sqrt();
        assert!((cheap - expect).abs() < 3.0 * sigma, "cheap = {cheap}");
    }
}
