use std::sync::Arc;

use super::{ChainTable, CircuitModel};
use crate::kernel::{PropStatus, Propagator, Store, VarId, Wipeout};
use crate::tsplib::TspInstance;

/// Value-consistent alldifferent: an assigned value is removed from every
/// other variable.
#[derive(Debug, Clone)]
pub struct AllDiffValue {
    name: String,
    vars: Vec<VarId>,
}

impl AllDiffValue {
    pub fn new(name: impl Into<String>, vars: Vec<VarId>) -> Self {
        Self {
            name: name.into(),
            vars,
        }
    }

    fn run(&self, store: &mut Store) -> Result<PropStatus, Wipeout> {
        let mut done = vec![false; self.vars.len()];
        loop {
            let mut progress = false;
            for k in 0..self.vars.len() {
                if done[k] {
                    continue;
                }
                let Some(v) = store.value(self.vars[k]) else {
                    continue;
                };
                done[k] = true;
                progress = true;
                for (m, &y) in self.vars.iter().enumerate() {
                    if m != k {
                        store.remove(y, v)?;
                    }
                }
            }
            if !progress {
                break;
            }
        }
        if done.iter().all(|&d| d) {
            Ok(PropStatus::Subsumed)
        } else {
            Ok(PropStatus::AtFixpoint)
        }
    }
}

impl Propagator for AllDiffValue {
    fn name(&self) -> &str {
        &self.name
    }

    fn scope(&self) -> &[VarId] {
        &self.vars
    }

    fn propagate(&self, store: &mut Store) -> PropStatus {
        self.run(store).into()
    }
}

/// Forbids closing a fixed path into a cycle shorter than `n`.
#[derive(Debug, Clone)]
pub struct SubtourElim {
    succ: Vec<VarId>,
}

impl SubtourElim {
    pub fn new(model: &CircuitModel) -> Self {
        Self {
            succ: model.succ_vars(),
        }
    }

    fn run(&self, store: &mut Store) -> Result<PropStatus, Wipeout> {
        let n = self.succ.len();
        loop {
            let table = match ChainTable::from_store(store, &self.succ) {
                Ok(t) => t,
                Err(_) => {
                    store.fail();
                    return Err(Wipeout);
                }
            };
            if table.closed {
                return Ok(PropStatus::Subsumed);
            }
            let mut assigned_more = false;
            for &(a, b, len) in &table.chains {
                if len + 1 < n {
                    let was = store.is_assigned(self.succ[b]);
                    store.remove(self.succ[b], a as i64)?;
                    assigned_more |= !was && store.is_assigned(self.succ[b]);
                }
            }
            if !assigned_more {
                return Ok(PropStatus::AtFixpoint);
            }
        }
    }
}

impl Propagator for SubtourElim {
    fn name(&self) -> &str {
        "subtour"
    }

    fn scope(&self) -> &[VarId] {
        &self.succ
    }

    fn propagate(&self, store: &mut Store) -> PropStatus {
        self.run(store).into()
    }
}

/// Reduced-sum bounds between the successor weights and `c`.
#[derive(Debug, Clone)]
pub struct CostBounds {
    inst: Arc<TspInstance>,
    scope: Vec<VarId>,
}

impl CostBounds {
    pub fn new(model: &CircuitModel) -> Self {
        let mut scope = model.succ_vars();
        scope.push(model.cost());
        Self {
            inst: model.instance().clone(),
            scope,
        }
    }

    fn run(&self, store: &mut Store) -> Result<PropStatus, Wipeout> {
        let n = self.inst.n();
        let c = self.scope[n];
        loop {
            let mut mins = Vec::with_capacity(n);
            let (mut lo, mut hi) = (0i64, 0i64);
            for i in 0..n {
                let ws = store
                    .domain(self.scope[i])
                    .values()
                    .map(|j| self.inst.weight(i, j as usize));
                let (mn, mx) = ws.fold((i64::MAX, i64::MIN), |(a, b), w| (a.min(w), b.max(w)));
                mins.push(mn);
                lo += mn;
                hi += mx;
            }
            store.set_min(c, lo)?;
            store.set_max(c, hi)?;
            let slack = store.max(c) - lo;
            let mut changed = false;
            for (i, &mn) in mins.iter().enumerate() {
                let x = self.scope[i];
                let drop: Vec<i64> = store
                    .domain(x)
                    .values()
                    .filter(|&j| self.inst.weight(i, j as usize) - mn > slack)
                    .collect();
                for j in drop {
                    changed |= store.remove(x, j)?;
                }
            }
            if !changed {
                break;
            }
        }
        if self.scope.iter().all(|&x| store.is_assigned(x)) {
            Ok(PropStatus::Subsumed)
        } else {
            Ok(PropStatus::AtFixpoint)
        }
    }
}

impl Propagator for CostBounds {
    fn name(&self) -> &str {
        "cost-bounds"
    }

    fn scope(&self) -> &[VarId] {
        &self.scope
    }

    fn propagate(&self, store: &mut Store) -> PropStatus {
        self.run(store).into()
    }
}

/// `j ∈ dom(S_i) ⇔ i ∈ dom(P_j)`.
#[derive(Debug, Clone)]
pub struct InverseChannel {
    n: usize,
    scope: Vec<VarId>,
}

impl InverseChannel {
    pub fn new(model: &CircuitModel) -> Self {
        let mut scope = model.succ_vars();
        scope.extend(model.pred_vars());
        Self {
            n: model.n(),
            scope,
        }
    }

    fn run(&self, store: &mut Store) -> Result<PropStatus, Wipeout> {
        let n = self.n;
        let (s, p) = self.scope.split_at(n);
        for (from, to) in [(s, p), (p, s)] {
            for i in 0..n {
                let drop: Vec<i64> = store
                    .domain(from[i])
                    .values()
                    .filter(|&j| !store.contains(to[j as usize], i as i64))
                    .collect();
                for j in drop {
                    store.remove(from[i], j)?;
                }
            }
        }
        if s.iter().all(|&x| store.is_assigned(x)) {
            Ok(PropStatus::Subsumed)
        } else {
            Ok(PropStatus::AtFixpoint)
        }
    }
}

impl Propagator for InverseChannel {
    fn name(&self) -> &str {
        "inverse"
    }

    fn scope(&self) -> &[VarId] {
        &self.scope
    }

    fn propagate(&self, store: &mut Store) -> PropStatus {
        self.run(store).into()
    }
}
