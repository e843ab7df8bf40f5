use std::sync::Arc;

use log::debug;

use super::HalfCheckError;
use crate::circuit::CircuitModel;
use crate::geometry::{segments_cross, Segment, SpatialIndex};
use crate::kernel::{PropStatus, Propagator, Store, VarId, Wipeout};
use crate::tsplib::TspInstance;

/// Largest instance for which the crossing table is built by default.
pub const DEFAULT_NCL_NODE_CAP: usize = 130;

/// `cl(e)` for every undirected edge `e`: the edges whose segments
/// properly cross it.
#[derive(Debug, Clone)]
pub struct ClTable {
    n: usize,
    cl: Vec<Vec<u32>>,
}

impl ClTable {
    pub fn n(&self) -> usize {
        self.n
    }

    /// The crossing edges of `{i, j}` as `(k, l)` with `k < l`.
    pub fn crossing(&self, i: usize, j: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (u, v) = (i.min(j), i.max(j));
        self.cl[u * self.n + v]
            .iter()
            .map(move |&id| (id as usize / self.n, id as usize % self.n))
    }

    /// Number of (ordered) crossing pairs stored.
    pub fn total_entries(&self) -> usize {
        self.cl.iter().map(Vec::len).sum()
    }
}

pub fn ncl_precompute(inst: &TspInstance, node_cap: usize) -> Result<ClTable, HalfCheckError> {
    let n = inst.n();
    if n > node_cap {
        return Err(HalfCheckError::NclTooLarge { n, cap: node_cap });
    }
    let segment = |u: usize, v: usize| Segment::new(inst.point(u), inst.point(v), (u, v));
    let mut segments = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            segments.push(segment(u, v));
        }
    }
    let index = SpatialIndex::build(segments.clone());
    let mut cl = vec![Vec::new(); n * n];
    for s in &segments {
        let (u, v) = s.id;
        cl[u * n + v] = index
            .query_crossing(s)
            .into_iter()
            .map(|(k, l)| (k * n + l) as u32)
            .collect();
    }
    let table = ClTable { n, cl };
    debug!(
        "crossing table for {} nodes: {} entries",
        n,
        table.total_entries()
    );
    Ok(table)
}

fn scope_of(model: &CircuitModel) -> Vec<VarId> {
    let mut scope = model.succ_vars();
    scope.push(model.cost());
    scope
}

/// No crossing lines: once `S_i = j`, no edge crossing `{i, j}` may be used.
#[derive(Debug, Clone)]
pub struct Ncl {
    model: CircuitModel,
    table: Arc<ClTable>,
    scope: Vec<VarId>,
}

impl Ncl {
    pub fn new(model: &CircuitModel, table: Arc<ClTable>) -> Self {
        assert_eq!(
            table.n(),
            model.n(),
            "crossing table built for another instance"
        );
        Self {
            model: model.clone(),
            table,
            scope: scope_of(model),
        }
    }

    fn run(&self, store: &mut Store) -> Result<PropStatus, Wipeout> {
        let n = self.model.n();
        let mut done = vec![false; n];
        loop {
            let mut progress = false;
            for i in 0..n {
                if done[i] {
                    continue;
                }
                let Some(j) = store.value(self.model.succ(i)) else {
                    continue;
                };
                done[i] = true;
                progress = true;
                for (k, l) in self.table.crossing(i, j as usize) {
                    store.remove(self.model.succ(k), l as i64)?;
                    store.remove(self.model.succ(l), k as i64)?;
                }
            }
            if !progress {
                break;
            }
        }
        if self.model.close_full_assignment(store)? {
            return Ok(PropStatus::Subsumed);
        }
        Ok(PropStatus::AtFixpoint)
    }
}

impl Propagator for Ncl {
    fn name(&self) -> &str {
        "ncl"
    }

    fn scope(&self) -> &[VarId] {
        &self.scope
    }

    fn half_checking(&self) -> bool {
        true
    }

    fn propagate(&self, store: &mut Store) -> PropStatus {
        self.run(store).into()
    }
}

/// No crossing lines along the Warnsdorff path from `start`: the end of the
/// fixed path may not continue with an edge crossing the path.
#[derive(Debug, Clone)]
pub struct Wncl {
    model: CircuitModel,
    start: usize,
    scope: Vec<VarId>,
}

impl Wncl {
    pub fn new(model: &CircuitModel, start: usize) -> Self {
        assert!(start < model.n(), "start node out of range");
        Self {
            model: model.clone(),
            start,
            scope: scope_of(model),
        }
    }

    /// The fixed path from `start`, ending at the first node whose successor
    /// is unassigned. `None` when the path closes on itself.
    pub fn path(&self, store: &Store) -> Option<Vec<usize>> {
        let n = self.model.n();
        let mut on_path = vec![false; n];
        let mut path = vec![self.start];
        on_path[self.start] = true;
        let mut cur = self.start;
        while let Some(next) = store.value(self.model.succ(cur)) {
            let next = next as usize;
            if on_path[next] {
                return None;
            }
            on_path[next] = true;
            path.push(next);
            cur = next;
        }
        Some(path)
    }

    fn run(&self, store: &mut Store) -> Result<PropStatus, Wipeout> {
        let inst = self.model.instance();
        while let Some(path) = self.path(store) {
            if path.len() < 3 {
                break;
            }
            let last = *path.last().unwrap();
            let x = self.model.succ(last);
            let fixed: Vec<Segment> = path
                .windows(2)
                .map(|w| Segment::new(inst.point(w[0]), inst.point(w[1]), (w[0], w[1])))
                .collect();
            let drop: Vec<i64> = store
                .domain(x)
                .values()
                .filter(|&v| {
                    let cand =
                        Segment::new(inst.point(last), inst.point(v as usize), (last, v as usize));
                    fixed.iter().any(|s| segments_cross(&cand, s))
                })
                .collect();
            for v in drop {
                store.remove(x, v)?;
            }
            if !store.is_assigned(x) {
                break;
            }
        }
        if self.model.close_full_assignment(store)? {
            return Ok(PropStatus::Subsumed);
        }
        Ok(PropStatus::AtFixpoint)
    }
}

impl Propagator for Wncl {
    fn name(&self) -> &str {
        "wncl"
    }

    fn scope(&self) -> &[VarId] {
        &self.scope
    }

    fn half_checking(&self) -> bool {
        true
    }

    fn propagate(&self, store: &mut Store) -> PropStatus {
        self.run(store).into()
    }
}
