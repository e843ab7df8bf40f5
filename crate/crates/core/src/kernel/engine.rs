//! Fixpoint computation.
//!
//! Two FIFO queues (normal and low priority). A propagator is queued at
//! most once; it is re-queued when it reports [`PropStatus::NotAtFixpoint`]
//! or when another propagator modifies a variable in its scope. Subsumed
//! propagators are switched off for the rest of the subtree, which is why
//! the subsumption flags live in the [`Space`] and are copied with it.

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;

use super::propagator::{Priority, PropRef, PropStatus};
use super::store::{Store, VarId};

/// An indexed set of propagators with a variable → watcher map.
#[derive(Debug, Clone)]
pub struct PropagatorSet {
    props: Vec<PropRef>,
    watchers: Vec<Vec<usize>>,
}

impl PropagatorSet {
    pub fn new(num_vars: usize, props: Vec<PropRef>) -> Self {
        let mut watchers = vec![Vec::new(); num_vars];
        for (k, p) in props.iter().enumerate() {
            for x in p.scope() {
                let w: &mut Vec<usize> = &mut watchers[x.index()];
                if w.last() != Some(&k) {
                    w.push(k);
                }
            }
        }
        Self { props, watchers }
    }

    pub fn len(&self) -> usize {
        self.props.len()
    }

    pub fn is_empty(&self) -> bool {
        self.props.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PropRef> {
        self.props.iter()
    }

    pub fn any_half_checking(&self) -> bool {
        self.props.iter().any(|p| p.half_checking())
    }

    fn watchers(&self, x: VarId) -> &[usize] {
        self.watchers.get(x.index()).map_or(&[], Vec::as_slice)
    }
}

/// A store plus the per-node propagator bookkeeping that must be copied
/// along with it.
#[derive(Debug, Clone)]
pub struct Space {
    pub store: Store,
    subsumed: FixedBitSet,
}

impl Space {
    pub fn new(store: Store, props: &PropagatorSet) -> Self {
        Self {
            store,
            subsumed: FixedBitSet::with_capacity(props.len()),
        }
    }

    pub fn is_subsumed(&self, k: usize) -> bool {
        self.subsumed.contains(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixpoint {
    Failed,
    Stable,
}

/// Which propagators to schedule initially.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    /// Every non-subsumed propagator (root nodes, restarts).
    All,
    /// Only the watchers of variables touched since the last fixpoint.
    Touched,
}

/// Counters collected while propagating.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct PropagationStats {
    pub steps: u64,
}

struct Queues {
    normal: VecDeque<usize>,
    low: VecDeque<usize>,
    queued: FixedBitSet,
}

impl Queues {
    fn new(n: usize) -> Self {
        Self {
            normal: VecDeque::new(),
            low: VecDeque::new(),
            queued: FixedBitSet::with_capacity(n),
        }
    }

    fn push(&mut self, k: usize, prio: Priority) {
        if self.queued.contains(k) {
            return;
        }
        self.queued.insert(k);
        match prio {
            Priority::Normal => self.normal.push_back(k),
            Priority::Low => self.low.push_back(k),
        }
    }

    fn pop(&mut self) -> Option<usize> {
        let k = self.normal.pop_front().or_else(|| self.low.pop_front())?;
        self.queued.set(k, false);
        Some(k)
    }
}

/// Run the propagators in `props` to a common fixpoint on `space`.
///
/// In debug builds every step is checked to be contracting and local.
pub fn propagate(
    space: &mut Space,
    props: &PropagatorSet,
    schedule: Schedule,
    stats: &mut PropagationStats,
) -> Fixpoint {
    if space.store.is_failed() {
        return Fixpoint::Failed;
    }
    let mut queues = Queues::new(props.len());
    match schedule {
        Schedule::All => {
            space.store.take_touched();
            for (k, p) in props.props.iter().enumerate() {
                if !space.is_subsumed(k) {
                    queues.push(k, p.priority());
                }
            }
        }
        Schedule::Touched => {
            for x in space.store.take_touched() {
                for &k in props.watchers(x) {
                    if !space.is_subsumed(k) {
                        queues.push(k, props.props[k].priority());
                    }
                }
            }
        }
    }

    while let Some(k) = queues.pop() {
        let prop = &props.props[k];
        #[cfg(debug_assertions)]
        let before = space.store.clone();

        let mut status = prop.propagate(&mut space.store);
        stats.steps += 1;
        if space.store.is_failed() {
            status = PropStatus::Failed;
        }
        let touched = space.store.take_touched();

        #[cfg(debug_assertions)]
        check_step(prop.as_ref(), &before, &space.store, &touched);

        match status {
            PropStatus::Failed => {
                space.store.fail();
                return Fixpoint::Failed;
            }
            PropStatus::Subsumed => {
                space.subsumed.insert(k);
            }
            PropStatus::NotAtFixpoint => queues.push(k, prop.priority()),
            PropStatus::AtFixpoint => {}
        }
        for x in touched {
            for &w in props.watchers(x) {
                if w != k && !space.is_subsumed(w) {
                    queues.push(w, props.props[w].priority());
                }
            }
        }
    }
    Fixpoint::Stable
}

#[cfg(debug_assertions)]
fn check_step(
    prop: &dyn super::propagator::Propagator,
    before: &Store,
    after: &Store,
    touched: &[VarId],
) {
    assert!(
        after.is_subset(before),
        "propagator {} is not contracting",
        prop.name()
    );
    if after.is_failed() {
        return;
    }
    for x in touched {
        assert!(
            prop.scope().contains(x),
            "propagator {} modified {x} outside its scope",
            prop.name()
        );
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::kernel::propagator::{EqualPropagator, FailPropagator};
    use crate::kernel::store::Domain;

    fn two_vars() -> (Store, VarId, VarId) {
        let mut s = Store::new();
        let x = s.add_var(Domain::set_of(4, [1, 2]));
        let y = s.add_var(Domain::set_of(4, [2, 3]));
        (s, x, y)
    }

    #[test]
    fn fail_propagator_fails_everything() {
        let (s, _, _) = two_vars();
        let props = PropagatorSet::new(2, vec![Arc::new(FailPropagator::new())]);
        let mut space = Space::new(s, &props);
        let r = propagate(&mut space, &props, Schedule::All, &mut Default::default());
        assert_eq!(r, Fixpoint::Failed);
        assert!(space.store.is_failed());
    }

    #[test]
    fn empty_set_is_identity() {
        let (s, _, _) = two_vars();
        let props = PropagatorSet::new(2, vec![]);
        let mut space = Space::new(s.clone(), &props);
        let r = propagate(&mut space, &props, Schedule::All, &mut Default::default());
        assert_eq!(r, Fixpoint::Stable);
        assert_eq!(space.store, s);
    }

    #[test]
    fn equality_keeps_supported_values() {
        let (s, x, y) = two_vars();
        // Supported values by enumeration: only (2,2) satisfies x = y.
        let support: Vec<(i64, i64)> = s
            .domain(x)
            .values()
            .flat_map(|a| s.domain(y).values().map(move |b| (a, b)))
            .filter(|(a, b)| a == b)
            .collect();
        assert_eq!(support, vec![(2, 2)]);

        let props = PropagatorSet::new(2, vec![Arc::new(EqualPropagator::new(x, y))]);
        let mut space = Space::new(s, &props);
        let r = propagate(&mut space, &props, Schedule::All, &mut Default::default());
        assert_eq!(r, Fixpoint::Stable);
        assert_eq!(space.store.value(x), Some(2));
        assert_eq!(space.store.value(y), Some(2));
        assert!(space.is_subsumed(0));
    }

    #[test]
    fn chained_equalities_wake_each_other() {
        let mut s = Store::new();
        let a = s.add_var(Domain::set_of(8, [1, 2, 3]));
        let b = s.add_var(Domain::set_of(8, [1, 2, 3, 4]));
        let c = s.add_var(Domain::set_of(8, [3, 4]));
        let props = PropagatorSet::new(
            3,
            vec![
                Arc::new(EqualPropagator::new(a, b)),
                Arc::new(EqualPropagator::new(b, c)),
            ],
        );
        let mut space = Space::new(s, &props);
        propagate(&mut space, &props, Schedule::All, &mut Default::default());
        for x in [a, b, c] {
            assert_eq!(space.store.value(x), Some(3));
        }
    }

    #[derive(Debug)]
    struct Rogue(Vec<VarId>);

    impl crate::kernel::propagator::Propagator for Rogue {
        fn name(&self) -> &str {
            "rogue"
        }
        fn scope(&self) -> &[VarId] {
            &self.0
        }
        fn propagate(&self, store: &mut Store) -> PropStatus {
            let _ = store.remove(VarId(1), 2);
            PropStatus::AtFixpoint
        }
    }

    #[test]
    #[cfg(debug_assertions)]
    #[should_panic(expected = "outside its scope")]
    fn locality_violation_is_caught() {
        let (s, x, _) = two_vars();
        let props = PropagatorSet::new(2, vec![Arc::new(Rogue(vec![x]))]);
        let mut space = Space::new(s, &props);
        propagate(&mut space, &props, Schedule::All, &mut Default::default());
    }
}
