//! The propagator contract.
//!
//! A propagator only ever removes values (contracting) and only from the
//! variables in its declared scope (local). Propagators that are not
//! half-checking must also be checking and weakly monotonic; half-checking
//! ones only promise that a fully assigned store they accept satisfies
//! their constraint.

use std::fmt;
use std::sync::Arc;

use super::store::{Store, VarId, Wipeout};

/// Outcome of a single propagator step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropStatus {
    Failed,
    /// The propagator has nothing more to do until one of its variables changes.
    AtFixpoint,
    /// The propagator must be run again.
    NotAtFixpoint,
    /// Every assignment in the current store satisfies the constraint.
    Subsumed,
}

impl From<Result<PropStatus, Wipeout>> for PropStatus {
    fn from(r: Result<PropStatus, Wipeout>) -> Self {
        r.unwrap_or(PropStatus::Failed)
    }
}

/// Scheduling class. Low-priority propagators only run once the normal
/// queue is empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Priority {
    Normal,
    Low,
}

pub trait Propagator: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    /// The variables this propagator may read and modify.
    fn scope(&self) -> &[VarId];

    fn half_checking(&self) -> bool {
        false
    }

    fn priority(&self) -> Priority {
        Priority::Normal
    }

    fn propagate(&self, store: &mut Store) -> PropStatus;
}

pub type PropRef = Arc<dyn Propagator>;

/// `λd.⊥`: fails every store. Half-checking for every constraint, since it
/// has no fixpoint at all.
#[derive(Debug, Default, Clone)]
pub struct FailPropagator {
    scope: Vec<VarId>,
}

impl FailPropagator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn over(scope: Vec<VarId>) -> Self {
        Self { scope }
    }
}

impl Propagator for FailPropagator {
    fn name(&self) -> &str {
        "fail"
    }

    fn scope(&self) -> &[VarId] {
        &self.scope
    }

    fn half_checking(&self) -> bool {
        true
    }

    fn propagate(&self, store: &mut Store) -> PropStatus {
        store.fail();
        PropStatus::Failed
    }
}

/// Domain-consistent `x = y`.
#[derive(Debug, Clone)]
pub struct EqualPropagator {
    scope: [VarId; 2],
}

impl EqualPropagator {
    pub fn new(x: VarId, y: VarId) -> Self {
        Self { scope: [x, y] }
    }
}

impl Propagator for EqualPropagator {
    fn name(&self) -> &str {
        "eq"
    }

    fn scope(&self) -> &[VarId] {
        &self.scope
    }

    fn propagate(&self, store: &mut Store) -> PropStatus {
        let [x, y] = self.scope;
        let run = |store: &mut Store| -> Result<PropStatus, Wipeout> {
            let dx: Vec<i64> = store.domain(x).values().collect();
            for v in dx {
                if !store.contains(y, v) {
                    store.remove(x, v)?;
                }
            }
            let dy: Vec<i64> = store.domain(y).values().collect();
            for v in dy {
                if !store.contains(x, v) {
                    store.remove(y, v)?;
                }
            }
            if store.is_assigned(x) {
                Ok(PropStatus::Subsumed)
            } else {
                Ok(PropStatus::AtFixpoint)
            }
        };
        run(store).into()
    }
}
