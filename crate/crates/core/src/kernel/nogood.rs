//! No-goods built from branching decisions.
//!
//! A no-good recorded by an asset that runs half-checking propagators (or
//! any other incomplete search) only describes the part of the tree that
//! asset explored under its own, possibly solution-removing, propagation.
//! Such no-goods carry `origin_incomplete = true` and must never be
//! installed in a complete asset.

use serde::{Deserialize, Serialize};

use super::propagator::{PropStatus, Propagator};
use super::store::{Store, VarId, Wipeout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Assign,
    Exclude,
}

/// One branching decision: `var = value` or `var ≠ value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Decision {
    pub var: VarId,
    pub value: i64,
    pub polarity: Polarity,
}

impl Decision {
    pub fn assign(var: VarId, value: i64) -> Self {
        Self {
            var,
            value,
            polarity: Polarity::Assign,
        }
    }

    pub fn exclude(var: VarId, value: i64) -> Self {
        Self {
            var,
            value,
            polarity: Polarity::Exclude,
        }
    }

    pub fn apply(&self, store: &mut Store) -> Result<bool, Wipeout> {
        match self.polarity {
            Polarity::Assign => store.assign(self.var, self.value),
            Polarity::Exclude => store.remove(self.var, self.value),
        }
    }

    pub fn negated(&self) -> Self {
        let polarity = match self.polarity {
            Polarity::Assign => Polarity::Exclude,
            Polarity::Exclude => Polarity::Assign,
        };
        Self { polarity, ..*self }
    }

    fn entailed(&self, store: &Store) -> bool {
        match self.polarity {
            Polarity::Assign => store.value(self.var) == Some(self.value),
            Polarity::Exclude => !store.contains(self.var, self.value),
        }
    }

    fn disentailed(&self, store: &Store) -> bool {
        self.negated().entailed(store)
    }
}

/// The conjunction of `decisions` must not hold.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NoGood {
    pub decisions: Vec<Decision>,
    pub origin_incomplete: bool,
}

/// The standard prefix no-goods of a search path at restart.
///
/// For every right (exclude) decision at position `i`, the left subtree
/// `positives(path[..i]) ∧ ¬path[i]` has been fully explored, so its
/// conjunction is a no-good.
pub fn extract_nogoods(path: &[Decision], origin_complete: bool) -> Vec<NoGood> {
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    for d in path {
        match d.polarity {
            Polarity::Assign => prefix.push(*d),
            Polarity::Exclude => {
                let mut decisions = prefix.clone();
                decisions.push(d.negated());
                out.push(NoGood {
                    decisions,
                    origin_incomplete: !origin_complete,
                });
            }
        }
    }
    out
}

/// Propagates a fixed batch of no-goods.
#[derive(Debug, Clone)]
pub struct NoGoodPropagator {
    nogoods: Vec<NoGood>,
    scope: Vec<VarId>,
}

impl NoGoodPropagator {
    pub fn new(nogoods: Vec<NoGood>) -> Self {
        let mut scope: Vec<VarId> = nogoods
            .iter()
            .flat_map(|ng| ng.decisions.iter().map(|d| d.var))
            .collect();
        scope.sort_unstable();
        scope.dedup();
        Self { nogoods, scope }
    }

    pub fn len(&self) -> usize {
        self.nogoods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nogoods.is_empty()
    }

    fn run(&self, store: &mut Store) -> Result<PropStatus, Wipeout> {
        let mut changed = true;
        while changed {
            changed = false;
            for ng in &self.nogoods {
                if ng.decisions.iter().any(|d| d.disentailed(store)) {
                    continue;
                }
                let mut open = ng.decisions.iter().filter(|d| !d.entailed(store));
                match (open.next(), open.next()) {
                    (None, _) => {
                        store.fail();
                        return Err(Wipeout);
                    }
                    (Some(last), None) if last.negated().apply(store)? => {
                        changed = true;
                    }
                    _ => {}
                }
            }
        }
        Ok(PropStatus::AtFixpoint)
    }
}

impl Propagator for NoGoodPropagator {
    fn name(&self) -> &str {
        "nogoods"
    }

    fn scope(&self) -> &[VarId] {
        &self.scope
    }

    fn propagate(&self, store: &mut Store) -> PropStatus {
        self.run(store).into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::store::Domain;

    #[test]
    fn empty_path_gives_nothing() {
        assert!(extract_nogoods(&[], true).is_empty());
    }

    #[test]
    fn refuted_single_decision() {
        let x = VarId(0);
        let path = [Decision::exclude(x, 3)];
        let ngs = extract_nogoods(&path, true);
        assert_eq!(ngs.len(), 1);
        assert_eq!(ngs[0].decisions, vec![Decision::assign(x, 3)]);
        assert!(!ngs[0].origin_incomplete);
    }

    #[test]
    fn prefix_nogoods_use_left_decisions_only() {
        let (x, y, z) = (VarId(0), VarId(1), VarId(2));
        let path = [
            Decision::assign(x, 1),
            Decision::exclude(y, 2),
            Decision::assign(y, 3),
            Decision::exclude(z, 0),
        ];
        let ngs = extract_nogoods(&path, false);
        assert_eq!(ngs.len(), 2);
        assert_eq!(
            ngs[0].decisions,
            vec![Decision::assign(x, 1), Decision::assign(y, 2)]
        );
        assert_eq!(
            ngs[1].decisions,
            vec![
                Decision::assign(x, 1),
                Decision::assign(y, 3),
                Decision::assign(z, 0)
            ]
        );
        assert!(ngs.iter().all(|n| n.origin_incomplete));
    }

    #[test]
    fn unit_nogood_prunes_last_literal() {
        let mut s = Store::new();
        let x = s.add_var(Domain::set_of(4, [0, 1, 2]));
        let y = s.add_var(Domain::set_of(4, [0, 1, 2]));
        s.assign(x, 1).unwrap();
        let p = NoGoodPropagator::new(vec![NoGood {
            decisions: vec![Decision::assign(x, 1), Decision::assign(y, 2)],
            origin_incomplete: false,
        }]);
        assert_eq!(p.propagate(&mut s), PropStatus::AtFixpoint);
        assert!(!s.contains(y, 2));
    }

    #[test]
    fn entailed_nogood_fails() {
        let mut s = Store::new();
        let x = s.add_var(Domain::set_of(4, [3]));
        let p = NoGoodPropagator::new(vec![NoGood {
            decisions: vec![Decision::assign(x, 3)],
            origin_incomplete: false,
        }]);
        assert_eq!(p.propagate(&mut s), PropStatus::Failed);
    }
}
