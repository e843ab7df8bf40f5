//! Finite-domain store.
//!
//! A [`Store`] maps every variable to a [`Domain`]. As soon as one domain
//! becomes empty the whole store is failed, and all failed stores compare
//! equal: there is a single failed sentinel, no matter which variable was
//! wiped out.

use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

/// Identifier of a variable in a [`Store`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub usize);

impl VarId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// Marker returned by store mutations that emptied a domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Wipeout;

/// Result of a store mutation: `Ok(true)` when something was removed.
pub type ModResult = Result<bool, Wipeout>;

/// The set of values a variable may still take.
///
/// Successor-style variables range over a small set of node ids and use
/// an explicit bit set. Cost variables range over large sums and only keep
/// their bounds; removing an interior value from an interval is a no-op.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domain {
    Set(FixedBitSet),
    Interval { lo: i64, hi: i64 },
}

impl Domain {
    /// A set domain holding exactly `values`; `capacity` bounds the largest value.
    pub fn set_of(capacity: usize, values: impl IntoIterator<Item = usize>) -> Self {
        let mut bits = FixedBitSet::with_capacity(capacity);
        for v in values {
            bits.insert(v);
        }
        Domain::Set(bits)
    }

    pub fn interval(lo: i64, hi: i64) -> Self {
        Domain::Interval { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Domain::Set(bits) => bits.is_clear(),
            Domain::Interval { lo, hi } => lo > hi,
        }
    }

    pub fn size(&self) -> u64 {
        match self {
            Domain::Set(bits) => bits.count_ones(..) as u64,
            Domain::Interval { lo, hi } => {
                if lo > hi {
                    0
                } else {
                    (hi - lo) as u64 + 1
                }
            }
        }
    }

    pub fn contains(&self, v: i64) -> bool {
        match self {
            Domain::Set(bits) => v >= 0 && (v as usize) < bits.len() && bits.contains(v as usize),
            Domain::Interval { lo, hi } => *lo <= v && v <= *hi,
        }
    }

    pub fn min(&self) -> Option<i64> {
        match self {
            Domain::Set(bits) => bits.minimum().map(|v| v as i64),
            Domain::Interval { lo, hi } => (lo <= hi).then_some(*lo),
        }
    }

    pub fn max(&self) -> Option<i64> {
        match self {
            Domain::Set(bits) => bits.maximum().map(|v| v as i64),
            Domain::Interval { lo, hi } => (lo <= hi).then_some(*hi),
        }
    }

    pub fn is_assigned(&self) -> bool {
        self.size() == 1
    }

    /// The single value of an assigned domain.
    pub fn value(&self) -> Option<i64> {
        if self.is_assigned() {
            self.min()
        } else {
            None
        }
    }

    /// Values in ascending order.
    pub fn values(&self) -> Box<dyn Iterator<Item = i64> + '_> {
        match self {
            Domain::Set(bits) => Box::new(bits.ones().map(|v| v as i64)),
            Domain::Interval { lo, hi } => Box::new(*lo..=*hi),
        }
    }

    /// `self ⊆ other`, comparing value sets.
    pub fn is_subset(&self, other: &Domain) -> bool {
        if self.is_empty() {
            return true;
        }
        match (self, other) {
            (Domain::Set(a), Domain::Set(b)) => a.is_subset(b),
            (_, Domain::Interval { lo, hi }) => {
                *lo <= self.min().unwrap_or(i64::MAX) && self.max().unwrap_or(i64::MIN) <= *hi
            }
            (Domain::Interval { .. }, Domain::Set(_)) => self.values().all(|v| other.contains(v)),
        }
    }

    fn remove(&mut self, v: i64) -> bool {
        match self {
            Domain::Set(bits) => {
                if v >= 0 && (v as usize) < bits.len() && bits.contains(v as usize) {
                    bits.set(v as usize, false);
                    true
                } else {
                    false
                }
            }
            Domain::Interval { lo, hi } => {
                if *lo > *hi {
                    false
                } else if v == *lo {
                    *lo += 1;
                    true
                } else if v == *hi {
                    *hi -= 1;
                    true
                } else {
                    false
                }
            }
        }
    }

    fn restrict_to(&mut self, v: i64) -> bool {
        if !self.contains(v) {
            let changed = !self.is_empty();
            match self {
                Domain::Set(bits) => bits.clear(),
                Domain::Interval { lo, hi } => {
                    *lo = 1;
                    *hi = 0;
                }
            }
            return changed;
        }
        if self.is_assigned() {
            return false;
        }
        match self {
            Domain::Set(bits) => {
                bits.clear();
                bits.insert(v as usize);
            }
            Domain::Interval { lo, hi } => {
                *lo = v;
                *hi = v;
            }
        }
        true
    }

    fn raise_min(&mut self, bound: i64) -> bool {
        match self {
            Domain::Set(bits) => {
                let mut changed = false;
                let cut = bound.clamp(0, bits.len() as i64) as usize;
                if bits.count_ones(..cut) > 0 {
                    bits.set_range(..cut, false);
                    changed = true;
                }
                changed
            }
            Domain::Interval { lo, .. } => {
                if bound > *lo {
                    *lo = bound;
                    true
                } else {
                    false
                }
            }
        }
    }

    fn lower_max(&mut self, bound: i64) -> bool {
        match self {
            Domain::Set(bits) => {
                let from = (bound + 1).clamp(0, bits.len() as i64) as usize;
                if bits.count_ones(from..) > 0 {
                    bits.set_range(from.., false);
                    true
                } else {
                    false
                }
            }
            Domain::Interval { hi, .. } => {
                if bound < *hi {
                    *hi = bound;
                    true
                } else {
                    false
                }
            }
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Set(bits) => {
                write!(f, "{{")?;
                for (k, v) in bits.ones().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "}}")
            }
            Domain::Interval { lo, hi } => write!(f, "[{lo}..{hi}]"),
        }
    }
}

/// The domain map together with the failure flag.
///
/// Every mutation records the touched variable so the fixpoint engine can
/// wake up the propagators watching it and verify locality.
#[derive(Debug, Clone, Default)]
pub struct Store {
    domains: Vec<Domain>,
    failed: bool,
    touched: Vec<VarId>,
    touched_mark: FixedBitSet,
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, domain: Domain) -> VarId {
        let id = VarId(self.domains.len());
        if domain.is_empty() {
            self.failed = true;
        }
        self.domains.push(domain);
        self.touched_mark.grow(self.domains.len());
        id
    }

    pub fn num_vars(&self) -> usize {
        self.domains.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> {
        (0..self.domains.len()).map(VarId)
    }

    pub fn is_failed(&self) -> bool {
        self.failed
    }

    /// Turn this store into the failed sentinel.
    pub fn fail(&mut self) {
        self.failed = true;
    }

    pub fn domain(&self, x: VarId) -> &Domain {
        &self.domains[x.0]
    }

    pub fn contains(&self, x: VarId, v: i64) -> bool {
        !self.failed && self.domains[x.0].contains(v)
    }

    pub fn size(&self, x: VarId) -> u64 {
        if self.failed {
            0
        } else {
            self.domains[x.0].size()
        }
    }

    pub fn min(&self, x: VarId) -> i64 {
        self.domains[x.0].min().unwrap_or(i64::MAX)
    }

    pub fn max(&self, x: VarId) -> i64 {
        self.domains[x.0].max().unwrap_or(i64::MIN)
    }

    pub fn is_assigned(&self, x: VarId) -> bool {
        !self.failed && self.domains[x.0].is_assigned()
    }

    pub fn value(&self, x: VarId) -> Option<i64> {
        if self.failed {
            None
        } else {
            self.domains[x.0].value()
        }
    }

    pub fn all_assigned(&self) -> bool {
        !self.failed && self.domains.iter().all(Domain::is_assigned)
    }

    /// The full assignment, if every variable is assigned.
    pub fn assignment(&self) -> Option<Vec<i64>> {
        if self.failed {
            return None;
        }
        self.domains.iter().map(Domain::value).collect()
    }

    /// Remove `v` from the domain of `x`.
    pub fn remove(&mut self, x: VarId, v: i64) -> ModResult {
        self.modify(x, |d| d.remove(v))
    }

    /// Restrict the domain of `x` to `{v}`; fails when `v` is absent.
    pub fn assign(&mut self, x: VarId, v: i64) -> ModResult {
        self.modify(x, |d| d.restrict_to(v))
    }

    pub fn set_min(&mut self, x: VarId, bound: i64) -> ModResult {
        self.modify(x, |d| d.raise_min(bound))
    }

    pub fn set_max(&mut self, x: VarId, bound: i64) -> ModResult {
        self.modify(x, |d| d.lower_max(bound))
    }

    fn modify(&mut self, x: VarId, op: impl FnOnce(&mut Domain) -> bool) -> ModResult {
        if self.failed {
            return Err(Wipeout);
        }
        let dom = &mut self.domains[x.0];
        let changed = op(dom);
        if changed {
            if !self.touched_mark.contains(x.0) {
                self.touched_mark.insert(x.0);
                self.touched.push(x);
            }
            if dom.is_empty() {
                self.failed = true;
                return Err(Wipeout);
            }
        }
        Ok(changed)
    }

    /// Variables modified since the last call, in first-touch order.
    pub fn take_touched(&mut self) -> Vec<VarId> {
        for x in &self.touched {
            self.touched_mark.set(x.0, false);
        }
        std::mem::take(&mut self.touched)
    }

    /// Pointwise `self ⊆ other`. The failed store is below everything.
    pub fn is_subset(&self, other: &Store) -> bool {
        if self.failed {
            return true;
        }
        if other.failed || self.domains.len() != other.domains.len() {
            return false;
        }
        self.domains
            .iter()
            .zip(&other.domains)
            .all(|(a, b)| a.is_subset(b))
    }

    /// Sum of domain sizes over `vars`.
    pub fn total_size(&self, vars: impl IntoIterator<Item = VarId>) -> u64 {
        vars.into_iter().map(|x| self.size(x)).sum()
    }
}

impl PartialEq for Store {
    fn eq(&self, other: &Self) -> bool {
        match (self.failed, other.failed) {
            (true, true) => true,
            (false, false) => self.domains == other.domains,
            _ => false,
        }
    }
}

impl Eq for Store {}

impl fmt::Display for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.failed {
            return write!(f, "⊥");
        }
        for (i, d) in self.domains.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "x{i}={d}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_var(values: &[usize]) -> (Store, VarId) {
        let mut s = Store::new();
        let x = s.add_var(Domain::set_of(8, values.iter().copied()));
        (s, x)
    }

    #[test]
    fn remove_middle_value() {
        let (mut s, x) = one_var(&[1, 2, 3]);
        assert_eq!(s.remove(x, 2), Ok(true));
        assert_eq!(s.domain(x).values().collect::<Vec<_>>(), vec![1, 3]);
        assert!(!s.is_failed());
    }

    #[test]
    fn remove_last_value_fails() {
        let (mut s, x) = one_var(&[1]);
        assert_eq!(s.remove(x, 1), Err(Wipeout));
        assert!(s.is_failed());
    }

    #[test]
    fn remove_absent_value_is_noop() {
        let (mut s, x) = one_var(&[1, 3]);
        let before = s.clone();
        assert_eq!(s.remove(x, 2), Ok(false));
        assert_eq!(s, before);
        assert!(s.take_touched().is_empty());
    }

    #[test]
    fn assign_cases() {
        let (mut s, x) = one_var(&[1, 2, 3]);
        assert_eq!(s.assign(x, 2), Ok(true));
        assert_eq!(s.value(x), Some(2));
        assert_eq!(s.assign(x, 2), Ok(false));

        let (mut s, x) = one_var(&[1, 3]);
        assert_eq!(s.assign(x, 2), Err(Wipeout));
        assert!(s.is_failed());
    }

    #[test]
    fn failed_stores_are_equal() {
        let mut a = Store::new();
        let x = a.add_var(Domain::set_of(4, [0, 1]));
        a.add_var(Domain::interval(0, 10));
        let mut b = a.clone();
        let y = VarId(1);
        let _ = a.assign(x, 3);
        let _ = b.set_max(y, -1);
        assert!(a.is_failed() && b.is_failed());
        assert_eq!(a, b);
        assert!(a.is_subset(&Store::new()));
    }

    #[test]
    fn interval_bounds() {
        let mut s = Store::new();
        let c = s.add_var(Domain::interval(0, 10));
        assert_eq!(s.remove(c, 5), Ok(false));
        assert_eq!(s.remove(c, 0), Ok(true));
        assert_eq!(s.min(c), 1);
        assert_eq!(s.set_max(c, 4), Ok(true));
        assert_eq!(s.set_min(c, 4), Ok(true));
        assert_eq!(s.value(c), Some(4));
        assert_eq!(s.set_min(c, 5), Err(Wipeout));
    }

    #[test]
    fn set_bounds_on_bitset() {
        let (mut s, x) = one_var(&[0, 2, 4, 6]);
        assert_eq!(s.set_min(x, 1), Ok(true));
        assert_eq!(s.set_max(x, 4), Ok(true));
        assert_eq!(s.domain(x).values().collect::<Vec<_>>(), vec![2, 4]);
        assert_eq!(s.set_max(x, 100), Ok(false));
    }

    #[test]
    fn touched_is_deduplicated() {
        let (mut s, x) = one_var(&[1, 2, 3, 4]);
        s.remove(x, 1).unwrap();
        s.remove(x, 2).unwrap();
        assert_eq!(s.take_touched(), vec![x]);
        assert!(s.take_touched().is_empty());
    }
}
