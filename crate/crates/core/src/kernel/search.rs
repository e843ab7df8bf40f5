//! Restarting depth-first search over copied stores.
//!
//! Every branch point keeps a full copy of its propagated space; nothing is
//! recomputed. Half-checking propagators are not weakly monotonic, so
//! replaying decisions could reach a different store than the one that was
//! branched on.
//!
//! The search is resumable: [`AssetSearch::step`] explores a bounded number
//! of nodes and returns, which lets the portfolio interleave assets
//! deterministically on one thread or run them on separate threads.

use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicI64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::engine::{propagate, Fixpoint, PropagationStats, PropagatorSet, Schedule, Space};
use super::luby::LubySchedule;
use super::nogood::{extract_nogoods, Decision, NoGood, NoGoodPropagator};
use super::propagator::PropRef;
use super::store::{Store, VarId};
use super::KernelError;

pub type SearchRng = ChaCha8Rng;

/// Chooses the next binary split `var = value` / `var ≠ value`.
pub trait Brancher: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    /// `None` when this brancher has nothing left to decide.
    fn choose(&self, store: &Store, rng: &mut SearchRng) -> Option<(VarId, i64)>;
}

/// First unassigned variable, smallest value.
#[derive(Debug, Default, Clone, Copy)]
pub struct InputOrderBrancher;

impl Brancher for InputOrderBrancher {
    fn name(&self) -> &str {
        "input-order"
    }

    fn choose(&self, store: &Store, _rng: &mut SearchRng) -> Option<(VarId, i64)> {
        store
            .vars()
            .find(|&x| !store.is_assigned(x))
            .map(|x| (x, store.min(x)))
    }
}

/// Validates a full assignment independently of any propagator.
pub trait SolutionChecker: Send + Sync {
    fn check(&self, values: &[i64]) -> bool;
}

impl<F: Fn(&[i64]) -> bool + Send + Sync> SolutionChecker for F {
    fn check(&self, values: &[i64]) -> bool {
        self(values)
    }
}

/// The root store, the objective to minimise and a checker for solutions.
#[derive(Clone)]
pub struct Problem {
    pub root: Store,
    pub objective: Option<VarId>,
    pub checker: Option<Arc<dyn SolutionChecker>>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("vars", &self.root.num_vars())
            .field("objective", &self.objective)
            .field("checker", &self.checker.is_some())
            .finish()
    }
}

impl Problem {
    pub fn new(root: Store) -> Self {
        Self {
            root,
            objective: None,
            checker: None,
        }
    }

    pub fn minimize(mut self, objective: VarId) -> Self {
        self.objective = Some(objective);
        self
    }

    pub fn with_checker(mut self, checker: impl SolutionChecker + 'static) -> Self {
        self.checker = Some(Arc::new(checker));
        self
    }

    pub fn check(&self, values: &[i64]) -> bool {
        self.checker.as_ref().is_none_or(|c| c.check(values))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Solution {
    pub values: Vec<i64>,
    pub cost: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RestartPolicy {
    Never,
    Luby { scale: u64 },
}

/// Default failure scale for Luby restarts.
pub const DEFAULT_LUBY_SCALE: u64 = 32;

/// One configured search: propagators, brancher, restarts and whether
/// exhausting it proves anything.
#[derive(Debug, Clone)]
pub struct Asset {
    pub name: String,
    /// Propagator sets; restart `k` uses `rotation[k % len]`.
    rotation: Vec<Vec<PropRef>>,
    pub brancher: Arc<dyn Brancher>,
    pub restarts: RestartPolicy,
    complete: bool,
    pub nogood_recording: bool,
    pub seed: u64,
}

impl Asset {
    /// An asset over `props`. It is complete exactly when no propagator is
    /// half-checking; no-good recording follows completeness.
    pub fn new(name: impl Into<String>, props: Vec<PropRef>, brancher: Arc<dyn Brancher>) -> Self {
        Self::rotating(name, vec![props], brancher)
    }

    /// An asset that switches between propagator sets on every restart.
    pub fn rotating(
        name: impl Into<String>,
        rotation: Vec<Vec<PropRef>>,
        brancher: Arc<dyn Brancher>,
    ) -> Self {
        assert!(
            !rotation.is_empty(),
            "an asset needs at least one propagator set"
        );
        let complete = !rotation.iter().flatten().any(|p| p.half_checking());
        Self {
            name: name.into(),
            rotation,
            brancher,
            restarts: RestartPolicy::Luby {
                scale: DEFAULT_LUBY_SCALE,
            },
            complete,
            nogood_recording: complete,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: RestartPolicy) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_nogood_recording(mut self, on: bool) -> Self {
        self.nogood_recording = on;
        self
    }

    /// Mark the asset incomplete even though its propagators are correct.
    pub fn declare_incomplete(mut self) -> Self {
        self.complete = false;
        self
    }

    /// Claim completeness; refused when any propagator is half-checking.
    pub fn declare_complete(mut self) -> Result<Self, KernelError> {
        if let Some(p) = self.rotation.iter().flatten().find(|p| p.half_checking()) {
            return Err(KernelError::HalfCheckingInCompleteAsset {
                asset: self.name,
                propagator: p.name().to_string(),
            });
        }
        self.complete = true;
        Ok(self)
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn propagator_sets(&self) -> &[Vec<PropRef>] {
        &self.rotation
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Branch and bound on the objective, sharing the bound with other assets.
    Optimize,
    /// Enumerate every solution; restarts are ignored.
    All,
}

/// A point on the incumbent trajectory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrajectoryPoint {
    pub elapsed_ms: u64,
    pub cost: i64,
    pub asset: usize,
}

/// State shared between assets: the monotone cost bound, the incumbent and
/// the no-good pool.
#[derive(Debug)]
pub struct SharedState {
    bound: AtomicI64,
    incumbent: Mutex<Option<(Solution, usize)>>,
    trajectory: Mutex<Vec<TrajectoryPoint>>,
    pool: Mutex<Vec<(usize, NoGood)>>,
    stop: AtomicBool,
    start: Instant,
}

impl Default for SharedState {
    fn default() -> Self {
        Self::new()
    }
}

impl SharedState {
    pub fn new() -> Self {
        Self {
            bound: AtomicI64::new(i64::MAX),
            incumbent: Mutex::new(None),
            trajectory: Mutex::new(Vec::new()),
            pool: Mutex::new(Vec::new()),
            stop: AtomicBool::new(false),
            start: Instant::now(),
        }
    }

    /// Best cost so far, `i64::MAX` when there is none.
    pub fn bound(&self) -> i64 {
        self.bound.load(Ordering::Acquire)
    }

    pub fn incumbent(&self) -> Option<(Solution, usize)> {
        self.incumbent.lock().unwrap().clone()
    }

    pub fn trajectory(&self) -> Vec<TrajectoryPoint> {
        self.trajectory.lock().unwrap().clone()
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }

    pub fn request_stop(&self) {
        self.stop.store(true, Ordering::Release);
    }

    pub fn stopped(&self) -> bool {
        self.stop.load(Ordering::Acquire)
    }

    /// Install `sol` if it strictly improves the incumbent.
    pub fn offer(&self, sol: &Solution, asset: usize) -> bool {
        let cost = sol.cost.unwrap_or(i64::MIN);
        let mut slot = self.incumbent.lock().unwrap();
        let better = slot
            .as_ref()
            .is_none_or(|(cur, _)| cost < cur.cost.unwrap_or(i64::MIN));
        if better {
            *slot = Some((sol.clone(), asset));
            self.bound.store(cost, Ordering::Release);
            self.trajectory.lock().unwrap().push(TrajectoryPoint {
                elapsed_ms: self.start.elapsed().as_millis() as u64,
                cost,
                asset,
            });
        }
        better
    }

    fn publish(&self, asset: usize, nogoods: &[NoGood]) {
        let mut pool = self.pool.lock().unwrap();
        pool.extend(nogoods.iter().map(|ng| (asset, ng.clone())));
    }

    fn pool_since(&self, cursor: usize) -> (Vec<(usize, NoGood)>, usize) {
        let pool = self.pool.lock().unwrap();
        (pool[cursor.min(pool.len())..].to_vec(), pool.len())
    }
}

#[derive(Debug, Default, Clone, PartialEq, Eq, Serialize)]
pub struct AssetStats {
    pub nodes: u64,
    pub failures: u64,
    pub restarts: u64,
    pub solutions: u64,
    pub propagations: u64,
    pub nogoods_recorded: u64,
    pub nogoods_installed: u64,
    pub nogoods_rejected: u64,
    pub checker_rejections: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssetStatus {
    Running,
    Exhausted,
}

#[derive(Debug)]
struct Frame {
    /// The propagated parent; taken when the right branch starts.
    space: Option<Space>,
    var: VarId,
    value: i64,
    right: bool,
}

/// The running search of one asset.
#[derive(Debug)]
pub struct AssetSearch {
    id: usize,
    asset: Arc<Asset>,
    problem: Arc<Problem>,
    mode: SearchMode,
    rng: SearchRng,
    schedule: Option<LubySchedule>,
    budget: u64,
    failures_in_restart: u64,
    rotation_index: usize,
    props: PropagatorSet,
    installed: Vec<NoGood>,
    pool_cursor: usize,
    stack: Vec<Frame>,
    pending: Option<(Space, Schedule)>,
    status: AssetStatus,
    stats: AssetStats,
    found: Vec<Solution>,
    elapsed: Duration,
}

impl AssetSearch {
    pub fn new(id: usize, asset: Arc<Asset>, problem: Arc<Problem>, mode: SearchMode) -> Self {
        let mut schedule = match (mode, asset.restarts) {
            (SearchMode::Optimize, RestartPolicy::Luby { scale }) => Some(LubySchedule::new(scale)),
            _ => None,
        };
        let budget = schedule
            .as_mut()
            .and_then(Iterator::next)
            .unwrap_or(u64::MAX);
        let rng = SearchRng::seed_from_u64(asset.seed);
        let props = PropagatorSet::new(problem.root.num_vars(), asset.rotation[0].clone());
        let root = Space::new(problem.root.clone(), &props);
        Self {
            id,
            asset,
            problem,
            mode,
            rng,
            schedule,
            budget,
            failures_in_restart: 0,
            rotation_index: 0,
            props,
            installed: Vec::new(),
            pool_cursor: 0,
            stack: Vec::new(),
            pending: Some((root, Schedule::All)),
            status: AssetStatus::Running,
            stats: AssetStats::default(),
            found: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn asset(&self) -> &Asset {
        &self.asset
    }

    pub fn status(&self) -> AssetStatus {
        self.status
    }

    pub fn stats(&self) -> &AssetStats {
        &self.stats
    }

    pub fn elapsed(&self) -> Duration {
        self.elapsed
    }

    /// No-goods currently installed in this asset.
    pub fn installed_nogoods(&self) -> &[NoGood] {
        &self.installed
    }

    /// Solutions collected in [`SearchMode::All`] and improving solutions
    /// found in [`SearchMode::Optimize`].
    pub fn take_solutions(&mut self) -> Vec<Solution> {
        std::mem::take(&mut self.found)
    }

    /// The current decision path from the root.
    pub fn path(&self) -> Vec<Decision> {
        self.stack
            .iter()
            .map(|f| {
                if f.right {
                    Decision::exclude(f.var, f.value)
                } else {
                    Decision::assign(f.var, f.value)
                }
            })
            .collect()
    }

    /// Install a no-good; it takes effect at the next restart. A complete
    /// asset refuses no-goods that come from an incomplete one.
    pub fn install_nogood(&mut self, nogood: NoGood) -> Result<(), KernelError> {
        if self.asset.complete && nogood.origin_incomplete {
            self.stats.nogoods_rejected += 1;
            return Err(KernelError::UnsoundNoGood {
                asset: self.asset.name.clone(),
            });
        }
        self.installed.push(nogood);
        self.stats.nogoods_installed += 1;
        Ok(())
    }

    /// Explore at most `max_nodes` nodes.
    pub fn step(&mut self, shared: &SharedState, max_nodes: u64) -> AssetStatus {
        let started = Instant::now();
        let mut visited = 0;
        while self.status == AssetStatus::Running && visited < max_nodes && !shared.stopped() {
            let Some((mut space, schedule)) = self.pending.take() else {
                if !self.backtrack() {
                    self.status = AssetStatus::Exhausted;
                }
                continue;
            };
            visited += 1;
            self.stats.nodes += 1;

            if self.mode == SearchMode::Optimize {
                if let Some(obj) = self.problem.objective {
                    let bound = shared.bound();
                    if bound != i64::MAX {
                        let _ = space.store.set_max(obj, bound - 1);
                    }
                }
            }
            let mut pstats = PropagationStats::default();
            let fix = propagate(&mut space, &self.props, schedule, &mut pstats);
            self.stats.propagations += pstats.steps;

            if fix == Fixpoint::Failed {
                self.on_failure(shared);
                continue;
            }
            if space.store.all_assigned() {
                self.on_solution(&space.store, shared);
                continue;
            }
            let (var, value) = self
                .asset
                .brancher
                .choose(&space.store, &mut self.rng)
                .filter(|&(x, v)| space.store.contains(x, v) && !space.store.is_assigned(x))
                .or_else(|| InputOrderBrancher.choose(&space.store, &mut self.rng))
                .expect("unassigned variable must exist");
            let mut left = space.clone();
            let _ = left.store.assign(var, value);
            self.stack.push(Frame {
                space: Some(space),
                var,
                value,
                right: false,
            });
            self.pending = Some((left, Schedule::Touched));
        }
        self.elapsed += started.elapsed();
        self.status
    }

    fn on_failure(&mut self, shared: &SharedState) {
        self.stats.failures += 1;
        self.failures_in_restart += 1;
        if self.failures_in_restart >= self.budget && !self.stack.is_empty() {
            self.restart(shared);
        }
    }

    fn on_solution(&mut self, store: &Store, shared: &SharedState) {
        let values = store.assignment().expect("all variables assigned");
        if !self.problem.check(&values) {
            // Unreachable with sound propagators; never report such a solution.
            self.stats.checker_rejections += 1;
            debug_assert!(
                false,
                "asset {} produced a solution the checker rejects",
                self.asset.name
            );
            return;
        }
        let cost = self.problem.objective.map(|o| values[o.index()]);
        let sol = Solution { values, cost };
        self.stats.solutions += 1;
        match self.mode {
            SearchMode::All => self.found.push(sol),
            SearchMode::Optimize => {
                if shared.offer(&sol, self.id) {
                    self.found.push(sol);
                }
                if self.problem.objective.is_none() {
                    shared.request_stop();
                }
            }
        }
    }

    fn backtrack(&mut self) -> bool {
        while let Some(top) = self.stack.last_mut() {
            if !top.right {
                top.right = true;
                let mut space = top
                    .space
                    .take()
                    .expect("parent space kept until right branch");
                let _ = space.store.remove(top.var, top.value);
                self.pending = Some((space, Schedule::Touched));
                return true;
            }
            self.stack.pop();
        }
        false
    }

    fn restart(&mut self, shared: &SharedState) {
        if self.asset.nogood_recording {
            let fresh = extract_nogoods(&self.path(), self.asset.complete);
            self.stats.nogoods_recorded += fresh.len() as u64;
            shared.publish(self.id, &fresh);
            self.installed.extend(fresh);
        }
        let (pool, cursor) = shared.pool_since(self.pool_cursor);
        self.pool_cursor = cursor;
        for (origin, ng) in pool {
            if origin == self.id {
                continue;
            }
            if !self.asset.complete && ng.origin_incomplete {
                // Another incomplete asset's no-goods say nothing about this one.
                continue;
            }
            let _ = self.install_nogood(ng);
        }

        self.stats.restarts += 1;
        self.rotation_index += 1;
        self.failures_in_restart = 0;
        self.budget = self
            .schedule
            .as_mut()
            .and_then(Iterator::next)
            .unwrap_or(u64::MAX);

        let mut props =
            self.asset.rotation[self.rotation_index % self.asset.rotation.len()].clone();
        if !self.installed.is_empty() {
            props.push(Arc::new(NoGoodPropagator::new(self.installed.clone())));
        }
        self.props = PropagatorSet::new(self.problem.root.num_vars(), props);
        self.stack.clear();
        let root = Space::new(self.problem.root.clone(), &self.props);
        self.pending = Some((root, Schedule::All));
    }
}

/// Result of running a single asset on its own.
#[derive(Debug, Clone)]
pub struct SearchResult {
    /// Emitted solutions in order; in optimisation mode each one improves
    /// on the previous.
    pub solutions: Vec<Solution>,
    pub exhausted: bool,
    pub stats: AssetStats,
}

/// Run one asset to exhaustion (or until `shared` is stopped or the node
/// limit is hit).
pub fn search_restarting(
    asset: Asset,
    problem: Arc<Problem>,
    shared: &SharedState,
    node_limit: Option<u64>,
) -> SearchResult {
    run_single(asset, problem, shared, node_limit, SearchMode::Optimize)
}

/// Enumerate all solutions of `problem` with `asset`'s propagators and brancher.
pub fn enumerate_solutions(asset: Asset, problem: Arc<Problem>) -> SearchResult {
    run_single(asset, problem, &SharedState::new(), None, SearchMode::All)
}

fn run_single(
    asset: Asset,
    problem: Arc<Problem>,
    shared: &SharedState,
    node_limit: Option<u64>,
    mode: SearchMode,
) -> SearchResult {
    let mut search = AssetSearch::new(0, Arc::new(asset), problem, mode);
    let limit = node_limit.unwrap_or(u64::MAX);
    while search.status() == AssetStatus::Running
        && !shared.stopped()
        && search.stats().nodes < limit
    {
        let slice = (limit - search.stats().nodes).min(4096);
        search.step(shared, slice);
    }
    SearchResult {
        solutions: search.take_solutions(),
        exhausted: search.status() == AssetStatus::Exhausted,
        stats: search.stats().clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::propagator::{EqualPropagator, FailPropagator};
    use crate::kernel::store::Domain;

    fn pair_problem() -> (Arc<Problem>, VarId, VarId) {
        let mut s = Store::new();
        let x = s.add_var(Domain::set_of(4, 0..4));
        let y = s.add_var(Domain::set_of(4, 0..4));
        (Arc::new(Problem::new(s)), x, y)
    }

    #[test]
    fn fail_asset_is_exhausted_without_solutions() {
        let (problem, _, _) = pair_problem();
        let asset = Asset::new(
            "fail",
            vec![Arc::new(FailPropagator::new())],
            Arc::new(InputOrderBrancher),
        );
        assert!(!asset.is_complete());
        let r = search_restarting(asset, problem, &SharedState::new(), None);
        assert!(r.solutions.is_empty());
        assert!(r.exhausted);
    }

    #[test]
    fn enumeration_finds_every_equal_pair() {
        let (problem, x, y) = pair_problem();
        let asset = Asset::new(
            "eq",
            vec![Arc::new(EqualPropagator::new(x, y))],
            Arc::new(InputOrderBrancher),
        );
        let r = enumerate_solutions(asset, problem);
        let mut got: Vec<Vec<i64>> = r.solutions.into_iter().map(|s| s.values).collect();
        got.sort();
        assert_eq!(got, (0..4).map(|v| vec![v, v]).collect::<Vec<_>>());
        assert!(r.exhausted);
    }

    #[test]
    fn branch_and_bound_minimises() {
        let mut s = Store::new();
        let x = s.add_var(Domain::set_of(8, [5, 2, 7]));
        let c = s.add_var(Domain::set_of(8, 0..8));
        let problem = Arc::new(Problem::new(s).minimize(c));
        let asset = Asset::new(
            "eq",
            vec![Arc::new(EqualPropagator::new(x, c))],
            Arc::new(InputOrderBrancher),
        )
        .with_restarts(RestartPolicy::Never);
        let r = search_restarting(asset, problem, &SharedState::new(), None);
        assert_eq!(r.solutions.last().and_then(|s| s.cost), Some(2));
        assert!(r.exhausted);
    }

    #[test]
    fn complete_asset_rejects_incomplete_nogood() {
        let (problem, x, _) = pair_problem();
        let asset = Asset::new("std", vec![], Arc::new(InputOrderBrancher));
        let mut search = AssetSearch::new(0, Arc::new(asset), problem, SearchMode::Optimize);
        let bad = NoGood {
            decisions: vec![],
            origin_incomplete: true,
        };
        assert!(matches!(
            search.install_nogood(bad),
            Err(KernelError::UnsoundNoGood { .. })
        ));
        let good = NoGood {
            decisions: vec![Decision::assign(x, 0)],
            origin_incomplete: false,
        };
        assert!(search.install_nogood(good).is_ok());
        assert!(search
            .installed_nogoods()
            .iter()
            .all(|n| !n.origin_incomplete));
    }

    #[test]
    fn declaring_half_checking_asset_complete_fails() {
        let asset = Asset::new(
            "fail",
            vec![Arc::new(FailPropagator::new())],
            Arc::new(InputOrderBrancher),
        );
        assert!(asset.declare_complete().is_err());
    }
}
