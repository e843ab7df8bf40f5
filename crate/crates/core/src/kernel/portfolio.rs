//! Portfolios of complete and incomplete assets.
//!
//! The incumbent and its cost bound are shared by every asset: any
//! solution, even one found with half-checking propagation, is a real
//! solution. Optimality is only claimed when a complete asset exhausts its
//! tree under that bound. No-goods from incomplete assets never reach a
//! complete one.

use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::propagator::PropRef;
use super::search::{
    Asset, AssetSearch, AssetStats, AssetStatus, Problem, SearchMode, SharedState, Solution,
    TrajectoryPoint,
};
use super::KernelError;

/// How several half-checking propagators are spread over incomplete assets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// One asset running all of them together.
    Combined,
    /// One asset per propagator.
    MultipleAssets,
    /// One asset switching propagator on every restart.
    RoundRobin,
}

impl Strategy {
    /// Group `hc` into per-asset rotations of propagator subsets.
    pub fn arrange(self, hc: &[PropRef]) -> Vec<Vec<Vec<PropRef>>> {
        if hc.is_empty() {
            return Vec::new();
        }
        match self {
            Strategy::Combined => vec![vec![hc.to_vec()]],
            Strategy::MultipleAssets => hc.iter().map(|p| vec![vec![p.clone()]]).collect(),
            Strategy::RoundRobin => vec![hc.iter().map(|p| vec![p.clone()]).collect()],
        }
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "combined" => Ok(Strategy::Combined),
            "multi" | "multiple" | "multiple-assets" | "multiple_assets" => {
                Ok(Strategy::MultipleAssets)
            }
            "roundrobin" | "round-robin" | "round_robin" => Ok(Strategy::RoundRobin),
            other => Err(format!(
                "unknown strategy `{other}` (expected combined, multi or roundrobin)"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PortfolioConfig {
    pub time_limit: Option<Duration>,
    /// Total node limit over all assets.
    pub node_limit: Option<u64>,
    /// Nodes per asset per turn when interleaving on one thread.
    pub slice: u64,
    /// Run every asset on its own thread. Results are then timing dependent.
    pub parallel: bool,
}

impl Default for PortfolioConfig {
    fn default() -> Self {
        Self {
            time_limit: None,
            node_limit: None,
            slice: 256,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AssetReport {
    pub name: String,
    pub complete: bool,
    pub seed: u64,
    pub nogood_recording: bool,
    pub exhausted: bool,
    #[serde(flatten)]
    pub stats: AssetStats,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PortfolioOutcome {
    pub incumbent: Option<Solution>,
    /// Asset that found the incumbent.
    pub incumbent_asset: Option<usize>,
    pub proven_optimal: bool,
    /// A complete asset exhausted its tree without any solution.
    pub proven_infeasible: bool,
    pub timed_out: bool,
    pub trajectory: Vec<TrajectoryPoint>,
    pub assets: Vec<AssetReport>,
}

/// Run `assets` on `problem` until a complete asset exhausts its tree,
/// every asset is exhausted, or a limit is hit.
pub fn portfolio_run(
    assets: Vec<Asset>,
    problem: Arc<Problem>,
    config: &PortfolioConfig,
) -> Result<PortfolioOutcome, KernelError> {
    if assets.is_empty() {
        return Err(KernelError::NoAssets);
    }
    let shared = SharedState::new();
    let mut searches: Vec<AssetSearch> = assets
        .into_iter()
        .enumerate()
        .map(|(id, a)| AssetSearch::new(id, Arc::new(a), problem.clone(), SearchMode::Optimize))
        .collect();
    let deadline = config.time_limit.map(|t| Instant::now() + t);

    if config.parallel {
        run_parallel(&mut searches, &shared, config, deadline);
    } else {
        run_interleaved(&mut searches, &shared, config, deadline);
    }

    let proven = searches
        .iter()
        .any(|s| s.asset().is_complete() && s.status() == AssetStatus::Exhausted);
    let all_done = searches
        .iter()
        .all(|s| s.status() == AssetStatus::Exhausted);
    let incumbent = shared.incumbent();
    Ok(PortfolioOutcome {
        proven_optimal: proven && incumbent.is_some(),
        proven_infeasible: proven && incumbent.is_none(),
        timed_out: !proven && !all_done,
        incumbent_asset: incumbent.as_ref().map(|(_, a)| *a),
        incumbent: incumbent.map(|(s, _)| s),
        trajectory: shared.trajectory(),
        assets: searches.iter().map(report).collect(),
    })
}

fn report(s: &AssetSearch) -> AssetReport {
    let a = s.asset();
    AssetReport {
        name: a.name.clone(),
        complete: a.is_complete(),
        seed: a.seed,
        nogood_recording: a.nogood_recording,
        exhausted: s.status() == AssetStatus::Exhausted,
        stats: s.stats().clone(),
        wall_ms: s.elapsed().as_millis() as u64,
    }
}

fn finished(s: &AssetSearch) -> bool {
    s.status() == AssetStatus::Exhausted && s.asset().is_complete()
}

fn total_nodes(searches: &[AssetSearch]) -> u64 {
    searches.iter().map(|s| s.stats().nodes).sum()
}

fn run_interleaved(
    searches: &mut [AssetSearch],
    shared: &SharedState,
    config: &PortfolioConfig,
    deadline: Option<Instant>,
) {
    let slice = config.slice.max(1);
    loop {
        let mut progressed = false;
        for s in searches.iter_mut() {
            if s.status() != AssetStatus::Running {
                continue;
            }
            s.step(shared, slice);
            progressed = true;
            if finished(s) {
                shared.request_stop();
                return;
            }
        }
        let out_of_time = deadline.is_some_and(|d| Instant::now() >= d);
        let out_of_nodes = config
            .node_limit
            .is_some_and(|l| total_nodes(searches) >= l);
        if !progressed || out_of_time || out_of_nodes || shared.stopped() {
            return;
        }
    }
}

fn run_parallel(
    searches: &mut [AssetSearch],
    shared: &SharedState,
    config: &PortfolioConfig,
    deadline: Option<Instant>,
) {
    let slice = config.slice.max(1);
    let per_asset_limit = config.node_limit.map(|l| l / searches.len().max(1) as u64);
    std::thread::scope(|scope| {
        for s in searches.iter_mut() {
            scope.spawn(move || {
                while s.status() == AssetStatus::Running && !shared.stopped() {
                    s.step(shared, slice);
                    if finished(s) {
                        shared.request_stop();
                        break;
                    }
                    if deadline.is_some_and(|d| Instant::now() >= d)
                        || per_asset_limit.is_some_and(|l| s.stats().nodes >= l)
                    {
                        break;
                    }
                }
            });
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::propagator::{EqualPropagator, FailPropagator};
    use crate::kernel::search::InputOrderBrancher;
    use crate::kernel::store::{Domain, Store};

    fn problem() -> Arc<Problem> {
        let mut s = Store::new();
        s.add_var(Domain::set_of(8, [6, 3, 4]));
        let c = s.add_var(Domain::set_of(8, 0..8));
        Arc::new(
            Problem::new(s)
                .minimize(c)
                .with_checker(|v: &[i64]| v[0] == v[1]),
        )
    }

    fn complete_asset() -> Asset {
        Asset::new(
            "std",
            vec![Arc::new(EqualPropagator::new(
                crate::VarId(0),
                crate::VarId(1),
            ))],
            Arc::new(InputOrderBrancher),
        )
    }

    #[test]
    fn fail_asset_does_not_block_proof() {
        let fail = Asset::new(
            "fail",
            vec![Arc::new(FailPropagator::new())],
            Arc::new(InputOrderBrancher),
        );
        let out = portfolio_run(
            vec![fail, complete_asset()],
            problem(),
            &PortfolioConfig::default(),
        )
        .unwrap();
        assert!(out.proven_optimal);
        assert_eq!(out.incumbent.unwrap().cost, Some(3));
        assert!(out.assets[0].exhausted);
    }

    #[test]
    fn empty_portfolio_is_an_error() {
        assert!(matches!(
            portfolio_run(vec![], problem(), &PortfolioConfig::default()),
            Err(KernelError::NoAssets)
        ));
    }

    #[test]
    fn parallel_mode_agrees() {
        let cfg = PortfolioConfig {
            parallel: true,
            ..Default::default()
        };
        let out = portfolio_run(
            vec![complete_asset(), complete_asset().with_seed(7)],
            problem(),
            &cfg,
        )
        .unwrap();
        assert!(out.proven_optimal);
        assert_eq!(out.incumbent.unwrap().cost, Some(3));
    }

    #[test]
    fn strategies_group_propagators() {
        let hc: Vec<PropRef> = vec![
            Arc::new(FailPropagator::new()),
            Arc::new(FailPropagator::new()),
        ];
        assert_eq!(Strategy::Combined.arrange(&hc).len(), 1);
        assert_eq!(Strategy::Combined.arrange(&hc)[0][0].len(), 2);
        assert_eq!(Strategy::MultipleAssets.arrange(&hc).len(), 2);
        let rr = Strategy::RoundRobin.arrange(&hc);
        assert_eq!((rr.len(), rr[0].len()), (1, 2));
        assert!(Strategy::RoundRobin.arrange(&[]).is_empty());
    }
}
