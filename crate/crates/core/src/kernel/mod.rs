//! Finite-domain kernel: store, propagator contract, fixpoint engine,
//! restarting search with no-goods, and the portfolio runner.

mod engine;
mod luby;
mod nogood;
mod portfolio;
mod propagator;
mod search;
mod store;

pub use engine::{propagate, Fixpoint, PropagationStats, PropagatorSet, Schedule, Space};
pub use luby::{luby, LubySchedule};
pub use nogood::{extract_nogoods, Decision, NoGood, NoGoodPropagator, Polarity};
pub use portfolio::{portfolio_run, AssetReport, PortfolioConfig, PortfolioOutcome, Strategy};
pub use propagator::{EqualPropagator, FailPropagator, Priority, PropRef, PropStatus, Propagator};
pub use search::{
    enumerate_solutions, search_restarting, Asset, AssetSearch, AssetStats, AssetStatus, Brancher,
    InputOrderBrancher, Problem, RestartPolicy, SearchMode, SearchResult, SearchRng, SharedState,
    Solution, SolutionChecker, TrajectoryPoint, DEFAULT_LUBY_SCALE,
};
pub use store::{Domain, ModResult, Store, VarId, Wipeout};

#[derive(Debug, thiserror::Error)]
pub enum KernelError {
    #[error("asset `{asset}` cannot be complete: propagator `{propagator}` is half-checking")]
    HalfCheckingInCompleteAsset { asset: String, propagator: String },
    #[error("complete asset `{asset}` refused a no-good recorded by an incomplete asset")]
    UnsoundNoGood { asset: String },
    #[error("a portfolio needs at least one asset")]
    NoAssets,
}
