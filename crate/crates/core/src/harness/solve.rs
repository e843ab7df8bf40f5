use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use log::info;
use serde::Serialize;

use super::HarnessError;
use crate::branching::{WarnsdorffBrancher, DEFAULT_EPSILON};
use crate::circuit::{check_solution, tour_from_successors, CircuitModel};
use crate::halfcheck::{
    build_propagator, HalfCheckConfig, PropKind, DEFAULT_CBP_THRESHOLD, DEFAULT_NCL_NODE_CAP,
};
use crate::kernel::{
    portfolio_run, Asset, PortfolioConfig, RestartPolicy, Strategy, TrajectoryPoint,
    DEFAULT_LUBY_SCALE,
};
use crate::tsplib::TspInstance;

#[derive(Debug, Clone, Serialize)]
pub struct SolveConfig {
    /// Half-checking propagators for the incomplete assets.
    pub props: Vec<PropKind>,
    /// Number of complete assets running the standard model.
    pub complete_assets: usize,
    pub strategy: Strategy,
    pub time_limit_s: Option<f64>,
    pub node_limit: Option<u64>,
    pub seed: u64,
    pub record_nogoods_incomplete: bool,
    pub epsilon: f64,
    pub start_node: usize,
    pub luby_scale: u64,
    pub parallel: bool,
    pub ncl_node_cap: usize,
    pub cbp_threshold: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            props: Vec::new(),
            complete_assets: 1,
            strategy: Strategy::Combined,
            time_limit_s: None,
            node_limit: None,
            seed: 0,
            record_nogoods_incomplete: false,
            epsilon: DEFAULT_EPSILON,
            start_node: 0,
            luby_scale: DEFAULT_LUBY_SCALE,
            parallel: false,
            ncl_node_cap: DEFAULT_NCL_NODE_CAP,
            cbp_threshold: DEFAULT_CBP_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssetSummary {
    pub name: String,
    pub complete: bool,
    pub seed: u64,
    pub nogood_recording: bool,
    pub exhausted: bool,
    #[serde(flatten)]
    pub stats: crate::kernel::AssetStats,
}

/// The search counters of a run; nothing in here depends on timing when
/// the portfolio runs interleaved and is bounded by nodes or exhaustion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunStatistics {
    pub cost: Option<i64>,
    pub proven_optimal: bool,
    pub nodes: u64,
    pub failures: u64,
    pub restarts: u64,
    pub solutions: u64,
    pub propagations: u64,
    pub assets: Vec<AssetSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub instance: String,
    pub n: usize,
    pub config: SolveConfig,
    /// `optimal`, `feasible`, `infeasible` or `unknown`.
    pub status: &'static str,
    pub cost: Option<i64>,
    pub tour: Option<Vec<usize>>,
    /// The incumbent passed the independent checker when the report was built.
    pub verified: bool,
    pub incumbent_asset: Option<String>,
    pub proven_optimal: bool,
    pub timed_out: bool,
    pub statistics: RunStatistics,
    pub trajectory: Vec<TrajectoryPoint>,
    pub asset_wall_ms: Vec<u64>,
    pub wall_ms: u64,
}

impl RunReport {
    /// 0 with an incumbent, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.cost.is_some() {
            0
        } else {
            1
        }
    }
}

/// Complete assets on the standard model followed by the incomplete ones
/// holding the half-checking propagators, grouped by `cfg.strategy`.
pub fn build_assets(model: &CircuitModel, cfg: &SolveConfig) -> Result<Vec<Asset>, HarnessError> {
    if cfg.start_node >= model.n() {
        return Err(HarnessError::Config(format!(
            "start node {} out of range for {} nodes",
            cfg.start_node,
            model.n()
        )));
    }
    if !(0.0..=1.0).contains(&cfg.epsilon) {
        return Err(HarnessError::Config(format!(
            "epsilon {} is not a probability",
            cfg.epsilon
        )));
    }
    let restarts = RestartPolicy::Luby {
        scale: cfg.luby_scale.max(1),
    };
    let brancher = Arc::new(WarnsdorffBrancher::new(model, cfg.start_node, cfg.epsilon));
    let mut assets = Vec::new();
    for k in 0..cfg.complete_assets {
        let asset = Asset::new(
            format!("standard-{k}"),
            model.standard_propagators(),
            brancher.clone(),
        )
        .with_seed(cfg.seed + k as u64)
        .with_restarts(restarts)
        .declare_complete()?;
        assets.push(asset);
    }
    let hc_cfg = HalfCheckConfig {
        start_node: cfg.start_node,
        seed: cfg.seed,
        cbp_threshold: cfg.cbp_threshold,
        ncl_node_cap: cfg.ncl_node_cap,
    };
    let hc = cfg
        .props
        .iter()
        .map(|&k| build_propagator(k, model, &hc_cfg))
        .collect::<Result<Vec<_>, _>>()?;
    for (idx, rotation) in cfg.strategy.arrange(&hc).into_iter().enumerate() {
        let names: Vec<String> = rotation
            .iter()
            .flatten()
            .map(|p| p.name().to_string())
            .collect();
        let sets = rotation
            .into_iter()
            .map(|extra| {
                let mut set = model.standard_propagators();
                set.extend(extra);
                set
            })
            .collect();
        let seed = cfg.seed + (cfg.complete_assets + idx) as u64;
        let asset = Asset::rotating(format!("hc-{}", names.join("+")), sets, brancher.clone())
            .with_seed(seed)
            .with_restarts(restarts)
            .with_nogood_recording(cfg.record_nogoods_incomplete)
            .declare_incomplete();
        assets.push(asset);
    }
    Ok(assets)
}

pub fn solve_instance(
    inst: Arc<TspInstance>,
    cfg: &SolveConfig,
) -> Result<RunReport, HarnessError> {
    let started = Instant::now();
    let model = CircuitModel::new(inst.clone())?;
    let assets = build_assets(&model, cfg)?;
    let names: Vec<String> = assets.iter().map(|a| a.name.clone()).collect();
    info!(
        "solving {} ({} nodes) with assets {:?}",
        inst.name,
        inst.n(),
        names
    );
    let pcfg = PortfolioConfig {
        time_limit: cfg.time_limit_s.map(Duration::from_secs_f64),
        node_limit: cfg.node_limit,
        parallel: cfg.parallel,
        ..PortfolioConfig::default()
    };
    let out = portfolio_run(assets, Arc::new(model.problem()), &pcfg)?;

    let n = inst.n();
    let (cost, tour, verified) = match &out.incumbent {
        Some(sol) => {
            let verified = check_solution(&inst, &sol.values);
            (sol.cost, tour_from_successors(&sol.values[..n]), verified)
        }
        None => (None, None, false),
    };
    let status = if out.proven_optimal {
        "optimal"
    } else if out.proven_infeasible {
        "infeasible"
    } else if cost.is_some() {
        "feasible"
    } else {
        "unknown"
    };
    let assets: Vec<AssetSummary> = out
        .assets
        .iter()
        .map(|a| AssetSummary {
            name: a.name.clone(),
            complete: a.complete,
            seed: a.seed,
            nogood_recording: a.nogood_recording,
            exhausted: a.exhausted,
            stats: a.stats.clone(),
        })
        .collect();
    let sum = |f: fn(&crate::kernel::AssetStats) -> u64| assets.iter().map(|a| f(&a.stats)).sum();
    let statistics = RunStatistics {
        cost,
        proven_optimal: out.proven_optimal,
        nodes: sum(|s| s.nodes),
        failures: sum(|s| s.failures),
        restarts: sum(|s| s.restarts),
        solutions: sum(|s| s.solutions),
        propagations: sum(|s| s.propagations),
        assets,
    };
    Ok(RunReport {
        instance: inst.name.clone(),
        n,
        config: cfg.clone(),
        status,
        cost,
        tour,
        verified,
        incumbent_asset: out.incumbent_asset.map(|k| out.assets[k].name.clone()),
        proven_optimal: out.proven_optimal,
        timed_out: out.timed_out,
        statistics,
        trajectory: out.trajectory,
        asset_wall_ms: out.assets.iter().map(|a| a.wall_ms).collect(),
        wall_ms: started.elapsed().as_millis() as u64,
    })
}

pub fn cmd_solve(path: impl AsRef<Path>, cfg: &SolveConfig) -> Result<RunReport, HarnessError> {
    let inst = TspInstance::read(path)?;
    solve_instance(Arc::new(inst), cfg)
}
