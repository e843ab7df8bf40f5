use std::path::Path;
use std::sync::Arc;

use log::info;
use rand::SeedableRng;
use serde::{Serialize, Serializer};

use super::HarnessError;
use crate::branching::WarnsdorffBrancher;
use crate::circuit::CircuitModel;
use crate::halfcheck::{build_propagator, HalfCheckConfig, PropKind};
use crate::kernel::{
    propagate, Brancher, Fixpoint, PropRef, PropagationStats, PropagatorSet, Schedule, SearchRng,
    Space, Store,
};
use crate::tsplib::TspInstance;

#[derive(Debug, Clone, Serialize)]
pub struct FilterConfig {
    pub assign_frac: f64,
    pub seed: u64,
    pub start_node: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            assign_frac: 0.1,
            seed: 0,
            start_node: 0,
        }
    }
}

/// Domain sizes and cost bounds of a propagated store.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Measure {
    pub failed: bool,
    pub dom_sum: u64,
    pub min_cost: i64,
    pub max_cost: i64,
}

/// One table cell: the remaining fraction against the baseline, `=` when
/// nothing changed, `⊥` when the store failed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Same,
    Ratio(f64),
    Failed,
}

impl Cell {
    fn of(value: i64, base: i64, failed: bool) -> Cell {
        if failed {
            Cell::Failed
        } else if value == base {
            Cell::Same
        } else {
            Cell::Ratio(value as f64 / base.max(1) as f64)
        }
    }

    /// The ratio, with `=` read as 1.
    pub fn ratio(self) -> Option<f64> {
        match self {
            Cell::Same => Some(1.0),
            Cell::Ratio(r) => Some(r),
            Cell::Failed => None,
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Same => s.serialize_str("="),
            Cell::Failed => s.serialize_str("⊥"),
            Cell::Ratio(r) => s.serialize_f64(*r),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigRow {
    pub name: String,
    pub raw: Measure,
    pub dom: Cell,
    pub min_cost: Cell,
    pub max_cost: Cell,
}

#[derive(Debug, Clone, Serialize)]
pub struct FilterExperimentResult {
    pub instance: String,
    pub n: usize,
    pub config: FilterConfig,
    /// The assigned successors `(i, S_i)`, in order.
    pub prefix: Vec<(usize, i64)>,
    pub baseline: Measure,
    pub rows: Vec<ConfigRow>,
}

impl FilterExperimentResult {
    pub fn row(&self, name: &str) -> Option<&ConfigRow> {
        self.rows.iter().find(|r| r.name == name)
    }
}

fn measure(model: &CircuitModel, store: &Store) -> Measure {
    if store.is_failed() {
        return Measure {
            failed: true,
            dom_sum: 0,
            min_cost: 0,
            max_cost: 0,
        };
    }
    Measure {
        failed: false,
        dom_sum: store.total_size(model.succ_vars()),
        min_cost: store.min(model.cost()),
        max_cost: store.max(model.cost()),
    }
}

/// Propagate the root, then assign `prefix` one decision at a time with
/// propagation after each.
fn replay(model: &CircuitModel, props: Vec<PropRef>, prefix: &[(usize, i64)]) -> Store {
    let set = PropagatorSet::new(model.num_vars(), props);
    let mut space = Space::new(model.root_store(), &set);
    let mut stats = PropagationStats::default();
    if propagate(&mut space, &set, Schedule::All, &mut stats) == Fixpoint::Failed {
        return space.store;
    }
    for &(i, v) in prefix {
        if space.store.assign(model.succ(i), v).is_err() {
            return space.store;
        }
        if propagate(&mut space, &set, Schedule::Touched, &mut stats) == Fixpoint::Failed {
            return space.store;
        }
    }
    space.store
}

/// The first `k` Warnsdorff decisions (no randomization) on the standard
/// model.
fn warnsdorff_prefix(
    model: &CircuitModel,
    cfg: &FilterConfig,
    k: usize,
) -> Result<Vec<(usize, i64)>, HarnessError> {
    let brancher = WarnsdorffBrancher::new(model, cfg.start_node, 0.0);
    let mut rng = SearchRng::seed_from_u64(cfg.seed);
    let set = PropagatorSet::new(model.num_vars(), model.standard_propagators());
    let mut space = Space::new(model.root_store(), &set);
    let mut stats = PropagationStats::default();
    let mut prefix = Vec::with_capacity(k);
    if propagate(&mut space, &set, Schedule::All, &mut stats) == Fixpoint::Failed {
        return Err(HarnessError::Baseline("root propagation failed".into()));
    }
    while prefix.len() < k {
        let Some((x, v)) = brancher.choose(&space.store, &mut rng) else {
            break;
        };
        prefix.push((x.index(), v));
        space
            .store
            .assign(x, v)
            .map_err(|_| HarnessError::Baseline(format!("cannot assign S_{} = {v}", x.index())))?;
        if propagate(&mut space, &set, Schedule::Touched, &mut stats) == Fixpoint::Failed {
            return Err(HarnessError::Baseline(format!(
                "propagation failed after {} assignments",
                prefix.len()
            )));
        }
    }
    Ok(prefix)
}

/// Filtering strength of the half-checking propagators after assigning a
/// fraction of the successors along the same Warnsdorff path.
pub fn filter_experiment(
    inst: Arc<TspInstance>,
    cfg: &FilterConfig,
) -> Result<FilterExperimentResult, HarnessError> {
    let model = CircuitModel::new(inst.clone())?;
    if cfg.start_node >= model.n() {
        return Err(HarnessError::Config(format!(
            "start node {} out of range",
            cfg.start_node
        )));
    }
    let k = ((cfg.assign_frac * model.n() as f64).round() as usize).clamp(1, model.n());
    let prefix = warnsdorff_prefix(&model, cfg, k)?;
    let hc_cfg = HalfCheckConfig {
        start_node: cfg.start_node,
        seed: cfg.seed,
        ..HalfCheckConfig::default()
    };

    let configs: [(&str, &[PropKind]); 5] = [
        ("standard", &[]),
        ("wncl", &[PropKind::Wncl]),
        ("cbp", &[PropKind::Cbp]),
        ("onetree", &[PropKind::OneTree]),
        ("all", &[PropKind::Wncl, PropKind::Cbp, PropKind::OneTree]),
    ];
    let baseline = measure(
        &model,
        &replay(&model, model.standard_propagators(), &prefix),
    );
    if baseline.failed {
        return Err(HarnessError::Baseline(
            "standard model failed on the prefix".into(),
        ));
    }
    let mut rows = Vec::new();
    for (name, kinds) in configs {
        let mut props = model.standard_propagators();
        for &kind in kinds {
            props.push(build_propagator(kind, &model, &hc_cfg)?);
        }
        let raw = measure(&model, &replay(&model, props, &prefix));
        info!("{name}: {raw:?}");
        rows.push(ConfigRow {
            name: name.to_string(),
            raw,
            dom: Cell::of(raw.dom_sum as i64, baseline.dom_sum as i64, raw.failed),
            min_cost: Cell::of(raw.min_cost, baseline.min_cost, raw.failed),
            max_cost: Cell::of(raw.max_cost, baseline.max_cost, raw.failed),
        });
    }
    Ok(FilterExperimentResult {
        instance: inst.name.clone(),
        n: model.n(),
        config: cfg.clone(),
        prefix,
        baseline,
        rows,
    })
}

pub fn cmd_filter_experiment(
    path: impl AsRef<Path>,
    cfg: &FilterConfig,
) -> Result<FilterExperimentResult, HarnessError> {
    let inst = TspInstance::read(path)?;
    filter_experiment(Arc::new(inst), cfg)
}
