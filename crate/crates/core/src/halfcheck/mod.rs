//! Half-checking propagators for cost-circuit on Euclidean instances.
//!
//! Each of them only promises that a fully assigned store it accepts is a
//! Hamiltonian circuit whose weight equals `c`; along the way they may cut
//! genuine (usually dominated) solutions. They belong in incomplete assets.

mod cbp;
mod ncl;
mod onetree;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use cbp::{cbp_bound, Cbp, CbpOutcome, CbpWitness, DEFAULT_CBP_THRESHOLD};
pub use ncl::{ncl_precompute, ClTable, Ncl, Wncl, DEFAULT_NCL_NODE_CAP};
pub use onetree::{onetree_bound, select_root, OneTree};

use crate::circuit::CircuitModel;
use crate::kernel::{FailPropagator, PropRef};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HalfCheckError {
    #[error(
        "refusing to precompute crossing lines for {n} nodes (limit {cap}); \
         the table grows with n^4, use wncl instead"
    )]
    NclTooLarge { n: usize, cap: usize },
    #[error("unknown propagator `{0}` (expected ncl, wncl, cbp, onetree or fail)")]
    UnknownProp(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PropKind {
    Ncl,
    Wncl,
    Cbp,
    OneTree,
    Fail,
}

impl PropKind {
    pub const ALL: [PropKind; 4] = [
        PropKind::Ncl,
        PropKind::Wncl,
        PropKind::Cbp,
        PropKind::OneTree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropKind::Ncl => "ncl",
            PropKind::Wncl => "wncl",
            PropKind::Cbp => "cbp",
            PropKind::OneTree => "onetree",
            PropKind::Fail => "fail",
        }
    }
}

impl fmt::Display for PropKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PropKind {
    type Err = HalfCheckError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "ncl" => Ok(PropKind::Ncl),
            "wncl" => Ok(PropKind::Wncl),
            "cbp" => Ok(PropKind::Cbp),
            "onetree" | "one-tree" => Ok(PropKind::OneTree),
            "fail" => Ok(PropKind::Fail),
            other => Err(HalfCheckError::UnknownProp(other.to_string())),
        }
    }
}

/// Parse a comma separated list such as `wncl,cbp,onetree`. An empty
/// string or `none` gives the empty list.
pub fn parse_props(s: &str) -> Result<Vec<PropKind>, HalfCheckError> {
    let s = s.trim();
    if s.is_empty() || s == "none" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for part in s.split(',') {
        let k: PropKind = part.parse()?;
        if !out.contains(&k) {
            out.push(k);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct HalfCheckConfig {
    /// First node of the Warnsdorff path that wncl follows.
    pub start_node: usize,
    pub seed: u64,
    pub cbp_threshold: f64,
    pub ncl_node_cap: usize,
}

impl Default for HalfCheckConfig {
    fn default() -> Self {
        Self {
            start_node: 0,
            seed: 0,
            cbp_threshold: DEFAULT_CBP_THRESHOLD,
            ncl_node_cap: DEFAULT_NCL_NODE_CAP,
        }
    }
}

pub fn build_propagator(
    kind: PropKind,
    model: &CircuitModel,
    cfg: &HalfCheckConfig,
) -> Result<PropRef, HalfCheckError> {
    Ok(match kind {
        PropKind::Ncl => {
            let table = ncl_precompute(model.instance(), cfg.ncl_node_cap)?;
            Arc::new(Ncl::new(model, Arc::new(table)))
        }
        PropKind::Wncl => Arc::new(Wncl::new(model, cfg.start_node)),
        PropKind::Cbp => Arc::new(Cbp::new(model).with_threshold(cfg.cbp_threshold)),
        PropKind::OneTree => Arc::new(OneTree::new(model, cfg.seed)),
        PropKind::Fail => {
            let mut scope = model.succ_vars();
            scope.push(model.cost());
            Arc::new(FailPropagator::over(scope))
        }
    })
}
