//! Drivers behind the command line tool: solving with a portfolio, the
//! filtering experiment and the randomized half-checking oracle.

mod filter;
mod oracle;
mod solve;

pub use filter::{
    cmd_filter_experiment, filter_experiment, Cell, ConfigRow, FilterConfig,
    FilterExperimentResult, Measure,
};
pub use oracle::{hc_oracle_suite, oracle_for, random_instance, OracleConfig, OracleReport};
pub use solve::{build_assets, cmd_solve, solve_instance, RunReport, RunStatistics, SolveConfig};

use crate::circuit::ModelError;
use crate::halfcheck::HalfCheckError;
use crate::kernel::KernelError;
use crate::tsplib::ParseError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    HalfCheck(#[from] HalfCheckError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("baseline failed: {0}")]
    Baseline(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}
