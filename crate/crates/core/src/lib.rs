//! Half-checking propagators for the cost-circuit constraint.
//!
//! The crate contains a small copying constraint solver ([`kernel`]), the
//! standard circuit filtering ([`circuit`]), three families of
//! solution-removing propagators for Euclidean TSP ([`halfcheck`]), the
//! graph and geometry algorithms they are built on, a Warnsdorff brancher,
//! and the experiment drivers used by the `hcprop` command line tool.

pub mod branching;
pub mod circuit;
pub mod geometry;
pub mod graphalg;
pub mod halfcheck;
pub mod harness;
pub mod kernel;
pub mod tsplib;

pub use kernel::{Domain, Store, VarId};
