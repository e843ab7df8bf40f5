//! Graph algorithms behind the bound propagators: Kruskal with forced
//! edges, minimum 1-trees, greedy matching, Hierholzer's Euler circuit and
//! shortcutting an Euler walk into a Hamiltonian circuit.
//!
//! Edge lists are expected in non-decreasing weight order with ties broken
//! by endpoints, which is the order [`crate::tsplib::TspInstance`] keeps.

mod euler;
mod kruskal;
mod matching;
mod shortcut;

pub use euler::euler_circuit;
pub use kruskal::{kruskal_with_fixed, min_one_tree, OneTree, SpanningTree};
pub use matching::{greedy_matching, Matching};
pub use shortcut::{shortcut, Shortcut};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("forced edges contain a cycle")]
    FixedCycle,
    #[error("more than two forced edges at the 1-tree root {0}")]
    TooManyFixedAtRoot(usize),
    #[error("node {0} has odd degree")]
    OddDegree(usize),
}
