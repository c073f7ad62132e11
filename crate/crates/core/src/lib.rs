//! Exact analysis and construction of low-entropy permutation distributions
//! for backwards analysis of randomized incremental algorithms.

pub mod audit;
pub mod construct;
pub mod corpus;
pub mod cost;
pub mod dist;
pub mod error;
pub mod experiments;
pub mod format;
pub mod mask;
pub mod oracle;
pub mod perm;
pub mod rational;
pub mod transition;
pub mod weightfn;

pub use cost::{total_cost, CostFunction};
pub use dist::{rotation_distribution, uniform_distribution, Limits, PermutationDistribution};
pub use error::{Error, Result};
pub use mask::SubsetMask;
pub use perm::{all_permutations, Permutation, PermutationFamily};
pub use rational::Rational;
pub use transition::{
    build_transition_graph, graphs_equal, memoryless_distribution, uniform_transition_graph, TransitionGraph,
};
