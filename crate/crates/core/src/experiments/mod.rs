//! Randomized experiments driven by pluggable permutation and subset
//! sources.

pub mod kkt;
pub mod quicksort;
pub mod sources;
pub mod stats;

pub use kkt::{kkt_single_batch, WeightedGraph};
pub use quicksort::quicksort_comparisons;
pub use sources::{
    DistributionSource, DkSource, FamilySource, FixedSubsets, MemorylessSource, PermutationSource, SubsetSource,
    UniformSource, UniformSubsets,
};
pub use stats::{ExperimentResult, Moments};

use crate::cost::{total_cost, CostFunction};
use crate::error::{Error, Result};

/// Mean of `c(π)` over `trials` permutations drawn from `source`.
pub fn incremental_cost_experiment(
    source: &dyn PermutationSource,
    c: &CostFunction,
    trials: u64,
    seed: u64,
) -> Result<ExperimentResult> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if c.n() != source.n() {
        return Err(Error::DimensionMismatch {
            expected: c.n(),
            found: source.n(),
        });
    }
    let values = stats::run_trials(trials, seed, |rng| {
        total_cost(c, &source.sample(rng)).expect("dimensions checked").to_f64()
    });
    Ok(ExperimentResult::from_values("generic", source.describe(), seed, values).with_extra("n", c.n()))
}
