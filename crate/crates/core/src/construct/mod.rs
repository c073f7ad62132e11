//! Explicit constructions of permutation families and distributions.

mod alpha;
mod dk;
mod even_split;
mod flow;
mod lcm;
mod pebble;

use serde::Serialize;

pub use alpha::{alpha_uniform_family, AlphaUniformOutcome};
pub use dk::{dk_distribution, dk_permutation, dk_sample, DkParams};
pub use even_split::{even_split, EvenSplitInstance};
pub use lcm::{lcm_check, lcm_family, lcm_upto, LcmCheck};
pub use pebble::{
    approximation_report, exact_clause_holds, pebble_t_lower_bound, min_pebble_count, pebble, pebble_family, ApproximationReport,
    PebbleOptions, PebbleOutcome, PreconditionCheck,
};

use crate::rational::Rational;

/// Metadata written next to a constructed family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructionSidecar {
    pub construction: String,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub achieved_alpha: Option<Rational>,
    pub audits: serde_json::Value,
}
