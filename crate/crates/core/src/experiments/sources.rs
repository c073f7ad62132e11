//! Pluggable permutation and subset sources for the experiments.

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::construct::{dk_permutation, DkParams};
use crate::dist::PermutationDistribution;
use crate::error::{Error, Result};
use crate::perm::{Permutation, PermutationFamily};
use crate::transition::TransitionGraph;

pub trait PermutationSource: Send + Sync {
    fn n(&self) -> usize;
    fn sample(&self, rng: &mut ChaCha8Rng) -> Permutation;
    fn describe(&self) -> String;
}

#[derive(Clone, Debug)]
pub struct UniformSource {
    n: usize,
}

impl UniformSource {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        Ok(UniformSource { n })
    }
}

impl PermutationSource for UniformSource {
    fn n(&self) -> usize {
        self.n
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Permutation {
        let mut order: Vec<usize> = (1..=self.n).collect();
        order.shuffle(rng);
        Permutation::new(order).expect("shuffle of [n]")
    }

    fn describe(&self) -> String {
        format!("uniform(n={})", self.n)
    }
}

/// Uniform over the members of a family, with multiplicity.
#[derive(Clone, Debug)]
pub struct FamilySource {
    family: PermutationFamily,
    label: String,
}

impl FamilySource {
    pub fn new(family: PermutationFamily, label: impl Into<String>) -> Self {
        FamilySource {
            family,
            label: label.into(),
        }
    }
}

impl PermutationSource for FamilySource {
    fn n(&self) -> usize {
        self.family.n()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Permutation {
        self.family.members()[rng.random_range(0..self.family.t())].clone()
    }

    fn describe(&self) -> String {
        format!("family({}, n={}, t={})", self.label, self.family.n(), self.family.t())
    }
}

/// Samples an explicit distribution; the exact probabilities are converted to
/// `f64` cumulative weights.
#[derive(Clone, Debug)]
pub struct DistributionSource {
    dist: PermutationDistribution,
    cumulative: Vec<f64>,
    label: String,
}

impl DistributionSource {
    pub fn new(dist: PermutationDistribution, label: impl Into<String>) -> Self {
        let mut acc = 0.0;
        let cumulative = dist
            .support()
            .iter()
            .map(|(_, p)| {
                acc += p.to_f64();
                acc
            })
            .collect();
        DistributionSource {
            dist,
            cumulative,
            label: label.into(),
        }
    }
}

impl PermutationSource for DistributionSource {
    fn n(&self) -> usize {
        self.dist.n()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Permutation {
        let u: f64 = rng.random::<f64>() * self.cumulative.last().copied().unwrap_or(1.0);
        let i = self.cumulative.partition_point(|c| *c <= u).min(self.dist.len() - 1);
        self.dist.support()[i].0.clone()
    }

    fn describe(&self) -> String {
        format!("distribution({}, n={}, support={})", self.label, self.dist.n(), self.dist.len())
    }
}

/// Random walks on a transition graph.
#[derive(Clone, Debug)]
pub struct MemorylessSource {
    graph: TransitionGraph,
}

impl MemorylessSource {
    pub fn new(graph: TransitionGraph) -> Self {
        MemorylessSource { graph }
    }
}

impl PermutationSource for MemorylessSource {
    fn n(&self) -> usize {
        self.graph.n()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Permutation {
        self.graph.sample_memoryless(rng)
    }

    fn describe(&self) -> String {
        format!("memoryless(n={})", self.graph.n())
    }
}

#[derive(Clone, Debug)]
pub struct DkSource {
    params: DkParams,
}

impl DkSource {
    pub fn new(params: DkParams) -> Self {
        DkSource { params }
    }
}

impl PermutationSource for DkSource {
    fn n(&self) -> usize {
        self.params.ground_size()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Permutation {
        dk_permutation(self.params, rng)
    }

    fn describe(&self) -> String {
        format!("dk(k={}, t={})", self.params.k, self.params.t)
    }
}

/// Chooses `size` of the indices `0..m`.
pub trait SubsetSource: Send + Sync {
    fn sample(&self, m: usize, size: usize, rng: &mut ChaCha8Rng) -> Vec<usize>;
    fn describe(&self) -> String;
}

/// Uniform over all size-`size` subsets.
#[derive(Clone, Copy, Debug, Default)]
pub struct UniformSubsets;

impl SubsetSource for UniformSubsets {
    fn sample(&self, m: usize, size: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let mut v = index::sample(rng, m, size).into_vec();
        v.sort_unstable();
        v
    }

    fn describe(&self) -> String {
        "uniform-subsets".into()
    }
}

/// Uniform over a fixed list of subsets. Used to show how low-entropy
/// samplers can be adversarial.
#[derive(Clone, Debug)]
pub struct FixedSubsets {
    choices: Vec<Vec<usize>>,
}

impl FixedSubsets {
    pub fn new(choices: Vec<Vec<usize>>) -> Result<Self> {
        if choices.is_empty() {
            return Err(Error::InvalidArgument("no subsets to choose from".into()));
        }
        Ok(FixedSubsets { choices })
    }
}

impl SubsetSource for FixedSubsets {
    fn sample(&self, _m: usize, _size: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
        self.choices[rng.random_range(0..self.choices.len())].clone()
    }

    fn describe(&self) -> String {
        format!("fixed-subsets({})", self.choices.len())
    }
}
