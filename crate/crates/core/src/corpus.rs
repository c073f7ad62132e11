//! Named test distributions and random generators for them.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::construct::{dk_distribution, lcm_family, DkParams};
use crate::dist::{rotation_distribution, uniform_distribution, Limits, PermutationDistribution};
use crate::error::Result;
use crate::perm::Permutation;
use crate::rational::Rational;

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub dist: PermutationDistribution,
}

impl CorpusEntry {
    fn new(name: impl Into<String>, dist: PermutationDistribution) -> Self {
        CorpusEntry { name: name.into(), dist }
    }
}

/// A uniformly random permutation of `[n]`.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    Permutation::new(order).expect("shuffle of 1..=n")
}

/// Up to `max_support` random permutations with random integer weights in
/// `1..=20`, normalized.
pub fn random_distribution<R: Rng + ?Sized>(n: usize, max_support: usize, rng: &mut R) -> PermutationDistribution {
    let size = rng.random_range(1..=max_support.max(1));
    let entries: Vec<(Permutation, Rational)> = (0..size)
        .map(|_| (random_permutation(n, rng), Rational::from(rng.random_range(1..=20u64))))
        .collect();
    PermutationDistribution::from_weights(n, entries).expect("positive weights")
}

/// A random mixture of `components` relabeled copies of `U(lcm_family(n))`,
/// which stays exactly minwise.
pub fn random_minwise_mixture<R: Rng + ?Sized>(
    n: usize,
    components: usize,
    rng: &mut R,
    limits: &Limits,
) -> Result<PermutationDistribution> {
    let base = lcm_family(n, limits)?;
    let mut entries = Vec::new();
    for _ in 0..components.max(1) {
        let sigma = random_permutation(n, rng);
        let w = Rational::from(rng.random_range(1..=20u64));
        for p in base.members() {
            entries.push((p.relabel(&sigma)?, w.clone()));
        }
    }
    PermutationDistribution::from_weights(n, entries)
}

/// Uniform, point masses, rotations, lcm families and `D_k` for every
/// `n <= max_n` the limits allow.
pub fn standard_corpus(max_n: usize, limits: &Limits) -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    for n in 1..=max_n.min(limits.explicit_n) {
        out.push(CorpusEntry::new(format!("uniform-{n}"), uniform_distribution(n, limits)?));
        out.push(CorpusEntry::new(
            format!("identity-{n}"),
            PermutationDistribution::point_mass(Permutation::identity(n)),
        ));
        let reversed = Permutation::new((1..=n).rev().collect())?;
        out.push(CorpusEntry::new(format!("reversed-{n}"), PermutationDistribution::point_mass(reversed)));
        out.push(CorpusEntry::new(format!("rotation-{n}"), rotation_distribution(n)?));
        out.push(CorpusEntry::new(
            format!("lcm-{n}"),
            PermutationDistribution::uniform_over(&lcm_family(n, limits)?)?,
        ));
    }
    for (k, t) in [(1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (2, 2)] {
        let params = DkParams::new(k, t)?;
        if params.ground_size() <= max_n.min(limits.explicit_n) {
            out.push(CorpusEntry::new(format!("dk-{k}-{t}"), dk_distribution(params, limits)?));
        }
    }
    Ok(out)
}
