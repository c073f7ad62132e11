//! Finite-support permutation distributions with exact probabilities.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{all_permutations, Permutation, PermutationFamily};
use crate::rational::Rational;

/// Size caps for the operations whose cost grows factorially or
/// exponentially.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest `n` for which all of `S_n` is enumerated.
    pub explicit_n: usize,
    /// Largest `n` for which the full subset lattice is materialized.
    pub lattice_n: usize,
    /// Largest explicit family or distribution support.
    pub family_size: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            explicit_n: 8,
            lattice_n: 20,
            family_size: 1_000_000,
        }
    }
}

impl Limits {
    pub fn check_explicit(&self, n: usize) -> Result<()> {
        if n > self.explicit_n {
            return Err(Error::TooLarge {
                what: "explicit permutation enumeration",
                size: n as u128,
                limit: self.explicit_n as u128,
            });
        }
        Ok(())
    }

    pub fn check_lattice(&self, n: usize) -> Result<()> {
        if n > self.lattice_n {
            return Err(Error::TooLarge {
                what: "subset lattice",
                size: n as u128,
                limit: self.lattice_n as u128,
            });
        }
        Ok(())
    }

    pub fn check_family(&self, size: u128, what: &'static str) -> Result<()> {
        if size > self.family_size {
            return Err(Error::TooLarge {
                what,
                size,
                limit: self.family_size,
            });
        }
        Ok(())
    }
}

/// A distribution `D` over `S_n` given by its support.
///
/// Probabilities are strictly positive and sum to exactly one; support
/// permutations are pairwise distinct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationDistribution {
    n: usize,
    support: Vec<(Permutation, Rational)>,
}

impl PermutationDistribution {
    pub fn new(n: usize, support: Vec<(Permutation, Rational)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let mut seen = HashSet::with_capacity(support.len());
        let mut total = Rational::zero();
        for (p, pr) in &support {
            if p.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.n(),
                });
            }
            if !pr.is_positive() {
                return Err(Error::InvalidDistribution(format!(
                    "probability {pr} of {p:?} is not positive"
                )));
            }
            if !seen.insert(p) {
                return Err(Error::InvalidDistribution(format!(
                    "permutation {p:?} listed twice"
                )));
            }
            total += pr;
        }
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(PermutationDistribution { n, support })
    }

    /// Builds a distribution from weighted entries, merging repeats and
    /// normalizing the total weight to one.
    pub fn from_weights(n: usize, weighted: impl IntoIterator<Item = (Permutation, Rational)>) -> Result<Self> {
        let mut merged: BTreeMap<Permutation, Rational> = BTreeMap::new();
        for (p, w) in weighted {
            if w.is_negative() {
                return Err(Error::InvalidDistribution(format!("negative weight {w}")));
            }
            *merged.entry(p).or_default() += w;
        }
        merged.retain(|_, w| w.is_positive());
        let total: Rational = merged.values().sum();
        if !total.is_positive() {
            return Err(Error::InvalidDistribution("total weight is zero".into()));
        }
        let support = merged.into_iter().map(|(p, w)| (p, w / &total)).collect();
        PermutationDistribution::new(n, support)
    }

    /// `U(X)` for a family `X`, counting repeated members with multiplicity.
    pub fn uniform_over(family: &PermutationFamily) -> Result<Self> {
        PermutationDistribution::from_weights(
            family.n(),
            family.members().iter().map(|p| (p.clone(), Rational::one())),
        )
    }

    pub fn point_mass(p: Permutation) -> Self {
        let n = p.n();
        PermutationDistribution {
            n,
            support: vec![(p, Rational::one())],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &[(Permutation, Rational)] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn probability_of(&self, p: &Permutation) -> Rational {
        self.support
            .iter()
            .find(|(q, _)| q == p)
            .map(|(_, pr)| pr.clone())
            .unwrap_or_default()
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        self.support
            .iter()
            .map(|(_, pr)| -pr.to_f64() * pr.ln())
            .sum()
    }

    /// Support sorted lexicographically.
    pub fn canonical(mut self) -> Self {
        self.support.sort_by(|a, b| a.0.cmp(&b.0));
        self
    }
}

/// `U(S_n)`, all `n!` permutations with probability `1/n!`.
pub fn uniform_distribution(n: usize, limits: &Limits) -> Result<PermutationDistribution> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    limits.check_explicit(n)?;
    let all = all_permutations(n);
    let pr = Rational::unit_fraction(all.len() as u64);
    Ok(PermutationDistribution {
        n,
        support: all.into_iter().map(|p| (p, pr.clone())).collect(),
    })
}

/// Uniform distribution over the `n` cyclic rotations of `1, 2, ..., n`.
pub fn rotation_distribution(n: usize) -> Result<PermutationDistribution> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let pr = Rational::unit_fraction(n as u64);
    let support = (0..n)
        .map(|r| {
            let order = (0..n).map(|i| (i + r) % n + 1).collect();
            (Permutation::new(order).expect("rotation is a bijection"), pr.clone())
        })
        .collect();
    PermutationDistribution::new(n, support)
}
