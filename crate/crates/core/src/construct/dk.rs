//! The recursive distribution `D_k` on `2^k·t` elements.
//!
//! For `k = 1` the permutation is uniform. For `k > 1` the ground set is cut
//! into its smaller half `S_0` and larger half `S_1`; both halves are permuted
//! recursively and independently, giving `π_0` and `π_1`. The output is the
//! first `h - t` elements of `π_0`, then the first `h - t` elements of `π_1`,
//! then a uniformly random ordering of the `2t` elements left over, where
//! `h = 2^(k-1)·t`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dist::{Limits, PermutationDistribution};
use crate::error::{Error, Result};
use crate::perm::{all_permutations, Permutation};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DkParams {
    pub k: u32,
    pub t: usize,
}

impl DkParams {
    pub fn new(k: u32, t: usize) -> Result<Self> {
        if k == 0 || t == 0 {
            return Err(Error::InvalidArgument("k and t must be positive".into()));
        }
        if k >= usize::BITS - 1 || t > usize::MAX >> k {
            return Err(Error::InvalidArgument(format!("2^{k}·{t} overflows")));
        }
        Ok(DkParams { k, t })
    }

    /// `2^k·t`.
    pub fn ground_size(&self) -> usize {
        self.t << self.k
    }
}

/// A `D_k` permutation of the ranks `0..2^k·t`.
fn sample_ranks<R: Rng + ?Sized>(k: u32, t: usize, rng: &mut R) -> Vec<usize> {
    if k == 1 {
        let mut v: Vec<usize> = (0..2 * t).collect();
        v.shuffle(rng);
        return v;
    }
    let h = t << (k - 1);
    let pi0 = sample_ranks(k - 1, t, rng);
    let pi1: Vec<usize> = sample_ranks(k - 1, t, rng).into_iter().map(|r| r + h).collect();
    let mut tail: Vec<usize> = pi0[h - t..].iter().chain(&pi1[h - t..]).copied().collect();
    tail.shuffle(rng);
    let mut out = Vec::with_capacity(2 * h);
    out.extend_from_slice(&pi0[..h - t]);
    out.extend_from_slice(&pi1[..h - t]);
    out.extend(tail);
    out
}

/// One `D_k` ordering of `ground`: the permutation is drawn on ranks and
/// step `i` outputs the element of rank `π'(i)` in ascending order of
/// `ground`.
pub fn dk_sample<R: Rng + ?Sized>(params: DkParams, ground: &[usize], rng: &mut R) -> Result<Vec<usize>> {
    if ground.len() != params.ground_size() {
        return Err(Error::SizeMismatch {
            expected: params.ground_size(),
            found: ground.len(),
        });
    }
    let mut sorted = ground.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("ground set has repeated elements".into()));
    }
    Ok(sample_ranks(params.k, params.t, rng)
        .into_iter()
        .map(|r| sorted[r])
        .collect())
}

/// One `D_k` permutation of `[2^k·t]`.
pub fn dk_permutation<R: Rng + ?Sized>(params: DkParams, rng: &mut R) -> Permutation {
    let order = sample_ranks(params.k, params.t, rng).into_iter().map(|r| r + 1).collect();
    Permutation::new(order).expect("ranks form a bijection")
}

fn rank_distribution(k: u32, t: usize) -> BTreeMap<Vec<usize>, Rational> {
    let shuffles = |m: usize| -> (Vec<Vec<usize>>, Rational) {
        let all: Vec<Vec<usize>> = all_permutations(m)
            .into_iter()
            .map(|p| p.into_order().into_iter().map(|x| x - 1).collect())
            .collect();
        let pr = Rational::unit_fraction(all.len() as u64);
        (all, pr)
    };
    if k == 1 {
        let (all, pr) = shuffles(2 * t);
        return all.into_iter().map(|p| (p, pr.clone())).collect();
    }
    let h = t << (k - 1);
    let half = rank_distribution(k - 1, t);
    let (orderings, pr_shuffle) = shuffles(2 * t);
    let mut out: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
    for (a, pa) in &half {
        for (b, pb) in &half {
            let pab = pa * pb * &pr_shuffle;
            let tail: Vec<usize> = a[h - t..].iter().copied().chain(b[h - t..].iter().map(|r| r + h)).collect();
            let mut head: Vec<usize> = a[..h - t].to_vec();
            head.extend(b[..h - t].iter().map(|r| r + h));
            for o in &orderings {
                let mut p = head.clone();
                p.extend(o.iter().map(|&i| tail[i]));
                *out.entry(p).or_default() += &pab;
            }
        }
    }
    out
}

/// The exact distribution `D_k` on `[2^k·t]`.
pub fn dk_distribution(params: DkParams, limits: &Limits) -> Result<PermutationDistribution> {
    let size = params.ground_size();
    limits.check_explicit(size)?;
    let support = rank_distribution(params.k, params.t)
        .into_iter()
        .map(|(p, pr)| {
            let order = p.into_iter().map(|r| r + 1).collect();
            (Permutation::new(order).expect("ranks form a bijection"), pr)
        })
        .collect();
    PermutationDistribution::new(size, support)
}
