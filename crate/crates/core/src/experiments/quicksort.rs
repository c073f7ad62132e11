//! Quicksort comparison counts with pivots taken in insertion order.

use crate::error::{Error, Result};
use crate::perm::{all_permutations, Permutation};
use crate::rational::Rational;

use super::sources::PermutationSource;
use super::stats::{run_trials, ExperimentResult};

/// Comparisons made by quicksort on keys `1..=n` when pivots are chosen in
/// the order of `π`: the pair `x < y` is compared iff `x` or `y` precedes,
/// in `π`, every key strictly between them.
pub fn comparisons_pair_rule(pi: &Permutation) -> u64 {
    let pos = pi.positions();
    let n = pi.n();
    let mut count = 0;
    for x in 1..=n {
        let mut between = usize::MAX;
        for y in x + 1..=n {
            if pos[x].min(pos[y]) < between {
                count += 1;
            }
            between = between.min(pos[y]);
        }
    }
    count
}

/// Comparisons made by a direct recursive quicksort that picks as pivot the
/// key appearing earliest in `π`.
pub fn comparisons_instrumented(pi: &Permutation) -> u64 {
    fn sort(keys: &[usize], pos: &[usize]) -> u64 {
        if keys.len() < 2 {
            return 0;
        }
        let pivot = *keys.iter().min_by_key(|&&k| pos[k]).expect("nonempty");
        let (mut lo, mut hi) = (Vec::new(), Vec::new());
        let mut count = 0;
        for &k in keys {
            if k == pivot {
                continue;
            }
            count += 1;
            if k < pivot {
                lo.push(k);
            } else {
                hi.push(k);
            }
        }
        count + sort(&lo, pos) + sort(&hi, pos)
    }
    let keys: Vec<usize> = (1..=pi.n()).collect();
    sort(&keys, &pi.positions())
}

/// `H_n = Σ_{i=1}^n 1/i`.
pub fn harmonic(n: usize) -> Rational {
    (1..=n as u64).map(Rational::unit_fraction).sum()
}

/// `2(n+1)H_n - 4n`, the expected comparison count under a uniform order.
pub fn expected_comparisons_closed_form(n: usize) -> Rational {
    Rational::from(2 * (n + 1)) * harmonic(n) - Rational::from(4 * n)
}

/// `2nH_n`.
pub fn comparison_upper_bound(n: usize) -> Rational {
    Rational::from(2 * n) * harmonic(n)
}

/// Exact mean comparison count over all of `S_n`.
pub fn expected_comparisons_exhaustive(n: usize, max_n: usize) -> Result<Rational> {
    if n == 0 || n > max_n {
        return Err(Error::TooLarge {
            what: "exhaustive quicksort enumeration",
            size: n as u128,
            limit: max_n as u128,
        });
    }
    let all = all_permutations(n);
    let total: u64 = all.iter().map(comparisons_pair_rule).sum();
    Ok(Rational::from(total) / Rational::from(all.len()))
}

pub fn quicksort_comparisons(source: &dyn PermutationSource, trials: u64, seed: u64) -> Result<ExperimentResult> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let n = source.n();
    let values = run_trials(trials, seed, |rng| comparisons_pair_rule(&source.sample(rng)) as f64);
    let closed = expected_comparisons_closed_form(n);
    let bound = comparison_upper_bound(n);
    Ok(ExperimentResult::from_values("quicksort", source.describe(), seed, values)
        .with_extra("n", n)
        .with_extra("closed_form", closed.to_string())
        .with_extra("closed_form_value", closed.to_f64())
        .with_extra("upper_bound_2nHn", bound.to_f64()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_keys_one_comparison() {
        for p in all_permutations(2) {
            assert_eq!(comparisons_pair_rule(&p), 1);
        }
    }

    #[test]
    fn pair_rule_matches_instrumented_sort() {
        for n in 1..=6 {
            for p in all_permutations(n) {
                assert_eq!(comparisons_pair_rule(&p), comparisons_instrumented(&p));
            }
        }
    }

    #[test]
    fn closed_form_matches_enumeration() {
        assert_eq!(expected_comparisons_closed_form(4), Rational::new(29, 6));
        for n in 1..=7 {
            assert_eq!(expected_comparisons_exhaustive(n, 8).unwrap(), expected_comparisons_closed_form(n));
        }
    }
}
