//! Backwards `α`-uniform families from `D_{lg α}` and the pebble algorithm.

use num_traits::ToPrimitive;
use serde::Serialize;

use super::dk::{dk_distribution, DkParams};
use super::lcm::lcm_family;
use super::pebble::{min_pebble_count, pebble, PebbleOptions, PreconditionCheck};
use crate::audit::min_backwards_alpha;
use crate::dist::{Limits, PermutationDistribution};
use crate::error::{Error, Result};
use crate::perm::PermutationFamily;
use crate::rational::{lcm_of_denominators, Rational};
use crate::transition::{build_transition_graph, graphs_equal, uniform_transition_graph};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlphaUniformOutcome {
    #[serde(skip)]
    pub family: PermutationFamily,
    /// Ground-set size after rounding up to a power of two.
    pub n: usize,
    /// Requested `α` after rounding up to a power of two.
    pub alpha: u64,
    pub k: u32,
    pub t: usize,
    /// Number of pebbles, which is the family size.
    pub pebbles: u64,
    /// Smallest `α'` for which the family's uniform distribution is
    /// backwards `α'`-uniform.
    pub achieved_alpha: Rational,
    /// The family's transition graph equals that of `D_k`.
    pub exact: bool,
}

fn round_up_pow2(what: &str, v: u64) -> u64 {
    let r = v.next_power_of_two();
    if r != v {
        log::warn!("{what} = {v} is not a power of two; using {r}");
    }
    r
}

/// A family whose uniform distribution is backwards `α'`-uniform with
/// `α' <= α`, built on `n = 2^k·t` elements with `k = lg α`.
///
/// The pebble count is the least common denominator of the joint weights
/// `w(S)·w(S, S')` of `D_k`'s transition graph, which reproduces that graph
/// exactly. When that count exceeds the family cap the lower bound
/// `⌈8n/(δ_V δ_E ε)⌉` is used instead. `α = 1` gives the lcm family.
pub fn alpha_uniform_family(n: usize, alpha: u64, epsilon: &Rational, limits: &Limits) -> Result<AlphaUniformOutcome> {
    if n == 0 || alpha == 0 {
        return Err(Error::InvalidArgument("n and α must be positive".into()));
    }
    let n = round_up_pow2("n", n as u64) as usize;
    let alpha = round_up_pow2("α", alpha);
    if alpha > n as u64 {
        return Err(Error::PreconditionViolated(format!("α = {alpha} exceeds n = {n}")));
    }
    let k = alpha.trailing_zeros();
    let t = n / alpha as usize;
    if k == 0 {
        let family = lcm_family(n, limits)?;
        let g = build_transition_graph(&PermutationDistribution::uniform_over(&family)?)?;
        return Ok(AlphaUniformOutcome {
            pebbles: family.t() as u64,
            achieved_alpha: min_backwards_alpha(&g),
            exact: graphs_equal(&g, &uniform_transition_graph(n, limits)?)?,
            family,
            n,
            alpha,
            k,
            t,
        });
    }
    let g = build_transition_graph(&dk_distribution(DkParams::new(k, t)?, limits)?)?;
    let joints: Vec<Rational> = g.edges().map(|(s, _, w)| g.node_weight(s) * w).collect();
    let lcd = lcm_of_denominators(joints.iter());
    let pebbles = match lcd.to_u64() {
        Some(v) if (v as u128) <= limits.family_size => v,
        _ => {
            let v = min_pebble_count(&g, epsilon).ok_or(Error::TooLarge {
                what: "pebble count",
                size: u128::MAX,
                limit: limits.family_size,
            })?;
            log::warn!("exact pebble count {lcd} exceeds the family cap; using the lower bound {v}");
            v
        }
    };
    let opts = PebbleOptions {
        t: pebbles,
        epsilon: epsilon.clone(),
        check: PreconditionCheck::None,
    };
    let out = pebble(&g, &opts, limits)?;
    let g2 = build_transition_graph(&PermutationDistribution::uniform_over(&out.family)?)?;
    Ok(AlphaUniformOutcome {
        achieved_alpha: min_backwards_alpha(&g2),
        exact: graphs_equal(&g2, &g)?,
        family: out.family,
        n,
        alpha,
        k,
        t,
        pebbles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::check_backwards_uniform;

    #[test]
    fn base_case_collapses_to_lcm_family() {
        let lim = Limits::default();
        let out = alpha_uniform_family(4, 2, &Rational::new(1, 2), &lim).unwrap();
        assert_eq!(out.family, lcm_family(4, &lim).unwrap());
        assert!(out.achieved_alpha.is_one());
        assert!(out.exact);
    }

    #[test]
    fn two_level_instances_are_alpha_uniform() {
        let lim = Limits::default();
        for (n, alpha) in [(4, 4), (8, 4)] {
            let out = alpha_uniform_family(n, alpha, &Rational::new(1, 2), &lim).unwrap();
            assert!(out.exact);
            let g = build_transition_graph(&PermutationDistribution::uniform_over(&out.family).unwrap()).unwrap();
            assert!(check_backwards_uniform(&g, &Rational::from(alpha)).passed);
            assert!(out.achieved_alpha <= Rational::from(alpha));
        }
    }

    #[test]
    fn rounds_and_rejects() {
        let lim = Limits::default();
        assert_eq!(alpha_uniform_family(3, 3, &Rational::new(1, 2), &lim).unwrap().n, 4);
        assert!(matches!(
            alpha_uniform_family(4, 8, &Rational::new(1, 2), &lim),
            Err(Error::PreconditionViolated(_))
        ));
    }
}
