//! The exact backwards-uniform family of size `lcm(1, …, n)`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::pebble::{pebble, PebbleOptions, PreconditionCheck};
use crate::dist::Limits;
use crate::error::{Error, Result};
use crate::perm::PermutationFamily;
use crate::rational::Rational;
use crate::transition::uniform_transition_graph;

/// `lcm(1, 2, …, n)`.
pub fn lcm_upto(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc.lcm(&BigUint::from(k)))
}

fn binomial(n: u64, k: u64) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LcmCheck {
    pub n: u64,
    /// `lcm_k C(n, k)·k`.
    #[serde(serialize_with = "as_string")]
    pub a: BigUint,
    /// `lcm(1, …, n)`.
    #[serde(serialize_with = "as_string")]
    pub b: BigUint,
    pub equal: bool,
}

fn as_string<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Compares `lcm_{k in [n]} C(n, k)·k` with `lcm(1, …, n)`.
pub fn lcm_check(n: u64) -> Result<LcmCheck> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let a = (1..=n).fold(BigUint::one(), |acc, k| acc.lcm(&(binomial(n, k) * k)));
    let b = lcm_upto(n);
    Ok(LcmCheck {
        n,
        equal: a == b,
        a,
        b,
    })
}

/// Pebbles `G^U_n` with `t = lcm(1, …, n)`. Every `t·w(S)·w(S, S')` is an
/// integer, so the result is exactly backwards uniform and exactly minwise.
pub fn lcm_family(n: usize, limits: &Limits) -> Result<PermutationFamily> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let t = lcm_upto(n as u64);
    let t = match t.to_u64() {
        Some(t) if (t as u128) <= limits.family_size => t,
        _ => {
            return Err(Error::TooLarge {
                what: "lcm family",
                size: t.to_u128().unwrap_or(u128::MAX),
                limit: limits.family_size,
            })
        }
    };
    let g = uniform_transition_graph(n, limits)?;
    let opts = PebbleOptions {
        t,
        epsilon: Rational::one(),
        check: PreconditionCheck::DistinctnessOnly,
    };
    let out = pebble(&g, &opts, limits)?;
    debug_assert!(out.exact_clause);
    Ok(out.family)
}
