//! Rounding a transition graph into an explicit family by moving `t`
//! pebbles from `[n]` down to `∅`.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use serde::Serialize;

use super::even_split::{even_split, EvenSplitInstance};
use crate::dist::Limits;
use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::perm::{Permutation, PermutationFamily};
use crate::rational::Rational;
use crate::transition::TransitionGraph;

/// Which preconditions [`pebble`] enforces before running.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PreconditionCheck {
    /// Integer reciprocal edge weights and `8n/(δ_V δ_E ε) <= t <= 1/p`.
    Full,
    /// Integer reciprocal edge weights and `t >= 8n/(δ_V δ_E ε)`.
    LowerBoundOnly,
    /// Integer reciprocal edge weights and `t <= 1/p`.
    DistinctnessOnly,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PebbleOptions {
    pub t: u64,
    pub epsilon: Rational,
    pub check: PreconditionCheck,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PebbleOutcome {
    pub family: PermutationFamily,
    /// `t·w(S)·w(S, S')` is integral on every positive edge, so the family's
    /// transition graph equals the input graph.
    pub exact_clause: bool,
    /// `8n/(δ_V δ_E ε)`.
    pub t_lower_bound: Rational,
    /// Reciprocal of the largest memoryless walk probability.
    pub distinct_t_max: Rational,
}

/// `8n/(δ_V δ_E ε)`.
pub fn pebble_t_lower_bound(g: &TransitionGraph, epsilon: &Rational) -> Rational {
    Rational::from(8 * g.n()) / (g.min_node_weight() * g.min_edge_weight() * epsilon)
}

/// `t·w(S)·w(S, S')` is an integer for every positive edge.
pub fn exact_clause_holds(g: &TransitionGraph, t: u64) -> bool {
    let tr = Rational::from(t);
    g.edges().all(|(s, _, w)| (&tr * g.node_weight(s) * w).is_integer())
}

fn check_reciprocals(g: &TransitionGraph) -> Result<()> {
    for (s, x, w) in g.edges() {
        if !w.recip().is_integer() {
            return Err(Error::NonIntegerReciprocal {
                mask: s,
                element: x,
                weight: w.clone(),
            });
        }
    }
    Ok(())
}

/// Pebble groups at one node: the drop sequence so far and how many pebbles
/// followed it.
type Groups = Vec<(Vec<u8>, u64)>;

/// Runs the pebble algorithm with `t` pebbles.
///
/// At every node the pebbles are grouped by the path they arrived on and the
/// groups are split across the out-edges in proportion to the edge weights
/// with [`even_split`]. Each pebble's drop sequence, read backwards, is a
/// member of the family. Members are returned in lexicographic order.
pub fn pebble(g: &TransitionGraph, opts: &PebbleOptions, limits: &Limits) -> Result<PebbleOutcome> {
    let n = g.n();
    let t = opts.t;
    if t == 0 {
        return Err(Error::PreconditionViolated("t must be at least 1".into()));
    }
    if !opts.epsilon.is_positive() {
        return Err(Error::PreconditionViolated(format!("ε = {} must be positive", opts.epsilon)));
    }
    limits.check_family(t as u128, "pebble family")?;
    let t_lower_bound = pebble_t_lower_bound(g, &opts.epsilon);
    let distinct_t_max = g.max_walk_probability().recip();
    let tr = Rational::from(t);
    let (need_lower, need_upper) = match opts.check {
        PreconditionCheck::Full => (true, true),
        PreconditionCheck::LowerBoundOnly => (true, false),
        PreconditionCheck::DistinctnessOnly => (false, true),
        PreconditionCheck::None => (false, false),
    };
    if opts.check != PreconditionCheck::None {
        check_reciprocals(g)?;
    }
    if need_lower && tr < t_lower_bound {
        return Err(Error::PreconditionViolated(format!(
            "t = {t} is below 8n/(δ_V δ_E ε) = {t_lower_bound}"
        )));
    }
    if need_upper && tr > distinct_t_max {
        return Err(Error::PreconditionViolated(format!(
            "t = {t} exceeds 1/p = {distinct_t_max}"
        )));
    }

    let mut at: BTreeMap<SubsetMask, Groups> = BTreeMap::new();
    at.insert(g.full_set(), vec![(Vec::new(), t)]);
    for level in g.levels().into_iter().skip(1).rev() {
        for s in level {
            let Some(mut groups) = at.remove(&s) else { continue };
            groups.sort();
            let out = g.out_edges(s);
            let inst = EvenSplitInstance::new(
                groups.iter().map(|(_, c)| *c).collect(),
                out.iter().map(|(_, w)| w.clone()).collect(),
            )?;
            let counts = even_split(&inst)?;
            for ((path, _), row) in groups.into_iter().zip(counts) {
                for ((x, _), c) in out.iter().zip(row) {
                    if c == 0 {
                        continue;
                    }
                    let mut next = path.clone();
                    next.push(*x as u8);
                    at.entry(s.without(*x)).or_default().push((next, c));
                }
            }
        }
    }
    let mut members = Vec::with_capacity(t as usize);
    for (path, count) in at.remove(&SubsetMask::EMPTY).unwrap_or_default() {
        let order: Vec<usize> = path.iter().rev().map(|&x| x as usize).collect();
        let p = Permutation::new(order)?;
        for _ in 0..count {
            members.push(p.clone());
        }
    }
    members.sort();
    Ok(PebbleOutcome {
        family: PermutationFamily::new(n, members)?,
        exact_clause: exact_clause_holds(g, t),
        t_lower_bound,
        distinct_t_max,
    })
}

/// [`pebble`] with every precondition enforced.
pub fn pebble_family(g: &TransitionGraph, t: u64, epsilon: &Rational, limits: &Limits) -> Result<PermutationFamily> {
    let opts = PebbleOptions {
        t,
        epsilon: epsilon.clone(),
        check: PreconditionCheck::Full,
    };
    Ok(pebble(g, &opts, limits)?.family)
}

/// Worst-case deviation of one graph's weights from a reference graph's.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproximationReport {
    /// Largest `|w'(S)/w(S) - 1|` over the reference's positive nodes.
    pub node_deviation: Rational,
    /// Largest `|w'(S,S')/w(S,S') - 1|` over the reference's positive edges.
    pub edge_deviation: Rational,
    pub node_tolerance: Rational,
    pub edge_tolerance: Rational,
    /// Some node or edge of the approximation has no counterpart in the reference.
    pub extra_support: bool,
    pub within: bool,
}

/// Checks node ratios against `1 ± ε` and edge ratios against `1 ± ε/(4n)`.
pub fn approximation_report(reference: &TransitionGraph, approx: &TransitionGraph, epsilon: &Rational) -> ApproximationReport {
    let one = Rational::one();
    let mut node_dev = Rational::zero();
    for (s, w) in reference.nodes() {
        node_dev = node_dev.max((approx.node_weight(s) / w - &one).abs());
    }
    let mut edge_dev = Rational::zero();
    for (s, x, w) in reference.edges() {
        edge_dev = edge_dev.max((approx.edge_weight(s, x) / w - &one).abs());
    }
    let extra = approx.edges().any(|(s, x, _)| reference.edge_weight(s, x).is_zero());
    let node_tol = epsilon.clone();
    let edge_tol = epsilon / Rational::from(4 * reference.n());
    ApproximationReport {
        within: !extra && node_dev <= node_tol && edge_dev <= edge_tol,
        node_deviation: node_dev,
        edge_deviation: edge_dev,
        node_tolerance: node_tol,
        edge_tolerance: edge_tol,
        extra_support: extra,
    }
}

/// Smallest integer `t` meeting the lower bound `8n/(δ_V δ_E ε)`.
pub fn min_pebble_count(g: &TransitionGraph, epsilon: &Rational) -> Option<u64> {
    pebble_t_lower_bound(g, epsilon).ceil().to_u64()
}
