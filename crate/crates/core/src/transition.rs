//! Transition graphs on the subset lattice.
//!
//! The node `S` carries `w(S) = Pr[π([|S|]) = S]`; the edge `(S, S \ {s})`
//! carries `Pr[π(|S|) = s | π([|S|]) = S]`. Only nodes with positive weight
//! and edges with positive weight are stored. Every permutation in the
//! support walks `[n] → … → ∅` by dropping its last element at each step.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist::{Limits, PermutationDistribution};
use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::perm::Permutation;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    weight: Rational,
    /// Positive out-edges `(dropped element, weight)`, ascending by element.
    out: Vec<(usize, Rational)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionGraph {
    n: usize,
    nodes: BTreeMap<SubsetMask, Node>,
}

impl TransitionGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn full_set(&self) -> SubsetMask {
        SubsetMask::full(self.n).expect("n validated at construction")
    }

    /// `w(S)`; zero for sets without support.
    pub fn node_weight(&self, s: SubsetMask) -> Rational {
        self.nodes.get(&s).map(|n| n.weight.clone()).unwrap_or_default()
    }

    pub fn has_support(&self, s: SubsetMask) -> bool {
        self.nodes.contains_key(&s)
    }

    /// `w(S, S \ {x})`; zero when absent.
    pub fn edge_weight(&self, s: SubsetMask, x: usize) -> Rational {
        self.nodes
            .get(&s)
            .and_then(|node| {
                node.out
                    .binary_search_by_key(&x, |(e, _)| *e)
                    .ok()
                    .map(|i| node.out[i].1.clone())
            })
            .unwrap_or_default()
    }

    /// Positive out-edges of `S`, ascending by dropped element.
    pub fn out_edges(&self, s: SubsetMask) -> &[(usize, Rational)] {
        self.nodes.get(&s).map(|n| n.out.as_slice()).unwrap_or(&[])
    }

    /// Positive-support nodes in ascending mask order.
    pub fn nodes(&self) -> impl Iterator<Item = (SubsetMask, &Rational)> {
        self.nodes.iter().map(|(m, n)| (*m, &n.weight))
    }

    /// Positive edges `(S, dropped, weight)` in ascending `(S, dropped)` order.
    pub fn edges(&self) -> impl Iterator<Item = (SubsetMask, usize, &Rational)> {
        self.nodes
            .iter()
            .flat_map(|(m, n)| n.out.iter().map(move |(x, w)| (*m, *x, w)))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.values().map(|n| n.out.len()).sum()
    }

    /// Positive-support nodes grouped by size; `levels()[k]` holds the size-`k`
    /// sets in ascending mask order.
    pub fn levels(&self) -> Vec<Vec<SubsetMask>> {
        let mut levels = vec![Vec::new(); self.n + 1];
        for m in self.nodes.keys() {
            levels[m.len()].push(*m);
        }
        levels
    }

    /// `w(S)·w(S, S \ {x}) = Pr[π([|S|]) = S ∧ π(|S|) = x]`.
    pub fn joint(&self, s: SubsetMask, x: usize) -> Rational {
        self.node_weight(s) * self.edge_weight(s, x)
    }

    /// The edge of maximum weight out of `S`, ties broken toward the smallest
    /// element.
    pub fn max_edge(&self, s: SubsetMask) -> Option<(usize, &Rational)> {
        let mut best: Option<(usize, &Rational)> = None;
        for (x, w) in self.out_edges(s) {
            if best.is_none_or(|(_, bw)| w > bw) {
                best = Some((*x, w));
            }
        }
        best
    }

    /// Minimal positive node weight `δ_V`.
    pub fn min_node_weight(&self) -> Rational {
        self.nodes.values().map(|n| &n.weight).min().cloned().unwrap_or_default()
    }

    /// Minimal positive edge weight `δ_E`.
    pub fn min_edge_weight(&self) -> Rational {
        self.edges().map(|(_, _, w)| w).min().cloned().unwrap_or_default()
    }

    /// Number of distinct walks `[n] → ∅`, saturating at `u128::MAX`.
    pub fn walk_count(&self) -> u128 {
        let mut count: BTreeMap<SubsetMask, u128> = BTreeMap::new();
        for level in self.levels() {
            for s in level {
                let c = if s.is_empty() {
                    1
                } else {
                    self.out_edges(s).iter().fold(0u128, |acc, (x, _)| {
                        acc.saturating_add(count.get(&s.without(*x)).copied().unwrap_or(0))
                    })
                };
                count.insert(s, c);
            }
        }
        count.get(&self.full_set()).copied().unwrap_or(0)
    }

    /// Probability of the most likely permutation under the memoryless
    /// distribution.
    pub fn max_walk_probability(&self) -> Rational {
        let mut best: BTreeMap<SubsetMask, Rational> = BTreeMap::new();
        best.insert(self.full_set(), Rational::one());
        for level in self.levels().into_iter().rev() {
            for s in level {
                let Some(b) = best.get(&s).cloned() else { continue };
                for (x, w) in self.out_edges(s) {
                    let cand = &b * w;
                    let slot = best.entry(s.without(*x)).or_default();
                    if cand > *slot {
                        *slot = cand;
                    }
                }
            }
        }
        best.remove(&SubsetMask::EMPTY).unwrap_or_default()
    }

    /// Entropy (nats) of the memoryless distribution, by the chain rule over
    /// walk steps: `Σ_S w(S)·H(out-edges of S)`.
    pub fn memoryless_entropy(&self) -> f64 {
        self.nodes
            .values()
            .map(|node| {
                let h: f64 = node.out.iter().map(|(_, w)| -w.to_f64() * w.ln()).sum();
                node.weight.to_f64() * h
            })
            .sum()
    }

    /// Builds a graph from out-edge weights alone; node weights are derived
    /// by pushing probability mass down from `[n]`. Edge lists of nodes that
    /// receive no mass are ignored.
    pub fn from_edges(n: usize, edges: &BTreeMap<SubsetMask, Vec<(usize, Rational)>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("n must be at least 1".into()));
        }
        let full = SubsetMask::full(n)?;
        let mut mass: BTreeMap<SubsetMask, Rational> = BTreeMap::new();
        mass.insert(full, Rational::one());
        let mut nodes = BTreeMap::new();
        for size in (0..=n).rev() {
            let here: Vec<(SubsetMask, Rational)> = mass
                .iter()
                .filter(|(m, _)| m.len() == size)
                .map(|(m, w)| (*m, w.clone()))
                .collect();
            for (s, w) in here {
                mass.remove(&s);
                if size == 0 {
                    nodes.insert(s, Node { weight: w, out: Vec::new() });
                    continue;
                }
                let spec = edges
                    .get(&s)
                    .ok_or_else(|| Error::InvalidGraph(format!("node {s} has weight {w} but no out-edges")))?;
                let mut out: Vec<(usize, Rational)> = Vec::with_capacity(spec.len());
                for (x, ew) in spec {
                    if !s.contains(*x) {
                        return Err(Error::InvalidGraph(format!("edge from {s} drops non-member {x}")));
                    }
                    if ew.is_negative() || *ew > Rational::one() {
                        return Err(Error::InvalidGraph(format!("edge weight {ew} outside [0,1]")));
                    }
                    if ew.is_positive() {
                        out.push((*x, ew.clone()));
                    }
                }
                out.sort_by_key(|(x, _)| *x);
                if out.windows(2).any(|p| p[0].0 == p[1].0) {
                    return Err(Error::InvalidGraph(format!("node {s} lists an edge twice")));
                }
                let total: Rational = out.iter().map(|(_, w)| w).sum();
                if !total.is_one() {
                    return Err(Error::InvalidGraph(format!("out-edges of {s} sum to {total}")));
                }
                for (x, ew) in &out {
                    *mass.entry(s.without(*x)).or_default() += &w * ew;
                }
                nodes.insert(s, Node { weight: w, out });
            }
        }
        Ok(TransitionGraph { n, nodes })
    }

    /// Checks every structural invariant: unit weights at `[n]` and `∅`,
    /// weights in `[0, 1]`, out-edges summing to one, and node weights
    /// consistent with their in-edges.
    pub fn validate(&self) -> Result<()> {
        let full = self.full_set();
        if !self.node_weight(full).is_one() || !self.node_weight(SubsetMask::EMPTY).is_one() {
            return Err(Error::InvalidGraph("w([n]) and w(∅) must both be 1".into()));
        }
        let mut inflow: BTreeMap<SubsetMask, Rational> = BTreeMap::new();
        for (s, node) in &self.nodes {
            if !node.weight.is_positive() || node.weight > Rational::one() {
                return Err(Error::InvalidGraph(format!("node {s} has weight {}", node.weight)));
            }
            if s.is_empty() {
                continue;
            }
            let mut total = Rational::zero();
            for (x, w) in &node.out {
                if !s.contains(*x) || !w.is_positive() || *w > Rational::one() {
                    return Err(Error::InvalidGraph(format!("bad edge ({s}, {x}) = {w}")));
                }
                total += w;
                *inflow.entry(s.without(*x)).or_default() += &node.weight * w;
            }
            if !total.is_one() {
                return Err(Error::InvalidGraph(format!("out-edges of {s} sum to {total}")));
            }
        }
        for (s, node) in &self.nodes {
            if *s == full {
                continue;
            }
            let got = inflow.remove(s).unwrap_or_default();
            if got != node.weight {
                return Err(Error::InvalidGraph(format!(
                    "node {s} has weight {} but receives {got}",
                    node.weight
                )));
            }
        }
        if let Some((s, w)) = inflow.into_iter().find(|(_, w)| w.is_positive()) {
            return Err(Error::InvalidGraph(format!("edges push {w} into unlisted node {s}")));
        }
        Ok(())
    }

    pub fn to_json(&self) -> TransitionGraphJson {
        TransitionGraphJson {
            n: self.n,
            nodes: self
                .nodes()
                .map(|(mask, weight)| NodeJson {
                    mask: mask.bits(),
                    weight: weight.clone(),
                })
                .collect(),
            edges: self
                .edges()
                .map(|(mask, drop, weight)| EdgeJson {
                    mask: mask.bits(),
                    drop,
                    weight: weight.clone(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &TransitionGraphJson) -> Result<Self> {
        let n = json.n;
        let mut edges: BTreeMap<SubsetMask, Vec<(usize, Rational)>> = BTreeMap::new();
        for e in &json.edges {
            let m = SubsetMask::from_bits(n, e.mask)?;
            edges.entry(m).or_default().push((e.drop, e.weight.clone()));
        }
        let g = TransitionGraph::from_edges(n, &edges)?;
        let mut listed = BTreeMap::new();
        for node in &json.nodes {
            listed.insert(SubsetMask::from_bits(n, node.mask)?, node.weight.clone());
        }
        let derived: BTreeMap<SubsetMask, Rational> = g.nodes().map(|(m, w)| (m, w.clone())).collect();
        if listed != derived {
            return Err(Error::InvalidGraph(
                "listed node weights disagree with the weights implied by the edges".into(),
            ));
        }
        Ok(g)
    }

    /// One permutation drawn from the memoryless distribution: a backwards
    /// random walk from `[n]`. Edge choice converts the exact weights to
    /// `f64`; the last positive edge absorbs rounding.
    pub fn sample_memoryless<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        let n = self.n;
        let mut order = vec![0usize; n];
        let mut cur = self.full_set();
        for step in (0..n).rev() {
            let out = self.out_edges(cur);
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut chosen = out.last().expect("positive node has out-edges").0;
            for (x, w) in out {
                acc += w.to_f64();
                if u < acc {
                    chosen = *x;
                    break;
                }
            }
            order[step] = chosen;
            cur = cur.without(chosen);
        }
        Permutation::new(order).expect("walk drops each element once")
    }

    pub fn sample_memoryless_seeded(&self, seed: u64) -> Permutation {
        self.sample_memoryless(&mut ChaCha8Rng::seed_from_u64(seed))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionGraphJson {
    pub n: usize,
    pub nodes: Vec<NodeJson>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeJson {
    pub mask: u64,
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub mask: u64,
    pub drop: usize,
    pub weight: Rational,
}

/// The transition graph `D → G`.
pub fn build_transition_graph(d: &PermutationDistribution) -> Result<TransitionGraph> {
    let n = d.n();
    SubsetMask::full(n)?;
    let mut node_w: BTreeMap<SubsetMask, Rational> = BTreeMap::new();
    let mut joint: BTreeMap<(SubsetMask, usize), Rational> = BTreeMap::new();
    for (p, pr) in d.support() {
        let masks = p.prefix_masks()?;
        for m in &masks {
            *node_w.entry(*m).or_default() += pr;
        }
        for (i, m) in masks.iter().enumerate().skip(1) {
            *joint.entry((*m, p.at(i))).or_default() += pr;
        }
    }
    let mut nodes = BTreeMap::new();
    for (s, w) in node_w {
        let out = joint
            .range((s, 0)..=(s, usize::MAX))
            .map(|((_, x), j)| (*x, j / &w))
            .collect();
        nodes.insert(s, Node { weight: w, out });
    }
    Ok(TransitionGraph { n, nodes })
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// `G^U_n`, built analytically: `w(S) = 1/C(n,|S|)`, every edge `1/|S|`.
pub fn uniform_transition_graph(n: usize, limits: &Limits) -> Result<TransitionGraph> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    limits.check_lattice(n)?;
    let node_weights: Vec<Rational> = (0..=n).map(|k| Rational::unit_fraction(binomial(n, k))).collect();
    let edge_weights: Vec<Rational> = (0..=n)
        .map(|k| if k == 0 { Rational::zero() } else { Rational::unit_fraction(k as u64) })
        .collect();
    let mut nodes = BTreeMap::new();
    for bits in 0u64..(1u64 << n) {
        let s = SubsetMask::from_raw(bits);
        let k = s.len();
        let out = s.elements().map(|x| (x, edge_weights[k].clone())).collect();
        nodes.insert(
            s,
            Node {
                weight: node_weights[k].clone(),
                out,
            },
        );
    }
    Ok(TransitionGraph { n, nodes })
}

/// The memoryless distribution `G → D'`: each permutation's probability is
/// the product of the edge weights on its backwards walk.
pub fn memoryless_distribution(g: &TransitionGraph, limits: &Limits) -> Result<PermutationDistribution> {
    let walks = g.walk_count();
    limits.check_family(walks, "memoryless distribution support")?;
    let n = g.n();
    let mut support = Vec::with_capacity(walks as usize);
    let mut order = vec![0usize; n];
    fn descend(
        g: &TransitionGraph,
        s: SubsetMask,
        prob: Rational,
        order: &mut Vec<usize>,
        out: &mut Vec<(Permutation, Rational)>,
    ) {
        if s.is_empty() {
            out.push((Permutation::new(order.clone()).expect("walk is a bijection"), prob));
            return;
        }
        let step = s.len() - 1;
        for (x, w) in g.out_edges(s) {
            order[step] = *x;
            descend(g, s.without(*x), &prob * w, order, out);
        }
    }
    descend(g, g.full_set(), Rational::one(), &mut order, &mut support);
    Ok(PermutationDistribution::new(n, support)?.canonical())
}

/// Exact equality of positive-support node and edge weights.
pub fn graphs_equal(a: &TransitionGraph, b: &TransitionGraph) -> Result<bool> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            found: b.n,
        });
    }
    Ok(a.nodes == b.nodes)
}
