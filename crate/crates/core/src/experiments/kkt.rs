//! The single-batch sampling step of randomized minimum spanning forests.
//!
//! Sample `S ⊆ E`, build the minimum spanning forest `F` of `(V, S)` and
//! keep `F` together with the edges of `E \ S` that are `F`-light. An edge
//! `(u, v)` is `F`-heavy when `F` joins `u` and `v` by a path whose heaviest
//! edge is lighter than `(u, v)`.

use std::collections::{HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rational::Rational;

use super::sources::SubsetSource;
use super::stats::{run_trials, ExperimentResult};

/// An undirected graph on nodes `0..n` with pairwise distinct edge weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize, Rational)>,
    /// `rank[e]` is the position of edge `e` in ascending weight order.
    rank: Vec<usize>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize, Rational)>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        for (u, v, w) in &edges {
            if *u >= n || *v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) leaves the node range 0..{n}")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            if !seen.insert(w) {
                return Err(Error::DuplicateWeights(w.clone()));
            }
        }
        let mut order: Vec<usize> = (0..edges.len()).collect();
        order.sort_by(|&a, &b| edges[a].2.cmp(&edges[b].2));
        let mut rank = vec![0; edges.len()];
        for (r, e) in order.into_iter().enumerate() {
            rank[e] = r;
        }
        Ok(WeightedGraph { n, edges, rank })
    }

    /// `K_n` with the weights `1..=m` assigned in random order.
    pub fn complete_random(n: usize, seed: u64) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let mut weights: Vec<u64> = (1..=pairs.len() as u64).collect();
        weights.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let edges = pairs
            .into_iter()
            .zip(weights)
            .map(|((u, v), w)| (u, v, Rational::from(w)))
            .collect();
        WeightedGraph::new(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize, Rational)] {
        &self.edges
    }

    /// Parses `n m` followed by `m` lines `u v w` with 0-based nodes.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 2 {
            return Err(Error::parse(hl, "header must be `n m`"));
        }
        let n: usize = h[0].parse().map_err(|_| Error::parse(hl, "bad n"))?;
        let m: usize = h[1].parse().map_err(|_| Error::parse(hl, "bad m"))?;
        let mut edges = Vec::with_capacity(m);
        for (ln, line) in lines {
            let tok: Vec<&str> = line.split_whitespace().collect();
            if tok.len() != 3 {
                return Err(Error::parse(ln, "expected `u v w`"));
            }
            let u = tok[0].parse().map_err(|_| Error::parse(ln, "bad node"))?;
            let v = tok[1].parse().map_err(|_| Error::parse(ln, "bad node"))?;
            let w: Rational = tok[2].parse().map_err(|e| Error::parse(ln, format!("{e}")))?;
            edges.push((u, v, w));
        }
        if edges.len() != m {
            return Err(Error::parse(hl, format!("header promises {m} edges, found {}", edges.len())));
        }
        WeightedGraph::new(n, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.m());
        for (u, v, w) in &self.edges {
            out.push_str(&format!("{u} {v} {w}\n"));
        }
        out
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut x = x;
        while self.0[x] != r {
            let next = self.0[x];
            self.0[x] = r;
            x = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

/// Edge indices of the minimum spanning forest of `(V, subset)`, by Kruskal.
pub fn minimum_spanning_forest(g: &WeightedGraph, subset: &[usize]) -> Vec<usize> {
    let mut order = subset.to_vec();
    order.sort_by_key(|&e| g.rank[e]);
    let mut uf = UnionFind::new(g.n);
    order
        .into_iter()
        .filter(|&e| uf.union(g.edges[e].0, g.edges[e].1))
        .collect()
}

/// Path-maximum queries on a fixed forest.
struct Forest<'a> {
    g: &'a WeightedGraph,
    adj: Vec<Vec<(usize, usize)>>,
}

impl<'a> Forest<'a> {
    fn new(g: &'a WeightedGraph, forest: &[usize]) -> Self {
        let mut adj = vec![Vec::new(); g.n];
        for &e in forest {
            let (u, v, _) = g.edges[e];
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
        Forest { g, adj }
    }

    /// Rank of the heaviest edge on the forest path `u → v`, or `None` when
    /// `u` and `v` are in different trees.
    fn path_max_rank(&self, u: usize, v: usize) -> Option<usize> {
        if u == v {
            return Some(0);
        }
        let mut best: Vec<Option<usize>> = vec![None; self.g.n];
        let mut seen = vec![false; self.g.n];
        seen[u] = true;
        let mut queue = VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            for &(y, e) in &self.adj[x] {
                if seen[y] {
                    continue;
                }
                seen[y] = true;
                let r = self.g.rank[e];
                best[y] = Some(best[x].map_or(r, |b| b.max(r)));
                if y == v {
                    return best[y];
                }
                queue.push_back(y);
            }
        }
        None
    }

    fn is_light(&self, e: usize) -> bool {
        let (u, v, _) = self.g.edges[e];
        match self.path_max_rank(u, v) {
            None => true,
            Some(r) => r > self.g.rank[e],
        }
    }
}

/// Outcome of one sampling round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BatchOutcome {
    pub forest_edges: usize,
    pub light_outside: usize,
    pub outside: usize,
}

impl BatchOutcome {
    /// `|F|` plus the `F`-light edges outside the sample.
    pub fn remaining(&self) -> usize {
        self.forest_edges + self.light_outside
    }
}

/// The `F`-light edges of `E \ S`, as edge indices.
pub fn light_edges(g: &WeightedGraph, sample: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let forest = minimum_spanning_forest(g, sample);
    let f = Forest::new(g, &forest);
    let in_sample: HashSet<usize> = sample.iter().copied().collect();
    let light = (0..g.m()).filter(|e| !in_sample.contains(e) && f.is_light(*e)).collect();
    (forest, light)
}

pub fn single_batch(g: &WeightedGraph, sample: &[usize]) -> BatchOutcome {
    let (forest, light) = light_edges(g, sample);
    let distinct: HashSet<usize> = sample.iter().copied().collect();
    BatchOutcome {
        forest_edges: forest.len(),
        light_outside: light.len(),
        outside: g.m() - distinct.len(),
    }
}

/// Sample size `⌊p·m⌋`; warns when `p·m` is not an integer.
pub fn sample_size(p: &Rational, m: usize) -> Result<usize> {
    if p.is_negative() || *p > Rational::one() {
        return Err(Error::InvalidArgument(format!("p = {p} outside [0,1]")));
    }
    let pm = p * Rational::from(m);
    if !pm.is_integer() {
        log::warn!("p·m = {pm} is not an integer; rounding down");
    }
    Ok(num_traits::ToPrimitive::to_usize(&pm.floor()).expect("at most m"))
}

/// Mean number of remaining edges over `trials` sampling rounds, with both
/// normalizations of the light-edge count: the total remaining against
/// `n/p`, and the fraction of `E \ S` that is `F`-light against
/// `(n-1)/(pm+1)`.
pub fn kkt_single_batch(
    g: &WeightedGraph,
    p: &Rational,
    sampler: &dyn SubsetSource,
    trials: u64,
    seed: u64,
) -> Result<ExperimentResult> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if !p.is_positive() {
        return Err(Error::InvalidArgument("p must be positive".into()));
    }
    let size = sample_size(p, g.m())?;
    let outcomes = run_trials(trials, seed, |rng| single_batch(g, &sampler.sample(g.m(), size, rng)));
    let values: Vec<f64> = outcomes.iter().map(|o| o.remaining() as f64).collect();
    let fractions: Vec<f64> = outcomes
        .iter()
        .map(|o| if o.outside == 0 { 0.0 } else { o.light_outside as f64 / o.outside as f64 })
        .collect();
    let mean_light = outcomes.iter().map(|o| o.light_outside as f64).sum::<f64>() / trials as f64;
    let mean_fraction = fractions.iter().sum::<f64>() / trials as f64;
    let bound = Rational::from(g.n()) / p;
    let fraction_bound = (g.n().saturating_sub(1)) as f64 / (size as f64 + 1.0);
    Ok(ExperimentResult::from_values("kkt", sampler.describe(), seed, values)
        .with_extra("n", g.n())
        .with_extra("m", g.m())
        .with_extra("p", p.to_string())
        .with_extra("sample_size", size)
        .with_extra("bound_n_over_p", bound.to_f64())
        .with_extra("mean_light_outside", mean_light)
        .with_extra("mean_light_fraction", mean_fraction)
        .with_extra("light_fraction_bound", fraction_bound))
}
