//! Audits of a distribution through its transition graph: backwards
//! uniformity, minwise/maxwise independence, the adversarial cost function,
//! the efficiency witness and the entropy lower-bound certificate.

use std::cmp::Ordering;
use std::sync::Arc;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::cost::CostFunction;
use crate::dist::{Limits, PermutationDistribution};
use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::rational::Rational;
use crate::transition::{build_transition_graph, graphs_equal, uniform_transition_graph, TransitionGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Property {
    BackwardsUniform,
    Minwise,
    Maxwise,
}

/// A violating set and element together with the measured probability.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub set: SubsetMask,
    pub element: usize,
    pub probability: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub property: Property,
    pub parameter: Rational,
    pub passed: bool,
    pub witness: Option<Witness>,
}

impl AuditReport {
    fn from_witness(property: Property, parameter: Rational, witness: Option<Witness>) -> Self {
        AuditReport {
            property,
            parameter,
            passed: witness.is_none(),
            witness,
        }
    }
}

fn lex_key_cmp(a: (SubsetMask, usize), b: (SubsetMask, usize)) -> Ordering {
    a.0.lex_cmp(b.0).then(a.1.cmp(&b.1))
}

fn keep_first(slot: &mut Option<Witness>, cand: Witness) {
    let replace = match slot {
        None => true,
        Some(w) => lex_key_cmp((cand.set, cand.element), (w.set, w.element)) == Ordering::Less,
    };
    if replace {
        *slot = Some(cand);
    }
}

/// Every positive edge satisfies `w(S, S \ {s}) <= α/|S|`.
pub fn check_backwards_uniform(g: &TransitionGraph, alpha: &Rational) -> AuditReport {
    let mut witness = None;
    for (s, x, w) in g.edges() {
        if w * Rational::from(s.len()) > *alpha {
            keep_first(
                &mut witness,
                Witness {
                    set: s,
                    element: x,
                    probability: w.clone(),
                },
            );
        }
    }
    AuditReport::from_witness(Property::BackwardsUniform, alpha.clone(), witness)
}

/// Smallest `α` for which the graph is backwards `α`-uniform:
/// `max |S|·w(S, S \ {s})` over positive edges.
pub fn min_backwards_alpha(g: &TransitionGraph) -> Rational {
    g.edges()
        .map(|(s, _, w)| w * Rational::from(s.len()))
        .max()
        .unwrap_or_default()
}

/// `Pr[x is first among Y]` from graph weights: the sum of
/// `w(T)·w(T, T \ {x})` over nodes `T` with `T ∩ Y = {x}`.
pub fn minwise_probability(g: &TransitionGraph, y: SubsetMask, x: usize) -> Result<Rational> {
    if !y.contains(x) {
        return Err(Error::ElementNotInSet { element: x, set: y });
    }
    let single = SubsetMask::singleton(x);
    Ok(g.nodes()
        .filter(|(t, _)| t.intersection(y) == single)
        .map(|(t, w)| w * g.edge_weight(t, x))
        .sum())
}

/// `Pr[x is last among Y]` from graph weights: the sum of
/// `w(T)·w(T, T \ {x})` over nodes `T ⊇ Y`.
pub fn maxwise_probability(g: &TransitionGraph, y: SubsetMask, x: usize) -> Result<Rational> {
    if !y.contains(x) {
        return Err(Error::ElementNotInSet { element: x, set: y });
    }
    Ok(g.nodes()
        .filter(|(t, _)| y.is_subset_of(*t))
        .map(|(t, w)| w * g.edge_weight(t, x))
        .sum())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Extreme {
    First,
    Last,
}

/// For fixed `x`, the table `Y ↦ Pr[x is first/last among Y]` over all
/// `Y ∋ x`, computed by a superset-sum transform over the other elements.
fn extreme_table(g: &TransitionGraph, x: usize, which: Extreme) -> Vec<Rational> {
    let n = g.n();
    let full = g.full_set();
    let xbit = SubsetMask::singleton(x);
    let mut table = vec![Rational::zero(); 1usize << n];
    for (t, w) in g.nodes() {
        if !t.contains(x) {
            continue;
        }
        let e = g.edge_weight(t, x);
        if e.is_zero() {
            continue;
        }
        // First among Y: Y \ {x} avoids T. Last among Y: Y \ {x} inside T.
        let seed = match which {
            Extreme::First => full.difference(t),
            Extreme::Last => t.without(x),
        };
        table[seed.bits() as usize] += w * e;
    }
    for b in 0..n {
        if b + 1 == x {
            continue;
        }
        let bit = 1usize << b;
        for m in 0..table.len() {
            if m & bit == 0 && m & xbit.bits() as usize == 0 {
                let add = table[m | bit].clone();
                if !add.is_zero() {
                    table[m] += add;
                }
            }
        }
    }
    table
}

fn check_extreme(g: &TransitionGraph, eps: &Rational, limits: &Limits, which: Extreme) -> Result<AuditReport> {
    let n = g.n();
    limits.check_lattice(n)?;
    let one = Rational::one();
    let mut witness = None;
    for x in 1..=n {
        let table = extreme_table(g, x, which);
        let xbit = 1u64 << (x - 1);
        for (rest, pr) in table.iter().enumerate() {
            let rest = rest as u64;
            if rest & xbit != 0 {
                continue;
            }
            let y = SubsetMask::from_raw(rest | xbit);
            let k = Rational::from(y.len());
            let scaled = pr * &k;
            if scaled < &one - eps || scaled > &one + eps {
                keep_first(
                    &mut witness,
                    Witness {
                        set: y,
                        element: x,
                        probability: pr.clone(),
                    },
                );
            }
        }
    }
    let property = match which {
        Extreme::First => Property::Minwise,
        Extreme::Last => Property::Maxwise,
    };
    Ok(AuditReport::from_witness(property, eps.clone(), witness))
}

/// Every `x ∈ Y` is first among `Y` with probability in `[(1-ε)/|Y|, (1+ε)/|Y|]`.
pub fn check_minwise_graph(g: &TransitionGraph, eps: &Rational, limits: &Limits) -> Result<AuditReport> {
    check_extreme(g, eps, limits, Extreme::First)
}

pub fn check_maxwise_graph(g: &TransitionGraph, eps: &Rational, limits: &Limits) -> Result<AuditReport> {
    check_extreme(g, eps, limits, Extreme::Last)
}

pub fn check_minwise(d: &PermutationDistribution, eps: &Rational, limits: &Limits) -> Result<AuditReport> {
    limits.check_lattice(d.n())?;
    check_minwise_graph(&build_transition_graph(d)?, eps, limits)
}

pub fn check_maxwise(d: &PermutationDistribution, eps: &Rational, limits: &Limits) -> Result<AuditReport> {
    limits.check_lattice(d.n())?;
    check_maxwise_graph(&build_transition_graph(d)?, eps, limits)
}

/// The adversarial cost `c^D`: on a positive-support `Y`, charges `|Y|` to the
/// element most likely to be last (smallest element on ties) and nothing to
/// the rest; on a zero-support `Y`, charges `1/|Y|` to every element.
pub fn adversarial_cost_function(g: &TransitionGraph) -> CostFunction {
    let g = Arc::new(g.clone());
    CostFunction::new(g.n(), move |x, y| match g.max_edge(y) {
        Some((star, _)) => {
            if x == star {
                Rational::from(y.len())
            } else {
                Rational::zero()
            }
        }
        None => Rational::unit_fraction(y.len() as u64),
    })
    .assert_normalized()
}

/// `t_i = E[c^D(π(i), π([i]))]` for `i = 1..=n`, i.e.
/// `Σ_{|S|=i} w(S)·i·max_s w(S, S \ {s})`.
pub fn level_costs(g: &TransitionGraph) -> Vec<Rational> {
    let mut t = vec![Rational::zero(); g.n()];
    for (s, w) in g.nodes() {
        if let Some((_, top)) = g.max_edge(s) {
            t[s.len() - 1] += w * top * Rational::from(s.len());
        }
    }
    t
}

/// `α̂ = E_{π~D'}[c^D(π)]/n` under the memoryless distribution `D'` of `G`.
pub fn efficiency_witness(g: &TransitionGraph) -> Rational {
    let total: Rational = level_costs(g).into_iter().sum();
    total / Rational::from(g.n())
}

/// The five equivalent characterizations of exact backwards uniformity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub backwards_uniform: bool,
    pub efficiency_one: bool,
    pub minwise: bool,
    pub maxwise: bool,
    pub uniform_graph: bool,
}

impl EquivalenceReport {
    pub fn as_array(&self) -> [bool; 5] {
        [
            self.backwards_uniform,
            self.efficiency_one,
            self.minwise,
            self.maxwise,
            self.uniform_graph,
        ]
    }

    pub fn all_agree(&self) -> bool {
        let a = self.as_array();
        a.iter().all(|v| *v == a[0])
    }

    pub fn all_true(&self) -> bool {
        self.as_array().iter().all(|v| *v)
    }
}

pub fn equivalence_report_graph(g: &TransitionGraph, limits: &Limits) -> Result<EquivalenceReport> {
    limits.check_lattice(g.n())?;
    let zero = Rational::zero();
    Ok(EquivalenceReport {
        backwards_uniform: check_backwards_uniform(g, &Rational::one()).passed,
        efficiency_one: efficiency_witness(g).is_one(),
        minwise: check_minwise_graph(g, &zero, limits)?.passed,
        maxwise: check_maxwise_graph(g, &zero, limits)?.passed,
        uniform_graph: graphs_equal(g, &uniform_transition_graph(g.n(), limits)?)?,
    })
}

pub fn equivalence_report(d: &PermutationDistribution, limits: &Limits) -> Result<EquivalenceReport> {
    limits.check_lattice(d.n())?;
    equivalence_report_graph(&build_transition_graph(d)?, limits)
}

/// Numeric instance of the entropy lower bound `H(D) >= ⌊n/(48α̂)⌋`, together
/// with the intermediate inequality `2H + ln(q!) >= q·ln(n/(8α̂))` on the
/// cheapest window of `q` consecutive levels starting at `p + 1 >= n/2 + 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBoundCertificate {
    pub n: usize,
    pub alpha_hat: Rational,
    pub q: usize,
    pub p: usize,
    /// `t_{p+1}, …, t_{p+q}`.
    pub t: Vec<Rational>,
    pub window_sum: Rational,
    pub entropy: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub floor_bound: u64,
    pub holds: bool,
}

/// Slack for the floating-point comparisons of the certificate.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-9;

fn floor_usize(r: &Rational) -> usize {
    r.floor().to_usize().unwrap_or(usize::MAX)
}

fn ln_factorial(q: usize) -> f64 {
    (2..=q).map(|j| (j as f64).ln()).sum()
}

/// Builds the certificate from a level-cost profile (`t_levels[i-1] = t_i`),
/// the efficiency witness and the entropy.
pub fn certify_profile(n: usize, alpha_hat: &Rational, t_levels: &[Rational], entropy: f64) -> Result<LowerBoundCertificate> {
    if t_levels.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: t_levels.len(),
        });
    }
    if !alpha_hat.is_positive() {
        return Err(Error::InvalidArgument(format!("efficiency witness {alpha_hat} is not positive")));
    }
    let nr = Rational::from(n);
    let q = floor_usize(&(&nr / (alpha_hat * Rational::from(24u64))));
    let floor_bound = floor_usize(&(&nr / (alpha_hat * Rational::from(48u64)))) as u64;
    let (p, t, window_sum, lhs, rhs) = if q == 0 {
        (0, Vec::new(), Rational::zero(), 2.0 * entropy, 0.0)
    } else {
        let mut best: Option<(usize, Rational)> = None;
        for k in 1..=n / (2 * q) {
            let p = n - k * q;
            let sum: Rational = t_levels[p..p + q].iter().sum();
            if best.as_ref().is_none_or(|(_, b)| sum < *b) {
                best = Some((p, sum));
            }
        }
        let (p, sum) = best.expect("q <= n/24 leaves at least one window");
        let ratio = &nr / (alpha_hat * Rational::from(8u64));
        (
            p,
            t_levels[p..p + q].to_vec(),
            sum,
            2.0 * entropy + ln_factorial(q),
            q as f64 * ratio.ln(),
        )
    };
    let holds = entropy + CERTIFICATE_TOLERANCE >= floor_bound as f64 && (q == 0 || lhs >= rhs - CERTIFICATE_TOLERANCE);
    Ok(LowerBoundCertificate {
        n,
        alpha_hat: alpha_hat.clone(),
        q,
        p,
        t,
        window_sum,
        entropy,
        lhs,
        rhs,
        floor_bound,
        holds,
    })
}

/// Certificate for a graph whose distribution has the given entropy.
pub fn lower_bound_certificate_graph(g: &TransitionGraph, entropy: f64) -> Result<LowerBoundCertificate> {
    certify_profile(g.n(), &efficiency_witness(g), &level_costs(g), entropy)
}

pub fn lower_bound_certificate(d: &PermutationDistribution, limits: &Limits) -> Result<LowerBoundCertificate> {
    limits.check_lattice(d.n())?;
    lower_bound_certificate_graph(&build_transition_graph(d)?, d.entropy())
}

/// Certificate for `U(S_n)` at any `n`, from its analytic profile:
/// `t_i = 1`, `α̂ = 1`, `H = ln n!`.
pub fn uniform_certificate(n: usize) -> Result<LowerBoundCertificate> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    certify_profile(n, &Rational::one(), &vec![Rational::one(); n], ln_factorial(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{rotation_distribution, uniform_distribution};
    use crate::perm::Permutation;

    fn m(n: usize, xs: &[usize]) -> SubsetMask {
        SubsetMask::from_elements(n, xs.iter().copied()).unwrap()
    }

    fn rot3() -> TransitionGraph {
        build_transition_graph(&rotation_distribution(3).unwrap()).unwrap()
    }

    #[test]
    fn backwards_uniform_examples() {
        let lim = Limits::default();
        for n in 1..=6 {
            let g = uniform_transition_graph(n, &lim).unwrap();
            assert!(check_backwards_uniform(&g, &Rational::one()).passed);
        }
        let r = check_backwards_uniform(&rot3(), &Rational::one());
        assert!(!r.passed);
        let w = r.witness.unwrap();
        assert_eq!((w.set, w.element), (m(3, &[1, 2]), 2));
        assert!(w.probability.is_one());
        assert!(check_backwards_uniform(&rot3(), &Rational::from(2u64)).passed);
        assert_eq!(min_backwards_alpha(&rot3()), Rational::from(2u64));
    }

    #[test]
    fn minwise_examples() {
        let lim = Limits::default();
        let zero = Rational::zero();
        assert!(check_minwise(&uniform_distribution(4, &lim).unwrap(), &zero, &lim).unwrap().passed);
        let rot = rotation_distribution(3).unwrap();
        let r = check_minwise(&rot, &zero, &lim).unwrap();
        assert!(!r.passed);
        assert_eq!(minwise_probability(&rot3(), m(3, &[1, 2]), 1).unwrap(), Rational::new(2, 3));
        assert!(check_minwise(&rot, &Rational::from(2u64), &lim).unwrap().passed);
    }

    #[test]
    fn maxwise_examples() {
        let lim = Limits::default();
        let zero = Rational::zero();
        assert!(check_maxwise(&uniform_distribution(4, &lim).unwrap(), &zero, &lim).unwrap().passed);
        assert!(!check_maxwise(&rotation_distribution(3).unwrap(), &zero, &lim).unwrap().passed);
        let pm = PermutationDistribution::point_mass(Permutation::new(vec![2, 3, 1]).unwrap());
        assert!(!check_maxwise(&pm, &zero, &lim).unwrap().passed);
    }

    #[test]
    fn transformed_tables_match_single_queries() {
        let g = rot3();
        for which in [Extreme::First, Extreme::Last] {
            for x in 1..=3 {
                let table = extreme_table(&g, x, which);
                for rest in 0u64..8 {
                    if rest & (1 << (x - 1)) != 0 {
                        continue;
                    }
                    let y = SubsetMask::from_raw(rest).with(x);
                    let direct = match which {
                        Extreme::First => minwise_probability(&g, y, x).unwrap(),
                        Extreme::Last => maxwise_probability(&g, y, x).unwrap(),
                    };
                    assert_eq!(table[rest as usize], direct);
                }
            }
        }
    }

    #[test]
    fn adversarial_cost_examples() {
        let lim = Limits::default();
        let c = adversarial_cost_function(&uniform_transition_graph(3, &lim).unwrap());
        assert_eq!(c.eval(1, m(3, &[1, 2])), Rational::from(2u64));
        assert!(c.eval(2, m(3, &[1, 2])).is_zero());
        let cr = adversarial_cost_function(&rot3());
        assert_eq!(cr.eval(2, m(3, &[1, 2])), Rational::from(2u64));
        for x in 1..=3 {
            assert!(cr.eval(x, SubsetMask::singleton(x)).is_one());
        }
        // {2} never occurs as a prefix set of the point mass on 1 2 3.
        let pm = build_transition_graph(&PermutationDistribution::point_mass(Permutation::identity(3))).unwrap();
        let cp = adversarial_cost_function(&pm);
        assert!(cp.eval(2, m(3, &[2])).is_one());
        assert_eq!(cp.eval(2, m(3, &[2, 3])), Rational::new(1, 2));
        assert_eq!(cp.check_normalized(16).unwrap(), None);
    }

    #[test]
    fn efficiency_examples() {
        let lim = Limits::default();
        for n in 1..=8 {
            assert!(efficiency_witness(&uniform_transition_graph(n, &lim).unwrap()).is_one());
        }
        assert_eq!(efficiency_witness(&rot3()), Rational::new(4, 3));
        let pm = build_transition_graph(&PermutationDistribution::point_mass(Permutation::identity(3))).unwrap();
        assert_eq!(efficiency_witness(&pm), Rational::from(2u64));
    }

    #[test]
    fn equivalence_examples() {
        let lim = Limits::default();
        assert!(equivalence_report(&uniform_distribution(4, &lim).unwrap(), &lim).unwrap().all_true());
        let r = equivalence_report(&rotation_distribution(3).unwrap(), &lim).unwrap();
        assert_eq!(r.as_array(), [false; 5]);
    }

    #[test]
    fn certificate_examples() {
        let lim = Limits::default();
        let pm = PermutationDistribution::point_mass(Permutation::identity(3));
        let c = lower_bound_certificate(&pm, &lim).unwrap();
        assert_eq!((c.alpha_hat.clone(), c.q, c.floor_bound, c.holds), (Rational::from(2u64), 0, 0, true));
        let u6 = lower_bound_certificate(&uniform_distribution(6, &lim).unwrap(), &lim).unwrap();
        assert!(u6.alpha_hat.is_one() && u6.q == 0 && u6.holds);
        let rc = lower_bound_certificate(&rotation_distribution(3).unwrap(), &lim).unwrap();
        assert_eq!(rc.alpha_hat, Rational::new(4, 3));
        assert_eq!(rc.floor_bound, 0);
        assert!((rc.entropy - 3f64.ln()).abs() < 1e-12);
        assert!(rc.holds);
    }

    #[test]
    fn uniform_certificates_exercise_window() {
        for n in [24, 48, 96, 200] {
            let c = uniform_certificate(n).unwrap();
            assert_eq!(c.q, n / 24);
            assert!(c.q >= 1);
            assert!(2 * c.p >= n);
            assert_eq!(c.t.len(), c.q);
            assert!(c.window_sum <= Rational::from(4 * c.q));
            assert!(c.lhs >= c.rhs);
            assert!(c.holds);
        }
    }
}
