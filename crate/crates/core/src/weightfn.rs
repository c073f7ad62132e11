//! Weight functions on the subset lattice and the single-batch audit.
//!
//! A weight function maps subsets of `[n]` to `[0, 1]`; it is stored
//! sparsely over the sets of positive weight.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WeightFunction {
    n: usize,
    values: BTreeMap<SubsetMask, Rational>,
}

impl WeightFunction {
    pub fn empty(n: usize) -> Self {
        WeightFunction {
            n,
            values: BTreeMap::new(),
        }
    }

    /// Zero entries are dropped; repeated sets and values outside `[0, 1]`
    /// are rejected.
    pub fn new(n: usize, entries: impl IntoIterator<Item = (SubsetMask, Rational)>) -> Result<Self> {
        let full = SubsetMask::full(n)?;
        let mut values = BTreeMap::new();
        for (a, v) in entries {
            if !a.is_subset_of(full) {
                return Err(Error::InvalidArgument(format!("set {a} is not a subset of [{n}]")));
            }
            if v.is_negative() || v > Rational::one() {
                return Err(Error::InvalidArgument(format!("weight {v} of {a} outside [0,1]")));
            }
            if values.contains_key(&a) {
                return Err(Error::InvalidArgument(format!("set {a} listed twice")));
            }
            if v.is_positive() {
                values.insert(a, v);
            }
        }
        Ok(WeightFunction { n, values })
    }

    /// Weight one on every member of the family.
    pub fn indicator(n: usize, family: impl IntoIterator<Item = SubsetMask>) -> Result<Self> {
        let mut sets: Vec<SubsetMask> = family.into_iter().collect();
        sets.sort();
        sets.dedup();
        WeightFunction::new(n, sets.into_iter().map(|a| (a, Rational::one())))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: SubsetMask) -> Rational {
        self.values.get(&a).cloned().unwrap_or_default()
    }

    /// Positive entries in ascending mask order.
    pub fn support(&self) -> impl ExactSizeIterator<Item = (&SubsetMask, &Rational)> {
        self.values.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// The common size of all supported sets, if there is one.
    pub fn level(&self) -> Option<usize> {
        let mut sizes = self.values.keys().map(|a| a.len());
        let k = sizes.next()?;
        sizes.all(|s| s == k).then_some(k)
    }

    /// `S(w) = Σ w(A)`.
    pub fn total(&self) -> Rational {
        self.values.values().sum()
    }

    /// `H(w) = Σ w(A) ln(1/w(A))` over positive entries, in nats.
    pub fn entropy(&self) -> f64 {
        self.values.values().map(|v| -v.to_f64() * v.ln()).sum()
    }

    /// `(π_i w)(A) = [w(A) >= 2^-i]·2^(-i-1)`.
    pub fn level_truncate(&self, i: u32) -> WeightFunction {
        let threshold = Rational::pow2_neg(i);
        let value = Rational::pow2_neg(i + 1);
        WeightFunction {
            n: self.n,
            values: self
                .values
                .iter()
                .filter(|(_, v)| **v >= threshold)
                .map(|(a, _)| (*a, value.clone()))
                .collect(),
        }
    }

    /// `(Δw)(B) = max_{a ∉ B} w(B ∪ {a})`, and `(Δw)([n]) = 0`.
    pub fn shadow(&self) -> WeightFunction {
        let mut values: BTreeMap<SubsetMask, Rational> = BTreeMap::new();
        for (a, v) in &self.values {
            for x in a.elements() {
                let slot = values.entry(a.without(x)).or_default();
                if v > slot {
                    *slot = v.clone();
                }
            }
        }
        WeightFunction { n: self.n, values }
    }

    /// Largest dyadic level among the positive weights; every `π_i w` with
    /// `i` at or above it is supported on all of `w`'s support.
    pub fn max_dyadic_level(&self) -> Option<u32> {
        self.values.values().map(|v| v.dyadic_level()).max()
    }

    /// `Σ_{i=0}^{imax} S(π_i w)`, term by term.
    pub fn truncated_level_sum(&self, imax: u32) -> Rational {
        (0..=imax).map(|i| self.level_truncate(i).total()).sum()
    }

    /// `Σ_{i=0}^{imax} H(π_i w)`, term by term.
    pub fn truncated_level_entropy(&self, imax: u32) -> f64 {
        (0..=imax).map(|i| self.level_truncate(i).entropy()).sum()
    }
}

/// `Σ_{i>=0} S(π_i w)` in closed form: each set with dyadic level `j`
/// contributes `Σ_{i>=j} 2^(-i-1) = 2^-j`.
pub fn level_sum_closed_form(w: &WeightFunction) -> Rational {
    w.support().map(|(_, v)| Rational::pow2_neg(v.dyadic_level())).sum()
}

/// `Σ_{i>=0} H(π_i w)` in closed form: each set with dyadic level `j`
/// contributes `Σ_{i>=j} 2^(-i-1)·(i+1)·ln 2 = (j+2)·2^-j·ln 2`.
pub fn level_entropy_closed_form(w: &WeightFunction) -> f64 {
    w.support()
        .map(|(_, v)| {
            let j = v.dyadic_level() as i32;
            (j as f64 + 2.0) * 2f64.powi(-j) * std::f64::consts::LN_2
        })
        .sum()
}

/// Bounds on the level sums of a weight function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelSumBounds {
    pub total: Rational,
    pub level_sum: Rational,
    /// `S(w)/2 <= level_sum <= S(w)`.
    pub sum_within: bool,
    pub level_entropy: f64,
    /// `3S(w) + 2H(w)`.
    pub entropy_bound: f64,
    pub entropy_within: bool,
}

pub fn level_sum_bounds(w: &WeightFunction, tolerance: f64) -> LevelSumBounds {
    let total = w.total();
    let level_sum = level_sum_closed_form(w);
    let half = &total / Rational::from(2u64);
    let level_entropy = level_entropy_closed_form(w);
    let entropy_bound = 3.0 * total.to_f64() + 2.0 * w.entropy();
    LevelSumBounds {
        sum_within: half <= level_sum && level_sum <= total,
        total,
        level_sum,
        level_entropy,
        entropy_bound,
        entropy_within: level_entropy <= entropy_bound + tolerance,
    }
}

pub const ELL_TOLERANCE: f64 = 1e-12;
pub const ELL_MAX_ITERATIONS: usize = 200;

/// The generalized binomial `C(k-1+ℓ, k) = Π_{j<k} (ℓ+j)/(j+1)`.
fn shifted_binomial(k: u32, ell: f64) -> f64 {
    (0..k).map(|j| (ell + j as f64) / (j as f64 + 1.0)).product()
}

/// The unique `ℓ >= 0` with `x = C(k-1+ℓ, k)`.
pub fn ell_k(k: u32, x: f64) -> Result<f64> {
    ell_k_with(k, x, ELL_MAX_ITERATIONS)
}

pub fn ell_k_with(k: u32, x: f64, max_iterations: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::InvalidArgument(format!("x = {x} must be finite and non-negative")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if k == 1 {
        return Ok(x);
    }
    let kf = k as f64;
    let (mut lo, mut hi) = (0.0f64, kf * x.powf(1.0 / kf) + kf);
    for _ in 0..max_iterations {
        if hi - lo <= ELL_TOLERANCE * hi {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if shifted_binomial(k, mid) < x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iterations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShadowBound {
    pub k: usize,
    pub size: usize,
    /// `|ΔA|`.
    pub actual: usize,
    /// `|A|·k/ℓ_k(|A|)`.
    pub bound: f64,
}

impl ShadowBound {
    pub fn holds(&self, tolerance: f64) -> bool {
        self.actual as f64 >= self.bound - tolerance
    }
}

/// Compares the shadow of a uniform-level family with `|A|·k/ℓ_k(|A|)`.
pub fn shadow_bound_check(family: &[SubsetMask]) -> Result<ShadowBound> {
    let mut sets = family.to_vec();
    sets.sort();
    sets.dedup();
    let k = sets
        .first()
        .ok_or_else(|| Error::InvalidArgument("the family is empty".into()))?
        .len();
    if sets.iter().any(|a| a.len() != k) {
        return Err(Error::MixedLevels);
    }
    if k == 0 {
        return Ok(ShadowBound {
            k,
            size: 1,
            actual: 0,
            bound: 0.0,
        });
    }
    let mut shadow: Vec<SubsetMask> = sets
        .iter()
        .flat_map(|a| a.elements().map(move |x| a.without(x)))
        .collect();
    shadow.sort();
    shadow.dedup();
    let size = sets.len();
    let ell = ell_k(k as u32, size as f64)?;
    Ok(ShadowBound {
        k,
        size,
        actual: shadow.len(),
        bound: size as f64 * k as f64 / ell,
    })
}

/// `S(Δ π_i w)` against `S(π_i w)·k/ℓ_k(2^i)` for a level-`k` weight function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelShadowBound {
    pub i: u32,
    pub shadow_total: Rational,
    pub bound: f64,
}

pub fn level_shadow_bound(w: &WeightFunction, i: u32) -> Result<LevelShadowBound> {
    let k = w.level().ok_or(Error::MixedLevels)?;
    if k == 0 {
        return Err(Error::DegenerateLevel { k, n: w.n() });
    }
    let truncated = w.level_truncate(i);
    let ell = ell_k(k as u32, 2f64.powi(i as i32))?;
    Ok(LevelShadowBound {
        i,
        shadow_total: truncated.shadow().total(),
        bound: truncated.total().to_f64() * k as f64 / ell,
    })
}

/// A distribution over the size-`k` subsets of `[n]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetDistribution {
    n: usize,
    k: usize,
    support: Vec<(SubsetMask, Rational)>,
}

impl SubsetDistribution {
    pub fn new(n: usize, k: usize, support: Vec<(SubsetMask, Rational)>) -> Result<Self> {
        let full = SubsetMask::full(n)?;
        if support.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let mut seen = std::collections::HashSet::new();
        let mut total = Rational::zero();
        for (s, p) in &support {
            if s.len() != k || !s.is_subset_of(full) {
                return Err(Error::InvalidDistribution(format!("set {s} is not a {k}-subset of [{n}]")));
            }
            if !p.is_positive() {
                return Err(Error::InvalidDistribution(format!("probability {p} of {s} is not positive")));
            }
            if !seen.insert(*s) {
                return Err(Error::InvalidDistribution(format!("set {s} listed twice")));
            }
            total += p;
        }
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}, not 1")));
        }
        Ok(SubsetDistribution { n, k, support })
    }

    /// Uniform over all `C(n, k)` subsets of size `k`.
    pub fn uniform(n: usize, k: usize) -> Result<Self> {
        let full = SubsetMask::full(n)?;
        if n > 24 {
            return Err(Error::TooLarge {
                what: "subset enumeration",
                size: n as u128,
                limit: 24,
            });
        }
        let sets: Vec<SubsetMask> = full.submasks().filter(|s| s.len() == k).collect();
        let p = Rational::unit_fraction(sets.len() as u64);
        SubsetDistribution::new(n, k, sets.into_iter().map(|s| (s, p.clone())).collect())
    }

    pub fn point_mass(n: usize, s: SubsetMask) -> Result<Self> {
        SubsetDistribution::new(n, s.len(), vec![(s, Rational::one())])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn support(&self) -> &[(SubsetMask, Rational)] {
        &self.support
    }

    pub fn entropy(&self) -> f64 {
        self.support.iter().map(|(_, p)| -p.to_f64() * p.ln()).sum()
    }

    /// `w(A) = Pr[S = [n] \ A]`, supported on level `n - k`.
    pub fn complement_weights(&self) -> WeightFunction {
        WeightFunction {
            n: self.n,
            values: self
                .support
                .iter()
                .map(|(s, p)| (s.complement(self.n), p.clone()))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingleBatchAudit {
    /// `E_{S~D, s~U([n]\S)}[c(s, S ∪ {s})]` under the adversarial cost.
    pub ratio: Rational,
    /// `S(Δw)` for the complement weights `w`.
    pub s_delta_w: Rational,
    /// `(k+1)/(n-k)·S(Δw)`.
    pub predicted: Rational,
    pub identity_holds: bool,
    pub entropy: f64,
}

/// Measures the adversarial single-batch cost directly and compares it with
/// the shadow-weight expression.
///
/// The adversary charges `k + 1` to the element `b ∈ B` that maximizes
/// `Pr[S = B \ {b}]` (smallest element on ties) and nothing to the others.
pub fn single_batch_audit(d: &SubsetDistribution) -> Result<SingleBatchAudit> {
    let (n, k) = (d.n(), d.k());
    if k == 0 || k >= n {
        return Err(Error::DegenerateLevel { k, n });
    }
    let prob: HashMap<SubsetMask, &Rational> = d.support().iter().map(|(s, p)| (*s, p)).collect();
    let zero = Rational::zero();
    let favourite = |b: SubsetMask| -> usize {
        let mut best = (b.min_element().expect("nonempty"), &zero);
        for x in b.elements() {
            let p = prob.get(&b.without(x)).copied().unwrap_or(&zero);
            if p > best.1 {
                best = (x, p);
            }
        }
        best.0
    };
    let full = SubsetMask::full(n)?;
    let charge = Rational::from(k + 1);
    let mut ratio = Rational::zero();
    for (s, p) in d.support() {
        for x in full.difference(*s).elements() {
            if favourite(s.with(x)) == x {
                ratio += p * &charge;
            }
        }
    }
    ratio /= Rational::from(n - k);
    let s_delta_w = d.complement_weights().shadow().total();
    let predicted = Rational::from(k + 1) / Rational::from(n - k) * &s_delta_w;
    Ok(SingleBatchAudit {
        identity_holds: ratio == predicted,
        ratio,
        s_delta_w,
        predicted,
        entropy: d.entropy(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: usize, xs: &[usize]) -> SubsetMask {
        SubsetMask::from_elements(n, xs.iter().copied()).unwrap()
    }

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn totals() {
        assert!(WeightFunction::empty(3).total().is_zero());
        let quarter = WeightFunction::new(2, (0..4).map(|b| (SubsetMask::from_raw(b), r(1, 4)))).unwrap();
        assert!(quarter.total().is_one());
        let thirds = WeightFunction::new(3, [m(3, &[1, 2]), m(3, &[1, 3]), m(3, &[2, 3])].map(|a| (a, r(1, 3)))).unwrap();
        assert!(thirds.total().is_one());
        assert!((thirds.entropy() - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn entropies() {
        let pm = WeightFunction::new(3, [(m(3, &[1]), Rational::one())]).unwrap();
        assert_eq!(pm.entropy(), 0.0);
        let halves = WeightFunction::new(3, [(m(3, &[1]), r(1, 2)), (m(3, &[2]), r(1, 2))]).unwrap();
        assert!((halves.entropy() - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn truncation() {
        let a = m(3, &[1]);
        let w = WeightFunction::new(3, [(a, r(3, 10))]).unwrap();
        assert!(w.level_truncate(1).get(a).is_zero());
        assert_eq!(w.level_truncate(2).get(a), r(1, 8));
        let one = WeightFunction::new(3, [(a, Rational::one())]).unwrap();
        for i in 0..6 {
            assert_eq!(one.level_truncate(i).get(a), Rational::pow2_neg(i + 1));
        }
    }

    #[test]
    fn shadows() {
        let w = WeightFunction::new(2, [(m(2, &[1]), r(3, 10)), (m(2, &[2]), r(1, 2))]).unwrap();
        let d = w.shadow();
        assert_eq!(d.get(SubsetMask::EMPTY), r(1, 2));
        assert!(d.get(m(2, &[1, 2])).is_zero());
        let ind = WeightFunction::indicator(3, [m(3, &[1, 2]), m(3, &[1, 3])]).unwrap();
        let expected = WeightFunction::indicator(3, [m(3, &[1]), m(3, &[2]), m(3, &[3])]).unwrap();
        assert_eq!(ind.shadow(), expected);
    }

    #[test]
    fn ell_values() {
        assert_eq!(ell_k(1, 7.5).unwrap(), 7.5);
        assert!((ell_k(2, 3.0).unwrap() - 2.0).abs() < 1e-9);
        assert!((ell_k(2, 1.0).unwrap() - 1.0).abs() < 1e-9);
        assert!((ell_k(2, 2.0).unwrap() - (17f64.sqrt() - 1.0) / 2.0).abs() < 1e-9);
        assert!((ell_k(3, 10.0).unwrap() - 3.0).abs() < 1e-9);
        assert_eq!(ell_k(4, 0.0).unwrap(), 0.0);
        assert!(matches!(ell_k_with(3, 5.0, 3), Err(Error::NonConvergence { iterations: 3 })));
        assert!(ell_k(2, -1.0).is_err());
    }

    #[test]
    fn shadow_bounds() {
        let full2: Vec<SubsetMask> = SubsetMask::full(4).unwrap().submasks().filter(|a| a.len() == 2).collect();
        let b = shadow_bound_check(&full2).unwrap();
        assert_eq!(b.actual, 4);
        assert!((b.bound - 4.0).abs() < 1e-9);
        let two = shadow_bound_check(&[m(3, &[1, 2]), m(3, &[1, 3])]).unwrap();
        assert_eq!(two.actual, 3);
        assert!((two.bound - 2.5616).abs() < 1e-4);
        let one = shadow_bound_check(&[m(5, &[1, 3, 5])]).unwrap();
        assert_eq!(one.actual, 3);
        assert!((one.bound - 3.0).abs() < 1e-9);
        assert!(matches!(shadow_bound_check(&[m(3, &[1]), m(3, &[1, 2])]), Err(Error::MixedLevels)));
    }

    #[test]
    fn closed_forms_match_truncated_sums() {
        let w = WeightFunction::new(
            4,
            [(m(4, &[1]), r(3, 10)), (m(4, &[2, 3]), r(1, 7)), (m(4, &[4]), Rational::one())],
        )
        .unwrap();
        let deep = 60;
        let tail_s: Rational = w
            .support()
            .map(|_| Rational::pow2_neg(deep + 1))
            .sum();
        assert_eq!(w.truncated_level_sum(deep) + tail_s, level_sum_closed_form(&w));
        assert!((w.truncated_level_entropy(deep) - level_entropy_closed_form(&w)).abs() < 1e-12);
        let b = level_sum_bounds(&w, 1e-9);
        assert!(b.sum_within && b.entropy_within);
    }

    #[test]
    fn single_batch_examples() {
        let pm = SubsetDistribution::point_mass(6, m(6, &[1, 4])).unwrap();
        let a = single_batch_audit(&pm).unwrap();
        assert_eq!(a.ratio, Rational::from(3u64));
        assert_eq!(a.s_delta_w, Rational::from(4u64));
        assert!(a.identity_holds);
        assert_eq!(a.entropy, 0.0);
        let u = single_batch_audit(&SubsetDistribution::uniform(6, 3).unwrap()).unwrap();
        assert!(u.identity_holds);
        // Every B of size 4 has all four B \ {b} equally likely: 15 sets at 1/20.
        assert_eq!(u.s_delta_w, r(15, 20));
        assert!(matches!(
            single_batch_audit(&SubsetDistribution::uniform(4, 4).unwrap()),
            Err(Error::DegenerateLevel { .. })
        ));
    }
}
