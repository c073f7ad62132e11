//! Insertion orders over `[n]`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::SubsetMask;

/// A permutation `π` of `[n]`; `order[i]` is `π(i + 1)`, the element inserted
/// at step `i + 1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    order: Vec<usize>,
}

impl Permutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        if n == 0 {
            return Err(Error::InvalidArgument(
                "a permutation needs at least one element".into(),
            ));
        }
        let mut seen = vec![false; n + 1];
        for &x in &order {
            if x == 0 || x > n {
                return Err(Error::OutOfRange { element: x, n });
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::DuplicateElement(x));
            }
        }
        Ok(Permutation { order })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1);
        Permutation {
            order: (1..=n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn into_order(self) -> Vec<usize> {
        self.order
    }

    /// `π(i)` for 1-based step `i`.
    pub fn at(&self, i: usize) -> usize {
        self.order[i - 1]
    }

    /// `positions[x]` is the 1-based step at which `x` is inserted; index 0 is
    /// unused.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.n() + 1];
        for (i, &x) in self.order.iter().enumerate() {
            pos[x] = i + 1;
        }
        pos
    }

    /// `π([i])` for `i = 0..=n`.
    pub fn prefix_masks(&self) -> Result<Vec<SubsetMask>> {
        let n = self.n();
        let mut cur = SubsetMask::from_bits(n, 0)?;
        let mut out = Vec::with_capacity(n + 1);
        out.push(cur);
        for &x in &self.order {
            cur = cur.with(x);
            out.push(cur);
        }
        Ok(out)
    }

    /// Applies the relabeling `x -> sigma(x)` to every element.
    pub fn relabel(&self, sigma: &Permutation) -> Result<Permutation> {
        if sigma.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: sigma.n(),
            });
        }
        Ok(Permutation {
            order: self.order.iter().map(|&x| sigma.at(x)).collect(),
        })
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(order: Vec<usize>) -> Result<Self> {
        Permutation::new(order)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.order
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.order)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.order.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// Rearranges `v` into the next permutation in lexicographic order; returns
/// `false` (leaving `v` sorted ascending) after the last one.
pub fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// All `n!` permutations of `[n]` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut cur: Vec<usize> = (1..=n).collect();
    let mut out = Vec::new();
    loop {
        out.push(Permutation { order: cur.clone() });
        if !next_permutation(&mut cur) {
            break;
        }
    }
    out
}

/// An explicit list of `t` permutations of `[n]`, intended for uniform
/// sampling. Repeated members are allowed; they count with multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationFamily {
    n: usize,
    members: Vec<Permutation>,
}

impl PermutationFamily {
    pub fn new(n: usize, members: Vec<Permutation>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidArgument("a family needs at least one member".into()));
        }
        for p in &members {
            if p.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.n(),
                });
            }
        }
        Ok(PermutationFamily { n, members })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[Permutation] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Permutation> {
        self.members
    }

    pub fn is_pairwise_distinct(&self) -> bool {
        let mut sorted: Vec<&Permutation> = self.members.iter().collect();
        sorted.sort();
        sorted.windows(2).all(|w| w[0] != w[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_bijections() {
        assert_eq!(Permutation::new(vec![1]).unwrap().n(), 1);
        let p = Permutation::new(vec![2, 3, 1]).unwrap();
        assert_eq!(p.at(1), 2);
        assert_eq!(p.positions(), vec![0, 3, 1, 2]);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(matches!(
            Permutation::new(vec![1, 1, 2]),
            Err(Error::DuplicateElement(1))
        ));
        assert!(matches!(
            Permutation::new(vec![1, 4, 2]),
            Err(Error::OutOfRange { element: 4, n: 3 })
        ));
        assert!(Permutation::new(vec![]).is_err());
    }

    #[test]
    fn prefix_masks_follow_insertion_order() {
        let p = Permutation::new(vec![3, 1, 2]).unwrap();
        let m: Vec<u64> = p.prefix_masks().unwrap().iter().map(|m| m.bits()).collect();
        assert_eq!(m, vec![0, 0b100, 0b101, 0b111]);
    }

    #[test]
    fn enumerates_symmetric_group() {
        let all = all_permutations(4);
        assert_eq!(all.len(), 24);
        assert_eq!(all[0].order(), &[1, 2, 3, 4]);
        assert_eq!(all[23].order(), &[4, 3, 2, 1]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }
}
