//! Subsets of a ground set `[n]` stored as bit masks.
//!
//! Element `x` (1-based) lives at bit `x - 1`. The ground-set size is carried
//! by whoever owns the mask; constructors that take `n` check that no bit
//! above position `n` is set.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ground set a mask can describe.
pub const MAX_MASK_N: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubsetMask(u64);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub fn full(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(SubsetMask(full_bits(n)))
    }

    pub fn from_bits(n: usize, bits: u64) -> Result<Self> {
        check_n(n)?;
        if bits & !full_bits(n) != 0 {
            return Err(Error::OutOfRange {
                element: 64 - bits.leading_zeros() as usize,
                n,
            });
        }
        Ok(SubsetMask(bits))
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(n: usize, elements: I) -> Result<Self> {
        check_n(n)?;
        let mut bits = 0u64;
        for x in elements {
            if x == 0 || x > n {
                return Err(Error::OutOfRange { element: x, n });
            }
            bits |= 1 << (x - 1);
        }
        Ok(SubsetMask(bits))
    }

    /// Unchecked construction from raw bits.
    pub const fn from_raw(bits: u64) -> Self {
        SubsetMask(bits)
    }

    pub fn singleton(x: usize) -> Self {
        debug_assert!((1..=MAX_MASK_N).contains(&x));
        SubsetMask(1 << (x - 1))
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, x: usize) -> bool {
        (1..=MAX_MASK_N).contains(&x) && self.0 & (1 << (x - 1)) != 0
    }

    pub fn with(self, x: usize) -> Self {
        SubsetMask(self.0 | (1 << (x - 1)))
    }

    pub fn without(self, x: usize) -> Self {
        SubsetMask(self.0 & !(1 << (x - 1)))
    }

    pub fn union(self, other: Self) -> Self {
        SubsetMask(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        SubsetMask(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        SubsetMask(self.0 & !other.0)
    }

    pub fn complement(self, n: usize) -> Self {
        SubsetMask(full_bits(n) & !self.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest element, if any.
    pub fn min_element(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    /// Elements in ascending order.
    pub fn elements(self) -> Elements {
        Elements(self.0)
    }

    /// All submasks of `self`, starting from the empty set.
    pub fn submasks(self) -> Submasks {
        Submasks {
            set: self.0,
            next: Some(0),
        }
    }

    /// Lexicographic comparison of the ascending element sequences.
    pub fn lex_cmp(self, other: Self) -> Ordering {
        let mut a = self.elements();
        let mut b = other.elements();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(x), Some(y)) if x != y => return x.cmp(&y),
                _ => {}
            }
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n > MAX_MASK_N {
        return Err(Error::TooLarge {
            what: "ground set for subset masks",
            size: n as u128,
            limit: MAX_MASK_N as u128,
        });
    }
    Ok(())
}

pub(crate) fn full_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.elements().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub struct Elements(u64);

impl Iterator for Elements {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let x = self.0.trailing_zeros() as usize + 1;
        self.0 &= self.0 - 1;
        Some(x)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Elements {}

/// Carry-ripple enumeration of submasks in increasing numeric order.
pub struct Submasks {
    set: u64,
    next: Option<u64>,
}

impl Iterator for Submasks {
    type Item = SubsetMask;

    fn next(&mut self) -> Option<SubsetMask> {
        let cur = self.next?;
        let nxt = cur.wrapping_sub(self.set) & self.set;
        self.next = (nxt != 0).then_some(nxt);
        Some(SubsetMask(cur))
    }
}
