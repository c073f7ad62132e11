//! Cost functions `c(x, Y)` and the total-cost evaluator.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::perm::Permutation;
use crate::rational::Rational;

type Evaluator = dyn Fn(usize, SubsetMask) -> Rational + Send + Sync;

/// Largest ground set for which [`CostFunction::tabulate`] builds a dense
/// table.
pub const DENSE_TABLE_MAX_N: usize = 16;

/// Assigns a cost `c(x, Y)` to adding `x` to `Y \ {x}`, for every `x ∈ Y ⊆ [n]`.
#[derive(Clone)]
pub struct CostFunction {
    n: usize,
    eval: Arc<Evaluator>,
    normalized: bool,
}

impl std::fmt::Debug for CostFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CostFunction")
            .field("n", &self.n)
            .field("normalized", &self.normalized)
            .finish_non_exhaustive()
    }
}

impl CostFunction {
    pub fn new<F>(n: usize, f: F) -> Self
    where
        F: Fn(usize, SubsetMask) -> Rational + Send + Sync + 'static,
    {
        CostFunction {
            n,
            eval: Arc::new(f),
            normalized: false,
        }
    }

    /// Marks the function as satisfying `E_{x~U(Y)}[c(x,Y)] <= 1` for all `Y`.
    /// The claim is not verified here; see [`CostFunction::check_normalized`].
    pub fn assert_normalized(mut self) -> Self {
        self.normalized = true;
        self
    }

    pub fn zero(n: usize) -> Self {
        CostFunction::new(n, |_, _| Rational::zero()).assert_normalized()
    }

    pub fn constant(n: usize, value: Rational) -> Self {
        let normalized = value <= Rational::one();
        let c = CostFunction::new(n, move |_, _| value.clone());
        if normalized {
            c.assert_normalized()
        } else {
            c
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_marked_normalized(&self) -> bool {
        self.normalized
    }

    pub fn eval(&self, x: usize, y: SubsetMask) -> Rational {
        debug_assert!(y.contains(x));
        (self.eval)(x, y)
    }

    /// `a·c1 + b·c2`.
    pub fn linear_combination(a: Rational, c1: &CostFunction, b: Rational, c2: &CostFunction) -> Result<Self> {
        if c1.n != c2.n {
            return Err(Error::DimensionMismatch {
                expected: c1.n,
                found: c2.n,
            });
        }
        let (f1, f2) = (c1.eval.clone(), c2.eval.clone());
        Ok(CostFunction::new(c1.n, move |x, y| &a * f1(x, y) + &b * f2(x, y)))
    }

    /// Dense-table copy of the function, evaluated once per `(x, Y)`.
    pub fn tabulate(&self) -> Result<Self> {
        let n = self.n;
        if n > DENSE_TABLE_MAX_N {
            return Err(Error::TooLarge {
                what: "dense cost table",
                size: n as u128,
                limit: DENSE_TABLE_MAX_N as u128,
            });
        }
        let mut table = vec![Rational::zero(); (1usize << n) * n];
        for bits in 1u64..(1 << n) {
            let y = SubsetMask::from_raw(bits);
            for x in y.elements() {
                table[bits as usize * n + (x - 1)] = self.eval(x, y);
            }
        }
        let table = Arc::new(table);
        let mut c = CostFunction::new(n, move |x, y| table[y.bits() as usize * n + (x - 1)].clone());
        c.normalized = self.normalized;
        Ok(c)
    }

    /// Exact check of `E_{x~U(Y)}[c(x,Y)] <= 1` over every nonempty `Y ⊆ [n]`.
    /// Returns the first violating set, if any.
    pub fn check_normalized(&self, max_n: usize) -> Result<Option<SubsetMask>> {
        if self.n > max_n {
            return Err(Error::TooLarge {
                what: "normalization check lattice",
                size: self.n as u128,
                limit: max_n as u128,
            });
        }
        for bits in 1u64..(1u64 << self.n) {
            let y = SubsetMask::from_raw(bits);
            let total: Rational = y.elements().map(|x| self.eval(x, y)).sum();
            if total > Rational::from(y.len()) {
                return Ok(Some(y));
            }
        }
        Ok(None)
    }
}

/// `c(π) = Σ_{i=1}^n c(π(i), π([i]))`, exactly.
pub fn total_cost(c: &CostFunction, pi: &Permutation) -> Result<Rational> {
    if c.n() != pi.n() {
        return Err(Error::DimensionMismatch {
            expected: c.n(),
            found: pi.n(),
        });
    }
    let mut prefix = SubsetMask::from_bits(pi.n(), 0)?;
    let mut total = Rational::zero();
    for &x in pi.order() {
        prefix = prefix.with(x);
        total += c.eval(x, prefix);
    }
    Ok(total)
}
