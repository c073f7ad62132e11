//! Integral rounding of a fractional split of several parts across targets.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::flow::BoundedNetwork;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Parts of sizes `|V_1|, …, |V_k|` to be split across targets in the
/// proportions `δ_1, …, δ_r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvenSplitInstance {
    pub part_sizes: Vec<u64>,
    pub deltas: Vec<Rational>,
}

fn to_i64(v: num_bigint::BigInt) -> Result<i64> {
    v.to_i64()
        .ok_or_else(|| Error::InvalidArgument("split size exceeds 64-bit range".into()))
}

impl EvenSplitInstance {
    pub fn new(part_sizes: Vec<u64>, deltas: Vec<Rational>) -> Result<Self> {
        if deltas.is_empty() {
            return Err(Error::InvalidArgument("at least one target is required".into()));
        }
        if let Some(d) = deltas.iter().find(|d| d.is_negative()) {
            return Err(Error::InvalidArgument(format!("negative proportion {d}")));
        }
        let total: Rational = deltas.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidArgument(format!("proportions sum to {total}, not 1")));
        }
        Ok(EvenSplitInstance { part_sizes, deltas })
    }
}

/// Returns `counts[j][i]`, the number of members of part `j` sent to target
/// `i`, with row sums `|V_j|`, every cell within `[⌊δ_i|V_j|⌋, ⌈δ_i|V_j|⌉]` and
/// every column within `[⌊δ_i|V|⌋, ⌈δ_i|V|⌉]`.
///
/// The floors are fixed first; the remainders are routed by a feasible flow
/// source → part → target → sink in which each fractional cell may take one
/// extra unit and each target's column stays within its bracket.
pub fn even_split(inst: &EvenSplitInstance) -> Result<Vec<Vec<u64>>> {
    let k = inst.part_sizes.len();
    let r = inst.deltas.len();
    let total: u64 = inst.part_sizes.iter().sum();
    let mut counts = vec![vec![0u64; r]; k];
    let mut fractional = vec![vec![false; r]; k];
    let mut col_floor = vec![0i64; r];
    let mut row_rest = vec![0i64; k];
    for (j, &size) in inst.part_sizes.iter().enumerate() {
        let size_r = Rational::from(size);
        let mut used = 0i64;
        for (i, d) in inst.deltas.iter().enumerate() {
            let share = d * &size_r;
            let f = to_i64(share.floor())?;
            counts[j][i] = f as u64;
            fractional[j][i] = !share.is_integer();
            col_floor[i] += f;
            used += f;
        }
        row_rest[j] = size as i64 - used;
    }

    let (source, sink) = (0, 1);
    let part = |j: usize| 2 + j;
    let target = |i: usize| 2 + k + i;
    let mut net = BoundedNetwork::new(2 + k + r);
    for (j, &rest) in row_rest.iter().enumerate() {
        net.add_edge(source, part(j), rest, rest);
    }
    let mut cells = Vec::new();
    for (j, row) in fractional.iter().enumerate() {
        for (i, &frac) in row.iter().enumerate() {
            if frac {
                cells.push((j, i, net.add_edge(part(j), target(i), 0, 1)));
            }
        }
    }
    let total_r = Rational::from(total);
    for (i, d) in inst.deltas.iter().enumerate() {
        let share = d * &total_r;
        let lo = to_i64(share.floor())? - col_floor[i];
        let hi = to_i64(share.ceil())? - col_floor[i];
        net.add_edge(target(i), sink, lo.max(0), hi);
    }
    let flows = net
        .feasible(source, sink)
        .ok_or_else(|| Error::Infeasible(format!("no integral split for {inst:?}")))?;
    for (j, i, e) in cells {
        counts[j][i] += flows[e] as u64;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(inst: &EvenSplitInstance, counts: &[Vec<u64>]) {
        let total: u64 = inst.part_sizes.iter().sum();
        for (j, row) in counts.iter().enumerate() {
            assert_eq!(row.iter().sum::<u64>(), inst.part_sizes[j]);
            for (i, &c) in row.iter().enumerate() {
                let share = &inst.deltas[i] * Rational::from(inst.part_sizes[j]);
                assert!(share.floor() <= c.into() && share.ceil() >= c.into());
            }
        }
        for (i, d) in inst.deltas.iter().enumerate() {
            let col: u64 = counts.iter().map(|row| row[i]).sum();
            let share = d * Rational::from(total);
            assert!(share.floor() <= col.into() && share.ceil() >= col.into());
        }
    }

    #[test]
    fn single_part_halves() {
        let inst = EvenSplitInstance::new(vec![3], vec![Rational::new(1, 2), Rational::new(1, 2)]).unwrap();
        let c = even_split(&inst).unwrap();
        check(&inst, &c);
    }

    #[test]
    fn integral_cells_are_exact() {
        let inst = EvenSplitInstance::new(vec![2, 2], vec![Rational::new(1, 2), Rational::new(1, 2)]).unwrap();
        assert_eq!(even_split(&inst).unwrap(), vec![vec![1, 1], vec![1, 1]]);
    }

    #[test]
    fn column_brackets_bind() {
        let third = Rational::new(1, 3);
        let inst = EvenSplitInstance::new(vec![1, 1, 1], vec![third.clone(), third.clone(), third]).unwrap();
        let c = even_split(&inst).unwrap();
        check(&inst, &c);
        for i in 0..3 {
            assert_eq!(c.iter().map(|row| row[i]).sum::<u64>(), 1);
        }
    }

    #[test]
    fn many_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let r = rng.random_range(1..6);
            let raw: Vec<u64> = (0..r).map(|_| rng.random_range(0..7)).collect();
            let sum: u64 = raw.iter().sum::<u64>().max(1);
            let mut deltas: Vec<Rational> = raw.iter().map(|&x| Rational::new(x as i64, sum as i64)).collect();
            let rest = Rational::one() - deltas.iter().sum::<Rational>();
            deltas[0] += rest;
            let parts: Vec<u64> = (0..rng.random_range(0..6)).map(|_| rng.random_range(0..20)).collect();
            let inst = EvenSplitInstance::new(parts, deltas).unwrap();
            check(&inst, &even_split(&inst).unwrap());
        }
    }

    #[test]
    fn rejects_bad_proportions() {
        assert!(EvenSplitInstance::new(vec![1], vec![Rational::new(1, 2)]).is_err());
        assert!(EvenSplitInstance::new(vec![1], vec![Rational::new(3, 2), Rational::new(-1, 2)]).is_err());
    }
}
