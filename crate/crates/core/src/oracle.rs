//! Brute-force ground truth by direct enumeration of a distribution's
//! support. Nothing here touches transition graphs.

use crate::cost::{total_cost, CostFunction};
use crate::dist::PermutationDistribution;
use crate::error::{Error, Result};
use crate::mask::SubsetMask;
use crate::rational::Rational;

fn require_member(y: SubsetMask, x: usize) -> Result<()> {
    if !y.contains(x) {
        return Err(Error::ElementNotInSet { element: x, set: y });
    }
    Ok(())
}

/// `Pr[x is inserted before every other member of Y]`.
pub fn brute_minwise(d: &PermutationDistribution, y: SubsetMask, x: usize) -> Result<Rational> {
    require_member(y, x)?;
    let mut total = Rational::zero();
    for (p, pr) in d.support() {
        if p.order().iter().copied().find(|e| y.contains(*e)) == Some(x) {
            total += pr;
        }
    }
    Ok(total)
}

/// `Pr[x is inserted after every other member of Y]`.
pub fn brute_maxwise(d: &PermutationDistribution, y: SubsetMask, x: usize) -> Result<Rational> {
    require_member(y, x)?;
    let mut total = Rational::zero();
    for (p, pr) in d.support() {
        if p.order().iter().rev().copied().find(|e| y.contains(*e)) == Some(x) {
            total += pr;
        }
    }
    Ok(total)
}

/// `Pr[π(|Y|) = x | π([|Y|]) = Y]`, or `None` when `Y` is never a prefix set.
pub fn brute_conditional_last(d: &PermutationDistribution, y: SubsetMask, x: usize) -> Result<Option<Rational>> {
    require_member(y, x)?;
    let k = y.len();
    let mut prefix_prob = Rational::zero();
    let mut joint = Rational::zero();
    for (p, pr) in d.support() {
        let head = &p.order()[..k];
        if head.iter().all(|e| y.contains(*e)) {
            prefix_prob += pr;
            if head[k - 1] == x {
                joint += pr;
            }
        }
    }
    if prefix_prob.is_zero() {
        return Ok(None);
    }
    Ok(Some(joint / prefix_prob))
}

/// `E_{π~D}[c(π)]`.
pub fn brute_expected_cost(d: &PermutationDistribution, c: &CostFunction) -> Result<Rational> {
    let mut total = Rational::zero();
    for (p, pr) in d.support() {
        total += pr * total_cost(c, p)?;
    }
    Ok(total)
}

/// `-Σ p ln p` over the support, in nats.
pub fn exact_entropy(d: &PermutationDistribution) -> f64 {
    let mut h = 0.0;
    for (_, pr) in d.support() {
        let p = pr.to_f64();
        h -= p * pr.ln();
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{rotation_distribution, uniform_distribution, Limits};
    use crate::perm::Permutation;

    fn m(n: usize, xs: &[usize]) -> SubsetMask {
        SubsetMask::from_elements(n, xs.iter().copied()).unwrap()
    }

    #[test]
    fn minwise_values() {
        let u3 = uniform_distribution(3, &Limits::default()).unwrap();
        assert_eq!(brute_minwise(&u3, m(3, &[1, 2, 3]), 2).unwrap(), Rational::new(1, 3));
        let rot = rotation_distribution(3).unwrap();
        assert_eq!(brute_minwise(&rot, m(3, &[1, 2]), 1).unwrap(), Rational::new(2, 3));
        assert!(brute_minwise(&rot, m(3, &[2]), 2).unwrap().is_one());
        assert!(matches!(
            brute_minwise(&rot, m(3, &[2]), 1),
            Err(Error::ElementNotInSet { .. })
        ));
    }

    #[test]
    fn maxwise_values() {
        let rot = rotation_distribution(3).unwrap();
        assert_eq!(brute_maxwise(&rot, m(3, &[1, 2]), 2).unwrap(), Rational::new(2, 3));
        let pm = PermutationDistribution::point_mass(Permutation::identity(4));
        assert!(brute_maxwise(&pm, m(4, &[1, 4]), 4).unwrap().is_one());
    }

    #[test]
    fn conditional_last_values() {
        let u4 = uniform_distribution(4, &Limits::default()).unwrap();
        assert_eq!(
            brute_conditional_last(&u4, m(4, &[1, 3]), 3).unwrap(),
            Some(Rational::new(1, 2))
        );
        let rot = rotation_distribution(3).unwrap();
        assert_eq!(brute_conditional_last(&rot, m(3, &[1, 2]), 2).unwrap(), Some(Rational::one()));
        assert_eq!(brute_conditional_last(&rot, m(3, &[1, 3]), 1).unwrap(), Some(Rational::one()));
        let pm = PermutationDistribution::point_mass(Permutation::identity(3));
        assert_eq!(brute_conditional_last(&pm, m(3, &[2]), 2).unwrap(), None);
    }

    #[test]
    fn expected_cost_values() {
        let rot = rotation_distribution(3).unwrap();
        let ones = CostFunction::constant(3, Rational::one());
        assert_eq!(brute_expected_cost(&rot, &ones).unwrap(), Rational::from(3u64));
        // Charges |Y| to the element of Y that is last in every rotation.
        let last_in_rotation = CostFunction::new(3, |x, y: SubsetMask| {
            let star = match y.bits() {
                0b011 => 2,
                0b110 => 3,
                0b101 => 1,
                _ => y.min_element().unwrap(),
            };
            if x == star {
                Rational::from(y.len())
            } else {
                Rational::zero()
            }
        });
        assert_eq!(brute_expected_cost(&rot, &last_in_rotation).unwrap(), Rational::from(4u64));
    }

    #[test]
    fn entropy_values() {
        let lim = Limits::default();
        assert_eq!(exact_entropy(&PermutationDistribution::point_mass(Permutation::identity(5))), 0.0);
        assert!((exact_entropy(&uniform_distribution(3, &lim).unwrap()) - 6f64.ln()).abs() < 1e-12);
        assert!((exact_entropy(&rotation_distribution(3).unwrap()) - 3f64.ln()).abs() < 1e-12);
        assert!((exact_entropy(&uniform_distribution(6, &lim).unwrap()) - 720f64.ln()).abs() < 1e-12);
    }
}
