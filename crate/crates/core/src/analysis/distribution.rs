use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::netsim::AdversaryView;
use crate::rng::{enumerate_tapes, Randomness, ENUMERATION_BOUND};

/// Exact finite distribution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution<T: Ord> {
    mass: BTreeMap<T, BigRational>,
}

pub type ViewDistribution = Distribution<AdversaryView>;

impl<T: Ord> Default for Distribution<T> {
    fn default() -> Self {
        Self { mass: BTreeMap::new() }
    }
}

impl<T: Ord> FromIterator<(T, BigRational)> for Distribution<T> {
    fn from_iter<I: IntoIterator<Item = (T, BigRational)>>(iter: I) -> Self {
        let mut d = Self::default();
        for (v, p) in iter {
            d.add(v, p);
        }
        d
    }
}

impl<T: Ord> Distribution<T> {
    pub fn point(value: T) -> Self {
        std::iter::once((value, BigRational::one())).collect()
    }

    pub fn add(&mut self, value: T, p: BigRational) {
        if p.is_zero() {
            return;
        }
        *self.mass.entry(value).or_insert_with(BigRational::zero) += p;
    }

    pub fn prob(&self, value: &T) -> BigRational {
        self.mass.get(value).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total(&self) -> BigRational {
        self.mass.values().fold(BigRational::zero(), |acc, p| acc + p)
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &BigRational)> {
        self.mass.iter()
    }

    pub fn map<U: Ord>(&self, mut f: impl FnMut(&T) -> U) -> Distribution<U> {
        self.mass.iter().map(|(v, p)| (f(v), p.clone())).collect()
    }

    /// Conditional distribution given `keep`, renormalized.
    pub fn condition(&self, mut keep: impl FnMut(&T) -> bool) -> Result<Distribution<T>>
    where
        T: Clone,
    {
        let kept: Vec<(T, BigRational)> =
            self.mass.iter().filter(|(v, _)| keep(v)).map(|(v, p)| (v.clone(), p.clone())).collect();
        let z = kept.iter().fold(BigRational::zero(), |acc, (_, p)| acc + p);
        if z.is_zero() {
            return Err(Error::contract("conditioning on an event of probability zero"));
        }
        Ok(kept.into_iter().map(|(v, p)| (v, p / &z)).collect())
    }

    /// Probability that `event` holds.
    pub fn probability_of(&self, mut event: impl FnMut(&T) -> bool) -> BigRational {
        self.mass.iter().filter(|(v, _)| event(v)).fold(BigRational::zero(), |acc, (_, p)| acc + p)
    }
}

/// Runs `f` on every random tape and collects the exact output distribution.
pub fn exact_distribution<T: Ord>(f: impl FnMut(&mut dyn Randomness) -> Result<T>) -> Result<Distribution<T>> {
    Ok(enumerate_tapes(ENUMERATION_BOUND, f)?.into_iter().collect())
}

/// Half the L1 distance.
pub fn statistical_distance<T: Ord>(d1: &Distribution<T>, d2: &Distribution<T>) -> BigRational {
    let mut sum = BigRational::zero();
    for (v, p) in d1.iter() {
        sum += (p - d2.prob(v)).abs();
    }
    for (v, p) in d2.iter() {
        if d1.prob(v).is_zero() {
            sum += p.clone();
        }
    }
    sum / BigRational::from_integer(2.into())
}

/// `sum_v max_s Pr[s, v]` over a joint distribution of (secret, view).
pub fn guessing_probability<S: Ord, V: Ord + Clone>(joint: &Distribution<(S, V)>) -> BigRational {
    let mut best: BTreeMap<V, BigRational> = BTreeMap::new();
    for ((_, v), p) in joint.iter() {
        let slot = best.entry(v.clone()).or_insert_with(BigRational::zero);
        if p > slot {
            *slot = p.clone();
        }
    }
    best.values().fold(BigRational::zero(), |acc, p| acc + p)
}

/// Exact rational as a float, for reports.
pub fn to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// `num/den` as an exact rational.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// `2^-ell`.
pub fn inverse_power_of_two(ell: usize) -> BigRational {
    BigRational::new(1.into(), num_bigint::BigInt::one() << ell)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::ChoiceBit;

    #[test]
    fn distance_examples() {
        let a: Distribution<&str> = [("a", ratio(1, 2)), ("b", ratio(1, 2))].into_iter().collect();
        let b: Distribution<&str> = [("a", ratio(1, 4)), ("b", ratio(3, 4))].into_iter().collect();
        assert_eq!(statistical_distance(&a, &b), ratio(1, 4));
        assert_eq!(statistical_distance(&a, &a), BigRational::zero());
        let c = Distribution::point("c");
        assert_eq!(statistical_distance(&a, &c), BigRational::one());
    }

    #[test]
    fn guessing_examples() {
        let independent: Distribution<(u8, &str)> =
            [((0, "v"), ratio(1, 2)), ((1, "v"), ratio(1, 2))].into_iter().collect();
        assert_eq!(guessing_probability(&independent), ratio(1, 2));
        let revealing: Distribution<(u8, u8)> = [((0, 0), ratio(1, 2)), ((1, 1), ratio(1, 2))].into_iter().collect();
        assert_eq!(guessing_probability(&revealing), BigRational::one());
    }

    #[test]
    fn empty_view_has_mass_one() {
        let d = exact_distribution(|_| Ok(AdversaryView::default())).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.prob(&AdversaryView::default()), BigRational::one());
    }

    #[test]
    fn coin_mass_is_exact() {
        let d = exact_distribution(|rng| Ok(ChoiceBit::random(rng))).unwrap();
        assert_eq!(d.total(), BigRational::one());
        assert_eq!(d.prob(&ChoiceBit::ONE), ratio(1, 2));
    }

    #[test]
    fn conditioning() {
        let d: Distribution<u8> = [(0, ratio(1, 4)), (1, ratio(1, 4)), (2, ratio(1, 2))].into_iter().collect();
        let c = d.condition(|v| *v < 2).unwrap();
        assert_eq!(c.prob(&0), ratio(1, 2));
        assert!(d.condition(|v| *v > 5).is_err());
        assert_eq!(inverse_power_of_two(3), ratio(1, 8));
    }
}
