//! Brute force over all `4^n` sequences.
//!
//! Enumeration is probability-free: each sequence adds one to the bucket keyed
//! by its outcome and its symbol counts. Weighing the buckets afterwards lets
//! one enumeration serve any number of probability vectors.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use crate::counting::RunDecomposition;
use crate::error::{Error, Result};
use crate::pmf::Distribution;
use crate::probability::{Rational, StateProbabilities};
use crate::sequence::Symbol;
use crate::statistic::{distribution_from_outcomes, outcome, Outcome, StatisticKind};

type Buckets = HashMap<(Outcome, [u8; 4]), u64>;

/// Outcome counts of one statistic over every sequence of length `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExhaustiveCounts {
    kind: StatisticKind,
    n: u64,
    buckets: BTreeMap<(Outcome, [u8; 4]), u64>,
}

/// Number of leading symbols fixed per parallel partition.
fn prefix_len(n: u64) -> u64 {
    n.min(4)
}

fn enumerate_partition(kind: &StatisticKind, n: usize, prefix: usize, index: u64) -> Buckets {
    let mut buckets = Buckets::new();
    let mut seq = vec![Symbol::A; n];
    let mut idx = index;
    for slot in seq[..prefix].iter_mut().rev() {
        *slot = Symbol::from_index((idx % 4) as usize).expect("digit below 4");
        idx /= 4;
    }
    let mut runs = RunDecomposition::default();
    loop {
        runs.refill(&seq);
        let mut counts = [0u8; 4];
        for s in &seq {
            counts[s.index()] += 1;
        }
        *buckets.entry((outcome(kind, &seq, &runs), counts)).or_insert(0) += 1;

        // Base-4 odometer over the free suffix, last position fastest.
        let mut pos = n;
        loop {
            if pos == prefix {
                return buckets;
            }
            pos -= 1;
            let next = seq[pos].index() + 1;
            if next < 4 {
                seq[pos] = Symbol::from_index(next).expect("digit below 4");
                break;
            }
            seq[pos] = Symbol::A;
        }
    }
}

impl ExhaustiveCounts {
    /// Enumerates all sequences of length `n`; fails above `cap`.
    pub fn enumerate(kind: &StatisticKind, n: u64, cap: u64) -> Result<Self> {
        kind.validate(n)?;
        if n > cap {
            return Err(Error::CapExceeded {
                engine: "exhaustive",
                n,
                cap,
            });
        }
        let prefix = prefix_len(n);
        let partials: Vec<Buckets> = (0..4u64.pow(prefix as u32))
            .into_par_iter()
            .map(|i| enumerate_partition(kind, n as usize, prefix as usize, i))
            .collect();
        let mut buckets = BTreeMap::new();
        for part in partials {
            for (key, count) in part {
                *buckets.entry(key).or_insert(0) += count;
            }
        }
        Ok(ExhaustiveCounts {
            kind: *kind,
            n,
            buckets,
        })
    }

    pub fn kind(&self) -> &StatisticKind {
        &self.kind
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of sequences with the given outcome.
    pub fn sequences_with(&self, target: Outcome) -> u64 {
        self.buckets
            .iter()
            .filter(|((o, _), _)| *o == target)
            .map(|(_, c)| c)
            .sum()
    }

    /// Exact distribution under `probs`.
    pub fn weigh(&self, probs: &StateProbabilities) -> Result<Distribution> {
        let (denom, weights) = probs.integer_weights();
        let mut numers: BTreeMap<Outcome, BigUint> = BTreeMap::new();
        for ((out, counts), &seqs) in &self.buckets {
            let mut w = BigUint::from(seqs);
            for (sym, &c) in counts.iter().enumerate() {
                if c > 0 {
                    w *= num_traits::pow(weights[sym].clone(), c as usize);
                }
            }
            if !w.is_zero() {
                *numers.entry(*out).or_default() += w;
            }
        }
        let scale: BigUint = num_traits::pow(denom, self.n as usize);
        let masses = numers
            .into_iter()
            .map(|(o, w)| (o, Rational::new(w.into(), scale.clone().into())))
            .collect();
        distribution_from_outcomes(&self.kind, self.n, masses)
    }
}

/// Exact PMF by enumerating every sequence of length `n`.
pub fn exhaustive_pmf(
    n: u64,
    probs: &StateProbabilities,
    kind: &StatisticKind,
    cap: u64,
) -> Result<Distribution> {
    ExhaustiveCounts::enumerate(kind, n, cap)?.weigh(probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probability::rational;

    #[test]
    fn longest_three_uniform() {
        let pmf = exhaustive_pmf(3, &StateProbabilities::uniform(), &StatisticKind::Longest, 12)
            .unwrap()
            .into_scalar()
            .unwrap();
        let values: Vec<_> = (0..=3).map(|l| pmf.get(l)).collect();
        assert_eq!(
            values,
            vec![rational(27, 64), rational(30, 64), rational(6, 64), rational(1, 64)]
        );
    }

    #[test]
    fn all_b_vector_puts_mass_on_one_outcome() {
        let probs: StateProbabilities = "0,1,0,0".parse().unwrap();
        let pmf = exhaustive_pmf(2, &probs, &StatisticKind::Shortest, 12)
            .unwrap()
            .into_scalar()
            .unwrap();
        assert_eq!(pmf.get(2), rational(1, 1));
        assert_eq!(pmf.masses().len(), 1);
    }

    #[test]
    fn single_trial_count() {
        let probs: StateProbabilities = "1/6,1/2,1/6,1/6".parse().unwrap();
        let pmf = exhaustive_pmf(1, &probs, &StatisticKind::Nonoverlapping { k: 1 }, 12)
            .unwrap()
            .into_scalar()
            .unwrap();
        assert_eq!(pmf.get(0), rational(1, 2));
        assert_eq!(pmf.get(1), rational(1, 2));
    }

    #[test]
    fn counts_cover_every_sequence() {
        let counts = ExhaustiveCounts::enumerate(&StatisticKind::Longest, 5, 12).unwrap();
        let total: u64 = (0..=5).map(|l| counts.sequences_with(Outcome::Value(l))).sum();
        assert_eq!(total, 4u64.pow(5));
        assert_eq!(counts.sequences_with(Outcome::Value(5)), 1);
    }

    #[test]
    fn respects_cap() {
        let err = ExhaustiveCounts::enumerate(&StatisticKind::Longest, 6, 5).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }
}
