//! Multinomial coefficients and the constrained solution sets indexing every
//! run-distribution sum.
//!
//! A sequence of trials is cut into tokens `B^(t-1) X` with `X` one of the
//! terminators A, C, D. The sums range over how many tokens of each length
//! `t` occur, subject to `sum_t t * m_t = target`. The raw form keeps the
//! three terminators apart (`x_t`, `y_t`, `z_t`); the grouped form only tracks
//! `m_t = x_t + y_t + z_t` and sums the split analytically via
//! [`split_weight`].

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::probability::{Rational, StateProbabilities};

thread_local! {
    static FACTORIALS: RefCell<Vec<BigUint>> = RefCell::new(vec![BigUint::one()]);
}

fn with_factorials<R>(up_to: u64, f: impl FnOnce(&[BigUint]) -> R) -> R {
    FACTORIALS.with(|cell| {
        let mut table = cell.borrow_mut();
        while (table.len() as u64) <= up_to {
            let next = table.last().expect("0! present") * BigUint::from(table.len());
            table.push(next);
        }
        f(&table)
    })
}

pub fn factorial(n: u64) -> BigUint {
    with_factorials(n, |table| table[n as usize].clone())
}

/// `(sum parts)! / prod(part!)`.
pub fn multinomial(parts: &[u64]) -> BigUint {
    let total: u64 = parts.iter().sum();
    with_factorials(total, |table| {
        let denom = parts
            .iter()
            .filter(|&&p| p > 1)
            .fold(BigUint::one(), |acc, &p| acc * &table[p as usize]);
        &table[total as usize] / denom
    })
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    multinomial(&[k, n - k])
}

/// `(P_a + P_c + P_d)^m`: the sum over all splits `x + y + z = m` of
/// `m!/(x! y! z!) P_a^x P_c^y P_d^z`.
pub fn split_weight(m: u64, probs: &StateProbabilities) -> Rational {
    num_traits::pow(probs.non_b(), m as usize)
}

/// All nonnegative `c` with `sum_j weights[j] * c[j] == target`, yielded in
/// decreasing lexicographic order of `c`.
///
/// The last coordinate is always forced, so putting a weight of 1 last makes
/// every visited state a solution.
#[derive(Clone, Debug)]
pub struct WeightedCompositions {
    weights: Vec<u64>,
    counts: Vec<u64>,
    // remaining[j]: target left before coordinate j is assigned
    remaining: Vec<u64>,
    started: bool,
    done: bool,
}

impl WeightedCompositions {
    pub fn new(weights: Vec<u64>, target: u64) -> Self {
        assert!(weights.iter().all(|&w| w > 0), "weights must be positive");
        let len = weights.len();
        let mut remaining = vec![0; len + 1];
        remaining[0] = target;
        WeightedCompositions {
            weights,
            counts: vec![0; len],
            remaining,
            started: false,
            done: false,
        }
    }

    fn fill_from(&mut self, level: usize) {
        for j in level..self.weights.len() {
            let c = self.remaining[j] / self.weights[j];
            self.counts[j] = c;
            self.remaining[j + 1] = self.remaining[j] - c * self.weights[j];
        }
    }

    fn is_solution(&self) -> bool {
        self.remaining[self.weights.len()] == 0
    }

    fn advance(&mut self) -> bool {
        let len = self.weights.len();
        if len < 2 {
            return false;
        }
        for j in (0..len - 1).rev() {
            if self.counts[j] > 0 {
                self.counts[j] -= 1;
                self.remaining[j + 1] = self.remaining[j] - self.counts[j] * self.weights[j];
                self.fill_from(j + 1);
                return true;
            }
        }
        false
    }
}

impl Iterator for WeightedCompositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.fill_from(0);
            if self.is_solution() {
                if self.weights.is_empty() {
                    self.done = true;
                }
                return Some(self.counts.clone());
            }
        }
        loop {
            if !self.advance() {
                self.done = true;
                return None;
            }
            if self.is_solution() {
                return Some(self.counts.clone());
            }
        }
    }
}

/// `sum_t t * m_t = target` over the token lengths `t` in `weights`, with
/// optional restrictions to a subset of lengths and pinned group totals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionConstraint {
    weights: Vec<u64>,
    target: u64,
    allowed: BTreeSet<u64>,
    pinned: BTreeMap<u64, u64>,
}

impl CompositionConstraint {
    pub fn new(weights: Vec<u64>, target: u64) -> Result<Self> {
        if weights.contains(&0) {
            return Err(Error::InvalidQuery("token lengths must be positive".into()));
        }
        let allowed: BTreeSet<u64> = weights.iter().copied().collect();
        if allowed.len() != weights.len() {
            return Err(Error::InvalidQuery("token lengths must be distinct".into()));
        }
        Ok(CompositionConstraint {
            weights,
            target,
            allowed,
            pinned: BTreeMap::new(),
        })
    }

    /// Restricts nonzero totals to the given lengths.
    pub fn with_allowed(mut self, allowed: impl IntoIterator<Item = u64>) -> Result<Self> {
        let allowed: BTreeSet<u64> = allowed.into_iter().collect();
        if let Some(t) = allowed.iter().find(|t| !self.weights.contains(t)) {
            return Err(Error::InvalidQuery(format!("length {t} is not a weight")));
        }
        if let Some(t) = self.pinned.keys().find(|t| !allowed.contains(t)) {
            return Err(Error::InvalidQuery(format!("pinned length {t} is not allowed")));
        }
        self.allowed = allowed;
        Ok(self)
    }

    /// Requires the group total at length `t` to equal `total`.
    pub fn with_pin(mut self, t: u64, total: u64) -> Result<Self> {
        if !self.allowed.contains(&t) {
            return Err(Error::InvalidQuery(format!("pinned length {t} is not allowed")));
        }
        self.pinned.insert(t, total);
        Ok(self)
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    pub fn is_allowed(&self, t: u64) -> bool {
        self.allowed.contains(&t)
    }

    pub fn pinned(&self) -> &BTreeMap<u64, u64> {
        &self.pinned
    }

    fn free_weights(&self) -> Vec<u64> {
        self.weights
            .iter()
            .copied()
            .filter(|t| self.allowed.contains(t) && !self.pinned.contains_key(t))
            .collect()
    }

    fn pinned_load(&self) -> u64 {
        self.pinned.iter().map(|(t, v)| t * v).sum()
    }

    pub fn grouped_solutions(&self) -> GroupedSolutions<'_> {
        enumerate_grouped_solutions(self)
    }

    pub fn raw_solutions(&self) -> RawSolutions<'_> {
        enumerate_raw_solutions(self)
    }
}

/// Group totals `m_t`, one entry per weight of the constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupedSolution {
    entries: Vec<(u64, u64)>,
}

impl GroupedSolution {
    pub fn get(&self, t: u64) -> u64 {
        self.entries
            .iter()
            .find(|(w, _)| *w == t)
            .map_or(0, |&(_, m)| m)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.entries.iter().copied()
    }

    /// Totals in weight order.
    pub fn totals(&self) -> Vec<u64> {
        self.entries.iter().map(|&(_, m)| m).collect()
    }

    /// `sum_t m_t`: the number of terminator symbols.
    pub fn total_count(&self) -> u64 {
        self.entries.iter().map(|&(_, m)| m).sum()
    }
}

pub struct GroupedSolutions<'a> {
    constraint: &'a CompositionConstraint,
    free: Vec<u64>,
    inner: Option<WeightedCompositions>,
}

impl Iterator for GroupedSolutions<'_> {
    type Item = GroupedSolution;

    fn next(&mut self) -> Option<GroupedSolution> {
        let counts = self.inner.as_mut()?.next()?;
        let c = self.constraint;
        let entries = c
            .weights
            .iter()
            .map(|&t| {
                let m = match c.pinned.get(&t) {
                    Some(&v) => v,
                    None => self
                        .free
                        .iter()
                        .position(|&w| w == t)
                        .map_or(0, |j| counts[j]),
                };
                (t, m)
            })
            .collect();
        Some(GroupedSolution { entries })
    }
}

/// Streams every grouped solution exactly once, in decreasing lexicographic
/// order of `m` (taken in weight order).
pub fn enumerate_grouped_solutions(c: &CompositionConstraint) -> GroupedSolutions<'_> {
    let free = c.free_weights();
    let load = c.pinned_load();
    let inner = (load <= c.target).then(|| WeightedCompositions::new(free.clone(), c.target - load));
    GroupedSolutions {
        constraint: c,
        free,
        inner,
    }
}

/// Per-terminator counts `(x_t, y_t, z_t)` for each weight `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawSolution {
    entries: Vec<(u64, [u64; 3])>,
}

impl RawSolution {
    pub fn iter(&self) -> impl Iterator<Item = (u64, [u64; 3])> + '_ {
        self.entries.iter().copied()
    }

    pub fn group_total(&self, t: u64) -> u64 {
        self.entries
            .iter()
            .find(|(w, _)| *w == t)
            .map_or(0, |(_, xyz)| xyz.iter().sum())
    }

    /// `(sum x_t, sum y_t, sum z_t)`.
    pub fn terminator_totals(&self) -> [u64; 3] {
        self.entries.iter().fold([0; 3], |acc, (_, xyz)| {
            [acc[0] + xyz[0], acc[1] + xyz[1], acc[2] + xyz[2]]
        })
    }

    /// All `3 * len` variables, for the multinomial.
    pub fn parts(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().flat_map(|(_, xyz)| xyz.iter().copied())
    }
}

pub struct RawSolutions<'a> {
    constraint: &'a CompositionConstraint,
    lengths: Vec<u64>,
    inner: WeightedCompositions,
}

impl Iterator for RawSolutions<'_> {
    type Item = RawSolution;

    fn next(&mut self) -> Option<RawSolution> {
        loop {
            let counts = self.inner.next()?;
            let entries: Vec<(u64, [u64; 3])> = self
                .lengths
                .iter()
                .enumerate()
                .map(|(j, &t)| (t, [counts[3 * j], counts[3 * j + 1], counts[3 * j + 2]]))
                .collect();
            let pins_hold = self.constraint.pinned.iter().all(|(&t, &v)| {
                entries
                    .iter()
                    .find(|(w, _)| *w == t)
                    .map_or(v == 0, |(_, xyz)| xyz.iter().sum::<u64>() == v)
            });
            if pins_hold {
                return Some(RawSolution { entries });
            }
        }
    }
}

/// Streams every per-variable solution: three free variables per allowed
/// length, pins checked on the group totals. Slow; kept as a reference.
pub fn enumerate_raw_solutions(c: &CompositionConstraint) -> RawSolutions<'_> {
    let lengths: Vec<u64> = c
        .weights
        .iter()
        .copied()
        .filter(|t| c.allowed.contains(t))
        .collect();
    let expanded = lengths.iter().flat_map(|&t| [t, t, t]).collect();
    RawSolutions {
        constraint: c,
        lengths,
        inner: WeightedCompositions::new(expanded, c.target),
    }
}
