//! Dynamic programming over run automata.
//!
//! Each statistic is tracked by a small state machine read left to right: a B
//! extends the current run, any other symbol closes it, and the end of the
//! sequence closes the trailing run. The DP carries integer weights over the
//! common denominator `D` of the probabilities and divides by `D^n` at the end.
//! A, C and D act identically on every tracker, so they share one transition
//! with weight `D (P_a + P_c + P_d)`.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::pmf::Distribution;
use crate::probability::{Rational, StateProbabilities};
use crate::statistic::{distribution_from_outcomes, Outcome, StatisticKind};

enum Step<S> {
    Next(S),
    /// The outcome is decided at the current trial.
    Stop,
}

trait Tracker {
    type State: Clone + Eq + Hash;
    fn initial(&self) -> Self::State;
    fn on_b(&self, s: &Self::State) -> Step<Self::State>;
    fn on_other(&self, s: &Self::State) -> Self::State;
    fn finish(&self, s: &Self::State) -> Outcome;
}

struct Weights {
    denom: BigUint,
    b: BigUint,
    other: BigUint,
}

impl Weights {
    fn new(probs: &StateProbabilities) -> Weights {
        let (denom, w) = probs.integer_weights();
        Weights {
            denom,
            other: &w[0] + &w[2] + &w[3],
            b: w[1].clone(),
        }
    }
}

fn add<K: Eq + Hash>(map: &mut HashMap<K, BigUint>, key: K, w: BigUint) {
    if !w.is_zero() {
        *map.entry(key).or_insert_with(BigUint::zero) += w;
    }
}

fn run<T: Tracker>(tracker: &T, n: u64, probs: &StateProbabilities) -> BTreeMap<Outcome, Rational> {
    let w = Weights::new(probs);
    let mut layer: HashMap<T::State, BigUint> = HashMap::new();
    layer.insert(tracker.initial(), BigUint::one());
    let mut stopped: BTreeMap<Outcome, Rational> = BTreeMap::new();
    for pos in 1..=n {
        let mut next = HashMap::with_capacity(layer.len());
        let mut stop_weight = BigUint::zero();
        for (state, weight) in &layer {
            match tracker.on_b(state) {
                Step::Next(s) => add(&mut next, s, weight * &w.b),
                Step::Stop => stop_weight += weight * &w.b,
            }
            add(&mut next, tracker.on_other(state), weight * &w.other);
        }
        if !stop_weight.is_zero() {
            let scale = num_traits::pow(w.denom.clone(), pos as usize);
            stopped.insert(
                Outcome::Value(pos),
                Rational::new(stop_weight.into(), scale.into()),
            );
        }
        layer = next;
    }
    let scale: BigUint = num_traits::pow(w.denom.clone(), n as usize);
    let mut finished: BTreeMap<Outcome, BigUint> = BTreeMap::new();
    for (state, weight) in layer {
        *finished.entry(tracker.finish(&state)).or_default() += weight;
    }
    for (o, weight) in finished {
        let mass = Rational::new(weight.into(), scale.clone().into());
        *stopped.entry(o).or_insert_with(Rational::zero) += mass;
    }
    stopped
}

struct Nonoverlapping {
    k: u64,
}

impl Tracker for Nonoverlapping {
    /// (run since the last counted block, count)
    type State = (u64, u64);
    fn initial(&self) -> Self::State {
        (0, 0)
    }
    fn on_b(&self, &(run, count): &Self::State) -> Step<Self::State> {
        if run + 1 == self.k {
            Step::Next((0, count + 1))
        } else {
            Step::Next((run + 1, count))
        }
    }
    fn on_other(&self, &(_, count): &Self::State) -> Self::State {
        (0, count)
    }
    fn finish(&self, &(_, count): &Self::State) -> Outcome {
        Outcome::Value(count)
    }
}

struct ExactLength {
    k: u64,
}

impl Tracker for ExactLength {
    /// (run capped at k + 1, count)
    type State = (u64, u64);
    fn initial(&self) -> Self::State {
        (0, 0)
    }
    fn on_b(&self, &(run, count): &Self::State) -> Step<Self::State> {
        Step::Next(((run + 1).min(self.k + 1), count))
    }
    fn on_other(&self, &(run, count): &Self::State) -> Self::State {
        (0, count + u64::from(run == self.k))
    }
    fn finish(&self, &(run, count): &Self::State) -> Outcome {
        Outcome::Value(count + u64::from(run == self.k))
    }
}

struct Longest;

impl Tracker for Longest {
    /// (run, longest so far including the current run)
    type State = (u64, u64);
    fn initial(&self) -> Self::State {
        (0, 0)
    }
    fn on_b(&self, &(run, best): &Self::State) -> Step<Self::State> {
        Step::Next((run + 1, best.max(run + 1)))
    }
    fn on_other(&self, &(_, best): &Self::State) -> Self::State {
        (0, best)
    }
    fn finish(&self, &(_, best): &Self::State) -> Outcome {
        Outcome::Value(best)
    }
}

struct Shortest;

impl Shortest {
    fn close(run: u64, min: Option<u64>) -> Option<u64> {
        match (run, min) {
            (0, m) => m,
            (r, None) => Some(r),
            (r, Some(m)) => Some(r.min(m)),
        }
    }
}

impl Tracker for Shortest {
    /// (run capped at the closed minimum, closed minimum)
    type State = (u64, Option<u64>);
    fn initial(&self) -> Self::State {
        (0, None)
    }
    fn on_b(&self, &(run, min): &Self::State) -> Step<Self::State> {
        let run = match min {
            Some(m) => (run + 1).min(m),
            None => run + 1,
        };
        Step::Next((run, min))
    }
    fn on_other(&self, &(run, min): &Self::State) -> Self::State {
        (0, Shortest::close(run, min))
    }
    fn finish(&self, &(run, min): &Self::State) -> Outcome {
        Shortest::close(run, min).map_or(Outcome::Undefined, Outcome::Value)
    }
}

struct JointLongest;

impl JointLongest {
    fn close(run: u64, (best, count): (u64, u64)) -> (u64, u64) {
        if run > best {
            (run, 1)
        } else if run == best && run > 0 {
            (best, count + 1)
        } else {
            (best, count)
        }
    }
}

impl Tracker for JointLongest {
    /// (run, (longest closed run, its count))
    type State = (u64, (u64, u64));
    fn initial(&self) -> Self::State {
        (0, (0, 0))
    }
    fn on_b(&self, &(run, closed): &Self::State) -> Step<Self::State> {
        Step::Next((run + 1, closed))
    }
    fn on_other(&self, &(run, closed): &Self::State) -> Self::State {
        (0, JointLongest::close(run, closed))
    }
    fn finish(&self, &(run, closed): &Self::State) -> Outcome {
        let (best, count) = JointLongest::close(run, closed);
        Outcome::Pair(best, count)
    }
}

struct JointShortest;

impl JointShortest {
    fn close(run: u64, closed: Option<(u64, u64)>) -> Option<(u64, u64)> {
        match (run, closed) {
            (0, c) => c,
            (r, None) => Some((r, 1)),
            (r, Some((m, _))) if r < m => Some((r, 1)),
            (r, Some((m, c))) if r == m => Some((m, c + 1)),
            (_, c) => c,
        }
    }
}

impl Tracker for JointShortest {
    /// (run capped just above the closed minimum, (minimum, its count))
    type State = (u64, Option<(u64, u64)>);
    fn initial(&self) -> Self::State {
        (0, None)
    }
    fn on_b(&self, &(run, closed): &Self::State) -> Step<Self::State> {
        let run = match closed {
            Some((m, _)) => (run + 1).min(m + 1),
            None => run + 1,
        };
        Step::Next((run, closed))
    }
    fn on_other(&self, &(run, closed): &Self::State) -> Self::State {
        (0, JointShortest::close(run, closed))
    }
    fn finish(&self, &(run, closed): &Self::State) -> Outcome {
        JointShortest::close(run, closed).map_or(Outcome::Undefined, |(m, c)| Outcome::Pair(m, c))
    }
}

struct Waiting {
    k: u64,
    r: u64,
}

impl Tracker for Waiting {
    /// (run since the last completed block, completed blocks)
    type State = (u64, u64);
    fn initial(&self) -> Self::State {
        (0, 0)
    }
    fn on_b(&self, &(run, done): &Self::State) -> Step<Self::State> {
        if run + 1 < self.k {
            Step::Next((run + 1, done))
        } else if done + 1 == self.r {
            Step::Stop
        } else {
            Step::Next((0, done + 1))
        }
    }
    fn on_other(&self, &(_, done): &Self::State) -> Self::State {
        (0, done)
    }
    fn finish(&self, _: &Self::State) -> Outcome {
        Outcome::Censored
    }
}

/// Exact distribution by dynamic programming, without a size cap.
pub fn automaton_pmf_uncapped(
    n: u64,
    probs: &StateProbabilities,
    kind: &StatisticKind,
) -> Result<Distribution> {
    kind.validate(n)?;
    let masses = match *kind {
        StatisticKind::Nonoverlapping { k } => run(&Nonoverlapping { k }, n, probs),
        StatisticKind::ExactLength { k } => run(&ExactLength { k }, n, probs),
        StatisticKind::Longest => run(&Longest, n, probs),
        StatisticKind::Shortest => run(&Shortest, n, probs),
        StatisticKind::JointLongest => run(&JointLongest, n, probs),
        StatisticKind::JointShortest => run(&JointShortest, n, probs),
        StatisticKind::WaitingFirst { k } => run(&Waiting { k, r: 1 }, n, probs),
        StatisticKind::WaitingRth { k, r } => run(&Waiting { k, r }, n, probs),
    };
    distribution_from_outcomes(kind, n, masses)
}

/// Exact distribution by dynamic programming; fails when `n > cap`.
pub fn automaton_pmf(
    n: u64,
    probs: &StateProbabilities,
    kind: &StatisticKind,
    cap: u64,
) -> Result<Distribution> {
    if n > cap {
        return Err(Error::CapExceeded {
            engine: "dp",
            n,
            cap,
        });
    }
    automaton_pmf_uncapped(n, probs, kind)
}

/// Probability of a sequence of length `n` passing through an absorbing
/// condition, given a transient-state machine with at most a few states.
fn absorbed<S: Clone + Eq + Hash>(
    n: u64,
    probs: &StateProbabilities,
    initial: S,
    on_b: impl Fn(&S) -> Option<S>,
    on_other: impl Fn(&S) -> Option<S>,
) -> Rational {
    let w = Weights::new(probs);
    let mut layer: HashMap<S, BigUint> = HashMap::new();
    layer.insert(initial, BigUint::one());
    for _ in 0..n {
        let mut next = HashMap::with_capacity(layer.len());
        for (state, weight) in &layer {
            if let Some(s) = on_b(state) {
                add(&mut next, s, weight * &w.b);
            }
            if let Some(s) = on_other(state) {
                add(&mut next, s, weight * &w.other);
            }
        }
        layer = next;
    }
    let surviving: BigUint = layer.into_values().sum();
    let scale: BigUint = num_traits::pow(w.denom, n as usize);
    Rational::one() - Rational::new(surviving.into(), scale.into())
}

/// `P(L_n >= l)`.
pub fn prob_longest_at_least(n: u64, l: u64, probs: &StateProbabilities) -> Rational {
    if l == 0 {
        return Rational::one();
    }
    absorbed(
        n,
        probs,
        0u64,
        |&run| (run + 1 < l).then_some(run + 1),
        |_| Some(0),
    )
}

/// `P(N_n^k >= x)`.
pub fn prob_nonoverlapping_at_least(
    n: u64,
    k: u64,
    x: u64,
    probs: &StateProbabilities,
) -> Result<Rational> {
    if k == 0 {
        return Err(Error::InvalidQuery("k must be at least 1".into()));
    }
    if x == 0 {
        return Ok(Rational::one());
    }
    Ok(absorbed(
        n,
        probs,
        (0u64, 0u64),
        |&(run, done)| {
            if run + 1 < k {
                Some((run + 1, done))
            } else if done + 1 < x {
                Some((0, done + 1))
            } else {
                None
            }
        },
        |&(_, done)| Some((0, done)),
    ))
}

/// `P(M_n >= s)`: at least one run, and every run at least `s` long.
pub fn prob_shortest_at_least(n: u64, s: u64, probs: &StateProbabilities) -> Rational {
    let s = s.max(1);
    let w = Weights::new(probs);
    // State: (current run capped at s, whether a run has closed or is open).
    let mut layer: HashMap<(u64, bool), BigUint> = HashMap::new();
    layer.insert((0, false), BigUint::one());
    for _ in 0..n {
        let mut next = HashMap::with_capacity(layer.len());
        for (&(run, seen), weight) in &layer {
            add(&mut next, ((run + 1).min(s), true), weight * &w.b);
            if run == 0 || run >= s {
                add(&mut next, (0, seen), weight * &w.other);
            }
        }
        layer = next;
    }
    let good: BigUint = layer
        .into_iter()
        .filter(|&((run, seen), _)| seen && (run == 0 || run >= s))
        .map(|(_, w)| w)
        .sum();
    let scale: BigUint = num_traits::pow(w.denom, n as usize);
    Rational::new(good.into(), scale.into())
}
