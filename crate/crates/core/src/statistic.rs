//! Statistic tags, queries, and per-sequence outcomes shared by every engine.

use std::collections::BTreeMap;
use std::fmt;

use crate::counting::{self, RunDecomposition};
use crate::error::{Error, Result};
use crate::pmf::{Distribution, ExactPmf, JointPmf};
use crate::probability::{Rational, StateProbabilities};
use crate::sequence::Symbol;

/// One tag per run statistic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StatisticKind {
    /// `N_n^k`: nonoverlapping (Feller) runs of order `k`.
    Nonoverlapping { k: u64 },
    /// `E_n^k`: maximal runs of length exactly `k`.
    ExactLength { k: u64 },
    /// `L_n`.
    Longest,
    /// `M_n`; undefined when no B occurs.
    Shortest,
    /// `(L_n, NL_n)`.
    JointLongest,
    /// `(M_n, NM_n)`.
    JointShortest,
    /// `W_1^k`, truncated at the horizon `n`.
    WaitingFirst { k: u64 },
    /// `W_r^k`, truncated at the horizon `n`.
    WaitingRth { k: u64, r: u64 },
}

impl StatisticKind {
    pub fn is_joint(&self) -> bool {
        matches!(self, StatisticKind::JointLongest | StatisticKind::JointShortest)
    }

    pub fn is_waiting(&self) -> bool {
        matches!(
            self,
            StatisticKind::WaitingFirst { .. } | StatisticKind::WaitingRth { .. }
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            StatisticKind::Nonoverlapping { .. } => "nonoverlapping",
            StatisticKind::ExactLength { .. } => "exact",
            StatisticKind::Longest => "longest",
            StatisticKind::Shortest => "shortest",
            StatisticKind::JointLongest => "joint-longest",
            StatisticKind::JointShortest => "joint-shortest",
            StatisticKind::WaitingFirst { .. } => "waiting-first",
            StatisticKind::WaitingRth { .. } => "waiting-rth",
        }
    }

    pub fn k(&self) -> Option<u64> {
        match *self {
            StatisticKind::Nonoverlapping { k }
            | StatisticKind::ExactLength { k }
            | StatisticKind::WaitingFirst { k }
            | StatisticKind::WaitingRth { k, .. } => Some(k),
            _ => None,
        }
    }

    pub fn r(&self) -> Option<u64> {
        match *self {
            StatisticKind::WaitingFirst { .. } => Some(1),
            StatisticKind::WaitingRth { r, .. } => Some(r),
            _ => None,
        }
    }

    /// Checks parameter bounds against the horizon `n` (the trial count, or
    /// the truncation point for waiting times).
    pub fn validate(&self, n: u64) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidQuery("n must be at least 1".into()));
        }
        match *self {
            StatisticKind::Nonoverlapping { k } | StatisticKind::ExactLength { k } => {
                if k == 0 || k > n {
                    return Err(Error::InvalidQuery(format!(
                        "k = {k} must satisfy 1 <= k <= n = {n}"
                    )));
                }
            }
            StatisticKind::WaitingFirst { k } => {
                if k == 0 || n < k {
                    return Err(Error::InvalidQuery(format!(
                        "k = {k} must satisfy 1 <= k <= n_max = {n}"
                    )));
                }
            }
            StatisticKind::WaitingRth { k, r } => {
                if k == 0 || r == 0 {
                    return Err(Error::InvalidQuery("k and r must be at least 1".into()));
                }
                if n < k.saturating_mul(r) {
                    return Err(Error::InvalidQuery(format!(
                        "n_max = {n} must be at least k * r = {}",
                        k.saturating_mul(r)
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

impl fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            StatisticKind::Nonoverlapping { k }
            | StatisticKind::ExactLength { k }
            | StatisticKind::WaitingFirst { k } => write!(f, "{}(k={k})", self.name()),
            StatisticKind::WaitingRth { k, r } => write!(f, "{}(k={k},r={r})", self.name()),
            _ => write!(f, "{}", self.name()),
        }
    }
}

/// Trial count, run order, occurrence index, and probabilities for one
/// theorem evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunQuery {
    pub n: u64,
    pub k: u64,
    pub r: u64,
    pub probs: StateProbabilities,
}

impl RunQuery {
    pub fn new(n: u64, probs: StateProbabilities) -> Self {
        RunQuery { n, k: 1, r: 1, probs }
    }

    pub fn with_k(mut self, k: u64) -> Self {
        self.k = k;
        self
    }

    pub fn with_r(mut self, r: u64) -> Self {
        self.r = r;
        self
    }
}

/// Value of a statistic on one concrete sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Value(u64),
    Pair(u64, u64),
    /// The statistic is undefined (no B at all, for shortest-run statistics).
    Undefined,
    /// The waiting time exceeds the horizon.
    Censored,
}

/// Evaluates `kind` on a sequence whose run decomposition is `runs`.
pub fn outcome(kind: &StatisticKind, symbols: &[Symbol], runs: &RunDecomposition) -> Outcome {
    match *kind {
        StatisticKind::Nonoverlapping { k } => Outcome::Value(runs.nonoverlapping(k)),
        StatisticKind::ExactLength { k } => Outcome::Value(runs.exact_length(k)),
        StatisticKind::Longest => Outcome::Value(runs.longest()),
        StatisticKind::Shortest => runs.shortest().map_or(Outcome::Undefined, Outcome::Value),
        StatisticKind::JointLongest => Outcome::Pair(runs.longest(), runs.longest_count()),
        StatisticKind::JointShortest => match (runs.shortest(), runs.shortest_count()) {
            (Some(m), Some(c)) => Outcome::Pair(m, c),
            _ => Outcome::Undefined,
        },
        StatisticKind::WaitingFirst { k } => {
            counting::waiting_time(symbols, k, 1).map_or(Outcome::Censored, Outcome::Value)
        }
        StatisticKind::WaitingRth { k, r } => {
            counting::waiting_time(symbols, k, r).map_or(Outcome::Censored, Outcome::Value)
        }
    }
}

/// Builds the distribution object matching `kind` from outcome masses.
pub fn distribution_from_outcomes(
    kind: &StatisticKind,
    horizon: u64,
    masses: BTreeMap<Outcome, Rational>,
) -> Result<Distribution> {
    let mut undefined = Rational::from_integer(0.into());
    let mut scalar = Vec::new();
    let mut joint = Vec::new();
    for (outcome, mass) in masses {
        match outcome {
            Outcome::Value(x) => scalar.push((x, mass)),
            Outcome::Pair(a, b) => joint.push(((a, b), mass)),
            Outcome::Undefined => undefined += mass,
            Outcome::Censored => {}
        }
    }
    if kind.is_joint() {
        Ok(Distribution::Joint(JointPmf::complete(joint, undefined)?))
    } else if kind.is_waiting() {
        Ok(Distribution::Scalar(ExactPmf::truncated(scalar, horizon)?))
    } else {
        Ok(Distribution::Scalar(ExactPmf::complete(scalar, undefined)?))
    }
}
