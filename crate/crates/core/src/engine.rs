//! Engine selection for a single distribution query.

use std::fmt;
use std::str::FromStr;

use crate::distributions::{binary_collapse_pmf, theorem_distribution, Evaluation, RawVariant};
use crate::error::{Error, Result};
use crate::oracles::{automaton_pmf, exhaustive_pmf, Caps};
use crate::pmf::Distribution;
use crate::probability::StateProbabilities;
use crate::statistic::StatisticKind;

/// Trial counts above which scalar queries default to the two-state path.
pub const COLLAPSE_THRESHOLD: u64 = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    /// Grouped combinatorial sums.
    Theorem,
    /// Per-variable sums, `n <= 12`.
    RawSums,
    /// Two-state closed-form counting.
    Collapse,
    /// Automaton dynamic program.
    Dp,
    /// Enumeration of every sequence.
    Exhaustive,
}

impl Engine {
    pub const ALL: [Engine; 5] = [
        Engine::Theorem,
        Engine::RawSums,
        Engine::Collapse,
        Engine::Dp,
        Engine::Exhaustive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Theorem => "theorem",
            Engine::RawSums => "raw",
            Engine::Collapse => "collapse",
            Engine::Dp => "dp",
            Engine::Exhaustive => "exhaustive",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Engine> {
        Engine::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidQuery(format!("unknown engine {s:?}")))
    }
}

/// Collapse for scalar statistics beyond [`COLLAPSE_THRESHOLD`] trials, the
/// grouped sums otherwise.
pub fn default_engine(kind: &StatisticKind, n: u64) -> Engine {
    if !kind.is_joint() && n > COLLAPSE_THRESHOLD {
        Engine::Collapse
    } else {
        Engine::Theorem
    }
}

/// Evaluates `kind` at `n` trials (the horizon for waiting times).
pub fn evaluate(
    engine: Engine,
    kind: &StatisticKind,
    n: u64,
    probs: &StateProbabilities,
    caps: &Caps,
) -> Result<Distribution> {
    match engine {
        Engine::Theorem => theorem_distribution(kind, n, probs, Evaluation::Grouped),
        Engine::RawSums => {
            theorem_distribution(kind, n, probs, Evaluation::Raw(RawVariant::Corrected))
        }
        Engine::Collapse => binary_collapse_pmf(kind, n, probs).map(Distribution::Scalar),
        Engine::Dp => automaton_pmf(n, probs, kind, caps.dp),
        Engine::Exhaustive => exhaustive_pmf(n, probs, kind, caps.exhaustive),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn engine_names_round_trip() {
        for e in Engine::ALL {
            assert_eq!(e.name().parse::<Engine>().unwrap(), e);
        }
        assert!("fast".parse::<Engine>().is_err());
    }

    #[test]
    fn defaults() {
        assert_eq!(default_engine(&StatisticKind::Longest, 25), Engine::Theorem);
        assert_eq!(default_engine(&StatisticKind::Longest, 26), Engine::Collapse);
        assert_eq!(default_engine(&StatisticKind::JointLongest, 40), Engine::Theorem);
    }

    #[test]
    fn engines_agree_on_a_small_query() {
        let probs: StateProbabilities = "1/6,1/2,1/6,1/6".parse().unwrap();
        let kind = StatisticKind::ExactLength { k: 2 };
        let caps = Caps::default();
        let reference = evaluate(Engine::Theorem, &kind, 6, &probs, &caps).unwrap();
        for e in Engine::ALL {
            assert_eq!(evaluate(e, &kind, 6, &probs, &caps).unwrap(), reference, "{e}");
        }
    }
}
