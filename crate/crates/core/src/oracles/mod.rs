//! Independent ground truths for the closed-form sums: brute-force
//! enumeration, a dynamic program over run automata, and seeded simulation.

mod automaton;
mod exhaustive;
mod monte_carlo;

pub use automaton::{
    automaton_pmf, automaton_pmf_uncapped, prob_longest_at_least, prob_nonoverlapping_at_least,
    prob_shortest_at_least,
};
pub use exhaustive::{exhaustive_pmf, ExhaustiveCounts};
pub use monte_carlo::{monte_carlo_pmf, sample_sequences, MonteCarloRow, MonteCarloTable, Z_99};

pub use crate::statistic::{Outcome, StatisticKind};

use crate::error::{Error, Result};

/// Environment variable overriding the oracle caps.
pub const CAP_ENV: &str = "RUNLAB_CAP_N";

/// Largest `n` each capped engine accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub exhaustive: u64,
    pub dp: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            exhaustive: 12,
            dp: 200,
        }
    }
}

impl Caps {
    /// `"N"` sets the exhaustive cap; `"N,M"` sets the exhaustive and DP caps.
    pub fn parse(text: &str) -> Result<Caps> {
        let bad = || Error::InvalidQuery(format!("{CAP_ENV} must be N or N,M, got {text:?}"));
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let num = |s: &str| s.parse::<u64>().map_err(|_| bad());
        match parts.as_slice() {
            [e] => Ok(Caps {
                exhaustive: num(e)?,
                ..Caps::default()
            }),
            [e, d] => Ok(Caps {
                exhaustive: num(e)?,
                dp: num(d)?,
            }),
            _ => Err(bad()),
        }
    }

    /// Defaults, overridden by `RUNLAB_CAP_N` when set.
    pub fn from_env() -> Result<Caps> {
        match std::env::var(CAP_ENV) {
            Ok(v) if !v.trim().is_empty() => Caps::parse(&v),
            _ => Ok(Caps::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_parsing() {
        assert_eq!(Caps::parse("9").unwrap(), Caps { exhaustive: 9, dp: 200 });
        assert_eq!(Caps::parse("9, 50").unwrap(), Caps { exhaustive: 9, dp: 50 });
        assert!(Caps::parse("x").is_err());
        assert!(Caps::parse("1,2,3").is_err());
    }
}
