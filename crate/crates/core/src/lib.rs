//! Exact distributions of runs of a tracked symbol `B` in sequences of
//! independent four-state trials over `{A, B, C, D}`.
//!
//! The closed-form sums live in [`distributions`]; [`oracles`] holds the
//! brute-force, dynamic-programming and Monte Carlo engines used to check
//! them, and [`counting`] computes the same statistics on concrete data.

pub mod combinatorics;
pub mod counting;
pub mod distributions;
pub mod engine;
pub mod error;
pub mod oracles;
pub mod pmf;
pub mod probability;
pub mod sequence;
pub mod statistic;

pub use counting::{decompose, statistics, waiting_times, RunDecomposition, RunStatistics};
pub use engine::{default_engine, evaluate, Engine};
pub use error::{Error, Result};
pub use pmf::{Coverage, Distribution, ExactPmf, JointPmf};
pub use probability::{format_rational, parse_rational, Rational, StateProbabilities};
pub use sequence::{Sequence, Symbol};
pub use statistic::{Outcome, RunQuery, StatisticKind};
