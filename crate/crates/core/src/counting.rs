//! Run statistics of concrete sequences.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::sequence::Symbol;

/// Lengths of the maximal B-blocks of a sequence, in order of appearance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunDecomposition {
    run_lengths: Vec<u64>,
    trailing: bool,
    n: u64,
}

impl RunDecomposition {
    pub fn run_lengths(&self) -> &[u64] {
        &self.run_lengths
    }

    /// Whether the last block touches the end of the sequence.
    pub fn trailing(&self) -> bool {
        self.trailing
    }

    /// Length of the decomposed sequence.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Length of the final block when it touches the end, else 0.
    pub fn trailing_length(&self) -> u64 {
        if self.trailing {
            *self.run_lengths.last().expect("trailing run exists")
        } else {
            0
        }
    }

    /// Re-decomposes in place, reusing the allocation.
    pub fn refill(&mut self, symbols: &[Symbol]) {
        self.run_lengths.clear();
        let mut current = 0u64;
        for s in symbols {
            if s.is_b() {
                current += 1;
            } else if current > 0 {
                self.run_lengths.push(current);
                current = 0;
            }
        }
        self.trailing = current > 0;
        if self.trailing {
            self.run_lengths.push(current);
        }
        self.n = symbols.len() as u64;
    }

    /// `N_n^k`: each run of length `r` contributes `r / k`.
    pub fn nonoverlapping(&self, k: u64) -> u64 {
        self.run_lengths.iter().map(|r| r / k).sum()
    }

    /// `E_n^k`.
    pub fn exact_length(&self, k: u64) -> u64 {
        self.run_lengths.iter().filter(|&&r| r == k).count() as u64
    }

    /// `L_n`, zero when no B occurs.
    pub fn longest(&self) -> u64 {
        self.run_lengths.iter().copied().max().unwrap_or(0)
    }

    /// `M_n`, absent when no B occurs.
    pub fn shortest(&self) -> Option<u64> {
        self.run_lengths.iter().copied().min()
    }

    /// `NL_n`, zero when no B occurs.
    pub fn longest_count(&self) -> u64 {
        let longest = self.longest();
        if longest == 0 {
            return 0;
        }
        self.exact_length(longest)
    }

    /// `NM_n`, absent when no B occurs.
    pub fn shortest_count(&self) -> Option<u64> {
        self.shortest().map(|m| self.exact_length(m))
    }
}

pub fn decompose(symbols: &[Symbol]) -> RunDecomposition {
    let mut runs = RunDecomposition::default();
    runs.refill(symbols);
    runs
}

/// Parses and decomposes a string over `{A, B, C, D}`.
pub fn decompose_str(text: &str) -> Result<RunDecomposition> {
    let seq: crate::Sequence = text.parse()?;
    Ok(decompose(&seq))
}

/// 1-based index of the trial that completes the `r`-th nonoverlapping run of
/// `k` B's, counting afresh after every completed run.
pub fn waiting_time(symbols: &[Symbol], k: u64, r: u64) -> Option<u64> {
    let mut current = 0u64;
    let mut completed = 0u64;
    for (pos, s) in symbols.iter().enumerate() {
        if s.is_b() {
            current += 1;
            if current == k {
                completed += 1;
                current = 0;
                if completed == r {
                    return Some(pos as u64 + 1);
                }
            }
        } else {
            current = 0;
        }
    }
    None
}

/// `W_r^k` for `r = 1..=r_max`; `None` where the run never completes.
pub fn waiting_times(symbols: &[Symbol], k: u64, r_max: u64) -> Result<Vec<Option<u64>>> {
    if k == 0 || r_max == 0 {
        return Err(Error::InvalidQuery("k and r_max must be at least 1".into()));
    }
    let mut times = vec![None; r_max as usize];
    let mut current = 0u64;
    let mut completed = 0usize;
    for (pos, s) in symbols.iter().enumerate() {
        if completed == times.len() {
            break;
        }
        if s.is_b() {
            current += 1;
            if current == k {
                times[completed] = Some(pos as u64 + 1);
                completed += 1;
                current = 0;
            }
        } else {
            current = 0;
        }
    }
    Ok(times)
}

/// Every run statistic of one sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunStatistics {
    pub n: u64,
    pub decomposition: RunDecomposition,
    pub k_max: u64,
    /// `N_n^k` for `k = 1..=k_max`.
    pub nonoverlapping: BTreeMap<u64, u64>,
    /// `E_n^k` for `k = 1..=k_max`.
    pub exact: BTreeMap<u64, u64>,
    pub longest: u64,
    pub shortest: Option<u64>,
    pub longest_count: u64,
    pub shortest_count: Option<u64>,
    /// `W_1^k` for `k = 1..=k_max`.
    pub first_waits: BTreeMap<u64, Option<u64>>,
}

/// Computes all statistics for `k = 1..=k_max`. Without `k_max` the range
/// stops at the longest run (at least 1).
pub fn statistics(symbols: &[Symbol], k_max: Option<u64>) -> Result<RunStatistics> {
    let decomposition = decompose(symbols);
    let longest = decomposition.longest();
    let k_max = match k_max {
        Some(0) => return Err(Error::InvalidQuery("k_max must be at least 1".into())),
        Some(k) => k,
        None => longest.max(1),
    };
    let ks = 1..=k_max;
    Ok(RunStatistics {
        n: symbols.len() as u64,
        k_max,
        nonoverlapping: ks.clone().map(|k| (k, decomposition.nonoverlapping(k))).collect(),
        exact: ks.clone().map(|k| (k, decomposition.exact_length(k))).collect(),
        longest,
        shortest: decomposition.shortest(),
        longest_count: decomposition.longest_count(),
        shortest_count: decomposition.shortest_count(),
        first_waits: ks.map(|k| (k, waiting_time(symbols, k, 1))).collect(),
        decomposition,
    })
}
