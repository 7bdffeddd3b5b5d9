//! Seeded simulation.
//!
//! Samples are drawn in fixed chunks of [`CHUNK`] sequences. Chunk `j` uses
//! ChaCha8 seeded with the caller's seed on stream `j`, so the output depends
//! only on `(seed, samples, query)` and never on the number of workers.
//! Symbols come from an inverse CDF over the integer weights `D P_x`, drawn
//! exactly when `D` fits in 64 bits.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::counting::RunDecomposition;
use crate::error::{Error, Result};
use crate::probability::StateProbabilities;
use crate::sequence::{Sequence, Symbol};
use crate::statistic::{outcome, Outcome, StatisticKind};

/// Sequences per independently seeded chunk.
pub const CHUNK: u64 = 1024;

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.5758293035489004;

enum Sampler {
    Exact { cumulative: [u64; 4], denom: u64 },
    Float { cumulative: [f64; 4] },
}

impl Sampler {
    fn new(probs: &StateProbabilities) -> Sampler {
        let (denom, weights) = probs.integer_weights();
        if let (Some(d), Some(w)) = (
            denom.to_u64(),
            weights.iter().map(|w| w.to_u64()).collect::<Option<Vec<u64>>>(),
        ) {
            let mut cumulative = [0u64; 4];
            let mut acc = 0u64;
            for (c, w) in cumulative.iter_mut().zip(w) {
                acc += w;
                *c = acc;
            }
            return Sampler::Exact { cumulative, denom: d };
        }
        let mut cumulative = [0f64; 4];
        let mut acc = 0f64;
        for (c, p) in cumulative.iter_mut().zip(probs.as_array()) {
            acc += p.to_f64().unwrap_or(0.0);
            *c = acc;
        }
        cumulative[3] = f64::INFINITY;
        Sampler::Float { cumulative }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Symbol {
        let index = match self {
            Sampler::Exact { cumulative, denom } => {
                let u = rng.gen_range(0..*denom);
                cumulative.iter().position(|&c| u < c).expect("u below D")
            }
            Sampler::Float { cumulative } => {
                let u: f64 = rng.gen();
                cumulative.iter().position(|&c| u < c).expect("last bound is infinite")
            }
        };
        Symbol::from_index(index).expect("index below 4")
    }

    fn fill(&self, rng: &mut ChaCha8Rng, buf: &mut [Symbol]) {
        for slot in buf {
            *slot = self.draw(rng);
        }
    }
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn chunk_sizes(samples: u64) -> impl ParallelIterator<Item = (u64, u64)> {
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(move |j| (j, CHUNK.min(samples - j * CHUNK)))
}

/// One row of an empirical table.
#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloRow {
    pub outcome: Outcome,
    pub count: u64,
    pub frequency: f64,
    /// Half-width of the 99% normal-approximation binomial interval.
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloTable {
    pub kind: StatisticKind,
    pub n: u64,
    pub samples: u64,
    pub seed: u64,
    pub rows: Vec<MonteCarloRow>,
}

impl MonteCarloTable {
    pub fn count(&self, outcome: Outcome) -> u64 {
        self.rows
            .iter()
            .find(|r| r.outcome == outcome)
            .map_or(0, |r| r.count)
    }

    pub fn frequency(&self, outcome: Outcome) -> f64 {
        self.count(outcome) as f64 / self.samples as f64
    }
}

/// Empirical distribution of `kind` over `samples` simulated sequences.
pub fn monte_carlo_pmf(
    n: u64,
    probs: &StateProbabilities,
    kind: &StatisticKind,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloTable> {
    kind.validate(n)?;
    if samples == 0 {
        return Err(Error::InvalidQuery("samples must be at least 1".into()));
    }
    let sampler = Sampler::new(probs);
    let partials: Vec<BTreeMap<Outcome, u64>> = chunk_sizes(samples)
        .map(|(j, size)| {
            let mut rng = chunk_rng(seed, j);
            let mut buf = vec![Symbol::A; n as usize];
            let mut runs = RunDecomposition::default();
            let mut counts = BTreeMap::new();
            for _ in 0..size {
                sampler.fill(&mut rng, &mut buf);
                runs.refill(&buf);
                *counts.entry(outcome(kind, &buf, &runs)).or_insert(0) += 1;
            }
            counts
        })
        .collect();
    let mut totals: BTreeMap<Outcome, u64> = BTreeMap::new();
    for part in partials {
        for (o, c) in part {
            *totals.entry(o).or_insert(0) += c;
        }
    }
    let rows = totals
        .into_iter()
        .map(|(outcome, count)| {
            let p = count as f64 / samples as f64;
            MonteCarloRow {
                outcome,
                count,
                frequency: p,
                radius: Z_99 * (p * (1.0 - p) / samples as f64).sqrt(),
            }
        })
        .collect();
    Ok(MonteCarloTable {
        kind: *kind,
        n,
        samples,
        seed,
        rows,
    })
}

/// `samples` sequences of length `n`, in a seed-determined order.
pub fn sample_sequences(
    n: u64,
    probs: &StateProbabilities,
    samples: u64,
    seed: u64,
) -> Vec<Sequence> {
    let sampler = Sampler::new(probs);
    let chunks: Vec<Vec<Sequence>> = chunk_sizes(samples)
        .map(|(j, size)| {
            let mut rng = chunk_rng(seed, j);
            (0..size)
                .map(|_| {
                    let mut buf = vec![Symbol::A; n as usize];
                    sampler.fill(&mut rng, &mut buf);
                    Sequence::new(buf)
                })
                .collect()
        })
        .collect();
    chunks.into_iter().flatten().collect()
}
