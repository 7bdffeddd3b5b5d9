//! Two-state fast path.
//!
//! Every statistic depends only on which trials are B, so the four-state model
//! collapses to successes with `p = P_b` and failures with `q = P_a+P_c+P_d`.
//! With `f` failures the `n - f` successes fill `f + 1` gaps, each gap being
//! one run (possibly empty), and every arrangement has weight `q^f p^(n-f)`.
//! The PMFs are then counts of compositions with constrained parts, taken over
//! integer weights `D p` and `D q` and divided by `D^n` once.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::pmf::ExactPmf;
use crate::probability::{Rational, StateProbabilities};
use crate::statistic::StatisticKind;

fn choose(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        BigInt::zero()
    } else {
        binomial(n as u64, k as u64).into()
    }
}

/// Compositions of `total` into `parts` nonnegative parts.
fn comp(total: i64, parts: i64) -> BigInt {
    if total < 0 || parts < 0 {
        return BigInt::zero();
    }
    if parts == 0 {
        return if total == 0 { BigInt::one() } else { BigInt::zero() };
    }
    choose(total + parts - 1, parts - 1)
}

/// Compositions into `parts` parts, each at most `max`.
fn bounded(total: i64, parts: i64, max: i64) -> BigInt {
    if total < 0 {
        return BigInt::zero();
    }
    if max == 0 {
        return if total == 0 { BigInt::one() } else { BigInt::zero() };
    }
    let mut sum = BigInt::zero();
    for j in 0..=parts {
        let rest = total - j * (max + 1);
        if rest < 0 {
            break;
        }
        let term = choose(parts, j) * comp(rest, parts);
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum
}

/// Compositions into `parts` parts, none equal to `k`.
fn avoiding(total: i64, parts: i64, k: i64) -> BigInt {
    let mut sum = BigInt::zero();
    for j in 0..=parts {
        let rest = total - j * k;
        if rest < 0 {
            break;
        }
        let term = choose(parts, j) * comp(rest, parts - j);
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum
}

/// Compositions into exactly `parts` parts, each at least `min`.
fn at_least(total: i64, parts: i64, min: i64) -> BigInt {
    comp(total - parts * min, parts)
}

struct TwoState {
    denom: BigUint,
    p_pow: Vec<BigInt>,
    q_pow: Vec<BigInt>,
}

impl TwoState {
    fn new(probs: &StateProbabilities, n: u64) -> TwoState {
        let (denom, w) = probs.integer_weights();
        let p: BigInt = w[1].clone().into();
        let q: BigInt = (&w[0] + &w[2] + &w[3]).into();
        let powers = |base: &BigInt| {
            let mut v = vec![BigInt::one()];
            for j in 1..=n as usize {
                let next = &v[j - 1] * base;
                v.push(next);
            }
            v
        };
        TwoState {
            denom,
            p_pow: powers(&p),
            q_pow: powers(&q),
        }
    }

    /// `sum_f count(f) q^f p^(n-f) / D^n`.
    fn mass(&self, n: u64, count: impl Fn(i64) -> BigInt) -> Rational {
        let mut numer = BigInt::zero();
        for f in 0..=n {
            let c = count(f as i64);
            if !c.is_zero() {
                numer += c * &self.q_pow[f as usize] * &self.p_pow[(n - f) as usize];
            }
        }
        Rational::new(numer, num_traits::pow(self.denom.clone(), n as usize).into())
    }
}

fn nonoverlapping_count(n: i64, k: i64, x: i64, f: i64) -> BigInt {
    let b = n - f;
    if b < k * x {
        return BigInt::zero();
    }
    comp(x, f + 1) * bounded(b - k * x, f + 1, k - 1)
}

/// Sum of nonoverlapping-count weights below `r` at length `m`.
fn below(ts: &TwoState, m: u64, k: u64, r: u64) -> Rational {
    let (m, k) = (m as i64, k as i64);
    ts.mass(m as u64, |f| {
        (0..r as i64).map(|x| nonoverlapping_count(m, k, x, f)).sum()
    })
}

/// PMF of a scalar statistic from the two-state reduction. Waiting times are
/// truncated at `n`. Equals the four-state evaluation exactly.
pub fn binary_collapse_pmf(
    kind: &StatisticKind,
    n: u64,
    probs: &StateProbabilities,
) -> Result<ExactPmf> {
    kind.validate(n)?;
    let ts = TwoState::new(probs, n);
    let ni = n as i64;
    match *kind {
        StatisticKind::Nonoverlapping { k } => {
            let masses = (0..=n / k).map(|x| {
                (x, ts.mass(n, |f| nonoverlapping_count(ni, k as i64, x as i64, f)))
            });
            ExactPmf::complete(masses, Rational::zero())
        }
        StatisticKind::ExactLength { k } => {
            let k = k as i64;
            let masses = (0..=(n + 1) / (k as u64 + 1)).map(|x| {
                let x = x as i64;
                let m = ts.mass(n, |f| {
                    choose(f + 1, x) * avoiding(ni - f - x * k, f + 1 - x, k)
                });
                (x as u64, m)
            });
            ExactPmf::complete(masses, Rational::zero())
        }
        StatisticKind::Longest => {
            let cdf: Vec<Rational> = (0..=ni)
                .map(|l| ts.mass(n, |f| bounded(ni - f, f + 1, l)))
                .collect();
            let masses = (0..=n as usize).map(|l| {
                let below = if l == 0 { Rational::zero() } else { cdf[l - 1].clone() };
                (l as u64, &cdf[l] - below)
            });
            ExactPmf::complete(masses, Rational::zero())
        }
        StatisticKind::Shortest => {
            // G(s): every run at least s, and at least one run.
            let g: Vec<Rational> = (1..=ni + 1)
                .map(|s| {
                    ts.mass(n, |f| {
                        (1..=f + 1)
                            .map(|j| choose(f + 1, j) * at_least(ni - f, j, s))
                            .sum()
                    })
                })
                .collect();
            let masses = (1..=n as usize).map(|s| (s as u64, &g[s - 1] - &g[s]));
            let undefined = num_traits::pow(probs.non_b(), n as usize);
            ExactPmf::complete(masses, undefined)
        }
        StatisticKind::WaitingFirst { k } | StatisticKind::WaitingRth { k, .. } => {
            let r = kind.r().expect("waiting time has r");
            // P(W = m) = P(N_(m-1) < r) - P(N_m < r).
            let mut prev = below(&ts, k * r - 1, k, r);
            let mut masses = Vec::new();
            for m in k * r..=n {
                let cur = below(&ts, m, k, r);
                masses.push((m, &prev - &cur));
                prev = cur;
            }
            ExactPmf::truncated(masses, n)
        }
        StatisticKind::JointLongest | StatisticKind::JointShortest => Err(Error::Unsupported(
            format!("the two-state fast path covers scalar statistics only, not {kind}"),
        )),
    }
}
