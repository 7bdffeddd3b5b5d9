//! Exact PMFs of the run statistics from their combinatorial sums.
//!
//! The production path enumerates grouped token counts and sums the
//! terminator split analytically. The raw path enumerates every
//! `(x_t, y_t, z_t)` variable, as in the closed forms, and is kept as a slow
//! cross-check for small `n`.
//!
//! Two printed details are not followed literally:
//! - the exact-length and joint-shortest formulas print the D factor as
//!   `(P_b/P_d)^z`; the derivation gives `P_d^z`, which is what is used (the
//!   literal form is available as [`RawVariant::PrintedExactLengthFactor`]);
//! - trailing-run and token-length ranges are the feasible ones, which keep
//!   the trailing run of the pinned length even where the printed bound
//!   `n - x(k+1)` would drop it.

mod collapse;
mod terms;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::combinatorics::{multinomial, split_weight, CompositionConstraint};
use crate::error::{Error, Result};
use crate::pmf::{Distribution, ExactPmf, JointPmf};
use crate::probability::{Rational, StateProbabilities};
use crate::statistic::{RunQuery, StatisticKind};

pub use collapse::binary_collapse_pmf;
use terms::Term;

/// Largest `n` accepted by the raw per-variable path.
pub const RAW_SUMS_CAP: u64 = 12;

/// Which transcription the raw path evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RawVariant {
    /// Factored weights `P_a^x P_b^(n-M) P_c^y P_d^z`.
    #[default]
    Corrected,
    /// Exact-length runs with the printed `P_b^n (P_a/P_b)^x (P_c/P_b)^y
    /// (P_b/P_d)^z`. Only meaningful as a mutation check; undefined when
    /// `P_b` or `P_d` is zero.
    PrintedExactLengthFactor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Evaluation {
    #[default]
    Grouped,
    Raw(RawVariant),
}

struct Powers {
    values: Vec<Rational>,
}

impl Powers {
    fn new(base: &Rational, max: u64) -> Powers {
        let mut values = Vec::with_capacity(max as usize + 1);
        values.push(Rational::one());
        for j in 1..=max as usize {
            values.push(&values[j - 1] * base);
        }
        Powers { values }
    }

    fn get(&self, e: u64) -> &Rational {
        &self.values[e as usize]
    }
}

fn constraint_for(term: &Term) -> Result<CompositionConstraint> {
    let c = CompositionConstraint::new(term.lengths.clone(), term.target)?;
    match term.pin {
        Some((t, v)) => c.with_pin(t, v),
        None => Ok(c),
    }
}

/// Grouped evaluation: multinomials are accumulated per terminator count `M`
/// and weighted by `(P_a+P_c+P_d)^M P_b^(n-M)` once at the end.
fn grouped_sum(terms: &[Term], n: u64, probs: &StateProbabilities) -> Result<Rational> {
    let mut by_terminators: BTreeMap<u64, BigUint> = BTreeMap::new();
    for term in terms {
        let c = constraint_for(term)?;
        for sol in c.grouped_solutions() {
            if let Some(t) = term.require {
                if sol.get(t) == 0 {
                    continue;
                }
            }
            let mut parts: Vec<u64> = sol.iter().map(|(_, m)| m).filter(|&m| m > 0).collect();
            parts.push(term.extra);
            *by_terminators.entry(sol.total_count()).or_default() += multinomial(&parts);
        }
    }
    let p_b = Powers::new(probs.p_b(), n);
    Ok(by_terminators
        .into_iter()
        .map(|(m, coeff)| {
            Rational::from_integer(coeff.into()) * split_weight(m, probs) * p_b.get(n - m)
        })
        .sum())
}

fn raw_sum(
    terms: &[Term],
    n: u64,
    probs: &StateProbabilities,
    printed_d_factor: bool,
) -> Result<Rational> {
    let (pa, pb, pc, pd) = (probs.p_a(), probs.p_b(), probs.p_c(), probs.p_d());
    if printed_d_factor && (pb.is_zero() || pd.is_zero()) {
        return Err(Error::Unsupported(
            "the printed (P_b/P_d) factor is undefined when P_b or P_d is zero".into(),
        ));
    }
    let powers = [pa, pb, pc, pd].map(|p| Powers::new(p, n));
    let mut total = Rational::zero();
    for term in terms {
        let c = constraint_for(term)?;
        for sol in c.raw_solutions() {
            if let Some(t) = term.require {
                if sol.group_total(t) == 0 {
                    continue;
                }
            }
            let mut parts: Vec<u64> = sol.parts().collect();
            parts.push(term.extra);
            let coeff = Rational::from_integer(multinomial(&parts).into());
            let [x, y, z] = sol.terminator_totals();
            let weight = if printed_d_factor {
                let ratio = |num: &Rational, den: &Rational, e: u64| {
                    num_traits::pow(num / den, e as usize)
                };
                powers[1].get(n) * ratio(pa, pb, x) * ratio(pc, pb, y) * ratio(pb, pd, z)
            } else {
                powers[0].get(x) * powers[1].get(n - x - y - z) * powers[2].get(y) * powers[3].get(z)
            };
            total += coeff * weight;
        }
    }
    Ok(total)
}

fn evaluate(
    terms: &[Term],
    n: u64,
    probs: &StateProbabilities,
    evaluation: Evaluation,
    printed_applies: bool,
) -> Result<Rational> {
    match evaluation {
        Evaluation::Grouped => grouped_sum(terms, n, probs),
        Evaluation::Raw(variant) => raw_sum(
            terms,
            n,
            probs,
            printed_applies && variant == RawVariant::PrintedExactLengthFactor,
        ),
    }
}

fn scalar_points<F>(support: Vec<u64>, mass_at: F) -> Result<Vec<(u64, Rational)>>
where
    F: Fn(u64) -> Result<Rational> + Sync,
{
    support
        .into_par_iter()
        .map(|x| mass_at(x).map(|m| (x, m)))
        .collect()
}

fn joint_points<F>(support: Vec<(u64, u64)>, mass_at: F) -> Result<Vec<((u64, u64), Rational)>>
where
    F: Fn(u64, u64) -> Result<Rational> + Sync,
{
    support
        .into_par_iter()
        .map(|(a, b)| mass_at(a, b).map(|m| ((a, b), m)))
        .collect()
}

/// Evaluates the closed-form sum for `kind`. For waiting times `n` is the
/// truncation horizon.
pub fn theorem_distribution(
    kind: &StatisticKind,
    n: u64,
    probs: &StateProbabilities,
    evaluation: Evaluation,
) -> Result<Distribution> {
    kind.validate(n)?;
    if matches!(evaluation, Evaluation::Raw(_)) && n > RAW_SUMS_CAP {
        return Err(Error::CapExceeded {
            engine: "raw-sums",
            n,
            cap: RAW_SUMS_CAP,
        });
    }
    let no_b = num_traits::pow(probs.non_b(), n as usize);
    // The printed factor does not conserve mass, so its tables skip the unit-total check.
    let printed = evaluation == Evaluation::Raw(RawVariant::PrintedExactLengthFactor);
    let eval = |terms: Vec<Term>, len: u64, d_factor: bool| {
        evaluate(&terms, len, probs, evaluation, d_factor)
    };

    let dist = match *kind {
        StatisticKind::Nonoverlapping { k } => {
            let masses = scalar_points((0..=n / k).collect(), |x| {
                eval(terms::nonoverlapping(n, k, x), n, false)
            })?;
            Distribution::Scalar(ExactPmf::complete(masses, Rational::zero())?)
        }
        StatisticKind::ExactLength { k } => {
            let masses = scalar_points((0..=(n + 1) / (k + 1)).collect(), |x| {
                eval(terms::exact_length(n, k, x), n, true)
            })?;
            Distribution::Scalar(if printed {
                ExactPmf::partial(masses)?
            } else {
                ExactPmf::complete(masses, Rational::zero())?
            })
        }
        StatisticKind::WaitingFirst { k } => {
            let masses = scalar_points((k..=n).collect(), |m| eval(terms::waiting(m, k, 1), m, false))?;
            Distribution::Scalar(ExactPmf::truncated(masses, n)?)
        }
        StatisticKind::WaitingRth { k, r } => {
            let masses = scalar_points((k * r..=n).collect(), |m| {
                eval(terms::waiting(m, k, r), m, false)
            })?;
            Distribution::Scalar(ExactPmf::truncated(masses, n)?)
        }
        StatisticKind::Longest => {
            let masses = scalar_points((0..=n).collect(), |l| eval(terms::longest(n, l), n, false))?;
            Distribution::Scalar(ExactPmf::complete(masses, Rational::zero())?)
        }
        StatisticKind::Shortest => {
            let masses = scalar_points((1..=n).collect(), |s| eval(terms::shortest(n, s), n, false))?;
            Distribution::Scalar(ExactPmf::complete(masses, no_b)?)
        }
        StatisticKind::JointLongest => {
            let support = (1..=n)
                .flat_map(|l| (1..=(n + 1) / (l + 1)).map(move |x| (l, x)))
                .collect();
            let mut masses = joint_points(support, |l, x| {
                eval(terms::joint_longest(n, l, x), n, false)
            })?;
            // No B at all: longest length 0, attained zero times.
            masses.push(((0, 0), eval(terms::longest(n, 0), n, false)?));
            Distribution::Joint(JointPmf::complete(masses, Rational::zero())?)
        }
        StatisticKind::JointShortest => {
            let support = (1..=n)
                .flat_map(|s| (1..=(n + 1) / (s + 1)).map(move |x| (s, x)))
                .collect();
            let masses = joint_points(support, |s, x| {
                eval(terms::joint_shortest(n, s, x), n, true)
            })?;
            Distribution::Joint(if printed {
                JointPmf::partial(masses, no_b)?
            } else {
                JointPmf::complete(masses, no_b)?
            })
        }
    };
    Ok(dist)
}

fn scalar(kind: StatisticKind, n: u64, probs: &StateProbabilities) -> Result<ExactPmf> {
    theorem_distribution(&kind, n, probs, Evaluation::Grouped)?.into_scalar()
}

fn joint(kind: StatisticKind, n: u64, probs: &StateProbabilities) -> Result<JointPmf> {
    theorem_distribution(&kind, n, probs, Evaluation::Grouped)?.into_joint()
}

/// Binomial distribution of order `k`: `N_n^k` on `0..=n/k`.
pub fn pmf_nonoverlapping_runs(q: &RunQuery) -> Result<ExactPmf> {
    scalar(StatisticKind::Nonoverlapping { k: q.k }, q.n, &q.probs)
}

/// `E_n^k` on `0..=(n+1)/(k+1)`.
pub fn pmf_exact_length_runs(q: &RunQuery) -> Result<ExactPmf> {
    scalar(StatisticKind::ExactLength { k: q.k }, q.n, &q.probs)
}

/// Geometric distribution of order `k`, truncated at `n_max`.
pub fn pmf_waiting_first(k: u64, n_max: u64, probs: &StateProbabilities) -> Result<ExactPmf> {
    scalar(StatisticKind::WaitingFirst { k }, n_max, probs)
}

/// Negative binomial distribution of order `k`, truncated at `n_max`.
pub fn pmf_waiting_rth(k: u64, r: u64, n_max: u64, probs: &StateProbabilities) -> Result<ExactPmf> {
    scalar(StatisticKind::WaitingRth { k, r }, n_max, probs)
}

/// `L_n` on `0..=n`.
pub fn pmf_longest_run(q: &RunQuery) -> Result<ExactPmf> {
    scalar(StatisticKind::Longest, q.n, &q.probs)
}

/// `(L_n, NL_n)`; the B-free outcome is the single pair `(0, 0)`.
pub fn joint_pmf_longest(q: &RunQuery) -> Result<JointPmf> {
    joint(StatisticKind::JointLongest, q.n, &q.probs)
}

/// `M_n` on `1..=n`, with the B-free mass `(P_a+P_c+P_d)^n` reported as
/// undefined.
pub fn pmf_shortest_run(q: &RunQuery) -> Result<ExactPmf> {
    scalar(StatisticKind::Shortest, q.n, &q.probs)
}

/// `(M_n, NM_n)` with the B-free mass reported as undefined.
pub fn joint_pmf_shortest(q: &RunQuery) -> Result<JointPmf> {
    joint(StatisticKind::JointShortest, q.n, &q.probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probability::rational;

    fn uniform(n: u64) -> RunQuery {
        RunQuery::new(n, StateProbabilities::uniform())
    }

    fn probs(s: &str) -> StateProbabilities {
        s.parse().unwrap()
    }

    fn table(pmf: &ExactPmf) -> Vec<(u64, Rational)> {
        pmf.iter().map(|(x, m)| (x, m.clone())).collect()
    }

    #[test]
    fn nonoverlapping_small_cases() {
        let skewed = probs("1/6,1/2,1/6,1/6");
        let pmf = pmf_nonoverlapping_runs(&RunQuery::new(2, skewed).with_k(2)).unwrap();
        assert_eq!(pmf.get(1), rational(1, 4));
        assert_eq!(pmf.get(0), rational(3, 4));

        let pmf = pmf_nonoverlapping_runs(&uniform(3).with_k(2)).unwrap();
        assert_eq!(table(&pmf), vec![(0, rational(57, 64)), (1, rational(7, 64))]);
    }

    #[test]
    fn rejects_invalid_queries() {
        assert!(matches!(
            pmf_nonoverlapping_runs(&uniform(2).with_k(3)),
            Err(Error::InvalidQuery(_))
        ));
        assert!(pmf_exact_length_runs(&uniform(2).with_k(0)).is_err());
        assert!(pmf_waiting_first(3, 2, &StateProbabilities::uniform()).is_err());
        assert!(pmf_waiting_rth(2, 2, 3, &StateProbabilities::uniform()).is_err());
        assert!(pmf_longest_run(&uniform(0)).is_err());
    }

    #[test]
    fn exact_length_single_trial() {
        let p = probs("1/6,1/2,1/6,1/6");
        let pmf = pmf_exact_length_runs(&RunQuery::new(1, p).with_k(1)).unwrap();
        assert_eq!(pmf.get(1), rational(1, 2));
        assert_eq!(pmf.get(0), rational(1, 2));
    }

    #[test]
    fn exact_length_three_uniform_trials() {
        // Exactly-two blocks among 64 strings: BBx (3), xBB (3).
        let pmf = pmf_exact_length_runs(&uniform(3).with_k(2)).unwrap();
        assert_eq!(pmf.get(1), rational(6, 64));
        assert_eq!(pmf.get(0), rational(58, 64));
    }

    #[test]
    fn waiting_first_small_cases() {
        let u = StateProbabilities::uniform();
        let pmf = pmf_waiting_first(2, 3, &u).unwrap();
        assert_eq!(table(&pmf), vec![(2, rational(1, 16)), (3, rational(3, 64))]);
        assert_eq!(pmf.total_mass(), rational(7, 64));

        let p = probs("1/6,1/3,1/3,1/6");
        let geo = pmf_waiting_first(1, 6, &p).unwrap();
        for n in 1..=6u64 {
            let expected = rational(1, 3) * num_traits::pow(rational(2, 3), n as usize - 1);
            assert_eq!(geo.get(n), expected);
        }
        assert_eq!(geo.tail_mass(), num_traits::pow(rational(2, 3), 6));
    }

    #[test]
    fn waiting_rth_reduces_to_first() {
        let p = probs("1/6,1/2,1/6,1/6");
        for k in 1..=3 {
            assert_eq!(
                pmf_waiting_rth(k, 1, 9, &p).unwrap(),
                pmf_waiting_first(k, 9, &p).unwrap()
            );
        }
        let pmf = pmf_waiting_rth(1, 2, 4, &p).unwrap();
        assert_eq!(pmf.get(2), rational(1, 4));
    }

    #[test]
    fn longest_small_cases() {
        let pmf = pmf_longest_run(&uniform(3)).unwrap();
        assert_eq!(
            table(&pmf),
            vec![
                (0, rational(27, 64)),
                (1, rational(30, 64)),
                (2, rational(6, 64)),
                (3, rational(1, 64))
            ]
        );
        let p = probs("1/6,1/2,1/6,1/6");
        let one = pmf_longest_run(&RunQuery::new(1, p)).unwrap();
        assert_eq!(table(&one), vec![(0, rational(1, 2)), (1, rational(1, 2))]);
    }

    #[test]
    fn joint_longest_small_cases() {
        let pmf = joint_pmf_longest(&uniform(3)).unwrap();
        assert_eq!(pmf.get(1, 2), rational(3, 64));
        assert_eq!(pmf.get(3, 1), rational(1, 64));
        assert_eq!(pmf.get(0, 0), rational(27, 64));
        assert_eq!(pmf.marginal().unwrap(), pmf_longest_run(&uniform(3)).unwrap());
    }

    #[test]
    fn shortest_small_cases() {
        let pmf = pmf_shortest_run(&uniform(3)).unwrap();
        assert_eq!(
            table(&pmf),
            vec![(1, rational(30, 64)), (2, rational(6, 64)), (3, rational(1, 64))]
        );
        assert_eq!(pmf.undefined_mass(), &rational(27, 64));

        let all_b = pmf_shortest_run(&RunQuery::new(2, probs("0,1,0,0"))).unwrap();
        assert_eq!(table(&all_b), vec![(2, rational(1, 1))]);
        assert!(all_b.undefined_mass().is_zero());
    }

    #[test]
    fn joint_shortest_small_cases() {
        let pmf = joint_pmf_shortest(&uniform(3)).unwrap();
        assert_eq!(pmf.get(2, 1), rational(6, 64));
        assert_eq!(pmf.get(1, 2), rational(3, 64));
        assert_eq!(pmf.marginal().unwrap(), pmf_shortest_run(&uniform(3)).unwrap());
    }

    #[test]
    fn raw_sums_agree_with_grouped_sums() {
        let grid = ["1/4,1/4,1/4,1/4", "1/6,1/2,1/6,1/6", "1/2,1/2,0,0", "0,1,0,0", "1/5,0,2/5,2/5"];
        for p in grid.map(probs) {
            for n in 1..=6u64 {
                let mut kinds = vec![
                    StatisticKind::Longest,
                    StatisticKind::Shortest,
                    StatisticKind::JointLongest,
                    StatisticKind::JointShortest,
                ];
                for k in 1..=n {
                    kinds.push(StatisticKind::Nonoverlapping { k });
                    kinds.push(StatisticKind::ExactLength { k });
                    kinds.push(StatisticKind::WaitingFirst { k });
                    if 2 * k <= n {
                        kinds.push(StatisticKind::WaitingRth { k, r: 2 });
                    }
                }
                for kind in kinds {
                    let grouped = theorem_distribution(&kind, n, &p, Evaluation::Grouped).unwrap();
                    let raw = theorem_distribution(&kind, n, &p, Evaluation::Raw(RawVariant::Corrected))
                        .unwrap();
                    assert_eq!(grouped, raw, "{kind} n={n} probs={p}");
                }
            }
        }
    }

    #[test]
    fn raw_path_is_capped() {
        let err = theorem_distribution(
            &StatisticKind::Longest,
            RAW_SUMS_CAP + 1,
            &StateProbabilities::uniform(),
            Evaluation::Raw(RawVariant::Corrected),
        )
        .unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }

    #[test]
    fn printed_d_factor_is_wrong_off_uniform() {
        let skewed = probs("1/6,1/2,1/6,1/6");
        let kind = StatisticKind::ExactLength { k: 1 };
        let printed = theorem_distribution(
            &kind,
            3,
            &skewed,
            Evaluation::Raw(RawVariant::PrintedExactLengthFactor),
        );
        let corrected = theorem_distribution(&kind, 3, &skewed, Evaluation::Grouped).unwrap();
        // Either the printed table fails normalization or it differs.
        assert!(printed.map_or(true, |d| d != corrected));
    }
}
