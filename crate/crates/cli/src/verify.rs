//! `runlab verify`: closed forms against the exhaustive and DP oracles.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use runlab::distributions::{theorem_distribution, Evaluation, RawVariant};
use runlab::oracles::{automaton_pmf, Caps, ExhaustiveCounts, Outcome};
use runlab::{format_rational, Distribution, Error, Rational, StatisticKind};

use crate::app::{write_json, AppResult, GridPoint, VerifyArgs, VerifyFormat};
use crate::report::{probs_strings, Counterexample, Support, VerifyReport, SCHEMA_VERSION};

/// Every statistic checked at `n` trials.
pub fn kinds(n: u64) -> Vec<StatisticKind> {
    let mut out = vec![
        StatisticKind::Longest,
        StatisticKind::Shortest,
        StatisticKind::JointLongest,
        StatisticKind::JointShortest,
    ];
    for k in 1..=n {
        out.push(StatisticKind::Nonoverlapping { k });
        out.push(StatisticKind::ExactLength { k });
        out.push(StatisticKind::WaitingFirst { k });
        for r in 2..=3 {
            if k * r <= n {
                out.push(StatisticKind::WaitingRth { k, r });
            }
        }
    }
    out
}

/// Nonzero masses keyed by outcome; truncated tail mass sits under `Censored`.
fn points(dist: &Distribution) -> BTreeMap<Outcome, Rational> {
    let mut map: BTreeMap<Outcome, Rational> = match dist {
        Distribution::Scalar(p) => p.iter().map(|(x, m)| (Outcome::Value(x), m.clone())).collect(),
        Distribution::Joint(j) => j.iter().map(|((a, b), m)| (Outcome::Pair(a, b), m.clone())).collect(),
    };
    map.insert(Outcome::Undefined, dist.undefined_mass().clone());
    map.insert(Outcome::Censored, dist.tail_mass());
    map.retain(|_, m| *m != Rational::from_integer(0.into()));
    map
}

fn first_difference(left: &Distribution, right: &Distribution) -> Option<(Outcome, Rational, Rational)> {
    let (l, r) = (points(left), points(right));
    let zero = || Rational::from_integer(0.into());
    let support: BTreeSet<Outcome> = l.keys().chain(r.keys()).copied().collect();
    support.into_iter().find_map(|o| {
        let a = l.get(&o).cloned().unwrap_or_else(zero);
        let b = r.get(&o).cloned().unwrap_or_else(zero);
        (a != b).then_some((o, a, b))
    })
}

fn closed_form(kind: &StatisticKind, n: u64, grid: GridPoint, typo: bool) -> runlab::Result<Distribution> {
    let evaluation = match kind {
        StatisticKind::ExactLength { .. } if typo => {
            Evaluation::Raw(RawVariant::PrintedExactLengthFactor)
        }
        _ => Evaluation::Grouped,
    };
    theorem_distribution(kind, n, &grid.probs(), evaluation)
}

pub struct Outcomes {
    pub comparisons: u64,
    /// Typo-mode evaluations with no value (P_b or P_d is 0).
    pub skipped: u64,
    pub counterexample: Option<Counterexample>,
}

/// Checks `n = 1..=n_max` in increasing order and stops at the first mismatch.
pub fn check(args: &VerifyArgs) -> AppResult<Outcomes> {
    let caps = Caps::from_env()?;
    let mut comparisons = 0;
    let mut skipped = 0;
    for n in 1..=args.n_max {
        for kind in kinds(n) {
            let counts = ExhaustiveCounts::enumerate(&kind, n, caps.exhaustive)?;
            for &grid in &args.grid {
                let probs = grid.probs();
                let theorem = match closed_form(&kind, n, grid, args.inject_typo) {
                    // The printed factor divides by P_d; it has no value when P_b or P_d is 0.
                    Err(Error::Unsupported(_)) if args.inject_typo => {
                        skipped += 1;
                        continue;
                    }
                    other => other?,
                };
                let oracles = [
                    ("exhaustive", counts.weigh(&probs)?),
                    ("dp", automaton_pmf(n, &probs, &kind, caps.dp)?),
                ];
                for (name, oracle) in oracles {
                    comparisons += 1;
                    if let Some((at, left, right)) = first_difference(&theorem, &oracle) {
                        let counterexample = Counterexample {
                            statistic: kind.to_string(),
                            n,
                            probs: probs_strings(&probs),
                            grid: grid.name().to_string(),
                            engines: ["theorem".to_string(), name.to_string()],
                            support: Support::from(at).label(),
                            left: format_rational(&left),
                            right: format_rational(&right),
                        };
                        return Ok(Outcomes {
                            comparisons,
                            skipped,
                            counterexample: Some(counterexample),
                        });
                    }
                }
            }
        }
    }
    Ok(Outcomes {
        comparisons,
        skipped,
        counterexample: None,
    })
}

/// Exit code 0 when every comparison agrees, 1 otherwise.
pub fn run(args: VerifyArgs, out: &mut dyn Write) -> AppResult<i32> {
    let result = check(&args)?;
    let passed = result.counterexample.is_none();
    match args.format {
        VerifyFormat::Json => write_json(
            &VerifyReport {
                schema_version: SCHEMA_VERSION,
                command: "verify",
                n_max: args.n_max,
                grid: args.grid.iter().map(|g| g.name().to_string()).collect(),
                inject_typo: args.inject_typo,
                comparisons: result.comparisons,
                skipped: result.skipped,
                passed,
                counterexample: result.counterexample,
            },
            out,
        )?,
        VerifyFormat::Text => match &result.counterexample {
            None => {
                write!(
                    out,
                    "PASS: {} comparisons, n <= {}, grid {}",
                    result.comparisons,
                    args.n_max,
                    args.grid.iter().map(|g| g.name()).collect::<Vec<_>>().join(",")
                )?;
                if result.skipped > 0 {
                    write!(out, " ({} undefined typo evaluations skipped)", result.skipped)?;
                }
                writeln!(out)?
            }
            Some(c) => writeln!(
                out,
                "FAIL: {} at n = {}, probs {} ({}): {} gives {} but {} gives {} at support {}",
                c.statistic,
                c.n,
                c.probs.join(","),
                c.grid,
                c.engines[0],
                c.left,
                c.engines[1],
                c.right,
                c.support
            )?,
        },
    }
    Ok(if passed { 0 } else { 1 })
}
