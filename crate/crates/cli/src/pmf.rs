//! `runlab pmf`: one exact distribution table.

use std::io::Write;

use runlab::oracles::Caps;
use runlab::{default_engine, evaluate, Engine, StateProbabilities, StatisticKind};

use crate::app::{stat_kind, write_json, AppError, AppResult, Format, PmfArgs};
use crate::report::PmfReport;

/// Trial count for fixed-horizon statistics, horizon for waiting times.
fn horizon(kind: &StatisticKind, args: &PmfArgs) -> AppResult<u64> {
    let (wanted, other, flag) = if kind.is_waiting() {
        (args.n_max, args.n, "--n-max")
    } else {
        (args.n, args.n_max, "--n")
    };
    if other.is_some() {
        let unused = if kind.is_waiting() { "--n" } else { "--n-max" };
        return Err(AppError::Usage(format!("{unused} does not apply to {}", kind.name())));
    }
    wanted.ok_or_else(|| AppError::Usage(format!("{flag} is required for {}", kind.name())))
}

pub fn build(args: &PmfArgs) -> AppResult<PmfReport> {
    let kind = stat_kind(args.stat, args.k, args.r)?;
    let n = horizon(&kind, args)?;
    let probs: StateProbabilities = args.probs.parse()?;
    let engine = match (args.raw_sums, args.engine) {
        (true, _) => Engine::RawSums,
        (false, Some(e)) => e.into(),
        (false, None) => default_engine(&kind, n),
    };
    let caps = Caps::from_env()?;
    let dist = evaluate(engine, &kind, n, &probs, &caps)?;
    Ok(PmfReport::new(&kind, n, &probs, engine.name(), &dist))
}

pub fn run(args: PmfArgs, out: &mut dyn Write) -> AppResult<()> {
    let report = build(&args)?;
    match args.format {
        Format::Json => write_json(&report, out),
        Format::Csv => {
            let undefined = matches!(
                args.stat,
                crate::app::StatArg::Shortest | crate::app::StatArg::JointShortest
            );
            report.write_csv(out, undefined)?;
            Ok(())
        }
    }
}
