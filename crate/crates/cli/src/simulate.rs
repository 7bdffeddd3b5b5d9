//! `runlab simulate`: seeded sequences or an empirical PMF.

use std::io::Write;

use runlab::oracles::{monte_carlo_pmf, sample_sequences};
use runlab::StateProbabilities;

use crate::app::{stat_kind, write_json, AppError, AppResult, Format, SimulateArgs};
use crate::report::SimulationReport;

pub fn run(args: SimulateArgs, out: &mut dyn Write) -> AppResult<()> {
    let probs: StateProbabilities = args.probs.parse()?;
    let Some(stat) = args.stat else {
        if args.k.is_some() || args.r.is_some() {
            return Err(AppError::Usage("--k and --r need --stat".into()));
        }
        for seq in sample_sequences(args.n, &probs, args.samples, args.seed) {
            writeln!(out, "{seq}")?;
        }
        return Ok(());
    };
    let kind = stat_kind(stat, args.k, args.r)?;
    let table = monte_carlo_pmf(args.n, &probs, &kind, args.samples, args.seed)?;
    let report = SimulationReport::new(&table, &probs);
    match args.format {
        Format::Json => write_json(&report, out),
        Format::Csv => Ok(report.write_csv(out)?),
    }
}
