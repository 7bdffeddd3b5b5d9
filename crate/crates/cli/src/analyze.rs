//! `runlab analyze`: run statistics of FASTA records and their model tails.

use std::io::Write;

use rayon::prelude::*;
use runlab::oracles::{prob_longest_at_least, prob_nonoverlapping_at_least, prob_shortest_at_least};
use runlab::{statistics, StateProbabilities};

use crate::app::{open_input, write_json, AppResult, AnalyzeArgs, Format};
use crate::fasta::{parse_fasta, FastaRecord, Policy};
use crate::report::{
    probs_strings, AnalysisReport, CountTail, Counts, RecordReport, StatisticsReport, Tail,
    TailsReport, SCHEMA_VERSION,
};

/// Tail probabilities of the observed statistics, evaluated by the DP engine.
fn tails(stats: &runlab::RunStatistics, probs: &StateProbabilities) -> AppResult<TailsReport> {
    let n = stats.n;
    let nonoverlapping = stats
        .nonoverlapping
        .iter()
        .map(|(&k, &x)| {
            let p = prob_nonoverlapping_at_least(n, k, x, probs)?;
            Ok(CountTail {
                k,
                tail: Tail::new(x, &p),
            })
        })
        .collect::<AppResult<Vec<_>>>()?;
    Ok(TailsReport {
        engine: "dp",
        longest_at_least: Tail::new(stats.longest, &prob_longest_at_least(n, stats.longest, probs)),
        shortest_at_least: stats
            .shortest
            .map(|s| Tail::new(s, &prob_shortest_at_least(n, s, probs))),
        nonoverlapping_at_least: nonoverlapping,
    })
}

fn analyze_record(
    record: &FastaRecord,
    args: &AnalyzeArgs,
    supplied: Option<&StateProbabilities>,
) -> AppResult<RecordReport> {
    let symbols = record.sequence.symbols();
    let stats = statistics(symbols, args.k_max)?;
    let [a, b, c, d] = record.sequence.symbol_counts();
    let estimated = if symbols.is_empty() {
        None
    } else {
        Some(StateProbabilities::from_counts([a, b, c, d])?)
    };
    let model = supplied.or(estimated.as_ref());
    let tails = match (args.tails, model) {
        (true, Some(p)) => Some(tails(&stats, p)?),
        _ => None,
    };
    Ok(RecordReport {
        header: record.header.clone(),
        length: symbols.len() as u64,
        dropped: record.dropped,
        counts: Counts { a, b, c, d },
        estimated_probs: estimated.as_ref().map(probs_strings),
        model_probs: model.map(probs_strings),
        statistics: StatisticsReport::from(&stats),
        tails,
    })
}

pub fn build(args: &AnalyzeArgs) -> AppResult<AnalysisReport> {
    let supplied: Option<StateProbabilities> = args.probs.as_deref().map(str::parse).transpose()?;
    let records = parse_fasta(open_input(&args.input)?, args.map, args.policy)?;
    let reports = records
        .par_iter()
        .map(|r| analyze_record(r, args, supplied.as_ref()))
        .collect::<AppResult<Vec<_>>>()?;
    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        command: "analyze",
        input: args.input.display().to_string(),
        map: args.map.to_string(),
        policy: match args.policy {
            Policy::Strict => "strict",
            Policy::SkipAmbiguous => "skip-ambiguous",
        }
        .to_string(),
        records: reports,
    })
}

pub fn run(args: AnalyzeArgs, out: &mut dyn Write) -> AppResult<()> {
    let report = build(&args)?;
    match args.format {
        Format::Json => write_json(&report, out),
        Format::Csv => Ok(report.write_csv(out)?),
    }
}
