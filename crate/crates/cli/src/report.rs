//! Serializable report shapes and their JSON / CSV renderings.
//!
//! Every JSON document carries `schema_version`; the shapes are described by
//! `schema/report.schema.json`. Rationals are always `"numerator/denominator"`
//! in lowest terms, decimals have 15 significant digits rounded half-to-even.

use std::collections::BTreeMap;
use std::io::Write;

use runlab::oracles::{MonteCarloTable, Outcome};
use runlab::probability::to_decimal;
use runlab::{format_rational, Distribution, Rational, StateProbabilities};
use serde::Serialize;

pub const SCHEMA_VERSION: &str = "1";
pub const DECIMAL_DIGITS: usize = 15;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Mass {
    pub rational: String,
    pub decimal: String,
}

impl Mass {
    pub fn new(value: &Rational) -> Mass {
        Mass {
            rational: format_rational(value),
            decimal: to_decimal(value, DECIMAL_DIGITS),
        }
    }
}

pub fn probs_strings(p: &StateProbabilities) -> [String; 4] {
    p.as_array().each_ref().map(format_rational)
}

/// A support point: a value, a (length, count) pair, or a named event.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum Support {
    Value(u64),
    Pair([u64; 2]),
    Event(String),
}

impl Support {
    pub fn label(&self) -> String {
        match self {
            Support::Value(x) => x.to_string(),
            Support::Pair([a, b]) => format!("{a}:{b}"),
            Support::Event(name) => name.clone(),
        }
    }
}

impl From<Outcome> for Support {
    fn from(o: Outcome) -> Support {
        match o {
            Outcome::Value(x) => Support::Value(x),
            Outcome::Pair(a, b) => Support::Pair([a, b]),
            Outcome::Undefined => Support::Event("undefined".into()),
            Outcome::Censored => Support::Event("censored".into()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PmfRow {
    pub support: Support,
    pub mass: String,
    pub decimal: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PmfReport {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub statistic: String,
    /// Trial count, or the truncation horizon for waiting times.
    pub n: u64,
    pub k: Option<u64>,
    pub r: Option<u64>,
    pub probs: [String; 4],
    pub engine: String,
    pub coverage: &'static str,
    pub rows: Vec<PmfRow>,
    pub total_mass: Mass,
    pub tail_mass: Mass,
    pub undefined_mass: Mass,
}

impl PmfReport {
    pub fn new(
        statistic: &runlab::StatisticKind,
        n: u64,
        probs: &StateProbabilities,
        engine: &str,
        dist: &Distribution,
    ) -> PmfReport {
        let row = |support, m: &Rational| PmfRow {
            support,
            mass: format_rational(m),
            decimal: to_decimal(m, DECIMAL_DIGITS),
        };
        let rows = match dist {
            Distribution::Scalar(p) => p.iter().map(|(x, m)| row(Support::Value(x), m)).collect(),
            Distribution::Joint(j) => j
                .iter()
                .map(|((a, b), m)| row(Support::Pair([a, b]), m))
                .collect(),
        };
        let truncated = matches!(
            dist.as_scalar().map(|p| p.coverage()),
            Some(runlab::Coverage::Truncated { .. })
        );
        PmfReport {
            schema_version: SCHEMA_VERSION,
            command: "pmf",
            statistic: statistic.name().to_string(),
            n,
            k: statistic.k(),
            r: statistic.r(),
            probs: probs_strings(probs),
            engine: engine.to_string(),
            coverage: if truncated { "truncated" } else { "complete" },
            rows,
            total_mass: Mass::new(&dist.total_mass()),
            tail_mass: Mass::new(&dist.tail_mass()),
            undefined_mass: Mass::new(dist.undefined_mass()),
        }
    }

    /// `support,mass_rational,mass_decimal`, then `total`, plus `tail` for
    /// truncated tables and `undefined` when the statistic can be undefined.
    pub fn write_csv(&self, out: &mut dyn Write, undefined_row: bool) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["support", "mass_rational", "mass_decimal"])?;
        for r in &self.rows {
            w.write_record([r.support.label().as_str(), &r.mass, &r.decimal])?;
        }
        w.write_record(["total", &self.total_mass.rational, &self.total_mass.decimal])?;
        if self.coverage == "truncated" {
            w.write_record(["tail", &self.tail_mass.rational, &self.tail_mass.decimal])?;
        }
        if undefined_row {
            w.write_record([
                "undefined",
                &self.undefined_mass.rational,
                &self.undefined_mass.decimal,
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Counts {
    #[serde(rename = "A")]
    pub a: u64,
    #[serde(rename = "B")]
    pub b: u64,
    #[serde(rename = "C")]
    pub c: u64,
    #[serde(rename = "D")]
    pub d: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StatisticsReport {
    pub run_lengths: Vec<u64>,
    pub trailing: bool,
    pub k_max: u64,
    pub nonoverlapping: BTreeMap<u64, u64>,
    pub exact: BTreeMap<u64, u64>,
    pub longest: u64,
    pub shortest: Option<u64>,
    pub longest_count: u64,
    pub shortest_count: Option<u64>,
    pub first_waits: BTreeMap<u64, Option<u64>>,
}

impl From<&runlab::RunStatistics> for StatisticsReport {
    fn from(s: &runlab::RunStatistics) -> Self {
        StatisticsReport {
            run_lengths: s.decomposition.run_lengths().to_vec(),
            trailing: s.decomposition.trailing(),
            k_max: s.k_max,
            nonoverlapping: s.nonoverlapping.clone(),
            exact: s.exact.clone(),
            longest: s.longest,
            shortest: s.shortest,
            longest_count: s.longest_count,
            shortest_count: s.shortest_count,
            first_waits: s.first_waits.clone(),
        }
    }
}

/// `P(statistic >= observed)` under the model.
#[derive(Clone, Debug, Serialize)]
pub struct Tail {
    pub observed: u64,
    pub mass: String,
    pub decimal: String,
}

impl Tail {
    pub fn new(observed: u64, value: &Rational) -> Tail {
        let m = Mass::new(value);
        Tail {
            observed,
            mass: m.rational,
            decimal: m.decimal,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CountTail {
    pub k: u64,
    #[serde(flatten)]
    pub tail: Tail,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailsReport {
    pub engine: &'static str,
    pub longest_at_least: Tail,
    pub shortest_at_least: Option<Tail>,
    pub nonoverlapping_at_least: Vec<CountTail>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecordReport {
    pub header: String,
    pub length: u64,
    pub dropped: u64,
    pub counts: Counts,
    /// Symbol frequencies `count / length`; absent for empty records.
    pub estimated_probs: Option<[String; 4]>,
    /// Probabilities used for the tails.
    pub model_probs: Option<[String; 4]>,
    pub statistics: StatisticsReport,
    pub tails: Option<TailsReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub input: String,
    pub map: String,
    pub policy: String,
    pub records: Vec<RecordReport>,
}

fn join_map<V: ToString>(m: &BTreeMap<u64, V>) -> String {
    m.iter()
        .map(|(k, v)| format!("{k}={}", v.to_string()))
        .collect::<Vec<_>>()
        .join(";")
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

impl AnalysisReport {
    /// One row per record; per-k maps are written as `k=value` lists joined
    /// by `;`, absent values as empty cells.
    pub fn write_csv(&self, out: &mut dyn Write) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "header",
            "length",
            "dropped",
            "p_a",
            "p_b",
            "p_c",
            "p_d",
            "longest",
            "shortest",
            "longest_count",
            "shortest_count",
            "nonoverlapping",
            "exact",
            "tail_longest",
            "tail_shortest",
            "tail_nonoverlapping",
        ])?;
        for r in &self.records {
            let s = &r.statistics;
            let probs = r.model_probs.clone().unwrap_or_default();
            let (tl, ts, tn) = match &r.tails {
                Some(t) => (
                    t.longest_at_least.mass.clone(),
                    t.shortest_at_least.as_ref().map(|x| x.mass.clone()).unwrap_or_default(),
                    t.nonoverlapping_at_least
                        .iter()
                        .map(|c| format!("{}={}", c.k, c.tail.mass))
                        .collect::<Vec<_>>()
                        .join(";"),
                ),
                None => Default::default(),
            };
            w.write_record([
                r.header.clone(),
                r.length.to_string(),
                r.dropped.to_string(),
                probs[0].clone(),
                probs[1].clone(),
                probs[2].clone(),
                probs[3].clone(),
                s.longest.to_string(),
                opt(&s.shortest),
                s.longest_count.to_string(),
                opt(&s.shortest_count),
                join_map(&s.nonoverlapping),
                join_map(&s.exact),
                tl,
                ts,
                tn,
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationRow {
    pub outcome: Support,
    pub count: u64,
    pub frequency: f64,
    pub radius: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationReport {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub statistic: String,
    pub n: u64,
    pub k: Option<u64>,
    pub r: Option<u64>,
    pub probs: [String; 4],
    pub samples: u64,
    pub seed: u64,
    pub confidence: f64,
    pub rows: Vec<SimulationRow>,
}

impl SimulationReport {
    pub fn new(table: &MonteCarloTable, probs: &StateProbabilities) -> SimulationReport {
        SimulationReport {
            schema_version: SCHEMA_VERSION,
            command: "simulate",
            statistic: table.kind.name().to_string(),
            n: table.n,
            k: table.kind.k(),
            r: table.kind.r(),
            probs: probs_strings(probs),
            samples: table.samples,
            seed: table.seed,
            confidence: 0.99,
            rows: table
                .rows
                .iter()
                .map(|r| SimulationRow {
                    outcome: r.outcome.into(),
                    count: r.count,
                    frequency: r.frequency,
                    radius: r.radius,
                })
                .collect(),
        }
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["outcome", "count", "frequency", "radius"])?;
        for r in &self.rows {
            w.write_record([
                r.outcome.label(),
                r.count.to_string(),
                r.frequency.to_string(),
                r.radius.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub statistic: String,
    pub n: u64,
    pub probs: [String; 4],
    pub grid: String,
    pub engines: [String; 2],
    pub support: String,
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub n_max: u64,
    pub grid: Vec<String>,
    pub inject_typo: bool,
    pub comparisons: u64,
    pub skipped: u64,
    pub passed: bool,
    pub counterexample: Option<Counterexample>,
}
