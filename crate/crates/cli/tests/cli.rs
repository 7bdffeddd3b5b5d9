use std::io::Write;
use std::process::{Command, Output, Stdio};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use serde_json::Value;

fn runlab(args: &[&str]) -> Output {
    runlab_with(args, &[], None)
}

fn runlab_with(args: &[&str], env: &[(&str, &str)], stdin: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_runlab"));
    cmd.args(args)
        .env_remove("RUNLAB_CAP_N")
        .envs(env.iter().copied())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    let mut child = cmd.spawn().expect("runlab starts");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn schema() -> &'static jsonschema::Validator {
    static VALIDATOR: OnceLock<jsonschema::Validator> = OnceLock::new();
    VALIDATOR.get_or_init(|| {
        let text = include_str!("../schema/report.schema.json");
        jsonschema::validator_for(&serde_json::from_str(text).unwrap()).unwrap()
    })
}

/// Parses a JSON report and checks it against the shipped schema.
fn json(out: &Output) -> Value {
    let doc: Value = serde_json::from_str(&stdout(out)).unwrap();
    let errors: Vec<String> = schema().iter_errors(&doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}");
    doc
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    csv_reader(text)
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::Reader::from_reader(text.as_bytes())
}

fn fasta_file(content: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".fa").tempfile().unwrap();
    f.write_all(content.as_bytes()).unwrap();
    f
}

const EXAMPLE: &str = "DAAABBBBBCAABBBCCADBBBBCCDABBBBBBCACCDBB";

#[test]
fn longest_run_table_at_three_trials() {
    let out = runlab(&["pmf", "--stat", "longest", "--n", "3", "--probs", "1/4,1/4,1/4,1/4"]);
    let doc = json(&out);
    let rows: Vec<(u64, &str)> = doc["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["support"].as_u64().unwrap(), r["mass"].as_str().unwrap()))
        .collect();
    // 30/64 and 6/64 in lowest terms.
    assert_eq!(rows, vec![(0, "27/64"), (1, "15/32"), (2, "3/32"), (3, "1/64")]);
    assert_eq!(doc["total_mass"]["rational"], "1/1");
    assert_eq!(doc["engine"], "theorem");
    assert_eq!(doc["coverage"], "complete");
}

#[test]
fn csv_layout_and_decimals() {
    let out = runlab(&["pmf", "--stat", "longest", "--n", "3", "--format", "csv"]);
    let text = stdout(&out);
    let mut reader = csv_reader(&text);
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["support", "mass_rational", "mass_decimal"]
    );
    let rows = csv_rows(&text);
    assert_eq!(rows[0], ["0", "27/64", "0.421875000000000"]);
    assert_eq!(rows.last().unwrap(), &["total", "1/1", "1.00000000000000"]);
}

#[test]
fn geometric_waiting_time_with_tail() {
    let out = runlab(&[
        "pmf", "--stat", "waiting-first", "--k", "1", "--n-max", "4", "--probs", "1/2,1/2,0,0",
        "--format", "csv",
    ]);
    let rows = csv_rows(&stdout(&out));
    let masses: Vec<(&str, &str)> = rows.iter().map(|r| (r[0].as_str(), r[1].as_str())).collect();
    assert_eq!(
        masses,
        [
            ("1", "1/2"),
            ("2", "1/4"),
            ("3", "1/8"),
            ("4", "1/16"),
            ("total", "15/16"),
            ("tail", "1/16")
        ]
    );
    let doc = json(&runlab(&[
        "pmf", "--stat", "waiting-first", "--k", "1", "--n-max", "4", "--probs", "1/2,1/2,0,0",
    ]));
    assert_eq!(doc["coverage"], "truncated");
    assert_eq!(doc["tail_mass"]["rational"], "1/16");
}

#[test]
fn engines_agree_byte_for_byte() {
    let queries: [&[&str]; 5] = [
        &["--stat", "exact", "--n", "7", "--k", "2"],
        &["--stat", "shortest", "--n", "6"],
        &["--stat", "joint-longest", "--n", "6"],
        &["--stat", "waiting-rth", "--k", "2", "--r", "2", "--n-max", "9"],
        &["--stat", "nonoverlapping", "--n", "8", "--k", "3"],
    ];
    for query in queries {
        let mass_column = |engine: &str| {
            let mut args = vec!["pmf", "--probs", "1/6,1/2,1/6,1/6", "--format", "csv", "--engine", engine];
            args.extend_from_slice(query);
            let text = stdout(&runlab(&args));
            csv_rows(&text).into_iter().map(|r| r[1].clone()).collect::<Vec<_>>()
        };
        let theorem = mass_column("theorem");
        assert_eq!(theorem, mass_column("dp"), "{query:?}");
        assert_eq!(theorem, mass_column("exhaustive"), "{query:?}");
    }
    let raw = stdout(&runlab(&["pmf", "--stat", "exact", "--n", "7", "--k", "2", "--raw-sums", "--format", "csv"]));
    let grouped = stdout(&runlab(&["pmf", "--stat", "exact", "--n", "7", "--k", "2", "--format", "csv"]));
    assert_eq!(raw, grouped);
}

#[test]
fn shortest_csv_reports_undefined_mass() {
    let text = stdout(&runlab(&["pmf", "--stat", "shortest", "--n", "3", "--format", "csv"]));
    let rows = csv_rows(&text);
    assert_eq!(rows.last().unwrap()[..2], ["undefined", "27/64"]);
}

#[test]
fn default_engine_switches_to_collapse() {
    let doc = json(&runlab(&["pmf", "--stat", "longest", "--n", "40"]));
    assert_eq!(doc["engine"], "collapse");
    let doc = json(&runlab(&["pmf", "--stat", "joint-shortest", "--n", "30"]));
    assert_eq!(doc["engine"], "theorem");
}

#[test]
fn analyze_reproduces_the_forty_trial_example() {
    let file = fasta_file(&format!(">example\n{}\n{}\n", &EXAMPLE[..25], &EXAMPLE[25..]));
    let out = runlab(&[
        "analyze", "--input", file.path().to_str().unwrap(), "--map", "states", "--tails",
    ]);
    let doc = json(&out);
    let rec = &doc["records"][0];
    let stats = &rec["statistics"];
    assert_eq!(rec["length"], 40);
    assert_eq!(stats["nonoverlapping"]["2"], 9);
    assert_eq!(stats["nonoverlapping"]["3"], 5);
    assert_eq!(stats["longest"], 6);
    assert_eq!(stats["shortest"], 2);
    for k in 2..=6 {
        assert_eq!(stats["exact"][k.to_string()], 1);
    }
    assert_eq!(stats["longest_count"], 1);
    assert_eq!(stats["shortest_count"], 1);
    assert_eq!(rec["estimated_probs"], serde_json::json!(["1/5", "1/2", "1/5", "1/10"]));
    let tails = &rec["tails"];
    assert_eq!(tails["engine"], "dp");
    assert_eq!(tails["longest_at_least"]["observed"], 6);
    assert_eq!(tails["nonoverlapping_at_least"][1]["k"], 2);
    assert_eq!(tails["nonoverlapping_at_least"][1]["observed"], 9);
}

#[test]
fn analyze_tail_matches_pmf_upper_tail() {
    // P(L_40 >= 6) from analyze equals the sum of the pmf rows 6..=40.
    let file = fasta_file(&format!(">x\n{EXAMPLE}\n"));
    let doc = json(&runlab(&[
        "analyze", "--input", file.path().to_str().unwrap(), "--map", "states", "--tails",
        "--probs", "1/4,1/4,1/4,1/4",
    ]));
    let tail = doc["records"][0]["tails"]["longest_at_least"]["mass"].as_str().unwrap().to_string();
    let pmf = json(&runlab(&["pmf", "--stat", "longest", "--n", "40", "--engine", "dp"]));
    let rows = pmf["rows"].as_array().unwrap();
    let lower: Vec<&str> = rows
        .iter()
        .filter(|r| r["support"].as_u64().unwrap() < 6)
        .map(|r| r["mass"].as_str().unwrap())
        .collect();
    // Compare through the CLI itself: 1 - sum of rows below 6.
    let parse = |s: &str| {
        let (a, b) = s.split_once('/').unwrap();
        (a.parse::<u128>().unwrap(), b.parse::<u128>().unwrap())
    };
    let (mut num, den) = (0u128, 1u128 << 80);
    for m in lower {
        let (a, b) = parse(m);
        num += a * (den / b);
    }
    let (ta, tb) = parse(&tail);
    assert_eq!(ta * (den / tb), den - num);
}

#[test]
fn all_g_record_has_no_runs() {
    let file = fasta_file(">g\nGGGGGGGG\nGGGG\n");
    let doc = json(&runlab(&["analyze", "--input", file.path().to_str().unwrap(), "--tails"]));
    let rec = &doc["records"][0];
    assert_eq!(rec["counts"], serde_json::json!({"A": 0, "B": 0, "C": 12, "D": 0}));
    assert_eq!(rec["estimated_probs"], serde_json::json!(["0/1", "0/1", "1/1", "0/1"]));
    assert_eq!(rec["statistics"]["longest"], 0);
    assert_eq!(rec["statistics"]["shortest"], Value::Null);
    assert_eq!(rec["tails"]["shortest_at_least"], Value::Null);
    assert_eq!(rec["tails"]["longest_at_least"]["mass"], "1/1");
}

#[test]
fn estimates_are_exact_frequency_ratios() {
    let out = runlab(&["simulate", "--n", "1000", "--samples", "1", "--seed", "11"]);
    let seq = stdout(&out).trim().to_string();
    assert_eq!(seq.len(), 1000);
    // Write the states back as nucleotides under the default map.
    let dna: String = seq
        .chars()
        .map(|c| match c {
            'A' => 'A',
            'B' => 'C',
            'C' => 'G',
            _ => 'T',
        })
        .collect();
    let file = fasta_file(&format!(">synthetic\n{dna}\n"));
    let doc = json(&runlab(&["analyze", "--input", file.path().to_str().unwrap()]));
    let rec = &doc["records"][0];
    for (i, letter) in ["A", "B", "C", "D"].into_iter().enumerate() {
        let count = seq.chars().filter(|&c| c.to_string() == letter).count() as u64;
        assert_eq!(rec["counts"][letter], count);
        let expected = {
            let g = gcd(count, 1000);
            format!("{}/{}", count / g, 1000 / g)
        };
        assert_eq!(rec["estimated_probs"][i], expected.as_str());
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a.max(1) } else { gcd(b, a % b) }
}

#[test]
fn analyze_preserves_record_order_and_reads_stdin() {
    let mut text = String::new();
    for i in 0..40 {
        text.push_str(&format!(">r{i}\n{}\n", "C".repeat(i + 1)));
    }
    let out = runlab_with(&["analyze", "--input", "-"], &[], Some(&text));
    let doc = json(&out);
    let records = doc["records"].as_array().unwrap();
    assert_eq!(records.len(), 40);
    for (i, r) in records.iter().enumerate() {
        assert_eq!(r["header"], format!("r{i}"));
        assert_eq!(r["statistics"]["longest"], i as u64 + 1);
    }
}

#[test]
fn analyze_csv_has_one_row_per_record() {
    let file = fasta_file(">a\nACCA\n>b\nccgcc\n");
    let text = stdout(&runlab(&["analyze", "--input", file.path().to_str().unwrap(), "--format", "csv"]));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], "a");
    assert_eq!(rows[1][0], "b");
    assert_eq!(rows[1][7], "2");
}

#[test]
fn ambiguity_policy() {
    let file = fasta_file(">s\nACNGT\n");
    let path = file.path().to_str().unwrap();
    let strict = runlab(&["analyze", "--input", path]);
    assert_eq!(strict.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&strict.stderr).contains("invalid nucleotide"));
    let doc = json(&runlab(&["analyze", "--input", path, "--policy", "skip-ambiguous"]));
    assert_eq!(doc["records"][0]["dropped"], 1);
    assert_eq!(doc["records"][0]["length"], 4);
}

#[test]
fn simulate_certain_state() {
    let text = stdout(&runlab(&["simulate", "--probs", "0,1,0,0", "--n", "5", "--samples", "20"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 20);
    assert!(lines.iter().all(|l| *l == "BBBBB"));
}

#[test]
fn simulate_is_seed_deterministic() {
    let args = ["simulate", "--n", "30", "--samples", "3000", "--seed", "42"];
    let first = stdout(&runlab(&args));
    assert_eq!(first, stdout(&runlab(&args)));
    let other = stdout(&runlab(&["simulate", "--n", "30", "--samples", "3000", "--seed", "43"]));
    assert_ne!(first, other);
    let table = ["simulate", "--n", "12", "--samples", "5000", "--seed", "9", "--stat", "exact", "--k", "2"];
    assert_eq!(stdout(&runlab(&table)), stdout(&runlab(&table)));
}

#[test]
fn simulated_longest_run_within_three_sigma() {
    let samples = 100_000.0_f64;
    let doc = json(&runlab(&[
        "simulate", "--n", "3", "--stat", "longest", "--samples", "100000", "--seed", "2026",
    ]));
    let exact: [f64; 4] = [27.0 / 64.0, 30.0 / 64.0, 6.0 / 64.0, 1.0 / 64.0];
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let p = exact[row["outcome"].as_u64().unwrap() as usize];
        let sigma = (p * (1.0 - p) / samples).sqrt();
        let f = row["frequency"].as_f64().unwrap();
        assert!((f - p).abs() <= 3.0 * sigma, "{row}");
    }
}

#[test]
fn verify_passes_by_default() {
    let out = runlab(&["verify"]);
    let text = stdout(&out);
    assert!(text.starts_with("PASS"), "{text}");
    let doc = json(&runlab(&["verify", "--format", "json"]));
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["n_max"], 8);
    assert_eq!(doc["grid"], serde_json::json!(["uniform", "two-state", "skewed"]));
}

#[test]
fn verify_catches_the_printed_factor() {
    let out = runlab(&["verify", "--inject-typo"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("FAIL"), "{text}");
    let out = runlab(&["verify", "--inject-typo", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(schema().is_valid(&doc));
    let c = &doc["counterexample"];
    assert_eq!(c["statistic"], "exact(k=1)");
    assert!(c["n"].as_u64().unwrap() <= 2);
    assert_eq!(c["grid"], "skewed");
}

#[test]
fn verify_small_horizon_is_fast() {
    let start = Instant::now();
    let text = stdout(&runlab(&["verify", "--n-max", "3"]));
    assert!(start.elapsed() < Duration::from_secs(1));
    assert!(text.starts_with("PASS"));
}

#[test]
fn invalid_input_exits_two() {
    let cases: [&[&str]; 7] = [
        &["pmf", "--stat", "longest", "--n", "3", "--probs", "1/2,1/2,1/2,0"],
        &["pmf", "--stat", "longest", "--n", "3", "--probs", "0.25,0.25,0.25,0.25"],
        &["pmf", "--stat", "exact", "--n", "3"],
        &["pmf", "--stat", "nonoverlapping", "--n", "3", "--k", "0"],
        &["pmf", "--stat", "longest"],
        &["pmf", "--stat", "sideways", "--n", "3"],
        &["simulate", "--n", "3", "--probs", "1,0,0"],
    ];
    for args in cases {
        let out = runlab(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
    let out = runlab(&["analyze", "--input", "/nonexistent/input.fa"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn caps_exit_three_and_follow_the_environment() {
    let exhaustive = ["pmf", "--stat", "longest", "--n", "13", "--engine", "exhaustive"];
    assert_eq!(runlab(&exhaustive).status.code(), Some(3));
    let raised = runlab_with(&exhaustive, &[("RUNLAB_CAP_N", "13")], None);
    let doc = json(&raised);
    assert_eq!(doc["total_mass"]["rational"], "1/1");

    let lowered = runlab_with(&["verify", "--n-max", "5"], &[("RUNLAB_CAP_N", "4")], None);
    assert_eq!(lowered.status.code(), Some(3));

    let dp = ["pmf", "--stat", "longest", "--n", "30", "--engine", "dp"];
    assert_eq!(runlab_with(&dp, &[("RUNLAB_CAP_N", "12,20")], None).status.code(), Some(3));
    assert!(runlab_with(&dp, &[("RUNLAB_CAP_N", "12,30")], None).status.success());

    let raw = runlab(&["pmf", "--stat", "longest", "--n", "13", "--raw-sums"]);
    assert_eq!(raw.status.code(), Some(3));

    let bad = runlab_with(&exhaustive, &[("RUNLAB_CAP_N", "lots")], None);
    assert_eq!(bad.status.code(), Some(2));
}
