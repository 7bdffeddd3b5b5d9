//! FASTA ingestion and nucleotide-to-state mapping.

use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use runlab::{Sequence, Symbol};
use thiserror::Error;

/// IUPAC ambiguity codes (and gaps) that [`Policy::SkipAmbiguous`] drops.
const AMBIGUITY_CODES: &str = "NRYSWKMBDHV-";

#[derive(Debug, Error)]
pub enum FastaError {
    #[error("line {line}: sequence data before the first '>' header")]
    MalformedFasta { line: usize },
    #[error("line {line}: invalid nucleotide {symbol:?} in record {record:?}")]
    InvalidNucleotide {
        symbol: char,
        line: usize,
        record: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// How input letters become model states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolMap {
    /// Images of A, C, G, T, in that order.
    Nucleotides([Symbol; 4]),
    /// Input is already written over the model alphabet {A, B, C, D}.
    States,
}

impl Default for SymbolMap {
    fn default() -> Self {
        SymbolMap::Nucleotides([Symbol::A, Symbol::B, Symbol::C, Symbol::D])
    }
}

impl SymbolMap {
    /// Maps one uppercase letter, or `None` if it is outside the input alphabet.
    pub fn map(&self, c: char) -> Option<Symbol> {
        match self {
            SymbolMap::Nucleotides(images) => "ACGT".find(c).map(|i| images[i]),
            SymbolMap::States => Symbol::from_char(c),
        }
    }
}

impl FromStr for SymbolMap {
    type Err = String;

    /// `states`, or four distinct letters from `ABCD` giving the images of
    /// A, C, G, T (the default is `ABCD`).
    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("states") {
            return Ok(SymbolMap::States);
        }
        let images: Vec<Symbol> = s
            .chars()
            .map(|c| Symbol::from_char(c.to_ascii_uppercase()))
            .collect::<Option<_>>()
            .ok_or_else(|| format!("map {s:?} must use only the letters A, B, C, D"))?;
        let mut seen = [false; 4];
        for sym in &images {
            seen[sym.index()] = true;
        }
        match <[Symbol; 4]>::try_from(images) {
            Ok(images) if seen.iter().all(|&x| x) => Ok(SymbolMap::Nucleotides(images)),
            _ => Err(format!("map {s:?} must be a permutation of ABCD or 'states'")),
        }
    }
}

impl fmt::Display for SymbolMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolMap::Nucleotides(images) => {
                for s in images {
                    write!(f, "{s}")?;
                }
                Ok(())
            }
            SymbolMap::States => f.write_str("states"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Policy {
    Strict,
    SkipAmbiguous,
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "strict" => Ok(Policy::Strict),
            "skip-ambiguous" => Ok(Policy::SkipAmbiguous),
            _ => Err(format!("unknown policy {s:?} (expected strict or skip-ambiguous)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FastaRecord {
    pub header: String,
    pub sequence: Sequence,
    /// Ambiguity codes removed under [`Policy::SkipAmbiguous`].
    pub dropped: u64,
}

/// Reads every record. Letters are case-folded, whitespace and CR are ignored,
/// and blank lines may appear anywhere.
pub fn parse_fasta(
    input: impl BufRead,
    map: SymbolMap,
    policy: Policy,
) -> Result<Vec<FastaRecord>, FastaError> {
    let mut records: Vec<FastaRecord> = Vec::new();
    let mut symbols: Vec<Symbol> = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let text = line.trim();
        if let Some(header) = text.strip_prefix('>') {
            if let Some(last) = records.last_mut() {
                last.sequence = Sequence::new(std::mem::take(&mut symbols));
            }
            records.push(FastaRecord {
                header: header.trim().to_string(),
                sequence: Sequence::default(),
                dropped: 0,
            });
            continue;
        }
        if text.is_empty() {
            continue;
        }
        let Some(record) = records.last_mut() else {
            return Err(FastaError::MalformedFasta { line: line_no });
        };
        for c in text.chars().filter(|c| !c.is_whitespace()) {
            let c = c.to_ascii_uppercase();
            match map.map(c) {
                Some(sym) => symbols.push(sym),
                None if policy == Policy::SkipAmbiguous && AMBIGUITY_CODES.contains(c) => {
                    record.dropped += 1;
                }
                None => {
                    return Err(FastaError::InvalidNucleotide {
                        symbol: c,
                        line: line_no,
                        record: record.header.clone(),
                    })
                }
            }
        }
    }
    if let Some(last) = records.last_mut() {
        last.sequence = Sequence::new(symbols);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, map: SymbolMap, policy: Policy) -> Result<Vec<FastaRecord>, FastaError> {
        parse_fasta(text.as_bytes(), map, policy)
    }

    #[test]
    fn default_map() {
        let recs = parse(">seq1\nACGT\n", SymbolMap::default(), Policy::Strict).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].header, "seq1");
        assert_eq!(recs[0].sequence.to_string(), "ABCD");
    }

    #[test]
    fn lowercase_crlf_and_wrapping() {
        let recs = parse(">s\r\nac\r\n\r\ngt\r\n>t\r\nTTTT", SymbolMap::default(), Policy::Strict)
            .unwrap();
        assert_eq!(recs[0].sequence.to_string(), "ABCD");
        assert_eq!(recs[1].sequence.to_string(), "DDDD");
    }

    #[test]
    fn ambiguity_policies() {
        let err = parse(">s\nACNGT\n", SymbolMap::default(), Policy::Strict).unwrap_err();
        assert!(matches!(err, FastaError::InvalidNucleotide { symbol: 'N', line: 2, .. }));
        let recs = parse(">s\nACNGT\n", SymbolMap::default(), Policy::SkipAmbiguous).unwrap();
        assert_eq!(recs[0].sequence.to_string(), "ABCD");
        assert_eq!(recs[0].dropped, 1);
        // Non-IUPAC characters are rejected under either policy.
        assert!(parse(">s\nACXGT\n", SymbolMap::default(), Policy::SkipAmbiguous).is_err());
    }

    #[test]
    fn data_before_header() {
        let err = parse("ACGT\n>s\nA\n", SymbolMap::default(), Policy::Strict).unwrap_err();
        assert!(matches!(err, FastaError::MalformedFasta { line: 1 }));
    }

    #[test]
    fn empty_records_and_input() {
        assert!(parse("", SymbolMap::default(), Policy::Strict).unwrap().is_empty());
        let recs = parse(">a\n>b\nGG\n", SymbolMap::default(), Policy::Strict).unwrap();
        assert!(recs[0].sequence.is_empty());
        assert_eq!(recs[1].sequence.to_string(), "CC");
    }

    #[test]
    fn map_parsing() {
        let swapped: SymbolMap = "BADC".parse().unwrap();
        assert_eq!(swapped.map('A'), Some(Symbol::B));
        assert_eq!(swapped.map('T'), Some(Symbol::C));
        assert_eq!(swapped.to_string(), "BADC");
        assert_eq!("states".parse::<SymbolMap>().unwrap(), SymbolMap::States);
        assert!("ABCA".parse::<SymbolMap>().is_err());
        assert!("ABC".parse::<SymbolMap>().is_err());
        assert!("ABCE".parse::<SymbolMap>().is_err());
    }

    #[test]
    fn pre_mapped_states() {
        let recs = parse(">x\nDAAABBBB\n", SymbolMap::States, Policy::Strict).unwrap();
        assert_eq!(recs[0].sequence.to_string(), "DAAABBBB");
        assert!(parse(">x\nDAAG\n", SymbolMap::States, Policy::Strict).is_err());
    }
}
