use std::io::BufRead;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::tsv::{parse_table, TableReader};
use super::{ClaimColumns, IngestError};
use crate::text::normalize_text;

/// How far into a claim a textual reference to another claim is looked for.
pub const REFERENCE_SCAN_CHARS: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClaimRecord {
    pub patent_id: String,
    pub claim_sequence: u32,
    pub text: String,
    pub is_independent: bool,
}

impl ClaimRecord {
    /// Stable identifier `<patent_id>:<claim_sequence>`.
    pub fn claim_id(&self) -> String {
        format!("{}:{}", self.patent_id, self.claim_sequence)
    }
}

fn claim_reference() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\bclaims?\s+\d+").expect("valid pattern"))
}

fn is_null_marker(field: &str) -> bool {
    matches!(
        field.trim().to_ascii_lowercase().as_str(),
        "" | "null" | "none" | "nan" | "\\n" | "-1"
    )
}

/// True when the dependency field is null and the opening of the text does
/// not cite another claim by number.
pub fn is_independent_claim(dependency: &str, text: &str) -> bool {
    if !is_null_marker(dependency) {
        return false;
    }
    let head: String = text.chars().take(REFERENCE_SCAN_CHARS).collect::<String>().to_lowercase();
    !claim_reference().is_match(&head)
}

/// Rows of a pre-grant claims table. Sequences below 1 after applying the
/// configured offset are malformed.
pub fn parse_claims<R: BufRead>(
    reader: R,
    cols: &ClaimColumns,
) -> Result<TableReader<R, impl FnMut(&[&str]) -> Option<ClaimRecord>>, IngestError> {
    let offset = cols.sequence_offset;
    parse_table(
        reader,
        &[&cols.patent_id, &cols.sequence, &cols.text, &cols.dependency],
        move |f: &[&str]| {
            let patent_id = f[0].trim();
            if patent_id.is_empty() {
                return None;
            }
            let claim_sequence = f[1].trim().parse::<u32>().ok()?.checked_add(offset)?;
            if claim_sequence < 1 {
                return None;
            }
            let text = normalize_text(f[2]);
            Some(ClaimRecord {
                patent_id: patent_id.to_string(),
                claim_sequence,
                is_independent: is_independent_claim(f[3], &text),
                text,
            })
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::ColumnMap;

    #[test]
    fn detection_rule() {
        assert!(is_independent_claim("", "A device comprising a hinge."));
        assert!(!is_independent_claim("", "The device of claim 1, wherein the hinge is steel."));
        assert!(!is_independent_claim("claim 1", "The device, wherein the hinge is steel."));
        assert!(!is_independent_claim("", "A method as in Claims  12 to 14."));
        assert!(is_independent_claim("NULL", "A method of proclaiming 3 results."));
        let late_reference = format!("A device {} as in claim 1.", "x".repeat(REFERENCE_SCAN_CHARS));
        assert!(is_independent_claim("", &late_reference));
    }

    #[test]
    fn ten_claim_fixture_has_six_independent() {
        let input = "pgpub_id\tclaim_sequence\tclaim_text\tdependent\n\
            20010001\t1\tA door comprising a panel.\t\n\
            20010001\t2\tThe door of claim 1, wherein the panel is glass.\tclaim 1\n\
            20010001\t3\tA hinge comprising a pin.\t\n\
            20010001\t4\tThe hinge of claim 3 made of steel.\t\n\
            20010002\t1\tA method for sealing a window.\tNULL\n\
            20010002\t2\tThe method according to claims 1, further comprising drying.\t\n\
            20010002\t3\tA sealing compound comprising silicone.\t\n\
            20010002\t4\tThe compound, wherein the silicone is cured.\tclaim 3\n\
            20010003\t1\tA lamp comprising a bulb.\t\n\
            20010003\t2\t1. (canceled)\t\n";
        let mut rows = parse_claims(input.as_bytes(), &ColumnMap::default().claims).unwrap();
        let claims: Vec<ClaimRecord> = rows.by_ref().map(Result::unwrap).collect();
        assert_eq!(claims.len(), 10);
        assert_eq!(claims.iter().filter(|c| c.is_independent).count(), 6);
        assert_eq!(claims[3].claim_sequence, 4);
        assert_eq!(claims[3].claim_id(), "20010001:4");
        assert_eq!(rows.stats().malformed, 0);
    }

    #[test]
    fn zero_based_sequences_need_an_offset() {
        let input = "pgpub_id\tclaim_sequence\tclaim_text\tdependent\nP\t0\tA thing.\t\n";
        let mut cols = ColumnMap::default().claims;
        let mut rows = parse_claims(input.as_bytes(), &cols).unwrap();
        assert_eq!(rows.by_ref().count(), 0);
        assert_eq!(rows.stats().malformed, 1);
        cols.sequence_offset = 1;
        let claims: Vec<_> = parse_claims(input.as_bytes(), &cols).unwrap().map(Result::unwrap).collect();
        assert_eq!(claims[0].claim_sequence, 1);
    }
}
