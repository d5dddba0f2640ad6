//! Ingestion of Patents View style dumps into a clean, single-CPC corpus.

mod claims;
mod corpus;
mod tsv;

pub use claims::{is_independent_claim, parse_claims, ClaimRecord};
pub use corpus::{
    build_clean_corpus, read_corpus, try_build_clean_corpus, write_corpus, ApplicationRow, PatentCorpus, PatentRow,
    Provenance, CORPUS_MAGIC,
};
pub use tsv::{open_input, parse_table, ParseStats, TableReader};

use std::fmt;
use std::io::BufRead;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::normalize_text;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot open {path}: {source}")]
    Open {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("schema error: required column `{column}` missing from header")]
    MissingColumn { column: String },
    #[error("schema error: input has no header row")]
    NoHeader,
    #[error("ingestion conflict: patent `{patent_id}` has conflicting {field}")]
    Conflict { patent_id: String, field: &'static str },
    #[error("corpus file line {line}: {message}")]
    CorpusFormat { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AssignmentType {
    Inventional,
    Additional,
}

impl AssignmentType {
    /// Accepts `inventional`, `inventive` or `I`, and `additional` or `A`.
    pub fn parse(raw: &str) -> Option<Self> {
        match raw.trim().to_ascii_lowercase().as_str() {
            "inventional" | "inventive" | "i" => Some(Self::Inventional),
            "additional" | "a" => Some(Self::Additional),
            _ => None,
        }
    }
}

/// One CPC classification of one patent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CpcAssignment {
    pub patent_id: String,
    pub section: char,
    pub class_: String,
    pub subclass: char,
    pub group: String,
    pub subgroup: String,
    pub assignment_type: AssignmentType,
}

impl CpcAssignment {
    /// Builds an assignment from dump fields.
    ///
    /// Each level may be given bare (`01`, `B`, `1`, `00`) or cumulatively as
    /// in recent dumps (`A01`, `A01B`, `A01B1/00`). When the group field holds
    /// a `/`, the subgroup is taken from it unless `subgroup` is non-empty.
    pub fn from_fields(
        patent_id: &str,
        section: &str,
        class_: &str,
        subclass: &str,
        group: &str,
        subgroup: &str,
        assignment_type: AssignmentType,
    ) -> Option<Self> {
        let section = single_char(section.trim())?;
        if !matches!(section, 'A'..='H' | 'Y') {
            return None;
        }
        let class_ = strip_prefix_owned(class_.trim(), &section.to_string());
        if class_.len() != 2 || !class_.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let prefix = format!("{section}{class_}");
        let subclass = single_char(&strip_prefix_owned(subclass.trim(), &prefix))?;
        if !subclass.is_ascii_uppercase() {
            return None;
        }
        let prefix = format!("{prefix}{subclass}");
        let group = strip_prefix_owned(group.trim(), &prefix);
        let (group, embedded_subgroup) = match group.split_once('/') {
            Some((g, s)) => (g.to_string(), Some(s.to_string())),
            None => (group, None),
        };
        let subgroup = match (subgroup.trim(), embedded_subgroup) {
            ("", Some(s)) => s,
            (s, _) => s.rsplit('/').next().unwrap_or(s).to_string(),
        };
        let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
        if !digits(&group) || !digits(&subgroup) {
            return None;
        }
        let patent_id = patent_id.trim();
        if patent_id.is_empty() {
            return None;
        }
        Some(Self {
            patent_id: patent_id.to_string(),
            section,
            class_,
            subclass,
            group,
            subgroup,
            assignment_type,
        })
    }

    /// Parses a full symbol such as `A01B1/00`.
    pub fn from_symbol(patent_id: &str, symbol: &str, assignment_type: AssignmentType) -> Option<Self> {
        let symbol = symbol.trim();
        if symbol.len() < 4 || !symbol.is_char_boundary(4) {
            return None;
        }
        Self::from_fields(
            patent_id,
            &symbol[..1],
            &symbol[1..3],
            &symbol[3..4],
            &symbol[4..],
            "",
            assignment_type,
        )
    }

    /// `section + class + subclass + group + "/" + subgroup`
    pub fn full_symbol(&self) -> String {
        format!(
            "{}{}{}{}/{}",
            self.section, self.class_, self.subclass, self.group, self.subgroup
        )
    }
}

fn single_char(s: &str) -> Option<char> {
    let mut chars = s.chars();
    let c = chars.next()?;
    chars.next().is_none().then_some(c)
}

fn strip_prefix_owned(s: &str, prefix: &str) -> String {
    s.strip_prefix(prefix).filter(|r| !r.is_empty()).unwrap_or(s).to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PatentType {
    Utility,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatentRecord {
    pub patent_id: String,
    pub filing_date: NaiveDate,
    pub abstract_text: String,
    pub patent_type: PatentType,
    pub cpc: Vec<CpcAssignment>,
}

impl PatentRecord {
    pub fn filing_year(&self) -> i32 {
        use chrono::Datelike;
        self.filing_date.year()
    }

    /// Full symbol of the first CPC assignment; clean records have exactly one.
    pub fn cpc_symbol(&self) -> String {
        self.cpc.first().map(CpcAssignment::full_symbol).unwrap_or_default()
    }
}

impl fmt::Display for PatentRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}, {})", self.patent_id, self.filing_date, self.cpc_symbol())
    }
}

pub fn parse_date(raw: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(raw.trim(), "%Y-%m-%d").ok()
}

/// Column names of the CPC assignment table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CpcColumns {
    pub patent_id: String,
    pub section: String,
    pub class_: String,
    pub subclass: String,
    pub group: String,
    /// Empty when the group column carries `group/subgroup`.
    pub subgroup: String,
    pub assignment_type: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApplicationColumns {
    pub patent_id: String,
    pub filing_date: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatentColumns {
    pub patent_id: String,
    pub patent_type: String,
    pub abstract_text: String,
    /// Value of the type column that marks a utility patent (case-insensitive).
    pub utility_value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimColumns {
    pub patent_id: String,
    pub sequence: String,
    pub text: String,
    pub dependency: String,
    /// Added to the sequence column so that the first claim is numbered 1.
    pub sequence_offset: u32,
}

/// Column names for every input table. Defaults follow the 2023 Patents View
/// bulk-download schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMap {
    pub cpc: CpcColumns,
    pub application: ApplicationColumns,
    pub patent: PatentColumns,
    pub claims: ClaimColumns,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            cpc: CpcColumns {
                patent_id: "patent_id".into(),
                section: "cpc_section".into(),
                class_: "cpc_class".into(),
                subclass: "cpc_subclass".into(),
                group: "cpc_group".into(),
                subgroup: String::new(),
                assignment_type: "cpc_type".into(),
            },
            application: ApplicationColumns {
                patent_id: "patent_id".into(),
                filing_date: "filing_date".into(),
            },
            patent: PatentColumns {
                patent_id: "patent_id".into(),
                patent_type: "patent_type".into(),
                abstract_text: "patent_abstract".into(),
                utility_value: "utility".into(),
            },
            claims: ClaimColumns {
                patent_id: "pgpub_id".into(),
                sequence: "claim_sequence".into(),
                text: "claim_text".into(),
                dependency: "dependent".into(),
                sequence_offset: 0,
            },
        }
    }
}

/// Rows of the CPC table as [`CpcAssignment`]s.
pub fn parse_cpc_rows<R: BufRead>(
    reader: R,
    cols: &CpcColumns,
) -> Result<TableReader<R, impl FnMut(&[&str]) -> Option<CpcAssignment>>, IngestError> {
    let has_subgroup = !cols.subgroup.is_empty();
    let mut names = vec![
        cols.patent_id.as_str(),
        cols.section.as_str(),
        cols.class_.as_str(),
        cols.subclass.as_str(),
        cols.group.as_str(),
        cols.assignment_type.as_str(),
    ];
    if has_subgroup {
        names.push(cols.subgroup.as_str());
    }
    parse_table(reader, &names, move |f: &[&str]| {
        let kind = AssignmentType::parse(f[5])?;
        let subgroup = if has_subgroup { f[6] } else { "" };
        CpcAssignment::from_fields(f[0], f[1], f[2], f[3], f[4], subgroup, kind)
    })
}

pub fn parse_application_rows<R: BufRead>(
    reader: R,
    cols: &ApplicationColumns,
) -> Result<TableReader<R, impl FnMut(&[&str]) -> Option<ApplicationRow>>, IngestError> {
    parse_table(reader, &[&cols.patent_id, &cols.filing_date], |f: &[&str]| {
        let patent_id = f[0].trim();
        if patent_id.is_empty() {
            return None;
        }
        Some(ApplicationRow {
            patent_id: patent_id.to_string(),
            filing_date: parse_date(f[1])?,
        })
    })
}

pub fn parse_patent_rows<R: BufRead>(
    reader: R,
    cols: &PatentColumns,
) -> Result<TableReader<R, impl FnMut(&[&str]) -> Option<PatentRow>>, IngestError> {
    let utility = cols.utility_value.to_ascii_lowercase();
    parse_table(
        reader,
        &[&cols.patent_id, &cols.patent_type, &cols.abstract_text],
        move |f: &[&str]| {
            let patent_id = f[0].trim();
            if patent_id.is_empty() {
                return None;
            }
            let patent_type = if f[1].trim().eq_ignore_ascii_case(&utility) {
                PatentType::Utility
            } else {
                PatentType::Other
            };
            Some(PatentRow {
                patent_id: patent_id.to_string(),
                patent_type,
                abstract_text: normalize_text(f[2]),
            })
        },
    )
}

/// Streams the three tables from disk and builds the clean corpus, recording
/// per-table row counters in its provenance.
pub fn ingest_files(
    cpc: &Path,
    applications: &Path,
    patents: &Path,
    columns: &ColumnMap,
) -> Result<PatentCorpus, IngestError> {
    let mut cpc_rows = parse_cpc_rows(open_input(cpc)?, &columns.cpc)?;
    let mut app_rows = parse_application_rows(open_input(applications)?, &columns.application)?;
    let mut patent_rows = parse_patent_rows(open_input(patents)?, &columns.patent)?;
    let mut corpus = try_build_clean_corpus(cpc_rows.by_ref(), app_rows.by_ref(), patent_rows.by_ref())?;
    let prov = corpus.provenance_mut();
    prov.record_table("cpc", cpc_rows.stats());
    prov.record_table("application", app_rows.stats());
    prov.record_table("patent", patent_rows.stats());
    Ok(corpus)
}

/// Reads every claims file in order; counters are summed over files.
pub fn read_claim_files<P: AsRef<Path>>(
    paths: &[P],
    columns: &ClaimColumns,
) -> Result<(Vec<ClaimRecord>, ParseStats), IngestError> {
    let mut claims = Vec::new();
    let mut total = ParseStats::default();
    for path in paths {
        let mut rows = parse_claims(open_input(path.as_ref())?, columns)?;
        for row in rows.by_ref() {
            claims.push(row?);
        }
        let s = rows.stats();
        total.read += s.read;
        total.yielded += s.yielded;
        total.malformed += s.malformed;
    }
    Ok((claims, total))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cpc_fields_bare_and_cumulative_agree() {
        let bare = CpcAssignment::from_fields("p", "A", "01", "B", "1", "00", AssignmentType::Inventional).unwrap();
        let cumulative =
            CpcAssignment::from_fields("p", "A", "A01", "A01B", "A01B1/00", "", AssignmentType::Inventional)
                .unwrap();
        assert_eq!(bare, cumulative);
        assert_eq!(bare.full_symbol(), "A01B1/00");
        let with_full_subgroup =
            CpcAssignment::from_fields("p", "A", "A01", "A01B", "A01B1", "A01B1/00", AssignmentType::Inventional)
                .unwrap();
        assert_eq!(with_full_subgroup, bare);
    }

    #[test]
    fn cpc_invariants_are_enforced() {
        let mk = |s: &str, c: &str| CpcAssignment::from_fields("p", s, c, "B", "1", "00", AssignmentType::Additional);
        assert!(mk("Y", "10").is_some());
        assert!(mk("I", "01").is_none());
        assert!(mk("A", "1").is_none());
        assert!(mk("A", "0x").is_none());
        assert!(CpcAssignment::from_fields("p", "A", "01", "b", "1", "00", AssignmentType::Additional).is_none());
        assert!(CpcAssignment::from_fields("", "A", "01", "B", "1", "00", AssignmentType::Additional).is_none());
    }

    #[test]
    fn symbol_round_trip() {
        let a = CpcAssignment::from_symbol("x", "H04L29/06", AssignmentType::Inventional).unwrap();
        assert_eq!((a.section, a.class_.as_str(), a.subclass), ('H', "04", 'L'));
        assert_eq!((a.group.as_str(), a.subgroup.as_str()), ("29", "06"));
        assert_eq!(a.full_symbol(), "H04L29/06");
        assert!(CpcAssignment::from_symbol("x", "H04", AssignmentType::Inventional).is_none());
    }

    #[test]
    fn assignment_type_spellings() {
        assert_eq!(AssignmentType::parse("inventive"), Some(AssignmentType::Inventional));
        assert_eq!(AssignmentType::parse("Inventional"), Some(AssignmentType::Inventional));
        assert_eq!(AssignmentType::parse("additional"), Some(AssignmentType::Additional));
        assert_eq!(AssignmentType::parse("other"), None);
    }

    #[test]
    fn cpc_table_with_2023_headers() {
        let input = "patent_id\tcpc_sequence\tcpc_section\tcpc_class\tcpc_subclass\tcpc_group\tcpc_type\n\
                     100\t0\tA\tA01\tA01B\tA01B1/00\tinventive\n\
                     101\t0\tA\tA01\tA01B\tbad\tinventive\n";
        let mut rows = parse_cpc_rows(input.as_bytes(), &ColumnMap::default().cpc).unwrap();
        let got: Vec<_> = rows.by_ref().map(Result::unwrap).collect();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].full_symbol(), "A01B1/00");
        assert_eq!(rows.stats().malformed, 1);
    }

    #[test]
    fn bad_dates_are_malformed() {
        let input = "patent_id\tfiling_date\n1\t2001-02-30\n2\t2001-02-03\n";
        let mut rows = parse_application_rows(input.as_bytes(), &ColumnMap::default().application).unwrap();
        let got: Vec<_> = rows.by_ref().map(Result::unwrap).collect();
        assert_eq!(got.len(), 1);
        assert_eq!(rows.stats().malformed, 1);
    }

    #[test]
    fn patent_rows_normalize_abstracts() {
        let input = "patent_id\tpatent_type\tpatent_abstract\n7\tUtility\t  A  door. \n8\tdesign\tx\n";
        let rows: Vec<_> = parse_patent_rows(input.as_bytes(), &ColumnMap::default().patent)
            .unwrap()
            .map(Result::unwrap)
            .collect();
        assert_eq!(rows[0].abstract_text, "A door.");
        assert_eq!(rows[0].patent_type, PatentType::Utility);
        assert_eq!(rows[1].patent_type, PatentType::Other);
    }
}
