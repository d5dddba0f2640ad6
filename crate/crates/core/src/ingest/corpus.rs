use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::tsv::ParseStats;
use super::{parse_date, AssignmentType, CpcAssignment, IngestError, PatentRecord, PatentType};

pub const CORPUS_MAGIC: &str = "PATSIM-CORPUS v1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApplicationRow {
    pub patent_id: String,
    pub filing_date: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatentRow {
    pub patent_id: String,
    pub patent_type: PatentType,
    /// Already normalized.
    pub abstract_text: String,
}

/// Row counts per input table and patents removed at each filter stage.
///
/// Stages run in this order: more than one CPC code (`dual_cpc`), the single
/// code is not inventional (`non_inventional`), no parseable filing date
/// (`no_filing_date`), not a utility patent or absent from the patent table
/// (`non_utility`), empty abstract (`no_abstract`).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tables: BTreeMap<String, ParseStats>,
    pub cpc_patents: u64,
    pub dual_cpc: u64,
    pub non_inventional: u64,
    pub no_filing_date: u64,
    pub non_utility: u64,
    pub no_abstract: u64,
    pub clean: u64,
}

impl Provenance {
    pub fn record_table(&mut self, name: &str, stats: ParseStats) {
        self.tables.insert(name.to_string(), stats);
    }

    /// Flat `key=value` report, one counter per line.
    pub fn to_report(&self) -> String {
        let mut out = String::new();
        for (name, s) in &self.tables {
            out.push_str(&format!("table.{name}.read={}\n", s.read));
            out.push_str(&format!("table.{name}.yielded={}\n", s.yielded));
            out.push_str(&format!("table.{name}.malformed={}\n", s.malformed));
        }
        for (key, value) in [
            ("cpc_patents", self.cpc_patents),
            ("removed.dual_cpc", self.dual_cpc),
            ("removed.non_inventional", self.non_inventional),
            ("removed.no_filing_date", self.no_filing_date),
            ("removed.non_utility", self.non_utility),
            ("removed.no_abstract", self.no_abstract),
            ("clean", self.clean),
        ] {
            out.push_str(&format!("{key}={value}\n"));
        }
        out
    }
}

/// Clean patent corpus keyed by patent id. Every record carries exactly one
/// inventional CPC assignment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PatentCorpus {
    records: BTreeMap<String, PatentRecord>,
    provenance: Provenance,
}

impl PatentCorpus {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, patent_id: &str) -> Option<&PatentRecord> {
        self.records.get(patent_id)
    }

    /// Records in ascending id order.
    pub fn records(&self) -> impl ExactSizeIterator<Item = &PatentRecord> {
        self.records.values()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn provenance_mut(&mut self) -> &mut Provenance {
        &mut self.provenance
    }

    /// Re-expresses the corpus as the three input tables.
    pub fn source_rows(&self) -> (Vec<CpcAssignment>, Vec<ApplicationRow>, Vec<PatentRow>) {
        let mut cpc = Vec::with_capacity(self.len());
        let mut apps = Vec::with_capacity(self.len());
        let mut patents = Vec::with_capacity(self.len());
        for r in self.records.values() {
            cpc.extend(r.cpc.iter().cloned());
            apps.push(ApplicationRow {
                patent_id: r.patent_id.clone(),
                filing_date: r.filing_date,
            });
            patents.push(PatentRow {
                patent_id: r.patent_id.clone(),
                patent_type: r.patent_type,
                abstract_text: r.abstract_text.clone(),
            });
        }
        (cpc, apps, patents)
    }
}

/// [`try_build_clean_corpus`] over infallible rows.
pub fn build_clean_corpus<C, A, P>(cpc_rows: C, application_rows: A, patent_rows: P) -> Result<PatentCorpus, IngestError>
where
    C: IntoIterator<Item = CpcAssignment>,
    A: IntoIterator<Item = ApplicationRow>,
    P: IntoIterator<Item = PatentRow>,
{
    try_build_clean_corpus(
        cpc_rows.into_iter().map(Ok),
        application_rows.into_iter().map(Ok),
        patent_rows.into_iter().map(Ok),
    )
}

/// Joins the three tables and applies the record filters.
///
/// Only patents that survive the CPC stages are retained while the
/// application and patent tables stream past, so memory grows with the
/// candidate set rather than with the dumps. The result does not depend on
/// row order.
pub fn try_build_clean_corpus<C, A, P>(
    cpc_rows: C,
    application_rows: A,
    patent_rows: P,
) -> Result<PatentCorpus, IngestError>
where
    C: IntoIterator<Item = Result<CpcAssignment, IngestError>>,
    A: IntoIterator<Item = Result<ApplicationRow, IngestError>>,
    P: IntoIterator<Item = Result<PatentRow, IngestError>>,
{
    // patent id -> (first distinct assignment, has a second distinct one)
    let mut cpc: HashMap<String, (CpcAssignment, bool)> = HashMap::new();
    for row in cpc_rows {
        let row = row?;
        match cpc.get_mut(&row.patent_id) {
            Some((first, multi)) => *multi |= *first != row,
            None => {
                cpc.insert(row.patent_id.clone(), (row, false));
            }
        }
    }

    let mut prov = Provenance {
        cpc_patents: cpc.len() as u64,
        ..Provenance::default()
    };
    let mut candidates: HashMap<String, CpcAssignment> = HashMap::new();
    for (id, (assignment, multi)) in cpc {
        if multi {
            prov.dual_cpc += 1;
        } else if assignment.assignment_type != AssignmentType::Inventional {
            prov.non_inventional += 1;
        } else {
            candidates.insert(id, assignment);
        }
    }

    let mut dates: HashMap<String, NaiveDate> = HashMap::new();
    for row in application_rows {
        let row = row?;
        if candidates.contains_key(&row.patent_id) {
            dates
                .entry(row.patent_id)
                .and_modify(|d| *d = (*d).min(row.filing_date))
                .or_insert(row.filing_date);
        }
    }

    let mut patents: HashMap<String, PatentRow> = HashMap::new();
    for row in patent_rows {
        let row = row?;
        if !candidates.contains_key(&row.patent_id) {
            continue;
        }
        if let Some(existing) = patents.get(&row.patent_id) {
            if existing.abstract_text != row.abstract_text {
                return Err(IngestError::Conflict {
                    patent_id: row.patent_id,
                    field: "abstracts",
                });
            }
            if existing.patent_type != row.patent_type {
                return Err(IngestError::Conflict {
                    patent_id: row.patent_id,
                    field: "patent types",
                });
            }
        } else {
            patents.insert(row.patent_id.clone(), row);
        }
    }

    let mut records = BTreeMap::new();
    for (id, assignment) in candidates {
        let Some(&filing_date) = dates.get(&id) else {
            prov.no_filing_date += 1;
            continue;
        };
        let Some(patent) = patents.remove(&id).filter(|p| p.patent_type == PatentType::Utility) else {
            prov.non_utility += 1;
            continue;
        };
        if patent.abstract_text.is_empty() {
            prov.no_abstract += 1;
            continue;
        }
        records.insert(
            id.clone(),
            PatentRecord {
                patent_id: id,
                filing_date,
                abstract_text: patent.abstract_text,
                patent_type: PatentType::Utility,
                cpc: vec![assignment],
            },
        );
    }
    prov.clean = records.len() as u64;
    Ok(PatentCorpus {
        records,
        provenance: prov,
    })
}

/// `PATSIM-CORPUS v1\tcount=<n>` then `id\tfiling_date\tcpc_symbol\tabstract`.
pub fn write_corpus<W: Write>(mut writer: W, corpus: &PatentCorpus) -> std::io::Result<()> {
    writeln!(writer, "{CORPUS_MAGIC}\tcount={}", corpus.len())?;
    for r in corpus.records() {
        writeln!(
            writer,
            "{}\t{}\t{}\t{}",
            r.patent_id,
            r.filing_date.format("%Y-%m-%d"),
            r.cpc_symbol(),
            r.abstract_text
        )?;
    }
    Ok(())
}

pub fn read_corpus<R: BufRead>(reader: R) -> Result<PatentCorpus, IngestError> {
    let bad = |line: usize, message: &str| IngestError::CorpusFormat {
        line,
        message: message.to_string(),
    };
    let mut lines = reader.lines();
    let header = lines.next().transpose()?.ok_or_else(|| bad(1, "missing header"))?;
    let count: usize = header
        .strip_prefix(CORPUS_MAGIC)
        .and_then(|r| r.strip_prefix("\tcount="))
        .and_then(|c| c.parse().ok())
        .ok_or_else(|| bad(1, "expected `PATSIM-CORPUS v1\\tcount=<n>`"))?;
    let mut records = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line?;
        let fields: Vec<&str> = line.splitn(4, '\t').collect();
        let [id, date, symbol, text] = fields[..] else {
            return Err(bad(line_no, "expected 4 tab-separated fields"));
        };
        let filing_date = parse_date(date).ok_or_else(|| bad(line_no, "invalid filing date"))?;
        let cpc = CpcAssignment::from_symbol(id, symbol, AssignmentType::Inventional)
            .ok_or_else(|| bad(line_no, "invalid CPC symbol"))?;
        if text.is_empty() {
            return Err(bad(line_no, "empty abstract"));
        }
        let record = PatentRecord {
            patent_id: id.to_string(),
            filing_date,
            abstract_text: text.to_string(),
            patent_type: PatentType::Utility,
            cpc: vec![cpc],
        };
        if records.insert(id.to_string(), record).is_some() {
            return Err(bad(line_no, "duplicate patent id"));
        }
    }
    if records.len() != count {
        return Err(bad(1, &format!("header count {count} but {} records", records.len())));
    }
    let provenance = Provenance {
        clean: count as u64,
        ..Provenance::default()
    };
    Ok(PatentCorpus { records, provenance })
}
