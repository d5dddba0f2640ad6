//! Seeded generator of small Patents View style dumps, claims and
//! interference cases. Used by tests and for trying the pipeline without the
//! real data.
//!
//! Each CPC symbol owns a private vocabulary, so abstracts and claims of one
//! symbol share words and differ from other symbols. A share of the records
//! is deliberately broken to exercise every filter: dual or additional-only
//! CPC codes, design patents, blank abstracts, missing filing dates,
//! continuations, out-of-window and three-party cases, applications without
//! claims, dependent and cancelled claims.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::seed::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthConfig {
    pub patents: usize,
    pub symbols: usize,
    pub cases: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            patents: 400,
            symbols: 8,
            cases: 30,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthFiles {
    pub cpc: PathBuf,
    pub application: PathBuf,
    pub patent: PathBuf,
    pub claims: PathBuf,
    pub cases: PathBuf,
}

const SYMBOLS: [&str; 10] = [
    "A01B1/00",
    "A61K31/00",
    "B60L53/00",
    "C07D213/00",
    "F03D1/06",
    "G06F16/30",
    "H01M10/05",
    "H04L9/32",
    "E04B1/00",
    "D06F39/00",
];
const PREFIX: [&str; 10] = ["bra", "clo", "dre", "fli", "gro", "plu", "sna", "tri", "vor", "zem"];
const SYLLABLE: [&str; 12] = ["ka", "lo", "mi", "ne", "ru", "to", "sa", "vi", "de", "po", "ga", "fe"];
const COMMON: [&str; 10] = [
    "the", "device", "method", "system", "comprising", "wherein", "said", "of", "and", "unit",
];
const TOPIC_WORDS: usize = 40;

pub fn symbol(topic: usize) -> String {
    if topic < SYMBOLS.len() {
        SYMBOLS[topic].to_string()
    } else {
        format!("G06N{}/00", topic)
    }
}

fn word(topic: usize, j: usize) -> String {
    let base = format!(
        "{}{}{}",
        PREFIX[topic % PREFIX.len()],
        SYLLABLE[j % SYLLABLE.len()],
        SYLLABLE[(j / SYLLABLE.len()) % SYLLABLE.len()]
    );
    if topic < PREFIX.len() {
        base
    } else {
        format!("{base}{topic}")
    }
}

fn sentence(rng: &mut ChaCha8Rng, topic: usize, len: usize) -> String {
    let words: Vec<String> = (0..len)
        .map(|_| {
            if rng.random_bool(0.7) {
                word(topic, rng.random_range(0..TOPIC_WORDS))
            } else {
                COMMON[rng.random_range(0..COMMON.len())].to_string()
            }
        })
        .collect();
    words.join(" ")
}

fn abstract_text(rng: &mut ChaCha8Rng, topic: usize) -> String {
    let len = rng.random_range(12..30);
    let mut s = sentence(rng, topic, len);
    if let Some(first) = s.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    s.push('.');
    s
}

fn writer(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Writes `cpc.tsv`, `application.tsv`, `patent.tsv`, `claims.tsv` and
/// `interference.tsv` into `dir` using the default column names.
pub fn write_synthetic_dataset(dir: &Path, config: &SynthConfig) -> io::Result<SynthFiles> {
    let files = SynthFiles {
        cpc: dir.join("cpc.tsv"),
        application: dir.join("application.tsv"),
        patent: dir.join("patent.tsv"),
        claims: dir.join("claims.tsv"),
        cases: dir.join("interference.tsv"),
    };
    let symbols = config.symbols.max(2);
    let mut rng = stream_rng(config.seed, 0);

    let mut cpc = writer(&files.cpc)?;
    let mut app = writer(&files.application)?;
    let mut pat = writer(&files.patent)?;
    writeln!(cpc, "patent_id\tcpc_sequence\tcpc_section\tcpc_class\tcpc_subclass\tcpc_group\tcpc_type")?;
    writeln!(app, "application_id\tpatent_id\tfiling_date")?;
    writeln!(pat, "patent_id\tpatent_type\tpatent_abstract")?;
    let cpc_row = |out: &mut BufWriter<File>, id: &str, seq: usize, sym: &str, kind: &str| {
        let (group, _) = sym.split_once('/').expect("symbol has a subgroup");
        writeln!(
            out,
            "{id}\t{seq}\t{}\t{}\t{}\t{sym}\t{kind}",
            &sym[..1],
            &sym[..3],
            &group[..4]
        )
    };
    let mut last_text: HashMap<(usize, i32), String> = HashMap::new();
    for i in 0..config.patents {
        let id = format!("{}", 7_000_000 + i);
        let topic = rng.random_range(0..symbols);
        let year = 2001 + rng.random_range(0..4);
        let sym = symbol(topic);
        let roll: f64 = rng.random();
        if roll < 0.06 {
            cpc_row(&mut cpc, &id, 0, &sym, "inventional")?;
            cpc_row(&mut cpc, &id, 1, &symbol((topic + 1) % symbols), "additional")?;
        } else if roll < 0.11 {
            cpc_row(&mut cpc, &id, 0, &sym, "additional")?;
        } else {
            cpc_row(&mut cpc, &id, 0, &sym, "inventional")?;
        }
        if !rng.random_bool(0.01) {
            let month = rng.random_range(1..=12);
            let day = rng.random_range(1..=28);
            writeln!(app, "{year}/{i:06}\t{id}\t{year}-{month:02}-{day:02}")?;
        }
        let kind = if rng.random_bool(0.05) { "design" } else { "utility" };
        let text = if rng.random_bool(0.03) {
            String::new()
        } else if rng.random_bool(0.05) && last_text.contains_key(&(topic, year)) {
            last_text[&(topic, year)].clone()
        } else {
            abstract_text(&mut rng, topic)
        };
        if !text.is_empty() {
            last_text.insert((topic, year), text.clone());
        }
        writeln!(pat, "{id}\t{kind}\t{text}")?;
    }
    cpc.flush()?;
    app.flush()?;
    pat.flush()?;

    let mut claims = writer(&files.claims)?;
    let mut cases = writer(&files.cases)?;
    writeln!(claims, "pgpub_id\tclaim_sequence\tclaim_text\tdependent")?;
    writeln!(cases, "interference_no\tapplication_id\tfiling_date")?;
    let mut next_app = 0usize;
    for c in 0..config.cases {
        let no = 105_000 + c;
        let topic = rng.random_range(0..symbols);
        let parties = if rng.random_bool(0.1) { 3 } else { 2 };
        let in_window = !rng.random_bool(0.15);
        for _ in 0..parties {
            let year = if in_window { 2001 + rng.random_range(0..14) } else { 1999 + rng.random_range(0..2) };
            let app_id = format!("{year}{:07}", next_app);
            next_app += 1;
            writeln!(cases, "{no}\t{app_id}\t{year}-06-15")?;
            if rng.random_bool(0.08) {
                continue;
            }
            let mut seq = 1;
            let mut independent: Vec<(usize, String)> = Vec::new();
            for _ in 0..rng.random_range(1..5) {
                let len = rng.random_range(8..20);
                let text = format!("A {} comprising {}.", word(topic, rng.random_range(0..TOPIC_WORDS)), sentence(&mut rng, topic, len));
                writeln!(claims, "{app_id}\t{seq}\t{text}\t")?;
                independent.push((seq, text));
                seq += 1;
            }
            for _ in 0..rng.random_range(0..4) {
                let parent = independent[rng.random_range(0..independent.len())].0;
                let len = rng.random_range(5..12);
                let text = format!("The {} of claim {parent}, wherein {}.", COMMON[1], sentence(&mut rng, topic, len));
                let marker = if rng.random_bool(0.5) { format!("claim {parent}") } else { String::new() };
                writeln!(claims, "{app_id}\t{seq}\t{text}\t{marker}")?;
                seq += 1;
            }
            if rng.random_bool(0.3) {
                writeln!(claims, "{app_id}\t{seq}\t{seq}. (canceled)\t")?;
                seq += 1;
            }
            if rng.random_bool(0.2) {
                let (_, text) = &independent[0];
                writeln!(claims, "{app_id}\t{seq}\t{text}\t")?;
            }
        }
    }
    claims.flush()?;
    cases.flush()?;
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{filter_cases, read_cases, CaseColumns, ClaimsIndex, DEFAULT_WINDOW};
    use crate::ingest::{ingest_files, read_claim_files, ColumnMap};
    use crate::triplets::group_corpus;

    #[test]
    fn dataset_exercises_every_filter() {
        let dir = tempfile::tempdir().unwrap();
        let files = write_synthetic_dataset(dir.path(), &SynthConfig::default()).unwrap();
        let cols = ColumnMap::default();
        let corpus = ingest_files(&files.cpc, &files.application, &files.patent, &cols).unwrap();
        let p = corpus.provenance();
        assert!(p.dual_cpc > 0 && p.non_inventional > 0 && p.non_utility > 0 && p.no_abstract > 0, "{p:?}");
        assert!(p.clean > 250);
        assert_eq!(p.tables["cpc"].malformed, 0);
        assert!(group_corpus(&corpus).len() >= 8);

        let (claims, stats) = read_claim_files(&[&files.claims], &cols.claims).unwrap();
        assert_eq!(stats.malformed, 0);
        let index = ClaimsIndex::from_claims(claims);
        let (raw, _) = read_cases(File::open(&files.cases).unwrap(), &CaseColumns::default()).unwrap();
        let (cases, funnel) = filter_cases(&raw, &index, DEFAULT_WINDOW);
        assert!(cases.len() >= 10, "{funnel:?}");
        assert!(funnel.out_of_window > 0 && funnel.multiparty > 0);
    }

    #[test]
    fn same_seed_same_bytes() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let cfg = SynthConfig { patents: 50, cases: 5, ..SynthConfig::default() };
        let fa = write_synthetic_dataset(a.path(), &cfg).unwrap();
        let fb = write_synthetic_dataset(b.path(), &cfg).unwrap();
        for (x, y) in [(fa.cpc, fb.cpc), (fa.patent, fb.patent), (fa.claims, fb.claims), (fa.cases, fb.cases)] {
            assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
        }
    }
}
