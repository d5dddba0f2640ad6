//! Interference ground truth: case filtering, usable claims, cross-pair
//! enumeration, reference-embedder pair selection, and the random control set.

mod file;

pub use file::{read_benchmark, write_benchmark, BENCH_MAGIC};

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Read;

use chrono::{Datelike, NaiveDate};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::{cosine, DenseVector, EmbedError, Embedder, TextRef};
use crate::ingest::{parse_date, ClaimRecord, ParseStats};
use crate::scalar::Scalar;
use crate::seed::stream_rng;

pub const DEFAULT_WINDOW: (i32, i32) = (2001, 2014);

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("internal consistency: {0}")]
    Internal(String),
    #[error("selection failed on claim `{claim_id}`: {source}")]
    Selection {
        claim_id: String,
        #[source]
        source: EmbedError,
    },
    #[error("case file: required column `{0}` missing from header")]
    MissingColumn(String),
    #[error("benchmark file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Column names of the interference case file, one row per (case, application).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseColumns {
    pub interference_no: String,
    pub application_id: String,
    pub filing_date: String,
    pub delimiter: char,
}

impl Default for CaseColumns {
    fn default() -> Self {
        Self {
            interference_no: "interference_no".into(),
            application_id: "application_id".into(),
            filing_date: "filing_date".into(),
            delimiter: '\t',
        }
    }
}

/// One interference as listed in the case file. A `None` date was missing
/// or unparseable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawCase {
    pub interference_no: String,
    pub applications: Vec<(String, Option<NaiveDate>)>,
}

/// Reads the long-format case file into cases ordered by interference number.
/// Rows with an empty case number or application id count as malformed;
/// repeated (case, application) rows collapse.
pub fn read_cases<R: Read>(reader: R, cols: &CaseColumns) -> Result<(Vec<RawCase>, ParseStats), BenchError> {
    if !cols.delimiter.is_ascii() {
        return Err(BenchError::Parameter(format!("delimiter {:?} is not ASCII", cols.delimiter)));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(cols.delimiter as u8)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim().trim_start_matches('\u{feff}') == name)
            .ok_or_else(|| BenchError::MissingColumn(name.to_string()))
    };
    let (ci, ai, di) = (find(&cols.interference_no)?, find(&cols.application_id)?, find(&cols.filing_date)?);
    let mut stats = ParseStats::default();
    let mut cases: BTreeMap<String, BTreeMap<String, Option<NaiveDate>>> = BTreeMap::new();
    for record in rdr.records() {
        stats.read += 1;
        let record = match record {
            Ok(r) if r.len() == headers.len() => r,
            Ok(_) | Err(_) => {
                stats.malformed += 1;
                continue;
            }
        };
        let (case, app) = (record[ci].trim(), record[ai].trim());
        if case.is_empty() || app.is_empty() {
            stats.malformed += 1;
            continue;
        }
        stats.yielded += 1;
        let date = parse_date(&record[di]);
        let apps = cases.entry(case.to_string()).or_default();
        let slot = apps.entry(app.to_string()).or_insert(date);
        if slot.is_none() {
            *slot = date;
        }
    }
    let cases = cases
        .into_iter()
        .map(|(interference_no, apps)| RawCase {
            interference_no,
            applications: apps.into_iter().collect(),
        })
        .collect();
    Ok((cases, stats))
}

/// Claims of every application, keyed by application id, in claim order.
#[derive(Debug, Clone, Default)]
pub struct ClaimsIndex {
    claims: HashMap<String, Vec<ClaimRecord>>,
}

impl ClaimsIndex {
    pub fn from_claims<I: IntoIterator<Item = ClaimRecord>>(claims: I) -> Self {
        let mut map: HashMap<String, Vec<ClaimRecord>> = HashMap::new();
        for c in claims {
            map.entry(c.patent_id.clone()).or_default().push(c);
        }
        for v in map.values_mut() {
            v.sort_by(|a, b| (a.claim_sequence, &a.text).cmp(&(b.claim_sequence, &b.text)));
        }
        Self { claims: map }
    }

    pub fn claims(&self, application_id: &str) -> &[ClaimRecord] {
        self.claims.get(application_id).map_or(&[], Vec::as_slice)
    }

    pub fn usable(&self, application_id: &str) -> Vec<ClaimRecord> {
        usable_claims(self.claims(application_id))
    }

    pub fn applications(&self) -> usize {
        self.claims.len()
    }
}

/// Independent claims without "canceled"/"cancelled", first occurrence of each text kept.
pub fn usable_claims(claims: &[ClaimRecord]) -> Vec<ClaimRecord> {
    let mut seen = HashSet::new();
    claims
        .iter()
        .filter(|c| c.is_independent)
        .filter(|c| {
            let lower = c.text.to_lowercase();
            !lower.contains("canceled") && !lower.contains("cancelled")
        })
        .filter(|c| seen.insert(c.text.as_str()))
        .cloned()
        .collect()
}

/// A surviving interference with its two applications in ascending id order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterferenceCase {
    pub interference_no: String,
    pub application_ids: Vec<String>,
    pub filing_dates: Vec<NaiveDate>,
}

/// Case and claim counts along the filter funnel.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Funnel {
    pub raw_cases: u64,
    /// Some application filed outside the window or undated.
    pub out_of_window: u64,
    pub in_window: u64,
    pub in_window_applications: u64,
    /// Not exactly two applications.
    pub multiparty: u64,
    /// An application without usable claims.
    pub no_claims: u64,
    pub kept: u64,
    pub kept_applications: u64,
    pub usable_claims: u64,
    pub candidate_pairs: u64,
}

impl Funnel {
    pub fn to_report(&self) -> String {
        [
            ("cases.raw", self.raw_cases),
            ("cases.removed.out_of_window", self.out_of_window),
            ("cases.in_window", self.in_window),
            ("applications.in_window", self.in_window_applications),
            ("cases.removed.multiparty", self.multiparty),
            ("cases.removed.no_claims", self.no_claims),
            ("cases.kept", self.kept),
            ("applications.kept", self.kept_applications),
            ("claims.usable", self.usable_claims),
            ("pairs.candidates", self.candidate_pairs),
        ]
        .iter()
        .map(|(k, v)| format!("{k}={v}\n"))
        .collect()
    }
}

/// Keeps cases whose applications were all filed within `window` (inclusive
/// years), that involve exactly two applications, each with a usable claim.
pub fn filter_cases(raw: &[RawCase], claims: &ClaimsIndex, window: (i32, i32)) -> (Vec<InterferenceCase>, Funnel) {
    let mut funnel = Funnel {
        raw_cases: raw.len() as u64,
        ..Funnel::default()
    };
    let mut in_window_apps = HashSet::new();
    let mut kept_apps = HashSet::new();
    let mut usable_ids = HashSet::new();
    let mut out = Vec::new();
    for case in raw {
        let in_window = !case.applications.is_empty()
            && case
                .applications
                .iter()
                .all(|(_, d)| d.is_some_and(|d| (window.0..=window.1).contains(&d.year())));
        if !in_window {
            funnel.out_of_window += 1;
            continue;
        }
        funnel.in_window += 1;
        in_window_apps.extend(case.applications.iter().map(|(a, _)| a.as_str()));
        if case.applications.len() != 2 {
            funnel.multiparty += 1;
            continue;
        }
        let usable: Vec<Vec<ClaimRecord>> = case.applications.iter().map(|(a, _)| claims.usable(a)).collect();
        if usable.iter().any(Vec::is_empty) {
            funnel.no_claims += 1;
            continue;
        }
        funnel.kept += 1;
        funnel.candidate_pairs += (usable[0].len() * usable[1].len()) as u64;
        for (i, (app, _)) in case.applications.iter().enumerate() {
            kept_apps.insert(app.as_str());
            for c in &usable[i] {
                usable_ids.insert((c.patent_id.clone(), c.claim_sequence));
            }
        }
        out.push(InterferenceCase {
            interference_no: case.interference_no.clone(),
            application_ids: case.applications.iter().map(|(a, _)| a.clone()).collect(),
            filing_dates: case.applications.iter().filter_map(|(_, d)| *d).collect(),
        });
    }
    funnel.in_window_applications = in_window_apps.len() as u64;
    funnel.kept_applications = kept_apps.len() as u64;
    funnel.usable_claims = usable_ids.len() as u64;
    (out, funnel)
}

/// Candidate pair: `claim_a` from the case's first application, `claim_b` from the second.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub claim_a: ClaimRecord,
    pub claim_b: ClaimRecord,
}

impl Candidate {
    fn tie_key(&self) -> (&str, u32, &str, u32) {
        (
            &self.claim_a.patent_id,
            self.claim_a.claim_sequence,
            &self.claim_b.patent_id,
            self.claim_b.claim_sequence,
        )
    }
}

/// All m×n pairs of usable claims across the two applications.
pub fn enumerate_cross_pairs(case: &InterferenceCase, claims: &ClaimsIndex) -> Result<Vec<Candidate>, BenchError> {
    let [a, b] = &case.application_ids[..] else {
        return Err(BenchError::Internal(format!(
            "case {} has {} applications",
            case.interference_no,
            case.application_ids.len()
        )));
    };
    let (ua, ub) = (claims.usable(a), claims.usable(b));
    if ua.is_empty() || ub.is_empty() {
        return Err(BenchError::Internal(format!(
            "case {} has an application without usable claims",
            case.interference_no
        )));
    }
    Ok(ua
        .iter()
        .flat_map(|ca| {
            ub.iter().map(move |cb| Candidate {
                claim_a: ca.clone(),
                claim_b: cb.clone(),
            })
        })
        .collect())
}

/// A benchmark pair. True pairs carry the reference cosine that selected
/// them; random pairs carry the interference their second claim came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimPair {
    pub interference_no: String,
    pub claim_a: ClaimRecord,
    pub claim_b: ClaimRecord,
    pub selection_score: Option<f64>,
    pub partner_interference: Option<String>,
}

fn embed_claim<T: Scalar, E: Embedder<T> + ?Sized>(
    reference: &E,
    claim: &ClaimRecord,
) -> Result<DenseVector<T>, BenchError> {
    let id = claim.claim_id();
    reference
        .embed(TextRef::new(&id, &claim.text))
        .map_err(|source| BenchError::Selection { claim_id: id, source })
}

/// Highest reference cosine; ties go to the smallest
/// (patent_a, sequence_a, patent_b, sequence_b).
pub fn select_representative_pair<T: Scalar, E: Embedder<T> + ?Sized>(
    interference_no: &str,
    candidates: &[Candidate],
    reference: &E,
) -> Result<ClaimPair, BenchError> {
    let mut cache: HashMap<(String, u32), DenseVector<T>> = HashMap::new();
    let mut best: Option<(f64, &Candidate)> = None;
    for cand in candidates {
        for claim in [&cand.claim_a, &cand.claim_b] {
            let key = (claim.patent_id.clone(), claim.claim_sequence);
            if !cache.contains_key(&key) {
                cache.insert(key, embed_claim(reference, claim)?);
            }
        }
        let va = &cache[&(cand.claim_a.patent_id.clone(), cand.claim_a.claim_sequence)];
        let vb = &cache[&(cand.claim_b.patent_id.clone(), cand.claim_b.claim_sequence)];
        let score = cosine(va, vb)
            .map_err(|source| BenchError::Selection {
                claim_id: cand.claim_a.claim_id(),
                source,
            })?
            .as_f64();
        let better = match best {
            None => true,
            Some((s, b)) => score > s || (score == s && cand.tie_key() < b.tie_key()),
        };
        if better {
            best = Some((score, cand));
        }
    }
    let (score, cand) = best.ok_or_else(|| BenchError::Parameter(format!("case {interference_no} has no candidates")))?;
    Ok(ClaimPair {
        interference_no: interference_no.to_string(),
        claim_a: cand.claim_a.clone(),
        claim_b: cand.claim_b.clone(),
        selection_score: Some(score),
        partner_interference: None,
    })
}

/// For pair `i`, joins its `claim_a` with `claim_b` of a uniformly drawn pair `j ≠ i`.
pub fn make_random_pairs(true_pairs: &[ClaimPair], seed: u64) -> Result<Vec<ClaimPair>, BenchError> {
    let n = true_pairs.len();
    if n < 2 {
        return Err(BenchError::Parameter(format!(
            "random pairs need at least two interferences, got {n}"
        )));
    }
    let distinct: HashSet<&str> = true_pairs.iter().map(|p| p.interference_no.as_str()).collect();
    if distinct.len() != n {
        return Err(BenchError::Parameter("true pairs repeat an interference number".into()));
    }
    Ok(true_pairs
        .iter()
        .enumerate()
        .map(|(i, pair)| {
            let mut rng = stream_rng(seed, i as u64);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            ClaimPair {
                interference_no: pair.interference_no.clone(),
                claim_a: pair.claim_a.clone(),
                claim_b: true_pairs[j].claim_b.clone(),
                selection_score: None,
                partner_interference: Some(true_pairs[j].interference_no.clone()),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkDataset {
    pub true_pairs: Vec<ClaimPair>,
    pub random_pairs: Vec<ClaimPair>,
    pub seed: u64,
    pub reference: String,
}

/// Filters, selects one pair per case in parallel, and draws the random control set.
pub fn build_benchmark<T: Scalar, E: Embedder<T> + ?Sized>(
    raw: &[RawCase],
    claims: &ClaimsIndex,
    window: (i32, i32),
    reference: &E,
    reference_label: &str,
    seed: u64,
) -> Result<(BenchmarkDataset, Funnel), BenchError> {
    let (cases, funnel) = filter_cases(raw, claims, window);
    let true_pairs = cases
        .par_iter()
        .map(|case| {
            let candidates = enumerate_cross_pairs(case, claims)?;
            select_representative_pair(&case.interference_no, &candidates, reference)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let random_pairs = make_random_pairs(&true_pairs, seed)?;
    Ok((
        BenchmarkDataset {
            true_pairs,
            random_pairs,
            seed,
            reference: reference_label.to_string(),
        },
        funnel,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{ExternalVectors, HashingEmbedder};
    use crate::ingest::is_independent_claim;

    fn claim(pid: &str, seq: u32, text: &str) -> ClaimRecord {
        ClaimRecord {
            patent_id: pid.into(),
            claim_sequence: seq,
            text: text.into(),
            is_independent: is_independent_claim("", text),
        }
    }

    #[test]
    fn usable_claims_fixture() {
        let claims = vec![
            claim("A", 1, "A door comprising a panel."),
            claim("A", 2, "The door of claim 1 wherein the panel is glass."),
            claim("A", 3, "The door of claim 2 wherein the glass is tinted."),
            claim("A", 4, "The door as in claim 1 with a frame."),
            claim("A", 5, "1. (Canceled)"),
            claim("A", 6, "A window comprising a pane."),
            claim("A", 7, "A window comprising a pane."),
            claim("A", 8, "A hinge comprising a pin."),
        ];
        let usable = usable_claims(&claims);
        let seqs: Vec<u32> = usable.iter().map(|c| c.claim_sequence).collect();
        assert_eq!(seqs, [1, 6, 8]);
        // 3 dependent, 1 cancelled, 2 copies of one text, 2 clean
        assert_eq!(usable.len(), 3);
        assert!(usable_claims(&[claim("A", 1, "1. (canceled)")]).is_empty());
        assert!(usable_claims(&[claim("A", 1, "Cancelled claim text")]).is_empty());
    }

    fn raw(no: &str, apps: &[(&str, &str)]) -> RawCase {
        RawCase {
            interference_no: no.into(),
            applications: apps.iter().map(|(a, d)| (a.to_string(), parse_date(d))).collect(),
        }
    }

    fn fixture() -> (Vec<RawCase>, ClaimsIndex) {
        let raw = vec![
            raw("105001", &[("A1", "1999-05-01"), ("A2", "2003-01-01")]),
            raw("105002", &[("B1", "2005-01-01"), ("B2", "2005-02-01"), ("B3", "2006-01-01")]),
            raw("105003", &[("C1", "2008-01-01"), ("C2", "2008-03-01")]),
            raw("105004", &[("D1", "2010-01-01"), ("D2", "2011-01-01")]),
            raw("105005", &[("E1", "2014-12-31"), ("E2", "2001-01-01")]),
        ];
        let claims = ClaimsIndex::from_claims(vec![
            claim("A1", 1, "A lever arm."),
            claim("A2", 1, "A lever arm with a pivot."),
            claim("B1", 1, "A pump."),
            claim("B2", 1, "A pump housing."),
            claim("B3", 1, "A pump seal."),
            claim("C1", 1, "A circuit board."),
            claim("C2", 1, "The board of claim 1."),
            claim("D1", 1, "A rotor blade made of carbon."),
            claim("D1", 2, "A rotor hub with bearings."),
            claim("D1", 3, "The blade of claim 1, tapered."),
            claim("D2", 1, "A rotor blade of carbon fibre."),
            claim("D2", 2, "A turbine tower."),
            claim("D2", 3, "A nacelle housing a generator."),
            claim("E1", 1, "A battery cell."),
            claim("E2", 1, "A battery cell with an anode."),
        ]);
        (raw, claims)
    }

    #[test]
    fn five_case_fixture() {
        let (raw, claims) = fixture();
        let (cases, funnel) = filter_cases(&raw, &claims, DEFAULT_WINDOW);
        let kept: Vec<&str> = cases.iter().map(|c| c.interference_no.as_str()).collect();
        assert_eq!(kept, ["105004", "105005"]);
        assert_eq!((funnel.out_of_window, funnel.multiparty, funnel.no_claims), (1, 1, 1));
        assert_eq!((funnel.raw_cases, funnel.in_window, funnel.kept), (5, 4, 2));
        assert_eq!(funnel.in_window_applications, 9);
        assert_eq!((funnel.kept_applications, funnel.usable_claims, funnel.candidate_pairs), (4, 7, 7));
        let pairs = enumerate_cross_pairs(&cases[0], &claims).unwrap();
        assert_eq!(pairs.len(), 2 * 3);
    }

    #[test]
    fn empty_table_is_not_an_error() {
        let (cases, funnel) = filter_cases(&[], &ClaimsIndex::default(), DEFAULT_WINDOW);
        assert!(cases.is_empty());
        assert_eq!(funnel, Funnel::default());
    }

    #[test]
    fn cross_pairs_need_two_populated_applications() {
        let (_, claims) = fixture();
        let bad = InterferenceCase {
            interference_no: "x".into(),
            application_ids: vec!["C1".into(), "C2".into()],
            filing_dates: vec![],
        };
        assert!(matches!(enumerate_cross_pairs(&bad, &claims), Err(BenchError::Internal(_))));
    }

    fn unit(angle_cos: f64) -> DenseVector<f64> {
        DenseVector::new(vec![angle_cos, (1.0 - angle_cos * angle_cos).sqrt()]).unwrap()
    }

    #[test]
    fn selection_follows_reference_cosines() {
        let a = claim("P1", 1, "alpha");
        let cands: Vec<Candidate> = (1..=3)
            .map(|s| Candidate {
                claim_a: a.clone(),
                claim_b: claim("P2", s, &format!("beta {s}")),
            })
            .collect();
        let mut vecs = ExternalVectors::new(2, "hand-set");
        vecs.insert("P1:1", unit(1.0)).unwrap();
        for (s, c) in [(1, 0.41), (2, 0.87), (3, 0.55)] {
            vecs.insert(format!("P2:{s}"), unit(c)).unwrap();
        }
        let pair = select_representative_pair("9", &cands, &vecs).unwrap();
        assert_eq!(pair.claim_b.claim_sequence, 2);
        assert!((pair.selection_score.unwrap() - 0.87).abs() < 1e-12);
        let single = select_representative_pair("9", &cands[..1], &vecs).unwrap();
        assert_eq!(single.claim_b.claim_sequence, 1);
    }

    #[test]
    fn ties_go_to_the_smallest_tuple() {
        let cands = vec![
            Candidate { claim_a: claim("P1", 2, "same text"), claim_b: claim("P2", 1, "same text") },
            Candidate { claim_a: claim("P1", 1, "same text"), claim_b: claim("P2", 3, "same text") },
            Candidate { claim_a: claim("P1", 1, "same text"), claim_b: claim("P2", 2, "same text") },
        ];
        let stub = HashingEmbedder::new(16, 0).unwrap();
        let pair = select_representative_pair::<f64, _>("7", &cands, &stub).unwrap();
        assert_eq!((pair.claim_a.claim_sequence, pair.claim_b.claim_sequence), (1, 2));
    }

    #[test]
    fn embedding_failure_names_the_claim() {
        let cands = vec![Candidate { claim_a: claim("P1", 1, "x"), claim_b: claim("P2", 4, "y") }];
        let mut vecs = ExternalVectors::<f64>::new(2, "partial");
        vecs.insert("P1:1", unit(1.0)).unwrap();
        let err = select_representative_pair("7", &cands, &vecs).unwrap_err();
        assert!(matches!(err, BenchError::Selection { ref claim_id, .. } if claim_id == "P2:4"));
    }

    fn true_pairs(n: usize) -> Vec<ClaimPair> {
        (0..n)
            .map(|i| ClaimPair {
                interference_no: format!("{}", 100_000 + i),
                claim_a: claim(&format!("A{i}"), 1, "a"),
                claim_b: claim(&format!("B{i}"), 1, "b"),
                selection_score: Some(0.5),
                partner_interference: None,
            })
            .collect()
    }

    #[test]
    fn random_pairs_cross_interferences() {
        let two = make_random_pairs(&true_pairs(2), 3).unwrap();
        assert_eq!(two[0].claim_b.patent_id, "B1");
        assert_eq!(two[1].claim_b.patent_id, "B0");
        let tp = true_pairs(133);
        let r = make_random_pairs(&tp, 11).unwrap();
        assert_eq!(r.len(), 133);
        for (p, t) in r.iter().zip(&tp) {
            assert_eq!(p.claim_a, t.claim_a);
            let partner = p.partner_interference.as_deref().unwrap();
            assert_ne!(partner, p.interference_no);
            let j = partner.parse::<usize>().unwrap() - 100_000;
            assert_eq!(p.claim_b, tp[j].claim_b);
        }
        assert_eq!(r, make_random_pairs(&tp, 11).unwrap());
        assert_ne!(r, make_random_pairs(&tp, 12).unwrap());
        assert!(make_random_pairs(&true_pairs(1), 0).is_err());
    }

    #[test]
    fn reference_changes_selection_not_counts() {
        let (raw, claims) = fixture();
        let h1 = HashingEmbedder::new(8, 1).unwrap();
        let h2 = HashingEmbedder::new(8, 2).unwrap();
        let (b1, f1) = build_benchmark::<f64, _>(&raw, &claims, DEFAULT_WINDOW, &h1, "h1", 5).unwrap();
        let (b2, f2) = build_benchmark::<f64, _>(&raw, &claims, DEFAULT_WINDOW, &h2, "h2", 5).unwrap();
        assert_eq!(f1, f2);
        assert_eq!(b1.true_pairs.len(), 2);
        assert_eq!(b2.true_pairs.len(), 2);
        assert_eq!(b1.random_pairs.len(), 2);
    }

    #[test]
    fn case_file_tab_and_comma() {
        let tsv = "interference_no\tapplication_id\tfiling_date\n105004\tD2\t2011-01-01\n105004\tD1\t2010-01-01\n\
                   105004\tD1\t2010-01-01\n\tX\t2010-01-01\n105009\tQ\n";
        let (cases, stats) = read_cases(tsv.as_bytes(), &CaseColumns::default()).unwrap();
        assert_eq!(cases.len(), 1);
        assert_eq!(cases[0].applications.len(), 2);
        assert_eq!(cases[0].applications[0].0, "D1");
        assert_eq!(stats, ParseStats { read: 5, yielded: 3, malformed: 2 });
        let csv_cols = CaseColumns { delimiter: ',', interference_no: "no".into(), ..CaseColumns::default() };
        let csv_text = "no,application_id,filing_date\n\"105001\",A,2002-01-01\n105001,B,bad\n";
        let (cases, _) = read_cases(csv_text.as_bytes(), &csv_cols).unwrap();
        assert_eq!(cases[0].applications[1], ("B".to_string(), None));
        assert!(matches!(
            read_cases("a\tb\n".as_bytes(), &CaseColumns::default()),
            Err(BenchError::MissingColumn(c)) if c == "interference_no"
        ));
    }
}
