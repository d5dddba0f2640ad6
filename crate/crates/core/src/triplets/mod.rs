//! Anchor/positive pairs from CPC-by-year groups, random out-of-class
//! negatives, and the seeded sample and train/validation split.

mod file;

pub use file::{
    read_index_file, read_triplets, write_index_file, write_triplets, SplitManifest, TRIPLETS_MAGIC,
};

use std::borrow::Cow;
use std::collections::{btree_map, BTreeMap, HashMap};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{PatentCorpus, PatentRecord};
use crate::seed::stream_rng;

#[derive(Debug, Error)]
pub enum TripletError {
    #[error("unsatisfiable negative: no patent outside `{cpc_symbol}` for anchor `{anchor_id}`")]
    UnsatisfiableNegative { anchor_id: String, cpc_symbol: String },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("triplet file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupKey {
    pub cpc_symbol: String,
    pub filing_year: i32,
}

impl GroupKey {
    pub fn of(record: &PatentRecord) -> Self {
        Self {
            cpc_symbol: record.cpc_symbol(),
            filing_year: record.filing_year(),
        }
    }
}

/// Groups of at least two patents sharing a [`GroupKey`], members in ascending id order.
#[derive(Debug, Clone, Default)]
pub struct Groups<'a> {
    groups: BTreeMap<GroupKey, Vec<&'a PatentRecord>>,
}

impl<'a> Groups<'a> {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn get(&self, key: &GroupKey) -> Option<&[&'a PatentRecord]> {
        self.groups.get(key).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupKey, &[&'a PatentRecord])> {
        self.groups.iter().map(|(k, v)| (k, v.as_slice()))
    }

    /// Patents retained in some group.
    pub fn patent_count(&self) -> usize {
        self.groups.values().map(Vec::len).sum()
    }

    /// Σ C(n_g, 2), the pair count before continuations are removed.
    pub fn combination_count(&self) -> u64 {
        self.groups
            .values()
            .map(|g| {
                let n = g.len() as u64;
                n * (n - 1) / 2
            })
            .sum()
    }
}

pub fn group_corpus(corpus: &PatentCorpus) -> Groups<'_> {
    let mut all: BTreeMap<GroupKey, Vec<&PatentRecord>> = BTreeMap::new();
    for record in corpus.records() {
        all.entry(GroupKey::of(record)).or_default().push(record);
    }
    all.retain(|_, members| members.len() >= 2);
    Groups { groups: all }
}

/// Anchor and positive of one within-group pair; `anchor.patent_id < positive.patent_id`.
#[derive(Debug, Clone, Copy)]
pub struct PatentPair<'a> {
    pub anchor: &'a PatentRecord,
    pub positive: &'a PatentRecord,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCounts {
    /// Within-group combinations visited.
    pub combinations: u64,
    /// Combinations skipped because both abstracts are identical.
    pub continuations: u64,
}

impl PairCounts {
    pub fn emitted(&self) -> u64 {
        self.combinations - self.continuations
    }
}

/// Lazy within-group pair enumeration in (group key, anchor, positive) order.
pub struct Pairs<'g, 'a> {
    groups: btree_map::Values<'g, GroupKey, Vec<&'a PatentRecord>>,
    current: &'g [&'a PatentRecord],
    i: usize,
    j: usize,
    counts: PairCounts,
}

impl Pairs<'_, '_> {
    /// Counts so far; final once the iterator is exhausted.
    pub fn counts(&self) -> PairCounts {
        self.counts
    }
}

impl<'a> Iterator for Pairs<'_, 'a> {
    type Item = PatentPair<'a>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let n = self.current.len();
            if self.i + 1 < n {
                let (i, j) = (self.i, self.j);
                self.j += 1;
                if self.j == n {
                    self.i += 1;
                    self.j = self.i + 1;
                }
                self.counts.combinations += 1;
                let (a, b) = (self.current[i], self.current[j]);
                if a.abstract_text == b.abstract_text {
                    self.counts.continuations += 1;
                    continue;
                }
                return Some(PatentPair { anchor: a, positive: b });
            }
            self.current = self.groups.next()?;
            self.i = 0;
            self.j = 1;
        }
    }
}

pub fn enumerate_pairs<'g, 'a>(groups: &'g Groups<'a>) -> Pairs<'g, 'a> {
    Pairs {
        groups: groups.groups.values(),
        current: &[],
        i: 0,
        j: 1,
        counts: PairCounts::default(),
    }
}

/// Same sequence as [`enumerate_pairs`], built group-parallel.
pub fn enumerate_pairs_par<'a>(groups: &Groups<'a>) -> (Vec<PatentPair<'a>>, PairCounts) {
    let per_group: Vec<(Vec<PatentPair<'a>>, PairCounts)> = groups
        .groups
        .par_iter()
        .map(|(key, members)| {
            let single = Groups {
                groups: BTreeMap::from([(key.clone(), members.clone())]),
            };
            let mut it = enumerate_pairs(&single);
            let pairs: Vec<_> = it.by_ref().collect();
            (pairs, it.counts())
        })
        .collect();
    let mut counts = PairCounts::default();
    let mut pairs = Vec::new();
    for (group_pairs, c) in per_group {
        counts.combinations += c.combinations;
        counts.continuations += c.continuations;
        pairs.extend(group_pairs);
    }
    (pairs, counts)
}

/// One training example. Texts are borrowed from the corpus when built in
/// memory and owned when read back from a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triplet<'a> {
    pub anchor_id: Cow<'a, str>,
    pub positive_id: Cow<'a, str>,
    pub negative_id: Cow<'a, str>,
    pub anchor_text: Cow<'a, str>,
    pub positive_text: Cow<'a, str>,
    pub negative_text: Cow<'a, str>,
}

impl Triplet<'_> {
    pub fn into_owned(self) -> Triplet<'static> {
        Triplet {
            anchor_id: Cow::Owned(self.anchor_id.into_owned()),
            positive_id: Cow::Owned(self.positive_id.into_owned()),
            negative_id: Cow::Owned(self.negative_id.into_owned()),
            anchor_text: Cow::Owned(self.anchor_text.into_owned()),
            positive_text: Cow::Owned(self.positive_text.into_owned()),
            negative_text: Cow::Owned(self.negative_text.into_owned()),
        }
    }
}

/// Corpus records sorted by (CPC symbol, id), so the candidates for any
/// anchor are everything outside one contiguous range.
pub struct NegativeIndex<'a> {
    records: Vec<&'a PatentRecord>,
    ranges: HashMap<String, (usize, usize)>,
}

impl<'a> NegativeIndex<'a> {
    pub fn new(corpus: &'a PatentCorpus) -> Self {
        let mut keyed: Vec<(String, &PatentRecord)> = corpus.records().map(|r| (r.cpc_symbol(), r)).collect();
        keyed.sort_by(|a, b| (&a.0, &a.1.patent_id).cmp(&(&b.0, &b.1.patent_id)));
        let mut ranges: HashMap<String, (usize, usize)> = HashMap::new();
        for (i, (symbol, _)) in keyed.iter().enumerate() {
            ranges.entry(symbol.clone()).and_modify(|r| r.1 = i + 1).or_insert((i, i + 1));
        }
        Self {
            records: keyed.into_iter().map(|(_, r)| r).collect(),
            ranges,
        }
    }

    /// Number of patents whose symbol differs from `symbol`.
    pub fn eligible(&self, symbol: &str) -> usize {
        let excluded = self.ranges.get(symbol).map_or(0, |(s, e)| e - s);
        self.records.len() - excluded
    }

    /// Uniform draw from the patents outside `symbol`.
    pub fn sample<R: Rng + ?Sized>(&self, symbol: &str, rng: &mut R) -> Option<&'a PatentRecord> {
        let (start, end) = self.ranges.get(symbol).copied().unwrap_or((0, 0));
        let eligible = self.records.len() - (end - start);
        if eligible == 0 {
            return None;
        }
        let mut r = rng.random_range(0..eligible);
        if r >= start {
            r += end - start;
        }
        Some(self.records[r])
    }

    /// Negative for the pair at position `index` of the pair sequence.
    pub fn triplet(&self, pair: PatentPair<'a>, seed: u64, index: u64) -> Result<Triplet<'a>, TripletError> {
        let symbol = pair.anchor.cpc_symbol();
        let mut rng = stream_rng(seed, index);
        let negative = self
            .sample(&symbol, &mut rng)
            .ok_or_else(|| TripletError::UnsatisfiableNegative {
                anchor_id: pair.anchor.patent_id.clone(),
                cpc_symbol: symbol,
            })?;
        Ok(Triplet {
            anchor_id: Cow::Borrowed(&pair.anchor.patent_id),
            positive_id: Cow::Borrowed(&pair.positive.patent_id),
            negative_id: Cow::Borrowed(&negative.patent_id),
            anchor_text: Cow::Borrowed(&pair.anchor.abstract_text),
            positive_text: Cow::Borrowed(&pair.positive.abstract_text),
            negative_text: Cow::Borrowed(&negative.abstract_text),
        })
    }
}

/// Lazily attaches one negative per pair. Pair `i` draws from stream `i` of `seed`.
pub fn attach_negatives<'i, 'a: 'i, I>(
    pairs: I,
    index: &'i NegativeIndex<'a>,
    seed: u64,
) -> impl Iterator<Item = Result<Triplet<'a>, TripletError>> + 'i
where
    I: IntoIterator<Item = PatentPair<'a>>,
    I::IntoIter: 'i,
{
    pairs
        .into_iter()
        .enumerate()
        .map(move |(i, pair)| index.triplet(pair, seed, i as u64))
}

/// Bit-identical to collecting [`attach_negatives`].
pub fn attach_negatives_par<'a>(
    pairs: &[PatentPair<'a>],
    index: &NegativeIndex<'a>,
    seed: u64,
) -> Result<Vec<Triplet<'a>>, TripletError> {
    pairs
        .par_iter()
        .enumerate()
        .map(|(i, pair)| index.triplet(*pair, seed, i as u64))
        .collect()
}

/// Sample and split proportions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub sample_fraction: f64,
    pub train_fraction: f64,
    pub validation_fraction: f64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            sample_fraction: 0.10,
            train_fraction: 0.70,
            validation_fraction: 0.30,
        }
    }
}

impl SplitConfig {
    pub fn validate(&self) -> Result<(), TripletError> {
        for (name, v) in [
            ("sample_fraction", self.sample_fraction),
            ("train_fraction", self.train_fraction),
            ("validation_fraction", self.validation_fraction),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(TripletError::Parameter(format!("{name}={v} is outside (0, 1]")));
            }
        }
        if (self.train_fraction + self.validation_fraction - 1.0).abs() > 1e-9 {
            return Err(TripletError::Parameter(format!(
                "train_fraction + validation_fraction = {} (expected 1)",
                self.train_fraction + self.validation_fraction
            )));
        }
        Ok(())
    }
}

/// Sorted triplet indices of the sampled train and validation sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub total: usize,
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub seed: u64,
}

impl SplitPlan {
    pub fn sampled(&self) -> usize {
        self.train.len() + self.validation.len()
    }
}

/// Samples ⌊fraction·n⌋ of `total` indices without replacement, then gives
/// round(train_fraction·k) of them to training and the rest to validation.
pub fn plan_split(total: usize, config: &SplitConfig, seed: u64) -> Result<SplitPlan, TripletError> {
    config.validate()?;
    let k = ((config.sample_fraction * total as f64) + 1e-9).floor() as usize;
    let k = k.min(total);
    let n_train = ((config.train_fraction * k as f64).round() as usize).min(k);
    let mut rng = stream_rng(seed, 0);
    let mut order: Vec<usize> = (0..total).collect();
    for i in 0..k {
        let j = rng.random_range(i..total);
        order.swap(i, j);
    }
    let mut train = order[..n_train].to_vec();
    let mut validation = order[n_train..k].to_vec();
    train.sort_unstable();
    validation.sort_unstable();
    Ok(SplitPlan {
        total,
        train,
        validation,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripletSplit<T> {
    pub train: Vec<T>,
    pub validation: Vec<T>,
    pub plan: SplitPlan,
}

pub fn sample_and_split<T: Clone>(items: &[T], config: &SplitConfig, seed: u64) -> Result<TripletSplit<T>, TripletError> {
    let plan = plan_split(items.len(), config, seed)?;
    Ok(TripletSplit {
        train: plan.train.iter().map(|&i| items[i].clone()).collect(),
        validation: plan.validation.iter().map(|&i| items[i].clone()).collect(),
        plan,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{build_clean_corpus, parse_date, ApplicationRow, AssignmentType, CpcAssignment, PatentRow, PatentType};
    use proptest::prelude::*;

    /// (id, symbol, year, abstract)
    fn corpus(rows: &[(&str, &str, i32, &str)]) -> PatentCorpus {
        let cpc = rows
            .iter()
            .map(|(id, sym, _, _)| CpcAssignment::from_symbol(id, sym, AssignmentType::Inventional).unwrap());
        let apps = rows.iter().map(|(id, _, y, _)| ApplicationRow {
            patent_id: id.to_string(),
            filing_date: parse_date(&format!("{y}-06-01")).unwrap(),
        });
        let pats = rows.iter().map(|(id, _, _, text)| PatentRow {
            patent_id: id.to_string(),
            patent_type: PatentType::Utility,
            abstract_text: text.to_string(),
        });
        build_clean_corpus(cpc, apps, pats).unwrap()
    }

    #[test]
    fn grouping_fixture() {
        let c = corpus(&[
            ("A", "A01B1/00", 2010, "a"),
            ("B", "A01B1/00", 2010, "b"),
            ("C", "A01B1/00", 2010, "c"),
            ("D", "H04L9/32", 2011, "d"),
            ("E", "H04L9/32", 2011, "e"),
            ("F", "H04L9/32", 2012, "f"),
        ]);
        let g = group_corpus(&c);
        let ids = |k: GroupKey| -> Vec<&str> { g.get(&k).unwrap().iter().map(|r| r.patent_id.as_str()).collect() };
        assert_eq!(g.len(), 2);
        assert_eq!(ids(GroupKey { cpc_symbol: "A01B1/00".into(), filing_year: 2010 }), ["A", "B", "C"]);
        assert_eq!(ids(GroupKey { cpc_symbol: "H04L9/32".into(), filing_year: 2011 }), ["D", "E"]);
        assert_eq!(g.patent_count(), 5);
    }

    #[test]
    fn singletons_leave_no_groups() {
        let c = corpus(&[("A", "A01B1/00", 2010, "a"), ("B", "A01B1/00", 2011, "b"), ("C", "A01B1/01", 2010, "c")]);
        assert!(group_corpus(&c).is_empty());
    }

    #[test]
    fn pairs_are_canonical_and_continuations_counted() {
        let c = corpus(&[
            ("P4", "A01B1/00", 2010, "same"),
            ("P1", "A01B1/00", 2010, "one"),
            ("P3", "A01B1/00", 2010, "same"),
            ("P2", "A01B1/00", 2010, "two"),
        ]);
        let g = group_corpus(&c);
        let mut it = enumerate_pairs(&g);
        let pairs: Vec<(&str, &str)> = it
            .by_ref()
            .map(|p| (p.anchor.patent_id.as_str(), p.positive.patent_id.as_str()))
            .collect();
        assert_eq!(pairs.len(), 5);
        assert!(pairs.iter().all(|(a, p)| a < p));
        assert!(!pairs.contains(&("P3", "P4")));
        assert_eq!(it.counts(), PairCounts { combinations: 6, continuations: 1 });
        let (par, counts) = enumerate_pairs_par(&g);
        assert_eq!(counts, it.counts());
        assert_eq!(par.len(), 5);
    }

    #[test]
    fn only_negative_candidate_is_chosen() {
        let c = corpus(&[("A", "A01B1/00", 2010, "a"), ("B", "A01B1/00", 2010, "b"), ("C", "B62D5/04", 2010, "c")]);
        let g = group_corpus(&c);
        let idx = NegativeIndex::new(&c);
        for seed in 0..20 {
            let t: Vec<_> = attach_negatives(enumerate_pairs(&g), &idx, seed).collect::<Result<_, _>>().unwrap();
            assert_eq!(t.len(), 1);
            assert_eq!(t[0].negative_id, "C");
            assert_eq!(t[0].negative_text, "c");
        }
    }

    #[test]
    fn single_symbol_corpus_is_unsatisfiable() {
        let c = corpus(&[("A", "A01B1/00", 2010, "a"), ("B", "A01B1/00", 2010, "b")]);
        let g = group_corpus(&c);
        let idx = NegativeIndex::new(&c);
        let err = attach_negatives(enumerate_pairs(&g), &idx, 1).next().unwrap().unwrap_err();
        assert!(matches!(err, TripletError::UnsatisfiableNegative { ref anchor_id, .. } if anchor_id == "A"));
    }

    /// Ten classes: class 0 holds 46 same-year patents (1,035 pairs), classes
    /// 1 to 9 hold 1 to 9 patents. Negatives for class-0 anchors must follow
    /// the class sizes of classes 1 to 9.
    #[test]
    fn negatives_are_uniform_over_eligible_patents() {
        let mut rows = Vec::new();
        for i in 0..46 {
            rows.push((format!("Z{i:03}"), "A01B1/00".to_string(), format!("zero {i}")));
        }
        for class in 1..=9 {
            for i in 0..class {
                rows.push((format!("C{class}_{i}"), format!("B{:02}C1/00", class), format!("c{class} {i}")));
            }
        }
        let refs: Vec<(&str, &str, i32, &str)> =
            rows.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), 2005, c.as_str())).collect();
        let c = corpus(&refs);
        let g = group_corpus(&c);
        let idx = NegativeIndex::new(&c);
        let class0 = GroupKey { cpc_symbol: "A01B1/00".into(), filing_year: 2005 };
        let pairs: Vec<_> = enumerate_pairs(&g).filter(|p| GroupKey::of(p.anchor) == class0).take(1000).collect();
        assert_eq!(pairs.len(), 1000);
        let triplets = attach_negatives_par(&pairs, &idx, 99).unwrap();
        let mut observed = [0f64; 10];
        for t in &triplets {
            assert!(!t.negative_id.starts_with('Z'));
            let class: usize = t.negative_id[1..].split('_').next().unwrap().parse().unwrap();
            observed[class] += 1.0;
        }
        let eligible: f64 = (1..=9).map(|k| k as f64).sum();
        let chi2: f64 = (1..=9)
            .map(|k| {
                let expected = 1000.0 * k as f64 / eligible;
                (observed[k] - expected).powi(2) / expected
            })
            .sum();
        let df = 8.0f64;
        assert!(chi2 < df + 3.0 * (2.0 * df).sqrt(), "chi2={chi2}");
    }

    #[test]
    fn split_arithmetic() {
        let items: Vec<usize> = (0..100).collect();
        let s = sample_and_split(&items, &SplitConfig::default(), 7).unwrap();
        assert_eq!((s.train.len(), s.validation.len()), (7, 3));
        let full = SplitConfig { sample_fraction: 1.0, ..SplitConfig::default() };
        let s = sample_and_split(&items, &full, 7).unwrap();
        let mut all: Vec<usize> = s.train.iter().chain(&s.validation).copied().collect();
        all.sort_unstable();
        assert_eq!(all, items);
        assert_eq!(s.train.len(), 70);
    }

    #[test]
    fn split_parameters_are_checked() {
        let bad = |sample, train, val| {
            plan_split(10, &SplitConfig { sample_fraction: sample, train_fraction: train, validation_fraction: val }, 0)
                .is_err()
        };
        assert!(bad(0.0, 0.7, 0.3));
        assert!(bad(1.5, 0.7, 0.3));
        assert!(bad(0.1, 0.7, 0.4));
        assert!(bad(0.1, f64::NAN, 0.3));
        assert!(!bad(0.1, 0.7, 0.3));
    }

    fn ln_choose(n: u64, k: u64) -> f64 {
        (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
    }

    /// Overlap between two independent samples of k from N is hypergeometric.
    #[test]
    fn sample_overlap_matches_hypergeometric() {
        let (n, k) = (50u64, 10u64);
        let config = SplitConfig { sample_fraction: 0.2, ..SplitConfig::default() };
        let pmf: Vec<f64> = (0..=k)
            .map(|x| (ln_choose(k, x) + ln_choose(n - k, k - x) - ln_choose(n, k)).exp())
            .collect();
        assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let trials = 4000u64;
        let mut hist = vec![0f64; k as usize + 1];
        for t in 0..trials {
            let a = plan_split(n as usize, &config, 2 * t).unwrap();
            let b = plan_split(n as usize, &config, 2 * t + 1).unwrap();
            let sa: std::collections::HashSet<usize> = a.train.iter().chain(&a.validation).copied().collect();
            let overlap = b.train.iter().chain(&b.validation).filter(|i| sa.contains(i)).count();
            hist[overlap] += 1.0;
        }
        // chi-square over bins with expected count >= 5, the tail pooled
        let (mut chi2, mut bins, mut tail_obs, mut tail_exp) = (0.0, 0, 0.0, 0.0);
        for (x, p) in pmf.iter().enumerate() {
            let expected = p * trials as f64;
            if expected >= 5.0 {
                chi2 += (hist[x] - expected).powi(2) / expected;
                bins += 1;
            } else {
                tail_obs += hist[x];
                tail_exp += expected;
            }
        }
        if tail_exp > 0.0 {
            chi2 += (tail_obs - tail_exp).powi(2) / tail_exp;
            bins += 1;
        }
        let df = (bins - 1) as f64;
        assert!(chi2 < df + 4.0 * (2.0 * df).sqrt(), "chi2={chi2} df={df}");
    }

    proptest! {
        #[test]
        fn pair_count_matches_double_loop(rows in prop::collection::vec((0u8..4, 0i32..3, 0u8..6), 0..60)) {
            let owned: Vec<(String, String, i32, String)> = rows
                .iter()
                .enumerate()
                .map(|(i, (s, y, t))| (format!("P{i:03}"), format!("A0{s}B1/00"), 2000 + y, format!("text {t}")))
                .collect();
            let refs: Vec<_> = owned.iter().map(|(a, b, y, c)| (a.as_str(), b.as_str(), *y, c.as_str())).collect();
            let c = corpus(&refs);
            let recs: Vec<_> = c.records().collect();
            let mut expected = 0u64;
            for i in 0..recs.len() {
                for j in i + 1..recs.len() {
                    if GroupKey::of(recs[i]) == GroupKey::of(recs[j]) && recs[i].abstract_text != recs[j].abstract_text {
                        expected += 1;
                    }
                }
            }
            let g = group_corpus(&c);
            let mut it = enumerate_pairs(&g);
            let n = it.by_ref().count() as u64;
            prop_assert_eq!(n, expected);
            prop_assert_eq!(it.counts().combinations, g.combination_count());
        }

        #[test]
        fn triplet_invariants_hold(rows in prop::collection::vec((0u8..3, 0i32..2), 3..40), seed in any::<u64>()) {
            let owned: Vec<(String, String, i32, String)> = rows
                .iter()
                .enumerate()
                .map(|(i, (s, y))| (format!("P{i:03}"), format!("A0{s}B1/00"), 2000 + y, format!("text {i}")))
                .collect();
            let refs: Vec<_> = owned.iter().map(|(a, b, y, c)| (a.as_str(), b.as_str(), *y, c.as_str())).collect();
            let c = corpus(&refs);
            let g = group_corpus(&c);
            let idx = NegativeIndex::new(&c);
            let pairs: Vec<_> = enumerate_pairs(&g).collect();
            let serial: Vec<_> = attach_negatives(pairs.iter().copied(), &idx, seed).collect();
            let symbols: std::collections::HashSet<String> = c.records().map(|r| r.cpc_symbol()).collect();
            if symbols.len() < 2 {
                prop_assert!(serial.iter().all(|t| t.is_err()));
            } else {
                let serial: Vec<_> = serial.into_iter().collect::<Result<_, _>>().unwrap();
                prop_assert_eq!(&serial, &attach_negatives_par(&pairs, &idx, seed).unwrap());
                for t in &serial {
                    let (a, p, n) = (c.get(&t.anchor_id).unwrap(), c.get(&t.positive_id).unwrap(), c.get(&t.negative_id).unwrap());
                    prop_assert_eq!(GroupKey::of(a), GroupKey::of(p));
                    prop_assert_ne!(a.cpc_symbol(), n.cpc_symbol());
                    prop_assert_ne!(&t.anchor_text, &t.positive_text);
                    prop_assert!(t.anchor_id != t.negative_id && t.positive_id != t.negative_id && t.anchor_id < t.positive_id);
                }
            }
        }
    }
}
