use std::collections::{HashMap, HashSet};

use super::EmbedError;

/// Token table with corpus and document frequencies.
///
/// Indices are dense in `[0, len)` and ordered by descending corpus
/// frequency, ties broken by the token itself, so construction does not
/// depend on document order.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    counts: Vec<u64>,
    doc_freqs: Vec<u64>,
    min_count: u64,
    n_docs: u64,
}

impl Vocabulary {
    pub fn build<D, S>(docs: &[D], min_count: u64) -> Result<Self, EmbedError>
    where
        D: AsRef<[S]>,
        S: AsRef<str>,
    {
        let mut counts: HashMap<&str, (u64, u64)> = HashMap::new();
        for doc in docs {
            let mut seen = HashSet::new();
            for token in doc.as_ref() {
                let token = token.as_ref();
                let entry = counts.entry(token).or_default();
                entry.0 += 1;
                if seen.insert(token) {
                    entry.1 += 1;
                }
            }
        }
        let mut kept: Vec<(&str, u64, u64)> = counts
            .into_iter()
            .filter(|&(_, (cf, _))| cf >= min_count)
            .map(|(t, (cf, df))| (t, cf, df))
            .collect();
        if kept.is_empty() {
            return Err(EmbedError::EmptyVocabulary);
        }
        kept.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let entries = kept
            .into_iter()
            .map(|(t, cf, df)| (t.to_string(), cf, df))
            .collect();
        Self::from_entries(entries, min_count, docs.len() as u64)
    }

    /// Rebuilds a vocabulary from `(token, corpus_freq, doc_freq)` in index order.
    pub fn from_entries(
        entries: Vec<(String, u64, u64)>,
        min_count: u64,
        n_docs: u64,
    ) -> Result<Self, EmbedError> {
        if entries.is_empty() {
            return Err(EmbedError::EmptyVocabulary);
        }
        let mut tokens = Vec::with_capacity(entries.len());
        let mut counts = Vec::with_capacity(entries.len());
        let mut doc_freqs = Vec::with_capacity(entries.len());
        let mut index = HashMap::with_capacity(entries.len());
        for (i, (token, cf, df)) in entries.into_iter().enumerate() {
            if index.insert(token.clone(), i).is_some() {
                return Err(EmbedError::Parameter(format!("duplicate token `{token}`")));
            }
            tokens.push(token);
            counts.push(cf);
            doc_freqs.push(df);
        }
        Ok(Self {
            tokens,
            index,
            counts,
            doc_freqs,
            min_count,
            n_docs,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, index: usize) -> &str {
        &self.tokens[index]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts[index]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn doc_freq(&self, index: usize) -> u64 {
        self.doc_freqs[index]
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    /// Number of documents the frequencies were collected over.
    pub fn n_docs(&self) -> u64 {
        self.n_docs
    }

    /// Token indices of `tokens`, out-of-vocabulary entries dropped.
    pub fn encode<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<usize> {
        tokens
            .iter()
            .filter_map(|t| self.index_of(t.as_ref()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs() -> Vec<Vec<&'static str>> {
        vec![
            vec!["door", "glass", "door"],
            vec!["glass", "panel"],
            vec!["rare"],
        ]
    }

    #[test]
    fn frequencies_and_order() {
        let vocab = Vocabulary::build(&docs(), 1).unwrap();
        assert_eq!(vocab.tokens(), &["door", "glass", "panel", "rare"]);
        let door = vocab.index_of("door").unwrap();
        assert_eq!((vocab.count(door), vocab.doc_freq(door)), (2, 1));
        let glass = vocab.index_of("glass").unwrap();
        assert_eq!((vocab.count(glass), vocab.doc_freq(glass)), (2, 2));
        assert_eq!(vocab.n_docs(), 3);
    }

    #[test]
    fn min_count_filters() {
        let vocab = Vocabulary::build(&docs(), 2).unwrap();
        assert_eq!(vocab.len(), 2);
        assert!(vocab.counts().iter().all(|&c| c >= 2));
        assert_eq!(vocab.encode(&["rare", "glass", "door"]), vec![1, 0]);
    }

    #[test]
    fn empty_vocabulary_is_an_error() {
        let empty: Vec<Vec<&str>> = vec![vec![]];
        assert!(matches!(Vocabulary::build(&empty, 1), Err(EmbedError::EmptyVocabulary)));
        assert!(matches!(Vocabulary::build(&docs(), 10), Err(EmbedError::EmptyVocabulary)));
    }

    #[test]
    fn independent_of_document_order() {
        let mut reversed = docs();
        reversed.reverse();
        assert_eq!(
            Vocabulary::build(&docs(), 1).unwrap(),
            Vocabulary::build(&reversed, 1).unwrap()
        );
    }
}
