//! Skip-gram word vectors pooled into document vectors with TF-IDF weights.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::sgns::{run_epochs, sgns_step, EpochPlan, LrSchedule, NegativeSampler, Params, TrainReport};
use super::vocab::Vocabulary;
use super::{DenseVector, EmbedError, Embedder, TextRef};
use crate::scalar::{axpy, Scalar};
use crate::seed::stream_rng;
use crate::text::tokenize;

/// Which inverse-document-frequency formula weights the pooled vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdfVariant {
    /// `ln((1 + N) / (1 + df)) + 1`
    #[default]
    Smoothed,
    /// `ln(N / df)`; an unseen token counts as `df = 1`.
    RawLog,
}

pub fn idf_value(variant: IdfVariant, n_docs: u64, df: u64) -> f64 {
    let n = n_docs as f64;
    match variant {
        IdfVariant::Smoothed => ((1.0 + n) / (1.0 + df as f64)).ln() + 1.0,
        IdfVariant::RawLog => (n / df.max(1) as f64).ln(),
    }
}

/// Document frequencies of a corpus, queried for idf of any token.
#[derive(Debug, Clone, PartialEq)]
pub struct IdfTable {
    variant: IdfVariant,
    n_docs: u64,
    doc_freqs: HashMap<String, u64>,
}

impl IdfTable {
    pub fn idf(&self, token: &str) -> f64 {
        let df = self.doc_freqs.get(token).copied().unwrap_or(0);
        idf_value(self.variant, self.n_docs, df)
    }

    pub fn doc_freq(&self, token: &str) -> u64 {
        self.doc_freqs.get(token).copied().unwrap_or(0)
    }

    pub fn n_docs(&self) -> u64 {
        self.n_docs
    }
}

/// Collects document frequencies over tokenized documents.
pub fn compute_idf<D, S>(docs: &[D], variant: IdfVariant) -> IdfTable
where
    D: AsRef<[S]>,
    S: AsRef<str>,
{
    let mut doc_freqs: HashMap<String, u64> = HashMap::new();
    for doc in docs {
        let unique: HashSet<&str> = doc.as_ref().iter().map(|t| t.as_ref()).collect();
        for token in unique {
            *doc_freqs.entry(token.to_string()).or_default() += 1;
        }
    }
    IdfTable {
        variant,
        n_docs: docs.len() as u64,
        doc_freqs,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct W2vConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub schedule: LrSchedule,
    pub min_count: u64,
    pub seed: u64,
    pub workers: usize,
    pub idf: IdfVariant,
}

impl Default for W2vConfig {
    fn default() -> Self {
        Self {
            dim: 300,
            window: 5,
            negatives: 5,
            epochs: 5,
            schedule: LrSchedule::default(),
            min_count: 5,
            seed: 0,
            workers: 1,
            idf: IdfVariant::Smoothed,
        }
    }
}

impl W2vConfig {
    pub fn validate(&self) -> Result<(), EmbedError> {
        if self.dim == 0 {
            return Err(EmbedError::Parameter("dim must be positive".into()));
        }
        if self.window == 0 {
            return Err(EmbedError::Parameter("window must be positive".into()));
        }
        if !(self.schedule.start.is_finite() && self.schedule.end.is_finite()) || self.schedule.start < 0.0 {
            return Err(EmbedError::Parameter("learning rate must be finite and non-negative".into()));
        }
        Ok(())
    }
}

/// Word vectors plus per-token idf; embeds text as the idf-weighted mean of
/// its in-vocabulary word vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct W2vTfidfModel<T> {
    vocab: Vocabulary,
    vectors: Matrix<T>,
    idf: Vec<T>,
    config: W2vConfig,
}

impl<T: Scalar> W2vTfidfModel<T> {
    pub fn train<S: AsRef<str>>(texts: &[S], config: &W2vConfig) -> Result<(Self, TrainReport), EmbedError> {
        let docs: Vec<Vec<String>> = texts.iter().map(|t| tokenize(t.as_ref())).collect();
        Self::train_tokens(&docs, config)
    }

    pub fn train_tokens<S: AsRef<str>>(
        docs: &[Vec<S>],
        config: &W2vConfig,
    ) -> Result<(Self, TrainReport), EmbedError> {
        config.validate()?;
        let vocab = Vocabulary::build(docs, config.min_count)?;
        let encoded: Vec<Vec<usize>> = docs.iter().map(|d| vocab.encode(d)).collect();
        let sampler = NegativeSampler::new(vocab.counts())?;

        let mut init_rng = stream_rng(config.seed, u64::MAX);
        let mut params = Params {
            input: Matrix::uniform_init(vocab.len(), config.dim, &mut init_rng),
            output: Matrix::zeros(vocab.len(), config.dim),
        };
        let doc_lens: Vec<usize> = encoded.iter().map(Vec::len).collect();
        let plan = EpochPlan {
            doc_lens: &doc_lens,
            epochs: config.epochs,
            workers: config.workers,
            seed: config.seed,
            schedule: config.schedule,
        };
        let window = config.window;
        let k = config.negatives;
        let mut report = run_epochs(&mut params, &plan, |p: &mut Params<T>, doc, lr: T, rng| {
            let tokens = &encoded[doc];
            let mut negatives = Vec::with_capacity(k);
            let mut scratch = Vec::with_capacity(p.input.cols());
            let (mut loss, mut n) = (0.0, 0u64);
            for (pos, &center) in tokens.iter().enumerate() {
                let span = window - rng.random_range(0..window);
                let lo = pos.saturating_sub(span);
                let hi = (pos + span).min(tokens.len() - 1);
                for ctx in (lo..=hi).filter(|&c| c != pos) {
                    sampler.fill(rng, &mut negatives, k);
                    let l = sgns_step(
                        p.input.row_mut(center),
                        &mut p.output,
                        tokens[ctx],
                        &negatives,
                        lr,
                        &mut scratch,
                    );
                    loss += l.as_f64();
                    n += 1;
                }
            }
            (loss, n)
        });
        report.skipped_docs = doc_lens.iter().filter(|&&l| l == 0).count();

        let idf = vocab_idf(&vocab, config.idf);
        let model = Self {
            vocab,
            vectors: params.input,
            idf,
            config: config.clone(),
        };
        Ok((model, report))
    }

    /// Assembles a model from explicit word vectors and idf weights.
    pub fn from_parts(
        vocab: Vocabulary,
        vectors: Matrix<T>,
        idf: Vec<T>,
        config: W2vConfig,
    ) -> Result<Self, EmbedError> {
        if vectors.rows() != vocab.len() || idf.len() != vocab.len() {
            return Err(EmbedError::Parameter(format!(
                "{} tokens but {} vectors and {} idf weights",
                vocab.len(),
                vectors.rows(),
                idf.len()
            )));
        }
        if idf.iter().any(|w| !w.is_finite() || *w < T::zero()) {
            return Err(EmbedError::Parameter("idf weights must be finite and non-negative".into()));
        }
        let config = W2vConfig {
            dim: vectors.cols(),
            ..config
        };
        Ok(Self {
            vocab,
            vectors,
            idf,
            config,
        })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn vectors(&self) -> &Matrix<T> {
        &self.vectors
    }

    pub fn idf(&self) -> &[T] {
        &self.idf
    }

    pub fn config(&self) -> &W2vConfig {
        &self.config
    }

    pub fn word_vector(&self, token: &str) -> Option<&[T]> {
        self.vocab.index_of(token).map(|i| self.vectors.row(i))
    }

    /// `Σ tf·idf·w(t) / Σ tf·idf` over in-vocabulary tokens.
    pub fn embed_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> Result<DenseVector<T>, EmbedError> {
        let mut tf: BTreeMap<usize, u64> = BTreeMap::new();
        for index in self.vocab.encode(tokens) {
            *tf.entry(index).or_default() += 1;
        }
        let weights: Vec<(usize, T)> = tf
            .into_iter()
            .map(|(i, count)| (i, T::c(count as f64) * self.idf[i]))
            .collect();
        let total: T = weights.iter().map(|&(_, w)| w).sum();
        if weights.is_empty() || total <= T::zero() {
            return Err(EmbedError::NoKnownTokens(joined(tokens)));
        }
        let mut acc = vec![T::zero(); self.vectors.cols()];
        for (i, w) in weights {
            axpy(w / total, self.vectors.row(i), &mut acc);
        }
        DenseVector::new(acc)
    }
}

impl<T: Scalar> Embedder<T> for W2vTfidfModel<T> {
    fn dim(&self) -> usize {
        self.vectors.cols()
    }

    fn embed(&self, input: TextRef<'_>) -> Result<DenseVector<T>, EmbedError> {
        self.embed_tokens(&tokenize(input.text)).map_err(|e| match e {
            EmbedError::NoKnownTokens(_) => EmbedError::NoKnownTokens(input.id.to_string()),
            other => other,
        })
    }
}

pub(crate) fn vocab_idf<T: Scalar>(vocab: &Vocabulary, variant: IdfVariant) -> Vec<T> {
    (0..vocab.len())
        .map(|i| T::c(idf_value(variant, vocab.n_docs(), vocab.doc_freq(i))))
        .collect()
}

fn joined<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().take(8).enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(t.as_ref());
    }
    out
}
