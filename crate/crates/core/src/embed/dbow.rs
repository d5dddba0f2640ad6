//! Paragraph vectors, distributed bag of words (PV-DBOW) with negative
//! sampling: a document vector is trained to predict the words of its
//! document, using the same objective as skip-gram with the document vector
//! in the center-word slot.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::sgns::{
    run_epochs, sgns_gradient, sgns_input_step, sgns_loss, sgns_step, EpochPlan, LrSchedule,
    NegativeSampler, Params, SgnsGradient, TrainReport,
};
use super::vocab::Vocabulary;
use super::{DenseVector, EmbedError, Embedder, TextRef};
use crate::scalar::Scalar;
use crate::seed::stream_rng;
use crate::text::tokenize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbowConfig {
    pub dim: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub schedule: LrSchedule,
    pub min_count: u64,
    pub seed: u64,
    pub workers: usize,
    /// Passes used when inferring a vector for unseen text.
    pub infer_epochs: usize,
    pub infer_seed: u64,
}

impl Default for DbowConfig {
    fn default() -> Self {
        Self {
            dim: 300,
            negatives: 5,
            epochs: 10,
            schedule: LrSchedule::default(),
            min_count: 5,
            seed: 0,
            workers: 1,
            infer_epochs: 50,
            infer_seed: 0,
        }
    }
}

impl DbowConfig {
    pub fn validate(&self) -> Result<(), EmbedError> {
        if self.dim == 0 {
            return Err(EmbedError::Parameter("dim must be positive".into()));
        }
        if !(self.schedule.start.is_finite() && self.schedule.end.is_finite()) || self.schedule.start < 0.0 {
            return Err(EmbedError::Parameter("learning rate must be finite and non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct DbowModel<T> {
    vocab: Vocabulary,
    doc_ids: Vec<String>,
    doc_index: HashMap<String, usize>,
    doc_vectors: Matrix<T>,
    output: Matrix<T>,
    sampler: NegativeSampler,
    config: DbowConfig,
}

impl<T: Scalar> PartialEq for DbowModel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.vocab == other.vocab
            && self.doc_ids == other.doc_ids
            && self.doc_vectors == other.doc_vectors
            && self.output == other.output
            && self.config == other.config
    }
}

impl<T: Scalar> DbowModel<T> {
    pub fn train<I: AsRef<str>, S: AsRef<str>>(
        docs: &[(I, S)],
        config: &DbowConfig,
    ) -> Result<(Self, TrainReport), EmbedError> {
        let tokenized: Vec<(&str, Vec<String>)> = docs
            .iter()
            .map(|(id, text)| (id.as_ref(), tokenize(text.as_ref())))
            .collect();
        Self::train_tokens(&tokenized, config)
    }

    /// Documents without any in-vocabulary token are skipped and counted in
    /// [`TrainReport::skipped_docs`]; they get no vector.
    pub fn train_tokens<I: AsRef<str>, S: AsRef<str>>(
        docs: &[(I, Vec<S>)],
        config: &DbowConfig,
    ) -> Result<(Self, TrainReport), EmbedError> {
        config.validate()?;
        let token_lists: Vec<&[S]> = docs.iter().map(|(_, t)| t.as_slice()).collect();
        let vocab = Vocabulary::build(&token_lists, config.min_count)?;
        let sampler = NegativeSampler::new(vocab.counts())?;

        let mut doc_ids = Vec::new();
        let mut encoded = Vec::new();
        let mut doc_index = HashMap::new();
        let mut skipped = 0;
        for (id, tokens) in docs {
            let id = id.as_ref();
            if doc_index.contains_key(id) {
                return Err(EmbedError::Parameter(format!("duplicate document id `{id}`")));
            }
            let ids = vocab.encode(tokens);
            if ids.is_empty() {
                skipped += 1;
                continue;
            }
            doc_index.insert(id.to_string(), doc_ids.len());
            doc_ids.push(id.to_string());
            encoded.push(ids);
        }

        let mut init_rng = stream_rng(config.seed, u64::MAX);
        let mut params = Params {
            input: Matrix::uniform_init(doc_ids.len(), config.dim, &mut init_rng),
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
        let k = config.negatives;
        let mut report = run_epochs(&mut params, &plan, |p: &mut Params<T>, doc, lr: T, rng| {
            let mut negatives = Vec::with_capacity(k);
            let mut scratch = Vec::with_capacity(p.input.cols());
            let mut loss = 0.0;
            for &word in &encoded[doc] {
                sampler.fill(rng, &mut negatives, k);
                loss += sgns_step(p.input.row_mut(doc), &mut p.output, word, &negatives, lr, &mut scratch)
                    .as_f64();
            }
            (loss, encoded[doc].len() as u64)
        });
        report.skipped_docs = skipped;

        let model = Self {
            vocab,
            doc_ids,
            doc_index,
            doc_vectors: params.input,
            output: params.output,
            sampler,
            config: config.clone(),
        };
        Ok((model, report))
    }

    pub fn from_parts(
        vocab: Vocabulary,
        doc_ids: Vec<String>,
        doc_vectors: Matrix<T>,
        output: Matrix<T>,
        config: DbowConfig,
    ) -> Result<Self, EmbedError> {
        if doc_vectors.rows() != doc_ids.len() || output.rows() != vocab.len() {
            return Err(EmbedError::Parameter("matrix shapes do not match vocabulary/documents".into()));
        }
        if doc_vectors.cols() != output.cols() {
            return Err(EmbedError::DimMismatch {
                left: doc_vectors.cols(),
                right: output.cols(),
            });
        }
        let mut doc_index = HashMap::with_capacity(doc_ids.len());
        for (i, id) in doc_ids.iter().enumerate() {
            if doc_index.insert(id.clone(), i).is_some() {
                return Err(EmbedError::Parameter(format!("duplicate document id `{id}`")));
            }
        }
        let sampler = NegativeSampler::new(vocab.counts())?;
        let config = DbowConfig {
            dim: output.cols(),
            ..config
        };
        Ok(Self {
            vocab,
            doc_ids,
            doc_index,
            doc_vectors,
            output,
            sampler,
            config,
        })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn config(&self) -> &DbowConfig {
        &self.config
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn doc_vectors(&self) -> &Matrix<T> {
        &self.doc_vectors
    }

    pub fn output_vectors(&self) -> &Matrix<T> {
        &self.output
    }

    pub fn doc_vector(&self, id: &str) -> Option<&[T]> {
        self.doc_index.get(id).map(|&i| self.doc_vectors.row(i))
    }

    /// Loss of predicting `word` (against `negatives`) from document `doc`.
    pub fn sample_loss(&self, doc: usize, word: usize, negatives: &[usize]) -> T {
        sgns_loss(self.doc_vectors.row(doc), &self.output, word, negatives)
    }

    /// Gradient of [`Self::sample_loss`]; `input` is with respect to the
    /// document vector.
    pub fn sample_gradient(&self, doc: usize, word: usize, negatives: &[usize]) -> SgnsGradient<T> {
        sgns_gradient(self.doc_vectors.row(doc), &self.output, word, negatives)
    }

    /// Trains a fresh document vector for `tokens` with the word matrix frozen.
    pub fn infer<S: AsRef<str>>(&self, tokens: &[S], epochs: usize, seed: u64) -> Result<DenseVector<T>, EmbedError> {
        let encoded = self.vocab.encode(tokens);
        if encoded.is_empty() {
            return Err(EmbedError::NoKnownTokens(
                tokens.iter().take(8).map(|t| t.as_ref()).collect::<Vec<_>>().join(" "),
            ));
        }
        let mut rng = stream_rng(seed, 0);
        let init = Matrix::<T>::uniform_init(1, self.output.cols(), &mut rng);
        let mut vector = init.row(0).to_vec();
        let mut negatives = Vec::with_capacity(self.config.negatives);
        let mut scratch = Vec::with_capacity(vector.len());
        for epoch in 0..epochs {
            let lr = T::c(self.config.schedule.at(epoch as f64 / epochs as f64));
            for &word in &encoded {
                self.sampler.fill(&mut rng, &mut negatives, self.config.negatives);
                sgns_input_step(&mut vector, &self.output, word, &negatives, lr, &mut scratch);
            }
        }
        DenseVector::new(vector)
    }
}

impl<T: Scalar> Embedder<T> for DbowModel<T> {
    fn dim(&self) -> usize {
        self.output.cols()
    }

    fn embed(&self, input: TextRef<'_>) -> Result<DenseVector<T>, EmbedError> {
        self.infer(&tokenize(input.text), self.config.infer_epochs, self.config.infer_seed)
            .map_err(|e| match e {
                EmbedError::NoKnownTokens(_) => EmbedError::NoKnownTokens(input.id.to_string()),
                other => other,
            })
    }
}
