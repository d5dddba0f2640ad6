//! Dense vectors, cosine similarity, and the [`Embedder`] interface shared by
//! every model the harness can score.

mod checkpoint;
mod dbow;
mod external;
mod matrix;
mod sgns;
mod stub;
mod triplet_loss;
mod vocab;
mod word2vec;

pub use checkpoint::{read_dbow, read_w2v, write_dbow, write_w2v, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use dbow::{DbowConfig, DbowModel};
pub use external::{write_vectors, ExternalVectors, VECS_MAGIC};
pub use matrix::Matrix;
pub use sgns::{
    sgns_gradient, sgns_input_step, sgns_loss, sgns_step, LrSchedule, NegativeSampler, SgnsGradient,
    TrainReport,
};
pub use stub::HashingEmbedder;
pub use triplet_loss::{euclidean, triplet_loss, Distance, Pooling, TripletLossConfig};
pub use vocab::Vocabulary;
pub use word2vec::{compute_idf, idf_value, IdfTable, IdfVariant, W2vConfig, W2vTfidfModel};

use thiserror::Error;

use crate::scalar::{dot, Scalar};

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("cosine is undefined for an all-zero vector")]
    ZeroVector,
    #[error("vector has no components")]
    EmptyVector,
    #[error("vector component {index} is not finite")]
    NonFinite { index: usize },
    #[error("no in-vocabulary token in input `{0}`")]
    NoKnownTokens(String),
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A finite, non-empty embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector<T> {
    values: Vec<T>,
}

impl<T: Scalar> DenseVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self, EmbedError> {
        if values.is_empty() {
            return Err(EmbedError::EmptyVector);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(EmbedError::NonFinite { index });
        }
        Ok(Self { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn cast<U: Scalar>(&self) -> DenseVector<U> {
        DenseVector {
            values: self.values.iter().map(|v| U::c(v.as_f64())).collect(),
        }
    }
}

/// `dot(a, b) / (|a| |b|)`, clamped to [-1, 1].
///
/// Symmetric bit-for-bit: both the dot product and the norm product are
/// evaluated in an argument-order independent way.
pub fn cosine<T: Scalar>(a: &DenseVector<T>, b: &DenseVector<T>) -> Result<T, EmbedError> {
    cosine_slices(a.values(), b.values())
}

pub fn cosine_slices<T: Scalar>(a: &[T], b: &[T]) -> Result<T, EmbedError> {
    if a.len() != b.len() {
        return Err(EmbedError::DimMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na.is_zero() || nb.is_zero() {
        return Err(EmbedError::ZeroVector);
    }
    let c = dot(a, b) / (na * nb);
    Ok(c.max(-T::one()).min(T::one()))
}

/// Text handed to an embedder together with its stable identifier.
///
/// Text-based models ignore `id`; precomputed vector tables ignore `text`.
#[derive(Debug, Clone, Copy)]
pub struct TextRef<'a> {
    pub id: &'a str,
    pub text: &'a str,
}

impl<'a> TextRef<'a> {
    pub fn new(id: &'a str, text: &'a str) -> Self {
        Self { id, text }
    }
}

/// Maps a piece of text to a dense vector. Implementations are deterministic:
/// the same input always yields the same vector.
pub trait Embedder<T: Scalar>: Send + Sync {
    fn dim(&self) -> usize;

    fn embed(&self, input: TextRef<'_>) -> Result<DenseVector<T>, EmbedError>;
}

impl<T: Scalar, E: Embedder<T> + ?Sized> Embedder<T> for std::sync::Arc<E> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn embed(&self, input: TextRef<'_>) -> Result<DenseVector<T>, EmbedError> {
        (**self).embed(input)
    }
}

impl<T: Scalar, E: Embedder<T> + ?Sized> Embedder<T> for Box<E> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn embed(&self, input: TextRef<'_>) -> Result<DenseVector<T>, EmbedError> {
        (**self).embed(input)
    }
}
