//! Patent similarity pipeline: corpus ingest, triplet construction, the
//! interference benchmark, embedding models and the win-rate evaluation.

pub mod bench;
pub mod embed;
pub mod eval;
pub mod ingest;
pub mod scalar;
pub mod seed;
pub mod synth;
pub mod text;
pub mod triplets;

pub use scalar::Scalar;

pub type DenseVectorF32 = embed::DenseVector<f32>;
pub type DenseVectorF64 = embed::DenseVector<f64>;
pub type W2vTfidfModelF32 = embed::W2vTfidfModel<f32>;
pub type W2vTfidfModelF64 = embed::W2vTfidfModel<f64>;
pub type DbowModelF32 = embed::DbowModel<f32>;
pub type DbowModelF64 = embed::DbowModel<f64>;
pub type ExternalVectorsF32 = embed::ExternalVectors<f32>;
pub type ExternalVectorsF64 = embed::ExternalVectors<f64>;
pub type ModelEntryF32 = eval::ModelEntry<f32>;
pub type ModelEntryF64 = eval::ModelEntry<f64>;
