//! Binary checkpoints for the static models.
//!
//! All integers and floats are little-endian. Matrices are stored row-major
//! as `f32` regardless of the in-memory scalar type.
//!
//! ```text
//! magic        8 bytes  "PATSIMCK"
//! version      u32      1
//! kind         u8       1 = word2vec+tf-idf, 2 = pv-dbow
//! config       u32 length + UTF-8 JSON of the training config
//! vocabulary   u64 n_docs, u64 min_count, u32 n_tokens,
//!              then per token: u32 length + UTF-8 bytes, u64 corpus freq, u64 doc freq
//! kind 1       matrix word vectors, u32 n + n × f32 idf weights
//! kind 2       u32 n_docs, per doc u32 length + UTF-8 id, matrix doc vectors, matrix output vectors
//! matrix       u32 rows, u32 cols, rows × cols × f32
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::dbow::{DbowConfig, DbowModel};
use super::matrix::Matrix;
use super::vocab::Vocabulary;
use super::word2vec::{W2vConfig, W2vTfidfModel};
use super::EmbedError;
use crate::scalar::Scalar;

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"PATSIMCK";
pub const CHECKPOINT_VERSION: u32 = 1;

const KIND_W2V: u8 = 1;
const KIND_DBOW: u8 = 2;

pub fn write_w2v<T: Scalar>(path: impl AsRef<Path>, model: &W2vTfidfModel<T>) -> Result<(), EmbedError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_head(&mut w, KIND_W2V, model.config())?;
    write_vocab(&mut w, model.vocab())?;
    write_matrix(&mut w, model.vectors())?;
    put_u32(&mut w, model.idf().len())?;
    for v in model.idf() {
        w.write_all(&(v.as_f64() as f32).to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_w2v<T: Scalar>(path: impl AsRef<Path>) -> Result<W2vTfidfModel<T>, EmbedError> {
    let mut r = BufReader::new(File::open(path)?);
    let config: W2vConfig = read_head(&mut r, KIND_W2V)?;
    let vocab = read_vocab(&mut r)?;
    let vectors = read_matrix(&mut r)?;
    let n = get_u32(&mut r)? as usize;
    let idf = (0..n).map(|_| get_f32(&mut r).map(|v| T::c(v as f64))).collect::<Result<_, _>>()?;
    W2vTfidfModel::from_parts(vocab, vectors, idf, config)
}

pub fn write_dbow<T: Scalar>(path: impl AsRef<Path>, model: &DbowModel<T>) -> Result<(), EmbedError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_head(&mut w, KIND_DBOW, model.config())?;
    write_vocab(&mut w, model.vocab())?;
    put_u32(&mut w, model.doc_ids().len())?;
    for id in model.doc_ids() {
        put_str(&mut w, id)?;
    }
    write_matrix(&mut w, model.doc_vectors())?;
    write_matrix(&mut w, model.output_vectors())?;
    w.flush()?;
    Ok(())
}

pub fn read_dbow<T: Scalar>(path: impl AsRef<Path>) -> Result<DbowModel<T>, EmbedError> {
    let mut r = BufReader::new(File::open(path)?);
    let config: DbowConfig = read_head(&mut r, KIND_DBOW)?;
    let vocab = read_vocab(&mut r)?;
    let n = get_u32(&mut r)? as usize;
    let ids = (0..n).map(|_| get_str(&mut r)).collect::<Result<_, _>>()?;
    let docs = read_matrix(&mut r)?;
    let output = read_matrix(&mut r)?;
    DbowModel::from_parts(vocab, ids, docs, output, config)
}

fn write_head<W: Write, C: Serialize>(w: &mut W, kind: u8, config: &C) -> Result<(), EmbedError> {
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    w.write_all(&[kind])?;
    let json = serde_json::to_string(config).map_err(|e| EmbedError::Checkpoint(e.to_string()))?;
    put_str(w, &json)
}

fn read_head<R: Read, C: DeserializeOwned>(r: &mut R, kind: u8) -> Result<C, EmbedError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(EmbedError::Checkpoint("not a checkpoint file".into()));
    }
    let version = get_u32(r)?;
    if version != CHECKPOINT_VERSION {
        return Err(EmbedError::Checkpoint(format!("unsupported version {version}")));
    }
    let mut found = [0u8; 1];
    r.read_exact(&mut found)?;
    if found[0] != kind {
        return Err(EmbedError::Checkpoint(format!(
            "checkpoint holds model kind {}, expected {kind}",
            found[0]
        )));
    }
    let json = get_str(r)?;
    serde_json::from_str(&json).map_err(|e| EmbedError::Checkpoint(e.to_string()))
}

fn write_vocab<W: Write>(w: &mut W, vocab: &Vocabulary) -> Result<(), EmbedError> {
    w.write_all(&vocab.n_docs().to_le_bytes())?;
    w.write_all(&vocab.min_count().to_le_bytes())?;
    put_u32(w, vocab.len())?;
    for i in 0..vocab.len() {
        put_str(w, vocab.token(i))?;
        w.write_all(&vocab.count(i).to_le_bytes())?;
        w.write_all(&vocab.doc_freq(i).to_le_bytes())?;
    }
    Ok(())
}

fn read_vocab<R: Read>(r: &mut R) -> Result<Vocabulary, EmbedError> {
    let n_docs = get_u64(r)?;
    let min_count = get_u64(r)?;
    let n = get_u32(r)? as usize;
    let mut entries = Vec::with_capacity(n);
    for _ in 0..n {
        let token = get_str(r)?;
        let cf = get_u64(r)?;
        let df = get_u64(r)?;
        entries.push((token, cf, df));
    }
    Vocabulary::from_entries(entries, min_count, n_docs)
}

fn write_matrix<W: Write, T: Scalar>(w: &mut W, m: &Matrix<T>) -> Result<(), EmbedError> {
    put_u32(w, m.rows())?;
    put_u32(w, m.cols())?;
    for v in m.as_slice() {
        w.write_all(&(v.as_f64() as f32).to_le_bytes())?;
    }
    Ok(())
}

fn read_matrix<R: Read, T: Scalar>(r: &mut R) -> Result<Matrix<T>, EmbedError> {
    let rows = get_u32(r)? as usize;
    let cols = get_u32(r)? as usize;
    let data = (0..rows * cols)
        .map(|_| get_f32(r).map(|v| T::c(v as f64)))
        .collect::<Result<Vec<T>, _>>()?;
    Matrix::from_vec(rows, cols, data).ok_or_else(|| EmbedError::Checkpoint("matrix size".into()))
}

fn put_u32<W: Write>(w: &mut W, n: usize) -> Result<(), EmbedError> {
    let n = u32::try_from(n).map_err(|_| EmbedError::Checkpoint(format!("{n} exceeds u32")))?;
    w.write_all(&n.to_le_bytes())?;
    Ok(())
}

fn put_str<W: Write>(w: &mut W, s: &str) -> Result<(), EmbedError> {
    put_u32(w, s.len())?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

fn get_u32<R: Read>(r: &mut R) -> Result<u32, EmbedError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn get_u64<R: Read>(r: &mut R) -> Result<u64, EmbedError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn get_f32<R: Read>(r: &mut R) -> Result<f32, EmbedError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(f32::from_le_bytes(b))
}

fn get_str<R: Read>(r: &mut R) -> Result<String, EmbedError> {
    let len = get_u32(r)? as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|_| EmbedError::Checkpoint("invalid UTF-8 string".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{Embedder, TextRef};

    fn texts() -> Vec<(String, String)> {
        (0..12)
            .map(|i| {
                let text = (0..10).map(|j| format!("w{}", (i * 3 + j) % 9)).collect::<Vec<_>>().join(" ");
                (format!("doc{i}"), text)
            })
            .collect()
    }

    #[test]
    fn w2v_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w2v.ckpt");
        let raw: Vec<String> = texts().into_iter().map(|(_, t)| t).collect();
        let config = W2vConfig { dim: 5, epochs: 1, min_count: 1, ..W2vConfig::default() };
        let (model, _) = W2vTfidfModel::<f32>::train(&raw, &config).unwrap();
        write_w2v(&path, &model).unwrap();
        let back: W2vTfidfModel<f32> = read_w2v(&path).unwrap();
        assert_eq!(back, model);
        assert!(read_dbow::<f32>(&path).is_err());
    }

    #[test]
    fn dbow_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dbow.ckpt");
        let config = DbowConfig { dim: 4, epochs: 1, min_count: 1, infer_epochs: 3, ..DbowConfig::default() };
        let (model, _) = DbowModel::<f32>::train(&texts(), &config).unwrap();
        write_dbow(&path, &model).unwrap();
        let back: DbowModel<f32> = read_dbow(&path).unwrap();
        assert_eq!(back, model);
        let input = TextRef::new("q", "w1 w2 w3");
        assert_eq!(back.embed(input).unwrap(), model.embed(input).unwrap());
    }

    #[test]
    fn garbage_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk");
        std::fs::write(&path, b"definitely not a model").unwrap();
        assert!(matches!(read_w2v::<f32>(&path), Err(EmbedError::Checkpoint(_))));
    }
}
