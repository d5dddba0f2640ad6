//! Precomputed vectors exchanged as `PATSIM-VECS v1` text files.
//!
//! ```text
//! PATSIM-VECS v1 dim=<d> count=<n> source=<label>
//! <id>\t<v1>\t...\t<vd>
//! ```
//!
//! Values are written in shortest round-trip decimal form, so a write
//! followed by a load reproduces every component exactly.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{DenseVector, EmbedError, Embedder, TextRef};
use crate::scalar::Scalar;

pub const VECS_MAGIC: &str = "PATSIM-VECS v1";

/// Id-keyed vector table. Looking up an unknown id is an error.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalVectors<T> {
    dim: usize,
    source: String,
    ids: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Vec<DenseVector<T>>,
}

impl<T: Scalar> ExternalVectors<T> {
    pub fn new(dim: usize, source: impl Into<String>) -> Self {
        Self {
            dim,
            source: source.into(),
            ids: Vec::new(),
            index: HashMap::new(),
            vectors: Vec::new(),
        }
    }

    pub fn insert(&mut self, id: impl Into<String>, vector: DenseVector<T>) -> Result<(), EmbedError> {
        let id = id.into();
        if id.is_empty() || id.contains(['\t', '\n', '\r']) {
            return Err(EmbedError::Parameter(format!("invalid vector id {id:?}")));
        }
        if vector.dim() != self.dim {
            return Err(EmbedError::DimMismatch {
                left: self.dim,
                right: vector.dim(),
            });
        }
        if self.index.contains_key(&id) {
            return Err(EmbedError::Parameter(format!("duplicate id `{id}`")));
        }
        self.index.insert(id.clone(), self.ids.len());
        self.ids.push(id);
        self.vectors.push(vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, id: &str) -> Result<&DenseVector<T>, EmbedError> {
        self.index
            .get(id)
            .map(|&i| &self.vectors[i])
            .ok_or_else(|| EmbedError::UnknownId(id.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &DenseVector<T>)> {
        self.ids.iter().map(String::as_str).zip(&self.vectors)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, EmbedError> {
        Self::from_reader(BufReader::new(File::open(path)?))
    }

    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self, EmbedError> {
        let mut lines = reader.lines();
        let header = lines.next().transpose()?.ok_or_else(|| format_err(1, "missing header"))?;
        let (dim, count, source) = parse_header(&header)?;
        let mut table = Self::new(dim, source);
        for (i, line) in lines.enumerate() {
            let line_no = i + 2;
            let line = line?;
            let mut fields = line.split('\t');
            let id = fields.next().unwrap_or_default();
            let values = fields
                .map(|f| {
                    f.parse::<T>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| format_err(line_no, format!("invalid value `{f}`")))
                })
                .collect::<Result<Vec<T>, _>>()?;
            if values.len() != dim {
                return Err(format_err(
                    line_no,
                    format!("expected {dim} values, found {}", values.len()),
                ));
            }
            let vector = DenseVector::new(values).map_err(|e| format_err(line_no, e.to_string()))?;
            table.insert(id, vector).map_err(|e| format_err(line_no, e.to_string()))?;
        }
        if table.len() != count {
            return Err(format_err(
                table.len() + 2,
                format!("header declares {count} vectors, file has {}", table.len()),
            ));
        }
        Ok(table)
    }

    pub fn write_to<W: Write>(&self, writer: W) -> Result<(), EmbedError> {
        let items: Vec<(&str, &DenseVector<T>)> = self.iter().collect();
        write_vectors(writer, &self.source, self.dim, &items)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), EmbedError> {
        let mut writer = BufWriter::new(File::create(path)?);
        self.write_to(&mut writer)?;
        writer.flush()?;
        Ok(())
    }
}

impl<T: Scalar> Embedder<T> for ExternalVectors<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, input: TextRef<'_>) -> Result<DenseVector<T>, EmbedError> {
        self.get(input.id).cloned()
    }
}

/// Writes `items` as a `PATSIM-VECS v1` file.
pub fn write_vectors<W, T, I, V>(mut writer: W, source: &str, dim: usize, items: &[(I, V)]) -> Result<(), EmbedError>
where
    W: Write,
    T: Scalar,
    I: AsRef<str>,
    V: std::borrow::Borrow<DenseVector<T>>,
{
    if source.contains(['\n', '\r']) {
        return Err(EmbedError::Parameter("source label must be a single line".into()));
    }
    writeln!(writer, "{VECS_MAGIC} dim={dim} count={} source={source}", items.len())?;
    for (id, vector) in items {
        let (id, vector) = (id.as_ref(), vector.borrow());
        if vector.dim() != dim {
            return Err(EmbedError::DimMismatch {
                left: dim,
                right: vector.dim(),
            });
        }
        write!(writer, "{id}")?;
        for v in vector.values() {
            write!(writer, "\t{v}")?;
        }
        writeln!(writer)?;
    }
    Ok(())
}

fn parse_header(header: &str) -> Result<(usize, usize, String), EmbedError> {
    let rest = header
        .strip_prefix(VECS_MAGIC)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| format_err(1, format!("expected `{VECS_MAGIC}` header")))?;
    let mut parts = rest.splitn(3, ' ');
    let mut field = |key: &str| {
        parts
            .next()
            .and_then(|p| p.strip_prefix(key))
            .ok_or_else(|| format_err(1, format!("missing `{key}`")))
    };
    let dim: usize = field("dim=")?
        .parse()
        .map_err(|_| format_err(1, "invalid dim"))?;
    let count: usize = field("count=")?
        .parse()
        .map_err(|_| format_err(1, "invalid count"))?;
    let source = field("source=")?.to_string();
    if dim == 0 {
        return Err(format_err(1, "dim must be positive"));
    }
    Ok((dim, count, source))
}

fn format_err(line: usize, message: impl Into<String>) -> EmbedError {
    EmbedError::Format {
        line,
        message: message.into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn load(text: &str) -> Result<ExternalVectors<f64>, EmbedError> {
        ExternalVectors::from_reader(text.as_bytes())
    }

    #[test]
    fn loads_conforming_file() {
        let table = load("PATSIM-VECS v1 dim=4 count=2 source=unit test\na\t1\t2\t3\t4\nb\t0\t0\t1\t0.5\n").unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table.source(), "unit test");
        assert_eq!(table.get("b").unwrap().values(), &[0.0, 0.0, 1.0, 0.5]);
    }

    #[test]
    fn short_line_reports_its_number() {
        let err = load("PATSIM-VECS v1 dim=4 count=2 source=x\na\t1\t2\t3\t4\nb\t1\t2\t3\n").unwrap_err();
        assert!(matches!(err, EmbedError::Format { line: 3, .. }), "{err}");
    }

    #[test]
    fn duplicate_id_and_count_mismatch() {
        let dup = load("PATSIM-VECS v1 dim=1 count=2 source=x\na\t1\na\t2\n").unwrap_err();
        assert!(matches!(dup, EmbedError::Format { line: 3, .. }));
        let short = load("PATSIM-VECS v1 dim=1 count=3 source=x\na\t1\n").unwrap_err();
        assert!(matches!(short, EmbedError::Format { .. }));
        assert!(load("PATSIM-VECS v2 dim=1 count=0 source=x\n").is_err());
    }

    #[test]
    fn unknown_id_is_an_error_not_a_zero_vector() {
        let table = load("PATSIM-VECS v1 dim=1 count=1 source=x\na\t1\n").unwrap();
        assert!(matches!(
            table.embed(TextRef::new("zz", "text")),
            Err(EmbedError::UnknownId(id)) if id == "zz"
        ));
        assert_eq!(table.embed(TextRef::new("a", "")).unwrap().values(), &[1.0]);
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(rows in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 3), 1..20)) {
            let mut table = ExternalVectors::new(3, "prop");
            for (i, r) in rows.iter().enumerate() {
                table.insert(format!("id{i}"), DenseVector::new(r.clone()).unwrap()).unwrap();
            }
            let mut buf = Vec::new();
            table.write_to(&mut buf).unwrap();
            let back = ExternalVectors::<f64>::from_reader(buf.as_slice()).unwrap();
            prop_assert_eq!(back, table);
        }
    }
}
