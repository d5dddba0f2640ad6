use std::borrow::Cow;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{SplitConfig, SplitPlan, Triplet, TripletError};
use crate::embed::TripletLossConfig;

pub const TRIPLETS_MAGIC: &str = "PATSIM-TRIPLETS v1";

/// Sidecar describing a sampled split; read by the sentence-encoder trainer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub triplets_file: String,
    pub train_file: String,
    pub validation_file: String,
    pub seed: u64,
    pub sample_fraction: f64,
    pub train_fraction: f64,
    pub validation_fraction: f64,
    pub total: usize,
    pub sampled: usize,
    pub train: usize,
    pub validation: usize,
    pub loss: TripletLossConfig,
}

impl SplitManifest {
    pub fn new(
        plan: &SplitPlan,
        config: &SplitConfig,
        loss: TripletLossConfig,
        triplets_file: &str,
        train_file: &str,
        validation_file: &str,
    ) -> Self {
        Self {
            triplets_file: triplets_file.to_string(),
            train_file: train_file.to_string(),
            validation_file: validation_file.to_string(),
            seed: plan.seed,
            sample_fraction: config.sample_fraction,
            train_fraction: config.train_fraction,
            validation_fraction: config.validation_fraction,
            total: plan.total,
            sampled: plan.sampled(),
            train: plan.train.len(),
            validation: plan.validation.len(),
            loss,
        }
    }
}

/// Header `PATSIM-TRIPLETS v1\tcount=<n>\tseed=<s>`, then six tab-separated
/// fields per triplet: three ids, then three texts.
pub fn write_triplets<W: Write>(mut writer: W, seed: u64, triplets: &[Triplet<'_>]) -> Result<(), TripletError> {
    writeln!(writer, "{TRIPLETS_MAGIC}\tcount={}\tseed={seed}", triplets.len())?;
    for (i, t) in triplets.iter().enumerate() {
        let fields = [
            &t.anchor_id,
            &t.positive_id,
            &t.negative_id,
            &t.anchor_text,
            &t.positive_text,
            &t.negative_text,
        ];
        if fields.iter().any(|f| f.contains(['\t', '\n', '\r'])) {
            return Err(TripletError::Format {
                line: i + 2,
                message: "field contains a tab or line break".into(),
            });
        }
        let [a, p, n, at, pt, nt] = fields;
        writeln!(writer, "{a}\t{p}\t{n}\t{at}\t{pt}\t{nt}")?;
    }
    Ok(())
}

/// Returns the seed from the header and the triplets in file order.
pub fn read_triplets<R: BufRead>(reader: R) -> Result<(u64, Vec<Triplet<'static>>), TripletError> {
    let bad = |line: usize, message: &str| TripletError::Format {
        line,
        message: message.to_string(),
    };
    let mut lines = reader.lines();
    let header = lines.next().transpose()?.ok_or_else(|| bad(1, "missing header"))?;
    let parts: Vec<&str> = header.split('\t').collect();
    let (count, seed) = match parts[..] {
        [magic, c, s] if magic == TRIPLETS_MAGIC => (
            c.strip_prefix("count=").and_then(|v| v.parse::<usize>().ok()),
            s.strip_prefix("seed=").and_then(|v| v.parse::<u64>().ok()),
        ),
        _ => (None, None),
    };
    let (Some(count), Some(seed)) = (count, seed) else {
        return Err(bad(1, "expected `PATSIM-TRIPLETS v1\\tcount=<n>\\tseed=<s>`"));
    };
    let mut out = Vec::with_capacity(count.min(1 << 20));
    for (i, line) in lines.enumerate() {
        let line = line?;
        let f: Vec<&str> = line.split('\t').collect();
        let [a, p, n, at, pt, nt] = f[..] else {
            return Err(bad(i + 2, &format!("expected 6 tab-separated fields, found {}", f.len())));
        };
        let own = |s: &str| Cow::Owned(s.to_string());
        out.push(Triplet {
            anchor_id: own(a),
            positive_id: own(p),
            negative_id: own(n),
            anchor_text: own(at),
            positive_text: own(pt),
            negative_text: own(nt),
        });
    }
    if out.len() != count {
        return Err(bad(1, &format!("header count {count} but {} triplets", out.len())));
    }
    Ok((seed, out))
}

/// One zero-based triplet index per line.
pub fn write_index_file<W: Write>(mut writer: W, indices: &[usize]) -> std::io::Result<()> {
    for i in indices {
        writeln!(writer, "{i}")?;
    }
    Ok(())
}

pub fn read_index_file<R: BufRead>(reader: R) -> Result<Vec<usize>, TripletError> {
    reader
        .lines()
        .enumerate()
        .map(|(i, line)| {
            let line = line?;
            line.trim().parse().map_err(|_| TripletError::Format {
                line: i + 1,
                message: format!("`{line}` is not an index"),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triplets::plan_split;

    fn t(i: usize) -> Triplet<'static> {
        Triplet {
            anchor_id: format!("A{i}").into(),
            positive_id: format!("P{i}").into(),
            negative_id: format!("N{i}").into(),
            anchor_text: "an anchor".into(),
            positive_text: "a positive".into(),
            negative_text: "a négative".into(),
        }
    }

    #[test]
    fn triplet_file_round_trip() {
        let triplets: Vec<_> = (0..3).map(t).collect();
        let mut buf = Vec::new();
        write_triplets(&mut buf, 42, &triplets).unwrap();
        assert!(buf.starts_with(b"PATSIM-TRIPLETS v1\tcount=3\tseed=42\nA0\tP0\tN0\tan anchor\t"));
        let (seed, back) = read_triplets(buf.as_slice()).unwrap();
        assert_eq!(seed, 42);
        assert_eq!(back, triplets);
    }

    #[test]
    fn format_errors_carry_line_numbers() {
        let err = read_triplets("PATSIM-TRIPLETS v1\tcount=1\tseed=0\na\tb\tc\n".as_bytes()).unwrap_err();
        assert!(matches!(err, TripletError::Format { line: 2, .. }));
        assert!(read_triplets("PATSIM-TRIPLETS v1\tcount=1\n".as_bytes()).is_err());
        let mut bad = t(0);
        bad.anchor_text = "a\tb".into();
        assert!(write_triplets(Vec::new(), 0, &[bad]).is_err());
    }

    #[test]
    fn manifests_round_trip() {
        let config = SplitConfig::default();
        let plan = plan_split(200, &config, 5).unwrap();
        let mut buf = Vec::new();
        write_index_file(&mut buf, &plan.train).unwrap();
        assert_eq!(read_index_file(buf.as_slice()).unwrap(), plan.train);
        let manifest = SplitManifest::new(&plan, &config, TripletLossConfig::default(), "t.tsv", "train.idx", "val.idx");
        assert_eq!((manifest.sampled, manifest.train, manifest.validation), (20, 14, 6));
        let json = serde_json::to_string(&manifest).unwrap();
        assert_eq!(serde_json::from_str::<SplitManifest>(&json).unwrap(), manifest);
        assert!(read_index_file("1\nx\n".as_bytes()).is_err());
    }
}
