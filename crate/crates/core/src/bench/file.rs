use std::io::{BufRead, Write};

use super::{BenchError, BenchmarkDataset, ClaimPair};
use crate::ingest::ClaimRecord;

pub const BENCH_MAGIC: &str = "PATSIM-BENCH v1";

const COLUMNS: &str =
    "kind\tinterference_no\tpartner_interference\tpatent_a\tclaim_a\tpatent_b\tclaim_b\tselection_score\ttext_a\ttext_b";

/// Header `PATSIM-BENCH v1\ttrue=<n>\trandom=<m>\tseed=<s>\treference=<label>`,
/// a column line, the true pairs, then the random pairs. Random rows have `-`
/// as score; true rows repeat their own interference as partner.
pub fn write_benchmark<W: Write>(mut writer: W, bench: &BenchmarkDataset) -> Result<(), BenchError> {
    if bench.reference.contains(['\t', '\n', '\r']) {
        return Err(BenchError::Parameter("reference label contains a tab or line break".into()));
    }
    writeln!(
        writer,
        "{BENCH_MAGIC}\ttrue={}\trandom={}\tseed={}\treference={}",
        bench.true_pairs.len(),
        bench.random_pairs.len(),
        bench.seed,
        bench.reference
    )?;
    writeln!(writer, "{COLUMNS}")?;
    let sections = [("true", &bench.true_pairs), ("random", &bench.random_pairs)];
    for (kind, pairs) in sections {
        for p in pairs {
            let partner = p.partner_interference.as_deref().unwrap_or(&p.interference_no);
            let score = p.selection_score.map_or_else(|| "-".to_string(), |s| s.to_string());
            for text in [&p.claim_a.text, &p.claim_b.text] {
                if text.contains(['\t', '\n', '\r']) {
                    return Err(BenchError::Parameter(format!(
                        "claim text in case {} contains a tab or line break",
                        p.interference_no
                    )));
                }
            }
            writeln!(
                writer,
                "{kind}\t{}\t{partner}\t{}\t{}\t{}\t{}\t{score}\t{}\t{}",
                p.interference_no,
                p.claim_a.patent_id,
                p.claim_a.claim_sequence,
                p.claim_b.patent_id,
                p.claim_b.claim_sequence,
                p.claim_a.text,
                p.claim_b.text
            )?;
        }
    }
    Ok(())
}

pub fn read_benchmark<R: BufRead>(reader: R) -> Result<BenchmarkDataset, BenchError> {
    let bad = |line: usize, message: String| BenchError::Format { line, message };
    let mut lines = reader.lines();
    let header = lines.next().transpose()?.ok_or_else(|| bad(1, "missing header".into()))?;
    let mut fields = header.splitn(5, '\t');
    if fields.next() != Some(BENCH_MAGIC) {
        return Err(bad(1, format!("expected `{BENCH_MAGIC}` header")));
    }
    let mut value = |key: &str| {
        fields
            .next()
            .and_then(|f| f.strip_prefix(key))
            .and_then(|f| f.strip_prefix('='))
            .map(str::to_string)
            .ok_or_else(|| bad(1, format!("missing `{key}=`")))
    };
    let n_true: usize = value("true")?.parse().map_err(|_| bad(1, "bad true count".into()))?;
    let n_random: usize = value("random")?.parse().map_err(|_| bad(1, "bad random count".into()))?;
    let seed: u64 = value("seed")?.parse().map_err(|_| bad(1, "bad seed".into()))?;
    let reference = value("reference")?;
    match lines.next().transpose()? {
        Some(l) if l == COLUMNS => {}
        _ => return Err(bad(2, "expected column line".into())),
    }
    let mut bench = BenchmarkDataset {
        true_pairs: Vec::with_capacity(n_true),
        random_pairs: Vec::with_capacity(n_random),
        seed,
        reference,
    };
    for (i, line) in lines.enumerate() {
        let line_no = i + 3;
        let line = line?;
        let f: Vec<&str> = line.split('\t').collect();
        let [kind, no, partner, pa, sa, pb, sb, score, ta, tb] = f[..] else {
            return Err(bad(line_no, format!("expected 10 fields, found {}", f.len())));
        };
        let seq = |s: &str| s.parse::<u32>().ok().filter(|&v| v >= 1);
        let (Some(sa), Some(sb)) = (seq(sa), seq(sb)) else {
            return Err(bad(line_no, "claim sequence must be an integer >= 1".into()));
        };
        let claim = |pid: &str, seq: u32, text: &str| ClaimRecord {
            patent_id: pid.to_string(),
            claim_sequence: seq,
            text: text.to_string(),
            is_independent: true,
        };
        let mut pair = ClaimPair {
            interference_no: no.to_string(),
            claim_a: claim(pa, sa, ta),
            claim_b: claim(pb, sb, tb),
            selection_score: None,
            partner_interference: None,
        };
        match kind {
            "true" if bench.random_pairs.is_empty() => {
                let s: f64 = score.parse().map_err(|_| bad(line_no, format!("bad score `{score}`")))?;
                if !(-1.0..=1.0).contains(&s) {
                    return Err(bad(line_no, format!("score {s} outside [-1, 1]")));
                }
                pair.selection_score = Some(s);
                bench.true_pairs.push(pair);
            }
            "random" if score == "-" => {
                if partner == no {
                    return Err(bad(line_no, "random pair within one interference".into()));
                }
                pair.partner_interference = Some(partner.to_string());
                bench.random_pairs.push(pair);
            }
            _ => return Err(bad(line_no, format!("unexpected `{kind}` row"))),
        }
    }
    if bench.true_pairs.len() != n_true || bench.random_pairs.len() != n_random {
        return Err(bad(
            1,
            format!(
                "header counts {n_true}/{n_random} but file has {}/{}",
                bench.true_pairs.len(),
                bench.random_pairs.len()
            ),
        ));
    }
    Ok(bench)
}
