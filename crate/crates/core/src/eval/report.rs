use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{subset_table, win_rates, EvalError, Family, PairKind, ScoreMatrix, WinRateTable};
use crate::seed::SeedChain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Self::Text),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown report format `{other}` (text, csv, json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub name: String,
    pub family: Family,
}

/// Spread of one model's defined scores on one pair kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreDistribution {
    pub model: String,
    pub kind: PairKind,
    pub count: usize,
    pub mean: Option<f64>,
    pub std_dev: Option<f64>,
    pub min: Option<f64>,
    pub median: Option<f64>,
    pub max: Option<f64>,
}

impl ScoreDistribution {
    fn of(matrix: &ScoreMatrix, column: usize) -> Self {
        let mut s: Vec<f64> = matrix.cells.iter().filter_map(|r| r[column].score()).collect();
        s.sort_by(f64::total_cmp);
        let n = s.len();
        let mean = (n > 0).then(|| s.iter().sum::<f64>() / n as f64);
        let std_dev = mean.map(|m| (s.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n as f64).sqrt());
        let median = (n > 0).then(|| if n % 2 == 1 { s[n / 2] } else { (s[n / 2 - 1] + s[n / 2]) / 2.0 });
        Self {
            model: matrix.models[column].clone(),
            kind: matrix.kind,
            count: n,
            mean,
            std_dev,
            min: s.first().copied(),
            median,
            max: s.last().copied(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub true_pairs: usize,
    pub random_pairs: usize,
    pub reference: String,
    pub seed: u64,
}

/// Everything an evaluation run reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub models: Vec<ModelSummary>,
    pub all: WinRateTable,
    pub subset_label: String,
    pub subset: WinRateTable,
    pub distributions: Vec<ScoreDistribution>,
    pub benchmark: BenchSummary,
    pub seeds: Option<SeedChain>,
}

impl Report {
    pub fn build(
        models: Vec<ModelSummary>,
        true_scores: &ScoreMatrix,
        random_scores: &ScoreMatrix,
        subset: &[&str],
        subset_label: &str,
        benchmark: BenchSummary,
        seeds: Option<SeedChain>,
    ) -> Result<Self, EvalError> {
        let names: Vec<&str> = models.iter().map(|m| m.name.as_str()).collect();
        if names != true_scores.models.iter().map(String::as_str).collect::<Vec<_>>() {
            return Err(EvalError::Parameter("model summaries do not match the score matrices".into()));
        }
        let distributions = [true_scores, random_scores]
            .iter()
            .flat_map(|m| (0..m.models.len()).map(|j| ScoreDistribution::of(m, j)))
            .collect();
        Ok(Self {
            all: win_rates(true_scores, random_scores)?,
            subset: subset_table(true_scores, random_scores, subset)?,
            subset_label: subset_label.to_string(),
            models,
            distributions,
            benchmark,
            seeds,
        })
    }
}

const TITLE: &str = "Percentage of cases of greatest and lowest similarity by model";

/// Byte-stable rendering of `report`.
pub fn render_report(report: &Report, format: Format) -> Result<String, EvalError> {
    match format {
        Format::Text => Ok(render_text(report)),
        Format::Csv => render_csv(report),
        Format::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
    }
}

fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, cell)| format!("{cell:<w$}", w = widths[c]))
            .collect();
        out.push_str(line.join(" | ").trim_end());
        out.push('\n');
        if i == 0 {
            let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
            out.push_str(&rule.join("-+-"));
            out.push('\n');
        }
    }
    out
}

fn table_text(title: &str, table: &WinRateTable) -> String {
    let mut rows = vec![vec![
        "Model".to_string(),
        "Max similarity (%)".to_string(),
        "Min similarity (%)".to_string(),
    ]];
    let (max_pct, min_pct) = (table.max.percentages(), table.min.percentages());
    for (j, name) in table.models.iter().enumerate() {
        rows.push(vec![name.clone(), max_pct[j].to_string(), min_pct[j].to_string()]);
    }
    for (label, a, b) in [
        ("Pairs compared", table.max.denominator, table.min.denominator),
        ("Ties", table.max.ties, table.min.ties),
        ("Excluded", table.max.excluded.len() as u64, table.min.excluded.len() as u64),
    ] {
        rows.push(vec![label.to_string(), a.to_string(), b.to_string()]);
    }
    format!("{TITLE} ({title})\n\n{}", aligned(&rows))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"))
}

fn render_text(report: &Report) -> String {
    let mut out = table_text("all", &report.all);
    out.push('\n');
    out.push_str(&table_text(&report.subset_label, &report.subset));
    out.push_str("\nScore distribution by model\n\n");
    let mut rows = vec![["Model", "Pairs", "n", "mean", "sd", "min", "median", "max"]
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()];
    for d in &report.distributions {
        let kind = match d.kind {
            PairKind::True => "true",
            PairKind::Random => "random",
        };
        rows.push(vec![
            d.model.clone(),
            kind.to_string(),
            d.count.to_string(),
            opt(d.mean),
            opt(d.std_dev),
            opt(d.min),
            opt(d.median),
            opt(d.max),
        ]);
    }
    out.push_str(&aligned(&rows));
    let _ = write!(
        out,
        "\nbenchmark true_pairs={} random_pairs={} reference={} seed={}\n",
        report.benchmark.true_pairs, report.benchmark.random_pairs, report.benchmark.reference, report.benchmark.seed
    );
    if let Some(seeds) = &report.seeds {
        let _ = writeln!(out, "seeds {}", seeds.to_kv_line());
    }
    out
}

fn render_csv(report: &Report) -> Result<String, EvalError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| EvalError::Io(e.into());
    w.write_record([
        "table",
        "model",
        "max_similarity_pct",
        "min_similarity_pct",
        "max_wins",
        "min_wins",
        "max_denominator",
        "min_denominator",
        "max_ties",
        "min_ties",
    ])
    .map_err(io)?;
    for (label, table) in [("all", &report.all), (report.subset_label.as_str(), &report.subset)] {
        let (max_pct, min_pct) = (table.max.percentages(), table.min.percentages());
        for (j, name) in table.models.iter().enumerate() {
            w.write_record([
                label.to_string(),
                name.clone(),
                max_pct[j].to_string(),
                min_pct[j].to_string(),
                table.max.wins[j].to_string(),
                table.min.wins[j].to_string(),
                table.max.denominator.to_string(),
                table.min.denominator.to_string(),
                table.max.ties.to_string(),
                table.min.ties.to_string(),
            ])
            .map_err(io)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| EvalError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report() -> Report {
        let names: Vec<String> = ["SBERT a", "SBERT b", "w2v"].iter().map(|s| s.to_string()).collect();
        let t = ScoreMatrix::from_scores(
            PairKind::True,
            names.clone(),
            vec![
                vec![Some(0.9), Some(0.8), Some(0.1)],
                vec![Some(0.2), Some(0.7), Some(0.3)],
                vec![Some(0.5), Some(0.5), None],
            ],
        );
        let r = ScoreMatrix::from_scores(
            PairKind::Random,
            names.clone(),
            vec![vec![Some(0.1), Some(0.3), Some(0.2)], vec![Some(0.4), Some(0.4), Some(0.4)]],
        );
        let models = names
            .iter()
            .map(|n| ModelSummary {
                name: n.clone(),
                family: if n.starts_with("SBERT") { Family::Contextual } else { Family::Static },
            })
            .collect();
        let bench = BenchSummary { true_pairs: 3, random_pairs: 2, reference: "stub".into(), seed: 1 };
        Report::build(models, &t, &r, &["SBERT a", "SBERT b"], "SBERT only", bench, Some(SeedChain::from_master(1)))
            .unwrap()
    }

    #[test]
    fn text_layout() {
        let text = render_report(&report(), Format::Text).unwrap();
        let expected_head = "\
Percentage of cases of greatest and lowest similarity by model (all)

Model          | Max similarity (%) | Min similarity (%)
---------------+--------------------+-------------------
SBERT a        | 50                 | 50
SBERT b        | 50                 | 0
w2v            | 0                  | 0
Pairs compared | 2                  | 2
Ties           | 0                  | 1
Excluded       | 1                  | 0

Percentage of cases of greatest and lowest similarity by model (SBERT only)
";
        assert!(text.starts_with(expected_head), "{text}");
        assert_eq!(text, render_report(&report(), Format::Text).unwrap());
    }

    #[test]
    fn empty_subset_still_gets_a_section() {
        let mut r = report();
        r.subset = WinRateTable::empty();
        let text = render_report(&r, Format::Text).unwrap();
        assert_eq!(text.matches(TITLE).count(), 2);
    }

    #[test]
    fn csv_round_trips() {
        let r = report();
        let csv_text = render_report(&r, Format::Csv).unwrap();
        let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
        let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), 5);
        for row in &rows {
            let table = if &row[0] == "all" { &r.all } else { &r.subset };
            let j = table.models.iter().position(|m| m == &row[1]).unwrap();
            assert_eq!(row[2].parse::<u64>().unwrap(), table.max.percentages()[j]);
            assert_eq!(row[3].parse::<u64>().unwrap(), table.min.percentages()[j]);
            assert_eq!(row[4].parse::<u64>().unwrap(), table.max.wins[j]);
            assert_eq!(row[8].parse::<u64>().unwrap(), table.max.ties);
        }
    }

    #[test]
    fn json_round_trips() {
        let r = report();
        let json = render_report(&r, Format::Json).unwrap();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(render_report(&back, Format::Json).unwrap(), json);
        assert!(json.contains("\"excluded\""));
        assert!(json.contains("\"seeds\""));
    }

    #[test]
    fn formats_parse() {
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
        assert!("xml".parse::<Format>().is_err());
    }
}
