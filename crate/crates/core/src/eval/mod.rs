//! Scores benchmark pairs under every model and counts max/min cosine wins.

mod report;

pub use report::{render_report, BenchSummary, Format, ModelSummary, Report, ScoreDistribution};

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bench::{BenchmarkDataset, ClaimPair};
use crate::embed::{cosine, DenseVector, EmbedError, Embedder, TextRef};
use crate::ingest::ClaimRecord;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("report: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Static,
    Contextual,
}

pub struct ModelEntry<T> {
    pub name: String,
    pub family: Family,
    pub embedder: Arc<dyn Embedder<T>>,
}

impl<T> ModelEntry<T> {
    pub fn new(name: impl Into<String>, family: Family, embedder: Arc<dyn Embedder<T>>) -> Self {
        Self {
            name: name.into(),
            family,
            embedder,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairKind {
    True,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UndefinedReason {
    NoKnownTokens,
    ZeroVector,
    UnknownId,
    DimMismatch,
    Other,
}

impl UndefinedReason {
    fn of(err: &EmbedError) -> Self {
        match err {
            EmbedError::NoKnownTokens(_) => Self::NoKnownTokens,
            EmbedError::ZeroVector => Self::ZeroVector,
            EmbedError::UnknownId(_) => Self::UnknownId,
            EmbedError::DimMismatch { .. } => Self::DimMismatch,
            _ => Self::Other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cell {
    Score(f64),
    Undefined(UndefinedReason),
}

impl Cell {
    pub fn score(&self) -> Option<f64> {
        match self {
            Cell::Score(s) => Some(*s),
            Cell::Undefined(_) => None,
        }
    }
}

/// Rows are benchmark pairs, columns are models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    pub kind: PairKind,
    pub models: Vec<String>,
    pub rows: Vec<String>,
    pub cells: Vec<Vec<Cell>>,
}

impl ScoreMatrix {
    /// Builds a matrix from plain scores, `None` meaning undefined.
    pub fn from_scores(kind: PairKind, models: Vec<String>, scores: Vec<Vec<Option<f64>>>) -> Self {
        let rows = (0..scores.len()).map(|i| i.to_string()).collect();
        let cells = scores
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|s| s.map_or(Cell::Undefined(UndefinedReason::Other), Cell::Score))
                    .collect()
            })
            .collect();
        Self {
            kind,
            models,
            rows,
            cells,
        }
    }

    /// Columns `names`, in that order.
    pub fn restrict(&self, names: &[&str]) -> Result<Self, EvalError> {
        let idx = names
            .iter()
            .map(|n| {
                self.models
                    .iter()
                    .position(|m| m == n)
                    .ok_or_else(|| EvalError::Parameter(format!("unknown model `{n}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            kind: self.kind,
            models: names.iter().map(|n| n.to_string()).collect(),
            rows: self.rows.clone(),
            cells: self.cells.iter().map(|r| idx.iter().map(|&j| r[j]).collect()).collect(),
        })
    }
}

fn row_label(pair: &ClaimPair) -> String {
    match &pair.partner_interference {
        Some(p) => format!("{}+{}", pair.interference_no, p),
        None => pair.interference_no.clone(),
    }
}

/// Cosine of every (pair, model) cell for the true and the random pairs.
pub fn score_all<T: Scalar>(
    models: &[ModelEntry<T>],
    bench: &BenchmarkDataset,
) -> Result<(ScoreMatrix, ScoreMatrix), EvalError> {
    if models.is_empty() {
        return Err(EvalError::Parameter("no models registered".into()));
    }
    let mut names = HashSet::new();
    for m in models {
        if !names.insert(m.name.as_str()) {
            return Err(EvalError::Parameter(format!("duplicate model name `{}`", m.name)));
        }
    }
    let mut claims: Vec<&ClaimRecord> = Vec::new();
    let mut seen = HashSet::new();
    for p in bench.true_pairs.iter().chain(&bench.random_pairs) {
        for c in [&p.claim_a, &p.claim_b] {
            if seen.insert(c.claim_id()) {
                claims.push(c);
            }
        }
    }
    let embedded: Vec<HashMap<String, Result<DenseVector<T>, UndefinedReason>>> = models
        .iter()
        .map(|m| {
            claims
                .par_iter()
                .map(|c| {
                    let id = c.claim_id();
                    let v = m
                        .embedder
                        .embed(TextRef::new(&id, &c.text))
                        .map_err(|e| UndefinedReason::of(&e));
                    (id, v)
                })
                .collect()
        })
        .collect();
    let matrix = |kind: PairKind, pairs: &[ClaimPair]| -> ScoreMatrix {
        let cells = pairs
            .par_iter()
            .map(|p| {
                embedded
                    .iter()
                    .map(|vectors| {
                        let a = &vectors[&p.claim_a.claim_id()];
                        let b = &vectors[&p.claim_b.claim_id()];
                        match (a, b) {
                            (Ok(a), Ok(b)) => match cosine(a, b) {
                                Ok(s) => Cell::Score(s.as_f64()),
                                Err(e) => Cell::Undefined(UndefinedReason::of(&e)),
                            },
                            (Err(r), _) | (_, Err(r)) => Cell::Undefined(*r),
                        }
                    })
                    .collect()
            })
            .collect();
        ScoreMatrix {
            kind,
            models: models.iter().map(|m| m.name.clone()).collect(),
            rows: pairs.iter().map(row_label).collect(),
            cells,
        }
    };
    Ok((
        matrix(PairKind::True, &bench.true_pairs),
        matrix(PairKind::Random, &bench.random_pairs),
    ))
}

/// A row left out of a denominator, with the first model undefined on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub row: String,
    pub model: String,
    pub reason: UndefinedReason,
}

/// Win counts of one table column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WinColumn {
    pub wins: Vec<u64>,
    pub ties: u64,
    pub denominator: u64,
    pub excluded: Vec<Exclusion>,
}

impl WinColumn {
    fn count(matrix: &ScoreMatrix, highest: bool) -> Self {
        let mut col = WinColumn {
            wins: vec![0; matrix.models.len()],
            ties: 0,
            denominator: 0,
            excluded: Vec::new(),
        };
        if matrix.models.is_empty() {
            return col;
        }
        'rows: for (label, row) in matrix.rows.iter().zip(&matrix.cells) {
            let mut scores = Vec::with_capacity(row.len());
            for (j, cell) in row.iter().enumerate() {
                match cell {
                    Cell::Score(s) => scores.push(*s),
                    Cell::Undefined(reason) => {
                        col.excluded.push(Exclusion {
                            row: label.clone(),
                            model: matrix.models[j].clone(),
                            reason: *reason,
                        });
                        continue 'rows;
                    }
                }
            }
            col.denominator += 1;
            let best = scores
                .iter()
                .copied()
                .reduce(if highest { f64::max } else { f64::min })
                .expect("non-empty roster");
            let mut at_best = scores.iter().enumerate().filter(|(_, &s)| s == best);
            let first = at_best.next().map(|(j, _)| j).expect("best is attained");
            if at_best.next().is_some() {
                col.ties += 1;
            } else {
                col.wins[first] += 1;
            }
        }
        col
    }

    /// Integer percentages, rounded half away from zero.
    pub fn percentages(&self) -> Vec<u64> {
        self.wins.iter().map(|&w| percent(w, self.denominator)).collect()
    }
}

pub fn percent(wins: u64, denominator: u64) -> u64 {
    if denominator == 0 {
        0
    } else {
        (100.0 * wins as f64 / denominator as f64).round() as u64
    }
}

/// Max-similarity wins on true pairs and min-similarity wins on random pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WinRateTable {
    pub models: Vec<String>,
    pub max: WinColumn,
    pub min: WinColumn,
}

impl WinRateTable {
    pub fn empty() -> Self {
        let column = WinColumn {
            wins: Vec::new(),
            ties: 0,
            denominator: 0,
            excluded: Vec::new(),
        };
        Self {
            models: Vec::new(),
            max: column.clone(),
            min: column,
        }
    }
}

pub fn win_rates(true_scores: &ScoreMatrix, random_scores: &ScoreMatrix) -> Result<WinRateTable, EvalError> {
    if true_scores.models != random_scores.models {
        return Err(EvalError::Parameter("true and random matrices have different rosters".into()));
    }
    if true_scores.models.is_empty() {
        return Err(EvalError::Parameter("empty model roster".into()));
    }
    if true_scores.rows.is_empty() || random_scores.rows.is_empty() {
        return Err(EvalError::Parameter("empty score matrix".into()));
    }
    let table = WinRateTable {
        models: true_scores.models.clone(),
        max: WinColumn::count(true_scores, true),
        min: WinColumn::count(random_scores, false),
    };
    if table.max.denominator == 0 || table.min.denominator == 0 {
        return Err(EvalError::Parameter(
            "every row has an undefined score; denominator is zero".into(),
        ));
    }
    Ok(table)
}

/// Win rates recomputed on the columns `names` only. An empty list gives an empty table.
pub fn subset_table(
    true_scores: &ScoreMatrix,
    random_scores: &ScoreMatrix,
    names: &[&str],
) -> Result<WinRateTable, EvalError> {
    let unique: HashSet<&&str> = names.iter().collect();
    if unique.len() != names.len() {
        return Err(EvalError::Parameter("subset repeats a model name".into()));
    }
    let (t, r) = (true_scores.restrict(names)?, random_scores.restrict(names)?);
    if names.is_empty() {
        return Ok(WinRateTable::empty());
    }
    win_rates(&t, &r)
}
