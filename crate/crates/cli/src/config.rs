//! Flat TOML run configuration.
//!
//! Every key is optional; missing keys take the defaults below. Unknown keys
//! are rejected so that typos fail before any input is read.

use std::path::{Path, PathBuf};

use patsim_core::bench::{CaseColumns, DEFAULT_WINDOW};
use patsim_core::embed::{DbowConfig, Distance, IdfVariant, LrSchedule, Pooling, TripletLossConfig, W2vConfig};
use patsim_core::ingest::ColumnMap;
use patsim_core::seed::{
    SeedChain, STAGE_DBOW, STAGE_DBOW_INFER, STAGE_NEGATIVES, STAGE_RANDOM_PAIRS, STAGE_SAMPLE, STAGE_W2V,
};
use patsim_core::triplets::SplitConfig;
use serde::{Deserialize, Serialize};

use crate::roster::ModelSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub seed_triplets_negatives: Option<u64>,
    pub seed_triplets_sample: Option<u64>,
    pub seed_bench_random_pairs: Option<u64>,
    pub seed_train_w2v: Option<u64>,
    pub seed_train_dbow: Option<u64>,
    pub seed_infer_dbow: Option<u64>,
    /// 0 means one worker per core.
    pub workers: usize,
    pub deterministic: bool,

    pub cpc_table: PathBuf,
    pub application_table: PathBuf,
    pub patent_table: PathBuf,
    pub claims_tables: Vec<PathBuf>,
    pub cases_table: PathBuf,

    pub corpus_file: PathBuf,
    pub provenance_file: PathBuf,
    pub triplets_dir: PathBuf,
    pub bench_file: PathBuf,
    pub funnel_file: PathBuf,
    pub w2v_model: PathBuf,
    pub dbow_model: PathBuf,
    pub scores_file: PathBuf,
    pub report_file: PathBuf,

    pub cpc_patent_id_column: String,
    pub cpc_section_column: String,
    pub cpc_class_column: String,
    pub cpc_subclass_column: String,
    pub cpc_group_column: String,
    pub cpc_subgroup_column: String,
    pub cpc_type_column: String,
    pub application_patent_id_column: String,
    pub application_filing_date_column: String,
    pub patent_id_column: String,
    pub patent_type_column: String,
    pub patent_abstract_column: String,
    pub utility_value: String,
    pub claim_patent_id_column: String,
    pub claim_sequence_column: String,
    pub claim_text_column: String,
    pub claim_dependency_column: String,
    pub claim_sequence_offset: u32,
    pub case_interference_column: String,
    pub case_application_column: String,
    pub case_filing_date_column: String,
    pub case_delimiter: char,

    pub sample_fraction: f64,
    pub train_fraction: f64,
    pub validation_fraction: f64,
    pub triplet_margin: f64,
    pub triplet_batch_size: usize,
    pub triplet_epochs: usize,
    pub triplet_validation_every: usize,

    pub window_start: i32,
    pub window_end: i32,
    pub bench_reference: String,

    pub w2v_dim: usize,
    pub w2v_window: usize,
    pub w2v_negatives: usize,
    pub w2v_epochs: usize,
    pub w2v_min_count: u64,
    pub w2v_lr_start: f64,
    pub w2v_lr_end: f64,
    pub w2v_idf: IdfVariant,

    pub dbow_dim: usize,
    pub dbow_negatives: usize,
    pub dbow_epochs: usize,
    pub dbow_min_count: u64,
    pub dbow_lr_start: f64,
    pub dbow_lr_end: f64,
    pub dbow_infer_epochs: usize,

    /// Roster entries `name=kind:arg`, kind one of `vecs`, `w2v`, `dbow`, `hash`.
    pub models: Vec<String>,
    /// Roster names that are contextual encoders; the rest are static.
    pub contextual_models: Vec<String>,
    pub subset_models: Vec<String>,
    pub subset_label: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        let columns = ColumnMap::default();
        let cases = CaseColumns::default();
        let split = SplitConfig::default();
        let loss = TripletLossConfig::default();
        let w2v = W2vConfig::default();
        let dbow = DbowConfig::default();
        Self {
            seed: 0,
            seed_triplets_negatives: None,
            seed_triplets_sample: None,
            seed_bench_random_pairs: None,
            seed_train_w2v: None,
            seed_train_dbow: None,
            seed_infer_dbow: None,
            workers: 0,
            deterministic: true,

            cpc_table: "data/cpc_current.tsv".into(),
            application_table: "data/application.tsv".into(),
            patent_table: "data/patent.tsv".into(),
            claims_tables: vec!["data/claims.tsv".into()],
            cases_table: "data/interference.tsv".into(),

            corpus_file: "out/corpus.tsv".into(),
            provenance_file: "out/provenance.txt".into(),
            triplets_dir: "out/triplets".into(),
            bench_file: "out/bench.tsv".into(),
            funnel_file: "out/funnel.txt".into(),
            w2v_model: "out/w2v.ckpt".into(),
            dbow_model: "out/dbow.ckpt".into(),
            scores_file: "out/report.json".into(),
            report_file: "out/report.txt".into(),

            cpc_patent_id_column: columns.cpc.patent_id,
            cpc_section_column: columns.cpc.section,
            cpc_class_column: columns.cpc.class_,
            cpc_subclass_column: columns.cpc.subclass,
            cpc_group_column: columns.cpc.group,
            cpc_subgroup_column: columns.cpc.subgroup,
            cpc_type_column: columns.cpc.assignment_type,
            application_patent_id_column: columns.application.patent_id,
            application_filing_date_column: columns.application.filing_date,
            patent_id_column: columns.patent.patent_id,
            patent_type_column: columns.patent.patent_type,
            patent_abstract_column: columns.patent.abstract_text,
            utility_value: columns.patent.utility_value,
            claim_patent_id_column: columns.claims.patent_id,
            claim_sequence_column: columns.claims.sequence,
            claim_text_column: columns.claims.text,
            claim_dependency_column: columns.claims.dependency,
            claim_sequence_offset: columns.claims.sequence_offset,
            case_interference_column: cases.interference_no,
            case_application_column: cases.application_id,
            case_filing_date_column: cases.filing_date,
            case_delimiter: cases.delimiter,

            sample_fraction: split.sample_fraction,
            train_fraction: split.train_fraction,
            validation_fraction: split.validation_fraction,
            triplet_margin: loss.margin,
            triplet_batch_size: loss.batch_size,
            triplet_epochs: loss.epochs,
            triplet_validation_every: loss.validation_every,

            window_start: DEFAULT_WINDOW.0,
            window_end: DEFAULT_WINDOW.1,
            bench_reference: "hash:300".into(),

            w2v_dim: w2v.dim,
            w2v_window: w2v.window,
            w2v_negatives: w2v.negatives,
            w2v_epochs: w2v.epochs,
            w2v_min_count: w2v.min_count,
            w2v_lr_start: w2v.schedule.start,
            w2v_lr_end: w2v.schedule.end,
            w2v_idf: w2v.idf,

            dbow_dim: dbow.dim,
            dbow_negatives: dbow.negatives,
            dbow_epochs: dbow.epochs,
            dbow_min_count: dbow.min_count,
            dbow_lr_start: dbow.schedule.start,
            dbow_lr_end: dbow.schedule.end,
            dbow_infer_epochs: dbow.infer_epochs,

            models: Vec::new(),
            contextual_models: Vec::new(),
            subset_models: Vec::new(),
            subset_label: "subset".into(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: toml::de::Error,
    },
    #[error("config: {0}")]
    Invalid(String),
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text).map_err(|source| ConfigError::Parse {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("RunConfig serializes to TOML")
    }

    /// Relative paths in the file are taken relative to the file's directory.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [
            &mut self.cpc_table,
            &mut self.application_table,
            &mut self.patent_table,
            &mut self.cases_table,
            &mut self.corpus_file,
            &mut self.provenance_file,
            &mut self.triplets_dir,
            &mut self.bench_file,
            &mut self.funnel_file,
            &mut self.w2v_model,
            &mut self.dbow_model,
            &mut self.scores_file,
            &mut self.report_file,
        ] {
            fix(p);
        }
        self.claims_tables.iter_mut().for_each(fix);
        for entry in &mut self.models {
            let Some((name, spec)) = entry.split_once('=') else { continue };
            if let Ok(mut m) = spec.parse::<ModelSpec>() {
                if m.resolve_path(base) {
                    *entry = format!("{name}={m}");
                }
            }
        }
        if let Ok(mut m) = self.bench_reference.parse::<ModelSpec>() {
            if m.resolve_path(base) {
                self.bench_reference = m.to_string();
            }
        }
    }

    pub fn seeds(&self) -> SeedChain {
        let mut chain = SeedChain::from_master(self.seed);
        for (stage, value) in [
            (STAGE_NEGATIVES, self.seed_triplets_negatives),
            (STAGE_SAMPLE, self.seed_triplets_sample),
            (STAGE_RANDOM_PAIRS, self.seed_bench_random_pairs),
            (STAGE_W2V, self.seed_train_w2v),
            (STAGE_DBOW, self.seed_train_dbow),
            (STAGE_DBOW_INFER, self.seed_infer_dbow),
        ] {
            if let Some(v) = value {
                chain = chain.with_override(stage, v);
            }
        }
        chain
    }

    /// Worker count for model training. Deterministic mode pins it to one
    /// unless set explicitly, since results depend on the partition count.
    pub fn train_workers(&self) -> usize {
        match (self.workers, self.deterministic) {
            (0, true) => 1,
            (0, false) => std::thread::available_parallelism().map_or(1, |n| n.get()),
            (n, _) => n,
        }
    }

    pub fn columns(&self) -> ColumnMap {
        let mut c = ColumnMap::default();
        c.cpc.patent_id = self.cpc_patent_id_column.clone();
        c.cpc.section = self.cpc_section_column.clone();
        c.cpc.class_ = self.cpc_class_column.clone();
        c.cpc.subclass = self.cpc_subclass_column.clone();
        c.cpc.group = self.cpc_group_column.clone();
        c.cpc.subgroup = self.cpc_subgroup_column.clone();
        c.cpc.assignment_type = self.cpc_type_column.clone();
        c.application.patent_id = self.application_patent_id_column.clone();
        c.application.filing_date = self.application_filing_date_column.clone();
        c.patent.patent_id = self.patent_id_column.clone();
        c.patent.patent_type = self.patent_type_column.clone();
        c.patent.abstract_text = self.patent_abstract_column.clone();
        c.patent.utility_value = self.utility_value.clone();
        c.claims.patent_id = self.claim_patent_id_column.clone();
        c.claims.sequence = self.claim_sequence_column.clone();
        c.claims.text = self.claim_text_column.clone();
        c.claims.dependency = self.claim_dependency_column.clone();
        c.claims.sequence_offset = self.claim_sequence_offset;
        c
    }

    pub fn case_columns(&self) -> CaseColumns {
        CaseColumns {
            interference_no: self.case_interference_column.clone(),
            application_id: self.case_application_column.clone(),
            filing_date: self.case_filing_date_column.clone(),
            delimiter: self.case_delimiter,
        }
    }

    pub fn split(&self) -> SplitConfig {
        SplitConfig {
            sample_fraction: self.sample_fraction,
            train_fraction: self.train_fraction,
            validation_fraction: self.validation_fraction,
        }
    }

    pub fn loss(&self) -> TripletLossConfig {
        TripletLossConfig {
            margin: self.triplet_margin,
            distance: Distance::Euclidean,
            pooling: Pooling::Mean,
            batch_size: self.triplet_batch_size,
            epochs: self.triplet_epochs,
            validation_every: self.triplet_validation_every,
        }
    }

    pub fn w2v(&self) -> W2vConfig {
        W2vConfig {
            dim: self.w2v_dim,
            window: self.w2v_window,
            negatives: self.w2v_negatives,
            epochs: self.w2v_epochs,
            schedule: LrSchedule {
                start: self.w2v_lr_start,
                end: self.w2v_lr_end,
            },
            min_count: self.w2v_min_count,
            seed: self.seeds().get(STAGE_W2V),
            workers: self.train_workers(),
            idf: self.w2v_idf,
        }
    }

    pub fn dbow(&self) -> DbowConfig {
        let seeds = self.seeds();
        DbowConfig {
            dim: self.dbow_dim,
            negatives: self.dbow_negatives,
            epochs: self.dbow_epochs,
            schedule: LrSchedule {
                start: self.dbow_lr_start,
                end: self.dbow_lr_end,
            },
            min_count: self.dbow_min_count,
            seed: seeds.get(STAGE_DBOW),
            workers: self.train_workers(),
            infer_epochs: self.dbow_infer_epochs,
            infer_seed: seeds.get(STAGE_DBOW_INFER),
        }
    }

    pub fn roster(&self) -> Result<Vec<(String, ModelSpec)>, ConfigError> {
        let mut out: Vec<(String, ModelSpec)> = Vec::new();
        for entry in &self.models {
            let (name, spec) = entry
                .split_once('=')
                .ok_or_else(|| ConfigError::Invalid(format!("model entry `{entry}` is not name=kind:arg")))?;
            let name = name.trim();
            if name.is_empty() || name.contains(['\t', '\n', ',', '|']) {
                return Err(ConfigError::Invalid(format!("invalid model name in `{entry}`")));
            }
            if out.iter().any(|(n, _)| n == name) {
                return Err(ConfigError::Invalid(format!("duplicate model name `{name}`")));
            }
            let spec = spec.parse::<ModelSpec>().map_err(ConfigError::Invalid)?;
            out.push((name.to_string(), spec));
        }
        Ok(out)
    }

    /// Checks everything that can be checked without opening an input.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| ConfigError::Invalid(m);
        self.split().validate().map_err(|e| invalid(e.to_string()))?;
        self.loss().validate().map_err(|e| invalid(e.to_string()))?;
        self.w2v().validate().map_err(|e| invalid(e.to_string()))?;
        self.dbow().validate().map_err(|e| invalid(e.to_string()))?;
        if self.window_start > self.window_end {
            return Err(invalid(format!(
                "window_start {} is after window_end {}",
                self.window_start, self.window_end
            )));
        }
        if self.claims_tables.is_empty() {
            return Err(invalid("claims_tables is empty".into()));
        }
        self.bench_reference
            .parse::<ModelSpec>()
            .map_err(|e| invalid(format!("bench_reference: {e}")))?;
        let roster = self.roster()?;
        for name in self.contextual_models.iter().chain(&self.subset_models) {
            if !roster.iter().any(|(n, _)| n == name) {
                return Err(invalid(format!("`{name}` is not in the model roster")));
            }
        }
        if self.subset_label.contains(['\n', '\r']) {
            return Err(invalid("subset_label must be a single line".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
        c.validate().unwrap();
    }

    #[test]
    fn edited_config_round_trips() {
        let c = RunConfig {
            seed: 99,
            seed_train_w2v: Some(5),
            models: vec!["a=hash:16".into(), "b=vecs:x.vecs".into()],
            contextual_models: vec!["b".into()],
            subset_models: vec!["a".into(), "b".into()],
            case_delimiter: ',',
            w2v_idf: IdfVariant::RawLog,
            ..RunConfig::default()
        };
        let back = RunConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.seeds().get(STAGE_W2V), 5);
        back.validate().unwrap();
    }

    #[test]
    fn unknown_keys_and_bad_values_fail() {
        assert!(RunConfig::from_toml("sed = 3").is_err());
        let c = RunConfig::from_toml("sample_fraction = 1.5").unwrap();
        assert!(c.validate().is_err());
        let c = RunConfig::from_toml("models = [\"a=hash:4\", \"a=hash:8\"]").unwrap();
        assert!(c.validate().is_err());
        let c = RunConfig::from_toml("subset_models = [\"ghost\"]").unwrap();
        assert!(c.validate().is_err());
        let c = RunConfig::from_toml("window_start = 2015").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn deterministic_mode_pins_training_workers() {
        let c = RunConfig::default();
        assert_eq!(c.train_workers(), 1);
        let c = RunConfig { workers: 3, ..c };
        assert_eq!(c.train_workers(), 3);
    }
}
