use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use patsim_core::bench::{build_benchmark, read_benchmark, read_cases, write_benchmark, BenchmarkDataset, ClaimsIndex};
use patsim_core::embed::{write_dbow, write_vectors, write_w2v, DbowModel, DenseVector, TextRef, W2vTfidfModel};
use patsim_core::eval::{
    render_report, score_all, BenchSummary, Family, Format, ModelEntry, ModelSummary, Report,
};
use patsim_core::ingest::{ingest_files, read_claim_files, read_corpus, write_corpus, PatentCorpus, CORPUS_MAGIC};
use patsim_core::seed::{SeedChain, STAGE_NEGATIVES, STAGE_RANDOM_PAIRS, STAGE_SAMPLE};
use patsim_core::triplets::{
    attach_negatives_par, enumerate_pairs_par, group_corpus, plan_split, write_index_file, write_triplets,
    NegativeIndex, SplitManifest,
};

use crate::config::RunConfig;
use crate::roster::ModelSpec;

pub const TRIPLETS_FILE: &str = "triplets.tsv";
pub const TRAIN_FILE: &str = "train.idx";
pub const VALIDATION_FILE: &str = "validation.idx";
pub const MANIFEST_FILE: &str = "manifest.json";

const HASH_STAGE: &str = "model.hash";

/// Failure of one pipeline stage; printed as `error stage=<stage> <message>`.
#[derive(Debug)]
pub struct StageError {
    pub stage: &'static str,
    pub message: String,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error stage={} {}", self.stage, self.message)
    }
}

impl std::error::Error for StageError {}

pub type StageResult<T> = Result<T, StageError>;

trait Context<T> {
    fn stage(self, stage: &'static str) -> StageResult<T>;
}

impl<T, E: fmt::Display> Context<T> for Result<T, E> {
    fn stage(self, stage: &'static str) -> StageResult<T> {
        self.map_err(|e| StageError {
            stage,
            message: e.to_string(),
        })
    }
}

fn fail<T>(stage: &'static str, message: String) -> StageResult<T> {
    Err(StageError { stage, message })
}

/// One `key=value` log record on stderr.
pub fn log(stage: &str, fields: &[(&str, String)]) {
    let mut line = format!("stage={stage}");
    for (k, v) in fields {
        line.push_str(&format!(" {k}={v}"));
    }
    eprintln!("{line}");
}

pub fn log_seeds(stage: &str, seeds: &SeedChain) {
    eprintln!("stage={stage} seeds {}", seeds.to_kv_line());
}

fn open(stage: &'static str, path: &Path) -> StageResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| StageError {
            stage,
            message: format!("cannot open {}: {e}", path.display()),
        })
}

/// Writes through a temporary sibling and renames, so a failed run never
/// leaves a truncated artifact behind.
fn write_file<F>(stage: &'static str, path: &Path, body: F) -> StageResult<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<(), String>,
{
    let err = |e: String| StageError {
        stage,
        message: format!("cannot write {}: {e}", path.display()),
    };
    ensure_parent(stage, path)?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let file = File::create(&tmp).map_err(|e| err(e.to_string()))?;
    let mut w = BufWriter::new(file);
    body(&mut w).map_err(err)?;
    w.flush().map_err(|e| err(e.to_string()))?;
    drop(w);
    fs::rename(&tmp, path).map_err(|e| err(e.to_string()))
}

fn ensure_parent(stage: &'static str, path: &Path) -> StageResult<()> {
    match path.parent().filter(|d| !d.as_os_str().is_empty()) {
        Some(dir) => fs::create_dir_all(dir).map_err(|e| StageError {
            stage,
            message: format!("cannot create {}: {e}", dir.display()),
        }),
        None => Ok(()),
    }
}

fn require(stage: &'static str, paths: &[&Path]) -> StageResult<()> {
    for p in paths {
        if !p.exists() {
            return fail(stage, format!("input not found: {}", p.display()));
        }
    }
    Ok(())
}

fn load_corpus(stage: &'static str, path: &Path) -> StageResult<PatentCorpus> {
    let reader = open(stage, path)?;
    read_corpus(reader).map_err(|e| StageError {
        stage,
        message: format!("{}: {e}", path.display()),
    })
}

pub fn ingest(cfg: &RunConfig) -> StageResult<()> {
    const STAGE: &str = "ingest";
    log_seeds(STAGE, &cfg.seeds());
    require(STAGE, &[&cfg.cpc_table, &cfg.application_table, &cfg.patent_table])?;
    let corpus = ingest_files(&cfg.cpc_table, &cfg.application_table, &cfg.patent_table, &cfg.columns()).stage(STAGE)?;
    write_file(STAGE, &cfg.corpus_file, |w| write_corpus(w, &corpus).map_err(|e| e.to_string()))?;
    let report = corpus.provenance().to_report();
    write_file(STAGE, &cfg.provenance_file, |w| w.write_all(report.as_bytes()).map_err(|e| e.to_string()))?;
    let p = corpus.provenance();
    log(
        STAGE,
        &[
            ("cpc_patents", p.cpc_patents.to_string()),
            ("dual_cpc", p.dual_cpc.to_string()),
            ("non_inventional", p.non_inventional.to_string()),
            ("no_filing_date", p.no_filing_date.to_string()),
            ("non_utility", p.non_utility.to_string()),
            ("no_abstract", p.no_abstract.to_string()),
            ("clean", p.clean.to_string()),
            ("corpus", cfg.corpus_file.display().to_string()),
        ],
    );
    Ok(())
}

pub fn triplets(cfg: &RunConfig) -> StageResult<()> {
    const STAGE: &str = "triplets";
    let seeds = cfg.seeds();
    log_seeds(STAGE, &seeds);
    let corpus = load_corpus(STAGE, &cfg.corpus_file)?;
    let groups = group_corpus(&corpus);
    let (pairs, counts) = enumerate_pairs_par(&groups);
    let index = NegativeIndex::new(&corpus);
    let seed_neg = seeds.get(STAGE_NEGATIVES);
    let triplets = attach_negatives_par(&pairs, &index, seed_neg).stage(STAGE)?;
    let split = cfg.split();
    let plan = plan_split(triplets.len(), &split, seeds.get(STAGE_SAMPLE)).stage(STAGE)?;
    let manifest = SplitManifest::new(&plan, &split, cfg.loss(), TRIPLETS_FILE, TRAIN_FILE, VALIDATION_FILE);

    let dir = &cfg.triplets_dir;
    write_file(STAGE, &dir.join(TRIPLETS_FILE), |w| {
        write_triplets(w, seed_neg, &triplets).map_err(|e| e.to_string())
    })?;
    write_file(STAGE, &dir.join(TRAIN_FILE), |w| {
        write_index_file(w, &plan.train).map_err(|e| e.to_string())
    })?;
    write_file(STAGE, &dir.join(VALIDATION_FILE), |w| {
        write_index_file(w, &plan.validation).map_err(|e| e.to_string())
    })?;
    write_file(STAGE, &dir.join(MANIFEST_FILE), |w| {
        serde_json::to_writer_pretty(&mut *w, &manifest).map_err(|e| e.to_string())?;
        writeln!(w).map_err(|e| e.to_string())
    })?;
    log(
        STAGE,
        &[
            ("patents", corpus.len().to_string()),
            ("groups", groups.len().to_string()),
            ("combinations", counts.combinations.to_string()),
            ("continuations", counts.continuations.to_string()),
            ("triplets", triplets.len().to_string()),
            ("sampled", plan.sampled().to_string()),
            ("train", plan.train.len().to_string()),
            ("validation", plan.validation.len().to_string()),
        ],
    );
    Ok(())
}

pub fn bench(cfg: &RunConfig) -> StageResult<()> {
    const STAGE: &str = "bench";
    let seeds = cfg.seeds();
    log_seeds(STAGE, &seeds);
    let paths: Vec<&Path> = cfg.claims_tables.iter().map(PathBuf::as_path).chain([cfg.cases_table.as_path()]).collect();
    require(STAGE, &paths)?;
    let reference: ModelSpec = cfg.bench_reference.parse().stage(STAGE)?;
    if let Some(p) = reference.path() {
        require(STAGE, &[p])?;
    }
    let (claims, claim_stats) = read_claim_files(&cfg.claims_tables, &cfg.columns().claims).stage(STAGE)?;
    let index = ClaimsIndex::from_claims(claims);
    let (raw, case_stats) = read_cases(open(STAGE, &cfg.cases_table)?, &cfg.case_columns()).stage(STAGE)?;
    let embedder = reference.load(seeds.get(HASH_STAGE)).stage(STAGE)?;
    let (bench, funnel) = build_benchmark(
        &raw,
        &index,
        (cfg.window_start, cfg.window_end),
        &*embedder,
        &reference.label(),
        seeds.get(STAGE_RANDOM_PAIRS),
    )
    .stage(STAGE)?;
    write_file(STAGE, &cfg.bench_file, |w| write_benchmark(w, &bench).map_err(|e| e.to_string()))?;
    let report = funnel.to_report();
    write_file(STAGE, &cfg.funnel_file, |w| w.write_all(report.as_bytes()).map_err(|e| e.to_string()))?;
    log(
        STAGE,
        &[
            ("claim_rows", claim_stats.read.to_string()),
            ("claim_malformed", claim_stats.malformed.to_string()),
            ("case_rows", case_stats.read.to_string()),
            ("cases", funnel.raw_cases.to_string()),
            ("kept", funnel.kept.to_string()),
            ("usable_claims", funnel.usable_claims.to_string()),
            ("candidate_pairs", funnel.candidate_pairs.to_string()),
            ("true_pairs", bench.true_pairs.len().to_string()),
            ("random_pairs", bench.random_pairs.len().to_string()),
        ],
    );
    Ok(())
}

fn log_losses(stage: &str, losses: &[f64], examples: u64, skipped: usize, workers: usize) {
    for (epoch, loss) in losses.iter().enumerate() {
        log(stage, &[("epoch", (epoch + 1).to_string()), ("loss", loss.to_string())]);
    }
    log(
        stage,
        &[
            ("examples", examples.to_string()),
            ("skipped_docs", skipped.to_string()),
            ("workers", workers.to_string()),
        ],
    );
}

pub fn train_w2v(cfg: &RunConfig) -> StageResult<()> {
    const STAGE: &str = "train-w2v";
    log_seeds(STAGE, &cfg.seeds());
    let corpus = load_corpus(STAGE, &cfg.corpus_file)?;
    let texts: Vec<&str> = corpus.records().map(|r| r.abstract_text.as_str()).collect();
    let (model, report) = W2vTfidfModel::<f32>::train(&texts, &cfg.w2v()).stage(STAGE)?;
    ensure_parent(STAGE, &cfg.w2v_model)?;
    write_w2v(&cfg.w2v_model, &model).stage(STAGE)?;
    log_losses(STAGE, &report.epoch_losses, report.examples, report.skipped_docs, report.workers);
    log(STAGE, &[("vocabulary", model.vocab().len().to_string()), ("model", cfg.w2v_model.display().to_string())]);
    Ok(())
}

pub fn train_dbow(cfg: &RunConfig) -> StageResult<()> {
    const STAGE: &str = "train-dbow";
    log_seeds(STAGE, &cfg.seeds());
    let corpus = load_corpus(STAGE, &cfg.corpus_file)?;
    let docs: Vec<(&str, &str)> = corpus
        .records()
        .map(|r| (r.patent_id.as_str(), r.abstract_text.as_str()))
        .collect();
    let (model, report) = DbowModel::<f32>::train(&docs, &cfg.dbow()).stage(STAGE)?;
    ensure_parent(STAGE, &cfg.dbow_model)?;
    write_dbow(&cfg.dbow_model, &model).stage(STAGE)?;
    log_losses(STAGE, &report.epoch_losses, report.examples, report.skipped_docs, report.workers);
    log(STAGE, &[("documents", model.doc_ids().len().to_string()), ("model", cfg.dbow_model.display().to_string())]);
    Ok(())
}

/// `model` is a roster name or a literal spec such as `w2v:out/w2v.ckpt`.
fn resolve_model(cfg: &RunConfig, model: &str) -> StageResult<ModelSpec> {
    const STAGE: &str = "embed";
    let roster = cfg.roster().stage(STAGE)?;
    if let Some((_, spec)) = roster.into_iter().find(|(n, _)| n == model) {
        return Ok(spec);
    }
    match model {
        "w2v" => Ok(ModelSpec::W2v(cfg.w2v_model.clone())),
        "dbow" => Ok(ModelSpec::Dbow(cfg.dbow_model.clone())),
        other => other.parse().stage(STAGE),
    }
}

/// Reads `id\ttext` lines, or a corpus file (embedding the abstracts).
fn read_texts(path: &Path) -> StageResult<Vec<(String, String)>> {
    const STAGE: &str = "embed";
    let mut reader = open(STAGE, path)?;
    let head = reader.fill_buf().stage(STAGE)?;
    if head.starts_with(CORPUS_MAGIC.as_bytes()) {
        let corpus = read_corpus(reader).stage(STAGE)?;
        return Ok(corpus
            .records()
            .map(|r| (r.patent_id.clone(), r.abstract_text.clone()))
            .collect());
    }
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.stage(STAGE)?;
        if line.trim().is_empty() {
            continue;
        }
        let Some((id, text)) = line.split_once('\t') else {
            return fail(STAGE, format!("{} line {}: expected id<TAB>text", path.display(), i + 1));
        };
        out.push((id.to_string(), text.to_string()));
    }
    Ok(out)
}

pub fn embed(cfg: &RunConfig, model: &str, input: &Path, output: &Path) -> StageResult<()> {
    const STAGE: &str = "embed";
    let seeds = cfg.seeds();
    log_seeds(STAGE, &seeds);
    let spec = resolve_model(cfg, model)?;
    require(STAGE, &[input])?;
    if let Some(p) = spec.path() {
        require(STAGE, &[p])?;
    }
    let embedder = spec.load(seeds.get(HASH_STAGE)).stage(STAGE)?;
    let texts = read_texts(input)?;
    let vectors = {
        use rayon::prelude::*;
        texts
            .par_iter()
            .map(|(id, text)| {
                embedder
                    .embed(TextRef::new(id, text))
                    .map(|v| (id.as_str(), v))
                    .map_err(|e| StageError {
                        stage: STAGE,
                        message: format!("input `{id}`: {e}"),
                    })
            })
            .collect::<StageResult<Vec<(&str, DenseVector<f32>)>>>()?
    };
    write_file(STAGE, output, |w| {
        write_vectors(w, &spec.label(), embedder.dim(), &vectors).map_err(|e| e.to_string())
    })?;
    log(
        STAGE,
        &[
            ("model", spec.label()),
            ("vectors", vectors.len().to_string()),
            ("dim", embedder.dim().to_string()),
            ("output", output.display().to_string()),
        ],
    );
    Ok(())
}

fn load_bench(stage: &'static str, path: &Path) -> StageResult<BenchmarkDataset> {
    let reader = open(stage, path)?;
    read_benchmark(reader).map_err(|e| StageError {
        stage,
        message: format!("{}: {e}", path.display()),
    })
}

pub fn eval(cfg: &RunConfig, format: Format) -> StageResult<()> {
    const STAGE: &str = "eval";
    let seeds = cfg.seeds();
    log_seeds(STAGE, &seeds);
    let roster = cfg.roster().stage(STAGE)?;
    if roster.is_empty() {
        return fail(STAGE, "config lists no models".into());
    }
    let model_paths: Vec<&Path> = roster.iter().filter_map(|(_, s)| s.path()).collect();
    require(STAGE, &model_paths)?;
    let bench = load_bench(STAGE, &cfg.bench_file)?;
    let mut entries = Vec::with_capacity(roster.len());
    let mut summaries = Vec::with_capacity(roster.len());
    for (name, spec) in &roster {
        let family = if cfg.contextual_models.contains(name) {
            Family::Contextual
        } else {
            Family::Static
        };
        let embedder = spec.load(seeds.get(HASH_STAGE)).map_err(|e| StageError {
            stage: STAGE,
            message: format!("model `{name}` ({spec}): {e}"),
        })?;
        entries.push(ModelEntry::new(name.clone(), family, Arc::clone(&embedder)));
        summaries.push(ModelSummary {
            name: name.clone(),
            family,
        });
    }
    let (t, r) = score_all(&entries, &bench).stage(STAGE)?;
    let subset: Vec<&str> = cfg.subset_models.iter().map(String::as_str).collect();
    let summary = BenchSummary {
        true_pairs: bench.true_pairs.len(),
        random_pairs: bench.random_pairs.len(),
        reference: bench.reference.clone(),
        seed: bench.seed,
    };
    let report = Report::build(summaries, &t, &r, &subset, &cfg.subset_label, summary, Some(seeds)).stage(STAGE)?;
    let json = render_report(&report, Format::Json).stage(STAGE)?;
    write_file(STAGE, &cfg.scores_file, |w| w.write_all(json.as_bytes()).map_err(|e| e.to_string()))?;
    let rendered = render_report(&report, format).stage(STAGE)?;
    write_file(STAGE, &cfg.report_file, |w| w.write_all(rendered.as_bytes()).map_err(|e| e.to_string()))?;
    log(
        STAGE,
        &[
            ("models", roster.len().to_string()),
            ("true_rows", t.rows.len().to_string()),
            ("random_rows", r.rows.len().to_string()),
            ("report", cfg.report_file.display().to_string()),
        ],
    );
    Ok(())
}

/// Re-renders the JSON report written by `eval`.
pub fn report(cfg: &RunConfig, format: Format, input: Option<&Path>, output: Option<&Path>) -> StageResult<()> {
    const STAGE: &str = "report";
    log_seeds(STAGE, &cfg.seeds());
    let input = input.unwrap_or(&cfg.scores_file);
    let mut text = String::new();
    io::Read::read_to_string(&mut open(STAGE, input)?, &mut text).stage(STAGE)?;
    let report: Report = serde_json::from_str(&text).map_err(|e| StageError {
        stage: STAGE,
        message: format!("{}: {e}", input.display()),
    })?;
    let rendered = render_report(&report, format).stage(STAGE)?;
    match output {
        Some(p) => write_file(STAGE, p, |w| w.write_all(rendered.as_bytes()).map_err(|e| e.to_string())),
        None => io::stdout().write_all(rendered.as_bytes()).stage(STAGE),
    }
}
