//! Seed fan-out and counter-based random streams.
//!
//! A single master seed is expanded into per-stage seeds by hashing
//! `(master, stage name)`. Within a stage, item `i` draws from its own ChaCha
//! stream so that parallel and serial schedules consume identical randomness.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const STAGE_NEGATIVES: &str = "triplets.negatives";
pub const STAGE_SAMPLE: &str = "triplets.sample";
pub const STAGE_RANDOM_PAIRS: &str = "bench.random_pairs";
pub const STAGE_W2V: &str = "train.w2v";
pub const STAGE_DBOW: &str = "train.dbow";
pub const STAGE_DBOW_INFER: &str = "infer.dbow";

pub const ALL_STAGES: [&str; 6] = [
    STAGE_NEGATIVES,
    STAGE_SAMPLE,
    STAGE_RANDOM_PAIRS,
    STAGE_W2V,
    STAGE_DBOW,
    STAGE_DBOW_INFER,
];

/// Derives the seed of `stage` from `master`. Stable across platforms and releases.
pub fn derive_seed(master: u64, stage: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update(stage.as_bytes());
    let digest = hasher.finalize();
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(head)
}

/// Random stream number `index` under `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Resolved seeds for every stage of a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedChain {
    pub master: u64,
    pub stages: BTreeMap<String, u64>,
}

impl SeedChain {
    pub fn from_master(master: u64) -> Self {
        let stages = ALL_STAGES
            .iter()
            .map(|s| (s.to_string(), derive_seed(master, s)))
            .collect();
        Self { master, stages }
    }

    /// Replaces the derived seed of one stage.
    pub fn with_override(mut self, stage: &str, seed: u64) -> Self {
        self.stages.insert(stage.to_string(), seed);
        self
    }

    pub fn get(&self, stage: &str) -> u64 {
        self.stages
            .get(stage)
            .copied()
            .unwrap_or_else(|| derive_seed(self.master, stage))
    }

    /// `master=<m> <stage>=<seed> ...` on one line.
    pub fn to_kv_line(&self) -> String {
        let mut line = format!("master={}", self.master);
        for (stage, seed) in &self.stages {
            line.push_str(&format!(" {stage}={seed}"));
        }
        line
    }
}
