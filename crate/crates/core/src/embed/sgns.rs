//! Skip-gram negative-sampling objective, its gradient, the SGD step, and
//! the epoch driver shared by word2vec and PV-DBOW.
//!
//! For an input vector `v`, a positive output row `u_o` and negative rows
//! `u_k` the per-sample loss is
//!
//! ```text
//! L = -ln σ(u_o · v) - Σ_k ln σ(-u_k · v)
//! ```
//!
//! Negatives that coincide with the positive target are skipped, as in the
//! reference word2vec implementation.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::EmbedError;
use crate::scalar::{axpy, dot, log_sigmoid, sigmoid, Scalar};
use crate::seed::stream_rng;

/// Draws negatives from the unigram distribution raised to the 3/4 power.
#[derive(Debug, Clone)]
pub struct NegativeSampler {
    dist: WeightedIndex<f64>,
}

impl NegativeSampler {
    pub const POWER: f64 = 0.75;

    pub fn new(counts: &[u64]) -> Result<Self, EmbedError> {
        let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(Self::POWER)).collect();
        let dist = WeightedIndex::new(weights)
            .map_err(|e| EmbedError::Parameter(format!("negative sampler: {e}")))?;
        Ok(Self { dist })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.dist.sample(rng)
    }

    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<usize>, k: usize) {
        out.clear();
        out.extend((0..k).map(|_| self.sample(rng)));
    }
}

/// Linear learning-rate decay from `start` to `end` over training progress.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrSchedule {
    pub start: f64,
    pub end: f64,
}

impl LrSchedule {
    pub const fn constant(lr: f64) -> Self {
        Self { start: lr, end: lr }
    }

    /// `progress` in [0, 1].
    pub fn at(&self, progress: f64) -> f64 {
        let p = progress.clamp(0.0, 1.0);
        self.start - (self.start - self.end) * p
    }
}

impl Default for LrSchedule {
    fn default() -> Self {
        Self {
            start: 0.025,
            end: 0.0001,
        }
    }
}

pub fn sgns_loss<T: Scalar>(input: &[T], output: &Matrix<T>, target: usize, negatives: &[usize]) -> T {
    let mut loss = -log_sigmoid(dot(output.row(target), input));
    for &k in negatives.iter().filter(|&&k| k != target) {
        loss -= log_sigmoid(-dot(output.row(k), input));
    }
    loss
}

/// Gradient of [`sgns_loss`] with respect to the input vector and every
/// output row it touches. Repeated negatives appear once per occurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct SgnsGradient<T> {
    pub input: Vec<T>,
    pub outputs: Vec<(usize, Vec<T>)>,
}

pub fn sgns_gradient<T: Scalar>(
    input: &[T],
    output: &Matrix<T>,
    target: usize,
    negatives: &[usize],
) -> SgnsGradient<T> {
    let mut grad_input = vec![T::zero(); input.len()];
    let mut outputs = Vec::with_capacity(negatives.len() + 1);
    let mut push = |row: usize, coeff: T| {
        // d/dv += coeff * u ; d/du = coeff * v
        axpy(coeff, output.row(row), &mut grad_input);
        outputs.push((row, input.iter().map(|&x| coeff * x).collect()));
    };
    let f = dot(output.row(target), input);
    push(target, sigmoid(f) - T::one());
    for &k in negatives.iter().filter(|&&k| k != target) {
        let f = dot(output.row(k), input);
        push(k, sigmoid(f));
    }
    SgnsGradient {
        input: grad_input,
        outputs,
    }
}

/// One SGD step on both the input vector and the touched output rows.
/// Returns the loss evaluated before the update.
pub fn sgns_step<T: Scalar>(
    input: &mut [T],
    output: &mut Matrix<T>,
    target: usize,
    negatives: &[usize],
    lr: T,
    scratch: &mut Vec<T>,
) -> T {
    scratch.clear();
    scratch.resize(input.len(), T::zero());
    let mut loss = T::zero();
    let targets = std::iter::once((target, true))
        .chain(negatives.iter().filter(|&&k| k != target).map(|&k| (k, false)));
    for (row, positive) in targets {
        let f = dot(output.row(row), input);
        let (coeff, l) = if positive {
            (sigmoid(f) - T::one(), -log_sigmoid(f))
        } else {
            (sigmoid(f), -log_sigmoid(-f))
        };
        loss += l;
        axpy(coeff, output.row(row), scratch);
        axpy(-lr * coeff, input, output.row_mut(row));
    }
    axpy(-lr, scratch, input);
    loss
}

/// As [`sgns_step`] with the output matrix frozen; used for inference.
pub fn sgns_input_step<T: Scalar>(
    input: &mut [T],
    output: &Matrix<T>,
    target: usize,
    negatives: &[usize],
    lr: T,
    scratch: &mut Vec<T>,
) -> T {
    scratch.clear();
    scratch.resize(input.len(), T::zero());
    let mut loss = T::zero();
    let f = dot(output.row(target), input);
    loss -= log_sigmoid(f);
    axpy(sigmoid(f) - T::one(), output.row(target), scratch);
    for &k in negatives.iter().filter(|&&k| k != target) {
        let f = dot(output.row(k), input);
        loss -= log_sigmoid(-f);
        axpy(sigmoid(f), output.row(k), scratch);
    }
    axpy(-lr, scratch, input);
    loss
}

/// Per-epoch mean sample loss and bookkeeping from a training run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub epoch_losses: Vec<f64>,
    pub examples: u64,
    pub skipped_docs: usize,
    pub workers: usize,
}

pub(crate) struct Params<T> {
    pub input: Matrix<T>,
    pub output: Matrix<T>,
}

impl<T: Scalar> Clone for Params<T> {
    fn clone(&self) -> Self {
        Self {
            input: self.input.clone(),
            output: self.output.clone(),
        }
    }
}

pub(crate) struct EpochPlan<'a> {
    /// Token count of every document, used for learning-rate progress.
    pub doc_lens: &'a [usize],
    pub epochs: usize,
    pub workers: usize,
    pub seed: u64,
    pub schedule: LrSchedule,
}

/// Documents each worker trains on between two merges.
const ROUND_DOCS_PER_WORKER: usize = 256;

/// Runs `epochs` passes of `step` over every document.
///
/// With one worker the pass is sequential and bit-reproducible. With more,
/// each round hands contiguous document slices to workers that train private
/// copies of the parameters; their deltas are then summed into the shared
/// parameters in worker order, which keeps the result reproducible for a
/// fixed worker count.
pub(crate) fn run_epochs<T, F>(params: &mut Params<T>, plan: &EpochPlan<'_>, step: F) -> TrainReport
where
    T: Scalar,
    F: Fn(&mut Params<T>, usize, T, &mut ChaCha8Rng) -> (f64, u64) + Sync,
{
    let n_docs = plan.doc_lens.len();
    let per_epoch: usize = plan.doc_lens.iter().sum();
    let total = (per_epoch * plan.epochs).max(1) as f64;
    let workers = plan.workers.max(1);
    let mut report = TrainReport {
        workers,
        ..TrainReport::default()
    };
    let mut done = 0usize;

    for epoch in 0..plan.epochs {
        let mut loss_sum = 0.0;
        let mut examples = 0u64;
        if workers == 1 {
            let mut rng = stream_rng(plan.seed, epoch as u64);
            for doc in 0..n_docs {
                let lr = T::c(plan.schedule.at(done as f64 / total));
                let (l, n) = step(params, doc, lr, &mut rng);
                loss_sum += l;
                examples += n;
                done += plan.doc_lens[doc];
            }
        } else {
            let round_size = ROUND_DOCS_PER_WORKER * workers;
            for (round, start) in (0..n_docs).step_by(round_size).enumerate() {
                let end = (start + round_size).min(n_docs);
                let chunk = (end - start).div_ceil(workers);
                let base = params.clone();
                let round_done = done;
                let results: Vec<(Params<T>, f64, u64, usize)> = (0..workers)
                    .into_par_iter()
                    .map(|w| {
                        let lo = (start + w * chunk).min(end);
                        let hi = (lo + chunk).min(end);
                        let mut local = base.clone();
                        let stream = ((epoch as u64) << 32) | (round * workers + w) as u64;
                        let mut rng = stream_rng(plan.seed, stream);
                        let (mut l_sum, mut n_sum, mut local_done) = (0.0, 0u64, 0usize);
                        for doc in lo..hi {
                            let progress = (round_done + local_done * workers) as f64 / total;
                            let lr = T::c(plan.schedule.at(progress));
                            let (l, n) = step(&mut local, doc, lr, &mut rng);
                            l_sum += l;
                            n_sum += n;
                            local_done += plan.doc_lens[doc];
                        }
                        (local, l_sum, n_sum, local_done)
                    })
                    .collect();
                for (local, l, n, d) in &results {
                    params.input.add_delta(&local.input, &base.input);
                    params.output.add_delta(&local.output, &base.output);
                    loss_sum += l;
                    examples += n;
                    done += d;
                }
            }
        }
        report.examples += examples;
        report
            .epoch_losses
            .push(if examples > 0 { loss_sum / examples as f64 } else { 0.0 });
    }
    report
}
