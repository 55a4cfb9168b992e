//! The BoC consistency probe.
//!
//! The top logit is pitted against `k` competitors drawn uniformly with
//! replacement from the remaining classes. A trial is won only on a strict
//! `z_top > z_j`; ties lose. The win count is then tested against
//! `Binomial(k, confidence)` with the inclusive upper tail `Pr(X >= wins)`.
//!
//! A consequence of the strict rule: when the maximum is unique every
//! competitor is beaten, so `wins == k` on every stream and
//! `p_val == confidence^k`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binomial::binomial_sf;
use crate::dataset::LogitDataset;
use crate::error::{Error, Result};
use crate::softmax::{check_logits, predict_unchecked};
use crate::stream::record_stream;

pub const DEFAULT_TRIALS: u64 = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BocResult {
    pub trials: u64,
    pub wins: u64,
    pub p_val: f64,
    /// `1 - p_val`.
    pub score: f64,
    /// Fraction of competitors strictly below the top logit.
    pub p_dom: f64,
    pub top_class: usize,
    pub confidence: f64,
}

fn check_trials(k: u64) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("trial count k must be >= 1".into()));
    }
    Ok(())
}

/// Number of competitors `j != top` with `z[top] > z[j]`.
fn dominated(z: &[f64], top: usize) -> usize {
    z.iter()
        .enumerate()
        .filter(|&(j, &v)| j != top && z[top] > v)
        .count()
}

/// Exact pairwise-dominance probability of the argmax class.
pub fn p_dom(z: &[f64]) -> Result<f64> {
    check_logits(z)?;
    let top = crate::softmax::argmax(z);
    Ok(dominated(z, top) as f64 / (z.len() - 1) as f64)
}

fn trials_unchecked<R: Rng + ?Sized>(z: &[f64], top: usize, k: u64, stream: &mut R) -> u64 {
    let competitors = z.len() - 1;
    let mut wins = 0;
    for _ in 0..k {
        // index into the competitor set {0..C} \ {top}
        let mut j = stream.random_range(0..competitors);
        if j >= top {
            j += 1;
        }
        if z[top] > z[j] {
            wins += 1;
        }
    }
    wins
}

/// Runs the `k` sampled contests and returns the win count.
pub fn run_trials<R: Rng + ?Sized>(z: &[f64], k: u64, stream: &mut R) -> Result<u64> {
    check_logits(z)?;
    check_trials(k)?;
    let top = crate::softmax::argmax(z);
    Ok(trials_unchecked(z, top, k, stream))
}

fn finish(z: &[f64], k: u64, wins: impl FnOnce(usize) -> u64) -> Result<BocResult> {
    let pred = predict_unchecked(z);
    let beaten = dominated(z, pred.top_class);
    let wins = wins(beaten);
    let p_val = binomial_sf(wins, k, pred.confidence)?;
    Ok(BocResult {
        trials: k,
        wins,
        p_val,
        score: 1.0 - p_val,
        p_dom: beaten as f64 / (z.len() - 1) as f64,
        top_class: pred.top_class,
        confidence: pred.confidence,
    })
}

/// Monte-Carlo probe: sampled contests followed by the one-tailed test.
pub fn boc_test<R: Rng + ?Sized>(z: &[f64], k: u64, stream: &mut R) -> Result<BocResult> {
    check_logits(z)?;
    check_trials(k)?;
    let top = crate::softmax::argmax(z);
    finish(z, k, |_| trials_unchecked(z, top, k, stream))
}

/// Seed-free probe with `wins = round(k * p_dom)`, halves rounded up.
pub fn boc_exact(z: &[f64], k: u64) -> Result<BocResult> {
    check_logits(z)?;
    check_trials(k)?;
    let competitors = (z.len() - 1) as u128;
    finish(z, k, |beaten| {
        let twice = 2 * k as u128 * beaten as u128 + competitors;
        (twice / (2 * competitors)) as u64
    })
}

/// How each record of a batch is probed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BocMode {
    Sampled,
    Exact,
}

/// Probes every row. Row `i` uses [`record_stream`]`(seed, i)`, so the
/// output does not depend on scheduling.
pub fn boc_batch(dataset: &LogitDataset, k: u64, seed: u64) -> Result<Vec<BocResult>> {
    boc_batch_with(dataset, k, seed, BocMode::Sampled, 0)
}

/// Like [`boc_batch`], with row `i` drawing from stream `first_index + i`.
/// Probing two datasets with disjoint index ranges keeps their streams
/// independent under one seed.
pub fn boc_batch_with(
    dataset: &LogitDataset,
    k: u64,
    seed: u64,
    mode: BocMode,
    first_index: u64,
) -> Result<Vec<BocResult>> {
    check_trials(k)?;
    (0..dataset.len())
        .into_par_iter()
        .map(|i| {
            let z = dataset.row(i);
            match mode {
                BocMode::Sampled => {
                    boc_test(z, k, &mut record_stream(seed, first_index + i as u64))
                }
                BocMode::Exact => boc_exact(z, k),
            }
        })
        .collect()
}
