//! Temperature-scaling baseline fitted by grid search on mean NLL.

use rayon::prelude::*;

use crate::dataset::LogitDataset;
use crate::error::{Error, Result};
use crate::softmax::{argmax, log_softmax_at};

/// Evenly spaced temperatures `start, start + step, ..., stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for TemperatureGrid {
    fn default() -> Self {
        TemperatureGrid {
            start: 0.05,
            stop: 10.0,
            step: 0.05,
        }
    }
}

impl TemperatureGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        let ok = self.start > 0.0
            && self.step > 0.0
            && self.stop >= self.start
            && [self.start, self.stop, self.step]
                .iter()
                .all(|v| v.is_finite());
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "bad temperature grid {self:?}"
            )));
        }
        // integer multiples avoid accumulating step error
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| self.start + i as f64 * self.step).collect())
    }
}

/// Mean negative log-likelihood of the labels under `softmax(z / t)`.
pub fn mean_nll(dataset: &LogitDataset, temperature: f64) -> Result<f64> {
    let labels = dataset.require_labels()?;
    let total: f64 = dataset
        .rows()
        .zip(labels)
        .map(|(z, &y)| -log_softmax_at(z, temperature, y))
        .sum();
    Ok(total / dataset.len() as f64)
}

/// Grid temperature with the lowest mean NLL; ties go to the smaller value.
pub fn fit_temperature(dataset: &LogitDataset, grid: &[f64]) -> Result<f64> {
    dataset.require_labels()?;
    if grid.is_empty() || grid.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidArgument(
            "temperature grid must be non-empty and positive".into(),
        ));
    }
    let losses: Vec<f64> = grid
        .par_iter()
        .map(|&t| mean_nll(dataset, t))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for i in 1..grid.len() {
        if losses[i] < losses[best] || (losses[i] == losses[best] && grid[i] < grid[best]) {
            best = i;
        }
    }
    Ok(grid[best])
}

/// Maximum softmax probability of `z / temperature`.
pub fn scaled_confidence(z: &[f64], temperature: f64) -> f64 {
    log_softmax_at(z, temperature, argmax(z)).exp()
}
