//! Expected calibration error and reliability-diagram bins.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BINS: usize = 15;

/// Statistics for one equal-width confidence bin `((m-1)/M, m/M]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinStat {
    /// 1-based bin index.
    pub index: usize,
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    /// `None` when the bin is empty.
    pub mean_confidence: Option<f64>,
    pub accuracy: Option<f64>,
}

impl BinStat {
    pub fn gap(&self) -> Option<f64> {
        Some((self.accuracy? - self.mean_confidence?).abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub score_name: String,
    pub total: usize,
    pub ece: f64,
    pub bins: Vec<BinStat>,
}

impl CalibrationReport {
    /// ECE re-derived from the stored bins.
    pub fn recompute_ece(&self) -> f64 {
        let n = self.total as f64;
        self.bins
            .iter()
            .filter_map(|b| Some(b.count as f64 / n * b.gap()?))
            .sum()
    }
}

/// 1-based bin for `confidence`. Bins are right-closed; 0 lands in bin 1.
pub fn bin_index(confidence: f64, bins: usize) -> Result<usize> {
    if bins == 0 {
        return Err(Error::InvalidArgument("bin count must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&confidence) {
        return Err(Error::InvalidArgument(format!(
            "confidence {confidence} outside [0, 1]"
        )));
    }
    let m = (confidence * bins as f64).ceil() as usize;
    Ok(m.clamp(1, bins))
}

pub fn reliability(
    scores: &[f64],
    correct: &[bool],
    bins: usize,
    score_name: &str,
) -> Result<CalibrationReport> {
    if scores.len() != correct.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} scores but {} correctness flags",
            scores.len(),
            correct.len()
        )));
    }
    if scores.is_empty() {
        return Err(Error::InvalidArgument("no samples to bin".into()));
    }
    let mut count = vec![0usize; bins.max(1)];
    let mut conf_sum = vec![0.0f64; bins.max(1)];
    let mut hits = vec![0usize; bins.max(1)];
    for (&s, &ok) in scores.iter().zip(correct) {
        let m = bin_index(s, bins)? - 1;
        count[m] += 1;
        conf_sum[m] += s;
        hits[m] += ok as usize;
    }

    let n = scores.len() as f64;
    let mut ece = 0.0;
    let mut stats = Vec::with_capacity(bins);
    for m in 0..bins {
        let (mean_confidence, accuracy) = if count[m] == 0 {
            (None, None)
        } else {
            let c = count[m] as f64;
            let conf = conf_sum[m] / c;
            let acc = hits[m] as f64 / c;
            ece += c / n * (acc - conf).abs();
            (Some(conf), Some(acc))
        };
        stats.push(BinStat {
            index: m + 1,
            lower: m as f64 / bins as f64,
            upper: (m + 1) as f64 / bins as f64,
            count: count[m],
            mean_confidence,
            accuracy,
        });
    }
    Ok(CalibrationReport {
        score_name: score_name.to_string(),
        total: scores.len(),
        ece,
        bins: stats,
    })
}
