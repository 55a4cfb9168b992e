//! ROC curves and AUROC for separating in-distribution (positive) from
//! out-of-distribution (negative) samples by a score.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OodReport {
    pub score_name: String,
    pub n_pos: usize,
    pub n_neg: usize,
    pub auroc_raw: f64,
    pub auroc_corrected: f64,
    /// `auroc_raw < 0.5`: the score ranks the negative class higher.
    pub inverted: bool,
    pub roc_points: Vec<RocPoint>,
}

fn check_sides(pos: &[f64], neg: &[f64]) -> Result<()> {
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "AUROC needs both classes, got {} positive and {} negative",
            pos.len(),
            neg.len()
        )));
    }
    if let Some(index) = pos.iter().chain(neg).position(|v| v.is_nan()) {
        return Err(Error::NonFiniteValue { index });
    }
    Ok(())
}

/// Score groups in descending order: `(score, positives, negatives)`.
fn descending_groups(pos: &[f64], neg: &[f64]) -> Vec<(f64, u64, u64)> {
    let mut all: Vec<(f64, bool)> = pos
        .iter()
        .map(|&s| (s, true))
        .chain(neg.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut groups: Vec<(f64, u64, u64)> = Vec::new();
    for (s, is_pos) in all {
        match groups.last_mut() {
            // == merges -0.0 with 0.0, which total_cmp keeps adjacent
            Some(g) if g.0 == s => {
                if is_pos {
                    g.1 += 1
                } else {
                    g.2 += 1
                }
            }
            _ => groups.push((s, is_pos as u64, (!is_pos) as u64)),
        }
    }
    groups
}

/// Mann-Whitney AUROC: the fraction of (positive, negative) pairs ranked
/// correctly, with ties earning half credit.
///
/// The pair count is accumulated as an exact integer. The smaller of the
/// two complementary fractions is rounded once and the larger is taken as
/// one minus it, which makes `auroc(a, b) + auroc(b, a) == 1.0` hold exactly.
pub fn auroc(pos: &[f64], neg: &[f64]) -> Result<f64> {
    check_sides(pos, neg)?;
    // twice the number of correctly ordered pairs
    let mut twice_wins: u128 = 0;
    let mut neg_below = neg.len() as u128;
    for (_, p, n) in descending_groups(pos, neg) {
        neg_below -= n as u128;
        twice_wins += p as u128 * (2 * neg_below + n as u128);
    }
    let twice_pairs = 2 * pos.len() as u128 * neg.len() as u128;
    let losses = twice_pairs - twice_wins;
    Ok(if twice_wins <= losses {
        twice_wins as f64 / twice_pairs as f64
    } else {
        1.0 - losses as f64 / twice_pairs as f64
    })
}

/// ROC points from the `(0, 0)` sentinel through one point per distinct
/// score threshold (descending) to `(1, 1)`.
pub fn roc_curve(pos: &[f64], neg: &[f64]) -> Result<Vec<RocPoint>> {
    check_sides(pos, neg)?;
    let (np, nn) = (pos.len() as f64, neg.len() as f64);
    let mut points = vec![RocPoint { fpr: 0.0, tpr: 0.0 }];
    let (mut tp, mut fp) = (0u64, 0u64);
    for (_, p, n) in descending_groups(pos, neg) {
        tp += p;
        fp += n;
        points.push(RocPoint {
            fpr: fp as f64 / nn,
            tpr: tp as f64 / np,
        });
    }
    Ok(points)
}

pub fn trapezoid_area(points: &[RocPoint]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
        .sum()
}

/// Orientation-corrected AUROC and whether the raw score was inverted.
pub fn corrected(auroc_raw: f64) -> Result<(f64, bool)> {
    if !(0.0..=1.0).contains(&auroc_raw) {
        return Err(Error::InvalidArgument(format!(
            "AUROC {auroc_raw} outside [0, 1]"
        )));
    }
    Ok((auroc_raw.max(1.0 - auroc_raw), auroc_raw < 0.5))
}

pub fn ood_report(pos: &[f64], neg: &[f64], score_name: &str) -> Result<OodReport> {
    let auroc_raw = auroc(pos, neg)?;
    let (auroc_corrected, inverted) = corrected(auroc_raw)?;
    Ok(OodReport {
        score_name: score_name.to_string(),
        n_pos: pos.len(),
        n_neg: neg.len(),
        auroc_raw,
        auroc_corrected,
        inverted,
        roc_points: roc_curve(pos, neg)?,
    })
}
