//! Softmax and argmax prediction over a single logit vector.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The argmax class of a logit vector together with its softmax distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub top_class: usize,
    /// Maximum softmax probability, `probs[top_class]`.
    pub confidence: f64,
    pub probs: Vec<f64>,
}

pub(crate) fn check_logits(z: &[f64]) -> Result<()> {
    if z.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 classes, got {}",
            z.len()
        )));
    }
    match z.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFiniteValue { index }),
        None => Ok(()),
    }
}

/// Index of the largest logit, lowest index on ties. Assumes finite input.
pub fn argmax(z: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in z.iter().enumerate().skip(1) {
        if v > z[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn softmax_unchecked(z: &[f64]) -> Vec<f64> {
    let max = z[argmax(z)];
    let mut out: Vec<f64> = z.iter().map(|&v| (v - max).exp()).collect();
    let total: f64 = out.iter().sum();
    for p in &mut out {
        *p /= total;
    }
    out
}

/// Max-shifted softmax. Never overflows for finite input and is exactly
/// invariant to adding a constant whenever the shifted differences are exact.
pub fn stable_softmax(z: &[f64]) -> Result<Vec<f64>> {
    check_logits(z)?;
    Ok(softmax_unchecked(z))
}

/// `ln softmax(z / temperature)[class]`, computed with log-sum-exp.
pub(crate) fn log_softmax_at(z: &[f64], temperature: f64, class: usize) -> f64 {
    let max = z[argmax(z)] / temperature;
    let lse: f64 = z
        .iter()
        .map(|&v| (v / temperature - max).exp())
        .sum::<f64>()
        .ln();
    z[class] / temperature - max - lse
}

pub(crate) fn predict_unchecked(z: &[f64]) -> Prediction {
    let probs = softmax_unchecked(z);
    let top_class = argmax(z);
    Prediction {
        top_class,
        confidence: probs[top_class],
        probs,
    }
}

pub fn predict(z: &[f64]) -> Result<Prediction> {
    check_logits(z)?;
    Ok(predict_unchecked(z))
}
