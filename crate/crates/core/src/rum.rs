//! Gumbel random-utility sampling and synthetic logit datasets.
//!
//! Adding i.i.d. standard Gumbel noise to utilities `u` and taking the
//! argmax selects class `c` with probability `softmax(u)_c`; for a pair the
//! dominance probability is the logistic of `u_i - u_j`. The generators
//! here build labeled datasets whose calibration is known by construction.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::dataset::{validate_dataset, LogitDataset};
use crate::error::{Error, Result};
use crate::softmax::{argmax, softmax_unchecked};
use crate::stream::{derived_stream, Domain};

const UNIFORM_FLOOR: f64 = 1.0 / (1u64 << 53) as f64;

/// Inverse Gumbel(0, 1) CDF.
pub fn gumbel_from_uniform(u: f64) -> f64 {
    -(-u.ln()).ln()
}

/// One standard Gumbel draw; the uniform is clamped to `[2^-53, 1 - 2^-53]`.
pub fn sample_gumbel<R: Rng + ?Sized>(stream: &mut R) -> f64 {
    let u: f64 = stream.random();
    gumbel_from_uniform(u.clamp(UNIFORM_FLOOR, 1.0 - UNIFORM_FLOOR))
}

#[derive(Debug, Clone, PartialEq)]
pub struct UtilityVector {
    utilities: Vec<f64>,
    noise_scale: f64,
}

impl UtilityVector {
    pub fn new(utilities: Vec<f64>) -> Result<Self> {
        Self::with_noise_scale(utilities, 1.0)
    }

    /// With scale `s` the argmax frequencies converge to `softmax(u / s)`.
    pub fn with_noise_scale(utilities: Vec<f64>, noise_scale: f64) -> Result<Self> {
        crate::softmax::check_logits(&utilities)?;
        if !(noise_scale > 0.0 && noise_scale.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "noise scale {noise_scale} must be positive"
            )));
        }
        Ok(UtilityVector {
            utilities,
            noise_scale,
        })
    }

    pub fn utilities(&self) -> &[f64] {
        &self.utilities
    }

    pub fn noise_scale(&self) -> f64 {
        self.noise_scale
    }
}

fn check_draws(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one draw".into()));
    }
    Ok(())
}

/// Empirical frequency with which each class wins the noisy argmax.
pub fn gumbel_argmax_freq(u: &UtilityVector, n: usize, seed: u64) -> Result<Vec<f64>> {
    check_draws(n)?;
    let mut stream = derived_stream(seed, Domain::Gumbel, 0);
    let mut hits = vec![0usize; u.utilities.len()];
    let mut noisy = vec![0.0; u.utilities.len()];
    for _ in 0..n {
        for (z, &base) in noisy.iter_mut().zip(&u.utilities) {
            *z = base + u.noise_scale * sample_gumbel(&mut stream);
        }
        hits[argmax(&noisy)] += 1;
    }
    Ok(hits.into_iter().map(|h| h as f64 / n as f64).collect())
}

/// Empirical `Pr(u_i + g_i > u_j + g_j)` over `n` independent noise pairs.
pub fn pairwise_dominance_freq(u_i: f64, u_j: f64, n: usize, seed: u64) -> Result<f64> {
    check_draws(n)?;
    if !(u_i.is_finite() && u_j.is_finite()) {
        return Err(Error::InvalidArgument("utilities must be finite".into()));
    }
    let mut stream = derived_stream(seed, Domain::Gumbel, 1);
    let wins = (0..n)
        .filter(|_| u_i + sample_gumbel(&mut stream) > u_j + sample_gumbel(&mut stream))
        .count();
    Ok(wins as f64 / n as f64)
}

pub fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Parameters for the synthetic dataset generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub samples: usize,
    pub classes: usize,
    /// Standard deviation of the Gaussian utility prior.
    pub spread: f64,
    /// Logit sharpening factor; 1 leaves the dataset calibrated.
    pub peak: f64,
    pub seed: u64,
}

impl SynthConfig {
    pub fn new(samples: usize, classes: usize, spread: f64, seed: u64) -> Self {
        SynthConfig {
            samples,
            classes,
            spread,
            peak: 1.0,
            seed,
        }
    }

    pub fn with_peak(mut self, peak: f64) -> Self {
        self.peak = peak;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidArgument("sample count must be >= 1".into()));
        }
        if self.classes < 2 {
            return Err(Error::InvalidArgument("class count must be >= 2".into()));
        }
        if !(self.spread >= 0.0 && self.spread.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "spread {} must be finite and non-negative",
                self.spread
            )));
        }
        if !(self.peak > 0.0 && self.peak.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "peak {} must be positive",
                self.peak
            )));
        }
        Ok(())
    }
}

fn generate(cfg: &SynthConfig, peak: f64) -> Result<LogitDataset> {
    cfg.validate()?;
    let rows: Vec<(Vec<f64>, i64)> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut stream = derived_stream(cfg.seed, Domain::SynthSample, i as u64);
            let utilities: Vec<f64> = (0..cfg.classes)
                .map(|_| cfg.spread * stream.sample::<f64, _>(StandardNormal))
                .collect();
            let probs = softmax_unchecked(&utilities);
            let draw: f64 = stream.random();
            let mut label = cfg.classes - 1;
            let mut cumulative = 0.0;
            for (c, p) in probs.iter().enumerate() {
                cumulative += p;
                if draw < cumulative {
                    label = c;
                    break;
                }
            }
            let logits = utilities.into_iter().map(|u| peak * u).collect();
            (logits, label as i64)
        })
        .collect();
    let (logits, labels): (Vec<Vec<f64>>, Vec<i64>) = rows.into_iter().unzip();
    let flat = logits.into_iter().flatten().collect();
    validate_dataset(flat, cfg.samples, cfg.classes, Some(&labels))
}

/// Logits equal to Gaussian utilities, labels drawn from their softmax, so
/// the maximum softmax probability is calibrated in expectation.
/// `cfg.peak` is ignored.
pub fn generate_calibrated_dataset(cfg: &SynthConfig) -> Result<LogitDataset> {
    Ok(generate(cfg, 1.0)?.with_name("synth-calibrated"))
}

/// Same utilities and labels as the calibrated generator, but logits are
/// multiplied by `cfg.peak`, making the softmax overconfident for
/// `peak > 1`.
pub fn generate_delusional_dataset(cfg: &SynthConfig) -> Result<LogitDataset> {
    Ok(generate(cfg, cfg.peak)?.with_name("synth-delusional"))
}
