//! BoC consistency probe for classifier logits, with the calibration and
//! out-of-distribution metrics used to evaluate it.
//!
//! - [`softmax`] and [`dataset`]: numerically stable softmax, argmax
//!   predictions and validated logit/label datasets.
//! - [`binomial`]: exact binomial upper tail.
//! - [`boc`]: the probe itself, sampled and exact variants.
//! - [`metrics`]: ECE with reliability bins, ROC/AUROC, temperature scaling.
//! - [`rum`]: Gumbel random-utility sampling and synthetic datasets.
//! - [`io`]: `.npy`/`.csv` arrays and JSON/CSV reports.
//! - [`cli`]: the `boc` command-line tool.

pub mod binomial;
pub mod boc;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod io;
pub mod metrics;
pub mod rum;
pub mod softmax;
pub mod stream;

pub use binomial::binomial_sf;
pub use boc::{boc_batch, boc_exact, boc_test, run_trials, BocMode, BocResult, DEFAULT_TRIALS};
pub use dataset::{validate_dataset, LogitDataset};
pub use error::{Error, FormatError, Result};
pub use softmax::{predict, stable_softmax, Prediction};
