//! Calibration and out-of-distribution evaluation.

pub mod calibration;
pub mod roc;
pub mod temperature;

pub use calibration::{bin_index, reliability, BinStat, CalibrationReport, DEFAULT_BINS};
pub use roc::{auroc, corrected, ood_report, roc_curve, trapezoid_area, OodReport, RocPoint};
pub use temperature::{fit_temperature, mean_nll, scaled_confidence, TemperatureGrid};
