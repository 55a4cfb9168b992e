//! JSON and CSV emission of analysis reports.
//!
//! JSON carries everything, wrapped as `{"provenance": ..., "<kind>": ...}`.
//! CSV carries the table only, preceded by `#` comment lines with the
//! provenance and scalar results. CSV floats use 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::boc::BocResult;
use crate::error::{Error, Result};
use crate::metrics::{CalibrationReport, OodReport};

/// Settings a report was produced with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub command: String,
    pub score: String,
    pub k: u64,
    pub seed: u64,
    pub bins: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub temperature: Option<f64>,
    pub inputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Report {
    Probe(Vec<BocResult>),
    Calibration(CalibrationReport),
    /// Several scores binned identically, for side-by-side diagrams.
    Reliability(Vec<CalibrationReport>),
    Ood(OodReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub provenance: Provenance,
    #[serde(flatten)]
    pub report: Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

pub fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt17(v: Option<f64>) -> String {
    v.map(sig17).unwrap_or_default()
}

fn provenance_line(p: &Provenance) -> String {
    let mut line = format!(
        "# command={} score={} k={} seed={} bins={}",
        p.command, p.score, p.k, p.seed, p.bins
    );
    if let Some(t) = p.temperature {
        let _ = write!(line, " temperature={}", sig17(t));
    }
    if !p.inputs.is_empty() {
        let _ = write!(line, " inputs={}", p.inputs.join(";"));
    }
    line.push('\n');
    line
}

pub fn to_csv(file: &ReportFile) -> String {
    let mut out = provenance_line(&file.provenance);
    match &file.report {
        Report::Probe(rows) => {
            out.push_str("index,y_hat,p_hat,p_dom,W,k,p_val,score\n");
            for (i, r) in rows.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{i},{},{},{},{},{},{},{}",
                    r.top_class,
                    sig17(r.confidence),
                    sig17(r.p_dom),
                    r.wins,
                    r.trials,
                    sig17(r.p_val),
                    sig17(r.score)
                );
            }
        }
        Report::Calibration(report) => {
            let _ = writeln!(
                out,
                "# score_name={} total={} ece={}",
                report.score_name,
                report.total,
                sig17(report.ece)
            );
            out.push_str("bin,lower,upper,count,mean_confidence,accuracy,gap\n");
            for b in &report.bins {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    b.index,
                    sig17(b.lower),
                    sig17(b.upper),
                    b.count,
                    opt17(b.mean_confidence),
                    opt17(b.accuracy),
                    opt17(b.gap())
                );
            }
        }
        Report::Reliability(reports) => {
            for r in reports {
                let _ = writeln!(
                    out,
                    "# {} total={} ece={}",
                    r.score_name,
                    r.total,
                    sig17(r.ece)
                );
            }
            out.push_str("bin,lower,upper");
            for r in reports {
                let n = &r.score_name;
                let _ = write!(out, ",{n}_count,{n}_confidence,{n}_accuracy,{n}_gap");
            }
            out.push('\n');
            let bins = reports.first().map_or(0, |r| r.bins.len());
            for m in 0..bins {
                let first = &reports[0].bins[m];
                let _ = write!(
                    out,
                    "{},{},{}",
                    first.index,
                    sig17(first.lower),
                    sig17(first.upper)
                );
                for r in reports {
                    let b = &r.bins[m];
                    let _ = write!(
                        out,
                        ",{},{},{},{}",
                        b.count,
                        opt17(b.mean_confidence),
                        opt17(b.accuracy),
                        opt17(b.gap())
                    );
                }
                out.push('\n');
            }
        }
        Report::Ood(report) => {
            let _ = writeln!(
                out,
                "# score_name={} n_pos={} n_neg={} auroc_raw={} auroc_corrected={} inverted={}",
                report.score_name,
                report.n_pos,
                report.n_neg,
                sig17(report.auroc_raw),
                sig17(report.auroc_corrected),
                report.inverted
            );
            out.push_str("fpr,tpr\n");
            for p in &report.roc_points {
                let _ = writeln!(out, "{},{}", sig17(p.fpr), sig17(p.tpr));
            }
        }
    }
    out
}

pub fn to_json(file: &ReportFile) -> Result<String> {
    let mut s = serde_json::to_string_pretty(file).map_err(|e| Error::Serialize(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_report(file: &ReportFile, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    let path = path.as_ref();
    let text = match format {
        ReportFormat::Json => to_json(file)?,
        ReportFormat::Csv => to_csv(file),
    };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_report_json(path: impl AsRef<Path>) -> Result<ReportFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Serialize(format!("{}: {e}", path.display())))
}
