//! The `boc` command-line tool.
//!
//! Every command is deterministic given its flags. Data goes to files;
//! diagnostics go to stderr. Failures exit with status 2.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::boc::{boc_batch_with, BocMode, DEFAULT_TRIALS};
use crate::dataset::LogitDataset;
use crate::error::{Error, Result};
use crate::io::{self, Provenance, Report, ReportFile, ReportFormat};
use crate::metrics::{
    self, fit_temperature, ood_report, reliability, scaled_confidence, TemperatureGrid,
};
use crate::rum::{generate_calibrated_dataset, generate_delusional_dataset, SynthConfig};

#[derive(Debug, Parser)]
#[command(
    name = "boc",
    version,
    about = "BoC logit consistency probe and calibration diagnostics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the probe on every row and write the per-sample table
    Probe(RunArgs),
    /// Reliability bins and ECE for one confidence score
    Calibrate(RunArgs),
    /// ROC curve and AUROC separating --logits (positive) from --ood-logits
    Ood(RunArgs),
    /// Side-by-side reliability bins for msp and a second score
    Reliability(RunArgs),
    /// Write a synthetic logits/labels pair
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Score {
    Msp,
    Boc,
    BocExact,
    TempScaled,
}

impl Score {
    fn name(self) -> &'static str {
        match self {
            Score::Msp => "msp",
            Score::Boc => "boc",
            Score::BocExact => "boc-exact",
            Score::TempScaled => "temp-scaled",
        }
    }

    fn boc_mode(self) -> Option<BocMode> {
        match self {
            Score::Boc => Some(BocMode::Sampled),
            Score::BocExact => Some(BocMode::Exact),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Logit matrix (.npy or .csv), N x C
    #[arg(long)]
    pub logits: PathBuf,
    /// Integer labels (.npy or .csv), length N
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Out-of-distribution logit matrix (ood command)
    #[arg(long)]
    pub ood_logits: Option<PathBuf>,
    /// Trials per probe
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub k: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Equal-width confidence bins
    #[arg(long, default_value_t = metrics::DEFAULT_BINS)]
    pub bins: usize,
    /// Confidence score; the default depends on the command
    #[arg(long, value_enum)]
    pub score: Option<Score>,
    #[arg(long)]
    pub out: PathBuf,
    /// Output format; inferred from the --out extension when omitted
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (results do not depend on this)
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, alias = "n")]
    pub samples: usize,
    #[arg(long, default_value_t = 10)]
    pub classes: usize,
    /// Standard deviation of the Gaussian utility prior
    #[arg(long, default_value_t = 2.0)]
    pub spread: f64,
    /// Logit sharpening factor; 1 gives the calibrated dataset
    #[arg(long, default_value_t = 1.0)]
    pub peak: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    /// File prefix: writes <name>_logits.npy and <name>_labels.npy
    #[arg(long, default_value = "synth")]
    pub name: String,
    #[arg(long)]
    pub threads: Option<usize>,
}

impl RunArgs {
    fn check(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidArgument("--k must be >= 1".into()));
        }
        if self.bins == 0 {
            return Err(Error::InvalidArgument("--bins must be >= 1".into()));
        }
        Ok(())
    }

    fn report_format(&self, default: ReportFormat) -> ReportFormat {
        match self.format {
            Some(Format::Json) => ReportFormat::Json,
            Some(Format::Csv) => ReportFormat::Csv,
            None => match self.out.extension().and_then(|e| e.to_str()) {
                Some("json") => ReportFormat::Json,
                Some("csv") => ReportFormat::Csv,
                _ => default,
            },
        }
    }

    fn provenance(&self, command: &str, score: Score, temperature: Option<f64>) -> Provenance {
        let inputs = [
            Some(&self.logits),
            self.labels.as_ref(),
            self.ood_logits.as_ref(),
        ]
        .into_iter()
        .flatten()
        .map(|p| p.display().to_string())
        .collect();
        Provenance {
            command: command.into(),
            score: score.name().into(),
            k: self.k,
            seed: self.seed,
            bins: self.bins,
            temperature,
            inputs,
        }
    }

    fn dataset(&self) -> Result<LogitDataset> {
        io::load_dataset(&self.logits, self.labels.as_deref())
    }
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("--threads: {e}")))?
            .install(f),
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Probe(a) => in_pool(a.threads, || cmd_probe(&a)),
        Command::Calibrate(a) => in_pool(a.threads, || cmd_calibrate(&a)),
        Command::Ood(a) => in_pool(a.threads, || cmd_ood(&a)),
        Command::Reliability(a) => in_pool(a.threads, || cmd_reliability(&a)),
        Command::Synth(a) => in_pool(a.threads, || cmd_synth(&a)),
    }
}

fn write(args: &RunArgs, file: ReportFile, default: ReportFormat) -> Result<()> {
    io::write_report(&file, &args.out, args.report_format(default))
}

/// Per-row confidence under `score`, plus the fitted temperature if any.
fn confidence_scores(
    ds: &LogitDataset,
    score: Score,
    args: &RunArgs,
) -> Result<(Vec<f64>, Option<f64>)> {
    Ok(match score {
        Score::Msp => (
            ds.predictions().iter().map(|p| p.confidence).collect(),
            None,
        ),
        Score::Boc | Score::BocExact => {
            let mode = score.boc_mode().expect("boc score");
            let results = boc_batch_with(ds, args.k, args.seed, mode, 0)?;
            (results.iter().map(|r| r.score).collect(), None)
        }
        Score::TempScaled => {
            let t = fit_temperature(ds, &TemperatureGrid::default().values()?)?;
            (
                ds.rows().map(|z| scaled_confidence(z, t)).collect(),
                Some(t),
            )
        }
    })
}

pub fn cmd_probe(args: &RunArgs) -> Result<()> {
    args.check()?;
    let score = args.score.unwrap_or(Score::Boc);
    let mode = score.boc_mode().ok_or_else(|| {
        Error::InvalidArgument(format!(
            "probe needs --score boc or boc-exact, got {}",
            score.name()
        ))
    })?;
    let ds = args.dataset()?;
    let results = boc_batch_with(&ds, args.k, args.seed, mode, 0)?;
    let file = ReportFile {
        provenance: args.provenance("probe", score, None),
        report: Report::Probe(results),
    };
    write(args, file, ReportFormat::Csv)
}

pub fn cmd_calibrate(args: &RunArgs) -> Result<()> {
    args.check()?;
    let score = args.score.unwrap_or(Score::Msp);
    let ds = args.dataset()?;
    let correct = ds.correctness()?;
    let (scores, temperature) = confidence_scores(&ds, score, args)?;
    let report = reliability(&scores, &correct, args.bins, score.name())?;
    let file = ReportFile {
        provenance: args.provenance("calibrate", score, temperature),
        report: Report::Calibration(report),
    };
    write(args, file, ReportFormat::Json)
}

pub fn cmd_reliability(args: &RunArgs) -> Result<()> {
    args.check()?;
    let score = args.score.unwrap_or(Score::Boc);
    let ds = args.dataset()?;
    let correct = ds.correctness()?;
    let mut reports = vec![];
    let (msp, _) = confidence_scores(&ds, Score::Msp, args)?;
    reports.push(reliability(&msp, &correct, args.bins, "msp")?);
    let mut temperature = None;
    if score != Score::Msp {
        let (other, t) = confidence_scores(&ds, score, args)?;
        temperature = t;
        reports.push(reliability(&other, &correct, args.bins, score.name())?);
    }
    let file = ReportFile {
        provenance: args.provenance("reliability", score, temperature),
        report: Report::Reliability(reports),
    };
    write(args, file, ReportFormat::Csv)
}

pub fn cmd_ood(args: &RunArgs) -> Result<()> {
    args.check()?;
    let score = args.score.unwrap_or(Score::Msp);
    let ood_path = args
        .ood_logits
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("ood needs --ood-logits".into()))?;
    let id = args.dataset()?;
    let ood = io::load_dataset(ood_path, None)?;
    if id.num_classes() != ood.num_classes() {
        return Err(Error::ShapeMismatch(format!(
            "in-distribution logits have {} classes, out-of-distribution {}",
            id.num_classes(),
            ood.num_classes()
        )));
    }
    let (pos, neg, temperature) = match score {
        Score::Msp => {
            let conf = |ds: &LogitDataset| ds.predictions().iter().map(|p| p.confidence).collect();
            (conf(&id), conf(&ood), None)
        }
        // the raw p-value; a low value flags an inconsistent logit vector
        Score::Boc | Score::BocExact => {
            let mode = score.boc_mode().expect("boc score");
            let p_vals = |ds: &LogitDataset, first: u64| -> Result<Vec<f64>> {
                Ok(boc_batch_with(ds, args.k, args.seed, mode, first)?
                    .iter()
                    .map(|r| r.p_val)
                    .collect())
            };
            (p_vals(&id, 0)?, p_vals(&ood, id.len() as u64)?, None)
        }
        Score::TempScaled => {
            let t = fit_temperature(&id, &TemperatureGrid::default().values()?)?;
            let conf = |ds: &LogitDataset| ds.rows().map(|z| scaled_confidence(z, t)).collect();
            (conf(&id), conf(&ood), Some(t))
        }
    };
    let report = ood_report(&pos, &neg, score.name())?;
    let file = ReportFile {
        provenance: args.provenance("ood", score, temperature),
        report: Report::Ood(report),
    };
    write(args, file, ReportFormat::Json)
}

pub fn synth_paths(dir: &Path, name: &str) -> (PathBuf, PathBuf) {
    (
        dir.join(format!("{name}_logits.npy")),
        dir.join(format!("{name}_labels.npy")),
    )
}

pub fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let cfg =
        SynthConfig::new(args.samples, args.classes, args.spread, args.seed).with_peak(args.peak);
    let ds = if args.peak == 1.0 {
        generate_calibrated_dataset(&cfg)?
    } else {
        generate_delusional_dataset(&cfg)?
    };
    fs::create_dir_all(&args.out).map_err(|e| Error::Io {
        path: args.out.clone(),
        source: e,
    })?;
    let (logits, labels) = synth_paths(&args.out, &args.name);
    io::save_dataset(&ds, &logits, Some(&labels))?;
    println!(
        "synth samples={} classes={} spread={} peak={} seed={} logits={} labels={}",
        cfg.samples,
        cfg.classes,
        cfg.spread,
        cfg.peak,
        cfg.seed,
        logits.display(),
        labels.display()
    );
    Ok(())
}
