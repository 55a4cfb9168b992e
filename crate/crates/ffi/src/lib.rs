//! C ABI over `boc-core`.
//!
//! Every fallible function returns a [`BocStatus`] and writes its result
//! through an out-pointer. On failure `boc_last_error_message` describes the
//! error for the calling thread. Handles are opaque and must be released with
//! their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use boc_core::boc::{boc_batch_with, BocMode, BocResult};
use boc_core::metrics::{auroc, reliability};
use boc_core::stream::record_stream;
use boc_core::{Error, LogitDataset};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BocStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonFinite = 3,
    Shape = 4,
    LabelRange = 5,
    Io = 6,
    Format = 7,
    MissingLabels = 8,
    Panic = 9,
}

impl From<&Error> for BocStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::NonFinite { .. } | Error::NonFiniteValue { .. } => BocStatus::NonFinite,
            Error::LabelOutOfRange { .. } => BocStatus::LabelRange,
            Error::ShapeMismatch(_) => BocStatus::Shape,
            Error::InvalidArgument(_) | Error::Serialize(_) => BocStatus::InvalidArgument,
            Error::MissingLabels => BocStatus::MissingLabels,
            Error::Io { .. } => BocStatus::Io,
            Error::Format { .. } => BocStatus::Format,
        }
    }
}

/// Outcome of one probe.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BocProbe {
    pub trials: u64,
    pub wins: u64,
    pub p_val: f64,
    pub score: f64,
    pub p_dom: f64,
    pub top_class: usize,
    pub confidence: f64,
}

impl From<&BocResult> for BocProbe {
    fn from(r: &BocResult) -> Self {
        BocProbe {
            trials: r.trials,
            wins: r.wins,
            p_val: r.p_val,
            score: r.score,
            p_dom: r.p_dom,
            top_class: r.top_class,
            confidence: r.confidence,
        }
    }
}

/// A validated logit matrix with optional labels.
pub struct BocDataset(LogitDataset);

/// Per-row probe results.
pub struct BocBatch(Vec<BocProbe>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(BocStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(BocStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(BocStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BocStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            BocStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            BocStatus::Panic
        }
    }
}

unsafe fn input<'a, T>(p: *const T, n: usize, what: &str) -> Result<&'a [T], Fail> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, n))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn path<'a>(p: *const c_char, what: &str) -> Result<&'a Path, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(BocStatus::InvalidArgument, format!("{what} is not UTF-8")))?;
    Ok(Path::new(s))
}

/// Message for the last failed call on this thread, or null after a
/// success. Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn boc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn boc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a dataset from a row-major `rows x cols` matrix. `labels` may be
/// null; otherwise it holds `rows` entries.
///
/// # Safety
/// `logits` must point to `rows * cols` doubles and `labels`, when non-null,
/// to `rows` integers.
#[no_mangle]
pub unsafe extern "C" fn boc_dataset_new(
    logits: *const f64,
    rows: usize,
    cols: usize,
    labels: *const i64,
    out: *mut *mut BocDataset,
) -> BocStatus {
    guard(|| {
        let n = rows
            .checked_mul(cols)
            .ok_or_else(|| Fail(BocStatus::Shape, "rows * cols overflows".into()))?;
        let z = input(logits, n, "logits")?;
        let labels = if labels.is_null() {
            None
        } else {
            Some(input(labels, rows, "labels")?)
        };
        let ds = boc_core::validate_dataset(z.to_vec(), rows, cols, labels)?;
        write(out, Box::into_raw(Box::new(BocDataset(ds))), "out")
    })
}

/// Loads a dataset from `.npy` or `.csv` files. `labels_path` may be null.
///
/// # Safety
/// Paths must be null or NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn boc_dataset_load(
    logits_path: *const c_char,
    labels_path: *const c_char,
    out: *mut *mut BocDataset,
) -> BocStatus {
    guard(|| {
        let logits = path(logits_path, "logits_path")?;
        let labels = if labels_path.is_null() {
            None
        } else {
            Some(path(labels_path, "labels_path")?)
        };
        let ds = boc_core::io::load_dataset(logits, labels)?;
        write(out, Box::into_raw(Box::new(BocDataset(ds))), "out")
    })
}

/// # Safety
/// `dataset` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn boc_dataset_free(dataset: *mut BocDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Number of rows, or 0 for a null handle.
///
/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn boc_dataset_len(dataset: *const BocDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.0.len())
}

/// Number of classes, or 0 for a null handle.
///
/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn boc_dataset_num_classes(dataset: *const BocDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.0.num_classes())
}

/// Writes `softmax(z)` into `out`, which holds `n` doubles.
///
/// # Safety
/// `z` and `out` must each point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn boc_softmax(z: *const f64, n: usize, out: *mut f64) -> BocStatus {
    guard(|| {
        let z = input(z, n, "z")?;
        let p = boc_core::stable_softmax(z)?;
        if out.is_null() {
            return Err(null("out"));
        }
        slice::from_raw_parts_mut(out, n).copy_from_slice(&p);
        Ok(())
    })
}

/// `Pr(X >= wins)` for `X ~ Binomial(trials, p)`.
///
/// # Safety
/// `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn boc_binomial_sf(
    wins: u64,
    trials: u64,
    p: f64,
    out: *mut f64,
) -> BocStatus {
    guard(|| write(out, boc_core::binomial_sf(wins, trials, p)?, "out"))
}

/// Seed-free probe of one logit vector.
///
/// # Safety
/// `z` must point to `n` doubles and `out` to a writable [`BocProbe`].
#[no_mangle]
pub unsafe extern "C" fn boc_test_exact(
    z: *const f64,
    n: usize,
    k: u64,
    out: *mut BocProbe,
) -> BocStatus {
    guard(|| {
        let r = boc_core::boc_exact(input(z, n, "z")?, k)?;
        write(out, BocProbe::from(&r), "out")
    })
}

/// Sampled probe of one logit vector on stream `(seed, index)`; matches row
/// `index` of a batch run with the same seed.
///
/// # Safety
/// `z` must point to `n` doubles and `out` to a writable [`BocProbe`].
#[no_mangle]
pub unsafe extern "C" fn boc_test_seeded(
    z: *const f64,
    n: usize,
    k: u64,
    seed: u64,
    index: u64,
    out: *mut BocProbe,
) -> BocStatus {
    guard(|| {
        let r = boc_core::boc_test(input(z, n, "z")?, k, &mut record_stream(seed, index))?;
        write(out, BocProbe::from(&r), "out")
    })
}

/// Probes every row of `dataset`. `exact` selects the seed-free
/// mode.
///
/// # Safety
/// `dataset` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn boc_batch_run(
    dataset: *const BocDataset,
    k: u64,
    seed: u64,
    exact: bool,
    out: *mut *mut BocBatch,
) -> BocStatus {
    guard(|| {
        let ds = dataset.as_ref().ok_or_else(|| null("dataset"))?;
        let mode = if exact {
            BocMode::Exact
        } else {
            BocMode::Sampled
        };
        let rows = boc_batch_with(&ds.0, k, seed, mode, 0)?;
        let batch = BocBatch(rows.iter().map(BocProbe::from).collect());
        write(out, Box::into_raw(Box::new(batch)), "out")
    })
}

/// # Safety
/// `batch` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn boc_batch_len(batch: *const BocBatch) -> usize {
    batch.as_ref().map_or(0, |b| b.0.len())
}

/// # Safety
/// `batch` must be a live handle and `out` a writable [`BocProbe`].
#[no_mangle]
pub unsafe extern "C" fn boc_batch_get(
    batch: *const BocBatch,
    index: usize,
    out: *mut BocProbe,
) -> BocStatus {
    guard(|| {
        let b = batch.as_ref().ok_or_else(|| null("batch"))?;
        let r = b.0.get(index).ok_or_else(|| {
            Fail(
                BocStatus::InvalidArgument,
                format!("index {index} out of range for {} rows", b.0.len()),
            )
        })?;
        write(out, *r, "out")
    })
}

/// # Safety
/// `batch` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn boc_batch_free(batch: *mut BocBatch) {
    if !batch.is_null() {
        drop(Box::from_raw(batch));
    }
}

/// Expected calibration error over `bins` equal-width bins. `correct[i]` is
/// non-zero when sample `i` was classified correctly.
///
/// # Safety
/// `scores` and `correct` must each point to `n` elements.
#[no_mangle]
pub unsafe extern "C" fn boc_ece(
    scores: *const f64,
    correct: *const u8,
    n: usize,
    bins: usize,
    out: *mut f64,
) -> BocStatus {
    guard(|| {
        let scores = input(scores, n, "scores")?;
        let correct: Vec<bool> = input(correct, n, "correct")?
            .iter()
            .map(|&c| c != 0)
            .collect();
        let report = reliability(scores, &correct, bins, "ffi")?;
        write(out, report.ece, "out")
    })
}

/// AUROC with `pos` as the positive class; ties count one half.
///
/// # Safety
/// `pos` and `neg` must point to `n_pos` and `n_neg` doubles.
#[no_mangle]
pub unsafe extern "C" fn boc_auroc(
    pos: *const f64,
    n_pos: usize,
    neg: *const f64,
    n_neg: usize,
    out: *mut f64,
) -> BocStatus {
    guard(|| {
        write(
            out,
            auroc(input(pos, n_pos, "pos")?, input(neg, n_neg, "neg")?)?,
            "out",
        )
    })
}
