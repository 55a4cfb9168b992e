use std::ffi::{CStr, CString};
use std::ptr;

use boc_ffi::*;

fn last_error() -> String {
    let p = boc_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn version_is_cargo_version() {
    let v = unsafe { CStr::from_ptr(boc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn softmax_and_sf() {
    let z = [0.0, 0.0];
    let mut p = [0.0; 2];
    assert_eq!(
        unsafe { boc_softmax(z.as_ptr(), 2, p.as_mut_ptr()) },
        BocStatus::Ok
    );
    assert_eq!(p, [0.5, 0.5]);
    assert!(boc_last_error_message().is_null());

    let mut sf = -1.0;
    assert_eq!(
        unsafe { boc_binomial_sf(0, 100, 0.3, &mut sf) },
        BocStatus::Ok
    );
    assert_eq!(sf, 1.0);
    assert_eq!(
        unsafe { boc_binomial_sf(1, 10, 1.5, &mut sf) },
        BocStatus::InvalidArgument
    );
    assert!(!last_error().is_empty());
}

#[test]
fn error_codes() {
    let z = [1.0, f64::NAN];
    let mut p = [0.0; 2];
    assert_eq!(
        unsafe { boc_softmax(z.as_ptr(), 2, p.as_mut_ptr()) },
        BocStatus::NonFinite
    );
    assert_eq!(
        unsafe { boc_softmax(ptr::null(), 2, p.as_mut_ptr()) },
        BocStatus::NullPointer
    );
    assert_eq!(
        unsafe { boc_softmax([1.0, 2.0].as_ptr(), 2, ptr::null_mut()) },
        BocStatus::NullPointer
    );

    let mut ds = ptr::null_mut();
    let labels = [0i64, 7];
    let logits = [1.0, 0.0, 0.0, 1.0];
    assert_eq!(
        unsafe { boc_dataset_new(logits.as_ptr(), 2, 2, labels.as_ptr(), &mut ds) },
        BocStatus::LabelRange
    );
    assert!(ds.is_null());
    assert!(last_error().contains('7'));

    let missing = CString::new("/nonexistent/logits.npy").unwrap();
    assert_eq!(
        unsafe { boc_dataset_load(missing.as_ptr(), ptr::null(), &mut ds) },
        BocStatus::Io
    );
    let bad_ext = CString::new("/tmp/logits.txt").unwrap();
    assert_eq!(
        unsafe { boc_dataset_load(bad_ext.as_ptr(), ptr::null(), &mut ds) },
        BocStatus::Format
    );
}

#[test]
fn seeded_probe_matches_batch_rows() {
    let logits = [3.0, 1.0, 1.0, 2.0, 2.0, 0.0, 0.5, 0.4, 0.3];
    let mut ds = ptr::null_mut();
    assert_eq!(
        unsafe { boc_dataset_new(logits.as_ptr(), 3, 3, ptr::null(), &mut ds) },
        BocStatus::Ok
    );
    assert_eq!(unsafe { boc_dataset_len(ds) }, 3);
    assert_eq!(unsafe { boc_dataset_num_classes(ds) }, 3);

    let mut batch = ptr::null_mut();
    assert_eq!(
        unsafe { boc_batch_run(ds, 100, 5, false, &mut batch) },
        BocStatus::Ok
    );
    assert_eq!(unsafe { boc_batch_len(batch) }, 3);
    for i in 0..3 {
        let mut row = std::mem::MaybeUninit::<BocProbe>::uninit();
        assert_eq!(
            unsafe { boc_batch_get(batch, i, row.as_mut_ptr()) },
            BocStatus::Ok
        );
        let row = unsafe { row.assume_init() };
        let mut single = std::mem::MaybeUninit::<BocProbe>::uninit();
        let z = &logits[i * 3..i * 3 + 3];
        assert_eq!(
            unsafe { boc_test_seeded(z.as_ptr(), 3, 100, 5, i as u64, single.as_mut_ptr()) },
            BocStatus::Ok
        );
        assert_eq!(row, unsafe { single.assume_init() });
    }
    let mut row = std::mem::MaybeUninit::<BocProbe>::uninit();
    assert_eq!(
        unsafe { boc_batch_get(batch, 3, row.as_mut_ptr()) },
        BocStatus::InvalidArgument
    );

    unsafe {
        boc_batch_free(batch);
        boc_dataset_free(ds);
        boc_batch_free(ptr::null_mut());
        boc_dataset_free(ptr::null_mut());
    }
    assert_eq!(unsafe { boc_dataset_len(ptr::null()) }, 0);
}

#[test]
fn exact_probe_unique_max() {
    let z = [4.0, 0.0, 0.0];
    let mut r = std::mem::MaybeUninit::<BocProbe>::uninit();
    assert_eq!(
        unsafe { boc_test_exact(z.as_ptr(), 3, 100, r.as_mut_ptr()) },
        BocStatus::Ok
    );
    let r = unsafe { r.assume_init() };
    assert_eq!((r.wins, r.trials, r.top_class, r.p_dom), (100, 100, 0, 1.0));
    assert!((r.p_val - r.confidence.powi(100)).abs() < 1e-12);
}

#[test]
fn ece_and_auroc() {
    let scores = [0.9, 0.8, 0.3, 0.2];
    let correct = [1u8, 0, 1, 0];
    let mut ece = 0.0;
    assert_eq!(
        unsafe { boc_ece(scores.as_ptr(), correct.as_ptr(), 4, 2, &mut ece) },
        BocStatus::Ok
    );
    assert!((ece - 0.30).abs() < 1e-12);

    let pos = [0.9, 0.8];
    let neg = [0.1, 0.2];
    let mut a = 0.0;
    assert_eq!(
        unsafe { boc_auroc(pos.as_ptr(), 2, neg.as_ptr(), 2, &mut a) },
        BocStatus::Ok
    );
    assert_eq!(a, 1.0);
    assert_eq!(
        unsafe { boc_auroc(pos.as_ptr(), 2, neg.as_ptr(), 0, &mut a) },
        BocStatus::InvalidArgument
    );
}
