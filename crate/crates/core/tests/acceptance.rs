//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line; exits non-zero if any fails.
//!
//! Run with `cargo test -p boc-core --test acceptance`.

use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::StandardNormal;

use boc_core::boc::{boc_batch, run_trials};
use boc_core::metrics::{auroc, reliability, roc_curve, trapezoid_area};
use boc_core::rum::{
    generate_calibrated_dataset, generate_delusional_dataset, gumbel_argmax_freq,
    pairwise_dominance_freq, SynthConfig, UtilityVector,
};
use boc_core::stream::seeded;
use boc_core::{binomial_sf, validate_dataset, LogitDataset};

mod common;
use common::exact_tails;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn binomial_oracle() -> Outcome {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for k in 1..=30u64 {
        for tenth in 1..=9 {
            let p = tenth as f64 / 10.0;
            let tails = exact_tails(k, p);
            for (w, want) in tails.iter().enumerate() {
                let got = binomial_sf(w as u64, k, p).map_err(|e| e.to_string())?;
                worst = worst.max((got - want).abs());
                cases += 1;
            }
        }
    }
    check(
        worst <= 1e-12,
        format!("{cases} cases, max abs error {worst:.3e} (bound 1e-12)"),
    )
}

fn softmax_top(z: &[f64]) -> f64 {
    let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    1.0 / z.iter().map(|&v| (v - m).exp()).sum::<f64>()
}

fn deterministic_win() -> Outcome {
    let mut rng = seeded(20_240_601);
    let rows: Vec<Vec<f64>> = (0..1000)
        .map(|_| {
            let mut z: Vec<f64> = (0..10)
                .map(|_| 2.0 * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let top = rng.random_range(0..10);
            let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            z[top] = m + 0.01 + rng.random::<f64>();
            z
        })
        .collect();
    let flat = rows.iter().flatten().copied().collect();
    let ds = validate_dataset(flat, 1000, 10, None).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for seed in 0..10 {
        let results = boc_batch(&ds, 100, seed).map_err(|e| e.to_string())?;
        for (r, z) in results.iter().zip(&rows) {
            if r.wins != 100 {
                return Err(format!("seed {seed}: W = {} on a unique-max row", r.wins));
            }
            worst = worst.max((r.p_val - softmax_top(z).powi(100)).abs());
        }
    }
    check(
        worst <= 1e-10,
        format!("10 seeds x 1000 rows, W=100, max |p_val - p^100| {worst:.3e} (bound 1e-10)"),
    )
}

fn concentration() -> Outcome {
    let z = [1.0, 1.0, 0.0, 0.0, 0.0];
    let mut far = 0;
    for seed in 0..10_000u64 {
        let w = run_trials(&z, 100, &mut seeded(seed)).map_err(|e| e.to_string())?;
        if (w as f64 / 100.0 - 0.75).abs() >= 0.15 {
            far += 1;
        }
    }
    let frac = far as f64 / 10_000.0;
    check(
        frac <= 0.025,
        format!("{far}/10000 runs with |W/100 - 0.75| >= 0.15, fraction {frac} (bound 0.025)"),
    )
}

fn msp_ece(ds: &LogitDataset) -> Result<f64, String> {
    let conf: Vec<f64> = ds.predictions().iter().map(|p| p.confidence).collect();
    let correct = ds.correctness().map_err(|e| e.to_string())?;
    Ok(reliability(&conf, &correct, 15, "msp")
        .map_err(|e| e.to_string())?
        .ece)
}

fn calibrated_oracle() -> Outcome {
    let cfg = SynthConfig::new(100_000, 10, 2.0, 0);
    let calibrated = msp_ece(&generate_calibrated_dataset(&cfg).map_err(|e| e.to_string())?)?;
    let delusional =
        msp_ece(&generate_delusional_dataset(&cfg.with_peak(3.0)).map_err(|e| e.to_string())?)?;
    check(
        calibrated <= 0.01 && delusional > calibrated,
        format!(
            "calibrated ECE {calibrated:.5} (bound 0.01), peak=3 ECE {delusional:.5} (must exceed)"
        ),
    )
}

fn gumbel_facts() -> Outcome {
    let u = UtilityVector::new(vec![0.0, 2f64.ln(), 3f64.ln()]).map_err(|e| e.to_string())?;
    let freq = gumbel_argmax_freq(&u, 200_000, 0).map_err(|e| e.to_string())?;
    let want = [1.0 / 6.0, 1.0 / 3.0, 0.5];
    let argmax_err = freq
        .iter()
        .zip(want)
        .map(|(f, w)| (f - w).abs())
        .fold(0.0, f64::max);
    let dom = pairwise_dominance_freq(3f64.ln(), 0.0, 200_000, 0).map_err(|e| e.to_string())?;
    let dom_err = (dom - 0.75).abs();
    check(
        argmax_err <= 0.01 && dom_err <= 0.01,
        format!(
            "argmax max error {argmax_err:.4}, dominance {dom:.4} error {dom_err:.4} (bound 0.01)"
        ),
    )
}

fn ece_hand_case() -> Outcome {
    let r = reliability(&[0.9, 0.8, 0.3, 0.2], &[true, false, true, false], 2, "msp")
        .map_err(|e| e.to_string())?;
    check(
        (r.ece - 0.30).abs() <= 1e-12,
        format!("ECE {:.17} (0.30 within 1e-12)", r.ece),
    )
}

fn auroc_properties() -> Outcome {
    let e = |x: boc_core::Error| x.to_string();
    if auroc(&[0.9, 0.8], &[0.1, 0.2]).map_err(e)? != 1.0 {
        return Err("perfect separation is not exactly 1".into());
    }
    if auroc(&[0.3; 7], &[0.3; 4]).map_err(e)? != 0.5 {
        return Err("all-tied is not exactly 0.5".into());
    }
    let mut rng = seeded(77);
    let mut worst_area = 0.0f64;
    for instance in 0..100 {
        let n_pos = rng.random_range(1..60);
        let n_neg = rng.random_range(1..60);
        // half the instances use a coarse integer grid to force ties
        let coarse = instance % 2 == 0;
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n)
                .map(|_| {
                    if coarse {
                        rng.random_range(0..12) as f64
                    } else {
                        rng.random::<f64>()
                    }
                })
                .collect()
        };
        let (pos, neg) = (draw(n_pos), draw(n_neg));
        let a = auroc(&pos, &neg).map_err(e)?;
        let b = auroc(&neg, &pos).map_err(e)?;
        if a + b != 1.0 {
            return Err(format!("instance {instance}: {a} + {b} != 1"));
        }
        if coarse {
            // exact strictly increasing maps on small integers
            let maps: [fn(f64) -> f64; 3] = [|x| x * x * x, |x| 2.0 * x + 7.0, f64::exp];
            for f in maps {
                let fp: Vec<f64> = pos.iter().map(|&x| f(x)).collect();
                let fn_: Vec<f64> = neg.iter().map(|&x| f(x)).collect();
                if auroc(&fp, &fn_).map_err(e)? != a {
                    return Err(format!(
                        "instance {instance}: monotone transform changed AUROC"
                    ));
                }
            }
        }
        let area = trapezoid_area(&roc_curve(&pos, &neg).map_err(e)?);
        worst_area = worst_area.max((area - a).abs());
    }
    check(
        worst_area <= 1e-12,
        format!("exact corner cases, complement and transform checks; max |area - auroc| {worst_area:.3e} (bound 1e-12)"),
    )
}

fn run_boc(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_boc"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr).trim()
        ))
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let p = |name: &str| d.join(name).to_str().unwrap().to_owned();
    run_boc(&[
        "synth",
        "--samples",
        "3000",
        "--classes",
        "10",
        "--seed",
        "1",
        "--out",
        &p(""),
        "--name",
        "id",
    ])?;
    run_boc(&[
        "synth",
        "--samples",
        "2000",
        "--classes",
        "10",
        "--seed",
        "2",
        "--peak",
        "0.4",
        "--out",
        &p(""),
        "--name",
        "ood",
    ])?;
    let (logits, labels, ood) = (p("id_logits.npy"), p("id_labels.npy"), p("ood_logits.npy"));

    let mut jobs: Vec<Vec<&str>> = vec![];
    for score in ["boc", "boc-exact"] {
        jobs.push(vec![
            "probe", "--logits", &logits, "--score", score, "--seed", "5",
        ]);
    }
    for score in ["msp", "boc", "boc-exact", "temp-scaled"] {
        jobs.push(vec![
            "calibrate",
            "--logits",
            &logits,
            "--labels",
            &labels,
            "--score",
            score,
            "--seed",
            "5",
        ]);
        jobs.push(vec![
            "ood",
            "--logits",
            &logits,
            "--labels",
            &labels,
            "--ood-logits",
            &ood,
            "--score",
            score,
            "--seed",
            "5",
        ]);
    }
    let mut compared = 0;
    for (j, job) in jobs.iter().enumerate() {
        for format in ["json", "csv"] {
            let mut reference: Option<Vec<u8>> = None;
            for (r, threads) in [None, None, Some("1"), Some("2"), Some("8")]
                .into_iter()
                .enumerate()
            {
                let out = d.join(format!("job{j}_{r}.{format}"));
                let out = out.to_str().unwrap();
                let mut args = job.clone();
                args.extend(["--out", out]);
                if let Some(t) = threads {
                    args.extend(["--threads", t]);
                }
                run_boc(&args)?;
                let bytes = fs::read(out).map_err(|e| e.to_string())?;
                match &reference {
                    None => reference = Some(bytes),
                    Some(b) if *b == bytes => compared += 1,
                    Some(_) => {
                        return Err(format!("{} output differs at threads={threads:?}", job[0]))
                    }
                }
            }
        }
    }
    check(
        compared == jobs.len() * 2 * 4,
        format!("{} command/format pairs, {compared} byte-identical reruns across 1/2/8/default threads", jobs.len() * 2),
    )
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion {
            id: 1,
            name: "binomial oracle equivalence",
            limit: secs(5),
            run: binomial_oracle,
        },
        Criterion {
            id: 2,
            name: "deterministic-win identity",
            limit: secs(5),
            run: deterministic_win,
        },
        Criterion {
            id: 3,
            name: "Hoeffding concentration",
            limit: secs(10),
            run: concentration,
        },
        Criterion {
            id: 4,
            name: "calibrated-oracle ECE",
            limit: secs(30),
            run: calibrated_oracle,
        },
        Criterion {
            id: 5,
            name: "Gumbel facts",
            limit: secs(10),
            run: gumbel_facts,
        },
        Criterion {
            id: 6,
            name: "ECE hand case",
            limit: None,
            run: ece_hand_case,
        },
        Criterion {
            id: 7,
            name: "AUROC properties",
            limit: None,
            run: auroc_properties,
        },
        Criterion {
            id: 8,
            name: "CLI determinism",
            limit: None,
            run: determinism,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(d), Some(limit)) if elapsed > limit => {
                Err(format!("{d}; took {elapsed:.2?}, limit {limit:?}"))
            }
            (o, _) => o,
        };
        let limit = c.limit.map(|l| format!(" limit {l:?}")).unwrap_or_default();
        match outcome {
            Ok(detail) => println!(
                "criterion {}: PASS  {} [{elapsed:.2?}{limit}] {detail}",
                c.id, c.name
            ),
            Err(detail) => {
                failed += 1;
                println!(
                    "criterion {}: FAIL  {} [{elapsed:.2?}{limit}] {detail}",
                    c.id, c.name
                );
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
