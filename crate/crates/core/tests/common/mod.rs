//! Exact binomial tails over big integers, shared by the test targets.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// `n / 2^shift` rounded to a double, for `n >= 0`.
fn dyadic_to_f64(n: &BigInt, shift: u64) -> f64 {
    if n.is_zero() {
        return 0.0;
    }
    // keep 64 leading bits; the dropped tail is below 2^-63 relative
    let drop = n.bits().saturating_sub(64);
    let top = (n >> drop).to_u64().unwrap() as f64;
    let mut e = drop as i64 - shift as i64;
    let mut v = top;
    while e != 0 {
        let step = e.clamp(-1000, 1000);
        v *= 2f64.powi(step as i32);
        e -= step;
    }
    v
}

/// `Pr(X >= w)` for every `w` in `0..=k`, `X ~ Bin(k, p)`, with `p` taken
/// as the exact value of the double. Terms share the denominator `2^(e k)`
/// so the sums are carried over integers.
pub fn exact_tails(k: u64, p: f64) -> Vec<f64> {
    let p = BigRational::from_float(p).unwrap();
    let (num, den) = (p.numer().clone(), p.denom().clone());
    let shift = den.bits() - 1;
    assert_eq!(BigInt::one() << shift, den);
    let rest = &den - &num;
    let k = k as usize;
    let powers = |base: &BigInt| {
        let mut v = vec![BigInt::one()];
        for i in 0..k {
            let next = &v[i] * base;
            v.push(next);
        }
        v
    };
    let (num_pow, rest_pow) = (powers(&num), powers(&rest));
    let mut terms = Vec::with_capacity(k + 1);
    let mut choose = BigInt::one();
    for i in 0..=k {
        terms.push(&choose * &num_pow[i] * &rest_pow[k - i]);
        choose = choose * BigInt::from(k - i) / BigInt::from(i + 1);
    }
    let mut tails = vec![0.0; k + 1];
    let mut acc = BigInt::zero();
    for w in (0..=k).rev() {
        acc += &terms[w];
        tails[w] = dyadic_to_f64(&acc, shift * k as u64);
    }
    tails
}
