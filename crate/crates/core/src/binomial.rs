//! Exact binomial upper tail `Pr(Binomial(k, p) >= w)`.
//!
//! Terms are carried as a mantissa in `[0.5, 1)` with a separate binary
//! exponent, so `p^k` never underflows and the relative error stays at a
//! few hundred ulps for `k` up to a few thousand. A plain `exp(ln ...)`
//! evaluation would lose `|k ln p|` ulps instead.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
struct Scaled {
    mant: f64,
    exp: i64,
}

fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    if raw_exp == 0 {
        // subnormal: rescale into the normal range first
        let (m, e) = frexp(x * f64::from_bits(0x43f0_0000_0000_0000)); // 2^64
        return (m, e - 64);
    }
    let mant = f64::from_bits((bits & !(0x7ff << 52)) | (1022 << 52));
    (mant, raw_exp - 1022)
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    let two_1023 = f64::from_bits(2046 << 52);
    let two_m1022 = f64::from_bits(1 << 52);
    while e > 1023 {
        x *= two_1023;
        e -= 1023;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1022 {
        x *= two_m1022;
        e += 1022;
        if x == 0.0 {
            return x;
        }
    }
    x * f64::from_bits(((e + 1023) as u64) << 52)
}

impl Scaled {
    const ONE: Scaled = Scaled { mant: 0.5, exp: 1 };

    fn new(x: f64) -> Self {
        let (mant, exp) = frexp(x);
        Scaled { mant, exp }
    }

    fn mul(self, other: Scaled) -> Self {
        let (mant, e) = frexp(self.mant * other.mant);
        Scaled {
            mant,
            exp: self.exp + other.exp + e,
        }
    }

    fn mul_ratio(self, num: f64, den: f64) -> Self {
        let (mant, e) = frexp(self.mant * num / den);
        Scaled {
            mant,
            exp: self.exp + e,
        }
    }

    fn powi(self, mut n: u64) -> Self {
        let mut base = self;
        let mut acc = Scaled::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            n >>= 1;
        }
        acc
    }
}

fn check_params(wins: u64, trials: u64, p: f64) -> Result<()> {
    if wins > trials {
        return Err(Error::InvalidArgument(format!(
            "wins {wins} exceed trials {trials}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "success probability {p} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Sum of the pmf over `from..=to`, scaled relative to its largest term.
fn mass(trials: u64, p: f64, from: u64, to: u64) -> f64 {
    let q = 1.0 - p;
    let k = trials;

    // C(k, from), built with the shorter of the two symmetric products.
    let j = from.min(k - from);
    let mut coeff = Scaled::ONE;
    for i in 1..=j {
        coeff = coeff.mul_ratio((k - j + i) as f64, i as f64);
    }

    let mut term = coeff
        .mul(Scaled::new(p).powi(from))
        .mul(Scaled::new(q).powi(k - from));
    let mut terms = Vec::with_capacity((to - from + 1) as usize);
    terms.push(term);
    let odds = Scaled::new(p / q);
    for w in from..to {
        term = term.mul(odds).mul_ratio((k - w) as f64, (w + 1) as f64);
        terms.push(term);
    }

    let top = terms.iter().map(|t| t.exp).max().unwrap_or(0);
    // Neumaier-compensated sum relative to the largest exponent
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in &terms {
        let v = ldexp(t.mant, t.exp - top);
        let s = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - s) + v;
        } else {
            comp += (v - s) + sum;
        }
        sum = s;
    }
    ldexp(sum + comp, top)
}

/// `Pr(X >= wins)` for `X ~ Binomial(trials, p)`, inclusive of `wins`.
///
/// At or below the median the lower tail (at most one half) is summed and
/// complemented; above it the upper tail is summed directly. Either way the
/// result is monotone in `wins` and runs in `O(trials)`.
pub fn binomial_sf(wins: u64, trials: u64, p: f64) -> Result<f64> {
    check_params(wins, trials, p)?;
    if wins == 0 || p == 1.0 {
        return Ok(1.0);
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let median_floor = (trials as f64 * p).floor() as u64;
    let sf = if wins <= median_floor {
        1.0 - mass(trials, p, 0, wins - 1)
    } else {
        mass(trials, p, wins, trials)
    };
    Ok(sf.clamp(0.0, 1.0))
}
