//! Binomial log-probabilities that stay accurate for large `n`.
//!
//! The mass is written in the saddle-point form
//! `ln P(k) = δ(n) − δ(k) − δ(n−k) − D(k, np) − D(n−k, nq) + ½ ln(n / 2πk(n−k))`
//! where `δ` is the Stirling remainder of `ln Γ` and `D(x, m) = x ln(x/m) + m − x`
//! is evaluated with a series when `x ≈ m`, avoiding the cancellation of
//! differences of large log-factorials.

use std::f64::consts::PI;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Stirling remainder `ln n! − (n + ½) ln n + n − ln √(2π)` for integer `n ≥ 1`.
pub(crate) fn stirling_remainder(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;

    debug_assert!(n >= 1);
    if n <= 15 {
        // n! is exact in f64 up to 22!
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        let nf = n as f64;
        return fact.ln() - (nf + 0.5) * nf.ln() + nf - LN_SQRT_2PI;
    }
    let nf = n as f64;
    let nn = nf * nf;
    if n > 500 {
        (S0 - S1 / nn) / nf
    } else if n > 80 {
        (S0 - (S1 - S2 / nn) / nn) / nf
    } else if n > 35 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / nf
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / nf
    }
}

/// Deviance term `x ln(x/m) + m − x`.
pub(crate) fn deviance(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        for j in 1..1000 {
            ej *= v2;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / m).ln() + m - x
    }
}

/// `ln P(X = k)` for `X ~ Binomial(n, p)`; `q = 1 − p` is passed separately so
/// that callers holding an accurate complement keep its precision.
pub fn ln_pmf(k: u64, n: u64, p: f64, q: f64) -> f64 {
    debug_assert!(k <= n);
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    if k == 0 {
        return nf * ln_complement(q, p);
    }
    if k == n {
        return nf * ln_complement(p, q);
    }
    let kf = k as f64;
    let rest = nf - kf;
    stirling_remainder(n)
        - stirling_remainder(k)
        - stirling_remainder(n - k)
        - deviance(kf, nf * p)
        - deviance(rest, nf * q)
        + 0.5 * (nf / (2.0 * PI * kf * rest)).ln()
}

// ln(x) where x = 1 - other; log1p keeps precision when `other` is small.
fn ln_complement(x: f64, other: f64) -> f64 {
    if other < 0.5 {
        (-other).ln_1p()
    } else {
        x.ln()
    }
}
