//! Log-factorials and log-binomials that stay accurate at `N ~ 10^8`.
//!
//! `ln C(n, k)` is assembled from the Stirling remainder
//! `delta(n) = ln n! - (n + 1/2) ln n + n - ln(2 pi)/2`, which is small and
//! known to full precision, so the entropy-normalized quantity
//! `ln C(n, k) + n I(x_k)` never passes through numbers of size `n ln n`.

use std::f64::consts::PI;

/// `delta(n)` for `n = 1..=15`.
const STIRLING_REMAINDER: [f64; 15] = [
    0.081_061_466_795_327_26,
    0.041_340_695_955_409_29,
    0.027_677_925_684_998_34,
    0.020_790_672_103_765_09,
    0.016_644_691_189_821_19,
    0.013_876_128_823_070_75,
    0.011_896_709_945_891_77,
    0.010_411_265_261_972_1,
    0.009_255_462_182_712_733,
    0.008_330_563_433_362_87,
    0.007_573_675_487_951_841,
    0.006_942_840_107_209_53,
    0.006_408_994_188_004_207,
    0.005_951_370_112_758_848,
    0.005_554_733_551_962_801,
];

/// Stirling remainder `ln n! - [(n + 1/2) ln n - n + ln(2 pi)/2]`, `n >= 1`.
pub fn stirling_remainder(n: u64) -> f64 {
    assert!(n >= 1, "stirling remainder is defined for n >= 1");
    if n <= 15 {
        return STIRLING_REMAINDER[(n - 1) as usize];
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    inv * (1.0 / 12.0
        - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))))
}

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 20 {
        let exact: u64 = (2..=n).product();
        return (exact as f64).ln();
    }
    let x = n as f64;
    (x + 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + stirling_remainder(n)
}

/// `n H(k/n)` with `H` the negative binary entropy in natural units,
/// i.e. `n I(x_k)` for the support point `x_k = -1 + 2k/n`.
///
/// Symmetric under `k <-> n - k` bit for bit.
pub fn scaled_entropy(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    let nf = n as f64;
    let term = |a: u64| {
        if a == 0 {
            0.0
        } else {
            let a = a as f64;
            a * (a / nf).ln()
        }
    };
    term(k) + term(n - k)
}

/// `ln C(n, k) + n I(x_k)`: the log ratio of the multiplicity to its
/// entropic envelope `exp(-n I(x_k))`. It is `0` at `k = 0, n` and close to
/// `-ln(pi n (1 - x^2) / 2) / 2` in the bulk.
pub fn log_binomial_entropy_gap(n: u64, k: u64) -> f64 {
    assert!(k <= n, "k = {k} exceeds n = {n}");
    if k == 0 || k == n {
        return 0.0;
    }
    let (a, b) = (k as f64, (n - k) as f64);
    let nf = n as f64;
    stirling_remainder(n) - (stirling_remainder(k) + stirling_remainder(n - k))
        + 0.5 * (nf / (2.0 * PI * (a * b))).ln()
}

/// `ln C(n, k)`, symmetric under `k <-> n - k` bit for bit.
pub fn log_binomial(n: u64, k: u64) -> f64 {
    log_binomial_entropy_gap(n, k) - scaled_entropy(n, k)
}

/// `atanh(m)/m - 1`, accurate near `m = 0` where it behaves like `m^2/3`.
pub fn atanh_over_m_minus_one(m: f64) -> f64 {
    let m2 = m * m;
    if m2 < 0.015_625 {
        // sum_{j>=1} m^{2j} / (2j + 1); m^2 < 1/64 makes 12 terms exact to rounding
        let mut term = 1.0;
        let mut acc = 0.0;
        for j in 1..=12 {
            term *= m2;
            acc += term / (2 * j + 1) as f64;
        }
        acc
    } else {
        m.atanh() / m - 1.0
    }
}
