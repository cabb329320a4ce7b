//! Scalar numerics shared by the model modules: deterministic summation,
//! log-sum-exp, bracketing root and minimum search, adaptive quadrature.

/// Block length below which [`pairwise_sum_by`] sums sequentially.
const PAIRWISE_BLOCK: usize = 64;

/// Sums `f(0) + ... + f(len - 1)` by recursive halving.
///
/// The association order depends only on `len`, never on scheduling.
pub fn pairwise_sum_by<F: Fn(usize) -> f64>(len: usize, f: &F) -> f64 {
    fn go<F: Fn(usize) -> f64>(lo: usize, hi: usize, f: &F) -> f64 {
        if hi - lo <= PAIRWISE_BLOCK {
            (lo..hi).map(f).sum()
        } else {
            let mid = lo + (hi - lo) / 2;
            go(lo, mid, f) + go(mid, hi, f)
        }
    }
    go(0, len, f)
}

/// Sums `f(i)` for `i in 0..len`, first combining the mirrored terms
/// `f(i) + f(len - 1 - i)`, then summing those pairs pairwise.
///
/// Reversing the sequence leaves the result bit-for-bit unchanged, and a
/// sequence that is odd under reversal sums to exactly zero. Every exact
/// reduction over a magnetization spectrum goes through here so that the
/// spin-flip symmetry `k <-> N - k` survives rounding.
pub fn folded_sum_by<F: Fn(usize) -> f64>(len: usize, f: F) -> f64 {
    let half = len / 2;
    let pairs = pairwise_sum_by(half, &|i| f(i) + f(len - 1 - i));
    if len % 2 == 1 {
        pairs + f(half)
    } else {
        pairs
    }
}

/// [`folded_sum_by`] over a slice.
pub fn folded_sum(values: &[f64]) -> f64 {
    folded_sum_by(values.len(), |i| values[i])
}

/// `log(sum(exp(v)))` over the indices `0..len`, shifted by the maximum.
///
/// Returns `-inf` for an empty range or when every term is `-inf`.
pub fn log_sum_exp_by<F: Fn(usize) -> f64>(len: usize, f: F) -> f64 {
    let max = (0..len).map(&f).fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if !max.is_finite() {
        return max;
    }
    max + folded_sum_by(len, |i| (f(i) - max).exp()).ln()
}

pub fn log_sum_exp(values: &[f64]) -> f64 {
    log_sum_exp_by(values.len(), |i| values[i])
}

/// Bisection on a sign-changing bracket `[lo, hi]`.
///
/// Iterates until the bracket is no wider than `tol` or cannot be split
/// further in floating point. An exact zero at an endpoint or midpoint is
/// returned as is. The caller guarantees `f(lo)` and `f(hi)` differ in sign.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    let f_hi = f(hi);
    if f_hi == 0.0 {
        return hi;
    }
    debug_assert!(f_lo.signum() != f_hi.signum(), "bisect needs a sign change");
    while hi - lo > tol {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    lo + 0.5 * (hi - lo)
}

/// Golden-section minimization of a unimodal `f` on `[a, b]`.
///
/// Returns `(argmin, min)`; stops once the bracket is narrower than `tol`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    // 1/phi and 1/phi^2
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    const INV_PHI2: f64 = 0.381_966_011_250_105_1;

    let mut c = a + INV_PHI2 * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = a + INV_PHI2 * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    [(c, fc), (d, fd), (x, fx)].into_iter().fold(
        (x, fx),
        |best, cand| if cand.1 < best.1 { cand } else { best },
    )
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7.
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Gauss-Kronrod panel: `(kronrod estimate, |kronrod - gauss|)`.
fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut kronrod = KRONROD_WEIGHTS[7] * f_center;
    let mut gauss = GAUSS_WEIGHTS[3] * f_center;
    for (i, &x) in GK_NODES[..7].iter().enumerate() {
        let pair = f(center - half * x) + f(center + half * x);
        kronrod += KRONROD_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss-Kronrod quadrature of `f` over `[a, b]` to absolute
/// tolerance `tol`, by recursive bisection of panels whose error estimate
/// exceeds their share of the tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn go<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (estimate, error) = gauss_kronrod_15(f, a, b);
        if error <= tol || depth == 0 {
            return estimate;
        }
        let mid = 0.5 * (a + b);
        go(f, a, mid, 0.5 * tol, depth - 1) + go(f, mid, b, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    go(&f, a, b, tol, 48)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folded_sum_is_reversal_invariant() {
        let v: Vec<f64> = (0..1001).map(|i| (i as f64 * 0.37).sin() * 1e3).collect();
        let mut r = v.clone();
        r.reverse();
        assert_eq!(folded_sum(&v).to_bits(), folded_sum(&r).to_bits());
    }

    #[test]
    fn folded_sum_of_odd_sequence_is_exactly_zero() {
        let v: Vec<f64> = (0..=500)
            .map(|i| ((i as f64) - 250.0).powi(3) * 1.1)
            .collect();
        assert_eq!(folded_sum(&v), 0.0);
    }

    #[test]
    fn log_sum_exp_handles_huge_and_empty() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY; 3]), f64::NEG_INFINITY);
        let v = [1e6, 1e6];
        assert!((log_sum_exp(&v) - (1e6 + std::f64::consts::LN_2)).abs() < 1e-9);
    }

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 0.0);
        assert!((r - std::f64::consts::SQRT_2).abs() < 4e-16);
    }

    #[test]
    fn golden_section_finds_parabola_vertex() {
        let (x, fx) = golden_section_min(|x| (x - 0.3).powi(2) + 1.0, -1.0, 2.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-14);
    }

    #[test]
    fn integrate_gaussian_and_polynomial() {
        let g = integrate(|x: f64| (-x * x).exp(), -12.0, 12.0, 1e-13);
        assert!((g - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        let p = integrate(|x: f64| x.powi(5) - x, 0.0, 2.0, 1e-14);
        assert!((p - (64.0 / 6.0 - 2.0)).abs() < 1e-12);
    }
}
