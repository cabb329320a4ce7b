use cubicmf::finite_volume::{build_spectrum, magnetization_law};
use cubicmf::fluctuations::{
    clt_summary, coexistence_split, conditional_clt, critical_summary, ks_distance, quartic_cdf,
    theoretical_weights, Reference,
};
use cubicmf::landscape::{landscape_at, CouplingPair};
use cubicmf::numeric::integrate;
use cubicmf::phase_diagram::gamma;
use proptest::prelude::*;
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma_lr;

fn p(k: f64, j: f64) -> CouplingPair {
    CouplingPair::new(k, j).unwrap()
}

fn quartic_cdf_oracle(x: f64) -> f64 {
    // P(X <= x) = 1/2 + sign(x)/2 * P(1/4, x^4/12)
    if x == 0.0 {
        return 0.5;
    }
    0.5 + 0.5 * x.signum() * gamma_lr(0.25, x.powi(4) / 12.0)
}

#[test]
fn quartic_cdf_matches_incomplete_gamma() {
    let cdf = quartic_cdf();
    for x in [-4.0, -2.0, -1.0, -0.3, 0.0, 0.1, 0.7, 1.5, 3.0] {
        assert!((cdf.cdf(x) - quartic_cdf_oracle(x)).abs() < 1e-9, "x = {x}");
    }
}

#[test]
fn gaussian_reference_matches_erfc() {
    let r = Reference::Gaussian { variance: 0.07 };
    for x in [-0.9, -0.2, 0.0, 0.05, 0.4] {
        let exact = 0.5 * erfc(-x / (2.0 * 0.07f64).sqrt());
        assert!((r.cdf(x) - exact).abs() < 1e-10);
    }
}

#[test]
fn quartic_moments_by_quadrature() {
    let c = integrate(|x: f64| (-x.powi(4) / 12.0).exp(), -10.0, 10.0, 1e-13);
    let m2 = integrate(
        |x: f64| x * x * (-x.powi(4) / 12.0).exp(),
        -10.0,
        10.0,
        1e-13,
    ) / c;
    let m4 = integrate(
        |x: f64| x.powi(4) * (-x.powi(4) / 12.0).exp(),
        -10.0,
        10.0,
        1e-13,
    ) / c;
    assert!((m4 - 3.0).abs() < 1e-10);
    let gamma_ratio = 1.225_416_702_465_177_6 / 3.625_609_908_221_908;
    assert!((m2 - 12f64.sqrt() * gamma_ratio).abs() < 1e-10);
}

#[test]
fn free_spin_summary() {
    for n in [10usize, 1000, 100_000] {
        let s = clt_summary(p(0.0, 0.0), n).unwrap();
        assert!((s.variance - 1.0).abs() < 1e-12, "n = {n}: {}", s.variance);
        assert_eq!(s.mean, 0.0);
    }
    let ks: Vec<f64> = [100, 10_000]
        .iter()
        .map(|&n| clt_summary(p(0.0, 0.0), n).unwrap().ks_distance)
        .collect();
    assert!(ks[1] < ks[0] && ks[1] < 0.02, "{ks:?}");
}

#[test]
fn kurtosis_tends_to_three() {
    let errs: Vec<f64> = [1000, 10_000, 100_000]
        .iter()
        .map(|&n| (clt_summary(p(1.0, 1.2), n).unwrap().kurtosis - 3.0).abs())
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn ks_against_own_cdf_is_at_most_the_largest_atom() {
    let law = magnetization_law(&build_spectrum(400, p(0.5, 0.5), 0.0).unwrap());
    let mut acc = Vec::with_capacity(law.len());
    let mut run = 0.0;
    for &q in &law.prob {
        run += q;
        acc.push(run);
    }
    // right-continuous step cdf of the law itself
    let cdf = |x: f64| {
        let idx = law.support.partition_point(|&m| m <= x);
        if idx == 0 {
            0.0
        } else {
            acc[idx - 1]
        }
    };
    let d = ks_distance(&law.support, &law.prob, cdf);
    let largest = law.prob.iter().copied().fold(0.0, f64::max);
    assert!(d <= largest + 1e-15);
}

#[test]
fn weights_specialize_at_zero() {
    let c = gamma(1.0).unwrap();
    let params = p(1.0, c.gamma_k);
    let w = theoretical_weights(params).unwrap();
    let r1 = landscape_at(c.m1, params).unwrap();
    let w0 = (1.0 - c.gamma_k).powf(-0.5);
    let w1 = ((c.m1 * c.m1 - 1.0) * r1.d2).powf(-0.5);
    assert!((w.rho0 - w0 / (w0 + w1)).abs() < 1e-12);
    assert!((w.rho0 + w.rho1 - 1.0).abs() < 1e-12);
}

#[test]
fn conditional_laws_recombine() {
    let c = gamma(1.0).unwrap();
    let params = p(1.0, c.gamma_k);
    let n = 20_000;
    let a = conditional_clt(params, 0, n).unwrap();
    let b = conditional_clt(params, 1, n).unwrap();
    assert!((a.mass + b.mass - 1.0).abs() < 1e-13);
    let full = magnetization_law(&build_spectrum(n, params, 0.0).unwrap()).mean();
    let ma = a.summary.mean / (n as f64).sqrt();
    let mb = c.m1 + b.summary.mean / (n as f64).sqrt();
    assert!((a.mass * ma + b.mass * mb - full).abs() < 1e-12);
    assert!(a.summary.mean.abs() < 0.05);
}

#[test]
fn split_mirrors_for_negative_k() {
    let c = gamma(1.0).unwrap();
    let (a0, a1, m1) = coexistence_split(p(1.0, c.gamma_k)).unwrap();
    let (b0, b1, n1) = coexistence_split(p(-1.0, c.gamma_k)).unwrap();
    assert_eq!(m1, -n1);
    assert_eq!((a0.hi, a1.lo), (-b0.lo, -b1.hi));
}

#[test]
fn critical_odd_moments_vanish() {
    let s = critical_summary(10_001).unwrap();
    assert_eq!(s.mean, 0.0);
    let law = magnetization_law(&build_spectrum(10_000, p(0.0, 1.0), 0.0).unwrap());
    assert_eq!(law.rescaled_moment(0.0, 10.0, 3), 0.0);
    assert_eq!(law.rescaled_moment(0.0, 10.0, 5), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ks_is_invariant_under_increasing_maps(scale in 0.1..10.0f64, shift in -3.0..3.0f64) {
        let law = magnetization_law(&build_spectrum(300, p(0.0, 0.5), 0.0).unwrap());
        let atoms: Vec<f64> = law.support.iter().map(|m| 5.0 * m).collect();
        let cdf = Reference::Gaussian { variance: 2.0 };
        let base = ks_distance(&atoms, &law.prob, |x| cdf.cdf(x));
        let moved: Vec<f64> = atoms.iter().map(|x| scale * x + shift).collect();
        let d = ks_distance(&moved, &law.prob, |y| cdf.cdf((y - shift) / scale));
        prop_assert!((d - base).abs() < 1e-12);
    }
}
