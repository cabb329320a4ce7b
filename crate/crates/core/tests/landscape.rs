use cubicmf::landscape::{entropy, g, landscape_at, phi, psi, CouplingPair};
use cubicmf::stationary_points::{
    bracket_m1, classify, sensitivity, solve_consistency, StationaryClassification,
};
use proptest::prelude::*;

fn p(k: f64, j: f64) -> CouplingPair {
    CouplingPair::new(k, j).unwrap()
}

fn central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

#[test]
fn derivative_chain_matches_finite_differences() {
    let params = p(0.8, 0.3);
    let h = 1e-5;
    for m in [-0.7, -0.2, 0.05, 0.4, 0.9] {
        let r = landscape_at(m, params).unwrap();
        let d1 = central(|x| phi(x, params).unwrap(), m, h);
        let d2 = central(|x| landscape_at(x, params).unwrap().d1, m, h);
        let d3 = central(|x| landscape_at(x, params).unwrap().d2, m, h);
        let d4 = central(|x| landscape_at(x, params).unwrap().d3, m, h);
        for (exact, fd) in [(r.d1, d1), (r.d2, d2), (r.d3, d3), (r.d4, d4)] {
            assert!(
                (exact - fd).abs() <= 1e-6 * exact.abs().max(1.0),
                "m = {m}: {exact} vs {fd}"
            );
        }
    }
}

#[test]
fn psi_at_one_matches_dense_grid() {
    let n = 1_000_000;
    let grid_min = (1..n)
        .map(|i| {
            let m = i as f64 / n as f64;
            g(m, 1.0).unwrap() / m
        })
        .fold(f64::INFINITY, f64::min);
    let s = psi(1.0).unwrap();
    assert!(s.value <= grid_min + 1e-14);
    assert!(grid_min - s.value < 1e-10, "{} vs {}", s.value, grid_min);
}

#[test]
fn psi_is_the_onset_of_positive_roots() {
    for k in [0.2, 1.0, 3.0] {
        let s = psi(k).unwrap().value;
        assert_eq!(solve_consistency(p(k, s - 1e-6)).unwrap(), vec![0.0]);
        assert_eq!(solve_consistency(p(k, s + 1e-6)).unwrap().len(), 3);
    }
}

#[test]
fn tau_is_below_the_largest_root() {
    for (k, j) in [(1.0, 0.6), (0.5, 0.9), (2.0, 0.0), (4.0, -1.0)] {
        let (lo, hi) = bracket_m1(p(k, j)).unwrap();
        match classify(p(k, j)).unwrap().kind {
            StationaryClassification::TwoLocalMaxima { m1, .. } => assert!(lo < m1 && m1 < hi),
            other => panic!("({k},{j}): {other:?}"),
        }
    }
}

/// Zeros of `phi'` located by scanning `n` cells for strict sign changes.
fn scan_roots(params: CouplingPair, n: usize) -> Vec<f64> {
    let lo = -1.0 + 1e-12;
    let hi = 1.0 - 1e-12;
    let x = |i: usize| lo + (hi - lo) * i as f64 / n as f64;
    let d1 = |m: f64| landscape_at(m, params).unwrap().d1;
    let mut roots = Vec::new();
    let mut prev = d1(x(0));
    for i in 1..=n {
        let cur = d1(x(i));
        if cur == 0.0 || prev.signum() != cur.signum() && prev != 0.0 {
            roots.push(x(i));
        }
        prev = cur;
    }
    roots
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solver_finds_every_sign_change(k in -4.0..4.0f64, j in -1.5..2.0f64) {
        let params = p(k, j);
        if let Ok(c) = classify(params) {
            prop_assume!(!c.low_confidence);
        }
        let roots = solve_consistency(params).unwrap();
        // stay clear of nearly merging roots, which a fixed grid cannot split
        prop_assume!(roots.windows(2).all(|w| w[1] - w[0] > 1e-3));
        let scanned = scan_roots(params, 100_000);
        prop_assert_eq!(roots.len(), scanned.len(), "{:?} vs {:?}", roots, scanned);
        for (r, s) in roots.iter().zip(&scanned) {
            prop_assert!((r - s).abs() < 4e-5);
        }
    }

    #[test]
    fn entropy_is_even(m in -1.0..1.0f64) {
        prop_assert_eq!(entropy(m).unwrap(), entropy(-m).unwrap());
    }

    #[test]
    fn landscape_flip_covariance(k in -5.0..5.0f64, j in -3.0..3.0f64, m in -0.999..0.999f64) {
        let a = landscape_at(m, p(k, j)).unwrap();
        let b = landscape_at(-m, p(-k, j)).unwrap();
        prop_assert_eq!(a.phi, b.phi);
        prop_assert_eq!(a.d1, -b.d1);
        prop_assert_eq!(a.d2, b.d2);
    }

    #[test]
    fn sensitivities_match_finite_differences(k in 0.2..3.0f64, j in 1.05..2.0f64) {
        let m = |kk: f64, jj: f64| *solve_consistency(p(kk, jj)).unwrap().last().unwrap();
        let root = m(k, j);
        let s = sensitivity(p(k, j), root).unwrap();
        let h = 1e-6;
        let dj = (m(k, j + h) - m(k, j - h)) / (2.0 * h);
        let dk = (m(k + h, j) - m(k - h, j)) / (2.0 * h);
        prop_assert!((s.dm_dj - dj).abs() <= 1e-5 * s.dm_dj.abs());
        prop_assert!((s.dm_dk - dk).abs() <= 1e-5 * s.dm_dk.abs());
        let f = |kk: f64, jj: f64| phi(m(kk, jj), p(kk, jj)).unwrap();
        let fj = (f(k, j + h) - f(k, j - h)) / (2.0 * h);
        prop_assert!((s.dphi_dj - fj).abs() <= 1e-6 * s.dphi_dj.max(1e-3));
    }
}
