use cubicmf::exponents::{
    curie_weiss_exponent, default_k_grid, fit_line, log_grid, m_star_along_line, FitKind,
};

#[test]
fn positive_alpha_is_polarized_everywhere() {
    let m = m_star_along_line(0.5, &default_k_grid()).unwrap();
    assert!(m.iter().all(|&v| v > 0.0));
}

#[test]
fn alpha_zero_ratio_tends_to_three() {
    let ks = log_grid(1e-4, 1e-3).unwrap();
    let m = m_star_along_line(0.0, &ks).unwrap();
    let ratios: Vec<f64> = ks.iter().zip(&m).map(|(k, m)| m / k).collect();
    // K decreases along the grid, so the ratio should approach 3 monotonically
    assert!(
        ratios
            .windows(2)
            .all(|w| (w[1] - 3.0).abs() < (w[0] - 3.0).abs()),
        "{ratios:?}"
    );
    assert!((ratios.last().unwrap() - 3.0).abs() < 1e-3);
}

#[test]
fn negative_alpha_vanishes_below_a_threshold() {
    let m = m_star_along_line(-1.0, &log_grid(1e-5, 1e-3).unwrap()).unwrap();
    assert!(m.iter().all(|&v| v == 0.0));
    // far from the critical point the polarized phase returns
    let fit = fit_line(-0.5, &[5.0, 1e-2, 1e-3, 1e-4]).unwrap();
    match fit.kind {
        FitKind::ZeroPhase { largest_zero_k } => assert_eq!(largest_zero_k, 1e-2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn curie_weiss_ratio_tends_to_one() {
    let js: Vec<f64> = log_grid(1e-6, 1e-2)
        .unwrap()
        .iter()
        .map(|x| 1.0 + x)
        .collect();
    let fit = curie_weiss_exponent(&js).unwrap();
    let ratios: Vec<f64> = fit
        .x_values
        .iter()
        .zip(&fit.m_values)
        .map(|(&x, &m)| {
            let j = 1.0 + x;
            m / (3.0 * x / j.powi(3)).sqrt()
        })
        .collect();
    assert!((ratios.last().unwrap() - 1.0).abs() < 1e-5, "{ratios:?}");
    assert!(fit.r_squared > 0.999);
}

#[test]
fn fits_are_sane() {
    for alpha in [0.0, 0.5, 1.0, 2.0] {
        let f = fit_line(alpha, &default_k_grid()).unwrap();
        assert!(f.r_squared > 0.999, "alpha = {alpha}");
        assert!(f.x_values.windows(2).all(|w| w[0] > w[1]));
    }
}
