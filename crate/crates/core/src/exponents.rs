//! How the equilibrium magnetization vanishes near the critical point along
//! the lines `J(K) = 1 + alpha K`, and along the Curie-Weiss line `K = 0`.
//!
//! Expected behaviour as `K -> 0+`: `m* ~ sqrt(3 alpha K)` for `alpha > 0`,
//! `m* ~ 3K` for `alpha = 0`, and `m* = 0` identically for `alpha < 0`;
//! at `K = 0`, `m* ~ sqrt(3 (J - 1))` as `J -> 1+`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::landscape::CouplingPair;
use crate::phase_diagram::m_star;

/// Log-spaced samples per decade of `K`.
pub const POINTS_PER_DECADE: usize = 16;

/// At least this many points enter a fit.
pub const MIN_FIT_POINTS: usize = 4;

/// Fits are accepted once `r^2` exceeds this.
pub const R_SQUARED_TARGET: f64 = 0.999;

#[derive(Debug, Clone, PartialEq)]
pub enum FitKind {
    PowerLaw,
    /// `m* = 0` on the small-`K` end of the window; no fit is attempted.
    ZeroPhase {
        /// The largest sampled `K` below which every sample is zero.
        largest_zero_k: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    /// `None` for fits along the Curie-Weiss line.
    pub alpha: Option<f64>,
    /// Abscissae, strictly decreasing: `K`, or `J - 1` at `K = 0`.
    pub x_values: Vec<f64>,
    pub m_values: Vec<f64>,
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    pub kind: FitKind,
}

/// `POINTS_PER_DECADE` log-spaced points per decade over `[lo, hi]`, both
/// included, in decreasing order.
pub fn log_grid(lo: f64, hi: f64) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::domain("window", lo, "0 < lo < hi"));
    }
    let decades = (hi / lo).log10();
    let steps = ((decades * POINTS_PER_DECADE as f64).round() as usize).max(1);
    let (a, b) = (hi.ln(), lo.ln());
    Ok((0..=steps)
        .map(|i| match i {
            0 => hi,
            _ if i == steps => lo,
            _ => (a + (b - a) * i as f64 / steps as f64).exp(),
        })
        .collect())
}

/// The default window `[1e-4, 1e-2]`.
pub fn default_k_grid() -> Vec<f64> {
    log_grid(1e-4, 1e-2).expect("static window")
}

fn largest_magnetization(params: CouplingPair) -> Result<f64> {
    let g = m_star(params)?;
    Ok(g.points.iter().map(|p| p.m).fold(
        0.0,
        |best: f64, m| if m.abs() > best.abs() { m } else { best },
    ))
}

/// `m*(K, 1 + alpha K)` for each `K > 0`.
pub fn m_star_along_line(alpha: f64, k_values: &[f64]) -> Result<Vec<f64>> {
    if !alpha.is_finite() {
        return Err(Error::domain("alpha", alpha, "the finite reals"));
    }
    if let Some(&k) = k_values.iter().find(|&&k| !(k > 0.0 && k.is_finite())) {
        return Err(Error::domain("K", k, "(0, inf)"));
    }
    k_values
        .par_iter()
        .map(|&k| largest_magnetization(CouplingPair::new(k, 1.0 + alpha * k)?))
        .collect()
}

/// Ordinary least squares of `log m` on `log x`.
pub fn fit_power_law(x_values: &[f64], m_values: &[f64]) -> Result<ExponentFit> {
    if x_values.len() != m_values.len() {
        return Err(Error::Fit("abscissae and values differ in length".into()));
    }
    if x_values.len() < MIN_FIT_POINTS {
        return Err(Error::Fit(format!(
            "{} points, at least {MIN_FIT_POINTS} needed",
            x_values.len()
        )));
    }
    if let Some(&m) = m_values.iter().find(|&&m| !(m > 0.0)) {
        return Err(Error::Fit(format!("nonpositive magnetization {m}")));
    }
    if let Some(&x) = x_values.iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::Fit(format!("nonpositive abscissa {x}")));
    }
    let lx: Vec<f64> = x_values.iter().map(|x| x.ln()).collect();
    let lm: Vec<f64> = m_values.iter().map(|m| m.ln()).collect();
    let n = lx.len() as f64;
    let mean_x = lx.iter().sum::<f64>() / n;
    let mean_m = lm.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxm: f64 = lx
        .iter()
        .zip(&lm)
        .map(|(x, m)| (x - mean_x) * (m - mean_m))
        .sum();
    let smm: f64 = lm.iter().map(|m| (m - mean_m).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all abscissae coincide".into()));
    }
    let slope = sxm / sxx;
    let intercept = mean_m - slope * mean_x;
    let r_squared = if smm == 0.0 {
        1.0
    } else {
        (sxm * sxm / (sxx * smm)).clamp(0.0, 1.0)
    };
    Ok(ExponentFit {
        alpha: None,
        x_values: x_values.to_vec(),
        m_values: m_values.to_vec(),
        exponent: slope,
        prefactor: intercept.exp(),
        r_squared,
        kind: FitKind::PowerLaw,
    })
}

/// The power law of `m*` along `J = 1 + alpha K` over `k_values`.
///
/// Zeros on the small-`K` end are reported as [`FitKind::ZeroPhase`].
/// Otherwise the window loses its largest `K` until `r^2` exceeds
/// [`R_SQUARED_TARGET`] or only [`MIN_FIT_POINTS`] remain.
pub fn fit_line(alpha: f64, k_values: &[f64]) -> Result<ExponentFit> {
    let mut order: Vec<f64> = k_values.to_vec();
    order.sort_by(|a, b| b.total_cmp(a));
    order.dedup();
    let m = m_star_along_line(alpha, &order)?;
    if m.contains(&0.0) {
        // every sample from the first zero down must vanish too
        let first_zero = m.iter().position(|&v| v == 0.0).unwrap_or(m.len());
        if m[first_zero..].iter().any(|&v| v != 0.0) {
            return Err(Error::Fit(format!(
                "alpha = {alpha}: zero and nonzero magnetizations interleave"
            )));
        }
        return Ok(ExponentFit {
            alpha: Some(alpha),
            x_values: order.clone(),
            m_values: m,
            exponent: 0.0,
            prefactor: 0.0,
            r_squared: 1.0,
            kind: FitKind::ZeroPhase {
                largest_zero_k: order[first_zero],
            },
        });
    }
    let mut start = 0;
    loop {
        let mut fit = fit_power_law(&order[start..], &m[start..])?;
        if fit.r_squared > R_SQUARED_TARGET || order.len() - start <= MIN_FIT_POINTS {
            fit.alpha = Some(alpha);
            return Ok(fit);
        }
        start += 1;
    }
}

/// The power law of `m*(0, J)` in `J - 1`, for `J > 1`.
pub fn curie_weiss_exponent(j_values: &[f64]) -> Result<ExponentFit> {
    if let Some(&j) = j_values.iter().find(|&&j| !(j > 1.0 && j.is_finite())) {
        return Err(Error::domain("J", j, "(1, inf)"));
    }
    let mut js = j_values.to_vec();
    js.sort_by(|a, b| b.total_cmp(a));
    js.dedup();
    let m: Vec<f64> = js
        .par_iter()
        .map(|&j| largest_magnetization(CouplingPair::new(0.0, j)?).map(f64::abs))
        .collect::<Result<_>>()?;
    let x: Vec<f64> = js.iter().map(|j| j - 1.0).collect();
    fit_power_law(&x, &m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_is_recovered() {
        let x: Vec<f64> = (0..10).map(|i| 10f64.powf(-2.0 - 0.2 * i as f64)).collect();
        let m: Vec<f64> = x.iter().map(|x| 2.0 * x.sqrt()).collect();
        let f = fit_power_law(&x, &m).unwrap();
        assert!((f.exponent - 0.5).abs() < 1e-12);
        assert!((f.prefactor - 2.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_input_errors() {
        assert!(fit_power_law(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(fit_power_law(&[1.0, 2.0, 3.0, 4.0], &[1.0, 0.0, 3.0, 4.0]).is_err());
        assert!(curie_weiss_exponent(&[1.0, 1.1]).is_err());
        assert!(m_star_along_line(1.0, &[0.0]).is_err());
    }

    #[test]
    fn default_grid_shape() {
        let g = default_k_grid();
        assert_eq!(g.len(), 33);
        assert_eq!(g[0], 1e-2);
        assert_eq!(*g.last().unwrap(), 1e-4);
        assert!(g.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn negative_alpha_is_a_zero_phase() {
        let f = fit_line(-1.0, &default_k_grid()).unwrap();
        assert!(matches!(f.kind, FitKind::ZeroPhase { largest_zero_k } if largest_zero_k == 1e-2));
        assert!(f.m_values.iter().all(|&m| m == 0.0));
    }
}
