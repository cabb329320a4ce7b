//! Exact finite-`N` enumeration over the magnetization spectrum.
//!
//! The Gibbs law of `m_N` only depends on `N` through the `N + 1` values
//! `m_k = -1 + 2k/N` and their multiplicities `C(N, k)`, so everything here
//! is a reduction over one array. Weights are kept in the log domain, and
//! every reduction is index-folded (see [`crate::numeric::folded_sum_by`])
//! so that the spin flip `k <-> N - k` is exact in floating point.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::landscape::{entropy, entropy_excess, landscape_at, CouplingPair};
use crate::numeric::{folded_sum_by, log_sum_exp_by};
use crate::phase_diagram::GlobalMaximizers;
use crate::special::{log_binomial, log_binomial_entropy_gap};
use crate::stationary_points::DEGENERACY_TOL;

/// Largest supported system size.
pub const MAX_N: usize = 100_000_000;

/// Relative slack when snapping an interval endpoint onto a support point.
const SNAP: f64 = 1e-9;

/// `m_k = (2k - N)/N`, formed from integers so that `m_{N-k} = -m_k`
/// holds exactly.
pub fn support_point(n: usize, k: usize) -> f64 {
    (2 * k as i64 - n as i64) as f64 / n as f64
}

/// Log multiplicities and log Gibbs weights over the magnetization support.
///
/// Log weights are stored relative to the common offset `N ln 2`; the
/// remainder `log C(N, k) - N ln 2` is formed from the entropy excess
/// `I(m) + ln 2` without cancellation, which keeps it accurate to rounding
/// in absolute terms even when `N ln 2` is large.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSpectrum {
    n: usize,
    params: CouplingPair,
    tilt: f64,
    support: Vec<f64>,
    log_multiplicity: Vec<f64>,
    log_weight: Vec<f64>,
    log_weight_offset: f64,
}

fn energy_exponent(n: usize, params: CouplingPair, tilt: f64, m: f64) -> f64 {
    let nf = n as f64;
    let f = params.k / 3.0 * (m * m * m) + params.j / 2.0 * (m * m);
    nf * f + tilt * nf.sqrt() * m
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        Err(Error::Resource { n, max: MAX_N })
    } else {
        Ok(())
    }
}

/// Enumerates the spectrum of `N` spins with weights
/// `C(N, k) exp(N [K m^3/3 + J m^2/2] + t sqrt(N) m)`.
pub fn build_spectrum(n: usize, params: CouplingPair, tilt: f64) -> Result<ExactSpectrum> {
    check_size(n)?;
    if !tilt.is_finite() {
        return Err(Error::domain("t", tilt, "the finite reals"));
    }
    let support: Vec<f64> = (0..=n)
        .into_par_iter()
        .map(|k| support_point(n, k))
        .collect();
    let log_multiplicity: Vec<f64> = (0..=n)
        .into_par_iter()
        .map(|k| log_binomial(n as u64, k as u64))
        .collect();
    let nf = n as f64;
    let log_weight: Vec<f64> = (0..=n)
        .into_par_iter()
        .map(|k| {
            let m = support[k];
            let excess = entropy_excess(m).expect("support lies in [-1, 1]");
            log_binomial_entropy_gap(n as u64, k as u64) - nf * excess
                + energy_exponent(n, params, tilt, m)
        })
        .collect();
    Ok(ExactSpectrum {
        n,
        params,
        tilt,
        support,
        log_multiplicity,
        log_weight,
        log_weight_offset: nf * std::f64::consts::LN_2,
    })
}

impl ExactSpectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> CouplingPair {
        self.params
    }

    pub fn tilt(&self) -> f64 {
        self.tilt
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn log_multiplicity(&self) -> &[f64] {
        &self.log_multiplicity
    }

    /// Log weights minus [`Self::log_weight_offset`].
    pub fn log_weight(&self) -> &[f64] {
        &self.log_weight
    }

    /// `N ln 2`.
    pub fn log_weight_offset(&self) -> f64 {
        self.log_weight_offset
    }

    /// Log-sum-exp of the reduced weights over `range`.
    fn range_log_sum(&self, range: std::ops::Range<usize>) -> f64 {
        let lw = &self.log_weight[range];
        log_sum_exp_by(lw.len(), |i| lw[i])
    }

    /// Support indices `k` with `m_k` in the interval, as a half-open range.
    pub fn index_range(&self, interval: Interval) -> Result<std::ops::Range<usize>> {
        interval.index_range(self.n)
    }
}

/// `log Z_N`.
pub fn log_partition(spectrum: &ExactSpectrum) -> f64 {
    spectrum.log_weight_offset + spectrum.range_log_sum(0..spectrum.support.len())
}

/// `p_N = log Z_N / N`.
pub fn pressure(spectrum: &ExactSpectrum) -> f64 {
    log_partition(spectrum) / spectrum.n as f64
}

/// A magnetization interval `[lo, hi)`, closed at `hi` when `hi >= 1`.
///
/// Endpoints are matched to the support with a small snap, so adjacent
/// intervals sharing an endpoint never both claim the same atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::EmptyRestriction { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// `[-1, 1]`.
    pub fn full() -> Self {
        Interval { lo: -1.0, hi: 1.0 }
    }

    fn first_index_at_or_above(n: usize, x: f64) -> usize {
        if x <= -1.0 {
            return 0;
        }
        if x > 1.0 {
            return n + 1;
        }
        // position of x on the index axis
        let pos = (x + 1.0) * n as f64 / 2.0;
        let nearest = pos.round();
        let pos = if (pos - nearest).abs() <= SNAP * nearest.max(1.0) {
            nearest
        } else {
            pos.ceil()
        };
        (pos as usize).min(n + 1)
    }

    pub fn index_range(self, n: usize) -> Result<std::ops::Range<usize>> {
        let a = Self::first_index_at_or_above(n, self.lo);
        let b = if self.hi >= 1.0 {
            n + 1
        } else {
            Self::first_index_at_or_above(n, self.hi)
        };
        if a >= b {
            return Err(Error::EmptyRestriction {
                lo: self.lo,
                hi: self.hi,
            });
        }
        Ok(a..b)
    }
}

/// `log` of the partition function restricted to `m_N` in `interval`.
pub fn restricted_log_partition(spectrum: &ExactSpectrum, interval: Interval) -> Result<f64> {
    Ok(spectrum.log_weight_offset + spectrum.range_log_sum(spectrum.index_range(interval)?))
}

/// The Gibbs law of `m_N`, or its restriction to a sub-range of the support.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnetizationLaw {
    pub n: usize,
    pub support: Vec<f64>,
    pub prob: Vec<f64>,
    pub log_prob: Vec<f64>,
}

/// The normalized law of `m_N` under the spectrum's weights.
pub fn magnetization_law(spectrum: &ExactSpectrum) -> MagnetizationLaw {
    law_on(spectrum, 0..spectrum.support.len())
}

fn law_on(spectrum: &ExactSpectrum, range: std::ops::Range<usize>) -> MagnetizationLaw {
    // normalize by the shifted sum rather than by exp(-log Z), whose
    // rounding grows with log Z
    let lw = &spectrum.log_weight[range.clone()];
    let max = max_of(lw);
    let shifted: Vec<f64> = lw.par_iter().map(|&w| w - max).collect();
    let total = folded_sum_by(shifted.len(), |i| shifted[i].exp());
    let log_total = total.ln();
    let prob = shifted.par_iter().map(|&w| w.exp() / total).collect();
    let log_prob = shifted.par_iter().map(|&w| w - log_total).collect();
    MagnetizationLaw {
        n: spectrum.n,
        support: spectrum.support[range].to_vec(),
        prob,
        log_prob,
    }
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// The law of `m_N` conditioned on `m_N` in `interval`, with the
/// unconditional mass of the interval.
pub fn conditional_law(
    spectrum: &ExactSpectrum,
    interval: Interval,
) -> Result<(MagnetizationLaw, f64)> {
    let range = spectrum.index_range(interval)?;
    let lw = &spectrum.log_weight;
    let max = max_of(lw);
    let part = log_sum_exp_by(range.len(), |i| lw[range.start + i] - max);
    let whole = log_sum_exp_by(lw.len(), |i| lw[i] - max);
    Ok((law_on(spectrum, range), (part - whole).exp()))
}

impl MagnetizationLaw {
    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// `E[f(m_N)]`.
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        folded_sum_by(self.len(), |i| self.prob[i] * f(self.support[i]))
    }

    pub fn total_mass(&self) -> f64 {
        folded_sum_by(self.len(), |i| self.prob[i])
    }

    pub fn mean(&self) -> f64 {
        self.expect(|m| m)
    }

    /// `E[(scale (m_N - center))^p]`.
    pub fn rescaled_moment(&self, center: f64, scale: f64, p: i32) -> f64 {
        self.expect(|m| (scale * (m - center)).powi(p))
    }

    /// Atoms of `scale (m_N - center)`, ascending, with their masses.
    pub fn rescaled_atoms(&self, center: f64, scale: f64) -> Vec<f64> {
        self.support.iter().map(|&m| scale * (m - center)).collect()
    }

    /// Mass of `m_N` in `interval`.
    pub fn mass_in(&self, interval: Interval) -> f64 {
        let (lo, hi) = (interval.lo, interval.hi);
        folded_sum_by(self.len(), |i| {
            let m = self.support[i];
            if m >= lo && (m < hi || hi >= 1.0) {
                self.prob[i]
            } else {
                0.0
            }
        })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 / 6.0 {
        Ok(())
    } else {
        Err(Error::domain("alpha", alpha, "(0, 1/6]"))
    }
}

fn is_outside(m: f64, center: f64, radius: f64) -> bool {
    (m - center).abs() >= radius
}

/// Exact mass of `|m_N - center| >= N^{-1/2 + alpha}`, `0 < alpha <= 1/6`.
pub fn concentration_probability(law: &MagnetizationLaw, center: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let radius = (law.n as f64).powf(alpha - 0.5);
    Ok(folded_sum_by(law.len(), |i| {
        if is_outside(law.support[i], center, radius) {
            law.prob[i]
        } else {
            0.0
        }
    }))
}

/// `log` of [`concentration_probability`], accurate when the mass
/// underflows. `-inf` when no atom lies outside the ball.
pub fn log_concentration_probability(
    law: &MagnetizationLaw,
    center: f64,
    alpha: f64,
) -> Result<f64> {
    check_alpha(alpha)?;
    let radius = (law.n as f64).powf(alpha - 0.5);
    Ok(log_sum_exp_by(law.len(), |i| {
        if is_outside(law.support[i], center, radius) {
            law.log_prob[i]
        } else {
            f64::NEG_INFINITY
        }
    }))
}

/// `log [ sum_i exp(N phi(m_i)) / sqrt((m_i^2 - 1) phi''(m_i)) ]` over the
/// global maximizers.
pub fn asymptotic_log_partition(
    params: CouplingPair,
    maximizers: &GlobalMaximizers,
    n: usize,
) -> Result<f64> {
    check_size(n)?;
    let mut terms = Vec::with_capacity(maximizers.points.len());
    for p in &maximizers.points {
        let r = landscape_at(p.m, params)?;
        if r.d2 >= -DEGENERACY_TOL {
            return Err(Error::Degenerate { m: p.m, d2: r.d2 });
        }
        let curvature = (p.m * p.m - 1.0) * r.d2;
        terms.push(n as f64 * r.phi - 0.5 * curvature.ln());
    }
    Ok(crate::numeric::log_sum_exp(&terms))
}

/// Outcome of checking `-log(L sqrt N) <= log C(N, k) + N I(x_k) <= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyBounds {
    pub n: usize,
    /// `max_k (log C(N, k) + N I(x_k))`; the upper bound holds when `<= 0`.
    pub max_violation: f64,
    /// Smallest `L` for which the lower bound holds at every support point.
    pub fitted_l: f64,
}

pub fn entropy_bounds_check(n: usize) -> Result<EntropyBounds> {
    check_size(n)?;
    let nn = n as u64;
    let (max_gap, min_gap) = (0..=nn)
        .into_par_iter()
        .map(|k| {
            let g = log_binomial_entropy_gap(nn, k);
            (g, g)
        })
        .reduce(
            || (f64::NEG_INFINITY, f64::INFINITY),
            |a, b| (a.0.max(b.0), a.1.min(b.1)),
        );
    Ok(EntropyBounds {
        n,
        max_violation: max_gap,
        fitted_l: (-min_gap - 0.5 * (n as f64).ln()).exp(),
    })
}

/// `log [ sqrt(2 / (pi N (1 - x^2))) exp(-N I(x)) ]`, the Stirling form of
/// `log C(N, N(1 + x)/2)`.
pub fn stirling_log_binomial(n: usize, x: f64) -> Result<f64> {
    check_size(n)?;
    if !(x.abs() < 1.0) {
        return Err(Error::domain("x", x, "(-1, 1)"));
    }
    let nf = n as f64;
    let one_minus_x2 = (1.0 - x) * (1.0 + x);
    Ok(0.5 * (2.0 / (std::f64::consts::PI * nf * one_minus_x2)).ln() - nf * entropy(x)?)
}

/// `E[exp(t sqrt(N) (m_N - center))]`, conditioned on `m_N` in
/// `restriction` when given.
pub fn mgf_rescaled(
    params: CouplingPair,
    n: usize,
    t: f64,
    center: f64,
    restriction: Option<Interval>,
) -> Result<f64> {
    let spectrum = build_spectrum(n, params, 0.0)?;
    mgf_rescaled_on(&spectrum, t, center, restriction)
}

/// [`mgf_rescaled`] over an existing untilted spectrum.
pub fn mgf_rescaled_on(
    spectrum: &ExactSpectrum,
    t: f64,
    center: f64,
    restriction: Option<Interval>,
) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::domain("t", t, "the finite reals"));
    }
    let range = spectrum.index_range(restriction.unwrap_or_else(Interval::full))?;
    let lw = &spectrum.log_weight[range.clone()];
    let m = &spectrum.support[range];
    // a common shift keeps both sums at moderate magnitude
    let max = max_of(lw);
    let rt_n = (spectrum.n as f64).sqrt();
    let s = t * rt_n;
    let tilted = log_sum_exp_by(lw.len(), |i| (lw[i] - max) + s * (m[i] - center));
    let plain = log_sum_exp_by(lw.len(), |i| lw[i] - max);
    Ok((tilted - plain).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn p(k: f64, j: f64) -> CouplingPair {
        CouplingPair::new(k, j).unwrap()
    }

    #[test]
    fn two_and_three_configurations() {
        let (k, j) = (0.7, -0.3);
        let z1 = log_partition(&build_spectrum(1, p(k, j), 0.0).unwrap());
        let expect1 = ((-k / 3.0 + j / 2.0).exp() + (k / 3.0 + j / 2.0).exp()).ln();
        assert!((z1 - expect1).abs() < 1e-14);
        let z2 = log_partition(&build_spectrum(2, p(k, j), 0.0).unwrap());
        let expect2 =
            ((2.0 * (k / 3.0 + j / 2.0)).exp() + 2.0 + (2.0 * (-k / 3.0 + j / 2.0)).exp()).ln();
        assert!((z2 - expect2).abs() < 1e-14);
    }

    #[test]
    fn free_spins() {
        for n in [1usize, 7, 1000] {
            let s = build_spectrum(n, p(0.0, 0.0), 0.0).unwrap();
            let z = log_partition(&s);
            assert!(
                (z - n as f64 * LN_2).abs() <= 1e-12 * n as f64 * LN_2,
                "n = {n}"
            );
        }
    }

    #[test]
    fn resource_limits() {
        assert!(matches!(
            build_spectrum(0, p(0.0, 0.0), 0.0),
            Err(Error::Resource { .. })
        ));
        assert!(matches!(
            build_spectrum(MAX_N + 1, p(0.0, 0.0), 0.0),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn support_is_antisymmetric() {
        let n = 999;
        for k in 0..=n {
            assert_eq!(support_point(n, k), -support_point(n, n - k));
        }
        assert_eq!(support_point(4, 2), 0.0);
    }

    #[test]
    fn interval_indices() {
        let n = 10;
        // support -1, -0.8, ..., 1
        assert_eq!(Interval::full().index_range(n).unwrap(), 0..11);
        assert_eq!(
            Interval::new(-0.8, 0.0).unwrap().index_range(n).unwrap(),
            1..5
        );
        assert_eq!(
            Interval::new(0.0, 1.0).unwrap().index_range(n).unwrap(),
            5..11
        );
        assert_eq!(
            Interval::new(-0.75, -0.55).unwrap().index_range(n).unwrap(),
            2..3
        );
        assert!(Interval::new(-0.75, -0.65).unwrap().index_range(n).is_err());
    }

    #[test]
    fn empty_restriction_is_an_error() {
        let s = build_spectrum(10, p(0.0, 0.0), 0.0).unwrap();
        let gap = Interval::new(-0.75, -0.65).unwrap();
        assert!(matches!(
            restricted_log_partition(&s, gap),
            Err(Error::EmptyRestriction { .. })
        ));
        assert!(Interval::new(0.5, 0.5).is_err());
    }

    #[test]
    fn mgf_at_zero_is_one() {
        assert_eq!(mgf_rescaled(p(1.0, 1.2), 100, 0.0, 0.3, None).unwrap(), 1.0);
    }

    #[test]
    fn alpha_window_is_checked() {
        let law = magnetization_law(&build_spectrum(10, p(0.0, 0.0), 0.0).unwrap());
        assert!(concentration_probability(&law, 0.0, 0.0).is_err());
        assert!(concentration_probability(&law, 0.0, 0.2).is_err());
        assert!(concentration_probability(&law, 0.0, 1.0 / 6.0).is_ok());
    }

    #[test]
    fn stirling_domain() {
        assert!(stirling_log_binomial(10, 1.0).is_err());
        assert_eq!(
            stirling_log_binomial(100, 0.5).unwrap(),
            stirling_log_binomial(100, -0.5).unwrap()
        );
    }
}
