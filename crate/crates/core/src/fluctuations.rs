//! Exact rescaled magnetization laws against their `N -> inf` limits:
//! Gaussian at a unique maximizer, a two-component Gaussian mixture on the
//! coexistence curve, and the quartic law `C exp(-x^4/12)` at `(0, 1)`.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::finite_volume::{
    build_spectrum, conditional_law, magnetization_law, ExactSpectrum, Interval, MagnetizationLaw,
};
use crate::landscape::{landscape_at, CouplingPair};
use crate::numeric::integrate;
use crate::phase_diagram::{m_star, GlobalMaximizers};
use crate::stationary_points::{classify, StationaryClassification};

/// How `m_N` is rescaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    /// `sqrt(N) (m_N - center)`.
    SqrtNCentered,
    /// `N^{1/4} m_N`.
    QuarterN,
}

impl Scaling {
    pub fn as_str(self) -> &'static str {
        match self {
            Scaling::SqrtNCentered => "sqrtN-centered",
            Scaling::QuarterN => "quarterN",
        }
    }

    fn factor(self, n: usize) -> f64 {
        match self {
            Scaling::SqrtNCentered => (n as f64).sqrt(),
            Scaling::QuarterN => (n as f64).powf(0.25),
        }
    }
}

/// The limiting law a summary is compared with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    /// Centered normal.
    Gaussian { variance: f64 },
    /// Density proportional to `exp(-x^4/12)`.
    Quartic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationSummary {
    pub n: usize,
    pub scaling: Scaling,
    pub center: f64,
    pub mean: f64,
    pub variance: f64,
    /// `E[(X - mean)^4] / variance^2`.
    pub kurtosis: f64,
    pub second_moment: f64,
    pub fourth_moment: f64,
    pub ks_distance: f64,
    pub reference: Reference,
}

/// A cdf tabulated by quadrature of an unnormalized density on `[a, b]`,
/// interpolated by cubic Hermite segments. Mass outside `[a, b]` is taken
/// to be zero.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    a: f64,
    h: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
    normalizer: f64,
}

const CDF_PANELS: usize = 8192;
const CDF_TOL: f64 = 1e-10;

impl TabulatedCdf {
    pub fn from_density<F: Fn(f64) -> f64>(density: F, a: f64, b: f64) -> Self {
        let h = (b - a) / CDF_PANELS as f64;
        let node = |i: usize| a + h * i as f64;
        let panel_tol = CDF_TOL / CDF_PANELS as f64;
        let mut values = Vec::with_capacity(CDF_PANELS + 1);
        let mut acc = 0.0;
        values.push(0.0);
        for i in 0..CDF_PANELS {
            acc += integrate(&density, node(i), node(i + 1), panel_tol);
            values.push(acc);
        }
        let normalizer = acc;
        for v in &mut values {
            *v /= normalizer;
        }
        let slopes = (0..=CDF_PANELS)
            .map(|i| density(node(i)) / normalizer)
            .collect();
        TabulatedCdf {
            a,
            h,
            values,
            slopes,
            normalizer,
        }
    }

    /// The integral of the density over `[a, b]`.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let s = (x - self.a) / self.h;
        if s <= 0.0 {
            return 0.0;
        }
        if s >= CDF_PANELS as f64 {
            return 1.0;
        }
        let i = (s.floor() as usize).min(CDF_PANELS - 1);
        let u = s - i as f64;
        let (u2, u3) = (u * u, u * u * u);
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        let v = h00 * self.values[i]
            + h10 * self.h * self.slopes[i]
            + h01 * self.values[i + 1]
            + h11 * self.h * self.slopes[i + 1];
        v.clamp(0.0, 1.0)
    }
}

/// Cdf of the standard normal, tabulated on `[-12, 12]`.
fn standard_normal() -> &'static TabulatedCdf {
    static CDF: OnceLock<TabulatedCdf> = OnceLock::new();
    CDF.get_or_init(|| TabulatedCdf::from_density(|x| (-0.5 * x * x).exp(), -12.0, 12.0))
}

/// Cdf of `C exp(-x^4/12)`, tabulated on `[-8, 8]`.
pub fn quartic_cdf() -> &'static TabulatedCdf {
    static CDF: OnceLock<TabulatedCdf> = OnceLock::new();
    CDF.get_or_init(|| TabulatedCdf::from_density(|x| (-x.powi(4) / 12.0).exp(), -8.0, 8.0))
}

impl Reference {
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Reference::Gaussian { variance } => standard_normal().cdf(x / variance.sqrt()),
            Reference::Quartic => quartic_cdf().cdf(x),
        }
    }
}

/// Kolmogorov distance between the atoms `(x_i, p_i)`, ascending in `x`,
/// and a continuous cdf, taken over both one-sided limits at every atom.
pub fn ks_distance<F: Fn(f64) -> f64>(atoms: &[f64], prob: &[f64], cdf: F) -> f64 {
    let mut below = 0.0;
    let mut worst: f64 = 0.0;
    for (&x, &p) in atoms.iter().zip(prob) {
        let f = cdf(x);
        let above = below + p;
        worst = worst.max((below - f).abs()).max((above - f).abs());
        below = above;
    }
    worst.min(1.0)
}

/// Exact moments of `scaling(m_N - center)` and its distance to `reference`.
pub fn summarize(
    law: &MagnetizationLaw,
    scaling: Scaling,
    center: f64,
    reference: Reference,
) -> FluctuationSummary {
    let s = scaling.factor(law.n);
    let mean = law.rescaled_moment(center, s, 1);
    let second = law.rescaled_moment(center, s, 2);
    let fourth = law.rescaled_moment(center, s, 4);
    let shift = center + mean / s;
    let variance = law.rescaled_moment(shift, s, 2);
    let central4 = law.rescaled_moment(shift, s, 4);
    let atoms = law.rescaled_atoms(center, s);
    FluctuationSummary {
        n: law.n,
        scaling,
        center,
        mean,
        variance,
        kurtosis: central4 / (variance * variance),
        second_moment: second,
        fourth_moment: fourth,
        ks_distance: ks_distance(&atoms, &law.prob, |x| reference.cdf(x)),
        reference,
    }
}

fn unique_nondegenerate(params: CouplingPair, maxima: &GlobalMaximizers) -> Result<(f64, f64)> {
    let reason = if maxima.symmetric_pair {
        "two symmetric maximizers (K = 0, J > 1)"
    } else if maxima.on_coexistence {
        "on the coexistence curve"
    } else if maxima.is_degenerate() {
        "degenerate maximizer (critical point)"
    } else {
        let p = maxima.points[0];
        return Ok((p.m, landscape_at(p.m, params)?.d2));
    };
    Err(Error::regime(params.k, params.j, reason))
}

/// Fluctuations of `sqrt(N)(m_N - m*)` against `N(0, -1/phi''(m*))`.
pub fn clt_summary(params: CouplingPair, n: usize) -> Result<FluctuationSummary> {
    let maxima = m_star(params)?;
    let (m, d2) = unique_nondegenerate(params, &maxima)?;
    let law = magnetization_law(&build_spectrum(n, params, 0.0)?);
    Ok(summarize(
        &law,
        Scaling::SqrtNCentered,
        m,
        Reference::Gaussian {
            variance: -1.0 / d2,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureWeights {
    /// Weight of the unpolarized phase `m0 = 0`.
    pub rho0: f64,
    /// Weight of the polarized phase.
    pub rho1: f64,
}

fn coexisting(params: CouplingPair) -> Result<GlobalMaximizers> {
    let maxima = m_star(params)?;
    if maxima.on_coexistence {
        Ok(maxima)
    } else {
        Err(Error::regime(
            params.k,
            params.j,
            "not on the coexistence curve",
        ))
    }
}

/// `rho_i proportional to [(m_i^2 - 1) phi''(m_i)]^{-1/2}` for the two
/// maximizers on the coexistence curve.
pub fn theoretical_weights(params: CouplingPair) -> Result<MixtureWeights> {
    let maxima = coexisting(params)?;
    let mut w0 = 0.0;
    let mut w1 = 0.0;
    for p in &maxima.points {
        let w = ((p.m * p.m - 1.0) * p.d2).powf(-0.5);
        if p.m == 0.0 {
            w0 = w;
        } else {
            w1 = w;
        }
    }
    let rho0 = w0 / (w0 + w1);
    Ok(MixtureWeights {
        rho0,
        rho1: 1.0 - rho0,
    })
}

/// `A_0`, `A_1`, `m_1` (all in the input orientation): the support is cut at
/// the local minimum `m3` between the two maxima.
pub fn coexistence_split(params: CouplingPair) -> Result<(Interval, Interval, f64)> {
    coexisting(params)?;
    let c = classify(params)?;
    let (m3, m1) = match c.kind {
        StationaryClassification::TwoLocalMaxima { m3, m1 } => (m3, m1),
        _ => {
            return Err(Error::regime(
                params.k,
                params.j,
                "no interior local minimum",
            ))
        }
    };
    if c.flipped {
        Ok((Interval::new(-m3, 1.0)?, Interval::new(-1.0, -m3)?, -m1))
    } else {
        Ok((Interval::new(-1.0, m3)?, Interval::new(m3, 1.0)?, m1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalSummary {
    pub branch: usize,
    /// `mu_N(m_N in A_i)`.
    pub mass: f64,
    pub summary: FluctuationSummary,
}

/// Fluctuations of `sqrt(N)(m_N - m_i)` conditioned on `m_N in A_i`.
pub fn conditional_clt(
    params: CouplingPair,
    branch: usize,
    n: usize,
) -> Result<ConditionalSummary> {
    let spectrum = build_spectrum(n, params, 0.0)?;
    conditional_clt_on(&spectrum, branch)
}

/// [`conditional_clt`] over an existing spectrum.
pub fn conditional_clt_on(spectrum: &ExactSpectrum, branch: usize) -> Result<ConditionalSummary> {
    let params = spectrum.params();
    let (a0, a1, m1) = coexistence_split(params)?;
    let (interval, m) = match branch {
        0 => (a0, 0.0),
        1 => (a1, m1),
        _ => return Err(Error::domain("branch", branch as f64, "{0, 1}")),
    };
    let d2 = landscape_at(m, params)?.d2;
    let (law, mass) = conditional_law(spectrum, interval)?;
    Ok(ConditionalSummary {
        branch,
        mass,
        summary: summarize(
            &law,
            Scaling::SqrtNCentered,
            m,
            Reference::Gaussian {
                variance: -1.0 / d2,
            },
        ),
    })
}

/// Fluctuations of `N^{1/4} m_N` at `(K, J) = (0, 1)`.
pub fn critical_summary(n: usize) -> Result<FluctuationSummary> {
    let law = magnetization_law(&build_spectrum(n, CouplingPair { k: 0.0, j: 1.0 }, 0.0)?);
    Ok(summarize(&law, Scaling::QuarterN, 0.0, Reference::Quartic))
}
