//! The variational pressure `phi(m) = u(m) - I(m)` and its derivatives.
//!
//! `u(m) = K m^3 / 3 + J m^2 / 2` is the energy per spin and `I(m)` the
//! binary entropy term, `I(0) = -ln 2`, `I(+-1) = 0`. The limiting pressure
//! is `sup phi`, and its stationary points solve `m = tanh(K m^2 + J m)`.

use crate::error::{Error, Result};
use crate::numeric::golden_section_min;
use crate::special::atanh_over_m_minus_one;

/// Half-width of the excluded neighbourhood of `m = +-1`, where `atanh`
/// diverges. Maximizers of `phi` are always interior.
pub const DOMAIN_EPS: f64 = 1e-12;

/// Model parameters: `k` couples triples of spins, `j` pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingPair {
    pub k: f64,
    pub j: f64,
}

impl CouplingPair {
    pub fn new(k: f64, j: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::domain("K", k, "the finite reals"));
        }
        if !j.is_finite() {
            return Err(Error::domain("J", j, "the finite reals"));
        }
        Ok(CouplingPair { k, j })
    }

    /// Maps `K < 0` onto `K > 0` with the spin flip `(K, m) -> (-K, -m)`.
    /// The flag is `true` when the flip was applied; magnetizations computed
    /// for the canonical pair must then be negated.
    pub fn canonical(self) -> (CouplingPair, bool) {
        if self.k < 0.0 {
            (
                CouplingPair {
                    k: -self.k,
                    j: self.j,
                },
                true,
            )
        } else {
            (self, false)
        }
    }
}

/// `phi` and its first four derivatives at `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandscapeReport {
    pub m: f64,
    pub phi: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
}

fn half_xlogx(a: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * a.ln()
    }
}

fn check_closed(m: f64) -> Result<()> {
    if m.abs() <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain("m", m, "[-1, 1]"))
    }
}

fn check_interior(m: f64) -> Result<()> {
    if m.abs() <= 1.0 - DOMAIN_EPS {
        Ok(())
    } else {
        Err(Error::domain("m", m, "[-1 + 1e-12, 1 - 1e-12]"))
    }
}

/// Binary entropy term `I(m)`, with `0 log 0 = 0` at the endpoints.
pub fn entropy(m: f64) -> Result<f64> {
    check_closed(m)?;
    Ok(half_xlogx(0.5 * (1.0 - m)) + half_xlogx(0.5 * (1.0 + m)))
}

/// `I(m) + ln 2`, computed without cancellation for small `m`.
pub fn entropy_excess(m: f64) -> Result<f64> {
    check_closed(m)?;
    let m2 = m * m;
    if m2 < 0.015_625 {
        // sum_{j>=1} m^{2j} / (2j (2j - 1))
        let mut term = 1.0;
        let mut acc = 0.0;
        for j in 1..=12 {
            term *= m2;
            acc += term / ((2 * j) * (2 * j - 1)) as f64;
        }
        return Ok(acc);
    }
    let side = |x: f64| {
        if x == -1.0 {
            0.0
        } else {
            (1.0 + x) * x.ln_1p()
        }
    };
    Ok(0.5 * (side(m) + side(-m)))
}

/// Energy per spin `K m^3 / 3 + J m^2 / 2`.
pub fn energy(m: f64, params: CouplingPair) -> Result<f64> {
    check_closed(m)?;
    Ok(params.k / 3.0 * m * m * m + params.j / 2.0 * m * m)
}

/// `phi(m) = energy(m) - entropy(m)` on the closed interval.
pub fn phi(m: f64, params: CouplingPair) -> Result<f64> {
    Ok(energy(m, params)? - entropy(m)?)
}

/// `phi` and derivatives to fourth order; `|m| <= 1 - DOMAIN_EPS`.
pub fn landscape_at(m: f64, params: CouplingPair) -> Result<LandscapeReport> {
    check_interior(m)?;
    let CouplingPair { k, j } = params;
    let one_minus_m2 = (1.0 - m) * (1.0 + m);
    Ok(LandscapeReport {
        m,
        phi: phi(m, params)?,
        // odd by construction so that the spin flip is exact
        d1: k * m * m + j * m - m.abs().atanh().copysign(m),
        d2: 2.0 * k * m + j - 1.0 / one_minus_m2,
        d3: 2.0 * k - 2.0 * m / (one_minus_m2 * one_minus_m2),
        d4: -2.0 * (3.0 * m * m + 1.0) / (one_minus_m2 * one_minus_m2 * one_minus_m2),
    })
}

/// `g(m, K) = atanh(m) - K m^2` on `0 < m < 1`. Positive stationary points
/// are the crossings of `g` with the line `J m`.
pub fn g(m: f64, k: f64) -> Result<f64> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::domain("m", m, "(0, 1)"));
    }
    Ok(m.atanh() - k * m * m)
}

/// `g(m, K)/m - J`, continued to `1 - J` at `m = 0`. Strictly convex in `m`
/// on `[0, 1)`, so it has at most two zeros there.
pub(crate) fn slope_gap(m: f64, k: f64, j: f64) -> f64 {
    atanh_over_m_minus_one(m) - k * m + (1.0 - j)
}

/// The spinodal threshold and where it is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinodal {
    /// `Psi(K) = min_{0 < m <= 1} g(m, K)/m`.
    pub value: f64,
    /// The minimizing `m`; at `J = Psi(K)` this is the tangency point.
    pub argmin: f64,
}

const PSI_GRID: usize = 4096;
const PSI_GRID_LO: f64 = 1e-8;
const PSI_TOL: f64 = 1e-13;

/// `Psi(K)`: the smallest `J` for which `m = tanh(K m^2 + J m)` has a
/// positive solution. Requires `K > 0`.
pub fn psi(k: f64) -> Result<Spinodal> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::domain("K", k, "(0, inf)"));
    }
    let ratio = |m: f64| slope_gap(m, k, 0.0);
    let lo = PSI_GRID_LO.ln();
    let hi = (1.0 - PSI_GRID_LO).ln();
    let node = |i: usize| (lo + (hi - lo) * i as f64 / (PSI_GRID - 1) as f64).exp();
    let best = (0..PSI_GRID)
        .map(|i| (i, ratio(node(i))))
        .fold(
            (0, f64::INFINITY),
            |acc, cur| if cur.1 < acc.1 { cur } else { acc },
        )
        .0;
    let a = node(best.saturating_sub(1));
    let b = node((best + 1).min(PSI_GRID - 1));
    let (argmin, value) = golden_section_min(ratio, a, b, PSI_TOL);
    Ok(Spinodal { value, argmin })
}
