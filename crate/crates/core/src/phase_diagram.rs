//! Coexistence curve, global maximizer selection and phase-diagram sweeps.
//!
//! For `K > 0` the unpolarized stationary point `m0 = 0` and the polarized
//! local maximum `m1` exchange stability across `J = gamma(K)`, the unique
//! zero of `Delta(K, J) = phi(m1) - phi(0)` in `(Psi(K), 1)`. `Delta` is
//! strictly increasing in `J` with `dDelta/dJ = m1^2/2`, so bisection is
//! enough, and along the curve `gamma'(K) = -2 m1 / 3`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::landscape::{entropy_excess, landscape_at, psi, CouplingPair, Spinodal, DOMAIN_EPS};
use crate::numeric::bisect;
use crate::stationary_points::{largest_root, positive_roots, TANGENCY_TOL};

/// `|J - gamma(K)|` below which both maxima are reported.
pub const COEXISTENCE_BAND: f64 = 1e-10;

const GAMMA_BRACKET_PAD: f64 = 1e-12;
const UPPER: f64 = 1.0 - DOMAIN_EPS;

/// One global maximizer of `phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxPoint {
    pub m: f64,
    pub phi: f64,
    pub d2: f64,
}

impl MaxPoint {
    fn at(m: f64, params: CouplingPair) -> Result<Self> {
        let r = landscape_at(m, params)?;
        Ok(MaxPoint {
            m,
            phi: r.phi,
            d2: r.d2,
        })
    }
}

/// The set of global maximizers of `phi`, ascending in `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalMaximizers {
    pub points: Vec<MaxPoint>,
    /// `(K, J)` lies on the coexistence curve; `points` holds `0` and `m1`.
    pub on_coexistence: bool,
    /// `K = 0`, `J > 1`: `points` holds `-m2` and `m2`, neither preferred.
    pub symmetric_pair: bool,
}

impl GlobalMaximizers {
    /// The maximizer when it is unique.
    pub fn unique(&self) -> Option<MaxPoint> {
        match self.points.as_slice() {
            [only] => Some(*only),
            _ => None,
        }
    }

    /// Some maximizer has `phi'' >= -1e-10`; only the critical point
    /// `(K, J) = (0, 1)` reaches this.
    pub fn is_degenerate(&self) -> bool {
        self.points
            .iter()
            .any(|p| p.d2 >= -crate::stationary_points::DEGENERACY_TOL)
    }

    fn single(m: f64, params: CouplingPair) -> Result<Self> {
        Ok(GlobalMaximizers {
            points: vec![MaxPoint::at(m, params)?],
            on_coexistence: false,
            symmetric_pair: false,
        })
    }

    fn mirrored(mut self) -> Self {
        for p in &mut self.points {
            p.m = -p.m;
        }
        self.points.reverse();
        self
    }
}

/// A point of the coexistence curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoexistenceSample {
    pub k: f64,
    pub gamma_k: f64,
    /// The polarized maximizer at `(K, gamma(K))`.
    pub m1: f64,
    /// `gamma'(K) = -2 m1 / 3`.
    pub slope: f64,
    pub psi: Spinodal,
}

fn require_positive_k(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("K", k, "(0, inf)"))
    }
}

/// `Delta` with `Psi(K)` already known; `J` is trusted to be in range.
fn delta_with(k: f64, j: f64, sp: Spinodal) -> Result<f64> {
    let m1 = largest_root(k, j, sp)?;
    // phi(m1) - phi(0) = u(m1) - (I(m1) + ln 2)
    let gain = j / 2.0 * m1 * m1 + k / 3.0 * m1 * m1 * m1;
    Ok(gain - entropy_excess(m1)?)
}

/// `Delta(K, J) = phi(m1) - phi(0)` for `K > 0`, `Psi(K) <= J <= 1`,
/// continued to the endpoints.
pub fn delta(params: CouplingPair) -> Result<f64> {
    let CouplingPair { k, j } = params;
    require_positive_k(k)?;
    let sp = psi(k)?;
    if j < sp.value - TANGENCY_TOL || j > 1.0 {
        return Err(Error::regime(k, j, "Delta is defined for Psi(K) <= J <= 1"));
    }
    delta_with(k, j, sp)
}

fn gamma_with(k: f64, sp: Spinodal) -> Result<CoexistenceSample> {
    let lo = sp.value + GAMMA_BRACKET_PAD;
    let hi = 1.0 - GAMMA_BRACKET_PAD;
    // Delta(lo) < 0 < Delta(hi). Where m1 lies beyond the clip, the value
    // at the clip still bounds Delta from below and usually fixes the sign.
    let f = |j: f64| match delta_with(k, j, sp) {
        Ok(d) => d,
        Err(Error::SaturatedRoot { .. }) => {
            let q = CouplingPair { k, j };
            let bound =
                crate::landscape::phi(UPPER, q).unwrap_or(f64::NAN) - std::f64::consts::LN_2;
            if bound > 0.0 {
                bound
            } else {
                f64::NAN
            }
        }
        Err(_) => f64::NAN,
    };
    let (f_lo, f_hi) = (f(lo), f(hi));
    if !(f_lo < 0.0 && f_hi > 0.0) {
        // propagate the underlying failure if there is one
        delta_with(k, lo, sp)?;
        return Err(Error::regime(
            k,
            lo,
            "Delta does not change sign on (Psi(K), 1)",
        ));
    }
    let gamma_k = bisect(f, lo, hi, 0.0);
    let m1 = largest_root(k, gamma_k, sp)?;
    Ok(CoexistenceSample {
        k,
        gamma_k,
        m1,
        slope: -2.0 / 3.0 * m1,
        psi: sp,
    })
}

/// The coexistence curve at `K > 0`: the root of `Delta(K, .)` on
/// `(Psi(K), 1)`, bisected to floating-point resolution.
pub fn gamma(k: f64) -> Result<CoexistenceSample> {
    require_positive_k(k)?;
    gamma_with(k, psi(k)?)
}

/// `(gamma(K + h) - gamma(K - h)) / (2h)`, requires `K > h > 0`.
pub fn gamma_slope_fd(k: f64, h: f64) -> Result<f64> {
    if !(h > 0.0 && k > h) {
        return Err(Error::domain("h", h, "(0, K)"));
    }
    Ok((gamma(k + h)?.gamma_k - gamma(k - h)?.gamma_k) / (2.0 * h))
}

/// Phase boundaries of one `K >= 0` column of the diagram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundaries {
    /// `K = 0`: the Curie-Weiss line, critical at `J = 1`.
    CurieWeiss,
    Cubic(CoexistenceSample),
}

impl Boundaries {
    /// Boundaries for canonical `K >= 0`.
    pub fn at(k: f64) -> Result<Self> {
        if k == 0.0 {
            Ok(Boundaries::CurieWeiss)
        } else {
            Ok(Boundaries::Cubic(gamma(k)?))
        }
    }
}

fn m_star_canonical(q: CouplingPair, b: &Boundaries) -> Result<GlobalMaximizers> {
    let CouplingPair { k, j } = q;
    match b {
        Boundaries::CurieWeiss => match positive_roots(0.0, j, None)?.first() {
            None => GlobalMaximizers::single(0.0, q),
            Some(&m2) => Ok(GlobalMaximizers {
                points: vec![MaxPoint::at(-m2, q)?, MaxPoint::at(m2, q)?],
                on_coexistence: false,
                symmetric_pair: true,
            }),
        },
        Boundaries::Cubic(c) => {
            if j >= 1.0 {
                return GlobalMaximizers::single(largest_root(k, j, c.psi)?, q);
            }
            if (j - c.gamma_k).abs() < COEXISTENCE_BAND {
                let m1 = largest_root(k, j, c.psi)?;
                return Ok(GlobalMaximizers {
                    points: vec![MaxPoint::at(0.0, q)?, MaxPoint::at(m1, q)?],
                    on_coexistence: true,
                    symmetric_pair: false,
                });
            }
            if j < c.gamma_k {
                GlobalMaximizers::single(0.0, q)
            } else {
                GlobalMaximizers::single(largest_root(k, j, c.psi)?, q)
            }
        }
    }
}

/// Global maximizers of `phi`: `0` below `gamma(K)`, `m1` between
/// `gamma(K)` and `1`, `m2` from `J = 1` on, and both `0` and `m1` within
/// [`COEXISTENCE_BAND`] of the curve. `K < 0` is mirrored through the spin
/// flip; `K = 0` follows the Curie-Weiss rules.
pub fn m_star(params: CouplingPair) -> Result<GlobalMaximizers> {
    let (q, flipped) = params.canonical();
    let b = if q.k > 0.0 && q.j < 1.0 {
        let sp = psi(q.k)?;
        if q.j <= sp.value {
            // gamma(K) > Psi(K) >= J, no need to locate the curve
            let g = GlobalMaximizers::single(0.0, q)?;
            return Ok(if flipped { g.mirrored() } else { g });
        }
        Boundaries::Cubic(gamma_with(q.k, sp)?)
    } else if q.k > 0.0 {
        let sp = psi(q.k)?;
        let g = GlobalMaximizers::single(largest_root(q.k, q.j, sp)?, q)?;
        return Ok(if flipped { g.mirrored() } else { g });
    } else {
        Boundaries::CurieWeiss
    };
    let g = m_star_canonical(q, &b)?;
    Ok(if flipped { g.mirrored() } else { g })
}

/// Phase of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseLabel {
    Unpolarized,
    Polarized,
    Coexistence,
    CriticalPoint,
}

impl PhaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseLabel::Unpolarized => "unpolarized",
            PhaseLabel::Polarized => "polarized",
            PhaseLabel::Coexistence => "coexistence",
            PhaseLabel::CriticalPoint => "critical-point",
        }
    }
}

/// Which of the open regions bounded by `Psi(K)`, `gamma(K)` and `J = 1`
/// a cell lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `J < Psi(K)` (or `J < 1` at `K = 0`): `0` is the only stationary maximum.
    BelowSpinodal,
    /// `Psi(K) <= J < gamma(K)`: `0` is global, `m1` a local maximum.
    MetastablePolarized,
    /// `gamma(K) <= J < 1`: `m1` is global, `0` a local maximum.
    MetastableUnpolarized,
    /// `J >= 1`: no unpolarized maximum.
    PolarizedOnly,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::BelowSpinodal => "below-spinodal",
            Regime::MetastablePolarized => "metastable-polarized",
            Regime::MetastableUnpolarized => "metastable-unpolarized",
            Regime::PolarizedOnly => "polarized-only",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanCell {
    pub k: f64,
    pub j: f64,
    pub label: PhaseLabel,
    pub regime: Regime,
    /// The global maximizer. When two tie, the one of largest `|m|`, and `+m`
    /// over `-m`.
    pub m_star: f64,
}

/// Inclusive, evenly spaced grid with `n >= 1` nodes.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

fn classify_cell(k: f64, j: f64, b: &Boundaries, flipped: bool) -> Result<ScanCell> {
    let q = CouplingPair::new(k.abs(), j)?;
    let maxima = m_star_canonical(q, b)?;
    let regime = match b {
        Boundaries::CurieWeiss if j < 1.0 => Regime::BelowSpinodal,
        Boundaries::CurieWeiss => Regime::PolarizedOnly,
        Boundaries::Cubic(c) if j < c.psi.value => Regime::BelowSpinodal,
        Boundaries::Cubic(c) if j < c.gamma_k => Regime::MetastablePolarized,
        Boundaries::Cubic(_) if j < 1.0 => Regime::MetastableUnpolarized,
        Boundaries::Cubic(_) => Regime::PolarizedOnly,
    };
    let label = if maxima.is_degenerate() {
        PhaseLabel::CriticalPoint
    } else if maxima.on_coexistence {
        PhaseLabel::Coexistence
    } else if maxima.points.iter().all(|p| p.m == 0.0) {
        PhaseLabel::Unpolarized
    } else {
        PhaseLabel::Polarized
    };
    let m = maxima.points.iter().map(|p| p.m).fold(0.0, |best: f64, m| {
        if m.abs() > best.abs() || (m.abs() == best.abs() && m > best) {
            m
        } else {
            best
        }
    });
    Ok(ScanCell {
        k,
        j,
        label,
        regime,
        m_star: if flipped { -m } else { m },
    })
}

/// Labels every cell of the inclusive `nk x nj` grid, row-major in `K`.
///
/// Columns of constant `K` are solved in parallel; the output order is the
/// grid order regardless of scheduling.
pub fn scan(
    k_range: (f64, f64),
    j_range: (f64, f64),
    nk: usize,
    nj: usize,
) -> Result<Vec<ScanCell>> {
    if nk == 0 || nj == 0 {
        return Err(Error::domain("grid size", 0.0, "positive counts"));
    }
    let ks = linspace(k_range.0, k_range.1, nk);
    let js = linspace(j_range.0, j_range.1, nj);
    let rows: Vec<Result<Vec<ScanCell>>> = ks
        .par_iter()
        .map(|&k| {
            CouplingPair::new(k, 0.0)?;
            let b = Boundaries::at(k.abs())?;
            js.iter()
                .map(|&j| classify_cell(k, j, &b, k < 0.0))
                .collect()
        })
        .collect();
    let mut cells = Vec::with_capacity(nk * nj);
    for row in rows {
        cells.extend(row?);
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn p(k: f64, j: f64) -> CouplingPair {
        CouplingPair::new(k, j).unwrap()
    }

    #[test]
    fn delta_signs_at_endpoints() {
        let sp = psi(1.0).unwrap().value;
        assert!(delta(p(1.0, sp)).unwrap() < 0.0);
        assert!(delta(p(1.0, 1.0)).unwrap() > 0.0);
        assert!(delta(p(1.0, sp - 0.01)).is_err());
        assert!(delta(p(1.0, 1.01)).is_err());
        assert!(delta(p(0.0, 0.9)).is_err());
    }

    #[test]
    fn gamma_inside_squeeze() {
        let c = gamma(1.0).unwrap();
        assert!(c.psi.value < c.gamma_k && c.gamma_k < 1.0);
        assert!(delta(p(1.0, c.gamma_k)).unwrap().abs() < 1e-10);
        assert!(c.slope > -2.0 / 3.0 && c.slope < 0.0);
    }

    #[test]
    fn m_star_selector_branches() {
        let c = gamma(1.0).unwrap();
        let below = m_star(p(1.0, 0.5 * (c.psi.value + c.gamma_k))).unwrap();
        assert_eq!(below.unique().unwrap().m, 0.0);
        let above = m_star(p(1.0, 0.5 * (c.gamma_k + 1.0))).unwrap();
        assert!(above.unique().unwrap().m > 0.0);
        let on = m_star(p(1.0, c.gamma_k)).unwrap();
        assert!(on.on_coexistence);
        assert_eq!(on.points.len(), 2);
        assert!((on.points[0].phi - on.points[1].phi).abs() < 1e-10);
        let free = m_star(p(0.0, 0.0)).unwrap();
        assert_eq!(free.unique().unwrap().m, 0.0);
        assert_eq!(free.unique().unwrap().phi, LN_2);
    }

    #[test]
    fn curie_weiss_pair_and_critical() {
        let pair = m_star(p(0.0, 1.5)).unwrap();
        assert!(pair.symmetric_pair);
        assert_eq!(pair.points[0].m, -pair.points[1].m);
        let crit = m_star(p(0.0, 1.0)).unwrap();
        assert!(crit.is_degenerate());
    }

    #[test]
    fn m_star_flip() {
        let a = m_star(p(1.0, 1.2)).unwrap().unique().unwrap();
        let b = m_star(p(-1.0, 1.2)).unwrap().unique().unwrap();
        assert_eq!(a.m, -b.m);
        let c = gamma(1.0).unwrap();
        let on = m_star(p(-1.0, c.gamma_k)).unwrap();
        assert!(on.points[0].m < 0.0 && on.points[1].m == 0.0);
    }

    #[test]
    fn linspace_is_inclusive() {
        assert_eq!(linspace(0.0, 1.0, 1), vec![0.0]);
        let v = linspace(0.1, 2.0, 10);
        assert_eq!(v[0], 0.1);
        assert_eq!(v[9], 2.0);
    }

    #[test]
    fn scan_rejects_empty_grid() {
        assert!(scan((0.1, 1.0), (0.0, 1.0), 0, 3).is_err());
    }

    #[test]
    fn slope_fd_domain() {
        assert!(gamma_slope_fd(1e-5, 1e-4).is_err());
        assert!(gamma_slope_fd(1.0, 0.0).is_err());
    }
}
