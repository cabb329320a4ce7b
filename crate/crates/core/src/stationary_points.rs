//! Solutions of the consistency equation `m = tanh(K m^2 + J m)` and their
//! classification for `K > 0`.
//!
//! Rather than scanning `phi'` for sign changes, the solver divides out the
//! trivial root: for `m > 0` the equation reads `g(m, K)/m = J`, and
//! `g(m, K)/m` is strictly convex with its minimum `Psi(K)` at a known
//! point, so positive roots come with guaranteed brackets on either side of
//! that minimum. For `m = -u < 0` it reads `atanh(u)/u + K u = J`, whose
//! left side is increasing, so there is one negative root iff `J > 1`.

use crate::error::{Error, Result};
use crate::landscape::{landscape_at, psi, slope_gap, CouplingPair, Spinodal, DOMAIN_EPS};
use crate::numeric::bisect;

/// Width of the band `|J - Psi(K)| < TANGENCY_TOL` reported as tangent.
pub const TANGENCY_TOL: f64 = 1e-9;

/// `phi''` at a maximizer must be below `-DEGENERACY_TOL`.
pub const DEGENERACY_TOL: f64 = 1e-10;

const UPPER: f64 = 1.0 - DOMAIN_EPS;

/// Root structure for canonical `K >= 0`. Magnetizations are in the
/// canonical orientation; see [`Classification::flipped`].
#[derive(Debug, Clone, PartialEq)]
pub enum StationaryClassification {
    /// `J < Psi(K)`: `m0 = 0` is the only root and the maximum.
    UniqueZero,
    /// `J = Psi(K)` within [`TANGENCY_TOL`]: `0` and the tangency point `m4`.
    Tangent { m4: f64 },
    /// `Psi(K) < J < 1`: local maxima at `0` and `m1`, local minimum at `m3`.
    TwoLocalMaxima { m3: f64, m1: f64 },
    /// `J >= 1`: the positive root `m2` is the only maximum. `negatives`
    /// lists the roots in `(-1, 0)`; they are never global maxima.
    UniquePositive { m2: f64, negatives: Vec<f64> },
    /// `K = 0`, `J > 1`: the symmetric Curie-Weiss maxima `+-m2`.
    SymmetricPair { m2: f64 },
}

impl StationaryClassification {
    /// All stationary points, ascending, including `0`.
    pub fn roots(&self) -> Vec<f64> {
        let mut roots = match self {
            Self::UniqueZero => vec![0.0],
            Self::Tangent { m4 } => vec![0.0, *m4],
            Self::TwoLocalMaxima { m3, m1 } => vec![0.0, *m3, *m1],
            Self::UniquePositive { m2, negatives } => {
                let mut r = negatives.clone();
                r.extend([0.0, *m2]);
                r
            }
            Self::SymmetricPair { m2 } => vec![-m2, 0.0, *m2],
        };
        roots.sort_by(f64::total_cmp);
        roots
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub kind: StationaryClassification,
    /// The input had `K < 0`; negate every magnetization in `kind`.
    pub flipped: bool,
    /// `J` fell inside the tangency band, where the split into a double
    /// root is below double-precision reliability.
    pub low_confidence: bool,
}

fn saturated(k: f64, j: f64) -> Error {
    Error::SaturatedRoot { k, j }
}

/// Positive roots for canonical `k >= 0`, ascending.
pub(crate) fn positive_roots(k: f64, j: f64, spinodal: Option<Spinodal>) -> Result<Vec<f64>> {
    if k == 0.0 {
        if j <= 1.0 {
            return Ok(Vec::new());
        }
        let h = |m: f64| slope_gap(m, 0.0, j);
        if h(UPPER) <= 0.0 {
            return Err(saturated(k, j));
        }
        return Ok(vec![bisect(h, 0.0, UPPER, 0.0)]);
    }
    let sp = match spinodal {
        Some(sp) => sp,
        None => psi(k)?,
    };
    let h = |m: f64| slope_gap(m, k, j);
    let at_min = h(sp.argmin);
    if at_min > 0.0 {
        return Ok(Vec::new());
    }
    if at_min == 0.0 {
        return Ok(vec![sp.argmin]);
    }
    if h(UPPER) <= 0.0 {
        return Err(saturated(k, j));
    }
    let upper_root = bisect(h, sp.argmin, UPPER, 0.0);
    if j < 1.0 {
        let lower_root = bisect(h, 0.0, sp.argmin, 0.0);
        Ok(vec![lower_root, upper_root])
    } else {
        Ok(vec![upper_root])
    }
}

/// The largest positive root for canonical `k > 0`, `Psi(K) <= J`.
pub(crate) fn largest_root(k: f64, j: f64, sp: Spinodal) -> Result<f64> {
    let h = |m: f64| slope_gap(m, k, j);
    let at_min = h(sp.argmin);
    if at_min >= 0.0 {
        // on or numerically just below the tangency
        return Ok(sp.argmin);
    }
    if h(UPPER) <= 0.0 {
        return Err(saturated(k, j));
    }
    Ok(bisect(h, sp.argmin, UPPER, 0.0))
}

/// Negative roots for canonical `k >= 0`, ascending.
pub(crate) fn negative_roots(k: f64, j: f64) -> Result<Vec<f64>> {
    if j <= 1.0 {
        return Ok(Vec::new());
    }
    // m = -u with atanh(u)/u + k u = j, increasing in u
    let h = |u: f64| slope_gap(u, -k, j);
    if h(UPPER) <= 0.0 {
        return Err(saturated(k, j));
    }
    Ok(vec![-bisect(h, 0.0, UPPER, 0.0)])
}

/// All solutions of `m = tanh(K m^2 + J m)` in `[-1 + 1e-12, 1 - 1e-12]`,
/// ascending. `0` is always present and exact.
///
/// Fails with [`Error::SaturatedRoot`] when a root lies beyond the clip,
/// which requires `|K| + J` above roughly 14.
pub fn solve_consistency(params: CouplingPair) -> Result<Vec<f64>> {
    let (q, flipped) = params.canonical();
    let mut roots = negative_roots(q.k, q.j)?;
    roots.push(0.0);
    roots.extend(positive_roots(q.k, q.j, None)?);
    if flipped {
        roots = roots.into_iter().map(|m| -m).rev().collect();
    }
    Ok(roots)
}

/// Classifies the root structure. `K < 0` is handled through the spin flip.
pub fn classify(params: CouplingPair) -> Result<Classification> {
    let (q, flipped) = params.canonical();
    let (k, j) = (q.k, q.j);
    let done = |kind, low_confidence| Classification {
        kind,
        flipped,
        low_confidence,
    };
    if k == 0.0 {
        return Ok(match positive_roots(0.0, j, None)?.first() {
            None => done(StationaryClassification::UniqueZero, false),
            Some(&m2) => done(StationaryClassification::SymmetricPair { m2 }, false),
        });
    }
    let sp = psi(k)?;
    if j >= 1.0 {
        let m2 = largest_root(k, j, sp)?;
        let negatives = negative_roots(k, j)?;
        return Ok(done(
            StationaryClassification::UniquePositive { m2, negatives },
            false,
        ));
    }
    if (j - sp.value).abs() < TANGENCY_TOL {
        return Ok(done(
            StationaryClassification::Tangent { m4: sp.argmin },
            true,
        ));
    }
    if j < sp.value {
        return Ok(done(StationaryClassification::UniqueZero, false));
    }
    match *positive_roots(k, j, Some(sp))?.as_slice() {
        [m3, m1] if 0.0 < m3 && m3 < m1 => Ok(done(
            StationaryClassification::TwoLocalMaxima { m3, m1 },
            false,
        )),
        [m3, m1] => Err(Error::RootOrdering { m3, m1 }),
        // the pair merged numerically despite J - Psi >= TANGENCY_TOL
        _ => Ok(done(
            StationaryClassification::Tangent { m4: sp.argmin },
            true,
        )),
    }
}

/// `[tau(K, J), 1 - 1e-12]` with `tau = (1/J - 1) J / K = (1 - J)/K`, a
/// bracket for the largest root `m1`. Requires `K > 0`, `Psi(K) <= J < 1`.
pub fn bracket_m1(params: CouplingPair) -> Result<(f64, f64)> {
    let CouplingPair { k, j } = params;
    if !(k > 0.0) {
        return Err(Error::domain("K", k, "(0, inf)"));
    }
    let sp = psi(k)?;
    if j < sp.value - TANGENCY_TOL || j >= 1.0 {
        return Err(Error::regime(k, j, "bracket_m1 needs Psi(K) <= J < 1"));
    }
    Ok(((1.0 - j) / k, UPPER))
}

/// First-order response of a nondegenerate maximizer and of `phi` at it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensitivity {
    pub dm_dj: f64,
    pub dm_dk: f64,
    pub dphi_dj: f64,
    pub dphi_dk: f64,
}

/// `dm/dJ = -m/phi''`, `dm/dK = -m^2/phi''`, `dphi/dJ = m^2/2`,
/// `dphi/dK = m^3/3` at a maximizer `root` of `phi`.
pub fn sensitivity(params: CouplingPair, root: f64) -> Result<Sensitivity> {
    let d2 = landscape_at(root, params)?.d2;
    if d2 >= -DEGENERACY_TOL {
        return Err(Error::Degenerate { m: root, d2 });
    }
    Ok(Sensitivity {
        dm_dj: -root / d2,
        dm_dk: -root * root / d2,
        dphi_dj: root * root / 2.0,
        dphi_dk: root * root * root / 3.0,
    })
}
