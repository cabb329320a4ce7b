//! One runner per subcommand. Each returns its tables in output order;
//! parallel work is collected by index before anything is written.

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use cubicmf::exponents::{curie_weiss_exponent, fit_line, log_grid, ExponentFit, FitKind};
use cubicmf::finite_volume::{
    asymptotic_log_partition, build_spectrum, log_concentration_probability, log_partition,
    magnetization_law,
};
use cubicmf::fluctuations::{
    clt_summary, conditional_clt_on, critical_summary, theoretical_weights, FluctuationSummary,
    Reference,
};
use cubicmf::landscape::CouplingPair;
use cubicmf::numeric::integrate;
use cubicmf::phase_diagram::{gamma, linspace, m_star, scan};
use rayon::prelude::*;

use crate::config::{Command, FluctuationMode, Format, GridRange, JSource, RunConfig, Window};
use crate::table::{Cell, Table};
use crate::Failure;

/// A table and where it goes; `None` is the primary destination.
pub struct Output {
    pub path: Option<PathBuf>,
    pub table: Table,
}

pub fn execute(config: &RunConfig) -> Result<Vec<Output>, Failure> {
    let primary = |table| Output { path: None, table };
    match &config.command {
        Command::PhaseDiagram {
            k_range,
            j_range,
            gamma_out,
        } => {
            let grid = phase_grid(*k_range, *j_range)?;
            let mut out = vec![primary(grid)];
            if let Some(path) =
                gamma_path(gamma_out.as_deref(), config.out.as_deref(), config.format)
            {
                out.push(Output {
                    path: Some(path),
                    table: gamma_polyline(&linspace(k_range.lo, k_range.hi, k_range.n), false)?,
                });
            }
            Ok(out)
        }
        Command::Coexistence { k_range } => {
            let ks = linspace(k_range.lo, k_range.hi, k_range.n);
            if let Some(k) = ks.iter().find(|&&k| !(k > 0.0)) {
                return Err(Failure::Usage(format!("coexistence needs K > 0, got {k}")));
            }
            Ok(vec![primary(gamma_polyline(&ks, true)?)])
        }
        Command::Spectrum { k, j, tilt } => Ok(vec![primary(spectrum(
            pair(*k, *j)?,
            *tilt,
            &config.n_list,
        )?)]),
        Command::Fluctuations { k, j, mode } => Ok(vec![primary(fluctuations(
            pair(*k, resolve_j(*k, *j)?)?,
            *mode,
            &config.n_list,
        )?)]),
        Command::ExpansionCheck { k, j } => Ok(vec![primary(expansion_check(
            pair(*k, resolve_j(*k, *j)?)?,
            &config.n_list,
        )?)]),
        Command::Exponents { alphas, window } => Ok(vec![primary(exponents(alphas, *window)?)]),
        Command::Concentration { k, j } => Ok(vec![primary(concentration(
            pair(*k, *j)?,
            config.alpha_window,
            &config.n_list,
        )?)]),
    }
}

fn pair(k: f64, j: f64) -> Result<CouplingPair, Failure> {
    Ok(CouplingPair::new(k, j)?)
}

fn resolve_j(k: f64, j: JSource) -> Result<f64, Failure> {
    match j {
        JSource::Given(j) => Ok(j),
        JSource::OnGamma if k == 0.0 => Err(Failure::Usage(
            "--J-on-gamma needs K != 0; the K = 0 transition is continuous".into(),
        )),
        JSource::OnGamma => Ok(gamma(k.abs())?.gamma_k),
    }
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

/// `--gamma-out`, else `<stem>.gamma.<ext>` beside `--out`; nothing when
/// writing to standard output.
fn gamma_path(explicit: Option<&Path>, out: Option<&Path>, format: Format) -> Option<PathBuf> {
    if let Some(p) = explicit {
        return Some(p.to_path_buf());
    }
    let out = out?;
    let stem = out
        .file_stem()
        .map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    Some(out.with_file_name(format!("{stem}.gamma.{}", extension(format))))
}

fn phase_grid(k: GridRange, j: GridRange) -> Result<Table, Failure> {
    let cells = scan((k.lo, k.hi), (j.lo, j.hi), k.n, j.n)?;
    let mut t = Table::new(&["K", "J", "phase_label", "regime", "m_star"]);
    for c in cells {
        t.push(vec![
            c.k.into(),
            c.j.into(),
            c.label.as_str().into(),
            c.regime.as_str().into(),
            c.m_star.into(),
        ]);
    }
    Ok(t)
}

/// One row per `K != 0`; negative `K` mirrors `m1` and the slope is even.
fn gamma_polyline(ks: &[f64], with_fd: bool) -> Result<Table, Failure> {
    let ks: Vec<f64> = ks.iter().copied().filter(|&k| k != 0.0).collect();
    let samples = ks
        .par_iter()
        .map(|&k| {
            let c = gamma(k.abs())?;
            let fd = if with_fd {
                let h = 1e-4 * k.abs().min(1.0);
                Some(cubicmf::phase_diagram::gamma_slope_fd(k.abs(), h)?)
            } else {
                None
            };
            Ok((k, c, fd))
        })
        .collect::<Result<Vec<_>, cubicmf::Error>>()?;
    let mut cols = vec!["K", "psi", "psi_argmin", "gamma", "m1", "slope"];
    if with_fd {
        cols.push("slope_fd");
    }
    let mut t = Table::new(&cols);
    for (k, c, fd) in samples {
        let sign = k.signum();
        let mut row: Vec<Cell> = vec![
            k.into(),
            c.psi.value.into(),
            (sign * c.psi.argmin).into(),
            c.gamma_k.into(),
            (sign * c.m1).into(),
            c.slope.into(),
        ];
        if with_fd {
            row.push(fd.into());
        }
        t.push(row);
    }
    Ok(t)
}

fn spectrum(params: CouplingPair, tilt: f64, ns: &[usize]) -> Result<Table, Failure> {
    let mut t = Table::new(&["N", "k", "m", "log_multiplicity", "log_weight", "prob"]);
    let spectra = ns
        .par_iter()
        .map(|&n| {
            let s = build_spectrum(n, params, tilt)?;
            let law = magnetization_law(&s);
            Ok((s, law))
        })
        .collect::<Result<Vec<_>, cubicmf::Error>>()?;
    for (s, law) in spectra {
        let offset = s.log_weight_offset();
        for k in 0..s.support().len() {
            t.push(vec![
                s.n().into(),
                k.into(),
                s.support()[k].into(),
                s.log_multiplicity()[k].into(),
                (offset + s.log_weight()[k]).into(),
                law.prob[k].into(),
            ]);
        }
    }
    Ok(t)
}

/// Second moment of the density proportional to `exp(-x^4/12)`.
fn quartic_second_moment() -> f64 {
    static M2: OnceLock<f64> = OnceLock::new();
    *M2.get_or_init(|| {
        let w = |x: f64| (-x.powi(4) / 12.0).exp();
        integrate(|x| x * x * w(x), -10.0, 10.0, 1e-14) / integrate(w, -10.0, 10.0, 1e-14)
    })
}

const FLUCTUATION_COLUMNS: &[&str] = &[
    "N",
    "mode",
    "branch",
    "scaling",
    "center",
    "mass",
    "mean",
    "variance",
    "kurtosis",
    "second_moment",
    "fourth_moment",
    "ks_distance",
    "target_mass",
    "target_variance",
    "target_fourth_moment",
];

fn fluctuation_row(
    mode: &str,
    branch: Option<usize>,
    mass: f64,
    target_mass: f64,
    s: &FluctuationSummary,
) -> Vec<Cell> {
    let (target_var, target_m4) = match s.reference {
        Reference::Gaussian { variance } => (variance, 3.0 * variance * variance),
        Reference::Quartic => (quartic_second_moment(), 3.0),
    };
    vec![
        s.n.into(),
        mode.into(),
        branch.into(),
        s.scaling.as_str().into(),
        s.center.into(),
        mass.into(),
        s.mean.into(),
        s.variance.into(),
        s.kurtosis.into(),
        s.second_moment.into(),
        s.fourth_moment.into(),
        s.ks_distance.into(),
        target_mass.into(),
        target_var.into(),
        target_m4.into(),
    ]
}

fn fluctuations(
    params: CouplingPair,
    mode: FluctuationMode,
    ns: &[usize],
) -> Result<Table, Failure> {
    let critical = params.k == 0.0 && params.j == 1.0;
    let mode = match mode {
        FluctuationMode::Auto if critical => FluctuationMode::Critical,
        FluctuationMode::Auto if m_star(params)?.on_coexistence => FluctuationMode::Conditional,
        FluctuationMode::Auto => FluctuationMode::Clt,
        FluctuationMode::Critical if !critical => {
            return Err(Failure::Regime(format!(
                "critical mode needs (K, J) = (0, 1), got ({}, {})",
                params.k, params.j
            )))
        }
        m => m,
    };
    let rows: Vec<Vec<Vec<Cell>>> = ns
        .par_iter()
        .map(|&n| -> Result<Vec<Vec<Cell>>, Failure> {
            Ok(match mode {
                FluctuationMode::Clt => {
                    vec![fluctuation_row(
                        "clt",
                        None,
                        1.0,
                        1.0,
                        &clt_summary(params, n)?,
                    )]
                }
                FluctuationMode::Critical => {
                    vec![fluctuation_row(
                        "critical",
                        None,
                        1.0,
                        1.0,
                        &critical_summary(n)?,
                    )]
                }
                FluctuationMode::Conditional => {
                    let w = theoretical_weights(params)?;
                    let s = build_spectrum(n, params, 0.0)?;
                    let mut out = Vec::with_capacity(2);
                    for (branch, rho) in [(0, w.rho0), (1, w.rho1)] {
                        let c = conditional_clt_on(&s, branch)?;
                        out.push(fluctuation_row(
                            "conditional",
                            Some(branch),
                            c.mass,
                            rho,
                            &c.summary,
                        ));
                    }
                    out
                }
                FluctuationMode::Auto => unreachable!("resolved above"),
            })
        })
        .collect::<Result<_, _>>()?;
    let mut t = Table::new(FLUCTUATION_COLUMNS);
    rows.into_iter().flatten().for_each(|r| t.push(r));
    Ok(t)
}

fn expansion_check(params: CouplingPair, ns: &[usize]) -> Result<Table, Failure> {
    let maxima = m_star(params)?;
    if maxima.is_degenerate() {
        return Err(Failure::Regime(format!(
            "(K, J) = ({}, {}) has a degenerate maximizer; the expansion does not apply",
            params.k, params.j
        )));
    }
    let rows = ns
        .par_iter()
        .map(|&n| {
            let exact = log_partition(&build_spectrum(n, params, 0.0)?);
            let asym = asymptotic_log_partition(params, &maxima, n)?;
            Ok((n, exact, asym))
        })
        .collect::<Result<Vec<_>, cubicmf::Error>>()?;
    let mut t = Table::new(&[
        "N",
        "maximizers",
        "exact_log_z",
        "asymptotic_log_z",
        "difference",
        "scaled_difference",
    ]);
    for (n, exact, asym) in rows {
        let d = exact - asym;
        t.push(vec![
            n.into(),
            maxima.points.len().into(),
            exact.into(),
            asym.into(),
            d.into(),
            ((n as f64).sqrt() * d).into(),
        ]);
    }
    Ok(t)
}

fn fit_row(kind: &str, fit: &ExponentFit, target: Option<(f64, f64)>) -> Vec<Cell> {
    let (fit_kind, zero_k, exponent, prefactor, r2) = match fit.kind {
        FitKind::PowerLaw => (
            "power-law",
            None,
            Some(fit.exponent),
            Some(fit.prefactor),
            Some(fit.r_squared),
        ),
        FitKind::ZeroPhase { largest_zero_k } => (
            "zero-phase",
            Some(largest_zero_k),
            None,
            Some(fit.prefactor),
            None,
        ),
    };
    vec![
        kind.into(),
        fit.alpha.into(),
        fit_kind.into(),
        exponent.into(),
        prefactor.into(),
        r2.into(),
        fit.x_values.len().into(),
        fit.x_values.last().copied().into(),
        fit.x_values.first().copied().into(),
        zero_k.into(),
        target.map(|t| t.0).into(),
        target.map(|t| t.1).into(),
    ]
}

fn exponents(alphas: &[f64], window: Window) -> Result<Table, Failure> {
    let grid = log_grid(window.lo, window.hi)?;
    let mut t = Table::new(&[
        "line",
        "alpha",
        "fit",
        "exponent",
        "prefactor",
        "r_squared",
        "points",
        "x_min",
        "x_max",
        "largest_zero_k",
        "target_exponent",
        "target_prefactor",
    ]);
    for &alpha in alphas {
        let fit = fit_line(alpha, &grid)?;
        let target = if alpha > 0.0 {
            Some((0.5, (3.0 * alpha).sqrt()))
        } else if alpha == 0.0 {
            Some((1.0, 3.0))
        } else {
            None
        };
        t.push(fit_row("J=1+alpha*K", &fit, target));
    }
    let js: Vec<f64> = grid.iter().map(|x| 1.0 + x).collect();
    let cw = curie_weiss_exponent(&js)?;
    t.push(fit_row("K=0", &cw, Some((0.5, 3f64.sqrt()))));
    Ok(t)
}

fn concentration(params: CouplingPair, alpha: f64, ns: &[usize]) -> Result<Table, Failure> {
    let maxima = m_star(params)?;
    let Some(center) = maxima.unique().filter(|_| !maxima.is_degenerate()) else {
        return Err(Failure::Regime(format!(
            "(K, J) = ({}, {}) has no unique nondegenerate maximizer",
            params.k, params.j
        )));
    };
    let rows = ns
        .par_iter()
        .map(|&n| {
            let law = magnetization_law(&build_spectrum(n, params, 0.0)?);
            let log_out = log_concentration_probability(&law, center.m, alpha)?;
            let nf = n as f64;
            let radius = nf.powf(alpha - 0.5);
            let rate = 0.5 * nf.powf(2.0 * alpha) * center.d2 + 1.5 * nf.ln();
            Ok((n, radius, log_out, rate))
        })
        .collect::<Result<Vec<_>, cubicmf::Error>>()?;
    // the smallest constant that makes the bound hold at every N
    let fitted_c = rows
        .iter()
        .map(|r| r.2 - r.3)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut t = Table::new(&[
        "N",
        "alpha",
        "center",
        "radius",
        "log_mass_outside",
        "mass_outside",
        "bound_rate",
        "residual",
        "fitted_c",
    ]);
    for (n, radius, log_out, rate) in rows {
        t.push(vec![
            n.into(),
            alpha.into(),
            center.m.into(),
            radius.into(),
            log_out.into(),
            log_out.exp().into(),
            rate.into(),
            (log_out - rate).into(),
            fitted_c.into(),
        ]);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_path_defaults() {
        let p = gamma_path(None, Some(Path::new("/tmp/grid.csv")), Format::Csv).unwrap();
        assert_eq!(p, Path::new("/tmp/grid.gamma.csv"));
        assert_eq!(gamma_path(None, None, Format::Json), None);
        let e = gamma_path(Some(Path::new("g.json")), None, Format::Json).unwrap();
        assert_eq!(e, Path::new("g.json"));
    }

    #[test]
    fn quartic_second_moment_matches_gamma_ratio() {
        let expected = 12f64.sqrt() * 1.225_416_702_465_177_6 / 3.625_609_908_221_908;
        assert!((quartic_second_moment() - expected).abs() < 1e-10);
    }
}
