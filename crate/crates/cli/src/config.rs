//! Command-line grammar and the validated run configuration.

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// `lo:hi:n`, an inclusive grid of `n >= 1` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRange {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

/// `lo:hi` with `0 < lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeError(pub String);

impl fmt::Display for RangeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for RangeError {}

fn finite(field: &str, s: &str) -> Result<f64, RangeError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| RangeError(format!("{field} `{s}` is not a number")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(RangeError(format!("{field} `{s}` is not finite")))
    }
}

/// Parses `lo:hi:n` with `lo <= hi` and `n >= 1`; `n = 1` requires `lo = hi`
/// or takes `lo`.
pub fn parse_range(s: &str) -> Result<GridRange, RangeError> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(RangeError(format!("`{s}` is not of the form lo:hi:n")));
    };
    let lo = finite("lo", lo)?;
    let hi = finite("hi", hi)?;
    let n: usize = n
        .trim()
        .parse()
        .map_err(|_| RangeError(format!("count `{n}` is not a non-negative integer")))?;
    if n == 0 {
        return Err(RangeError("grid count must be at least 1".into()));
    }
    if lo > hi {
        return Err(RangeError(format!("lo = {lo} exceeds hi = {hi}")));
    }
    Ok(GridRange { lo, hi, n })
}

/// Parses `lo:hi` with `0 < lo < hi`.
pub fn parse_window(s: &str) -> Result<Window, RangeError> {
    let Some((lo, hi)) = s.split_once(':') else {
        return Err(RangeError(format!("`{s}` is not of the form lo:hi")));
    };
    let lo = finite("lo", lo)?;
    let hi = finite("hi", hi)?;
    if !(lo > 0.0 && hi > lo) {
        return Err(RangeError(format!("window {lo}:{hi} needs 0 < lo < hi")));
    }
    Ok(Window { lo, hi })
}

fn parse_alpha_window(s: &str) -> Result<f64, RangeError> {
    let a = finite("alpha window", s)?;
    if a > 0.0 && a <= 1.0 / 6.0 {
        Ok(a)
    } else {
        Err(RangeError(format!("alpha window {a} is outside (0, 1/6]")))
    }
}

fn parse_finite(s: &str) -> Result<f64, RangeError> {
    finite("value", s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FluctuationMode {
    /// Pick from the parameters: critical at (0, 1), conditional on the
    /// coexistence curve, clt otherwise.
    Auto,
    Clt,
    Conditional,
    Critical,
}

#[derive(Debug, Args, Clone)]
struct CommonArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = "CUBICMF_THREADS", value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
    /// Concentration window exponent alpha in (0, 1/6].
    #[arg(long = "alpha-window", default_value = "0.125", value_parser = parse_alpha_window)]
    alpha_window: f64,
}

#[derive(Debug, Args, Clone)]
struct PointArgs {
    /// Three-body coupling.
    #[arg(long = "K", allow_hyphen_values = true, value_parser = parse_finite)]
    k: f64,
    /// Two-body coupling.
    #[arg(long = "J", allow_hyphen_values = true, value_parser = parse_finite)]
    j: Option<f64>,
}

#[derive(Debug, Args, Clone)]
struct SizeArgs {
    /// System sizes; repeat the flag or separate with commas.
    #[arg(long = "N", required = true, value_delimiter = ',')]
    n: Vec<usize>,
}

#[derive(Debug, Subcommand, Clone)]
enum CommandArgs {
    /// Phase labels and m* over a (K, J) grid, plus the gamma(K) polyline.
    PhaseDiagram {
        #[arg(long = "K-range", allow_hyphen_values = true, value_parser = parse_range)]
        k_range: GridRange,
        #[arg(long = "J-range", allow_hyphen_values = true, value_parser = parse_range)]
        j_range: GridRange,
        /// Where to write the gamma(K) polyline; defaults to
        /// `<stem>.gamma.<ext>` next to --out.
        #[arg(long = "gamma-out")]
        gamma_out: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Psi(K), gamma(K), m1 and gamma'(K) along a K grid (K > 0).
    Coexistence {
        #[arg(long = "K-range", allow_hyphen_values = true, value_parser = parse_range)]
        k_range: GridRange,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// The exact magnetization spectrum for each N.
    Spectrum {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        sizes: SizeArgs,
        /// Tilt t of the weight exp(t sqrt(N) m).
        #[arg(long, default_value = "0", allow_hyphen_values = true, value_parser = parse_finite)]
        tilt: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Exact rescaled fluctuations against their limiting laws.
    Fluctuations {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        sizes: SizeArgs,
        #[arg(long, value_enum, default_value_t = FluctuationMode::Auto)]
        mode: FluctuationMode,
        /// Use J = gamma(K) instead of --J.
        #[arg(long = "J-on-gamma")]
        j_on_gamma: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Exact against asymptotic log-partition functions.
    ExpansionCheck {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        sizes: SizeArgs,
        /// Use J = gamma(K) instead of --J.
        #[arg(long = "J-on-gamma")]
        j_on_gamma: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Power-law fits of m* along J = 1 + alpha K and at K = 0.
    Exponents {
        /// Slopes alpha; repeat the flag or separate with commas.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',', value_parser = parse_finite)]
        alpha: Vec<f64>,
        /// Fit window for K (and J - 1 on the Curie-Weiss line).
        #[arg(long = "K-window", default_value = "1e-4:1e-2", value_parser = parse_window)]
        k_window: Window,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Gibbs mass outside the ball of radius N^(-1/2 + alpha) around m*.
    Concentration {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        sizes: SizeArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Parser)]
#[command(
    name = "cubicmf",
    version,
    about = "Phase diagram, exact finite-size laws and critical behaviour of the mean-field model with two- and three-body couplings",
    after_help = "Exit status: 0 success, 2 usage error, 3 regime error, 4 I/O error."
)]
struct Cli {
    #[command(subcommand)]
    command: CommandArgs,
}

/// Where the coupling J comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JSource {
    Given(f64),
    OnGamma,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    PhaseDiagram {
        k_range: GridRange,
        j_range: GridRange,
        gamma_out: Option<PathBuf>,
    },
    Coexistence {
        k_range: GridRange,
    },
    Spectrum {
        k: f64,
        j: f64,
        tilt: f64,
    },
    Fluctuations {
        k: f64,
        j: JSource,
        mode: FluctuationMode,
    },
    ExpansionCheck {
        k: f64,
        j: JSource,
    },
    Exponents {
        alphas: Vec<f64>,
        window: Window,
    },
    Concentration {
        k: f64,
        j: f64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::PhaseDiagram { .. } => "phase-diagram",
            Command::Coexistence { .. } => "coexistence",
            Command::Spectrum { .. } => "spectrum",
            Command::Fluctuations { .. } => "fluctuations",
            Command::ExpansionCheck { .. } => "expansion-check",
            Command::Exponents { .. } => "exponents",
            Command::Concentration { .. } => "concentration",
        }
    }
}

/// A fully validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Sorted ascending, without repeats; empty for commands without --N.
    pub n_list: Vec<usize>,
    pub alpha_window: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threads: usize,
}

/// Why an invocation was rejected before running.
#[derive(Debug)]
pub enum UsageError {
    /// Help or version was requested; the payload is the rendered text.
    Info(String),
    Invalid(String),
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UsageError::Info(s) | UsageError::Invalid(s) => f.write_str(s),
        }
    }
}

fn invalid(msg: impl Into<String>) -> UsageError {
    UsageError::Invalid(format!("error: {}", msg.into()))
}

fn need_j(j: Option<f64>) -> Result<f64, UsageError> {
    j.ok_or_else(|| invalid("--J is required"))
}

fn j_source(j: Option<f64>, on_gamma: bool) -> Result<JSource, UsageError> {
    match (j, on_gamma) {
        (Some(_), true) => Err(invalid("--J and --J-on-gamma are mutually exclusive")),
        (Some(j), false) => Ok(JSource::Given(j)),
        (None, true) => Ok(JSource::OnGamma),
        (None, false) => Err(invalid("one of --J or --J-on-gamma is required")),
    }
}

fn sizes(mut n: Vec<usize>) -> Result<Vec<usize>, UsageError> {
    if n.contains(&0) {
        return Err(invalid("--N values must be positive"));
    }
    n.sort_unstable();
    n.dedup();
    Ok(n)
}

/// Parses and validates an argument vector (program name first) without
/// running anything.
pub fn parse_config<I, T>(args: I) -> Result<RunConfig, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp
        | clap::error::ErrorKind::DisplayVersion
        | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            UsageError::Info(e.render().to_string())
        }
        _ => UsageError::Invalid(e.render().to_string()),
    })?;
    let (command, n_list, common) = match cli.command {
        CommandArgs::PhaseDiagram {
            k_range,
            j_range,
            gamma_out,
            common,
        } => (
            Command::PhaseDiagram {
                k_range,
                j_range,
                gamma_out,
            },
            Vec::new(),
            common,
        ),
        CommandArgs::Coexistence { k_range, common } => {
            (Command::Coexistence { k_range }, Vec::new(), common)
        }
        CommandArgs::Spectrum {
            point,
            sizes: n,
            tilt,
            common,
        } => (
            Command::Spectrum {
                k: point.k,
                j: need_j(point.j)?,
                tilt,
            },
            sizes(n.n)?,
            common,
        ),
        CommandArgs::Fluctuations {
            point,
            sizes: n,
            mode,
            j_on_gamma,
            common,
        } => (
            Command::Fluctuations {
                k: point.k,
                j: j_source(point.j, j_on_gamma)?,
                mode,
            },
            sizes(n.n)?,
            common,
        ),
        CommandArgs::ExpansionCheck {
            point,
            sizes: n,
            j_on_gamma,
            common,
        } => (
            Command::ExpansionCheck {
                k: point.k,
                j: j_source(point.j, j_on_gamma)?,
            },
            sizes(n.n)?,
            common,
        ),
        CommandArgs::Exponents {
            alpha,
            k_window,
            common,
        } => {
            if alpha.is_empty() {
                return Err(invalid("--alpha needs at least one value"));
            }
            (
                Command::Exponents {
                    alphas: alpha,
                    window: k_window,
                },
                Vec::new(),
                common,
            )
        }
        CommandArgs::Concentration {
            point,
            sizes: n,
            common,
        } => (
            Command::Concentration {
                k: point.k,
                j: need_j(point.j)?,
            },
            sizes(n.n)?,
            common,
        ),
    };
    let threads = match common.threads {
        Some(t) => t as usize,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    Ok(RunConfig {
        command,
        n_list,
        alpha_window: common.alpha_window,
        format: common.format,
        out: common.out,
        threads,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(
            parse_range("0.1:2:10").unwrap(),
            GridRange {
                lo: 0.1,
                hi: 2.0,
                n: 10
            }
        );
        assert_eq!(parse_range("-1:-1:1").unwrap().lo, -1.0);
        assert!(parse_range("0:1:0").is_err());
        assert!(parse_range("1:0:3").is_err());
        assert!(parse_range("0:1").is_err());
        assert!(parse_range("0:nan:2").is_err());
        assert!(parse_range("0:1:-2").is_err());
        assert!(parse_range("0:1:2:3").is_err());
    }

    #[test]
    fn windows() {
        assert_eq!(
            parse_window("1e-4:1e-2").unwrap(),
            Window { lo: 1e-4, hi: 1e-2 }
        );
        assert!(parse_window("0:1").is_err());
        assert!(parse_window("1:1").is_err());
    }

    #[test]
    fn sizes_are_sorted() {
        let c = parse_config([
            "cubicmf", "spectrum", "--K", "-1", "--J", "0.5", "--N", "100,10", "--N", "10",
        ])
        .unwrap();
        assert_eq!(c.n_list, vec![10, 100]);
        assert_eq!(
            c.command,
            Command::Spectrum {
                k: -1.0,
                j: 0.5,
                tilt: 0.0
            }
        );
    }

    #[test]
    fn alpha_window_bounds() {
        let base = [
            "cubicmf",
            "concentration",
            "--K",
            "1",
            "--J",
            "1.2",
            "--N",
            "10",
        ];
        let ok = parse_config(base.iter().copied().chain(["--alpha-window", "0.1"])).unwrap();
        assert_eq!(ok.alpha_window, 0.1);
        assert!(parse_config(base.iter().copied().chain(["--alpha-window", "0.2"])).is_err());
        assert_eq!(parse_config(base).unwrap().alpha_window, 0.125);
    }

    #[test]
    fn empty_alpha_is_rejected() {
        assert!(matches!(
            parse_config(["cubicmf", "exponents"]),
            Err(UsageError::Invalid(_))
        ));
    }

    #[test]
    fn j_sources() {
        assert!(parse_config(["cubicmf", "expansion-check", "--K", "1", "--N", "10"]).is_err());
        assert!(parse_config([
            "cubicmf",
            "expansion-check",
            "--K",
            "1",
            "--J",
            "1",
            "--J-on-gamma",
            "--N",
            "10"
        ])
        .is_err());
        let c = parse_config([
            "cubicmf",
            "expansion-check",
            "--K",
            "1",
            "--J-on-gamma",
            "--N",
            "10",
        ])
        .unwrap();
        assert_eq!(
            c.command,
            Command::ExpansionCheck {
                k: 1.0,
                j: JSource::OnGamma
            }
        );
    }
}
