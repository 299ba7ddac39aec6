//! Command-line front end: argument model, JSON/CSV I/O and exit codes.
//!
//! Verdicts are reported as data with exit code 0. Validation and domain
//! problems exit with 2, Newton non-convergence with 3.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{CocircularError, Result};
use crate::geometry::{AngleConfiguration, MassVector};
use crate::minimizer::{minimize_f_k_with, MinimizeOptions};
use crate::potential::AuxiliaryFunctional;
use crate::scanner::{alpha_star, monotonicity, scan_region, RegionCell};
use crate::spectral::{circulant_spectrum, criterion_verdict};
use crate::symmetry::{exclusion_by_group, exclusion_by_swap};
use crate::verifier::{verify_cc, verify_definition_cc, CCReport, DEFAULT_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;

/// Environment variable capping worker threads for parallel scans.
pub const THREADS_ENV: &str = "COCIRCULAR_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "cocircular",
    version,
    about = "Centered co-circular central configurations of power-law n-body problems"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimize f_K for the masses in the input file
    Minimize(ConfigArgs),
    /// Check the central-configuration equations at the input angles (or at the minimizer)
    Verify(ConfigArgs),
    /// Run the symmetry and energy-ratio exclusion tests
    Exclude(ConfigArgs),
    /// Spectrum of the interaction matrix at the equal-mass regular n-gon
    Spectrum(SpectrumArgs),
    /// Tabulate the uniqueness condition over an (n, alpha) grid
    Scan(ScanArgs),
    /// Critical exponent where the uniqueness condition becomes tight
    AlphaStar(AlphaStarArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Configuration JSON; standard input when omitted
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Overrides the exponent from the input file
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Convexification constant, at least 2^(3+alpha)/alpha
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Newton iteration cap for the minimizer
    #[arg(long, default_value_t = MinimizeOptions::default().max_iter)]
    pub max_iter: usize,
}

impl ConfigArgs {
    fn minimize_options(&self) -> MinimizeOptions {
        MinimizeOptions {
            max_iter: self.max_iter,
            ..MinimizeOptions::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub n_min: usize,
    #[arg(long)]
    pub n_max: usize,
    /// Exponents to scan; repeat the flag or separate with commas
    #[arg(long, required = true, num_args = 1.., value_delimiter = ',')]
    pub alpha: Vec<f64>,
    /// CSV destination (same as --output with --format csv)
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct AlphaStarArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// The configuration file: `{"alpha": …, "masses": […], "angles": […]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub alpha: f64,
    pub masses: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<Vec<f64>>,
}

#[derive(Debug)]
enum CliError {
    Core(CocircularError),
    Io(String),
}

impl From<CocircularError> for CliError {
    fn from(e: CocircularError) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

/// Executes one command and returns the process exit code.
pub fn run(config: RunConfig) -> i32 {
    match dispatch(config.command) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                CliError::Core(CocircularError::ConvergenceFailure(_)) => EXIT_NO_CONVERGENCE,
                _ => EXIT_INVALID,
            }
        }
    }
}

fn dispatch(command: Command) -> std::result::Result<(), CliError> {
    match command {
        Command::Minimize(args) => {
            let (file, aux, masses) = load(&args)?;
            let init = match &file.angles {
                Some(a) => Some(AngleConfiguration::new(a.clone())?.normalized()),
                None => None,
            };
            let res = minimize_f_k_with(&aux, &masses, init.as_ref(), &args.minimize_options())?;
            let out = MinimizeOutput {
                alpha: aux.alpha(),
                k: aux.k(),
                masses: masses.to_vec(),
                angles: res.theta_m.to_vec(),
                f_value: res.f_value,
                grad_norm: res.grad_norm,
                iterations: res.iterations,
                converged: res.converged,
            };
            emit_json(args.output.as_deref(), &out)
        }
        Command::Verify(args) => {
            let (file, aux, masses) = load(&args)?;
            let config = match &file.angles {
                Some(a) => AngleConfiguration::new(a.clone())?,
                None => minimize_f_k_with(&aux, &masses, None, &args.minimize_options())?.theta_m,
            };
            let report = verify_cc(aux.alpha(), &masses, &config, args.tol)?;
            let planar = verify_definition_cc(aux.alpha(), &masses, &config.positions(), args.tol)?;
            let out = VerifyOutput {
                alpha: aux.alpha(),
                masses: masses.to_vec(),
                angles: config.to_vec(),
                report,
                planar_report: planar,
            };
            emit_json(args.output.as_deref(), &out)
        }
        Command::Exclude(args) => {
            let (_, aux, masses) = load(&args)?;
            let group = exclusion_by_group(&aux, &masses)?;
            let swap = exclusion_by_swap(&aux, &masses)?;
            let theta = &group.minimum.theta_m;
            let criterion = criterion_verdict(&aux, &masses, theta)?;
            let cc = verify_cc(aux.alpha(), &masses, theta, args.tol)?;
            let out = ExcludeOutput {
                alpha: aux.alpha(),
                k: aux.k(),
                masses: masses.to_vec(),
                angles: theta.to_vec(),
                f_value: group.f_value,
                excluded: group.verdict.excluded || swap.verdict.excluded || criterion.excluded || !cc.is_cc,
                group: GroupSection {
                    verdict: group.verdict,
                    candidates: group.candidates,
                },
                swap: SwapSection {
                    verdict: swap.verdict,
                    candidates: swap.candidates,
                    inconsistent: swap.inconsistent,
                },
                criterion,
                cc,
            };
            emit_json(args.output.as_deref(), &out)
        }
        Command::Spectrum(args) => {
            let aux = AuxiliaryFunctional::new(args.alpha, args.k)?;
            let spectrum = circulant_spectrum(&aux, args.n)?;
            match args.format {
                Format::Json => emit_json(args.output.as_deref(), &spectrum),
                Format::Csv => {
                    let rows = spectrum
                        .eigenvalues
                        .iter()
                        .zip(&spectrum.criterion_eigenvalues)
                        .enumerate()
                        .map(|(k, (l, c))| vec![(k + 1).to_string(), fmt_f64(*l), fmt_f64(*c)]);
                    emit_csv(
                        args.output.as_deref(),
                        &["index", "eigenvalue", "criterion_eigenvalue"],
                        rows,
                    )
                }
            }
        }
        Command::Scan(args) => {
            let cells = scan_region(args.n_min, args.n_max, &args.alpha)?;
            let destination = args.csv.as_deref().or(args.output.as_deref());
            let format = if args.csv.is_some() { Format::Csv } else { args.format };
            match format {
                Format::Csv => emit_csv(
                    destination,
                    &["n", "alpha", "g_value", "threshold", "holds"],
                    cells.iter().map(cell_row),
                ),
                Format::Json => {
                    let out = ScanOutput {
                        monotonicity: monotonicity(&cells),
                        cells,
                    };
                    emit_json(destination, &out)
                }
            }
        }
        Command::AlphaStar(args) => {
            let star = alpha_star(args.n, args.tol)?;
            emit_json(args.output.as_deref(), &star)
        }
    }
}

fn load(args: &ConfigArgs) -> std::result::Result<(ConfigFile, AuxiliaryFunctional, MassVector), CliError> {
    let text = match &args.input {
        Some(path) => {
            fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?
        }
        None => {
            io::read_to_string(io::stdin()).map_err(|e| CliError::Io(format!("cannot read standard input: {e}")))?
        }
    };
    let file: ConfigFile =
        serde_json::from_str(&text).map_err(|e| CliError::Io(format!("invalid configuration JSON: {e}")))?;
    let alpha = args.alpha.unwrap_or(file.alpha);
    let aux = AuxiliaryFunctional::new(alpha, args.k)?;
    let masses = MassVector::new(file.masses.clone())?;
    if let Some(a) = &file.angles {
        if a.len() != masses.len() {
            return Err(CocircularError::Dimension {
                expected: masses.len(),
                got: a.len(),
            }
            .into());
        }
    }
    Ok((file, aux, masses))
}

#[derive(Serialize)]
struct MinimizeOutput {
    alpha: f64,
    k: f64,
    masses: Vec<f64>,
    angles: Vec<f64>,
    f_value: f64,
    grad_norm: f64,
    iterations: usize,
    converged: bool,
}

#[derive(Serialize)]
struct VerifyOutput {
    alpha: f64,
    masses: Vec<f64>,
    angles: Vec<f64>,
    #[serde(flatten)]
    report: CCReport,
    planar_report: CCReport,
}

#[derive(Serialize)]
struct GroupSection {
    verdict: crate::symmetry::ExclusionVerdict,
    candidates: Vec<crate::symmetry::GroupCandidate>,
}

#[derive(Serialize)]
struct SwapSection {
    verdict: crate::symmetry::ExclusionVerdict,
    candidates: Vec<crate::symmetry::SwapCandidate>,
    inconsistent: bool,
}

#[derive(Serialize)]
struct ExcludeOutput {
    alpha: f64,
    k: f64,
    masses: Vec<f64>,
    angles: Vec<f64>,
    f_value: f64,
    /// Some test rules out a centered co-circular CC for these masses.
    excluded: bool,
    group: GroupSection,
    swap: SwapSection,
    criterion: crate::spectral::CriterionVerdict,
    cc: CCReport,
}

#[derive(Serialize)]
struct ScanOutput {
    cells: Vec<RegionCell>,
    monotonicity: crate::scanner::MonotonicityReport,
}

/// Floats as 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn cell_row(c: &RegionCell) -> Vec<String> {
    vec![
        c.n.to_string(),
        fmt_f64(c.alpha),
        fmt_f64(c.g_value),
        fmt_f64(c.threshold),
        c.holds.to_string(),
    ]
}

/// JSON formatter writing every float with 17 significant digits.
struct FixedFloatFormatter(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for FixedFloatFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            writer.write_all(fmt_f64(value).as_bytes())
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` as pretty JSON with fixed float formatting.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, FixedFloatFormatter(serde_json::ser::PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .map_err(|e| CocircularError::Domain(format!("serialization failed: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

fn emit_json<T: Serialize>(path: Option<&Path>, value: &T) -> std::result::Result<(), CliError> {
    let text = to_json_string(value)?;
    write_out(path, text.as_bytes())
}

fn emit_csv<I>(path: Option<&Path>, header: &[&str], rows: I) -> std::result::Result<(), CliError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Io(format!("csv: {e}"));
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(format!("csv: {e}")))?;
    write_out(path, &bytes)
}

fn write_out(path: Option<&Path>, bytes: &[u8]) -> std::result::Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("cannot write standard output: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_float_json() {
        let text = to_json_string(&serde_json::json!({"x": 0.1, "n": 3})).unwrap();
        assert!(text.contains("1.0000000000000001e-1"), "{text}");
        assert!(text.contains("\"n\": 3"));
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), 0.1);
    }

    #[test]
    fn config_file_angles_optional() {
        let f: ConfigFile = serde_json::from_str(r#"{"alpha": 1, "masses": [1, 2, 3]}"#).unwrap();
        assert!(f.angles.is_none());
        assert_eq!(f.masses, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn parses_flags() {
        let cfg = RunConfig::try_parse_from([
            "cocircular",
            "scan",
            "--n-min",
            "3",
            "--n-max",
            "9",
            "--alpha",
            "0.5,1",
            "--alpha",
            "2",
        ])
        .unwrap();
        match cfg.command {
            Command::Scan(a) => assert_eq!(a.alpha, vec![0.5, 1.0, 2.0]),
            other => panic!("{other:?}"),
        }
        assert!(RunConfig::try_parse_from(["cocircular", "alpha-star"]).is_err());
    }
}
