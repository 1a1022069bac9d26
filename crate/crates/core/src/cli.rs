//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::critical::assemble_critical;
use crate::curve::{PiecewiseCurve, RegionLabel};
use crate::error::{Error, Result};
use crate::export::{format_log10, number, parse_json_segments, to_csv, to_json};
use crate::full_nse::{assemble_full, classify_full};
use crate::maxest::bound_report;
use crate::params::{build_params, ModelParams, RawParams};
use crate::scaling::assemble_scaling;
use crate::subcritical::{assemble_subcritical, SubcriticalCurve};
use crate::verify::{all_pass, ln_taylor_from_samples, oracle_suite};

/// Exit code when `verify` runs but some check fails.
pub const EXIT_CHECK_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "nsbound",
    version,
    about = "Energy-enstrophy bounding curves for 3D Navier-Stokes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CurveModel {
    Critical,
    Subcritical,
    Full,
    Scaling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassifyModel {
    Full,
    Subcritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a bounding curve
    Curve {
        #[arg(value_enum)]
        model: CurveModel,
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower and upper bounds on the maximal enstrophy
    Emax {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        eta: Option<f64>,
        #[arg(long = "anchor-E0", allow_negative_numbers = true)]
        anchor_e0: Option<f64>,
    },
    /// Region label of a point (e, E)
    Classify {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        e: f64,
        #[arg(long = "E", allow_negative_numbers = true)]
        big_e: f64,
        #[arg(long, value_enum, default_value_t = ClassifyModel::Full)]
        model: ClassifyModel,
    },
    /// Run the oracle and containment checks
    Verify {
        #[arg(long)]
        params: PathBuf,
    },
    /// Taylor wavenumber of each segment of an emitted JSON curve
    Taylor {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        curve: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Reads and validates a JSON parameter file.
pub fn load_params(path: &Path) -> Result<ModelParams> {
    let raw: RawParams = serde_json::from_str(&read(path)?)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    build_params(&raw)
}

fn assemble(model: CurveModel, p: &ModelParams, n: usize) -> Result<PiecewiseCurve> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "--samples must be at least 2, got {n}"
        )));
    }
    match model {
        CurveModel::Critical => {
            if !p.is_critical() {
                return Err(Error::InvalidRegime(format!(
                    "critical curve needs r = 1/2, got r = {}",
                    p.coherence.r
                )));
            }
            assemble_critical(p, n)
        }
        CurveModel::Subcritical => assemble_subcritical(p, n),
        CurveModel::Full => assemble_full(p, p.eta, n),
        CurveModel::Scaling => assemble_scaling(p, n),
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report is serializable");
    s.push('\n');
    s
}

/// Output text and exit code of one command.
fn execute(cmd: Command) -> Result<(String, i32, Option<PathBuf>)> {
    match cmd {
        Command::Curve {
            model,
            params,
            samples,
            format,
            out,
        } => {
            let p = load_params(&params)?;
            let curve = assemble(model, &p, samples)?;
            let text = match format {
                Format::Csv => to_csv(&curve),
                Format::Json => to_json(&curve),
            };
            Ok((text, 0, out))
        }
        Command::Emax {
            params,
            eta,
            anchor_e0,
        } => {
            let p = load_params(&params)?;
            let report = bound_report(&p, eta, anchor_e0)?;
            Ok((pretty(&report.to_json()), 0, None))
        }
        Command::Classify {
            params,
            e,
            big_e,
            model,
        } => {
            let p = load_params(&params)?;
            let label: RegionLabel = match model {
                ClassifyModel::Full => classify_full(e, big_e, &p, p.eta)?,
                ClassifyModel::Subcritical => SubcriticalCurve::new(&p)?.classify(e, big_e)?,
            };
            Ok((format!("{label}\n"), 0, None))
        }
        Command::Verify { params } => {
            let p = load_params(&params)?;
            let reports = oracle_suite(&p);
            let code = if all_pass(&reports) {
                0
            } else {
                EXIT_CHECK_FAILED
            };
            Ok((pretty(&reports), code, None))
        }
        Command::Taylor { params, curve } => {
            let p = load_params(&params)?;
            let segs = parse_json_segments(&read(&curve)?)?;
            let mut rows = Vec::new();
            for s in segs.iter().filter(|s| s.tag.is_bounding()) {
                let ln_big: Vec<f64> = s
                    .log10_enstrophy
                    .iter()
                    .map(|y| y * std::f64::consts::LN_10)
                    .collect();
                let ln_k = ln_taylor_from_samples(&s.ln_e, &ln_big)?;
                let lg = ln_k / std::f64::consts::LN_10;
                rows.push(json!({
                    "segment": s.tag.as_str(),
                    "samples": s.ln_e.len(),
                    "log10_kappa_T": number(&format_log10(lg)),
                    "log10_kappa_T_over_sqrt_lambda": number(&format_log10(
                        (ln_k - 0.5 * p.domain.lambda.ln()) / std::f64::consts::LN_10
                    )),
                }));
            }
            if rows.is_empty() {
                return Err(Error::InvalidArgument(
                    "curve file has no bounding segments".into(),
                ));
            }
            Ok((pretty(&rows), 0, None))
        }
    }
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code. Results go to `stdout` or the `--out` file, diagnostics to `stderr`.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command) {
        Ok((text, code, out)) => {
            let written = match out {
                Some(path) => fs::write(&path, text.as_bytes())
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
                None => stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| Error::Io(e.to_string())),
            };
            match written {
                Ok(()) => code,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
