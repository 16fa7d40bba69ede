//! `magnon`: sweeps, single-point evaluation and reproduction checks.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::warn;

use magnon_core::config::{ConfigFile, PointConfig};
use magnon_core::measures::{input_squeezing_db, squeezing_db};
use magnon_core::model::internal_to_hz;
use magnon_core::sweep::{
    certification_violations, evaluate_point, mirror_symmetry_deviation, parse_range, preset,
    run_sweep, AxisRange, Quantity, SweepResult, SweepSpec, SYMMETRY_TOLERANCE,
};
use magnon_core::verify::verify_paper_numbers;
use magnon_core::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "magnon", version, about = "Squeezed-vacuum-driven magnon entanglement: sweeps and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a preset sweep and write the grid as CSV.
    Sweep {
        /// One of fig2a, fig2b, fig3, fig4a, fig4b, fig5a, fig5b, fig6a, fig6b, fig6c.
        #[arg(long)]
        preset: String,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Points per axis.
        #[arg(long)]
        points: Option<usize>,
        /// Axis range override, `axis=min:max` (detunings in Hz).
        #[arg(long = "range", value_name = "AXIS=MIN:MAX")]
        ranges: Vec<String>,
        /// Parameter override, `key=value`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        /// Configuration file (TOML key = value).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Evaluate every measure at a single operating point.
    Point {
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the reproduction checks and print a pass/fail table.
    Verify,
}

enum Failure {
    Usage(String),
    Numerical(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidParameter { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile, Failure> {
    match path {
        None => Ok(ConfigFile::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
            Ok(ConfigFile::parse(&text)?)
        }
    }
}

/// Layers `base < file < --set` and resolves the result.
fn layered_point(base: ConfigFile, config: Option<&Path>, sets: &[String]) -> Result<PointConfig, Failure> {
    let file = load_config(config)?;
    let mut cli = ConfigFile::default();
    for s in sets {
        cli.apply_override(s)?;
    }
    Ok(base.merged_with(&file).merged_with(&cli).resolve()?)
}

fn build_sweep(
    name: &str,
    points: Option<usize>,
    ranges: &[String],
    sets: &[String],
    config: Option<&Path>,
) -> Result<SweepSpec, Failure> {
    let mut spec = preset(name)?;
    spec.fixed = layered_point(ConfigFile::from_point(&spec.fixed), config, sets)?;
    if let Some(n) = points {
        spec = spec.with_points(n)?;
    }
    for text in ranges {
        let (axis, min, max) = parse_range(text)?;
        let count = spec
            .axis_mut(axis)
            .map(|a| a.range.count)
            .ok_or_else(|| Failure::Usage(format!("preset `{name}` does not sweep `{axis}`")))?;
        spec.axis_mut(axis).expect("checked above").range = AxisRange::new(min, max, count)?;
    }
    spec.validate()?;
    Ok(spec)
}

/// Re-reads a written grid and checks the certification chain and, for
/// detuning grids, the mirror symmetry of the logarithmic negativity.
fn post_pass(path: &Path) -> Result<(), Failure> {
    let file = File::open(path).map_err(|e| io_failure(path, e))?;
    let result = SweepResult::read_csv(file)?;
    let violations = certification_violations(&result);
    for v in &violations {
        warn!(
            "row {}: {} = {} certifies entanglement but log_negativity = {}",
            v.row + 1,
            v.criterion,
            v.value,
            v.log_negativity
        );
    }
    if let Some(dev) = mirror_symmetry_deviation(&result, Quantity::LogNegativity) {
        if dev > SYMMETRY_TOLERANCE {
            warn!("log_negativity grid deviates from mirror symmetry by {dev:.3e}");
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::Numerical(format!(
            "{} grid points violate the certification chain",
            violations.len()
        )))
    }
}

fn sweep(
    name: &str,
    out: Option<&Path>,
    points: Option<usize>,
    ranges: &[String],
    sets: &[String],
    config: Option<&Path>,
) -> Result<(), Failure> {
    let spec = build_sweep(name, points, ranges, sets, config)?;
    let result = run_sweep(&spec)?;
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| io_failure(path, e))?;
            result.write_csv(BufWriter::new(file))?;
            post_pass(path)?;
            eprintln!("wrote {} rows to {}", result.rows.len(), path.display());
        }
        None => result.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn point(sets: &[String], config: Option<&Path>) -> Result<(), Failure> {
    let point = layered_point(ConfigFile::default(), config, sets)?;
    let report = evaluate_point(&point)?;
    let mut out = io::stdout().lock();
    let p = &point.params;
    let mut line = |key: &str, value: String| writeln!(out, "{key:<20} {value}");
    let result: io::Result<()> = (|| {
        line("delta_a_hz", format!("{:.6e}", internal_to_hz(p.omega_a - p.omega_s)))?;
        line("delta_m1_hz", format!("{:.6e}", internal_to_hz(p.omega_m1 - p.omega_s)))?;
        line("delta_m2_hz", format!("{:.6e}", internal_to_hz(p.omega_m2 - p.omega_s)))?;
        line("r", format!("{}", point.drive.r()))?;
        line("theta_rad", format!("{}", point.drive.theta()))?;
        line("temperature_k", format!("{}", point.temperature))?;
        line("input_squeezing_db", format!("{:.6}", input_squeezing_db(point.drive.r())))?;
        line("stable", format!("{}", report.stability.stable))?;
        line("stability_margin", format!("{:.6e}", report.stability.margin))?;
        if let Some(m) = &report.steady {
            line("log_negativity", format!("{:.12}", m.entanglement.log_negativity))?;
            line("nu_minus", format!("{:.12}", m.entanglement.nu_minus))?;
            line("duan_sum", format!("{:.12}", m.duan_sum()))?;
            line("mancini_product", format!("{:.12}", m.mancini_product()))?;
            line("var_x1", format!("{:.12}", m.var_x1()))?;
            line("var_Mx", format!("{:.12}", m.collective.bright_x))?;
            line("var_my", format!("{:.12}", m.collective.dark_y))?;
            if let Ok(db) = squeezing_db(m.var_x1()) {
                line("squeezing_db_x1", format!("{db:.6}"))?;
            }
            if let Ok(db) = squeezing_db(m.collective.bright_x) {
                line("squeezing_db_Mx", format!("{db:.6}"))?;
            }
        }
        Ok(())
    })();
    result.map_err(|e| Failure::Usage(format!("writing output: {e}")))
}

fn verify() -> Result<(), Failure> {
    let report = verify_paper_numbers()?;
    println!("{report}");
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match &cli.command {
        Command::Sweep {
            preset,
            out,
            points,
            ranges,
            sets,
            config,
        } => sweep(preset, out.as_deref(), *points, ranges, sets, config.as_deref()),
        Command::Point { sets, config } => point(sets, config.as_deref()),
        Command::Verify => verify(),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(Failure::Verification) => ExitCode::from(EXIT_VERIFICATION),
    }
}
