//! Parameter sweeps over one or two axes and their CSV representation.

use std::f64::consts::TAU;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::config::{parse_number, PointConfig};
use crate::dynamics::{build_diffusion, build_drift, stability_check, StabilityReport};
use crate::error::{Error, Result};
use crate::measures::{
    collective_variances, log_negativity, reduce_to_magnons, squeezing_db, CollectiveVariances,
    EntanglementResult, DUAN_BOUND, MANCINI_BOUND,
};
use crate::model::{defaults, detunings_from, hz_to_internal, DriveParams, Environment};
use crate::steadystate::{solve_lyapunov, CovarianceMatrix};

/// Points per axis used by the presets.
pub const DEFAULT_POINTS: usize = 101;

/// Half-width of the preset detuning axes, 3κ_a/2π [Hz].
pub const DEFAULT_DETUNING_SPAN_HZ: f64 = 3.0 * defaults::KAPPA_A_HZ;

/// Tolerance of the mirror-symmetry check on detuning grids.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

pub const PRESET_NAMES: [&str; 10] = [
    "fig2a", "fig2b", "fig3", "fig4a", "fig4b", "fig5a", "fig5b", "fig6a", "fig6b", "fig6c",
];

/// A swept parameter.
///
/// Detuning axes take ν = Δ/2π in Hz and move the mode frequency relative to
/// the drive; `delta_m` moves both magnons together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    DeltaA,
    DeltaM,
    R,
    Theta,
    Temperature,
}

impl Axis {
    pub const ALL: [Axis; 5] = [Axis::DeltaA, Axis::DeltaM, Axis::R, Axis::Theta, Axis::Temperature];

    pub fn name(self) -> &'static str {
        match self {
            Axis::DeltaA => "delta_a",
            Axis::DeltaM => "delta_m",
            Axis::R => "r",
            Axis::Theta => "theta",
            Axis::Temperature => "temperature",
        }
    }

    fn check_value(self, value: f64) -> Result<()> {
        let ok = match self {
            Axis::R | Axis::Temperature => value >= 0.0,
            _ => true,
        };
        if ok && value.is_finite() {
            Ok(())
        } else {
            Err(Error::Config(format!("axis `{self}` cannot take the value {value}")))
        }
    }

    fn apply(self, point: &mut PointConfig, value: f64) -> Result<()> {
        match self {
            Axis::DeltaA => point.params.omega_a = point.params.omega_s + hz_to_internal(value),
            Axis::DeltaM => {
                let omega_m = point.params.omega_s + hz_to_internal(value);
                point.params.omega_m1 = omega_m;
                point.params.omega_m2 = omega_m;
            }
            Axis::R => point.drive = DriveParams::new(value, point.drive.theta())?,
            Axis::Theta => point.drive = DriveParams::new(point.drive.r(), value)?,
            Axis::Temperature => point.temperature = value,
        }
        Ok(())
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Axis::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            let known: Vec<_> = Axis::ALL.iter().map(|a| a.name()).collect();
            Error::Config(format!("unknown axis `{s}` (expected one of: {})", known.join(", ")))
        })
    }
}

/// `count` evenly spaced values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisRange {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        let range = Self { min, max, count };
        range.validate()?;
        Ok(range)
    }

    fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::Config("range bounds must be finite".into()));
        }
        if self.min >= self.max {
            return Err(Error::Config(format!(
                "range needs min < max, got {}:{}",
                self.min, self.max
            )));
        }
        if self.count < 2 {
            return Err(Error::Config(format!("range needs at least 2 points, got {}", self.count)));
        }
        Ok(())
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
        }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.value(i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepAxis {
    pub axis: Axis,
    pub range: AxisRange,
}

/// Parses `axis=min:max` as given to `--range`.
pub fn parse_range(text: &str) -> Result<(Axis, f64, f64)> {
    let (name, bounds) = text
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("expected axis=min:max, got `{text}`")))?;
    let axis: Axis = name.trim().parse()?;
    let (lo, hi) = bounds
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("expected min:max, got `{bounds}`")))?;
    let (lo, hi) = (parse_number(lo.trim())?, parse_number(hi.trim())?);
    if lo >= hi {
        return Err(Error::Config(format!("range needs min < max, got {lo}:{hi}")));
    }
    Ok((axis, lo, hi))
}

/// A quantity that can be requested as a sweep output column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    LogNegativity,
    DuanSum,
    ManciniProduct,
    VarX1,
    VarMx,
    VarMy,
    SqueezingDbX1,
    SqueezingDbMx,
}

impl Quantity {
    pub const ALL: [Quantity; 8] = [
        Quantity::LogNegativity,
        Quantity::DuanSum,
        Quantity::ManciniProduct,
        Quantity::VarX1,
        Quantity::VarMx,
        Quantity::VarMy,
        Quantity::SqueezingDbX1,
        Quantity::SqueezingDbMx,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::LogNegativity => "log_negativity",
            Quantity::DuanSum => "duan_sum",
            Quantity::ManciniProduct => "mancini_product",
            Quantity::VarX1 => "var_x1",
            Quantity::VarMx => "var_Mx",
            Quantity::VarMy => "var_my",
            Quantity::SqueezingDbX1 => "squeezing_db_x1",
            Quantity::SqueezingDbMx => "squeezing_db_Mx",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown output quantity `{s}`")))
    }
}

/// Everything computed at one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointReport {
    pub stability: StabilityReport,
    /// `None` when the drift matrix is unstable.
    pub steady: Option<SteadyMeasures>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyMeasures {
    pub covariance: CovarianceMatrix,
    pub entanglement: EntanglementResult,
    pub collective: CollectiveVariances,
}

impl SteadyMeasures {
    pub fn var_x1(&self) -> f64 {
        self.covariance.get(2, 2)
    }

    pub fn duan_sum(&self) -> f64 {
        self.collective.bright_x + self.collective.dark_y
    }

    pub fn mancini_product(&self) -> f64 {
        self.collective.bright_x * self.collective.dark_y
    }

    pub fn quantity(&self, q: Quantity) -> Result<f64> {
        Ok(match q {
            Quantity::LogNegativity => self.entanglement.log_negativity,
            Quantity::DuanSum => self.duan_sum(),
            Quantity::ManciniProduct => self.mancini_product(),
            Quantity::VarX1 => self.var_x1(),
            Quantity::VarMx => self.collective.bright_x,
            Quantity::VarMy => self.collective.dark_y,
            Quantity::SqueezingDbX1 => squeezing_db(self.var_x1())?,
            Quantity::SqueezingDbMx => squeezing_db(self.collective.bright_x)?,
        })
    }
}

/// Drift, diffusion, stability check, Lyapunov solve and all measures at one point.
///
/// Parameters are not re-validated here: a point built by hand with gain
/// (`κ < 0`) reports an unstable drift instead of failing.
pub fn evaluate_point(point: &PointConfig) -> Result<PointReport> {
    let env: Environment = point.environment()?;
    let a = build_drift(&detunings_from(&point.params), &point.params);
    let stability = stability_check(&a)?;
    if !stability.stable {
        return Ok(PointReport {
            stability,
            steady: None,
        });
    }
    let d = build_diffusion(&point.params, &point.drive, &env);
    let covariance = solve_lyapunov(&a, &d)?;
    let entanglement = log_negativity(&reduce_to_magnons(&covariance))?;
    let collective = collective_variances(&covariance);
    Ok(PointReport {
        stability,
        steady: Some(SteadyMeasures {
            covariance,
            entanglement,
            collective,
        }),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis1: SweepAxis,
    /// One-dimensional sweeps leave this empty.
    pub axis2: Option<SweepAxis>,
    pub fixed: PointConfig,
    pub outputs: Vec<Quantity>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.axis1.range.validate()?;
        if let Some(axis2) = &self.axis2 {
            axis2.range.validate()?;
            if axis2.axis == self.axis1.axis {
                return Err(Error::Config(format!("both axes are `{}`", self.axis1.axis)));
            }
        }
        for axis in self.axes() {
            axis.axis.check_value(axis.range.min)?;
            axis.axis.check_value(axis.range.max)?;
        }
        if self.outputs.is_empty() {
            return Err(Error::Config("no output quantities requested".into()));
        }
        Ok(())
    }

    fn axes(&self) -> impl Iterator<Item = &SweepAxis> {
        std::iter::once(&self.axis1).chain(self.axis2.iter())
    }

    pub fn axis_mut(&mut self, axis: Axis) -> Option<&mut SweepAxis> {
        if self.axis1.axis == axis {
            Some(&mut self.axis1)
        } else {
            self.axis2.as_mut().filter(|a| a.axis == axis)
        }
    }

    /// Sets the number of points on every axis; a `θ` axis keeps excluding 2π.
    pub fn with_points(mut self, points: usize) -> Result<Self> {
        for axis in [Some(&mut self.axis1), self.axis2.as_mut()].into_iter().flatten() {
            axis.range = if axis.axis == Axis::Theta && axis.range.min == 0.0 {
                theta_range(points)
            } else {
                AxisRange { count: points, ..axis.range }
            };
            axis.range.validate()?;
        }
        Ok(self)
    }

    pub fn row_count(&self) -> usize {
        self.axis1.range.count * self.axis2.map_or(1, |a| a.range.count)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis1_value: f64,
    pub axis2_value: Option<f64>,
    pub stable: bool,
    /// One entry per output; `None` for unstable points.
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis1: Axis,
    pub axis2: Option<Axis>,
    pub outputs: Vec<Quantity>,
    /// Ordered axis1-major, then axis2.
    pub rows: Vec<SweepRow>,
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let n2 = spec.axis2.map_or(1, |a| a.range.count);
    let rows = (0..spec.row_count())
        .into_par_iter()
        .map(|idx| {
            let v1 = spec.axis1.range.value(idx / n2);
            let v2 = spec.axis2.map(|a| a.range.value(idx % n2));
            let mut point = spec.fixed;
            spec.axis1.axis.apply(&mut point, v1)?;
            if let (Some(axis2), Some(v2)) = (spec.axis2, v2) {
                axis2.axis.apply(&mut point, v2)?;
            }
            let report = evaluate_point(&point)?;
            let values = match &report.steady {
                Some(m) => spec
                    .outputs
                    .iter()
                    .map(|&q| m.quantity(q).map(Some))
                    .collect::<Result<Vec<_>>>()?,
                None => vec![None; spec.outputs.len()],
            };
            Ok(SweepRow {
                axis1_value: v1,
                axis2_value: v2,
                stable: report.stability.stable,
                values,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        axis1: spec.axis1.axis,
        axis2: spec.axis2.map(|a| a.axis),
        outputs: spec.outputs.clone(),
        rows,
    })
}

fn detuning_range(points: usize) -> AxisRange {
    AxisRange {
        min: -DEFAULT_DETUNING_SPAN_HZ,
        max: DEFAULT_DETUNING_SPAN_HZ,
        count: points,
    }
}

/// `θ ∈ [0, 2π)`: the last point stops one step short of 2π.
fn theta_range(points: usize) -> AxisRange {
    AxisRange {
        min: 0.0,
        max: TAU * (points.max(2) - 1) as f64 / points.max(2) as f64,
        count: points,
    }
}

fn r_range(points: usize) -> AxisRange {
    AxisRange {
        min: 0.0,
        max: 3.0,
        count: points,
    }
}

fn temperature_range(points: usize) -> AxisRange {
    AxisRange {
        min: 0.0,
        max: 0.5,
        count: points,
    }
}

/// Sweep configuration reproducing one of the reference figures.
pub fn preset(name: &str) -> Result<SweepSpec> {
    let n = DEFAULT_POINTS;
    let at = |r: f64| PointConfig {
        drive: DriveParams::new(r, 0.0).expect("non-negative r"),
        ..PointConfig::default()
    };
    let detuning_grid = |outputs: Vec<Quantity>, r: f64| SweepSpec {
        axis1: SweepAxis {
            axis: Axis::DeltaA,
            range: detuning_range(n),
        },
        axis2: Some(SweepAxis {
            axis: Axis::DeltaM,
            range: detuning_range(n),
        }),
        fixed: at(r),
        outputs,
    };
    let r_temperature = |outputs: Vec<Quantity>| SweepSpec {
        axis1: SweepAxis {
            axis: Axis::R,
            range: r_range(n),
        },
        axis2: Some(SweepAxis {
            axis: Axis::Temperature,
            range: temperature_range(n),
        }),
        fixed: at(2.0),
        outputs,
    };
    let entanglement = vec![Quantity::LogNegativity, Quantity::DuanSum, Quantity::ManciniProduct];
    let spec = match name {
        "fig2a" => detuning_grid(entanglement, 1.0),
        "fig2b" => detuning_grid(entanglement, 2.0),
        "fig3" => SweepSpec {
            axis1: SweepAxis {
                axis: Axis::Temperature,
                range: temperature_range(n),
            },
            axis2: None,
            fixed: at(2.0),
            outputs: entanglement,
        },
        "fig4a" => detuning_grid(
            vec![
                Quantity::DuanSum,
                Quantity::ManciniProduct,
                Quantity::VarMx,
                Quantity::VarMy,
                Quantity::LogNegativity,
            ],
            2.0,
        ),
        "fig4b" => SweepSpec {
            axis1: SweepAxis {
                axis: Axis::DeltaA,
                range: detuning_range(n),
            },
            axis2: Some(SweepAxis {
                axis: Axis::R,
                range: r_range(n),
            }),
            fixed: at(2.0),
            outputs: vec![Quantity::VarMx, Quantity::SqueezingDbMx],
        },
        "fig5a" => detuning_grid(vec![Quantity::VarX1, Quantity::SqueezingDbX1], 2.0),
        "fig5b" => SweepSpec {
            axis1: SweepAxis {
                axis: Axis::R,
                range: r_range(n),
            },
            axis2: Some(SweepAxis {
                axis: Axis::Theta,
                range: theta_range(n),
            }),
            fixed: at(2.0),
            outputs: vec![Quantity::VarX1, Quantity::SqueezingDbX1],
        },
        "fig6a" => r_temperature(vec![Quantity::VarX1, Quantity::SqueezingDbX1]),
        "fig6b" => single_sample_mode(&r_temperature(vec![
            Quantity::VarX1,
            Quantity::SqueezingDbX1,
        ])),
        "fig6c" => r_temperature(vec![Quantity::VarMx, Quantity::SqueezingDbMx]),
        other => {
            return Err(Error::Config(format!(
                "unknown preset `{other}` (available: {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(spec)
}

/// Decouples the second magnon (`g₂ = 0`); its bath stays attached.
pub fn single_sample_mode(spec: &SweepSpec) -> SweepSpec {
    let mut out = spec.clone();
    out.fixed.params.g2 = 0.0;
    out
}

fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

const STABLE: &str = "stable";
const UNSTABLE: &str = "unstable";

impl SweepResult {
    pub fn header(&self) -> Vec<&'static str> {
        let mut header = vec![self.axis1.name()];
        header.extend(self.axis2.map(Axis::name));
        header.extend(self.outputs.iter().map(|q| q.name()));
        header.push("stable");
        header
    }

    /// Writes the grid as CSV: header row, 17 significant digits, `\n` line ends.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let io = |e: csv::Error| Error::Config(format!("writing CSV: {e}"));
        writer.write_record(self.header()).map_err(io)?;
        for row in &self.rows {
            let mut record = vec![format_value(row.axis1_value)];
            record.extend(row.axis2_value.map(format_value));
            record.extend(row.values.iter().map(|v| v.map(format_value).unwrap_or_default()));
            record.push(if row.stable { STABLE } else { UNSTABLE }.to_string());
            writer.write_record(&record).map_err(io)?;
        }
        writer.flush().map_err(|e| Error::Config(format!("writing CSV: {e}")))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Config(e.to_string()))
    }

    /// Parses a CSV grid produced by [`SweepResult::write_csv`].
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let bad = |msg: String| Error::Config(format!("reading CSV: {msg}"));
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
        let columns: Vec<&str> = header.iter().collect();
        if columns.len() < 3 || columns.last() != Some(&"stable") {
            return Err(bad("header must be axis columns, outputs, then `stable`".into()));
        }
        let axis1: Axis = columns[0].parse()?;
        let axis2 = columns[1].parse::<Axis>().ok();
        let first_output = if axis2.is_some() { 2 } else { 1 };
        let outputs = columns[first_output..columns.len() - 1]
            .iter()
            .map(|c| c.parse::<Quantity>())
            .collect::<Result<Vec<_>>>()?;
        if outputs.is_empty() {
            return Err(bad("no output columns".into()));
        }

        let parse = |s: &str| -> Result<f64> {
            let v: f64 = s.parse().map_err(|_| bad(format!("`{s}` is not a number")))?;
            if v.is_nan() {
                Err(bad("NaN cell".into()))
            } else {
                Ok(v)
            }
        };
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| bad(e.to_string()))?;
            if record.len() != columns.len() {
                return Err(bad(format!("row has {} cells, expected {}", record.len(), columns.len())));
            }
            let stable = match &record[columns.len() - 1] {
                STABLE => true,
                UNSTABLE => false,
                other => return Err(bad(format!("invalid stability flag `{other}`"))),
            };
            let values = (first_output..columns.len() - 1)
                .map(|i| match &record[i] {
                    "" if !stable => Ok(None),
                    "" => Err(bad("empty cell in a stable row".into())),
                    _ if !stable => Err(bad("unstable row carries a value".into())),
                    s => parse(s).map(Some),
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(SweepRow {
                axis1_value: parse(&record[0])?,
                axis2_value: axis2.map(|_| parse(&record[1])).transpose()?,
                stable,
                values,
            });
        }
        Ok(Self {
            axis1,
            axis2,
            outputs,
            rows,
        })
    }

    pub fn column(&self, q: Quantity) -> Option<usize> {
        self.outputs.iter().position(|&o| o == q)
    }
}

/// A grid point where a separability bound is violated but the logarithmic
/// negativity vanishes, which contradicts the criterion being sufficient.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainViolation {
    pub row: usize,
    pub criterion: Quantity,
    pub value: f64,
    pub log_negativity: f64,
}

/// Checks `duan_sum < 1 ⇒ E > 0` and `mancini_product < ¼ ⇒ E > 0` on every
/// stable row that carries the relevant columns.
pub fn certification_violations(result: &SweepResult) -> Vec<ChainViolation> {
    let Some(e_col) = result.column(Quantity::LogNegativity) else {
        return Vec::new();
    };
    let criteria: Vec<(usize, Quantity, f64)> = [
        (Quantity::DuanSum, DUAN_BOUND),
        (Quantity::ManciniProduct, MANCINI_BOUND),
    ]
    .into_iter()
    .filter_map(|(q, bound)| result.column(q).map(|c| (c, q, bound)))
    .collect();

    let mut violations = Vec::new();
    for (i, row) in result.rows.iter().enumerate().filter(|(_, r)| r.stable) {
        let Some(e) = row.values[e_col] else { continue };
        for &(col, q, bound) in &criteria {
            if let Some(value) = row.values[col] {
                if value < bound && (e.is_nan() || e <= 0.0) {
                    violations.push(ChainViolation {
                        row: i,
                        criterion: q,
                        value,
                        log_negativity: e,
                    });
                }
            }
        }
    }
    violations
}

/// Largest deviation of `q` under `(x, y) → (−x, −y)` on a grid whose two
/// axes are both detunings with mirror-symmetric ranges; `None` otherwise.
pub fn mirror_symmetry_deviation(result: &SweepResult, q: Quantity) -> Option<f64> {
    let col = result.column(q)?;
    let detuning = |a: Axis| matches!(a, Axis::DeltaA | Axis::DeltaM);
    if !detuning(result.axis1) || !result.axis2.is_some_and(detuning) {
        return None;
    }
    let n = result.rows.len();
    let mut worst: f64 = 0.0;
    for (i, row) in result.rows.iter().enumerate() {
        let mirror = &result.rows[n - 1 - i];
        if row.axis1_value != -mirror.axis1_value || row.axis2_value.map(|v| -v) != mirror.axis2_value {
            return None;
        }
        if let (Some(a), Some(b)) = (row.values[col], mirror.values[col]) {
            worst = worst.max((a - b).abs());
        }
    }
    Some(worst)
}
