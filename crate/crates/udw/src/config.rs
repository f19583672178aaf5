//! Run configuration: a flat `key = value` file overlaid by command-line
//! flags, validated into a [`RunConfig`].

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use udw_core::analysis::SweepAxis;
use udw_core::harvest::{DetectorParams, ScenarioKind, MIN_SEPARATION};

use crate::error::{CliError, Result};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const MAX_TOL: f64 = 1e-2;
pub const THREADS_ENV: &str = "UDW_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    Parallel,
    Antiparallel,
    Perpendicular,
    Thermal,
    Vacuum,
}

impl ScenarioArg {
    pub fn kind(self) -> ScenarioKind {
        match self {
            ScenarioArg::Parallel => ScenarioKind::ParallelAcc,
            ScenarioArg::Antiparallel => ScenarioKind::AntiparallelAcc,
            ScenarioArg::Perpendicular => ScenarioKind::PerpendicularAcc,
            ScenarioArg::Thermal => ScenarioKind::ThermalStatic,
            ScenarioArg::Vacuum => ScenarioKind::VacuumStatic,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ScenarioArg::Parallel => "parallel",
            ScenarioArg::Antiparallel => "antiparallel",
            ScenarioArg::Perpendicular => "perpendicular",
            ScenarioArg::Thermal => "thermal",
            ScenarioArg::Vacuum => "vacuum",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// `start:stop:step`, inclusive of `stop` up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    /// Decimal places of the written form; grid values are rounded to it so
    /// `0.1:1:0.1` yields `0.3` rather than `0.30000000000000004`.
    decimals: Option<u32>,
}

const MAX_GRID_POINTS: usize = 1_000_000;

impl Grid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        let g = Grid {
            start,
            stop,
            step,
            decimals: None,
        };
        g.check()?;
        Ok(g)
    }

    fn check(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(CliError::invalid("grid", "bounds and step must be finite"));
        }
        if !(self.step > 0.0) {
            return Err(CliError::invalid("grid", "step must be positive"));
        }
        if self.stop < self.start {
            return Err(CliError::invalid("grid", "stop is below start"));
        }
        if (self.stop - self.start) / self.step >= MAX_GRID_POINTS as f64 {
            return Err(CliError::invalid("grid", "more than a million points"));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step * (1.0 + 1e-12) + 1e-9).floor() as usize;
        let round = |v: f64| match self.decimals {
            Some(d) if d <= 15 => {
                let s = 10f64.powi(d as i32);
                (v * s).round() / s
            }
            _ => v,
        };
        (0..=n)
            .map(|k| round(self.start + k as f64 * self.step))
            .collect()
    }
}

fn decimals(s: &str) -> Option<u32> {
    let s = s.trim();
    if s.contains(['e', 'E']) {
        return None;
    }
    Some(s.split_once('.').map_or(0, |(_, f)| f.len() as u32))
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts[..] else {
            return Err(format!("expected start:stop:step, got '{s}'"));
        };
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("'{p}' is not a number"))
        };
        let mut g = Grid::new(num(a)?, num(b)?, num(c)?).map_err(|e| match e {
            CliError::Invalid { msg, .. } => msg,
            e => e.to_string(),
        })?;
        g.decimals = match (decimals(a), decimals(c)) {
            (Some(x), Some(y)) => Some(x.max(y)),
            _ => None,
        };
        Ok(g)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

/// Every setting that may come from the file or the flags. `None` means not
/// given at that layer.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub scenario: Option<ScenarioArg>,
    pub gap: Option<f64>,
    pub coupling: Option<f64>,
    pub rate: Option<f64>,
    pub sep: Option<f64>,
    pub grid: Option<Grid>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub tol: Option<f64>,
    pub threads: Option<usize>,
}

impl Settings {
    /// `over` wins wherever it has a value.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            scenario: over.scenario.or(self.scenario),
            gap: over.gap.or(self.gap),
            coupling: over.coupling.or(self.coupling),
            rate: over.rate.or(self.rate),
            sep: over.sep.or(self.sep),
            grid: over.grid.or(self.grid),
            out: over.out.or(self.out),
            format: over.format.or(self.format),
            tol: over.tol.or(self.tol),
            threads: over.threads.or(self.threads),
        }
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: FromStr>(v: &str) -> Result<T, String> {
            v.parse()
                .map_err(|_| format!("'{v}' is not a valid number"))
        }
        fn choice<T: ValueEnum>(v: &str) -> Result<T, String> {
            T::from_str(v, true).map_err(|_| format!("unknown value '{v}'"))
        }
        match key {
            "scenario" => self.scenario = Some(choice(value)?),
            "gap" => self.gap = Some(num(value)?),
            "coupling" | "lambda" => self.coupling = Some(num(value)?),
            "rate" => self.rate = Some(num(value)?),
            "sep" => self.sep = Some(num(value)?),
            "grid" => self.grid = Some(value.parse()?),
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = Some(choice(value)?),
            "tol" | "quad_tol" => self.tol = Some(num(value)?),
            "threads" => self.threads = Some(num(value)?),
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }
}

/// Parses `key = value` lines. `#` starts a comment; blank lines are skipped;
/// a key given twice keeps the last value.
pub fn parse_config(text: &str, path: &Path) -> Result<Settings> {
    let mut s = Settings::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split_once('#').map_or(raw, |(l, _)| l).trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| CliError::Config {
            path: path.to_path_buf(),
            line: i + 1,
            msg,
        };
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(format!("expected 'key = value', got '{line}'")));
        };
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(err(format!("no value for '{key}'")));
        }
        s.set(key, value).map_err(err)?;
    }
    Ok(s)
}

pub fn load_config(path: &Path) -> Result<Settings> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text, path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Point,
    Sweep,
    Figure(u8),
    Lmax,
    Lcrit,
}

/// A validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub det: DetectorParams,
    pub scenario: ScenarioArg,
    /// `aσ`, or `2πTσ` for the thermal bath.
    pub rate: Option<f64>,
    pub sep: Option<f64>,
    pub grid: Option<Vec<f64>>,
    /// Axis the grid runs along, for `sweep`.
    pub axis: Option<SweepAxis>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: usize,
    pub quad_tol: f64,
}

fn positive(field: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::invalid(
            field,
            format!("{v} must be positive and finite"),
        ))
    }
}

fn separation(field: &'static str, v: f64) -> Result<f64> {
    if v >= MIN_SEPARATION && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::invalid(
            field,
            format!("separation {v} must be finite and at least {MIN_SEPARATION}"),
        ))
    }
}

impl RunConfig {
    /// Applies defaults and checks every dimensionless group. `env_threads`
    /// is the value of [`THREADS_ENV`], used when no thread count was given.
    pub fn resolve(command: Command, s: Settings, env_threads: Option<&str>) -> Result<Self> {
        let gap = s.gap.unwrap_or(1.0);
        if !(gap >= 0.0 && gap.is_finite()) {
            return Err(CliError::invalid(
                "gap",
                format!("{gap} must be finite and non-negative"),
            ));
        }
        let coupling = positive("coupling", s.coupling.unwrap_or(1.0))?;
        let det = DetectorParams::new(gap, coupling)?;
        let quad_tol = s.tol.unwrap_or(DEFAULT_TOL);
        if !(quad_tol > 0.0 && quad_tol <= MAX_TOL) {
            return Err(CliError::invalid(
                "tol",
                format!("{quad_tol} is outside (0, {MAX_TOL}]"),
            ));
        }
        let threads = match (s.threads, env_threads) {
            (Some(n), _) => n,
            (None, Some(v)) => v.trim().parse().map_err(|_| {
                CliError::invalid("threads", format!("{THREADS_ENV}='{v}' is not a count"))
            })?,
            (None, None) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        if threads == 0 {
            return Err(CliError::invalid("threads", "must be at least 1"));
        }
        let scenario = s.scenario.unwrap_or(ScenarioArg::Parallel);
        let needs_rate = scenario != ScenarioArg::Vacuum;
        let rate = s.rate.map(|r| positive("rate", r)).transpose()?;
        let sep = s.sep.map(|l| separation("sep", l)).transpose()?;
        let grid = s.grid.as_ref().map(Grid::values);

        let mut axis = None;
        match command {
            Command::Point => {
                if sep.is_none() {
                    return Err(CliError::invalid("sep", "point needs --sep"));
                }
                if needs_rate && rate.is_none() {
                    return Err(CliError::invalid(
                        "rate",
                        "point needs --rate for this scenario",
                    ));
                }
            }
            Command::Sweep => {
                let Some(values) = &grid else {
                    return Err(CliError::invalid("grid", "sweep needs --grid"));
                };
                let a = match (rate.is_some(), sep.is_some()) {
                    (_, false) if !needs_rate || rate.is_some() => SweepAxis::Separation,
                    (false, true) if needs_rate => SweepAxis::Rate,
                    (true, true) => {
                        return Err(CliError::invalid(
                            "grid",
                            "give one of --rate and --sep; the grid runs along the other",
                        ))
                    }
                    _ => {
                        return Err(CliError::invalid(
                            "grid",
                            "give --rate to sweep separation or --sep to sweep rate",
                        ))
                    }
                };
                for &v in values {
                    match a {
                        SweepAxis::Separation => separation("grid", v)?,
                        SweepAxis::Rate => positive("grid", v)?,
                    };
                }
                axis = Some(a);
            }
            Command::Figure(id) => {
                if !(1..=5).contains(&id) {
                    return Err(CliError::invalid("figure", format!("{id} is not in 1..5")));
                }
                if let Some(values) = &grid {
                    for &v in values {
                        positive("grid", v)?;
                        if id == 1 {
                            separation("grid", v)?;
                        }
                    }
                }
            }
            Command::Lmax | Command::Lcrit => {
                let needs = command == Command::Lcrit || needs_rate;
                if needs && rate.is_none() && grid.is_none() {
                    return Err(CliError::invalid("rate", "give --rate or a rate --grid"));
                }
                if let Some(values) = &grid {
                    for &v in values {
                        positive("grid", v)?;
                    }
                }
            }
        }
        Ok(RunConfig {
            command,
            det,
            scenario,
            rate,
            sep,
            grid,
            axis,
            out: s.out,
            format: s.format.unwrap_or_default(),
            threads,
            quad_tol,
        })
    }

    /// Rate in the core convention: `Tσ = rate/2π` for the thermal bath, 0
    /// for the static vacuum.
    pub fn core_rate(&self, rate: f64) -> f64 {
        core_rate(self.scenario.kind(), rate)
    }
}

pub fn core_rate(kind: ScenarioKind, rate: f64) -> f64 {
    match kind {
        ScenarioKind::ThermalStatic => rate / (2.0 * std::f64::consts::PI),
        ScenarioKind::VacuumStatic => 0.0,
        _ => rate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(command: Command, s: Settings) -> Result<RunConfig> {
        RunConfig::resolve(command, s, None)
    }

    #[test]
    fn grid_parsing() {
        let g: Grid = "0.1:1:0.1".parse().unwrap();
        let v = g.values();
        assert_eq!(v.len(), 10);
        assert_eq!(v[2], 0.3);
        assert_eq!(*v.last().unwrap(), 1.0);
        assert_eq!(
            "0:2:0.5".parse::<Grid>().unwrap().values(),
            [0.0, 0.5, 1.0, 1.5, 2.0]
        );
        assert_eq!("1:1:1".parse::<Grid>().unwrap().values(), [1.0]);
        assert!("1:0:0.1".parse::<Grid>().is_err());
        assert!("0:1:0".parse::<Grid>().is_err());
        assert!("0:1".parse::<Grid>().is_err());
        assert!("0:x:1".parse::<Grid>().is_err());
    }

    #[test]
    fn file_syntax() {
        let text = "# comment\n\ngap = 2.0   # trailing\nscenario=Thermal\ngrid = 0.5:2:0.5\n";
        let s = parse_config(text, Path::new("run.cfg")).unwrap();
        assert_eq!(s.gap, Some(2.0));
        assert_eq!(s.scenario, Some(ScenarioArg::Thermal));
        assert_eq!(s.grid.unwrap().values().len(), 4);
    }

    #[test]
    fn file_errors_carry_line_numbers() {
        for (text, line) in [
            ("gap = 1\nrate 2\n", 2),
            ("\n\n\nbogus = 1\n", 4),
            ("gap = abc\n", 1),
            ("sep =\n", 1),
            ("scenario = circular\n", 1),
        ] {
            match parse_config(text, Path::new("c")) {
                Err(CliError::Config { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn flags_override_file() {
        let file = Settings {
            gap: Some(2.0),
            sep: Some(1.0),
            threads: Some(3),
            ..Settings::default()
        };
        let flags = Settings {
            gap: Some(0.5),
            ..Settings::default()
        };
        let s = file.overlay(flags);
        assert_eq!((s.gap, s.sep, s.threads), (Some(0.5), Some(1.0), Some(3)));
    }

    #[test]
    fn defaults() {
        let c = resolve(
            Command::Point,
            Settings {
                scenario: Some(ScenarioArg::Vacuum),
                sep: Some(1.0),
                ..Settings::default()
            },
        )
        .unwrap();
        assert_eq!(c.det, DetectorParams::default());
        assert_eq!(c.quad_tol, 1e-6);
        assert_eq!(c.format, Format::Csv);
        assert!(c.threads >= 1);
    }

    #[test]
    fn threads_fall_back_to_the_environment() {
        let s = Settings {
            scenario: Some(ScenarioArg::Vacuum),
            sep: Some(1.0),
            ..Settings::default()
        };
        let c = RunConfig::resolve(Command::Point, s.clone(), Some("3")).unwrap();
        assert_eq!(c.threads, 3);
        let flag = Settings {
            threads: Some(2),
            ..s.clone()
        };
        assert_eq!(
            RunConfig::resolve(Command::Point, flag, Some("3"))
                .unwrap()
                .threads,
            2
        );
        let e = RunConfig::resolve(Command::Point, s, Some("many")).unwrap_err();
        assert!(matches!(
            e,
            CliError::Invalid {
                field: "threads",
                ..
            }
        ));
    }

    fn field_of(e: CliError) -> &'static str {
        match e {
            CliError::Invalid { field, .. } => field,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn validation_names_the_field() {
        let base = Settings {
            rate: Some(1.0),
            sep: Some(1.0),
            ..Settings::default()
        };
        let cases: [(Command, Settings, &str); 9] = [
            (
                Command::Point,
                Settings {
                    gap: Some(-1.0),
                    ..base.clone()
                },
                "gap",
            ),
            (
                Command::Point,
                Settings {
                    gap: Some(f64::NAN),
                    ..base.clone()
                },
                "gap",
            ),
            (
                Command::Point,
                Settings {
                    sep: Some(0.0),
                    ..base.clone()
                },
                "sep",
            ),
            (
                Command::Point,
                Settings {
                    rate: Some(-2.0),
                    ..base.clone()
                },
                "rate",
            ),
            (
                Command::Point,
                Settings {
                    tol: Some(0.5),
                    ..base.clone()
                },
                "tol",
            ),
            (
                Command::Point,
                Settings {
                    threads: Some(0),
                    ..base.clone()
                },
                "threads",
            ),
            (
                Command::Point,
                Settings {
                    coupling: Some(0.0),
                    ..base.clone()
                },
                "coupling",
            ),
            (Command::Sweep, base.clone(), "grid"),
            (Command::Figure(6), base.clone(), "figure"),
        ];
        for (cmd, s, field) in cases {
            assert_eq!(field_of(resolve(cmd, s).unwrap_err()), field);
        }
        let no_rate = Settings {
            rate: None,
            ..base.clone()
        };
        assert_eq!(
            field_of(resolve(Command::Point, no_rate).unwrap_err()),
            "rate"
        );
    }

    #[test]
    fn sweep_axis_follows_the_missing_parameter() {
        let grid = Some("0.5:1.5:0.5".parse::<Grid>().unwrap());
        let along_l = Settings {
            rate: Some(1.0),
            grid: grid.clone(),
            ..Settings::default()
        };
        assert_eq!(
            resolve(Command::Sweep, along_l).unwrap().axis,
            Some(SweepAxis::Separation)
        );
        let along_a = Settings {
            sep: Some(1.0),
            grid: grid.clone(),
            ..Settings::default()
        };
        assert_eq!(
            resolve(Command::Sweep, along_a).unwrap().axis,
            Some(SweepAxis::Rate)
        );
        let vacuum = Settings {
            scenario: Some(ScenarioArg::Vacuum),
            grid: grid.clone(),
            ..Settings::default()
        };
        assert_eq!(
            resolve(Command::Sweep, vacuum).unwrap().axis,
            Some(SweepAxis::Separation)
        );
        let zero_l = Settings {
            rate: Some(1.0),
            grid: Some("0:1:0.5".parse().unwrap()),
            ..Settings::default()
        };
        assert_eq!(
            field_of(resolve(Command::Sweep, zero_l).unwrap_err()),
            "grid"
        );
    }

    #[test]
    fn thermal_rate_is_the_unruh_temperature() {
        let c = resolve(
            Command::Point,
            Settings {
                scenario: Some(ScenarioArg::Thermal),
                rate: Some(2.0 * std::f64::consts::PI),
                sep: Some(1.0),
                ..Settings::default()
            },
        )
        .unwrap();
        assert_eq!(c.core_rate(c.rate.unwrap()), 1.0);
    }
}
