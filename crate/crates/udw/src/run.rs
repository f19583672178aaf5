//! The `point`, `sweep`, `lmax` and `lcrit` commands.

use std::path::PathBuf;

use rayon::prelude::*;
use udw_core::analysis::{
    find_l_crit_with, find_l_max_with, outcome_at, sweep_point, RootResult, SweepAxis, SweepRow,
    SweepSpec,
};
use udw_core::harvest::{EvalOptions, ScenarioKind};

use crate::config::{core_rate, Command, RunConfig};
use crate::error::{CliError, Result};
use crate::figures;
use crate::output::Table;

/// Where a rendered output goes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub dest: Destination,
    pub contents: String,
}

impl Artifact {
    pub fn write(&self) -> Result<()> {
        match &self.dest {
            Destination::Stdout => {
                use std::io::Write;
                let mut out = std::io::stdout().lock();
                out.write_all(self.contents.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| CliError::io("<stdout>", e))
            }
            Destination::File(p) => crate::output::write_file(p, &self.contents),
        }
    }
}

pub fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {threads} threads: {e}")))
}

/// `f` over `items` on `pool`, results in input order.
pub fn par_map<T: Sync, R: Send>(
    pool: &rayon::ThreadPool,
    items: &[T],
    f: impl Fn(&T) -> R + Sync + Send,
) -> Vec<R> {
    pool.install(|| items.par_iter().map(f).collect())
}

/// Computes every output of `cfg` without touching the filesystem, so a
/// failing run leaves nothing behind.
pub fn execute(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let pool = thread_pool(cfg.threads)?;
    let table = match cfg.command {
        Command::Point => run_point(cfg)?,
        Command::Sweep => run_sweep(cfg, &pool)?,
        Command::Lmax => run_lmax(cfg, &pool)?,
        Command::Lcrit => run_lcrit(cfg, &pool)?,
        Command::Figure(id) => return figures::run_figure(id, cfg, &pool),
    };
    let dest = cfg
        .out
        .clone()
        .map_or(Destination::Stdout, Destination::File);
    Ok(vec![Artifact {
        dest,
        contents: table.render(cfg.format),
    }])
}

fn opts(cfg: &RunConfig) -> EvalOptions {
    EvalOptions {
        rel_tol: cfg.quad_tol,
    }
}

/// Stamps the run parameters every command shares onto `t`.
fn described(t: Table, cfg: &RunConfig, command: &str) -> Table {
    t.with_meta("command", command)
        .with_meta("scenario", cfg.scenario.name())
        .with_meta("gap", cfg.det.gap)
        .with_meta("coupling", cfg.det.coupling)
        .with_meta("tol", cfg.quad_tol)
}

pub fn run_point(cfg: &RunConfig) -> Result<Table> {
    let l = cfg.sep.expect("validated");
    let rate = cfg.rate.unwrap_or(0.0);
    let o = outcome_at(
        cfg.scenario.kind(),
        &cfg.det,
        cfg.core_rate(rate),
        l,
        &opts(cfg),
    )?;
    let row = SweepRow {
        axis_value: l,
        p: o.p_a,
        x_abs: o.corr_x.norm(),
        concurrence: o.concurrence,
        err: o.err.concurrence,
    };
    Ok(described(Table::sweep(&[row]), cfg, "point")
        .with_meta("rate", rate)
        .with_meta("sep", l))
}

pub fn run_sweep(cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<Table> {
    let kind = cfg.scenario.kind();
    let axis = cfg.axis.expect("validated");
    let grid = cfg.grid.clone().expect("validated");
    let fixed = match axis {
        SweepAxis::Separation => core_rate(kind, cfg.rate.unwrap_or(0.0)),
        SweepAxis::Rate => cfg.sep.expect("validated"),
    };
    let spec = SweepSpec {
        scenario_kind: kind,
        det: cfg.det,
        axis,
        // `SweepSpec` holds core rates; the table keeps the values as given.
        grid: match axis {
            SweepAxis::Separation => grid.clone(),
            SweepAxis::Rate => grid.iter().map(|&v| core_rate(kind, v)).collect(),
        },
        fixed,
        tol: cfg.quad_tol,
    };
    spec.validate()?;
    let rows = par_map(pool, &grid, |&v| {
        let inner = match axis {
            SweepAxis::Separation => v,
            SweepAxis::Rate => core_rate(kind, v),
        };
        SweepRow {
            axis_value: v,
            ..sweep_point(&spec, inner)
        }
    });
    let t = described(Table::sweep(&rows), cfg, "sweep");
    Ok(match axis {
        SweepAxis::Separation => t
            .with_meta("axis", "sep")
            .with_meta("rate", cfg.rate.unwrap_or(0.0)),
        SweepAxis::Rate => t.with_meta("axis", "rate").with_meta("sep", fixed),
    })
}

const ROOT_COLUMNS: [&str; 6] = ["rate", "L", "lo", "hi", "residual", "iterations"];

fn root_row(rate: f64, r: &RootResult) -> Vec<f64> {
    vec![
        rate,
        r.value,
        r.bracket.0,
        r.bracket.1,
        r.residual,
        r.iterations as f64,
    ]
}

fn missing_row(rate: f64, failed: bool) -> Vec<f64> {
    let gone = if failed { f64::INFINITY } else { f64::NAN };
    vec![rate, f64::NAN, f64::NAN, f64::NAN, gone, 0.0]
}

/// The rates of an `lmax`/`lcrit` run: the grid if given, else `--rate`.
fn rates(cfg: &RunConfig) -> (Vec<f64>, bool) {
    match &cfg.grid {
        Some(g) => (g.clone(), true),
        None => (vec![cfg.rate.unwrap_or(0.0)], false),
    }
}

/// `L_max` at each rate. A single rate propagates its error; on a grid a
/// failure leaves a row of NaN with residual `+∞`, and no harvesting at all
/// reads as `L_max = 0`.
pub fn run_lmax(cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<Table> {
    let kind = cfg.scenario.kind();
    let (rates, grid) = rates(cfg);
    let results = par_map(pool, &rates, |&r| {
        let k = if r == 0.0 || kind == ScenarioKind::VacuumStatic {
            ScenarioKind::VacuumStatic
        } else {
            kind
        };
        find_l_max_with(k, &cfg.det, core_rate(k, r), &opts(cfg))
    });
    let mut t = described(Table::new(ROOT_COLUMNS), cfg, "lmax");
    for (&rate, res) in rates.iter().zip(results) {
        match res {
            Ok(r) => t.push(root_row(rate, &r)),
            Err(e) if !grid => return Err(e.into()),
            Err(udw_core::Error::NoHarvesting) => t.push(vec![rate, 0.0, 0.0, 0.0, 0.0, 0.0]),
            Err(_) => t.push(missing_row(rate, true)),
        }
    }
    Ok(t)
}

/// `L_crit` at each acceleration; an absent value is a row of NaN with a NaN
/// residual, a failed one has residual `+∞`.
pub fn run_lcrit(cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<Table> {
    let (rates, grid) = rates(cfg);
    let results = par_map(pool, &rates, |&a| find_l_crit_with(&cfg.det, a, &opts(cfg)));
    let mut t = described(Table::new(ROOT_COLUMNS), cfg, "lcrit");
    for (&a, res) in rates.iter().zip(results) {
        match res {
            Ok(Some(r)) => t.push(root_row(a, &r)),
            Ok(None) => t.push(missing_row(a, false)),
            Err(e) if !grid => return Err(e.into()),
            Err(_) => t.push(missing_row(a, true)),
        }
    }
    Ok(t)
}
