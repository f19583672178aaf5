//! Figure reproduction: one CSV per panel plus a gnuplot script.
//!
//! | fig | panels                     | x axis | series                                   |
//! |-----|----------------------------|--------|------------------------------------------|
//! | 1   | Ω ∈ {0.5,1.2,2} × a ∈ {0.5,1,3} | L  | accelerated, thermal, vacuum             |
//! | 2   | Ω ∈ {0.5,1.2,2} × L ∈ {0.5,1,2} | a  | accelerated, thermal, vacuum             |
//! | 3   | one                        | a      | `L_crit` at Ω ∈ {0.8,1,1.2,1.5,2}, `1/a`   |
//! | 4   | Ω ∈ {0.5,1,3}              | a      | `L_max`: accelerated, thermal, vacuum    |
//! | 5   | one, Ω = 2                 | a      | `L_max`: parallel, antiparallel, perpendicular, static |
//!
//! Panels are lettered row-major from `a`. Thermal series use `T = a/2π`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use udw_core::analysis::{find_l_crit_with, find_l_max_with, outcome_at};
use udw_core::harvest::{DetectorParams, EvalOptions, ScenarioKind};

use crate::config::{core_rate, RunConfig};
use crate::error::{CliError, Result};
use crate::output::Table;
use crate::run::{par_map, Artifact, Destination};

pub const FIG1_GAPS: [f64; 3] = [0.5, 1.2, 2.0];
pub const FIG1_RATES: [f64; 3] = [0.5, 1.0, 3.0];
pub const FIG2_SEPS: [f64; 3] = [0.5, 1.0, 2.0];
pub const FIG3_GAPS: [f64; 5] = [0.8, 1.0, 1.2, 1.5, 2.0];
pub const FIG4_GAPS: [f64; 3] = [0.5, 1.0, 3.0];
pub const FIG5_GAP: f64 = 2.0;

pub const DEFAULT_DIR: &str = "figures";

/// Default x grid: `0.02:4:0.02` for figures 1–2, `0.1:4:0.1` for figure 3
/// and `0.2:4:0.2` for figures 4–5.
pub fn default_grid(id: u8) -> Vec<f64> {
    let (n, scale) = match id {
        1 | 2 => (200, 50.0),
        3 => (40, 10.0),
        _ => (20, 5.0),
    };
    (1..=n).map(|k| k as f64 / scale).collect()
}

/// A closed-form comparison curve: column name and `x -> y`.
type Reference = (&'static str, fn(f64) -> f64);

const PANEL_LETTERS: &[u8] = b"abcdefghi";

#[derive(Debug, Clone, Copy, PartialEq)]
enum Job {
    Concurrence {
        kind: ScenarioKind,
        gap: f64,
        rate: f64,
        l: f64,
    },
    LMax {
        kind: ScenarioKind,
        gap: f64,
        rate: f64,
    },
    LCrit {
        gap: f64,
        a: f64,
    },
}

impl Job {
    fn concurrence(kind: ScenarioKind, gap: f64, rate: f64, l: f64) -> Self {
        Job::Concurrence {
            kind,
            gap,
            rate: core_rate(kind, rate),
            l,
        }
    }

    fn l_max(kind: ScenarioKind, gap: f64, rate: f64) -> Self {
        Job::LMax {
            kind,
            gap,
            rate: core_rate(kind, rate),
        }
    }

    /// `(value, error)`. Failures are `(NaN, +∞)`; no harvesting is an
    /// `L_max` of 0 and an absent `L_crit` is `(NaN, 0)`.
    fn eval(&self, coupling: f64, opts: &EvalOptions) -> (f64, f64) {
        let det = |gap| DetectorParams::new(gap, coupling);
        let failed = (f64::NAN, f64::INFINITY);
        match *self {
            Job::Concurrence { kind, gap, rate, l } => det(gap)
                .and_then(|d| outcome_at(kind, &d, rate, l, opts))
                .map_or(failed, |o| (o.concurrence, o.err.concurrence)),
            Job::LMax { kind, gap, rate } => {
                match det(gap).and_then(|d| find_l_max_with(kind, &d, rate, opts)) {
                    Ok(r) => (r.value, 0.5 * (r.bracket.1 - r.bracket.0)),
                    Err(udw_core::Error::NoHarvesting) => (0.0, 0.0),
                    Err(_) => failed,
                }
            }
            Job::LCrit { gap, a } => match det(gap).and_then(|d| find_l_crit_with(&d, a, opts)) {
                Ok(Some(r)) => (r.value, 0.5 * (r.bracket.1 - r.bracket.0)),
                Ok(None) => (f64::NAN, 0.0),
                Err(_) => failed,
            },
        }
    }
}

/// A panel before evaluation: one job per (grid point, series).
struct Panel {
    name: String,
    title: String,
    x_label: &'static str,
    y_label: &'static str,
    x: Vec<f64>,
    series: Vec<&'static str>,
    /// Series drawn dashed.
    dashed: Vec<&'static str>,
    /// `jobs[i][s]` for grid point `i`, series `s`.
    jobs: Vec<Vec<Job>>,
    /// Extra exact column (`1/a` in figure 3).
    reference: Option<Reference>,
}

fn fmt2(v: f64) -> String {
    format!("{v:.2}")
}

fn panels(id: u8, x: &[f64]) -> Vec<Panel> {
    use ScenarioKind::*;
    let letter = |i: usize| PANEL_LETTERS[i] as char;
    match id {
        1 => {
            let mut out = Vec::new();
            for (r, &gap) in FIG1_GAPS.iter().enumerate() {
                for (c, &a) in FIG1_RATES.iter().enumerate() {
                    let jobs = x
                        .iter()
                        .map(|&l| {
                            vec![
                                Job::concurrence(ParallelAcc, gap, a, l),
                                Job::concurrence(ThermalStatic, gap, a, l),
                                Job::concurrence(VacuumStatic, gap, 0.0, l),
                            ]
                        })
                        .collect();
                    out.push(Panel {
                        name: format!("fig1_{}", letter(3 * r + c)),
                        title: format!("Omega sigma = {}, a sigma = {}", fmt2(gap), fmt2(a)),
                        x_label: "L/sigma",
                        y_label: "concurrence",
                        x: x.to_vec(),
                        series: vec!["accelerated", "thermal", "vacuum"],
                        dashed: vec!["vacuum"],
                        jobs,
                        reference: None,
                    });
                }
            }
            out
        }
        2 => {
            let mut out = Vec::new();
            for (r, &gap) in FIG1_GAPS.iter().enumerate() {
                for (c, &l) in FIG2_SEPS.iter().enumerate() {
                    let jobs = x
                        .iter()
                        .map(|&a| {
                            vec![
                                Job::concurrence(ParallelAcc, gap, a, l),
                                Job::concurrence(ThermalStatic, gap, a, l),
                                Job::concurrence(VacuumStatic, gap, 0.0, l),
                            ]
                        })
                        .collect();
                    out.push(Panel {
                        name: format!("fig2_{}", letter(3 * r + c)),
                        title: format!("Omega sigma = {}, L/sigma = {}", fmt2(gap), fmt2(l)),
                        x_label: "a sigma",
                        y_label: "concurrence",
                        x: x.to_vec(),
                        series: vec!["accelerated", "thermal", "vacuum"],
                        dashed: vec!["vacuum"],
                        jobs,
                        reference: None,
                    });
                }
            }
            out
        }
        3 => {
            let jobs = x
                .iter()
                .map(|&a| FIG3_GAPS.iter().map(|&gap| Job::LCrit { gap, a }).collect())
                .collect();
            vec![Panel {
                name: "fig3".into(),
                title: "L_crit versus acceleration".into(),
                x_label: "a sigma",
                y_label: "L_crit/sigma",
                x: x.to_vec(),
                series: vec!["gap_0.80", "gap_1.00", "gap_1.20", "gap_1.50", "gap_2.00"],
                dashed: vec![],
                jobs,
                reference: Some(("inv_a", |a| 1.0 / a)),
            }]
        }
        4 => FIG4_GAPS
            .iter()
            .enumerate()
            .map(|(i, &gap)| Panel {
                name: format!("fig4_{}", letter(i)),
                title: format!("Omega sigma = {}", fmt2(gap)),
                x_label: "a sigma",
                y_label: "L_max/sigma",
                x: x.to_vec(),
                series: vec!["accelerated", "thermal", "vacuum"],
                dashed: vec!["vacuum"],
                jobs: x
                    .iter()
                    .map(|&a| {
                        vec![
                            Job::l_max(ParallelAcc, gap, a),
                            Job::l_max(ThermalStatic, gap, a),
                            Job::l_max(VacuumStatic, gap, 0.0),
                        ]
                    })
                    .collect(),
                reference: None,
            })
            .collect(),
        5 => vec![Panel {
            name: "fig5".into(),
            title: format!("Omega sigma = {}", fmt2(FIG5_GAP)),
            x_label: "a sigma",
            y_label: "L_max/sigma",
            x: x.to_vec(),
            series: vec!["parallel", "antiparallel", "perpendicular", "static"],
            dashed: vec!["static"],
            jobs: x
                .iter()
                .map(|&a| {
                    vec![
                        Job::l_max(ParallelAcc, FIG5_GAP, a),
                        Job::l_max(AntiparallelAcc, FIG5_GAP, a),
                        Job::l_max(PerpendicularAcc, FIG5_GAP, a),
                        Job::l_max(VacuumStatic, FIG5_GAP, 0.0),
                    ]
                })
                .collect(),
            reference: None,
        }],
        _ => Vec::new(),
    }
}

/// One evaluated panel.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelData {
    pub name: String,
    pub table: Table,
}

/// Evaluates figure `id` on grid `x`. Every job runs independently on
/// `pool`; the tables come out in panel and grid order.
pub fn evaluate(
    id: u8,
    x: &[f64],
    coupling: f64,
    opts: &EvalOptions,
    pool: &rayon::ThreadPool,
) -> Result<(Vec<PanelData>, String)> {
    let panels = panels(id, x);
    if panels.is_empty() {
        return Err(CliError::invalid("figure", format!("{id} is not in 1..5")));
    }
    let flat: Vec<Job> = panels
        .iter()
        .flat_map(|p| p.jobs.iter().flatten().copied())
        .collect();
    let mut results = par_map(pool, &flat, |j| j.eval(coupling, opts)).into_iter();
    let mut out = Vec::with_capacity(panels.len());
    for p in &panels {
        let x_name = if p.x_label.starts_with('L') { "L" } else { "a" };
        let mut columns = vec![x_name.to_string()];
        for s in &p.series {
            columns.push(s.to_string());
            columns.push(format!("{s}_err"));
        }
        if let Some((name, _)) = p.reference {
            columns.push(name.to_string());
        }
        let mut t = Table::new(columns)
            .with_meta("figure", id)
            .with_meta("panel", &p.title);
        for (i, &xi) in p.x.iter().enumerate() {
            let mut row = vec![xi];
            for _ in &p.jobs[i] {
                let (v, e) = results.next().expect("one result per job");
                row.push(v);
                row.push(e);
            }
            if let Some((_, f)) = p.reference {
                row.push(f(xi));
            }
            t.push(row);
        }
        out.push(PanelData {
            name: p.name.clone(),
            table: t,
        });
    }
    Ok((out, gnuplot_script(id, &panels)))
}

/// A gnuplot script drawing every panel of figure `id` from CSVs in its own
/// directory.
fn gnuplot_script(id: u8, panels: &[Panel]) -> String {
    let (cols, rows) = match panels.len() {
        9 => (3, 3),
        n => (n, 1),
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# figure {id}; run from this directory with: gnuplot fig{id}.gp"
    );
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(
        s,
        "set terminal pngcairo size {},{}",
        520 * cols,
        420 * rows
    );
    let _ = writeln!(s, "set output 'fig{id}.png'");
    if panels.len() > 1 {
        let _ = writeln!(s, "set multiplot layout {rows},{cols}");
    }
    for p in panels {
        let _ = writeln!(s, "set title '{}'", p.title);
        let _ = writeln!(s, "set xlabel '{}'", p.x_label);
        let _ = writeln!(s, "set ylabel '{}'", p.y_label);
        let file = format!("{}.csv", p.name);
        let mut parts = Vec::new();
        for (k, series) in p.series.iter().enumerate() {
            let src = if k == 0 {
                format!("'{file}'")
            } else {
                "''".into()
            };
            let dash = if p.dashed.contains(series) {
                " dt 2"
            } else {
                ""
            };
            parts.push(format!(
                "{src} skip 1 using 1:{} with lines{dash} title '{series}'",
                2 + 2 * k
            ));
        }
        if let Some((name, _)) = p.reference {
            let col = 2 + 2 * p.series.len();
            parts.push(format!(
                "'' skip 1 using 1:{col} with lines dt 2 lc 'black' title '{name}'"
            ));
        }
        let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    }
    if panels.len() > 1 {
        let _ = writeln!(s, "unset multiplot");
    }
    s
}

/// `figure <id>`: every panel CSV and the script, under `--out` (default
/// `figures/`). The grid, when given, replaces the x axis of every panel.
pub fn run_figure(id: u8, cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<Vec<Artifact>> {
    let x = cfg.grid.clone().unwrap_or_else(|| default_grid(id));
    let opts = EvalOptions {
        rel_tol: cfg.quad_tol,
    };
    let (panels, script) = evaluate(id, &x, cfg.det.coupling, &opts, pool)?;
    let dir: PathBuf = cfg
        .out
        .clone()
        .unwrap_or_else(|| Path::new(DEFAULT_DIR).to_path_buf());
    let mut out: Vec<Artifact> = panels
        .iter()
        .map(|p| Artifact {
            dest: Destination::File(dir.join(format!("{}.csv", p.name))),
            contents: p.table.to_csv(),
        })
        .collect();
    out.push(Artifact {
        dest: Destination::File(dir.join(format!("fig{id}.gp"))),
        contents: script,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panel_layout() {
        let x = [0.5, 1.0];
        assert_eq!(panels(1, &x).len(), 9);
        assert_eq!(panels(2, &x).len(), 9);
        assert_eq!(panels(3, &x)[0].series.len(), 5);
        assert_eq!(panels(4, &x).len(), 3);
        assert_eq!(panels(5, &x)[0].series.len(), 4);
        assert!(panels(6, &x).is_empty());
        // Row-major lettering: (b) is the first row, second column.
        let p = &panels(1, &x)[1];
        assert_eq!(p.name, "fig1_b");
        assert_eq!(
            p.jobs[0][0],
            Job::concurrence(ScenarioKind::ParallelAcc, 0.5, 1.0, 0.5)
        );
        assert_eq!(panels(1, &x)[6].title, "Omega sigma = 2.00, a sigma = 0.50");
        // The thermal job carries T = a/2π.
        match p.jobs[0][1] {
            Job::Concurrence { rate, .. } => {
                assert!((rate - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-15)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn default_grids() {
        let g = default_grid(1);
        assert_eq!((g[0], g.len(), *g.last().unwrap()), (0.02, 200, 4.0));
        assert_eq!(default_grid(3)[..3], [0.1, 0.2, 0.3]);
        assert_eq!(default_grid(4).len(), 20);
        assert_eq!(default_grid(5).last(), Some(&4.0));
    }

    #[test]
    fn script_references_every_panel() {
        let x = [1.0];
        let s = gnuplot_script(1, &panels(1, &x));
        for l in "abcdefghi".chars() {
            assert!(s.contains(&format!("'fig1_{l}.csv'")));
        }
        assert!(s.contains("set multiplot layout 3,3"));
        assert!(s.contains("dt 2 title 'vacuum'"));
        let s3 = gnuplot_script(3, &panels(3, &x));
        assert!(s3.contains("'fig3.csv'") && s3.contains("using 1:12"));
        assert!(!s3.contains("multiplot"));
    }
}
