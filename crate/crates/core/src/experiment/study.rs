//! Convergence study: the experiment rerun with Δx halved per level.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Serialize, Serializer};

use super::config::{DataSpec, ExperimentConfig};
use super::run::{evaluate, prepare_dir, riemann_averages, Evaluation};
use super::svg::{Plot, Series};
use crate::solver::{shared_config, solve, Grid};
use crate::{Error, Result};

/// Errors at or below this count as zero.
pub const EXACT_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    /// Both errors vanish.
    Exact,
    Value(f64),
    /// One error vanishes and the other does not.
    Undefined,
}

impl Order {
    pub fn between(coarse: f64, fine: f64) -> Self {
        match (coarse <= EXACT_THRESHOLD, fine <= EXACT_THRESHOLD) {
            (true, true) => Order::Exact,
            (false, false) => Order::Value((coarse / fine).log2()),
            _ => Order::Undefined,
        }
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            Order::Value(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Exact => write!(f, "exact"),
            Order::Value(v) => write!(f, "{v}"),
            Order::Undefined => write!(f, "undefined"),
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleSource {
    /// Exact Burgers Riemann cell averages.
    ExactRiemann,
    /// Constant data with a homogeneous flux stays constant.
    Constant,
    /// The next finer level, averaged onto the coarse grid.
    FinerLevel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub level: usize,
    pub nx: usize,
    pub dx: f64,
    /// L¹ error at t_end.
    pub error: f64,
    /// Order against the previous level (the first row has none).
    pub order: Option<Order>,
}

/// A check's report value per level with coarse/fine ratios.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSeries {
    pub index: usize,
    pub kind: String,
    pub values: Vec<f64>,
    pub passed: Vec<bool>,
    pub shrink_ratios: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyTable {
    pub oracle: OracleSource,
    pub t_end: f64,
    pub rows: Vec<StudyRow>,
    pub checks: Vec<CheckSeries>,
}

impl StudyTable {
    pub fn orders(&self) -> Vec<Order> {
        self.rows.iter().filter_map(|r| r.order).collect()
    }
}

/// Average of a grid with twice the cells per axis onto `coarse`.
fn restrict(fine: &[f64], coarse: &Grid) -> Vec<f64> {
    let n = coarse.nx;
    let m = 2 * n;
    (0..coarse.n_cells())
        .map(|idx| {
            let (i, j) = (idx % n, idx / n);
            if coarse.dim == 1 {
                0.5 * (fine[2 * i] + fine[2 * i + 1])
            } else {
                let b = 2 * i + 2 * j * m;
                0.25 * (fine[b] + fine[b + 1] + fine[b + m] + fine[b + m + 1])
            }
        })
        .collect()
}

fn l1(a: &[f64], b: &[f64], g: &Grid) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() * g.dx().powi(g.dim as i32)
}

/// Reruns `base` on `levels` grids (Δx halved per level), measuring the L¹
/// error at t_end against the best available oracle and every check's value.
pub fn convergence_study(base: &ExperimentConfig, levels: usize, base_dir: &Path) -> Result<StudyTable> {
    if levels < 2 {
        return Err(Error::InvalidArgument(format!("a study needs at least 2 levels, got {levels}")));
    }
    let evals: Vec<(ExperimentConfig, Evaluation)> = (0..levels)
        .map(|l| {
            let cfg = base.refined(1 << l);
            evaluate(&cfg, base_dir).map(|e| (cfg, e))
        })
        .collect::<Result<_>>()?;
    let flux = &evals[0].1.flux;
    let oracle = match base.initial_data {
        DataSpec::Riemann { .. } if flux.name == "burgers1d" => OracleSource::ExactRiemann,
        DataSpec::Constant { .. } if flux.is_homogeneous() => OracleSource::Constant,
        _ => OracleSource::FinerLevel,
    };
    let t_end = base.grid.t_end;
    let finals: Vec<&[f64]> = evals.iter().map(|(_, e)| e.u.slab(e.u.n_levels() - 1)).collect();
    let errors: Vec<f64> = match oracle {
        OracleSource::ExactRiemann => {
            let (ul, ur, x0) = base.initial_data.riemann_states().expect("riemann data");
            evals
                .iter()
                .zip(&finals)
                .map(|((_, e), f)| l1(f, &riemann_averages(&e.grid, ul, ur, x0, t_end), &e.grid))
                .collect()
        }
        OracleSource::Constant => {
            let DataSpec::Constant { value } = base.initial_data else {
                unreachable!()
            };
            evals
                .iter()
                .zip(&finals)
                .map(|((_, e), f)| l1(f, &vec![value; f.len()], &e.grid))
                .collect()
        }
        OracleSource::FinerLevel => {
            let (cfg, last) = evals.last().expect("levels >= 2");
            let finer = cfg.refined(2);
            let grid = finer.grid.grid()?;
            let u0 = finer.initial_data.build(&grid, base_dir)?;
            let scheme = shared_config(&last.flux, &grid, &finer.scheme_config()?, &[&u0])?;
            let reference = solve(&last.flux, &u0, &grid, &scheme.with_store_every(usize::MAX))?;
            let ref_final = reference.slab(reference.n_levels() - 1).to_vec();
            (0..levels)
                .map(|l| {
                    let next: &[f64] = if l + 1 < levels { finals[l + 1] } else { &ref_final };
                    let g = &evals[l].1.grid;
                    l1(finals[l], &restrict(next, g), g)
                })
                .collect()
        }
    };
    let rows = (0..levels)
        .map(|l| {
            let g = &evals[l].1.grid;
            StudyRow {
                level: l,
                nx: g.nx,
                dx: g.dx(),
                error: errors[l],
                order: (l > 0).then(|| Order::between(errors[l - 1], errors[l])),
            }
        })
        .collect();
    let checks = (0..base.checks.len())
        .map(|i| {
            let values: Vec<f64> = evals.iter().map(|(_, e)| e.outcomes[i].report.value).collect();
            let passed = evals.iter().map(|(_, e)| e.outcomes[i].report.passed).collect();
            let shrink_ratios = values
                .windows(2)
                .map(|w| if w[1] == 0.0 { None } else { Some(w[0] / w[1]) })
                .collect();
            CheckSeries {
                index: i,
                kind: base.checks[i].kind().to_string(),
                values,
                passed,
                shrink_ratios,
            }
        })
        .collect();
    Ok(StudyTable {
        oracle,
        t_end,
        rows,
        checks,
    })
}

/// Writes `study.csv`, `study.json` and `convergence.svg` into `dir`.
pub fn write_study(dir: &Path, table: &StudyTable, force: bool) -> Result<()> {
    prepare_dir(dir, force)?;
    let mut w = csv::Writer::from_path(dir.join("study.csv"))?;
    w.write_record(["level", "nx", "dx", "error", "order"])?;
    for r in &table.rows {
        w.write_record([
            r.level.to_string(),
            r.nx.to_string(),
            format!("{}", r.dx),
            format!("{}", r.error),
            r.order.map(|o| o.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    let mut text = serde_json::to_string_pretty(table)?;
    text.push('\n');
    fs::write(dir.join("study.json"), text)?;
    let pts = table.rows.iter().map(|r| (r.dx, r.error)).collect();
    let plot = Plot::new("Convergence at t_end", "dx", "L1 error")
        .log_log()
        .with_series(Series::new("error", pts));
    fs::write(dir.join("convergence.svg"), plot.render())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_cases() {
        assert_eq!(Order::between(0.0, 1e-13), Order::Exact);
        assert_eq!(Order::between(0.1, 0.0), Order::Undefined);
        assert!((Order::between(0.4, 0.1).value().unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(Order::Exact.to_string(), "exact");
    }

    #[test]
    fn restriction_averages_children() {
        let g = Grid::new(2, 0.0, 1.0, 2).unwrap();
        let fine: Vec<f64> = (0..16).map(|v| v as f64).collect();
        assert_eq!(restrict(&fine, &g), vec![2.5, 4.5, 10.5, 12.5]);
        let g1 = Grid::line(0.0, 1.0, 2).unwrap();
        assert_eq!(restrict(&[1.0, 3.0, 5.0, 7.0], &g1), vec![2.0, 6.0]);
    }
}
