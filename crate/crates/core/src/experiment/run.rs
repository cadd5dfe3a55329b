//! Solver + verifier pipeline for one experiment and its run directory.
//!
//! Layout of a run directory:
//!
//! ```text
//! config.toml                     copy of the parsed config
//! fields/u.csv, fields/u.slab     the solution
//! fields/partner_NN.{csv,slab}    second solution of check NN, if any
//! reports/NN_<kind>.json          one report per check
//! reports/NN_entropy_sweep.json   every report of an entropy sweep
//! profiles/NN_cone_profile.csv    t,radius,l1_mass
//! profiles/NN_global_masses.csv   t,l1_mass
//! profiles/NN_uniqueness.csv      pair distances per refinement level
//! profiles/NN_doubling.csv        I1..I4 per sample and eps
//! plots/*.svg
//! summary.csv                     index,kind,value,tolerance,passed (written last)
//! FAILED                          only if the pipeline stopped with an error
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{to_vector, CheckSpec, ExperimentConfig, OracleKind};
use super::svg::{Plot, Series};
use crate::flux::{lipschitz_constant, FluxSpec};
use crate::mollifier::{contraction_test_function, BumpTestFunction, ConeSpec};
use crate::solver::io::{write_csv, write_slabs};
use crate::solver::{exact_riemann_burgers_average, shared_config, solve, Grid, GridField, InitialData, SchemeConfig};
use crate::verify::{
    cone_contraction_profile, doubling_diagnostics, entropy_sweep_with, global_contraction_check, kato_lhs,
    sweep_summary, uniqueness_experiment, ContractionOptions, DoublingOptions, DoublingTable, ProfileRow,
    ResidualReport, UniquenessTable, WeakFormOptions,
};
use crate::{Error, Result};

/// Environment variable with the default root for relative output dirs.
pub const OUTPUT_ROOT_ENV: &str = "ENTROPY_LAB_OUT";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Root for a relative `output_dir`; falls back to `$ENTROPY_LAB_OUT`,
    /// then the working directory.
    pub root: Option<PathBuf>,
    /// Directory that `file` initial data is relative to.
    pub base_dir: Option<PathBuf>,
    /// Replace an existing run directory.
    pub force: bool,
}

impl RunOptions {
    pub fn run_dir(&self, config: &ExperimentConfig) -> PathBuf {
        if config.output_dir.is_absolute() {
            return config.output_dir.clone();
        }
        let root = self
            .root
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_ROOT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        root.join(&config.output_dir)
    }

    fn base(&self) -> PathBuf {
        self.base_dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

/// Result of one check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub index: usize,
    pub spec: CheckSpec,
    pub report: ResidualReport,
    pub partner: Option<GridField>,
    pub sweep: Vec<ResidualReport>,
    pub profile: Vec<ProfileRow>,
    pub masses: Vec<(f64, f64)>,
    pub uniqueness: Option<UniquenessTable>,
    pub doubling: Option<DoublingTable>,
}

impl CheckOutcome {
    fn new(index: usize, spec: &CheckSpec, report: ResidualReport) -> Self {
        Self {
            index,
            spec: spec.clone(),
            report,
            partner: None,
            sweep: Vec::new(),
            profile: Vec::new(),
            masses: Vec::new(),
            uniqueness: None,
            doubling: None,
        }
    }
}

/// Everything an experiment computes, before anything is written.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub flux: FluxSpec,
    pub grid: Grid,
    pub scheme: SchemeConfig,
    pub u: GridField,
    pub outcomes: Vec<CheckOutcome>,
}

impl Evaluation {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.report.passed)
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub evaluation: Evaluation,
}

impl RunSummary {
    pub fn all_passed(&self) -> bool {
        self.evaluation.all_passed()
    }
}

/// Solves the experiment and evaluates every check (checks run concurrently).
pub fn evaluate(config: &ExperimentConfig, base_dir: &Path) -> Result<Evaluation> {
    let flux = config.flux.build()?;
    let grid = config.grid.grid()?;
    if flux.dim != grid.dim {
        return Err(Error::Config {
            context: "grid.dim".into(),
            message: format!("flux {} is {}-d, grid is {}-d", flux.name, flux.dim, grid.dim),
        });
    }
    let u0 = config.initial_data.build(&grid, base_dir)?;
    let partners: Vec<Option<InitialData>> = config
        .checks
        .iter()
        .map(|c| c.partner().map(|p| p.build(&grid, base_dir)).transpose())
        .collect::<Result<_>>()?;
    let mut all: Vec<&InitialData> = vec![&u0];
    all.extend(partners.iter().flatten());
    let scheme = shared_config(&flux, &grid, &config.scheme_config()?, &all)?;
    let u = solve(&flux, &u0, &grid, &scheme)?;
    let outcomes = config
        .checks
        .par_iter()
        .enumerate()
        .map(|(i, check)| {
            let partner = match &partners[i] {
                Some(d) => Some(solve(&flux, d, &grid, &scheme)?),
                None => None,
            };
            evaluate_check(i, check, config, &flux, &grid, &u0, &u, partner)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Evaluation {
        flux,
        grid,
        scheme,
        u,
        outcomes,
    })
}

#[allow(clippy::too_many_arguments)]
fn evaluate_check(
    index: usize,
    check: &CheckSpec,
    config: &ExperimentConfig,
    flux: &FluxSpec,
    grid: &Grid,
    u0: &InitialData,
    u: &GridField,
    partner: Option<GridField>,
) -> Result<CheckOutcome> {
    let dim = grid.dim;
    let mut out = match check {
        CheckSpec::EntropyInequality {
            test_function,
            k0_count,
            smooth_n,
            c_tol,
        } => {
            let (center, radius) = test_function.vectors(dim)?;
            let phi = BumpTestFunction::new(dim, center, radius, test_function.t_center, test_function.t_radius)?;
            let opts = WeakFormOptions {
                c_tol: *c_tol,
                ..Default::default()
            };
            let sweep = entropy_sweep_with(u, flux, &phi, &opts, *k0_count, smooth_n)?;
            let report = sweep_summary(&sweep).expect("sweep is non-empty");
            let mut o = CheckOutcome::new(index, check, report);
            o.sweep = sweep;
            o
        }
        CheckSpec::Kato {
            radius,
            rho,
            tau,
            h,
            eps,
            c_tol,
            ..
        } => {
            let v = partner.as_ref().expect("kato has a partner");
            let n = lipschitz_constant(flux, *radius, u.bound_m.max(v.bound_m))?;
            let cone = ConeSpec::new(*radius, n)?.with_horizon(u.t_end());
            let psi = contraction_test_function(dim, cone, *rho, *tau, *h, *eps)?;
            let opts = WeakFormOptions {
                c_tol: *c_tol,
                ..Default::default()
            };
            let report = kato_lhs(u, v, flux, &psi, &opts)?;
            CheckOutcome::new(index, check, report)
        }
        CheckSpec::ConeContraction {
            radius, center, c_tol, ..
        } => {
            let v = partner.as_ref().expect("cone check has a partner");
            let opts = ContractionOptions {
                c_tol: *c_tol,
                center: match center {
                    Some(c) => to_vector(c, dim, "checks.center")?,
                    None => [0.0; 2],
                },
            };
            let p = cone_contraction_profile(u, v, flux, *radius, &opts)?;
            let mut o = CheckOutcome::new(index, check, p.report);
            o.profile = p.rows;
            o
        }
        CheckSpec::GlobalContraction { radii, c_tol, .. } => {
            let v = partner.as_ref().expect("global check has a partner");
            let opts = ContractionOptions {
                c_tol: *c_tol,
                ..Default::default()
            };
            let g = global_contraction_check(u, v, flux, radii, &opts)?;
            let mut o = CheckOutcome::new(index, check, g.report);
            o.masses = g.masses;
            o
        }
        CheckSpec::Uniqueness {
            variants,
            oracle,
            oracle_ratio,
        } => {
            let seeds = variants
                .iter()
                .map(|s| s.config(&config.grid))
                .collect::<Result<Vec<_>>>()?;
            let exact = match oracle {
                Some(OracleKind::BurgersRiemann) => {
                    let (ul, ur, x0) = config.initial_data.riemann_states().ok_or_else(|| Error::Config {
                        context: format!("checks[{index}].oracle"),
                        message: "burgers_riemann needs riemann initial data".into(),
                    })?;
                    if flux.name != "burgers1d" {
                        return Err(Error::Config {
                            context: format!("checks[{index}].oracle"),
                            message: format!("burgers_riemann needs flux burgers1d, not {}", flux.name),
                        });
                    }
                    Some(move |g: &Grid, t: f64| riemann_averages(g, ul, ur, x0, t))
                }
                None => None,
            };
            let table = match &exact {
                Some(f) => uniqueness_experiment(flux, u0, grid, &seeds, Some(f), *oracle_ratio)?,
                None => uniqueness_experiment(flux, u0, grid, &seeds, None, *oracle_ratio)?,
            };
            let mut o = CheckOutcome::new(index, check, table.report.clone());
            o.uniqueness = Some(table);
            o
        }
        CheckSpec::Doubling { eps_list, samples, .. } => {
            let v = partner.as_ref().expect("doubling has a partner");
            let pts = samples
                .iter()
                .map(|s| snap_sample(u, s))
                .collect::<Result<Vec<_>>>()?;
            let table = doubling_diagnostics(u, v, flux, eps_list, &pts, &DoublingOptions::default())?;
            let mut o = CheckOutcome::new(index, check, table.report(flux));
            o.doubling = Some(table);
            o
        }
    };
    out.partner = partner;
    Ok(out)
}

/// Exact cell averages of the Burgers Riemann solution at time t.
pub fn riemann_averages(g: &Grid, ul: f64, ur: f64, x0: f64, t: f64) -> Vec<f64> {
    let dx = g.dx();
    (0..g.n_cells())
        .map(|idx| {
            let a = g.interface(idx % g.nx) - x0;
            if t > 0.0 {
                exact_riemann_burgers_average(ul, ur, a, a + dx, t)
            } else if a + dx <= 0.0 {
                ul
            } else if a >= 0.0 {
                ur
            } else {
                (-a * ul + (a + dx) * ur) / dx
            }
        })
        .collect()
}

/// `[x, t]` or `[x, y, t]` moved to the nearest cell center and stored level.
fn snap_sample(u: &GridField, s: &[f64]) -> Result<([f64; 2], f64)> {
    let dim = u.dim();
    if s.len() != dim + 1 {
        return Err(Error::Config {
            context: "checks.samples".into(),
            message: format!("sample {s:?} needs {} coordinates", dim + 1),
        });
    }
    let x = to_vector(&s[..dim], dim, "checks.samples")?;
    let cell = u
        .grid
        .locate(&x)
        .ok_or_else(|| Error::InvalidArgument(format!("sample {s:?} outside the grid")))?;
    Ok((u.grid.center(cell), u.times[u.nearest_level(s[dim])]))
}

/// Creates the run directory, refusing to reuse a non-empty one unless forced.
pub fn prepare_dir(dir: &Path, force: bool) -> Result<()> {
    if dir.exists() && fs::read_dir(dir)?.next().is_some() {
        if !force {
            return Err(Error::RunExists(dir.to_path_buf()));
        }
        fs::remove_dir_all(dir)?;
    }
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Runs the experiment and persists every artifact. On a pipeline error a
/// `FAILED` file with the message is left in the run directory.
pub fn run(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunSummary> {
    let dir = opts.run_dir(config);
    prepare_dir(&dir, opts.force)?;
    let result = fs::write(dir.join("config.toml"), config.to_toml())
        .map_err(Error::from)
        .and_then(|_| evaluate(config, &opts.base()))
        .and_then(|ev| write_artifacts(&dir, &ev).map(|_| ev));
    match result {
        Ok(evaluation) => Ok(RunSummary { dir, evaluation }),
        Err(e) => {
            let _ = fs::write(dir.join("FAILED"), format!("{e}\n"));
            Err(e)
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    index: usize,
    kind: &'a str,
    value: f64,
    tolerance: f64,
    passed: bool,
}

#[derive(Serialize)]
struct MassRow {
    t: f64,
    l1_mass: f64,
}

#[derive(Serialize)]
struct PairRow {
    a: usize,
    b: usize,
    coarse: f64,
    fine: f64,
    ratio: Option<f64>,
}

#[derive(Serialize)]
struct DoublingCsvRow {
    x: f64,
    y: f64,
    t: f64,
    eps: f64,
    i1: f64,
    i2: f64,
    i3: f64,
    i4: f64,
    dev1: f64,
    dev2: f64,
    dev3: f64,
    dev4: f64,
}

/// Writes fields, reports, profiles and plots, then the summary.
pub fn write_artifacts(dir: &Path, ev: &Evaluation) -> Result<()> {
    for sub in ["fields", "reports", "profiles", "plots"] {
        fs::create_dir_all(dir.join(sub))?;
    }
    write_csv(&ev.u, &dir.join("fields/u.csv"))?;
    write_slabs(&ev.u, &dir.join("fields/u.slab"))?;
    fs::write(dir.join("plots/solution.svg"), snapshot_plot(&ev.u, "u").render())?;
    for o in &ev.outcomes {
        let tag = format!("{:02}", o.index);
        let kind = o.spec.kind();
        if let Some(v) = &o.partner {
            write_csv(v, &dir.join(format!("fields/partner_{tag}.csv")))?;
            write_slabs(v, &dir.join(format!("fields/partner_{tag}.slab")))?;
        }
        write_json(&dir.join(format!("reports/{tag}_{kind}.json")), &o.report)?;
        if !o.sweep.is_empty() {
            write_json(&dir.join(format!("reports/{tag}_entropy_sweep.json")), &o.sweep)?;
        }
        if !o.profile.is_empty() {
            write_rows(&dir.join(format!("profiles/{tag}_cone_profile.csv")), &o.profile)?;
            let pts = o.profile.iter().map(|r| (r.t, r.l1_mass)).collect();
            let plot = Plot::new("L1 distance on the shrinking ball", "t", "L1 mass")
                .with_series(Series::new("||u - v||_L1(B_{R-tN})", pts));
            fs::write(dir.join(format!("plots/{tag}_cone_profile.svg")), plot.render())?;
        }
        if !o.masses.is_empty() {
            let rows: Vec<MassRow> = o.masses.iter().map(|&(t, l1_mass)| MassRow { t, l1_mass }).collect();
            write_rows(&dir.join(format!("profiles/{tag}_global_masses.csv")), &rows)?;
            let plot = Plot::new("Global L1 distance", "t", "L1 mass")
                .with_series(Series::new("||u - v||_L1", o.masses.clone()));
            fs::write(dir.join(format!("plots/{tag}_global_masses.svg")), plot.render())?;
        }
        if let Some(t) = &o.uniqueness {
            let rows: Vec<PairRow> = t
                .distances
                .iter()
                .map(|d| PairRow {
                    a: d.a,
                    b: d.b,
                    coarse: d.coarse,
                    fine: d.fine,
                    ratio: d.ratio(),
                })
                .collect();
            write_rows(&dir.join(format!("profiles/{tag}_uniqueness.csv")), &rows)?;
            let mut plot = Plot::new("Refinement of pairwise and oracle distances", "dx", "L1 distance").log_log();
            for d in &t.distances {
                plot = plot.with_series(Series::new(
                    format!("variants {}-{}", d.a, d.b),
                    vec![(t.dx[0], d.coarse), (t.dx[1], d.fine)],
                ));
            }
            for (s, &(c, f)) in t.oracle_errors.iter().enumerate() {
                plot = plot.with_series(Series::new(format!("variant {s} vs exact"), vec![(t.dx[0], c), (t.dx[1], f)]));
            }
            fs::write(dir.join(format!("plots/{tag}_convergence.svg")), plot.render())?;
        }
        if let Some(t) = &o.doubling {
            let rows: Vec<DoublingCsvRow> = t
                .rows
                .iter()
                .map(|r| DoublingCsvRow {
                    x: r.x[0],
                    y: r.x[1],
                    t: r.t,
                    eps: r.eps,
                    i1: r.values[0],
                    i2: r.values[1],
                    i3: r.values[2],
                    i4: r.values[3],
                    dev1: r.deviations[0],
                    dev2: r.deviations[1],
                    dev3: r.deviations[2],
                    dev4: r.deviations[3],
                })
                .collect();
            write_rows(&dir.join(format!("profiles/{tag}_doubling.csv")), &rows)?;
            let mut plot = Plot::new("Doubled-variable deviations", "eps", "max deviation").log_log();
            for j in 0..4 {
                let pts = t.eps_list.iter().zip(&t.max_deviation).map(|(&e, d)| (e, d[j])).collect();
                plot = plot.with_series(Series::new(format!("I{}", j + 1), pts));
            }
            fs::write(dir.join(format!("plots/{tag}_doubling.svg")), plot.render())?;
        }
    }
    let rows: Vec<SummaryRow> = ev
        .outcomes
        .iter()
        .map(|o| SummaryRow {
            index: o.index,
            kind: o.report.kind.as_str(),
            value: o.report.value,
            tolerance: o.report.tolerance,
            passed: o.report.passed,
        })
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(["index", "kind", "value", "tolerance", "passed"])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    let mut f = fs::File::create(dir.join("summary.csv"))?;
    f.write_all(&bytes)?;
    Ok(())
}

/// Up to five stored levels of a 1-d field (2-d: the row through the middle).
pub fn snapshot_plot(u: &GridField, name: &str) -> Plot {
    let g = &u.grid;
    let n = u.n_levels();
    let picks: Vec<usize> = if n <= 5 {
        (0..n).collect()
    } else {
        (0..5).map(|j| j * (n - 1) / 4).collect()
    };
    let row = if g.dim == 2 { g.nx / 2 } else { 0 };
    let title = if g.dim == 2 {
        format!("{name} along the middle row")
    } else {
        format!("{name} snapshots")
    };
    let mut plot = Plot::new(title, "x", name);
    for l in picks {
        let s = u.slab(l);
        let pts = (0..g.nx).map(|i| (g.center(i)[0], s[i + row * g.nx])).collect();
        plot = plot.with_series(Series::new(format!("t = {:.3}", u.times[l]), pts));
    }
    plot
}
