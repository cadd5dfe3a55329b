//! L¹ contraction on shrinking balls, global contraction and the
//! refinement proxy for uniqueness.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use super::{json_list, Criterion, ReportKind, ResidualReport};
use crate::entropy::kruzkov_flux;
use crate::flux::{lipschitz_constant, FluxSpec};
use crate::mollifier::test_function::radial_component;
use crate::solver::{l1_distance_on_ball, solve, Grid, GridField, InitialData, SchemeConfig};
use crate::{Error, Result, Vector};

/// Default C in tol = C·(Δx + Δt) for contraction profiles, per unit of
/// max|u| + max|v|.
pub const DEFAULT_CONTRACTION_FACTOR: f64 = 1.0;
/// Required shrink factor of violations and distances under Δx halving.
pub const REFINEMENT_RATIO: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ContractionOptions {
    /// Overrides C in tol = C·(Δx + Δt).
    pub c_tol: Option<f64>,
    pub center: Vector,
}

impl ContractionOptions {
    fn constant(&self, u: &GridField, v: &GridField) -> f64 {
        self.c_tol
            .unwrap_or(DEFAULT_CONTRACTION_FACTOR * (u.bound_m + v.bound_m))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    pub t: f64,
    pub radius: f64,
    pub l1_mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeProfile {
    /// Cone slope N from the flux Lipschitz bound.
    pub speed: f64,
    pub rows: Vec<ProfileRow>,
    /// Largest consecutive increase of the L¹ mass beyond rounding of the
    /// sums (0 if non-increasing).
    pub max_increment: f64,
    /// Largest m(τ) − m(ρ) over ρ ≤ τ beyond rounding; the reported value.
    pub max_rise: f64,
    pub report: ResidualReport,
}

/// Largest consecutive increase in a sequence, or 0.
pub fn max_increment(values: &[f64]) -> f64 {
    values
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max)
}

/// Worst-case rounding error of an L¹ mass summed over `cells` terms,
/// relative to the mass.
fn summation_error(cells: usize) -> f64 {
    let n = (cells + 1) as f64 * f64::EPSILON;
    n / (1.0 - n)
}

/// Zeroes a change of two masses that lies within their summation error.
fn above_roundoff(change: f64, a: f64, b: f64, cells: usize) -> f64 {
    if change <= summation_error(cells) * (a.abs() + b.abs()) {
        0.0
    } else {
        change
    }
}

fn floored_rise(values: &[f64], cells: usize) -> f64 {
    let mut lowest = f64::INFINITY;
    let mut rise: f64 = 0.0;
    for &m in values {
        lowest = lowest.min(m);
        rise = rise.max(above_roundoff(m - lowest, m, lowest, cells));
    }
    rise
}

/// Largest m(τ) − m(ρ) over ρ ≤ τ, or 0.
pub fn max_rise(values: &[f64]) -> f64 {
    let mut lowest = f64::INFINITY;
    let mut worst: f64 = 0.0;
    for &v in values {
        lowest = lowest.min(v);
        worst = worst.max(v - lowest);
    }
    worst
}

/// t ↦ ‖u(·,t) − v(·,t)‖_{L¹(B_{R−tN})} at every stored level inside the cone.
pub fn cone_contraction_profile(
    u: &GridField,
    v: &GridField,
    flux: &FluxSpec,
    radius: f64,
    opts: &ContractionOptions,
) -> Result<ConeProfile> {
    u.check_compatible(v)?;
    let bound = u.bound_m.max(v.bound_m);
    let speed = lipschitz_constant(flux, radius, bound)?;
    let first = u.times[0];
    if radius - first * speed <= 0.0 {
        return Err(Error::EmptyCone(first));
    }
    let mut rows = Vec::new();
    let mut flux_violations = 0u64;
    let mut nodes_checked = 0u64;
    for (level, &t) in u.times.iter().enumerate() {
        let r = radius - t * speed;
        if r <= 0.0 {
            break;
        }
        let mass = l1_distance_on_ball(u, v, t, &opts.center, r)?;
        rows.push(ProfileRow {
            t,
            radius: r,
            l1_mass: mass,
        });
        // |x/|x| · q(x,u,v)| ≤ N |u − v| at every node inside B_R
        let (su, sv) = (u.slab(level), v.slab(level));
        for idx in 0..su.len() {
            let c = u.grid.center(idx);
            let rel = [c[0] - opts.center[0], c[1] - opts.center[1]];
            if rel[0].hypot(rel[1]) > radius {
                continue;
            }
            nodes_checked += 1;
            let q = kruzkov_flux(flux, &c, su[idx], sv[idx]);
            let lhs = radial_component(&rel, &q).abs();
            let rhs = speed * (su[idx] - sv[idx]).abs();
            if lhs > rhs * (1.0 + 1e-12) + 1e-300 {
                flux_violations += 1;
            }
        }
    }
    let masses: Vec<f64> = rows.iter().map(|r| r.l1_mass).collect();
    let raw = max_increment(&masses);
    let cells = u.grid.n_cells();
    let inc = masses
        .windows(2)
        .map(|w| above_roundoff(w[1] - w[0], w[0], w[1], cells))
        .fold(0.0, f64::max);
    let rise = floored_rise(&masses, cells);
    let c = opts.constant(u, v);
    let tol = c * (u.dx() + u.max_dt());
    let report = ResidualReport::new(ReportKind::ConeContraction, rise, tol, Criterion::AtMostTol)
        .with("max_increment", inc)
        .with("raw_max_increment", raw)
        .with("roundoff_rel", summation_error(cells))
        .with("flux", flux.name.clone())
        .with("radius", radius)
        .with("speed", speed)
        .with("state_bound", bound)
        .with("dx", u.dx())
        .with("dt", u.max_dt())
        .with("c_tol", c)
        .with("levels", rows.len() as u64)
        .with("flux_bound_nodes", nodes_checked)
        .with("flux_bound_violations", flux_violations)
        .require(flux_violations == 0, "entropy flux exceeds N·η at a node");
    Ok(ConeProfile {
        speed,
        rows,
        max_increment: inc,
        max_rise: rise,
        report,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalContraction {
    /// (R, N(R), N(R)/R).
    pub speed_ratios: Vec<(f64, f64, f64)>,
    /// (t, ‖u − v‖_{L¹(domain)}).
    pub masses: Vec<(f64, f64)>,
    pub report: ResidualReport,
}

/// N(R)/R over `radii` plus the full-domain L¹ distance at every level.
pub fn global_contraction_check(
    u: &GridField,
    v: &GridField,
    flux: &FluxSpec,
    radii: &[f64],
    opts: &ContractionOptions,
) -> Result<GlobalContraction> {
    u.check_compatible(v)?;
    if radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("radii must increase".into()));
    }
    let bound = u.bound_m.max(v.bound_m);
    let speed_ratios = radii
        .iter()
        .map(|&r| lipschitz_constant(flux, r, bound).map(|n| (r, n, n / r)))
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = speed_ratios.iter().map(|s| s.2).collect();
    let trends_down = ratios.windows(2).all(|w| w[1] <= w[0])
        && (ratios.len() < 2 || ratios.last() < ratios.first() || ratios.iter().all(|&r| r == 0.0));
    let masses: Vec<(f64, f64)> = (0..u.n_levels())
        .map(|l| {
            let d: f64 = u
                .slab(l)
                .iter()
                .zip(v.slab(l))
                .map(|(a, b)| (a - b).abs())
                .sum();
            (u.times[l], d * u.dx().powi(u.dim() as i32))
        })
        .collect();
    let values: Vec<f64> = masses.iter().map(|m| m.1).collect();
    let raw = max_rise(&values);
    let cells = u.grid.n_cells();
    let rise = floored_rise(&values, cells);
    let c = opts.constant(u, v);
    let tol = c * (u.dx() + u.max_dt());
    let report = ResidualReport::new(ReportKind::GlobalContraction, rise, tol, Criterion::AtMostTol)
        .with("raw_max_rise", raw)
        .with("roundoff_rel", summation_error(cells))
        .with("flux", flux.name.clone())
        .with("state_bound", bound)
        .with("radii", json_list(radii))
        .with("n_over_r", json_list(&ratios))
        .with("dx", u.dx())
        .with("dt", u.max_dt())
        .with("c_tol", c)
        .require(trends_down, "N(R)/R does not decrease toward 0");
    Ok(GlobalContraction {
        speed_ratios,
        masses,
        report,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteSpeedGap {
    /// max |u − v| over checked cells and levels.
    pub max_difference: f64,
    pub cells_checked: u64,
}

/// Compares two solutions of the same scheme and time step `dt` on the cells
/// strictly inside the numerical cone of B_R(center). After n steps a cell
/// depends on at most n neighbours per axis, so a cell whose center lies
/// within R − (n + 1)·Δx·√d of the center only sees data from inside B_R.
pub fn finite_speed_gap(u: &GridField, v: &GridField, center: &Vector, radius: f64, dt: f64) -> Result<FiniteSpeedGap> {
    u.check_compatible(v)?;
    if !(dt > 0.0) || !(radius > 0.0) {
        return Err(Error::InvalidArgument("finite_speed_gap needs dt > 0 and R > 0".into()));
    }
    let g = &u.grid;
    let reach = g.dx() * (g.dim as f64).sqrt();
    let mut out = FiniteSpeedGap {
        max_difference: 0.0,
        cells_checked: 0,
    };
    for (level, &t) in u.times.iter().enumerate() {
        let steps = (t / dt - 1e-9).ceil().max(0.0);
        let r = radius - (steps + 1.0) * reach;
        if r <= 0.0 {
            break;
        }
        let (su, sv) = (u.slab(level), v.slab(level));
        for idx in 0..su.len() {
            let c = g.center(idx);
            if (c[0] - center[0]).hypot(c[1] - center[1]) < r {
                out.cells_checked += 1;
                out.max_difference = out.max_difference.max((su[idx] - sv[idx]).abs());
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDistance {
    pub a: usize,
    pub b: usize,
    pub coarse: f64,
    pub fine: f64,
}

impl PairDistance {
    /// coarse/fine, `None` when both are zero.
    pub fn ratio(&self) -> Option<f64> {
        if self.coarse == 0.0 && self.fine == 0.0 {
            None
        } else {
            Some(self.coarse / self.fine)
        }
    }

    pub fn shrinks(&self, factor: f64) -> bool {
        self.fine * factor <= self.coarse
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessTable {
    pub dx: [f64; 2],
    pub t_end: f64,
    pub distances: Vec<PairDistance>,
    /// L¹ error against the oracle per variant, (coarse, fine).
    pub oracle_errors: Vec<(f64, f64)>,
    pub report: ResidualReport,
}

/// Exact cell averages at time t on a grid, used as a reference solution.
pub type Oracle<'a> = &'a (dyn Fn(&Grid, f64) -> Vec<f64> + Sync);

/// Solves from the same data under every scheme variant on `grid` and on the
/// grid with Δx halved, and compares pairwise L¹ distances at t_end.
pub fn uniqueness_experiment(
    flux: &FluxSpec,
    u0: &InitialData,
    grid: &Grid,
    seeds: &[SchemeConfig],
    oracle: Option<Oracle<'_>>,
    oracle_ratio: f64,
) -> Result<UniquenessTable> {
    if seeds.len() < 2 {
        return Err(Error::InvalidArgument("need at least two scheme variants".into()));
    }
    let t_end = seeds[0].t_end;
    if seeds.iter().any(|s| s.t_end != t_end) {
        return Err(Error::InvalidArgument("all variants must share t_end".into()));
    }
    let grids = [*grid, grid.refined(2)];
    let jobs: Vec<(usize, usize)> = (0..2)
        .flat_map(|g| (0..seeds.len()).map(move |s| (g, s)))
        .collect();
    // order-preserving parallel map, one solve per job
    let finals: Vec<Vec<f64>> = jobs
        .par_iter()
        .map(|&(g, s)| {
            let f = solve(flux, u0, &grids[g], &seeds[s].with_store_every(usize::MAX))?;
            Ok(f.slab(f.n_levels() - 1).to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    let n = seeds.len();
    let l1 = |a: &[f64], b: &[f64], g: &Grid| -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() * g.dx().powi(g.dim as i32)
    };
    let mut distances = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            distances.push(PairDistance {
                a,
                b,
                coarse: l1(&finals[a], &finals[b], &grids[0]),
                fine: l1(&finals[n + a], &finals[n + b], &grids[1]),
            });
        }
    }
    let mut oracle_errors = Vec::new();
    if let Some(ex) = oracle {
        let refs = [ex(&grids[0], t_end), ex(&grids[1], t_end)];
        for s in 0..n {
            oracle_errors.push((
                l1(&finals[s], &refs[0], &grids[0]),
                l1(&finals[n + s], &refs[1], &grids[1]),
            ));
        }
    }
    let ratios: Vec<f64> = distances.iter().filter_map(|d| d.ratio()).collect();
    let value = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let value = if value.is_finite() { value } else { REFINEMENT_RATIO };
    let oracle_ok = oracle_errors
        .iter()
        .all(|&(c, f)| f * oracle_ratio <= c);
    let all_shrink = distances.iter().all(|d| d.shrinks(REFINEMENT_RATIO));
    let oracle_ratios: Vec<f64> = oracle_errors.iter().map(|&(c, f)| c / f).collect();
    let report = ResidualReport::new(ReportKind::Uniqueness, value, REFINEMENT_RATIO, Criterion::AtLeastTol)
        .with("flux", flux.name.clone())
        .with("t_end", t_end)
        .with("dx", json_list(&[grids[0].dx(), grids[1].dx()]))
        .with("variants", seeds.len() as u64)
        .with(
            "pair_distances",
            Value::from(
                distances
                    .iter()
                    .map(|d| serde_json::to_value(d).expect("serializable"))
                    .collect::<Vec<_>>(),
            ),
        )
        .with("oracle_error_ratios", json_list(&oracle_ratios))
        .with("oracle_ratio_required", oracle_ratio)
        .require(all_shrink, "a pairwise distance did not shrink")
        .require(oracle_ok, "oracle error did not shrink");
    Ok(UniquenessTable {
        dx: [grids[0].dx(), grids[1].dx()],
        t_end,
        distances,
        oracle_errors,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::catalog_lookup;
    use crate::solver::{Scheme, Viscosity};

    fn burgers() -> FluxSpec {
        catalog_lookup("burgers1d").unwrap()
    }

    #[test]
    fn roundoff_floor() {
        assert_eq!(above_roundoff(1e-16, 0.2, 0.2, 100), 0.0);
        assert_eq!(above_roundoff(1e-10, 0.2, 0.2, 100), 1e-10);
        assert_eq!(above_roundoff(-1.0, 0.2, 0.2, 100), 0.0);
    }

    #[test]
    fn rise_and_increment() {
        assert_eq!(max_increment(&[3.0, 2.0, 2.5, 1.0]), 0.5);
        assert_eq!(max_increment(&[1.0]), 0.0);
        assert_eq!(max_rise(&[3.0, 1.0, 2.0, 1.5, 2.2]), 1.2000000000000002);
    }

    #[test]
    fn identical_fields_have_zero_profile() {
        let g = Grid::line(-3.0, 3.0, 120).unwrap();
        let cfg = SchemeConfig::rusanov(0.9, 1.0);
        let data = InitialData::Box {
            height: 1.0,
            lower: -0.5,
            upper: 0.0,
        };
        let u = solve(&burgers(), &data, &g, &cfg).unwrap();
        let p = cone_contraction_profile(&u, &u, &burgers(), 2.0, &ContractionOptions::default()).unwrap();
        assert!(p.rows.iter().all(|r| r.l1_mass == 0.0));
        assert!(p.report.passed);
        assert_eq!(p.speed, 1.0);
        let gc = global_contraction_check(&u, &u, &burgers(), &[1.0, 2.0, 4.0, 8.0], &ContractionOptions::default()).unwrap();
        let ratios: Vec<f64> = gc.speed_ratios.iter().map(|s| s.2).collect();
        assert_eq!(ratios, vec![1.0, 0.5, 0.25, 0.125]);
        assert!(gc.report.passed);
    }

    #[test]
    fn translated_solutions_keep_their_distance() {
        let g = Grid::line(-4.0, 4.0, 400).unwrap();
        // ends before the rarefaction head meets the shock, where TV starts to drop
        let cfg = SchemeConfig::rusanov(0.9, 0.5);
        let u0 = InitialData::Box { height: 1.0, lower: -0.5, upper: 0.0 }.cell_averages(&g).unwrap();
        let mut shifted = vec![0.0; u0.len()];
        shifted[1..].copy_from_slice(&u0[..u0.len() - 1]);
        let u = solve(&burgers(), &InitialData::Cells(u0), &g, &cfg).unwrap();
        let v = solve(&burgers(), &InitialData::Cells(shifted), &g, &cfg).unwrap();
        let gc = global_contraction_check(&u, &v, &burgers(), &[1.0, 2.0], &ContractionOptions::default()).unwrap();
        let d0 = gc.masses[0].1;
        for &(_, d) in &gc.masses {
            assert!((d - d0).abs() <= 1e-12, "{d} vs {d0}");
        }
    }

    #[test]
    fn expansion_shock_violates_cone_contraction() {
        use crate::verify::synth::{burgers_riemann_field, moving_jump_field, uniform_times};
        let g = Grid::line(-3.0, 3.0, 1200).unwrap();
        let times = uniform_times(1.0, 0.005);
        let fan = burgers_riemann_field(0.0, 1.0, 0.0, &g, &times).unwrap();
        let jump = moving_jump_field(0.0, 1.0, 0.0, 0.5, &g, &times).unwrap();
        let p = cone_contraction_profile(&fan, &jump, &burgers(), 2.0, &ContractionOptions::default()).unwrap();
        assert_eq!(p.rows[0].l1_mass, 0.0);
        // the distance grows like t/4
        assert!((p.max_rise - 0.25).abs() < 1e-3, "{}", p.max_rise);
        assert!(!p.report.passed);
        let ok = cone_contraction_profile(&fan, &fan, &burgers(), 2.0, &ContractionOptions::default()).unwrap();
        assert!(ok.report.passed);
    }

    #[test]
    fn perturbation_outside_the_ball_is_invisible_inside_the_cone() {
        let g = Grid::line(-2.0, 2.0, 400).unwrap();
        let cfg = SchemeConfig::rusanov(0.9, 0.5);
        let base = InitialData::Box { height: 1.0, lower: -0.5, upper: 0.0 };
        let mut cells = base.cell_averages(&g).unwrap();
        for (i, c) in cells.iter_mut().enumerate() {
            if g.center(i)[0] > 1.2 {
                *c = 0.7;
            }
        }
        let u = solve(&burgers(), &base, &g, &cfg).unwrap();
        let v = solve(&burgers(), &InitialData::Cells(cells), &g, &cfg).unwrap();
        let dt = u.times[1] - u.times[0];
        let gap = finite_speed_gap(&u, &v, &[0.0, 0.0], 1.2, dt).unwrap();
        assert_eq!(gap.max_difference, 0.0);
        assert!(gap.cells_checked > 1000);
        // a radius reaching past the perturbation sees it
        let wide = finite_speed_gap(&u, &v, &[0.0, 0.0], 1.9, dt).unwrap();
        assert!(wide.max_difference > 0.0);
    }

    #[test]
    fn state_independent_flux_keeps_differences() {
        let f = catalog_lookup("xsquared1d").unwrap();
        let g = Grid::line(-1.0, 1.0, 100).unwrap();
        let cfg = SchemeConfig::rusanov(0.9, 0.5);
        let u = solve(&f, &InitialData::Constant { value: 0.0 }, &g, &cfg).unwrap();
        let v = solve(&f, &InitialData::Box { height: 0.5, lower: -0.2, upper: 0.2 }, &g, &cfg).unwrap();
        let gc = global_contraction_check(&u, &v, &f, &[1.0, 2.0], &ContractionOptions::default()).unwrap();
        assert!(gc.speed_ratios.iter().all(|s| s.1 == 0.0));
        let d0 = gc.masses[0].1;
        assert!(gc.masses.iter().all(|&(_, d)| (d - d0).abs() < 1e-12));
        assert!(gc.report.passed);
    }

    #[test]
    fn empty_cone_is_an_error() {
        let g = Grid::line(-1.0, 1.0, 10).unwrap();
        let u = GridField::new(g, vec![2.0, 3.0], vec![vec![0.5; 10]; 2]).unwrap();
        assert!(matches!(
            cone_contraction_profile(&u, &u, &burgers(), 0.5, &ContractionOptions::default()),
            Err(Error::EmptyCone(_))
        ));
    }

    #[test]
    fn identical_variants_have_zero_distance() {
        let g = Grid::line(-1.0, 1.0, 50).unwrap();
        let cfg = SchemeConfig::rusanov(0.9, 0.3);
        let data = InitialData::Riemann {
            u_left: 1.0,
            u_right: 0.0,
            x0: 0.0,
        };
        let t = uniqueness_experiment(&burgers(), &data, &g, &[cfg, cfg], None, 1.4).unwrap();
        assert_eq!(t.distances[0].coarse, 0.0);
        assert!(t.report.passed);
        let visc = cfg.with_scheme(Scheme::Viscous {
            viscosity: Viscosity::CellMultiple(2.0),
        });
        assert!(uniqueness_experiment(&burgers(), &data, &g, &[cfg], None, 1.4).is_err());
        let mut late = visc;
        late.t_end = 0.4;
        assert!(uniqueness_experiment(&burgers(), &data, &g, &[cfg, late], None, 1.4).is_err());
    }
}
