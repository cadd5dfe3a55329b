//! Acceptance suite. One PASS/FAIL line per criterion; exits non-zero if any
//! criterion fails.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use entropy_lab::entropy::{
    k0_sweep, kruzkov_div_limit_deficit, kruzkov_limit_deficit, q_build_ibp, q_build_quadrature, CoshEntropy,
    Quadratic, RegularizedAbs, SmoothEntropy,
};
use entropy_lab::flux::{catalog_lookup, lipschitz_constant, FluxSpec};
use entropy_lab::mollifier::{normalization, omega, BumpTestFunction, Mollifier};
use entropy_lab::solver::{
    exact_riemann_burgers_average, rusanov_entropy_defect, shared_config, solve, Boundary, Grid, GridField,
    InitialData, Scheme, SchemeConfig, Stepper, Viscosity,
};
use entropy_lab::verify::synth::{burgers_riemann_field, moving_jump_field, uniform_times};
use entropy_lab::verify::{
    cone_contraction_profile, doubling_diagnostics, entropy_sweep, finite_speed_gap, global_contraction_check,
    uniqueness_experiment, ContractionOptions, DoublingOptions, WeakFormOptions,
};
use entropy_lab::Result;

type Outcome = Result<(bool, String)>;

fn flux(name: &str) -> FluxSpec {
    catalog_lookup(name).expect("catalog flux")
}

/// Composite trapezoid rule; accurate to near machine precision for
/// integrands that vanish with all derivatives at both ends.
fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h)).sum();
    h * (inner + 0.5 * (f(a) + f(b)))
}

fn mollifier_normalization() -> Outcome {
    let mut worst: f64 = 0.0;
    for eps in [1.0, 0.1, 0.01] {
        let m1 = Mollifier::new(1, eps)?;
        worst = worst.max((trapezoid(|x| m1.value(&[x, 0.0]), -eps, eps, 20_000) - 1.0).abs());
        let m2 = Mollifier::new(2, eps)?;
        let n = 1500;
        let h = 2.0 * eps / n as f64;
        let mut mass = 0.0;
        for i in 0..=n {
            let x = -eps + i as f64 * h;
            mass += trapezoid(|y| m2.value(&[x, y]), -eps, eps, n) * if i == 0 || i == n { 0.5 } else { 1.0 };
        }
        worst = worst.max((mass * h - 1.0).abs());
        worst = worst.max((trapezoid(|s| omega(eps, s), -eps, eps, 20_000) - 1.0).abs());
    }
    let raw = trapezoid(|x| if x.abs() < 1.0 { (1.0 / (x * x - 1.0)).exp() } else { 0.0 }, -1.0, 1.0, 200_000);
    let c_err = (normalization(1) - 1.0 / raw).abs();
    Ok((
        worst <= 1e-10 && c_err <= 1e-8,
        format!("max |mass - 1| = {worst:.2e} (<= 1e-10), |C_1 - 1/quadrature| = {c_err:.2e} (<= 1e-8)"),
    ))
}

fn entropy_flux_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let entropies: [Box<dyn SmoothEntropy>; 3] = [
        Box::new(RegularizedAbs { k0: 0.2, n: 16 }),
        Box::new(Quadratic { a: 0.5 }),
        Box::new(CoshEntropy { k0: -0.3 }),
    ];
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for name in ["burgers1d", "product1d", "rotating2d"] {
        let f = flux(name);
        for eta in &entropies {
            for _ in 0..100 {
                let x = [rng.gen_range(-2.0..2.0), if f.dim == 2 { rng.gen_range(-2.0..2.0) } else { 0.0 }];
                let k = rng.gen_range(-1.5..1.5);
                let k0 = rng.gen_range(-1.5..1.5);
                let a = q_build_quadrature(&f, &|w| eta.d1(w), k0, &x, k)?;
                let b = q_build_ibp(&f, eta.as_ref(), k0, &x, k)?;
                worst = worst.max((a[0] - b[0]).abs()).max((a[1] - b[1]).abs());
                count += 1;
            }
        }
    }
    Ok((worst <= 1e-8, format!("{count} evaluations, max |q_quad - q_ibp| = {worst:.2e} (<= 1e-8)")))
}

fn kruzkov_limits() -> Outcome {
    let n_list = [1u32, 4, 16, 64, 256];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut rate_ok = true;
    let mut div_ok = true;
    let mut lines = Vec::new();
    for name in ["burgers1d", "product1d", "rotating2d"] {
        let f = flux(name);
        let mut states = Vec::new();
        for _ in 0..20 {
            let x = [rng.gen_range(-1.5..1.5), if f.dim == 2 { rng.gen_range(-1.5..1.5) } else { 0.0 }];
            states.push((x, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
        let mut devs = Vec::new();
        for &(x, k, k0) in &states {
            devs.push(kruzkov_limit_deficit(&f, k0, &x, k, &n_list)?);
            let dd = kruzkov_div_limit_deficit(&f, k0, &x, k, &n_list)?;
            div_ok &= dd.windows(2).all(|w| w[1] <= w[0]);
        }
        // C fitted at n = 1 over the sample states
        let c = devs.iter().map(|d| d[0]).fold(0.0, f64::max);
        let mut worst_scaled: f64 = 0.0;
        let mut failing = 0;
        for d in &devs {
            let mut fails = false;
            for (i, &n) in n_list.iter().enumerate() {
                let scaled = d[i] * (n as f64).sqrt();
                worst_scaled = worst_scaled.max(scaled);
                fails |= scaled > c;
            }
            failing += fails as usize;
        }
        rate_ok &= failing == 0;
        lines.push(format!("{name}: C = {c:.4}, max dev*sqrt(n) = {worst_scaled:.4}, {failing}/20 states exceed"));
    }
    Ok((
        rate_ok && div_ok,
        format!(
            "rate bound with C fitted at n=1 {}; div_x deviation decreasing {}; {}",
            if rate_ok { "holds" } else { "violated" },
            div_ok,
            lines.join("; ")
        ),
    ))
}

fn discrete_entropy_inequality() -> Outcome {
    let f = flux("burgers1d");
    let grid = Grid::line(-1.0, 1.0, 400)?;
    let data = [
        InitialData::Riemann { u_left: 1.0, u_right: 0.0, x0: 0.0 },
        InitialData::Riemann { u_left: 0.0, u_right: 1.0, x0: 0.0 },
        InitialData::Riemann { u_left: -1.0, u_right: 1.0, x0: 0.1 },
        InitialData::Box { height: 1.0, lower: -0.5, upper: 0.2 },
        InitialData::Sine { amplitude: 0.8, frequency: 1.0, offset: 0.1 },
    ];
    let cfg = SchemeConfig::rusanov(0.9, 1.0);
    let ks = k0_sweep(1.0, 81);
    let mut worst = f64::NEG_INFINITY;
    let mut steps = 0;
    for u0 in &data {
        let mut st = Stepper::new(&f, u0, &grid, &cfg)?;
        loop {
            let before = st.state().to_vec();
            let Some(dt) = st.step()? else { break };
            steps += 1;
            for &k in &ks {
                worst = worst.max(rusanov_entropy_defect(&f, &grid, Boundary::Outflow, &before, st.state(), dt, k)?);
            }
        }
    }
    Ok((
        worst <= 1e-12,
        format!("5 data sets, {steps} steps, {} k0 values: max cell violation {worst:.2e} (<= 1e-12)", ks.len()),
    ))
}

fn weak_entropy_residual() -> Outcome {
    let f = flux("burgers1d");
    let grid = Grid::line(-1.0, 1.0, 4000)?;
    let times = uniform_times(0.6, 1.0 / 2000.0);
    let phi = BumpTestFunction::interval(0.15, 0.3, 0.3, 0.2)?;
    let opts = WeakFormOptions::default();
    let good = burgers_riemann_field(1.0, 0.0, 0.0, &grid, &times)?;
    let good_sweep = entropy_sweep(&good, &f, &phi, &opts)?;
    let good_ok = good_sweep.iter().all(|r| r.value >= -r.tolerance);
    let good_min = good_sweep.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
    let bad = moving_jump_field(0.0, 1.0, 0.0, 0.5, &grid, &times)?;
    let bad_sweep = entropy_sweep(&bad, &f, &phi, &opts)?;
    let caught = bad_sweep.iter().filter(|r| r.value < -r.tolerance).count();
    let bad_min = bad_sweep.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
    Ok((
        good_ok && caught > 0,
        format!(
            "entropic shock min residual {good_min:+.2e} (tol {:.2e}); expansion shock min {bad_min:+.2e}, {caught}/{} entropies below -tol",
            good_sweep[0].tolerance,
            bad_sweep.len()
        ),
    ))
}

/// The shifted Burgers box pair on [-3, 3] at Δx = 1/cells_per_unit.
fn box_pair(cells_per_unit: usize) -> Result<(FluxSpec, GridField, GridField)> {
    let f = flux("burgers1d");
    let grid = Grid::line(-3.0, 3.0, 6 * cells_per_unit)?;
    let a = InitialData::Box { height: 1.0, lower: -0.5, upper: 0.0 };
    let b = InitialData::Box { height: 1.0, lower: -0.4, upper: 0.1 };
    let cfg = shared_config(&f, &grid, &SchemeConfig::rusanov(0.9, 2.0), &[&a, &b])?;
    let u = solve(&f, &a, &grid, &cfg)?;
    let v = solve(&f, &b, &grid, &cfg)?;
    Ok((f, u, v))
}

fn shrinks(coarse: f64, fine: f64) -> bool {
    fine == 0.0 || coarse / fine >= 1.5
}

fn cone_contraction(pairs: &[(FluxSpec, GridField, GridField); 2]) -> Outcome {
    let opts = ContractionOptions::default();
    let coarse = cone_contraction_profile(&pairs[0].1, &pairs[0].2, &pairs[0].0, 2.0, &opts)?;
    let fine = cone_contraction_profile(&pairs[1].1, &pairs[1].2, &pairs[1].0, 2.0, &opts)?;
    let raw = |p: &entropy_lab::verify::ConeProfile| p.report.metadata["raw_max_increment"].as_f64().unwrap_or(f64::NAN);
    Ok((
        fine.report.passed && shrinks(coarse.report.value, fine.report.value),
        format!(
            "N = {}, dx=1/400: max rise {:.2e} (tol {:.2e}); dx=1/200: {:.2e}; raw increments {:.1e} / {:.1e}",
            fine.speed,
            fine.report.value,
            fine.report.tolerance,
            coarse.report.value,
            raw(&coarse),
            raw(&fine)
        ),
    ))
}

fn global_contraction(pairs: &[(FluxSpec, GridField, GridField); 2]) -> Outcome {
    let opts = ContractionOptions::default();
    let radii = [1.0, 2.0, 4.0, 8.0];
    let coarse = global_contraction_check(&pairs[0].1, &pairs[0].2, &pairs[0].0, &radii, &opts)?;
    let fine = global_contraction_check(&pairs[1].1, &pairs[1].2, &pairs[1].0, &radii, &opts)?;
    let ratios: Vec<f64> = fine.speed_ratios.iter().map(|s| s.2).collect();
    let exact = ratios == [1.0, 0.5, 0.25, 0.125];
    Ok((
        fine.report.passed && exact && shrinks(coarse.report.value, fine.report.value),
        format!(
            "N/R = {ratios:?}; largest rise {:.2e} (tol {:.2e}) at dx=1/400, {:.2e} at dx=1/200",
            fine.report.value, fine.report.tolerance, coarse.report.value
        ),
    ))
}

fn uniqueness_proxy() -> Outcome {
    let f = flux("burgers1d");
    let grid = Grid::line(-1.0, 1.0, 400)?;
    let t = 0.5;
    let seeds = [
        SchemeConfig::rusanov(0.9, t),
        SchemeConfig::rusanov(0.45, t),
        SchemeConfig::rusanov(0.9, t).with_scheme(Scheme::Viscous { viscosity: Viscosity::CellMultiple(2.0) }),
    ];
    let mut ok = true;
    let mut lines = Vec::new();
    for (ul, ur, what) in [(1.0, 0.0, "shock"), (0.0, 1.0, "rarefaction")] {
        let u0 = InitialData::Riemann { u_left: ul, u_right: ur, x0: 0.0 };
        let exact = move |g: &Grid, t: f64| -> Vec<f64> {
            (0..g.nx).map(|i| exact_riemann_burgers_average(ul, ur, g.interface(i), g.interface(i + 1), t)).collect()
        };
        let table = uniqueness_experiment(&f, &u0, &grid, &seeds, Some(&exact), 1.4)?;
        let pair_min = table.distances.iter().map(|d| d.coarse / d.fine).fold(f64::INFINITY, f64::min);
        let oracle_min = table.oracle_errors.iter().map(|&(c, fi)| c / fi).fold(f64::INFINITY, f64::min);
        ok &= table.report.passed && pair_min >= 1.5 && oracle_min >= 1.4;
        lines.push(format!("{what}: min pair ratio {pair_min:.3} (>= 1.5), min oracle ratio {oracle_min:.3} (>= 1.4)"));
    }
    Ok((ok, lines.join("; ")))
}

fn finite_speed() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    let cases: [(&str, usize, f64, f64); 3] = [("burgers1d", 800, 2.0, 0.8), ("product1d", 800, 2.0, 0.5), ("rotating2d", 120, 1.5, 0.3)];
    for (name, nx, radius, t_end) in cases {
        let f = flux(name);
        let grid = if f.dim == 1 { Grid::line(-4.0, 4.0, nx)? } else { Grid::new(2, -3.0, 3.0, nx)? };
        let base = InitialData::Sine { amplitude: 0.7, frequency: 0.5, offset: 0.2 };
        let mut cells = base.cell_averages(&grid)?;
        let max0 = cells.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (i, c) in cells.iter_mut().enumerate() {
            let x = grid.center(i);
            if x[0].hypot(x[1]) > radius + grid.dx() {
                *c = -*c;
            }
        }
        let max1 = cells.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let pert = InitialData::Cells(cells);
        let cfg = shared_config(&f, &grid, &SchemeConfig::rusanov(0.9, t_end), &[&base, &pert])?;
        let u = solve(&f, &base, &grid, &cfg)?;
        let v = solve(&f, &pert, &grid, &cfg)?;
        let dt = u.times[1] - u.times[0];
        let gap = finite_speed_gap(&u, &v, &[0.0, 0.0], radius, dt)?;
        // outside the cone the perturbation is visible
        let wide = finite_speed_gap(&u, &v, &[0.0, 0.0], radius + 1.0, dt)?;
        ok &= max0 == max1 && gap.cells_checked > 0 && gap.max_difference == 0.0 && wide.max_difference > 0.0;
        lines.push(format!(
            "{name}: {} cells, max |u - v| = {:e}, beyond the ball {:.2e}",
            gap.cells_checked, gap.max_difference, wide.max_difference
        ));
    }
    Ok((ok, lines.join("; ")))
}

fn doubling() -> Outcome {
    let f = flux("product1d");
    let grid = Grid::line(-2.0, 2.0, 3200)?;
    let a = InitialData::Sine { amplitude: 0.5, frequency: 0.5, offset: 0.0 };
    let b = InitialData::Sine { amplitude: 0.5, frequency: 0.5, offset: 0.3 };
    let base = SchemeConfig::rusanov(0.9, 0.4).with_boundary(Boundary::Periodic);
    let cfg = shared_config(&f, &grid, &base, &[&a, &b])?;
    let u = solve(&f, &a, &grid, &cfg)?;
    let v = solve(&f, &b, &grid, &cfg)?;
    let eps = [0.1, 0.05, 0.025];
    let samples: Vec<_> = (0..10).map(|j| ([-1.2 + 0.25 * j as f64, 0.0], 0.15 + 0.01 * j as f64)).collect();
    let table = doubling_diagnostics(&u, &v, &f, &eps, &samples, &DoublingOptions::default())?;
    let ok = (0..4).all(|j| table.decreasing(j));
    let per_sample: Vec<usize> = (0..4)
        .map(|j| {
            table
                .rows
                .chunks(eps.len())
                .filter(|c| c.windows(2).all(|w| w[1].deviations[j] <= w[0].deviations[j]))
                .count()
        })
        .collect();
    let fmt = |d: &[f64; 4]| format!("[{:.2e} {:.2e} {:.2e} {:.2e}]", d[0], d[1], d[2], d[3]);
    let maxes: Vec<String> = table.max_deviation.iter().map(fmt).collect();
    Ok((
        ok,
        format!(
            "max deviation of I1..I4 per eps {}; samples monotone per integrand {per_sample:?} of 10",
            maxes.join(" -> ")
        ),
    ))
}

fn main() {
    let lip = lipschitz_constant(&flux("burgers1d"), 2.0, 1.0).expect("lipschitz");
    println!("burgers1d N(R=2, M=1) = {lip}");
    let t0 = Instant::now();
    let pairs = match (box_pair(200), box_pair(400)) {
        (Ok(a), Ok(b)) => Some([a, b]),
        (Err(e), _) | (_, Err(e)) => {
            println!("box pair solve failed: {e}");
            None
        }
    };
    let with_pairs = |check: fn(&[(FluxSpec, GridField, GridField); 2]) -> Outcome| -> Outcome {
        match &pairs {
            Some(p) => check(p),
            None => Ok((false, "solutions unavailable".into())),
        }
    };
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("mollifier normalization", Box::new(mollifier_normalization)),
        ("entropy flux identity", Box::new(entropy_flux_identity)),
        ("Kruzkov limits", Box::new(kruzkov_limits)),
        ("discrete entropy inequality", Box::new(discrete_entropy_inequality)),
        ("weak entropy residual", Box::new(weak_entropy_residual)),
        ("cone contraction", Box::new(move || with_pairs(cone_contraction))),
        ("global contraction", Box::new(move || with_pairs(global_contraction))),
        ("uniqueness proxy", Box::new(uniqueness_proxy)),
        ("finite speed of propagation", Box::new(finite_speed)),
        ("doubling diagnostics", Box::new(doubling)),
    ];
    println!("box pair solves: {:.1?}", t0.elapsed());
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += (!ok) as usize;
        println!(
            "criterion {:>2} {} {name} ({:.1?}): {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            t.elapsed()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
