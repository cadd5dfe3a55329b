use proptest::prelude::*;

use entropy_lab::entropy::{kruzkov_flux, make_kruzkov_pair};
use entropy_lab::flux::{catalog_lookup, lipschitz_constant, FluxSpec};
use entropy_lab::mollifier::{alpha, BumpTestFunction};
use entropy_lab::solver::io::{read_csv, read_slabs, write_csv, write_slabs};
use entropy_lab::solver::{Boundary, Grid, GridField, InitialData, SchemeConfig, Stepper};
use entropy_lab::verify::synth::constant_like;
use entropy_lab::verify::{entropy_residual, kato_lhs, WeakFormOptions};

fn flux(name: &str) -> FluxSpec {
    catalog_lookup(name).unwrap()
}

fn periodic(cfl: f64, t_end: f64, speed: f64) -> SchemeConfig {
    SchemeConfig::rusanov(cfl, t_end)
        .with_boundary(Boundary::Periodic)
        .with_speed_bound(speed)
}

/// One step from `u0` with a fixed speed bound so every state gets the same Δt.
fn one_step(f: &FluxSpec, grid: &Grid, u0: &[f64], speed: f64) -> Vec<f64> {
    step_at(0.9, f, grid, u0, speed)
}

/// With local λ, |∂F/∂u| reaches 2λ across opposite-sign jumps, so
/// monotonicity needs λΔt/Δx ≤ 1/4.
fn monotone_step(f: &FluxSpec, grid: &Grid, u0: &[f64], speed: f64) -> Vec<f64> {
    step_at(0.25, f, grid, u0, speed)
}

fn step_at(cfl: f64, f: &FluxSpec, grid: &Grid, u0: &[f64], speed: f64) -> Vec<f64> {
    let mut st = Stepper::new(f, &InitialData::Cells(u0.to_vec()), grid, &periodic(cfl, 1.0, speed)).unwrap();
    st.step().unwrap().unwrap();
    st.state().to_vec()
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn states(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rusanov_step_is_l1_contractive(u in states(64), v in states(64)) {
        let (f, speed) = (flux("burgers1d"), 1.0);
        let grid = Grid::line(-2.0, 2.0, 64).unwrap();
        let (su, sv) = (monotone_step(&f, &grid, &u, speed), monotone_step(&f, &grid, &v, speed));
        let before = l1(&u, &v);
        prop_assert!(l1(&su, &sv) <= before * (1.0 + 1e-12) + 1e-14);
    }

    #[test]
    fn rusanov_step_preserves_order(u in states(64), bump in states(64)) {
        // convex flux only: for sin(k) the local-speed flux is not monotone across large jumps
        let (f, speed) = (flux("burgers1d"), 1.0);
        let grid = Grid::line(-2.0, 2.0, 64).unwrap();
        let v: Vec<f64> = u.iter().zip(&bump).map(|(a, b)| (a + b.abs() * 0.5).min(1.0)).collect();
        let (su, sv) = (monotone_step(&f, &grid, &u, speed), monotone_step(&f, &grid, &v, speed));
        prop_assert!(su.iter().zip(&sv).all(|(a, b)| a <= b));
    }

    #[test]
    fn periodic_mass_is_conserved(u in states(80), name in prop::sample::select(vec!["burgers1d", "product1d", "xsquared1d"])) {
        let f = flux(name);
        let grid = Grid::line(-2.0, 2.0, 80).unwrap();
        let next = one_step(&f, &grid, &u, 2.6);
        let (m0, m1): (f64, f64) = (u.iter().sum(), next.iter().sum());
        prop_assert!((m0 - m1).abs() <= 1e-12 * (1.0 + u.iter().map(|x| x.abs()).sum::<f64>()));
    }

    #[test]
    fn homogeneous_flux_keeps_the_range(u in states(64)) {
        let f = flux("burgers1d");
        let grid = Grid::line(-1.0, 1.0, 64).unwrap();
        let next = one_step(&f, &grid, &u, 1.0);
        let lo = u.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(next.iter().all(|&x| lo <= x && x <= hi));
    }

    #[test]
    fn kato_against_a_constant_is_the_kruzkov_residual(u in states(40), c in -1.0f64..1.0, name in prop::sample::select(vec!["burgers1d", "burgers2d"])) {
        let f = flux(name);
        let opts = WeakFormOptions::default();
        let (field, phi) = if f.dim == 1 {
            let g = Grid::line(-1.0, 1.0, 40).unwrap();
            let data: Vec<Vec<f64>> = (0..6).map(|n| u.iter().map(|x| x * (1.0 - 0.1 * n as f64)).collect()).collect();
            let times = (0..6).map(|n| 0.1 * n as f64).collect();
            (GridField::new(g, times, data).unwrap(), BumpTestFunction::interval(0.0, 0.7, 0.25, 0.2).unwrap())
        } else {
            let g = Grid::new(2, -1.0, 1.0, 8).unwrap();
            let cells: Vec<f64> = (0..64).map(|i| u[i % 40] * if i % 3 == 0 { -1.0 } else { 1.0 }).collect();
            let data = vec![cells.clone(), cells.iter().map(|x| 0.9 * x).collect(), cells.iter().map(|x| 0.7 * x).collect()];
            (GridField::new(g, vec![0.0, 0.1, 0.2], data).unwrap(), BumpTestFunction::new(2, [0.0, 0.0], [0.6, 0.6], 0.1, 0.1).unwrap())
        };
        let k = kato_lhs(&field, &constant_like(&field, c), &f, &phi, &opts).unwrap();
        let e = entropy_residual(&field, &f, &make_kruzkov_pair(&f, c), &phi, &opts).unwrap();
        prop_assert!((k.value - e.value).abs() <= 1e-12, "{} vs {}", k.value, e.value);
    }

    #[test]
    fn kruzkov_flux_is_bounded_by_the_cone_speed(
        x in -2.0f64..2.0, y in -2.0f64..2.0, a in -1.0f64..1.0, b in -1.0f64..1.0,
        name in prop::sample::select(vec!["product1d", "rotating2d", "burgers2d", "abskink1d"]),
    ) {
        let f = flux(name);
        let r = 2.0;
        let p = if f.dim == 1 { [x, 0.0] } else { [x, y] };
        prop_assume!(p[0].hypot(p[1]) > 1e-9 && p[0].hypot(p[1]) <= r);
        let n = lipschitz_constant(&f, r, 1.0).unwrap();
        let q = kruzkov_flux(&f, &p, a, b);
        let norm = p[0].hypot(p[1]);
        let radial = (p[0] * q[0] + p[1] * q[1]) / norm;
        prop_assert!(radial.abs() <= n * (a - b).abs() * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn alpha_is_a_symmetric_cdf(h in 0.01f64..1.0, s in -1.5f64..1.5, d in 0.0f64..0.5) {
        let a = alpha(h, s * h);
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!((a + alpha(h, -s * h) - 1.0).abs() <= 1e-12);
        prop_assert!(alpha(h, s * h + d * h) >= a - 1e-15);
    }

    #[test]
    fn field_files_round_trip(u in prop::collection::vec(-1e3f64..1e3, 24), t in 0.0f64..10.0) {
        let g = Grid::line(-1.5, 2.5, 12).unwrap();
        let field = GridField::new(g, vec![0.0, t + 1e-3], vec![u[..12].to_vec(), u[12..].to_vec()]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let (csv, slab) = (dir.path().join("f.csv"), dir.path().join("f.slab"));
        write_csv(&field, &csv).unwrap();
        write_slabs(&field, &slab).unwrap();
        prop_assert_eq!(read_slabs(&slab).unwrap(), field.clone());
        prop_assert_eq!(read_csv(&csv).unwrap(), field);
    }
}
