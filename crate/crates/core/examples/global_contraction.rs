//! N(R)/R → 0 and the full-domain L¹ distance t ↦ ‖u(t) − v(t)‖_{L¹}.

use entropy_lab::flux::catalog_lookup;
use entropy_lab::solver::{shared_config, solve, Grid, InitialData, SchemeConfig};
use entropy_lab::verify::{global_contraction_check, ContractionOptions};

fn main() -> entropy_lab::Result<()> {
    for (name, a, b) in [
        (
            "burgers1d",
            InitialData::Box { height: 1.0, lower: -0.5, upper: 0.0 },
            InitialData::Box { height: 1.0, lower: -0.4, upper: 0.1 },
        ),
        (
            "product1d",
            InitialData::Box { height: 0.8, lower: -0.5, upper: 0.5 },
            InitialData::Box { height: 0.5, lower: -0.3, upper: 0.6 },
        ),
    ] {
        let f = catalog_lookup(name)?;
        let grid = Grid::line(-3.0, 3.0, 1200)?;
        let cfg = shared_config(&f, &grid, &SchemeConfig::rusanov(0.9, 1.0), &[&a, &b])?;
        let u = solve(&f, &a, &grid, &cfg)?;
        let v = solve(&f, &b, &grid, &cfg)?;
        let g = global_contraction_check(&u, &v, &f, &[1.0, 2.0, 4.0, 8.0], &ContractionOptions::default())?;
        println!("{name}: (R, N(R), N/R) = {:?}", g.speed_ratios);
        let (first, last) = (g.masses[0], g.masses[g.masses.len() - 1]);
        println!("  mass {:.6} at t={} -> {:.6} at t={:.3}", first.1, first.0, last.1, last.0);
        println!("  largest rise {:.3e} (tol {:.3e}) passed {}", g.report.value, g.report.tolerance, g.report.passed);
    }
    Ok(())
}
