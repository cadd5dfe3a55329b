//! ‖u(t) − v(t)‖_{L¹(B_{R−tN})} along the shrinking cone: non-increasing for
//! entropy solutions, rising for an expansion shock against its entropy
//! solution.

use entropy_lab::flux::catalog_lookup;
use entropy_lab::solver::{shared_config, solve, Grid, InitialData, SchemeConfig};
use entropy_lab::verify::synth::{burgers_riemann_field, moving_jump_field, uniform_times};
use entropy_lab::verify::{cone_contraction_profile, ContractionOptions};

fn main() -> entropy_lab::Result<()> {
    let f = catalog_lookup("burgers1d")?;
    let grid = Grid::line(-3.0, 3.0, 1200)?;
    let a = InitialData::Box { height: 1.0, lower: -0.5, upper: 0.0 };
    let b = InitialData::Box { height: 1.0, lower: -0.4, upper: 0.1 };
    let cfg = shared_config(&f, &grid, &SchemeConfig::rusanov(0.9, 2.0), &[&a, &b])?;
    let u = solve(&f, &a, &grid, &cfg)?;
    let v = solve(&f, &b, &grid, &cfg)?;
    let p = cone_contraction_profile(&u, &v, &f, 2.0, &ContractionOptions::default())?;
    println!("speed N = {}", p.speed);
    for row in p.rows.iter().step_by(40) {
        println!("t {:.3}  radius {:.3}  mass {:.6}", row.t, row.radius, row.l1_mass);
    }
    println!("max rise {:.3e} (tol {:.3e}) passed {}", p.max_rise, p.report.tolerance, p.report.passed);

    let fine = Grid::line(-3.0, 3.0, 1200)?;
    // Exact Burgers rarefaction against the inadmissible jump of the same data.
    let times = uniform_times(1.0, 0.005);
    let entropic = burgers_riemann_field(0.0, 1.0, 0.0, &fine, &times)?;
    let shock = moving_jump_field(0.0, 1.0, 0.0, 0.5, &fine, &times)?;
    let q = cone_contraction_profile(&entropic, &shock, &f, 2.0, &ContractionOptions::default())?;
    println!("expansion shock: max rise {:.3e} (tol {:.3e}) passed {}", q.max_rise, q.report.tolerance, q.report.passed);
    Ok(())
}
