//! Weak entropy inequality on a computed shock and on an inadmissible
//! expansion shock, swept over Kruzkov and smooth entropies.

use entropy_lab::flux::catalog_lookup;
use entropy_lab::mollifier::BumpTestFunction;
use entropy_lab::solver::{solve, Grid, InitialData, SchemeConfig};
use entropy_lab::verify::synth::{moving_jump_field, uniform_times};
use entropy_lab::verify::{entropy_sweep, sweep_summary, WeakFormOptions};

fn main() -> entropy_lab::Result<()> {
    let f = catalog_lookup("burgers1d")?;
    let grid = Grid::line(-1.0, 1.0, 800)?;
    let opts = WeakFormOptions::default();

    let u0 = InitialData::Riemann { u_left: 1.0, u_right: 0.0, x0: 0.0 };
    let u = solve(&f, &u0, &grid, &SchemeConfig::rusanov(0.9, 0.6))?;
    let phi = BumpTestFunction::interval(0.15, 0.3, 0.3, 0.2)?;
    let sweep = entropy_sweep(&u, &f, &phi, &opts)?;
    for r in &sweep {
        println!("shock      {:<22} {:+.3e}  (>= -{:.2e})", r.metadata["entropy"].as_str().unwrap_or(""), r.value, r.tolerance);
    }
    let s = sweep_summary(&sweep).expect("non-empty");
    println!("shock worst {:+.3e} passed {}", s.value, s.passed);

    // u = 0 | 1 jumping at speed 1/2: a weak solution that violates the
    // entropy condition. Kruzkov entropies with k0 between the states see it
    // once Δx + Δt is small against the defect.
    let fine = Grid::line(-1.0, 1.0, 4000)?;
    let bad = moving_jump_field(0.0, 1.0, 0.0, 0.5, &fine, &uniform_times(0.6, 1.0 / 2000.0))?;
    let sweep = entropy_sweep(&bad, &f, &phi, &opts)?;
    let s = sweep_summary(&sweep).expect("non-empty");
    println!("expansion shock worst {:+.3e} tol {:.2e} passed {}", s.value, s.tolerance, s.passed);
    Ok(())
}
