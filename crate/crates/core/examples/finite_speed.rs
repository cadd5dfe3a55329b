//! Finite speed of propagation: changing the data outside B_R leaves the
//! solution inside the discrete cone untouched, to the last bit.

use entropy_lab::flux::{catalog_lookup, lipschitz_constant};
use entropy_lab::solver::{shared_config, solve, Grid, InitialData, SchemeConfig};
use entropy_lab::verify::finite_speed_gap;

fn main() -> entropy_lab::Result<()> {
    let f = catalog_lookup("product1d")?;
    let grid = Grid::line(-4.0, 4.0, 800)?;
    let a = InitialData::Sine { amplitude: 0.7, frequency: 0.5, offset: 0.0 };
    let radius = 2.0;
    // Same data on B_R, a plateau of the same height outside.
    let mut cells = a.cell_averages(&grid)?;
    for (i, c) in cells.iter_mut().enumerate() {
        if grid.center(i)[0] > radius + grid.dx() {
            *c = 0.7;
        }
    }
    let b = InitialData::Cells(cells);
    let cfg = shared_config(&f, &grid, &SchemeConfig::rusanov(0.9, 0.8), &[&a, &b])?;
    let u = solve(&f, &a, &grid, &cfg)?;
    let v = solve(&f, &b, &grid, &cfg)?;
    let dt = u.times[1] - u.times[0];
    let n = lipschitz_constant(&f, radius, u.bound_m.max(v.bound_m))?;
    println!("N = {n:.4}, dt = {dt:.3e}");
    for r in [1.5, radius, 2.5] {
        let gap = finite_speed_gap(&u, &v, &[0.0, 0.0], r, dt)?;
        println!("R = {r}: {} cells checked, max |u - v| = {:e}", gap.cells_checked, gap.max_difference);
    }
    Ok(())
}
