//! Rusanov, Godunov and viscous solutions of Burgers Riemann problems
//! against exact cell averages, with CSV and slab output.

use entropy_lab::flux::catalog_lookup;
use entropy_lab::solver::io::{read_slabs, write_csv, write_slabs};
use entropy_lab::solver::{
    exact_riemann_burgers_average, solve, Grid, InitialData, Scheme, SchemeConfig, Viscosity,
};

fn main() -> entropy_lab::Result<()> {
    let f = catalog_lookup("burgers1d")?;
    let grid = Grid::line(-1.0, 1.0, 400)?;
    let t = 0.5;
    let schemes = [
        ("rusanov", Scheme::Rusanov),
        ("godunov", Scheme::GodunovBurgers),
        ("viscous", Scheme::Viscous { viscosity: Viscosity::CellMultiple(2.0) }),
    ];
    for (ul, ur, what) in [(1.0, 0.0, "shock"), (0.0, 1.0, "rarefaction"), (-0.5, 1.0, "transonic rarefaction")] {
        let u0 = InitialData::Riemann { u_left: ul, u_right: ur, x0: 0.0 };
        for (name, scheme) in schemes {
            let cfg = SchemeConfig::rusanov(0.9, t).with_scheme(scheme).with_store_every(50);
            let u = solve(&f, &u0, &grid, &cfg)?;
            let last = u.slab(u.n_levels() - 1);
            let err: f64 = (0..grid.nx)
                .map(|i| {
                    let (a, b) = (grid.interface(i), grid.interface(i + 1));
                    (last[i] - exact_riemann_burgers_average(ul, ur, a, b, t)).abs()
                })
                .sum::<f64>()
                * grid.dx();
            println!("{what:<22} {name:<8} levels {:>3}  M {:.3}  L1 error {err:.3e}", u.n_levels(), u.bound_m);
        }
    }

    let u0 = InitialData::Sine { amplitude: 0.5, frequency: 0.5, offset: 0.0 };
    let u = solve(&f, &u0, &Grid::line(-2.0, 2.0, 200)?, &SchemeConfig::rusanov(0.9, 1.0).with_store_every(20))?;
    let dir = std::env::temp_dir().join("entropy_lab_solve_example");
    std::fs::create_dir_all(&dir)?;
    write_csv(&u, &dir.join("sine.csv"))?;
    write_slabs(&u, &dir.join("sine.slab"))?;
    let back = read_slabs(&dir.join("sine.slab"))?;
    println!("wrote {} levels to {}; slab round trip exact: {}", u.n_levels(), dir.display(), back == u);
    Ok(())
}
