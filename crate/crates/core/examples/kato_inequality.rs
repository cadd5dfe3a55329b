//! The two-solution inequality ∫∫ ∂ₜψ|u − v| + ∇ψ·sign(u − v)(f(x,u) − f(x,v)) ≥ 0
//! with ψ the cone-cutoff test function, for a range of windows.

use entropy_lab::flux::{catalog_lookup, lipschitz_constant};
use entropy_lab::mollifier::{contraction_test_function, ConeSpec};
use entropy_lab::solver::{shared_config, solve, Boundary, Grid, InitialData, SchemeConfig};
use entropy_lab::verify::{kato_lhs, WeakFormOptions};

fn main() -> entropy_lab::Result<()> {
    let f = catalog_lookup("product1d")?;
    let grid = Grid::line(-3.0, 3.0, 1200)?;
    let a = InitialData::Sine { amplitude: 0.8, frequency: 0.5, offset: 0.0 };
    let b = InitialData::Box { height: 0.6, lower: -1.0, upper: 0.5 };
    let cfg = shared_config(&f, &grid, &SchemeConfig::rusanov(0.9, 1.0).with_boundary(Boundary::Outflow), &[&a, &b])?;
    let u = solve(&f, &a, &grid, &cfg)?;
    let v = solve(&f, &b, &grid, &cfg)?;

    let radius = 2.0;
    let n = lipschitz_constant(&f, radius, u.bound_m.max(v.bound_m))?;
    println!("N = {n:.4}, cone apex time R/N = {:.3}", radius / n);
    let cone = ConeSpec::new(radius, n)?.with_horizon(u.t_end());
    for (rho, tau, h, eps) in [(0.1, 0.5, 0.05, 0.05), (0.2, 0.7, 0.1, 0.1), (0.3, 0.6, 0.02, 0.2)] {
        let psi = contraction_test_function(1, cone, rho, tau, h, eps)?;
        let r = kato_lhs(&u, &v, &f, &psi, &WeakFormOptions::default())?;
        println!("rho {rho} tau {tau} h {h} eps {eps}: lhs {:+.4e} (>= -{:.2e}) passed {}", r.value, r.tolerance, r.passed);
    }
    Ok(())
}
