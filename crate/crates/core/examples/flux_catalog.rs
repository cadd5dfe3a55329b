//! Catalog fluxes: evaluation, structural properties and the local Lipschitz
//! constant N_M(R) that sets the cone speed.

use std::collections::BTreeMap;

use entropy_lab::flux::{catalog_lookup, catalog_lookup_with, lipschitz_constant, uniform_diffquot_deficit, CATALOG};

fn main() -> entropy_lab::Result<()> {
    for (name, desc) in CATALOG {
        // linear1d is the only entry with a parameter.
        let f = catalog_lookup_with(name, &BTreeMap::from([("c".to_string(), 0.5)]))
            .or_else(|_| catalog_lookup(name))?;
        let p = f.properties();
        let x = f.off_singular(&[0.3, -0.2]);
        let n = lipschitz_constant(&f, 2.0, 1.0)?;
        println!(
            "{name:<11} d={} f(x,0.5)={:?} div_x f={:+.4} N(R=2,M=1)={n:.4} lipschitz={} unif_diff={} div_cont={}  {desc}",
            f.dim,
            f.eval(&x, 0.5),
            f.div_x(&x, 0.5),
            p.locally_lipschitz,
            p.uniformly_differentiable,
            p.div_continuous_in_k,
        );
    }

    // The difference-quotient deficit of a smooth flux is O(r). Next to the
    // kink of |x| k it stays O(1) until r drops below the distance to x = 0.
    let radii = [0.1, 0.01, 0.001];
    for name in ["product1d", "abskink1d"] {
        let f = catalog_lookup(name)?;
        let d = uniform_diffquot_deficit(&f, &[0.0005, 0.0], (-1.0, 1.0), &radii)?;
        println!("{name}: deficit at radii {radii:?} = {}", sci(&d));
    }
    Ok(())
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(" ")
}
