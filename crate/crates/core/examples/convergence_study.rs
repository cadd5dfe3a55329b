//! Halves Δx per level and reports the observed L¹ order, for a Burgers shock
//! (exact oracle) and smooth product-flux data (finer-level oracle).

use std::path::Path;

use entropy_lab::experiment::{convergence_study, write_study, ExperimentConfig};

const SMOOTH: &str = r#"
output_dir = "smooth_product"

[flux]
name = "product1d"

[initial_data]
kind = "sine"
amplitude = 0.3
frequency = 0.5
offset = 0.0

[grid]
dim = 1
lower = -2.0
upper = 2.0
nx = 100
t_end = 0.3
store_every = 10

[scheme]
kind = "rusanov"
cfl = 0.9
boundary = "periodic"
"#;

fn main() -> entropy_lab::Result<()> {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let shock = ExperimentConfig::load(&configs.join("uniqueness_burgers.toml"))?;
    let smooth = ExperimentConfig::from_toml_str(SMOOTH, "smooth")?;
    for (name, cfg) in [("shock", shock), ("smooth", smooth)] {
        let table = convergence_study(&cfg, 3, &configs)?;
        println!("{name}: oracle {:?}", table.oracle);
        for r in &table.rows {
            let order = r.order.map(|o| o.to_string()).unwrap_or_default();
            println!("  nx {:>5} error {:.4e} order {order}", r.nx, r.error);
        }
        let dir = std::env::temp_dir().join("entropy_lab_studies").join(name);
        write_study(&dir, &table, true)?;
        println!("  written to {}", dir.display());
    }
    Ok(())
}
