//! Loads a bundled TOML config, runs it into a run directory and prints the
//! summary. Pass a config path to run another one.

use std::path::{Path, PathBuf};

use entropy_lab::experiment::{run, ExperimentConfig, RunOptions};

fn main() -> entropy_lab::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/burgers_contraction.toml")
    });
    let config = ExperimentConfig::load(&path)?;
    let opts = RunOptions {
        root: Some(std::env::temp_dir().join("entropy_lab_runs")),
        base_dir: path.parent().map(Path::to_path_buf),
        force: true,
    };
    let summary = run(&config, &opts)?;
    for o in &summary.evaluation.outcomes {
        let r = &o.report;
        println!("{} {:<20} {:+.4e} tol {:.3e} passed {}", o.index, r.kind.as_str(), r.value, r.tolerance, r.passed);
    }
    println!("artifacts in {}", summary.dir.display());
    for entry in std::fs::read_dir(&summary.dir)? {
        println!("  {}", entry?.file_name().to_string_lossy());
    }
    Ok(())
}
