use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use entropy_lab::experiment::{convergence_study, read_field, run, write_study, ExperimentConfig, RunOptions};
use entropy_lab::flux::{catalog_lookup, catalog_lookup_with, CATALOG};
use entropy_lab::mollifier::{contraction_test_function, BumpTestFunction, ConeSpec};
use entropy_lab::verify::{
    cone_contraction_profile, doubling_diagnostics, entropy_sweep, global_contraction_check, kato_lhs,
    sweep_summary, ContractionOptions, DoublingOptions, ResidualReport, WeakFormOptions,
};
use entropy_lab::{flux::lipschitz_constant, Error, Result};

#[derive(Parser)]
#[command(name = "entropy-lab", version, about = "Entropy solutions and L1-contraction experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config into its run directory.
    Run {
        config: PathBuf,
        /// Output root for relative output_dir (default $ENTROPY_LAB_OUT or .).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
    /// Rerun a config with dx halved per level and report orders.
    Study {
        config: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
    /// Evaluate one check on persisted GridField files (.csv or .slab).
    Verify {
        /// One field, or two for two-solution checks.
        #[arg(required = true, num_args = 1..=2)]
        fields: Vec<PathBuf>,
        #[arg(long)]
        check: CheckKind,
        #[arg(long)]
        flux: String,
        /// Flux parameters as name=value.
        #[arg(long = "param")]
        params: Vec<String>,
        /// Ball radius R (cone_contraction, kato).
        #[arg(long)]
        radius: Option<f64>,
        /// Radii list (global_contraction).
        #[arg(long, value_delimiter = ',')]
        radii: Vec<f64>,
        /// Bump center,radius,t_center,t_radius (entropy_inequality, 1-d).
        #[arg(long, value_delimiter = ',')]
        bump: Vec<f64>,
        /// Window rho,tau,h,eps (kato).
        #[arg(long, value_delimiter = ',')]
        window: Vec<f64>,
        /// eps list (doubling).
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        /// Sample x,t (doubling, repeatable).
        #[arg(long = "sample")]
        samples: Vec<String>,
        #[arg(long)]
        c_tol: Option<f64>,
    },
    /// Flux catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum CheckKind {
    EntropyInequality,
    Kato,
    ConeContraction,
    GlobalContraction,
    Doubling,
}

fn load(path: &Path) -> Result<(ExperimentConfig, PathBuf)> {
    let config = ExperimentConfig::load(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((config, base))
}

fn floats(v: &[f64], n: usize, what: &str) -> Result<()> {
    if v.len() != n {
        return Err(Error::InvalidArgument(format!("--{what} needs {n} comma-separated values")));
    }
    Ok(())
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, out, force } => {
            let (cfg, base) = load(&config)?;
            let opts = RunOptions {
                root: out,
                base_dir: Some(base),
                force,
            };
            let summary = run(&cfg, &opts)?;
            for o in &summary.evaluation.outcomes {
                let r = &o.report;
                println!(
                    "{:>2} {:<20} value {:>12.4e}  tol {:>10.3e}  {}",
                    o.index,
                    r.kind.as_str(),
                    r.value,
                    r.tolerance,
                    if r.passed { "passed" } else { "FAILED" }
                );
            }
            println!("run directory: {}", summary.dir.display());
            Ok(summary.all_passed())
        }
        Command::Study {
            config,
            levels,
            out,
            force,
        } => {
            let (cfg, base) = load(&config)?;
            let table = convergence_study(&cfg, levels, &base)?;
            let opts = RunOptions {
                root: out,
                base_dir: None,
                force,
            };
            let mut dir = opts.run_dir(&cfg).into_os_string();
            dir.push("_study");
            let dir = PathBuf::from(dir);
            write_study(&dir, &table, force)?;
            println!("oracle: {:?}", table.oracle);
            for r in &table.rows {
                let order = r.order.map(|o| o.to_string()).unwrap_or_else(|| "-".into());
                println!("nx {:>6}  dx {:.3e}  error {:.4e}  order {order}", r.nx, r.dx, r.error);
            }
            for c in &table.checks {
                println!("check {} {}: values {:?} ratios {:?}", c.index, c.kind, c.values, c.shrink_ratios);
            }
            println!("study directory: {}", dir.display());
            Ok(true)
        }
        Command::Verify {
            fields,
            check,
            flux,
            params,
            radius,
            radii,
            bump,
            window,
            eps,
            samples,
            c_tol,
        } => {
            let flux = if params.is_empty() {
                catalog_lookup(&flux)?
            } else {
                let mut map = std::collections::BTreeMap::new();
                for p in &params {
                    let (k, v) = p
                        .split_once('=')
                        .ok_or_else(|| Error::InvalidArgument(format!("--param {p} is not name=value")))?;
                    let v: f64 = v
                        .parse()
                        .map_err(|_| Error::InvalidArgument(format!("--param {p}: bad number")))?;
                    map.insert(k.to_string(), v);
                }
                catalog_lookup_with(&flux, &map)?
            };
            let u = read_field(&fields[0])?;
            let v = fields.get(1).map(|p| read_field(p)).transpose()?;
            let need_v = || v.as_ref().ok_or_else(|| Error::InvalidArgument("this check needs two fields".into()));
            let report: ResidualReport = match check {
                CheckKind::EntropyInequality => {
                    floats(&bump, 4, "bump")?;
                    let phi = BumpTestFunction::interval(bump[0], bump[1], bump[2], bump[3])?;
                    let opts = WeakFormOptions {
                        c_tol,
                        ..Default::default()
                    };
                    let sweep = entropy_sweep(&u, &flux, &phi, &opts)?;
                    sweep_summary(&sweep).expect("non-empty sweep")
                }
                CheckKind::Kato => {
                    let v = need_v()?;
                    floats(&window, 4, "window")?;
                    let r = radius.ok_or_else(|| Error::InvalidArgument("--radius is required".into()))?;
                    let n = lipschitz_constant(&flux, r, u.bound_m.max(v.bound_m))?;
                    let cone = ConeSpec::new(r, n)?.with_horizon(u.t_end());
                    let psi = contraction_test_function(u.dim(), cone, window[0], window[1], window[2], window[3])?;
                    let opts = WeakFormOptions {
                        c_tol,
                        ..Default::default()
                    };
                    kato_lhs(&u, v, &flux, &psi, &opts)?
                }
                CheckKind::ConeContraction => {
                    let v = need_v()?;
                    let r = radius.ok_or_else(|| Error::InvalidArgument("--radius is required".into()))?;
                    let opts = ContractionOptions {
                        c_tol,
                        ..Default::default()
                    };
                    cone_contraction_profile(&u, v, &flux, r, &opts)?.report
                }
                CheckKind::GlobalContraction => {
                    let v = need_v()?;
                    let opts = ContractionOptions {
                        c_tol,
                        ..Default::default()
                    };
                    global_contraction_check(&u, v, &flux, &radii, &opts)?.report
                }
                CheckKind::Doubling => {
                    let v = need_v()?;
                    let pts = samples
                        .iter()
                        .map(|s| {
                            let (x, t) = s
                                .split_once(',')
                                .ok_or_else(|| Error::InvalidArgument(format!("--sample {s} is not x,t")))?;
                            let parse = |z: &str| {
                                z.trim()
                                    .parse::<f64>()
                                    .map_err(|_| Error::InvalidArgument(format!("--sample {s}: bad number")))
                            };
                            Ok(([parse(x)?, 0.0], parse(t)?))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    doubling_diagnostics(&u, v, &flux, &eps, &pts, &DoublingOptions::default())?.report(&flux)
                }
            };
            println!("{}", report.to_json());
            Ok(report.passed)
        }
        Command::Catalog {
            action: CatalogAction::List,
        } => {
            for (name, desc) in CATALOG {
                println!("{name:<12} {desc}");
            }
            Ok(true)
        }
    }
}
