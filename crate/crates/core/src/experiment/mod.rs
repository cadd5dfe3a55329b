//! Experiment orchestration: TOML configs, run directories, convergence
//! studies and SVG plots.

pub mod config;
pub mod run;
pub mod study;
pub mod svg;

pub use config::{read_field, CheckSpec, DataSpec, ExperimentConfig, GridConfig, SchemeKind, SchemeSpec};
pub use run::{evaluate, run, CheckOutcome, Evaluation, RunOptions, RunSummary, OUTPUT_ROOT_ENV};
pub use study::{convergence_study, write_study, Order, StudyTable};
