//! TOML experiment configuration with a strict schema.
//!
//! ```toml
//! output_dir = "burgers_contraction"
//!
//! [flux]
//! name = "burgers1d"
//!
//! [initial_data]
//! kind = "box"
//! height = 1.0
//! lower = -0.5
//! upper = 0.0
//!
//! [grid]
//! dim = 1
//! lower = -3.0
//! upper = 3.0
//! nx = 1200
//! t_end = 2.0
//! store_every = 1
//!
//! [scheme]
//! kind = "rusanov"
//! cfl = 0.9
//! boundary = "outflow"
//!
//! [[checks]]
//! kind = "cone_contraction"
//! radius = 2.0
//! partner = { kind = "box", height = 1.0, lower = -0.4, upper = 0.1 }
//! ```
//!
//! Physical parameters (flux, grid, data, scheme) have no defaults. Unknown
//! keys are errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::flux::{catalog_lookup_with, FluxSpec};
use crate::solver::io::{read_csv, read_slabs};
use crate::solver::{Boundary, Grid, GridField, InitialData, Scheme, SchemeConfig, Viscosity};
use crate::{Error, Result, Vector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Run directory; relative paths resolve against the output root.
    pub output_dir: PathBuf,
    pub flux: FluxConfig,
    pub initial_data: DataSpec,
    pub grid: GridConfig,
    pub scheme: SchemeSpec,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

impl FluxConfig {
    pub fn build(&self) -> Result<FluxSpec> {
        catalog_lookup_with(&self.name, &self.params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    Riemann { u_left: f64, u_right: f64, x0: f64 },
    Box { height: f64, lower: f64, upper: f64 },
    Sine { amplitude: f64, frequency: f64, offset: f64 },
    Constant { value: f64 },
    /// Last stored level of a GridField file (`.csv` or `.slab`), relative
    /// to the config file.
    File { path: PathBuf },
}

impl DataSpec {
    pub fn build(&self, grid: &Grid, base_dir: &Path) -> Result<InitialData> {
        Ok(match *self {
            DataSpec::Riemann { u_left, u_right, x0 } => InitialData::Riemann { u_left, u_right, x0 },
            DataSpec::Box { height, lower, upper } => InitialData::Box { height, lower, upper },
            DataSpec::Sine {
                amplitude,
                frequency,
                offset,
            } => InitialData::Sine {
                amplitude,
                frequency,
                offset,
            },
            DataSpec::Constant { value } => InitialData::Constant { value },
            DataSpec::File { ref path } => {
                let full = base_dir.join(path);
                let field = read_field(&full)?;
                if field.grid != *grid {
                    return Err(Error::GridMismatch(format!(
                        "{} holds a grid {:?}, the config asks for {:?}",
                        full.display(),
                        field.grid,
                        grid
                    )));
                }
                InitialData::Cells(field.slab(field.n_levels() - 1).to_vec())
            }
        })
    }

    /// Exact Burgers Riemann data, if this is Riemann data.
    pub fn riemann_states(&self) -> Option<(f64, f64, f64)> {
        match *self {
            DataSpec::Riemann { u_left, u_right, x0 } => Some((u_left, u_right, x0)),
            _ => None,
        }
    }
}

/// Reads a GridField from `.csv` or `.slab` by extension.
pub fn read_field(path: &Path) -> Result<GridField> {
    let read = match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => read_csv(path),
        Some("slab") => read_slabs(path),
        _ => {
            return Err(Error::Format {
                path: path.to_path_buf(),
                message: "expected a .csv or .slab extension".into(),
            })
        }
    };
    read.map_err(|e| match e {
        Error::Io(io) => Error::Format {
            path: path.to_path_buf(),
            message: io.to_string(),
        },
        other => other,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub lower: f64,
    pub upper: f64,
    pub nx: usize,
    pub t_end: f64,
    pub store_every: usize,
}

impl GridConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.dim, self.lower, self.upper, self.nx)
    }

    /// Cells and stored-step stride multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            nx: self.nx * factor,
            store_every: self.store_every * factor,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Rusanov,
    GodunovBurgers,
    Viscous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    pub cfl: f64,
    pub boundary: Boundary,
    /// Required for `viscous`, e.g. `{ cell_multiple = 2.0 }` or `{ fixed = 0.01 }`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub viscosity: Option<Viscosity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed_bound: Option<f64>,
}

impl SchemeSpec {
    pub fn config(&self, grid: &GridConfig) -> Result<SchemeConfig> {
        let scheme = match (self.kind, self.viscosity) {
            (SchemeKind::Rusanov, None) => Scheme::Rusanov,
            (SchemeKind::GodunovBurgers, None) => Scheme::GodunovBurgers,
            (SchemeKind::Viscous, Some(viscosity)) => Scheme::Viscous { viscosity },
            (SchemeKind::Viscous, None) => {
                return Err(config_err("scheme.viscosity", "required for the viscous scheme"))
            }
            (_, Some(_)) => return Err(config_err("scheme.viscosity", "only valid for the viscous scheme")),
        };
        let cfg = SchemeConfig {
            scheme,
            cfl: self.cfl,
            boundary: self.boundary,
            t_end: grid.t_end,
            store_every: grid.store_every,
            speed_bound: self.speed_bound,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Smooth space-time bump φ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub center: Vec<f64>,
    pub radius: Vec<f64>,
    pub t_center: f64,
    pub t_radius: f64,
}

impl BumpSpec {
    pub fn vectors(&self, dim: usize) -> Result<(Vector, Vector)> {
        Ok((to_vector(&self.center, dim, "center")?, to_vector(&self.radius, dim, "radius")?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    /// Exact Burgers Riemann solution; needs Riemann initial data.
    BurgersRiemann,
}

fn default_k0_count() -> usize {
    9
}

fn default_smooth_n() -> Vec<u32> {
    vec![4, 16, 64]
}

fn default_oracle_ratio() -> f64 {
    1.4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    EntropyInequality {
        test_function: BumpSpec,
        #[serde(default = "default_k0_count")]
        k0_count: usize,
        #[serde(default = "default_smooth_n")]
        smooth_n: Vec<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c_tol: Option<f64>,
    },
    Kato {
        partner: DataSpec,
        radius: f64,
        rho: f64,
        tau: f64,
        h: f64,
        eps: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c_tol: Option<f64>,
    },
    ConeContraction {
        partner: DataSpec,
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c_tol: Option<f64>,
    },
    GlobalContraction {
        partner: DataSpec,
        radii: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c_tol: Option<f64>,
    },
    Uniqueness {
        variants: Vec<SchemeSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        oracle: Option<OracleKind>,
        #[serde(default = "default_oracle_ratio")]
        oracle_ratio: f64,
    },
    Doubling {
        partner: DataSpec,
        eps_list: Vec<f64>,
        /// `[x, t]` or `[x, y, t]`, snapped to the nearest cell center and
        /// stored level.
        samples: Vec<Vec<f64>>,
    },
}

impl CheckSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            CheckSpec::EntropyInequality { .. } => "entropy_inequality",
            CheckSpec::Kato { .. } => "kato",
            CheckSpec::ConeContraction { .. } => "cone_contraction",
            CheckSpec::GlobalContraction { .. } => "global_contraction",
            CheckSpec::Uniqueness { .. } => "uniqueness",
            CheckSpec::Doubling { .. } => "doubling",
        }
    }

    pub fn partner(&self) -> Option<&DataSpec> {
        match self {
            CheckSpec::Kato { partner, .. }
            | CheckSpec::ConeContraction { partner, .. }
            | CheckSpec::GlobalContraction { partner, .. }
            | CheckSpec::Doubling { partner, .. } => Some(partner),
            _ => None,
        }
    }
}

pub(crate) fn to_vector(v: &[f64], dim: usize, what: &str) -> Result<Vector> {
    if v.len() != dim {
        return Err(config_err(what, &format!("expected {dim} components, got {}", v.len())));
    }
    let mut out = [0.0; 2];
    out[..dim].copy_from_slice(v);
    Ok(out)
}

fn config_err(context: &str, message: &str) -> Error {
    Error::Config {
        context: context.to_string(),
        message: message.to_string(),
    }
}

impl ExperimentConfig {
    /// Parses TOML text. `origin` names the source in error messages.
    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let context = match e.span() {
                Some(span) => {
                    let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
                    format!("{origin}, line {line}")
                }
                None => origin.to_string(),
            };
            Error::Config {
                context,
                message: e.message().trim().to_string(),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text, &path.display().to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn scheme_config(&self) -> Result<SchemeConfig> {
        self.scheme.config(&self.grid)
    }

    /// Same experiment on a grid with `factor` times more cells per axis.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            grid: self.grid.refined(factor),
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
output_dir = "out"

[flux]
name = "burgers1d"

[initial_data]
kind = "riemann"
u_left = 1.0
u_right = 0.0
x0 = 0.0

[grid]
dim = 1
lower = -1.0
upper = 1.0
nx = 100
t_end = 0.5
store_every = 2

[scheme]
kind = "viscous"
cfl = 0.9
boundary = "outflow"
viscosity = { cell_multiple = 2.0 }

[[checks]]
kind = "cone_contraction"
radius = 0.8
partner = { kind = "box", height = 1.0, lower = -0.5, upper = 0.0 }

[[checks]]
kind = "uniqueness"
variants = [
  { kind = "rusanov", cfl = 0.9, boundary = "outflow" },
  { kind = "rusanov", cfl = 0.45, boundary = "outflow" },
]
oracle = "burgers_riemann"
"#;

    #[test]
    fn round_trip() {
        let c = ExperimentConfig::from_toml_str(BASE, "base").unwrap();
        assert_eq!(c.checks.len(), 2);
        let back = ExperimentConfig::from_toml_str(&c.to_toml(), "again").unwrap();
        assert_eq!(back, c);
        let s = c.scheme_config().unwrap();
        assert_eq!(s.store_every, 2);
        assert!(matches!(s.scheme, Scheme::Viscous { viscosity: Viscosity::CellMultiple(_) }));
        match &c.checks[1] {
            CheckSpec::Uniqueness { oracle_ratio, .. } => assert_eq!(*oracle_ratio, 1.4),
            _ => panic!(),
        }
    }

    #[test]
    fn unknown_key_is_named() {
        let text = BASE.replace("[flux]\nname", "[flux]\nfluxx = 1\nname");
        let err = ExperimentConfig::from_toml_str(&text, "typo").unwrap_err();
        match err {
            Error::Config { context, message } => {
                assert!(message.contains("fluxx"), "{message}");
                assert!(context.contains("line 5"), "{context}");
            }
            other => panic!("{other}"),
        }
        let top = format!("fluxx = 2\n{BASE}");
        let msg = ExperimentConfig::from_toml_str(&top, "top").unwrap_err().to_string();
        assert!(msg.contains("fluxx"), "{msg}");
    }

    #[test]
    fn physical_parameters_are_required() {
        let text = BASE.replace("nx = 100\n", "");
        let msg = ExperimentConfig::from_toml_str(&text, "x").unwrap_err().to_string();
        assert!(msg.contains("nx"), "{msg}");
        let text = BASE.replace("x0 = 0.0\n", "");
        assert!(ExperimentConfig::from_toml_str(&text, "x").is_err());
    }

    #[test]
    fn unknown_field_in_tagged_check() {
        let text = BASE.replace("radius = 0.8", "radius = 0.8\nradiuss = 1.0");
        let msg = ExperimentConfig::from_toml_str(&text, "x").unwrap_err().to_string();
        assert!(msg.contains("radiuss"), "{msg}");
    }

    #[test]
    fn viscosity_must_match_the_scheme() {
        let text = BASE.replace("kind = \"viscous\"", "kind = \"rusanov\"");
        let c = ExperimentConfig::from_toml_str(&text, "x").unwrap();
        assert!(matches!(c.scheme_config(), Err(Error::Config { .. })));
    }

    #[test]
    fn refinement_scales_stride() {
        let c = ExperimentConfig::from_toml_str(BASE, "x").unwrap().refined(2);
        assert_eq!((c.grid.nx, c.grid.store_every), (200, 4));
    }
}
