//! Numerical laboratory for entropy solutions of scalar conservation laws
//!
//! ```text
//! ∂ₜu + div f(x, u) = 0,   u(x, 0) = u₀(x)
//! ```
//!
//! with a flux that depends on position as well as on the state. The crate
//! builds entropy pairs and mollified test functions, generates approximate
//! entropy solutions with a monotone finite-volume scheme, and evaluates the
//! weak entropy inequality, the two-solution (Kato) inequality, the cone and
//! global L¹-contraction and a uniqueness proxy on the generated fields.
//!
//! Module map:
//!
//! * [`flux`]: analytic flux catalog, Lipschitz and differentiability diagnostics.
//! * [`entropy`]: smooth and Kruzkov entropy pairs, entropy-flux identities.
//! * [`mollifier`]: standard mollifiers, cone cutoffs and test functions.
//! * [`solver`]: grid fields, Rusanov/Godunov/viscous schemes, Riemann oracle, file formats.
//! * [`verify`]: residual reports for the entropy, Kato and contraction inequalities.
//! * [`experiment`]: TOML-configured experiment runs, convergence studies and SVG plots.

pub mod error;
pub mod quadrature;

pub mod entropy;
pub mod experiment;
pub mod flux;
pub mod mollifier;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 2;

/// A point or vector in ℝ^d stored in a fixed two-slot array. Components at
/// index `>= dim` are zero.
pub type Vector = [f64; MAX_DIM];

/// Sign with `sign(0) = 0`.
#[inline]
pub fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[inline]
pub(crate) fn norm(v: &Vector) -> f64 {
    v[0].hypot(v[1])
}

#[inline]
pub(crate) fn dot(a: &Vector, b: &Vector) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}
