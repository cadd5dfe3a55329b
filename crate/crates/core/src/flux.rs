//! Analytic flux catalog f : ℝ^d × ℝ → ℝ^d and its diagnostics.
//!
//! Every entry is closed-form together with ∂ₖf, the frozen-state divergence
//! div_x f(x, k) and the spatial Jacobian. Entries are locally Lipschitz in
//! (x, k), differentiable in x off their declared singular points, and have
//! div_x f(x, ·) continuous in k; these are catalog properties recorded in
//! [`FluxProperties`], not runtime checks.

use std::collections::BTreeMap;
use std::fmt;

use crate::{norm, Error, Result, Vector};

/// Closed-form catalog entries.
#[derive(Debug, Clone, PartialEq)]
pub enum FluxKind {
    /// f(x, k) = k²/2.
    Burgers1d,
    /// f(x, k) = x², independent of the state.
    XSquared1d,
    /// f(x, k) = g(x) h(k) with g(x) = arctan(x²) + 1 and h(k) = sin k.
    Product1d,
    /// f(x, k) = c k.
    Linear1d { c: f64 },
    /// f(x, k) = |x| k; not differentiable in x at x = 0.
    AbsKink1d,
    /// f(x, k) = (k²/2, k²/2).
    Burgers2d,
    /// f(x, k) = k (−x₂, x₁), a divergence-free rotation field.
    Rotating2d,
}

/// Regularity flags of a catalog entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FluxProperties {
    pub locally_lipschitz: bool,
    /// Uniformly differentiable in x (over compact k-sets) off the singular points.
    pub uniformly_differentiable: bool,
    /// k ↦ div_x f(x, k) is continuous for every regular x.
    pub div_continuous_in_k: bool,
}

/// A catalog flux with its metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxSpec {
    pub kind: FluxKind,
    pub name: String,
    pub dim: usize,
    /// Points where D_x f may fail to exist. Derivative evaluations never
    /// land exactly on these.
    pub singular_points: Vec<Vector>,
}

impl fmt::Display for FluxSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// Registered catalog names with a one-line description.
pub const CATALOG: &[(&str, &str)] = &[
    ("burgers1d", "f(x,k) = k^2/2"),
    ("xsquared1d", "f(x,k) = x^2"),
    ("product1d", "f(x,k) = (arctan(x^2)+1) sin(k)"),
    ("linear1d", "f(x,k) = c k  (parameter c)"),
    ("abskink1d", "f(x,k) = |x| k, singular at x = 0"),
    ("burgers2d", "f(x,k) = (k^2/2, k^2/2)"),
    ("rotating2d", "f(x,k) = k (-x2, x1)"),
];

/// Looks up a parameter-free catalog entry.
pub fn catalog_lookup(name: &str) -> Result<FluxSpec> {
    catalog_lookup_with(name, &BTreeMap::new())
}

/// Looks up a catalog entry with explicit parameters. Missing or unexpected
/// parameters are errors.
pub fn catalog_lookup_with(name: &str, params: &BTreeMap<String, f64>) -> Result<FluxSpec> {
    let expect = |allowed: &[&str]| -> Result<()> {
        for key in params.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::FluxParameter {
                    flux: name.to_string(),
                    message: format!("unexpected parameter `{key}`"),
                });
            }
        }
        for key in allowed {
            if !params.contains_key(*key) {
                return Err(Error::FluxParameter {
                    flux: name.to_string(),
                    message: format!("missing parameter `{key}`"),
                });
            }
        }
        Ok(())
    };
    let (kind, dim, singular) = match name {
        "burgers1d" => {
            expect(&[])?;
            (FluxKind::Burgers1d, 1, vec![])
        }
        "xsquared1d" => {
            expect(&[])?;
            (FluxKind::XSquared1d, 1, vec![])
        }
        "product1d" => {
            expect(&[])?;
            (FluxKind::Product1d, 1, vec![])
        }
        "linear1d" => {
            expect(&["c"])?;
            let c = params["c"];
            if !c.is_finite() {
                return Err(Error::FluxParameter {
                    flux: name.into(),
                    message: "c must be finite".into(),
                });
            }
            (FluxKind::Linear1d { c }, 1, vec![])
        }
        "abskink1d" => {
            expect(&[])?;
            (FluxKind::AbsKink1d, 1, vec![[0.0, 0.0]])
        }
        "burgers2d" => {
            expect(&[])?;
            (FluxKind::Burgers2d, 2, vec![])
        }
        "rotating2d" => {
            expect(&[])?;
            (FluxKind::Rotating2d, 2, vec![])
        }
        other => return Err(Error::UnknownFlux(other.to_string())),
    };
    Ok(FluxSpec {
        kind,
        name: name.to_string(),
        dim,
        singular_points: singular,
    })
}

impl FluxSpec {
    /// Linear advection f(x, k) = c k.
    pub fn linear(c: f64) -> Self {
        let mut params = BTreeMap::new();
        params.insert("c".to_string(), c);
        catalog_lookup_with("linear1d", &params).expect("linear1d is registered")
    }

    pub fn properties(&self) -> FluxProperties {
        FluxProperties {
            locally_lipschitz: true,
            uniformly_differentiable: true,
            div_continuous_in_k: true,
        }
    }

    /// True when f does not depend on x (div_x f ≡ 0 and q is x-independent).
    pub fn is_homogeneous(&self) -> bool {
        matches!(
            self.kind,
            FluxKind::Burgers1d | FluxKind::Linear1d { .. } | FluxKind::Burgers2d
        )
    }

    /// True when f does not depend on k.
    pub fn is_state_independent(&self) -> bool {
        matches!(self.kind, FluxKind::XSquared1d)
    }

    pub fn eval(&self, x: &Vector, k: f64) -> Vector {
        match self.kind {
            FluxKind::Burgers1d => [0.5 * k * k, 0.0],
            FluxKind::XSquared1d => [x[0] * x[0], 0.0],
            FluxKind::Product1d => [product_g(x[0]) * k.sin(), 0.0],
            FluxKind::Linear1d { c } => [c * k, 0.0],
            FluxKind::AbsKink1d => [x[0].abs() * k, 0.0],
            FluxKind::Burgers2d => [0.5 * k * k, 0.5 * k * k],
            FluxKind::Rotating2d => [-x[1] * k, x[0] * k],
        }
    }

    /// ∂ₖ f(x, k).
    pub fn dk(&self, x: &Vector, k: f64) -> Vector {
        match self.kind {
            FluxKind::Burgers1d => [k, 0.0],
            FluxKind::XSquared1d => [0.0, 0.0],
            FluxKind::Product1d => [product_g(x[0]) * k.cos(), 0.0],
            FluxKind::Linear1d { c } => [c, 0.0],
            FluxKind::AbsKink1d => [x[0].abs(), 0.0],
            FluxKind::Burgers2d => [k, k],
            FluxKind::Rotating2d => [-x[1], x[0]],
        }
    }

    /// div_x f(x, k) at frozen k, defined almost everywhere.
    pub fn div_x(&self, x: &Vector, k: f64) -> f64 {
        let x = self.off_singular(x);
        match self.kind {
            FluxKind::Burgers1d | FluxKind::Linear1d { .. } | FluxKind::Burgers2d => 0.0,
            FluxKind::XSquared1d => 2.0 * x[0],
            FluxKind::Product1d => product_g_prime(x[0]) * k.sin(),
            FluxKind::AbsKink1d => crate::sign(x[0]) * k,
            FluxKind::Rotating2d => 0.0,
        }
    }

    /// ∇ₓ f_i(x, k), the i-th row of the spatial Jacobian.
    pub fn grad_x_component(&self, x: &Vector, k: f64, i: usize) -> Vector {
        self.jacobian_x(x, k)[i]
    }

    /// Spatial Jacobian `J[i][j] = ∂_{x_j} f_i(x, k)`.
    pub fn jacobian_x(&self, x: &Vector, k: f64) -> [Vector; 2] {
        let x = self.off_singular(x);
        match self.kind {
            FluxKind::Burgers1d | FluxKind::Linear1d { .. } | FluxKind::Burgers2d => {
                [[0.0; 2]; 2]
            }
            FluxKind::XSquared1d => [[2.0 * x[0], 0.0], [0.0; 2]],
            FluxKind::Product1d => [[product_g_prime(x[0]) * k.sin(), 0.0], [0.0; 2]],
            FluxKind::AbsKink1d => [[crate::sign(x[0]) * k, 0.0], [0.0; 2]],
            FluxKind::Rotating2d => [[0.0, -k], [k, 0.0]],
        }
    }

    /// Moves `x` off any declared singular point by a few ulps.
    pub fn off_singular(&self, x: &Vector) -> Vector {
        let mut y = *x;
        for p in &self.singular_points {
            let d = [x[0] - p[0], x[1] - p[1]];
            if norm(&d) <= 1e-13 * (1.0 + norm(p)) {
                for c in y.iter_mut().take(self.dim) {
                    *c += 64.0 * f64::EPSILON * c.abs().max(1.0);
                }
            }
        }
        y
    }

    fn is_singular(&self, x: &Vector) -> bool {
        self.singular_points.iter().any(|p| {
            let d = [x[0] - p[0], x[1] - p[1]];
            norm(&d) <= 1e-12 * (1.0 + norm(p))
        })
    }
}

fn product_g(x: f64) -> f64 {
    (x * x).atan() + 1.0
}

fn product_g_prime(x: f64) -> f64 {
    2.0 * x / (1.0 + x.powi(4))
}

/// Number of grid intervals per axis of the first Lipschitz estimate.
pub const LIPSCHITZ_BASE_GRID: usize = 200;
const LIPSCHITZ_MAX_GRID: usize = 6400;
const LIPSCHITZ_AGREEMENT: f64 = 0.01;

/// Upper estimate of N_M(R) = sup |f(x,k) − f(x,k′)| / |k − k′| over
/// x ∈ B_R(0), k, k′ ∈ [−M, M].
///
/// On each grid the estimate is the larger of the adjacent-node difference
/// quotients and the sampled |∂ₖf|. Adjacent quotients suffice: the quotient
/// over any pair of nodes is a convex combination of the adjacent quotients
/// between them. The grid is doubled until two successive estimates agree
/// within 1 %, and the larger of the two plus their gap is returned.
pub fn lipschitz_constant(flux: &FluxSpec, radius: f64, bound: f64) -> Result<f64> {
    if !(radius > 0.0) || !(bound >= 0.0) || !radius.is_finite() || !bound.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "lipschitz_constant needs R > 0 and M >= 0, got R = {radius}, M = {bound}"
        )));
    }
    let mut n = LIPSCHITZ_BASE_GRID;
    let mut prev = lipschitz_on_grid(flux, radius, bound, n)?;
    loop {
        n *= 2;
        let next = lipschitz_on_grid(flux, radius, bound, n)?;
        let gap = (next - prev).abs();
        if gap <= LIPSCHITZ_AGREEMENT * next.max(prev) || n >= LIPSCHITZ_MAX_GRID {
            return Ok(next.max(prev) + gap);
        }
        prev = next;
    }
}

/// Grid estimate with `n` intervals per axis (n is forced even so that the
/// grids contain 0).
pub fn lipschitz_on_grid(flux: &FluxSpec, radius: f64, bound: f64, n: usize) -> Result<f64> {
    let n = n + n % 2;
    let k_nodes: Vec<f64> = (0..=n)
        .map(|j| -bound + 2.0 * bound * j as f64 / n as f64)
        .collect();
    let xs = ball_grid(flux.dim, radius, n);
    let mut best: f64 = 0.0;
    let mut values = Vec::with_capacity(k_nodes.len());
    for x in &xs {
        values.clear();
        for &k in &k_nodes {
            let f = flux.eval(x, k);
            let d = flux.dk(x, k);
            if !(f.iter().all(|v| v.is_finite()) && d.iter().all(|v| v.is_finite())) {
                return Err(Error::NonFiniteFlux {
                    flux: flux.name.clone(),
                    x: *x,
                    k,
                });
            }
            best = best.max(norm(&d));
            values.push(f);
        }
        if bound > 0.0 {
            for j in 0..n {
                let df = [values[j + 1][0] - values[j][0], values[j + 1][1] - values[j][1]];
                let q = norm(&df) / (k_nodes[j + 1] - k_nodes[j]);
                best = best.max(q);
            }
        }
    }
    Ok(best)
}

/// Grid over the closed ball B_R(0). In 2-d the spatial axes use at most 64
/// intervals to keep the (d+1)-dimensional sweep tractable.
fn ball_grid(dim: usize, radius: f64, n: usize) -> Vec<Vector> {
    if dim == 1 {
        return (0..=n)
            .map(|i| [-radius + 2.0 * radius * i as f64 / n as f64, 0.0])
            .collect();
    }
    let m = n.min(64);
    let mut pts = Vec::new();
    for i in 0..=m {
        for j in 0..=m {
            let x = [
                -radius + 2.0 * radius * i as f64 / m as f64,
                -radius + 2.0 * radius * j as f64 / m as f64,
            ];
            if norm(&x) <= radius * (1.0 + 1e-12) {
                pts.push(x);
            }
        }
    }
    // boundary circle
    for j in 0..4 * m {
        let th = 2.0 * std::f64::consts::PI * j as f64 / (4 * m) as f64;
        pts.push([radius * th.cos(), radius * th.sin()]);
    }
    pts
}

/// Sampled uniform-differentiability deficit at `x`: for each radius r the
/// maximum over k ∈ K and |y − x| = r of
/// |f(y,k) − f(x,k) − D_x f(x,k)(y − x)| / |y − x|.
pub fn uniform_diffquot_deficit(
    flux: &FluxSpec,
    x: &Vector,
    k_range: (f64, f64),
    radii: &[f64],
) -> Result<Vec<f64>> {
    if flux.is_singular(x) {
        return Err(Error::SingularPoint(*x));
    }
    let (klo, khi) = k_range;
    if !(klo <= khi) || !klo.is_finite() || !khi.is_finite() {
        return Err(Error::InvalidArgument(format!("bad state interval [{klo}, {khi}]")));
    }
    if radii.windows(2).any(|w| !(w[1] < w[0])) || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidArgument(
            "radii must be positive and strictly decreasing".into(),
        ));
    }
    let directions: Vec<Vector> = if flux.dim == 1 {
        vec![[1.0, 0.0], [-1.0, 0.0]]
    } else {
        (0..16)
            .map(|j| {
                let th = 2.0 * std::f64::consts::PI * j as f64 / 16.0;
                [th.cos(), th.sin()]
            })
            .collect()
    };
    let nk = if flux.dim == 1 { 500 } else { 64 };
    let ks: Vec<f64> = (0..nk)
        .map(|j| klo + (khi - klo) * j as f64 / (nk - 1) as f64)
        .collect();
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut worst: f64 = 0.0;
        for &k in &ks {
            let fx = flux.eval(x, k);
            let jac = flux.jacobian_x(x, k);
            for dir in &directions {
                let y = [x[0] + r * dir[0], x[1] + r * dir[1]];
                let fy = flux.eval(&y, k);
                let step = [y[0] - x[0], y[1] - x[1]];
                let mut rem = [0.0; 2];
                for i in 0..2 {
                    rem[i] = fy[i] - fx[i] - (jac[i][0] * step[0] + jac[i][1] * step[1]);
                }
                worst = worst.max(norm(&rem) / norm(&step));
            }
        }
        out.push(worst);
    }
    Ok(out)
}
