//! First-order monotone finite-volume schemes for ∂ₜu + div f(x, u) = 0.
//!
//! Forward Euler in time with a three-point stencil per axis:
//!
//! ```text
//! u_i^{n+1} = u_i^n − (Δt/Δx)(F_{i+1/2} − F_{i−1/2})
//! ```
//!
//! The interface flux is evaluated at the interface position x_{i+1/2}. Two
//! dimensions use Godunov (x then y) splitting. The time step is fixed for a
//! run and comes from an a-priori state bound, so two runs whose data share
//! max|u₀| also share every time level.

pub mod field;
pub mod initial;
pub mod io;
pub mod riemann;

pub use field::{Grid, GridField};
pub use initial::InitialData;
pub use riemann::{exact_riemann_burgers, exact_riemann_burgers_average};

use serde::{Deserialize, Serialize};

use crate::flux::{FluxKind, FluxSpec};
use crate::{Error, Result, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Viscosity {
    /// A fixed ε.
    Fixed(f64),
    /// ε = c·Δx.
    CellMultiple(f64),
}

impl Viscosity {
    pub fn epsilon(&self, dx: f64) -> f64 {
        match *self {
            Viscosity::Fixed(e) => e,
            Viscosity::CellMultiple(c) => c * dx,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Scheme {
    /// Local Lax–Friedrichs flux.
    Rusanov,
    /// Exact Godunov flux, Burgers fluxes only.
    GodunovBurgers,
    /// Rusanov plus central-difference diffusion εΔu.
    Viscous { viscosity: Viscosity },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    /// Zeroth-order extrapolation.
    Outflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub cfl: f64,
    pub boundary: Boundary,
    pub t_end: f64,
    /// Store every n-th step (the final level is always stored).
    pub store_every: usize,
    /// Overrides the sampled bound on |∂ₖf| used for the time step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed_bound: Option<f64>,
}

impl SchemeConfig {
    pub fn rusanov(cfl: f64, t_end: f64) -> Self {
        Self {
            scheme: Scheme::Rusanov,
            cfl,
            boundary: Boundary::Outflow,
            t_end,
            store_every: 1,
            speed_bound: None,
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_store_every(mut self, store_every: usize) -> Self {
        self.store_every = store_every;
        self
    }

    pub fn with_speed_bound(mut self, bound: f64) -> Self {
        self.speed_bound = Some(bound);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidArgument(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::InvalidArgument(format!("t_end must be > 0, got {}", self.t_end)));
        }
        if self.store_every == 0 {
            return Err(Error::InvalidArgument("store_every must be >= 1".into()));
        }
        if let Some(b) = self.speed_bound {
            if !(b > 0.0) || !b.is_finite() {
                return Err(Error::InvalidArgument(format!("speed_bound must be > 0, got {b}")));
            }
        }
        if let Scheme::Viscous { viscosity } = self.scheme {
            let e = match viscosity {
                Viscosity::Fixed(e) | Viscosity::CellMultiple(e) => e,
            };
            if !(e >= 0.0) || !e.is_finite() {
                return Err(Error::InvalidArgument(format!("viscosity must be >= 0, got {e}")));
            }
        }
        Ok(())
    }
}

/// Sample count per axis for the a-priori sup of |div_x f| and |∂ₖf|.
const SUP_SAMPLES_X: usize = 400;
const SUP_SAMPLES_K: usize = 201;
/// Relative slack on the runtime CFL check (rounding only).
const CFL_SLACK: f64 = 1e-9;

fn sample_axis(grid: &Grid) -> Vec<f64> {
    let m = grid.nx.min(SUP_SAMPLES_X);
    // interfaces and midpoints of a uniform subdivision
    (0..=2 * m)
        .map(|j| grid.lower + (grid.upper - grid.lower) * j as f64 / (2 * m) as f64)
        .collect()
}

fn sample_points(grid: &Grid) -> Vec<Vector> {
    let xs = sample_axis(grid);
    if grid.dim == 1 {
        xs.iter().map(|&x| [x, 0.0]).collect()
    } else {
        let coarse: Vec<f64> = xs.iter().step_by(4).copied().collect();
        let mut pts = Vec::with_capacity(coarse.len() * coarse.len());
        for &y in &coarse {
            for &x in &coarse {
                pts.push([x, y]);
            }
        }
        pts
    }
}

fn k_nodes(bound: f64) -> Vec<f64> {
    (0..SUP_SAMPLES_K)
        .map(|j| -bound + 2.0 * bound * j as f64 / (SUP_SAMPLES_K - 1) as f64)
        .collect()
}

/// Sampled sup of |div_x f| over the domain and |k| ≤ bound.
pub fn sup_div_x(flux: &FluxSpec, grid: &Grid, bound: f64) -> f64 {
    if flux.is_homogeneous() {
        return 0.0;
    }
    let ks = k_nodes(bound);
    let mut s: f64 = 0.0;
    for x in sample_points(grid) {
        for &k in &ks {
            s = s.max(flux.div_x(&x, k).abs());
        }
    }
    s
}

/// Sampled sup of |∂ₖf_axis| over the interface positions used by the
/// scheme and |k| ≤ bound.
pub fn sup_speed(flux: &FluxSpec, grid: &Grid, bound: f64) -> f64 {
    let ks = k_nodes(bound);
    let mut s: f64 = 0.0;
    let ifaces: Vec<f64> = (0..=grid.nx).map(|i| grid.interface(i)).collect();
    let centers: Vec<f64> = (0..grid.nx).map(|i| grid.center(i)[0]).collect();
    if grid.dim == 1 {
        for &x in &ifaces {
            for &k in &ks {
                s = s.max(flux.dk(&[x, 0.0], k)[0].abs());
            }
        }
        return s;
    }
    let step = (grid.nx / 64).max(1);
    for axis in 0..2 {
        for &a in ifaces.iter().step_by(step).chain(ifaces.last()) {
            for &b in centers.iter().step_by(step).chain(centers.last()) {
                let x = if axis == 0 { [a, b] } else { [b, a] };
                for &k in &ks {
                    s = s.max(flux.dk(&x, k)[axis].abs());
                }
            }
        }
    }
    s
}

/// A-priori state bound max|u₀| + T·sup|div_x f|, iterated to a fixed point
/// of the k-range used for the sup.
pub fn a_priori_bound(flux: &FluxSpec, grid: &Grid, max_u0: f64, t_end: f64) -> f64 {
    let mut m = max_u0;
    for _ in 0..4 {
        let next = max_u0 + t_end * sup_div_x(flux, grid, m.max(1e-12));
        if next <= m {
            break;
        }
        m = next;
    }
    m
}

/// Time-step parameters of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPlan {
    pub dt: f64,
    /// Bound on |∂ₖf| used for Δt.
    pub speed: f64,
    pub epsilon: f64,
    /// A-priori state bound.
    pub state_bound: f64,
    /// Any |u| above this is reported as a blow-up.
    pub blowup_limit: f64,
}

impl StepPlan {
    pub fn new(flux: &FluxSpec, grid: &Grid, config: &SchemeConfig, u0: &[f64]) -> Result<Self> {
        config.validate()?;
        grid.validate()?;
        if flux.dim != grid.dim {
            return Err(Error::InvalidArgument(format!(
                "flux {} is {}-d, grid is {}-d",
                flux.name, flux.dim, grid.dim
            )));
        }
        if matches!(config.scheme, Scheme::GodunovBurgers)
            && !matches!(flux.kind, FluxKind::Burgers1d | FluxKind::Burgers2d)
        {
            return Err(Error::UnsupportedScheme {
                scheme: "godunov_burgers".into(),
                flux: flux.name.clone(),
            });
        }
        let dx = grid.dx();
        let max_u0 = u0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let state_bound = a_priori_bound(flux, grid, max_u0, config.t_end);
        let source_growth = state_bound - max_u0;
        // margin on the k-range only where a source can push states outward
        let k_range = state_bound + 0.1 * source_growth;
        let speed = match config.speed_bound {
            Some(b) => b,
            None => sup_speed(flux, grid, k_range),
        };
        let epsilon = match config.scheme {
            Scheme::Viscous { viscosity } => viscosity.epsilon(dx),
            _ => 0.0,
        };
        // a flux with ∂ₖf ≡ 0 falls back to unit speed for the step size
        let lam = if speed > 0.0 { speed } else { 1.0 };
        let dt = config.cfl / (grid.dim as f64 * (lam / dx + 2.0 * epsilon / (dx * dx)));
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::CflViolation(format!("computed dt = {dt}")));
        }
        let blowup_limit = 10.0 * (max_u0 + config.t_end * sup_div_x(flux, grid, k_range));
        Ok(Self {
            dt,
            speed,
            epsilon,
            state_bound,
            blowup_limit,
        })
    }
}

/// `config` with the speed bound raised to the largest planned bound over
/// several initial data, so that every run takes the same time step and
/// stores the same levels. An explicit speed bound is kept as is.
pub fn shared_config(flux: &FluxSpec, grid: &Grid, config: &SchemeConfig, data: &[&InitialData]) -> Result<SchemeConfig> {
    if config.speed_bound.is_some() {
        return Ok(*config);
    }
    let mut speed: f64 = 0.0;
    for d in data {
        let u0 = d.cell_averages(grid)?;
        speed = speed.max(StepPlan::new(flux, grid, config, &u0)?.speed);
    }
    Ok(if speed > 0.0 { config.with_speed_bound(speed) } else { *config })
}

/// Explicit time stepper; [`solve`] drives it and stores levels.
#[derive(Debug, Clone)]
pub struct Stepper<'a> {
    flux: &'a FluxSpec,
    grid: Grid,
    config: SchemeConfig,
    plan: StepPlan,
    u: Vec<f64>,
    scratch: Vec<f64>,
    line: Vec<f64>,
    fluxes: Vec<f64>,
    steps: usize,
    t: f64,
}

impl<'a> Stepper<'a> {
    pub fn new(flux: &'a FluxSpec, u0: &InitialData, grid: &Grid, config: &SchemeConfig) -> Result<Self> {
        let u = u0.cell_averages(grid)?;
        let plan = StepPlan::new(flux, grid, config, &u)?;
        let n = grid.nx;
        Ok(Self {
            flux,
            grid: *grid,
            config: *config,
            plan,
            scratch: u.clone(),
            u,
            line: vec![0.0; n + 2],
            fluxes: vec![0.0; n + 1],
            steps: 0,
            t: 0.0,
        })
    }

    pub fn plan(&self) -> &StepPlan {
        &self.plan
    }

    pub fn state(&self) -> &[f64] {
        &self.u
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn finished(&self) -> bool {
        self.t >= self.config.t_end
    }

    /// Advances one step and returns the Δt used; `None` once t_end is reached.
    pub fn step(&mut self) -> Result<Option<f64>> {
        if self.finished() {
            return Ok(None);
        }
        let dt_nom = self.plan.dt;
        let next_nominal = (self.steps + 1) as f64 * dt_nom;
        let t_next = if next_nominal >= self.config.t_end * (1.0 - 1e-12) {
            self.config.t_end
        } else {
            next_nominal
        };
        let dt = t_next - self.t;
        for axis in 0..self.grid.dim {
            self.sweep(axis, dt)?;
        }
        self.steps += 1;
        self.t = t_next;
        let limit = self.plan.blowup_limit;
        if let Some(&bad) = self.u.iter().find(|v| !(v.abs() <= limit)) {
            return Err(Error::BlowUp {
                t: self.t,
                value: bad,
                limit,
            });
        }
        Ok(Some(dt))
    }

    /// One 1-d update along `axis` for every grid line, u ← u − Δt ∂_axis F.
    fn sweep(&mut self, axis: usize, dt: f64) -> Result<()> {
        let nx = self.grid.nx;
        let dx = self.grid.dx();
        let mu = dt / dx;
        let nu = self.plan.epsilon * dt / (dx * dx);
        let n_lines = if self.grid.dim == 1 { 1 } else { nx };
        let (stride, line_stride) = if axis == 0 { (1, nx) } else { (nx, 1) };
        let speed_cap = self.plan.speed * (1.0 + CFL_SLACK) + f64::MIN_POSITIVE;
        let check_speed = self.plan.speed > 0.0;
        for l in 0..n_lines {
            let base = l * line_stride;
            for i in 0..nx {
                self.line[i + 1] = self.u[base + i * stride];
            }
            match self.config.boundary {
                Boundary::Periodic => {
                    self.line[0] = self.line[nx];
                    self.line[nx + 1] = self.line[1];
                }
                Boundary::Outflow => {
                    self.line[0] = self.line[1];
                    self.line[nx + 1] = self.line[nx];
                }
            }
            let other = if self.grid.dim == 2 {
                self.grid.center(l)[0]
            } else {
                0.0
            };
            let n_iface = match self.config.boundary {
                Boundary::Periodic => nx,
                Boundary::Outflow => nx + 1,
            };
            for k in 0..n_iface {
                let a = self.grid.interface(k);
                let x = if axis == 0 { [a, other] } else { [other, a] };
                let (f, lam) = interface_flux(
                    self.flux,
                    &self.config.scheme,
                    &x,
                    axis,
                    self.line[k],
                    self.line[k + 1],
                );
                if check_speed && lam > speed_cap {
                    return Err(Error::CflViolation(format!(
                        "local speed {lam} exceeds the step bound {} at t = {}; raise speed_bound",
                        self.plan.speed, self.t
                    )));
                }
                self.fluxes[k] = f;
            }
            if self.config.boundary == Boundary::Periodic {
                self.fluxes[nx] = self.fluxes[0];
            }
            for i in 0..nx {
                let mut v = self.line[i + 1] - mu * (self.fluxes[i + 1] - self.fluxes[i]);
                if nu > 0.0 {
                    v += nu * (self.line[i + 2] - 2.0 * self.line[i + 1] + self.line[i]);
                }
                self.scratch[base + i * stride] = v;
            }
        }
        std::mem::swap(&mut self.u, &mut self.scratch);
        Ok(())
    }
}

/// Numerical flux and the local speed λ at one interface.
#[inline]
fn interface_flux(flux: &FluxSpec, scheme: &Scheme, x: &Vector, axis: usize, ul: f64, ur: f64) -> (f64, f64) {
    match scheme {
        Scheme::GodunovBurgers => {
            let f = |u: f64| 0.5 * u * u;
            let v = f(ul.max(0.0)).max(f(ur.min(0.0)));
            (v, ul.abs().max(ur.abs()))
        }
        Scheme::Rusanov | Scheme::Viscous { .. } => {
            let fl = flux.eval(x, ul)[axis];
            let fr = flux.eval(x, ur)[axis];
            let lam = flux.dk(x, ul)[axis].abs().max(flux.dk(x, ur)[axis].abs());
            (0.5 * (fl + fr) - 0.5 * lam * (ur - ul), lam)
        }
    }
}

/// Runs the scheme to t_end and stores level 0, every `store_every`-th step
/// and the final level.
pub fn solve(flux: &FluxSpec, u0: &InitialData, grid: &Grid, config: &SchemeConfig) -> Result<GridField> {
    let mut st = Stepper::new(flux, u0, grid, config)?;
    let mut times = vec![0.0];
    let mut data = vec![st.state().to_vec()];
    while st.step()?.is_some() {
        if st.steps() % config.store_every == 0 || st.finished() {
            times.push(st.time());
            data.push(st.state().to_vec());
        }
    }
    GridField::new(*grid, times, data)
}

/// [`solve`] with the viscous scheme and a fixed ε.
pub fn solve_viscous(
    flux: &FluxSpec,
    u0: &InitialData,
    eps: f64,
    grid: &Grid,
    config: &SchemeConfig,
) -> Result<GridField> {
    let cfg = config.with_scheme(Scheme::Viscous {
        viscosity: Viscosity::Fixed(eps),
    });
    solve(flux, u0, grid, &cfg)
}

/// Midpoint-rule ∫_{B_r(c)} |a − b| dx over cells whose centers lie in the
/// closed ball, at a stored level t.
pub fn l1_distance_on_ball(a: &GridField, b: &GridField, t: f64, center: &Vector, radius: f64) -> Result<f64> {
    if !a.same_grid(b) {
        return Err(Error::GridMismatch(format!("grids differ: {:?} vs {:?}", a.grid, b.grid)));
    }
    if !(radius >= 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be >= 0, got {radius}")));
    }
    let la = a.level_index(t)?;
    let lb = b.level_index(t)?;
    Ok(l1_on_ball_at_levels(a, la, b, lb, center, radius))
}

pub(crate) fn l1_on_ball_at_levels(a: &GridField, la: usize, b: &GridField, lb: usize, center: &Vector, radius: f64) -> f64 {
    let vol = a.dx().powi(a.dim() as i32);
    let r2 = radius * radius;
    let (sa, sb) = (a.slab(la), b.slab(lb));
    let mut acc = 0.0;
    for i in 0..sa.len() {
        let c = a.grid.center(i);
        let d2 = (c[0] - center[0]).powi(2) + (c[1] - center[1]).powi(2);
        if d2 <= r2 {
            acc += (sa[i] - sb[i]).abs();
        }
    }
    acc * vol
}

/// Worst cell violation of the discrete Kruzkov inequality
/// |u_i^{n+1} − k| − |u_i^n − k| + (Δt/Δx)(Q_{i+1/2} − Q_{i−1/2}) ≤ 0 for one
/// 1-d Rusanov step, with Q = ½[q(u_i) + q(u_{i+1})] − ½λ(|u_{i+1} − k| − |u_i − k|)
/// built from the same interface λ as the step.
pub fn rusanov_entropy_defect(
    flux: &FluxSpec,
    grid: &Grid,
    boundary: Boundary,
    u: &[f64],
    next: &[f64],
    dt: f64,
    k: f64,
) -> Result<f64> {
    if grid.dim != 1 {
        return Err(Error::InvalidArgument("cell entropy check is 1-d only".into()));
    }
    let nx = grid.nx;
    let mut ext = Vec::with_capacity(nx + 2);
    match boundary {
        Boundary::Periodic => ext.push(u[nx - 1]),
        Boundary::Outflow => ext.push(u[0]),
    }
    ext.extend_from_slice(u);
    match boundary {
        Boundary::Periodic => ext.push(u[0]),
        Boundary::Outflow => ext.push(u[nx - 1]),
    }
    let q = |x: &Vector, v: f64| crate::sign(v - k) * (flux.eval(x, v)[0] - flux.eval(x, k)[0]);
    let big_q: Vec<f64> = (0..=nx)
        .map(|i| {
            let x = [grid.interface(i), 0.0];
            let (a, b) = if boundary == Boundary::Periodic && i == nx {
                (ext[0], ext[1])
            } else {
                (ext[i], ext[i + 1])
            };
            let xq = if boundary == Boundary::Periodic && i == nx {
                [grid.interface(0), 0.0]
            } else {
                x
            };
            let lam = flux.dk(&xq, a)[0].abs().max(flux.dk(&xq, b)[0].abs());
            0.5 * (q(&xq, a) + q(&xq, b)) - 0.5 * lam * ((b - k).abs() - (a - k).abs())
        })
        .collect();
    let mu = dt / grid.dx();
    let mut worst = f64::NEG_INFINITY;
    for i in 0..nx {
        let d = (next[i] - k).abs() - (u[i] - k).abs() + mu * (big_q[i + 1] - big_q[i]);
        worst = worst.max(d);
    }
    Ok(worst)
}
