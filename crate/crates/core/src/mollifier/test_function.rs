use crate::{dot, norm, Error, Result, Vector};

use super::cone::{chi_epsilon, chi_epsilon_dt, chi_epsilon_grad, ConeSpec};
use super::{alpha, omega, omega_sup, Mollifier};

/// Space-time bounding box of a test-function support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportBox {
    pub dim: usize,
    pub lower: Vector,
    pub upper: Vector,
    pub t_lower: f64,
    pub t_upper: f64,
}

impl SupportBox {
    /// Lebesgue measure of the box in ℝ^d × ℝ.
    pub fn measure(&self) -> f64 {
        let mut m = self.t_upper - self.t_lower;
        for i in 0..self.dim {
            m *= self.upper[i] - self.lower[i];
        }
        m
    }

    pub fn contains(&self, x: &Vector, t: f64) -> bool {
        t >= self.t_lower
            && t <= self.t_upper
            && (0..self.dim).all(|i| x[i] >= self.lower[i] && x[i] <= self.upper[i])
    }
}

/// A non-negative compactly supported Lipschitz function φ(x, t).
pub trait TestFunction: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &Vector, t: f64) -> f64;
    fn dt(&self, x: &Vector, t: f64) -> f64;
    fn grad_x(&self, x: &Vector, t: f64) -> Vector;
    fn support(&self) -> SupportBox;
    /// Upper bound on the space-time gradient norm.
    fn lipschitz_bound(&self) -> f64;
    fn describe(&self) -> String;
}

/// Peak-one smooth bump b(z) = exp(1 − 1/(1 − z²)) on |z| < 1.
#[inline]
fn bump(z: f64) -> f64 {
    let r = 1.0 - z * z;
    if r > 0.0 {
        (1.0 - 1.0 / r).exp()
    } else {
        0.0
    }
}

#[inline]
fn bump_prime(z: f64) -> f64 {
    let r = 1.0 - z * z;
    if r > 0.0 {
        bump(z) * (-2.0 * z / (r * r))
    } else {
        0.0
    }
}

/// sup |b′|, attained where 3z⁴ = 1.
fn bump_prime_sup() -> f64 {
    bump_prime(3f64.powf(-0.25)).abs()
}

/// Tensor-product smooth bump in space and time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpTestFunction {
    pub dim: usize,
    pub center: Vector,
    pub radius: Vector,
    pub t_center: f64,
    pub t_radius: f64,
}

impl BumpTestFunction {
    pub fn new(dim: usize, center: Vector, radius: Vector, t_center: f64, t_radius: f64) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidArgument(format!("dimension {dim} not supported")));
        }
        if (0..dim).any(|i| !(radius[i] > 0.0)) || !(t_radius > 0.0) {
            return Err(Error::InvalidArgument("bump radii must be positive".into()));
        }
        if t_center - t_radius < 0.0 {
            return Err(Error::InvalidArgument(
                "bump support must lie in t >= 0".into(),
            ));
        }
        Ok(Self {
            dim,
            center,
            radius,
            t_center,
            t_radius,
        })
    }

    /// 1-d convenience constructor.
    pub fn interval(x_center: f64, x_radius: f64, t_center: f64, t_radius: f64) -> Result<Self> {
        Self::new(1, [x_center, 0.0], [x_radius, 1.0], t_center, t_radius)
    }

    fn factors(&self, x: &Vector, t: f64) -> ([f64; 3], [f64; 3]) {
        let mut v = [1.0; 3];
        let mut d = [0.0; 3];
        for i in 0..self.dim {
            let z = (x[i] - self.center[i]) / self.radius[i];
            v[i] = bump(z);
            d[i] = bump_prime(z) / self.radius[i];
        }
        let zt = (t - self.t_center) / self.t_radius;
        v[2] = bump(zt);
        d[2] = bump_prime(zt) / self.t_radius;
        (v, d)
    }
}

impl TestFunction for BumpTestFunction {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &Vector, t: f64) -> f64 {
        let (v, _) = self.factors(x, t);
        v[0] * v[1] * v[2]
    }

    fn dt(&self, x: &Vector, t: f64) -> f64 {
        let (v, d) = self.factors(x, t);
        v[0] * v[1] * d[2]
    }

    fn grad_x(&self, x: &Vector, t: f64) -> Vector {
        let (v, d) = self.factors(x, t);
        let mut g = [d[0] * v[1] * v[2], 0.0];
        if self.dim == 2 {
            g[1] = v[0] * d[1] * v[2];
        }
        g
    }

    fn support(&self) -> SupportBox {
        let mut lower = [0.0; 2];
        let mut upper = [0.0; 2];
        for i in 0..self.dim {
            lower[i] = self.center[i] - self.radius[i];
            upper[i] = self.center[i] + self.radius[i];
        }
        SupportBox {
            dim: self.dim,
            lower,
            upper,
            t_lower: self.t_center - self.t_radius,
            t_upper: self.t_center + self.t_radius,
        }
    }

    fn lipschitz_bound(&self) -> f64 {
        let s = bump_prime_sup();
        let mut acc = (s / self.t_radius).powi(2);
        for i in 0..self.dim {
            acc += (s / self.radius[i]).powi(2);
        }
        acc.sqrt()
    }

    fn describe(&self) -> String {
        format!(
            "bump(center={:?}, radius={:?}, t_center={}, t_radius={})",
            &self.center[..self.dim],
            &self.radius[..self.dim],
            self.t_center,
            self.t_radius
        )
    }
}

/// ψ(x, t) = (α_h(t − ρ) − α_h(t − τ)) χ_ε(x, t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionTestFunction {
    pub dim: usize,
    pub cone: ConeSpec,
    pub rho: f64,
    pub tau: f64,
    pub h: f64,
    pub eps: f64,
}

/// Builds ψ for the window ρ < τ. Requires 0 < h < min(ρ, t_max − τ).
pub fn contraction_test_function(
    dim: usize,
    cone: ConeSpec,
    rho: f64,
    tau: f64,
    h: f64,
    eps: f64,
) -> Result<ContractionTestFunction> {
    if !(1..=2).contains(&dim) {
        return Err(Error::InvalidArgument(format!("dimension {dim} not supported")));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be > 0, got {eps}")));
    }
    if !(0.0 < rho && rho < tau && tau < cone.t_max) {
        return Err(Error::BadWindow(format!(
            "need 0 < rho < tau < t_max, got rho = {rho}, tau = {tau}, t_max = {}",
            cone.t_max
        )));
    }
    if !(h > 0.0) || h >= rho.min(cone.t_max - tau) {
        return Err(Error::BadWindow(format!(
            "need 0 < h < min(rho, t_max - tau) = {}, got h = {h}",
            rho.min(cone.t_max - tau)
        )));
    }
    Ok(ContractionTestFunction {
        dim,
        cone,
        rho,
        tau,
        h,
        eps,
    })
}

impl ContractionTestFunction {
    #[inline]
    fn window(&self, t: f64) -> f64 {
        alpha(self.h, t - self.rho) - alpha(self.h, t - self.tau)
    }

    #[inline]
    fn window_dt(&self, t: f64) -> f64 {
        omega(self.h, t - self.rho) - omega(self.h, t - self.tau)
    }

    /// The bounds |∂ₜψ| ≤ 2‖ω_h‖ + 2N‖ω_ε‖ and |∇ₓψ| ≤ 2‖ω_ε‖.
    pub fn derivative_bounds(&self) -> (f64, f64) {
        let dt = 2.0 * omega_sup(self.h) + 2.0 * self.cone.speed * omega_sup(self.eps);
        let dx = 2.0 * omega_sup(self.eps);
        (dt, dx)
    }
}

impl TestFunction for ContractionTestFunction {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &Vector, t: f64) -> f64 {
        let w = self.window(t);
        if w == 0.0 {
            return 0.0;
        }
        w * chi_epsilon(&self.cone, self.eps, x, t)
    }

    fn dt(&self, x: &Vector, t: f64) -> f64 {
        self.window_dt(t) * chi_epsilon(&self.cone, self.eps, x, t)
            + self.window(t) * chi_epsilon_dt(&self.cone, self.eps, x, t)
    }

    fn grad_x(&self, x: &Vector, t: f64) -> Vector {
        let w = self.window(t);
        let g = chi_epsilon_grad(&self.cone, self.eps, x, t);
        [w * g[0], w * g[1]]
    }

    fn support(&self) -> SupportBox {
        let r = self.cone.radius;
        let mut lower = [0.0; 2];
        let mut upper = [0.0; 2];
        for i in 0..self.dim {
            lower[i] = -r;
            upper[i] = r;
        }
        SupportBox {
            dim: self.dim,
            lower,
            upper,
            t_lower: self.rho - self.h,
            t_upper: (self.tau + self.h).min(self.cone.t_max),
        }
    }

    fn lipschitz_bound(&self) -> f64 {
        let (dt, dx) = self.derivative_bounds();
        dt.hypot(dx)
    }

    fn describe(&self) -> String {
        format!(
            "contraction(R={}, N={}, rho={}, tau={}, h={}, eps={})",
            self.cone.radius, self.cone.speed, self.rho, self.tau, self.h, self.eps
        )
    }
}

/// Value and y-gradient of the doubled-variable kernel ω_ε(t − s) ρ_ε(x − y).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublingKernel {
    pub value: f64,
    pub grad_y: Vector,
}

pub fn doubling_kernel(
    mollifier: &Mollifier,
    x: &Vector,
    t: f64,
    y: &Vector,
    s: f64,
) -> DoublingKernel {
    let eps = mollifier.epsilon;
    let w = omega(eps, t - s);
    let z = [x[0] - y[0], x[1] - y[1]];
    let r = mollifier.value(&z);
    let g = mollifier.gradient(&z);
    DoublingKernel {
        value: w * r,
        // ∇_y ρ_ε(x − y) = −(∇ρ_ε)(x − y)
        grad_y: [-w * g[0], -w * g[1]],
    }
}

/// Radial component x/|x| · v, zero at the origin.
pub fn radial_component(x: &Vector, v: &Vector) -> f64 {
    let r = norm(x);
    if r == 0.0 {
        0.0
    } else {
        dot(x, v) / r
    }
}
