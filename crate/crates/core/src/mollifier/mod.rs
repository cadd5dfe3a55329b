//! Standard mollifiers and the test-function constructions built from them.
//!
//! The d-dimensional kernel is ρ(z) = C_d exp(1/(|z|² − 1)) on the open unit
//! ball, ρ_ε(z) = ε^{−d} ρ(z/ε). The 1-d kernel is written ω_h and its
//! cumulative integral α_h. The cone cutoff χ_ε and the contraction test
//! function ψ live in [`cone`] and [`test_function`].

pub mod cone;
pub mod test_function;

use std::sync::OnceLock;

use crate::quadrature::{gl16, integrate_with};
use crate::{Error, Result, Vector, MAX_DIM};

pub use cone::{chi_epsilon, chi_epsilon_dt, chi_epsilon_grad, ConeSpec};
pub use test_function::{
    contraction_test_function, doubling_kernel, BumpTestFunction, ContractionTestFunction,
    DoublingKernel, SupportBox, TestFunction,
};

/// Unnormalized profile exp(1/(r² − 1)) for r² < 1, else 0.
#[inline]
fn profile(r2: f64) -> f64 {
    if r2 < 1.0 {
        (1.0 / (r2 - 1.0)).exp()
    } else {
        0.0
    }
}

/// Normalization C_d with ∫_{ℝ^d} ρ = 1, computed once per dimension by
/// adaptive quadrature of the radial integral |S^{d−1}| ∫₀¹ r^{d−1} exp(1/(r²−1)) dr.
pub fn normalization(dim: usize) -> f64 {
    static CACHE: [OnceLock<f64>; MAX_DIM] = [OnceLock::new(), OnceLock::new()];
    assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} not supported");
    *CACHE[dim - 1].get_or_init(|| {
        let radial = integrate_with(
            |r| r.powi(dim as i32 - 1) * profile(r * r),
            0.0,
            1.0,
            1e-15,
            40,
        )
        .expect("mollifier radial integral converges");
        let sphere = match dim {
            1 => 2.0,
            _ => 2.0 * std::f64::consts::PI,
        };
        1.0 / (sphere * radial)
    })
}

/// The scaled kernel ρ_ε on ℝ^d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mollifier {
    pub dim: usize,
    pub epsilon: f64,
    pub normalization: f64,
}

impl Mollifier {
    pub fn new(dim: usize, epsilon: f64) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidArgument(format!("dimension {dim} not supported")));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!("mollifier scale must be > 0, got {epsilon}")));
        }
        Ok(Self {
            dim,
            epsilon,
            normalization: normalization(dim),
        })
    }

    fn scale(&self) -> f64 {
        self.epsilon.powi(self.dim as i32)
    }

    /// ρ_ε(z); only the first `dim` components of `z` are read.
    #[inline]
    pub fn value(&self, z: &Vector) -> f64 {
        let r2 = self.radius2(z);
        self.normalization * profile(r2) / self.scale()
    }

    /// ∇ρ_ε(z).
    #[inline]
    pub fn gradient(&self, z: &Vector) -> Vector {
        let r2 = self.radius2(z);
        if r2 >= 1.0 {
            return [0.0; 2];
        }
        let p = self.normalization * profile(r2) / self.scale();
        let factor = -2.0 / ((r2 - 1.0) * (r2 - 1.0)) / (self.epsilon * self.epsilon);
        let mut g = [0.0; 2];
        for (gi, zi) in g.iter_mut().zip(z.iter()).take(self.dim) {
            *gi = p * factor * zi;
        }
        g
    }

    /// ‖ρ_ε‖_∞ = ρ_ε(0).
    pub fn sup_norm(&self) -> f64 {
        self.normalization * (-1.0f64).exp() / self.scale()
    }

    #[inline]
    fn radius2(&self, z: &Vector) -> f64 {
        let mut r2 = 0.0;
        for zi in z.iter().take(self.dim) {
            let s = zi / self.epsilon;
            r2 += s * s;
        }
        r2
    }
}

/// The 1-d kernel ω_h(s).
#[inline]
pub fn omega(h: f64, s: f64) -> f64 {
    let z = s / h;
    normalization(1) * profile(z * z) / h
}

/// ω_h′(s).
#[inline]
pub fn omega_prime(h: f64, s: f64) -> f64 {
    let z = s / h;
    let r2 = z * z;
    if r2 >= 1.0 {
        return 0.0;
    }
    normalization(1) * profile(r2) / h * (-2.0 * z / ((r2 - 1.0) * (r2 - 1.0))) / h
}

/// ‖ω_h‖_∞.
pub fn omega_sup(h: f64) -> f64 {
    normalization(1) * (-1.0f64).exp() / h
}

const ALPHA_TABLE_INTERVALS: usize = 10_000;

/// Cumulative integral A(z) = ∫_{−1}^{z} ρ(s) ds of the unit 1-d kernel on
/// [−1, 0], tabulated with node derivatives for monotone cubic Hermite
/// interpolation. Values on (0, 1] follow from A(z) = 1 − A(−z).
struct AlphaTable {
    values: Vec<f64>,
    slopes: Vec<f64>,
    step: f64,
}

impl AlphaTable {
    fn build() -> Self {
        let n = ALPHA_TABLE_INTERVALS;
        let step = 1.0 / n as f64;
        let c = normalization(1);
        let rule = gl16();
        let node = |j: usize| -1.0 + j as f64 * step;
        let mut values = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        values.push(0.0);
        for j in 0..n {
            acc += c * rule.apply(&mut |s: f64| profile(s * s), node(j), node(j + 1));
            values.push(acc);
        }
        debug_assert!((acc - 0.5).abs() < 1e-13, "half mass {acc}");
        values[n] = 0.5;
        let mut slopes: Vec<f64> = (0..=n).map(|j| c * profile(node(j) * node(j))).collect();
        // Fritsch–Carlson limiter
        for j in 0..n {
            let delta = (values[j + 1] - values[j]) / step;
            if delta <= 0.0 {
                slopes[j] = 0.0;
                slopes[j + 1] = 0.0;
                continue;
            }
            let a = slopes[j] / delta;
            let b = slopes[j + 1] / delta;
            let s = a * a + b * b;
            if s > 9.0 {
                let t = 3.0 / s.sqrt();
                slopes[j] = t * a * delta;
                slopes[j + 1] = t * b * delta;
            }
        }
        Self {
            values,
            slopes,
            step,
        }
    }

    fn eval_left(&self, z: f64) -> f64 {
        // z in [-1, 0]
        let pos = (z + 1.0) / self.step;
        let j = (pos.floor() as usize).min(ALPHA_TABLE_INTERVALS - 1);
        let t = pos - j as f64;
        let (y0, y1) = (self.values[j], self.values[j + 1]);
        let (m0, m1) = (self.slopes[j] * self.step, self.slopes[j + 1] * self.step);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1
    }
}

fn alpha_table() -> &'static AlphaTable {
    static TABLE: OnceLock<AlphaTable> = OnceLock::new();
    TABLE.get_or_init(AlphaTable::build)
}

/// α_h(σ) = ∫_{−∞}^{σ} ω_h(s) ds from the interpolation table. Exactly 0 for
/// σ ≤ −h, exactly 1 for σ ≥ h and exactly 1/2 at σ = 0.
pub fn alpha(h: f64, sigma: f64) -> f64 {
    let z = sigma / h;
    if z <= -1.0 {
        0.0
    } else if z >= 1.0 {
        1.0
    } else if z <= 0.0 {
        alpha_table().eval_left(z)
    } else {
        1.0 - alpha_table().eval_left(-z)
    }
}

/// α_h(σ) by direct adaptive quadrature; the reference for [`alpha`].
pub fn alpha_quadrature(h: f64, sigma: f64) -> Result<f64> {
    let z = sigma / h;
    if z <= -1.0 {
        return Ok(0.0);
    }
    if z >= 1.0 {
        return Ok(1.0);
    }
    let c = normalization(1);
    let mass = integrate_with(|s| profile(s * s), -1.0, z, 1e-14, 40)?;
    Ok(c * mass)
}

/// ∫_a^b ω_h(s) ds = α_h(b) − α_h(a).
#[inline]
pub fn omega_mass(h: f64, a: f64, b: f64) -> f64 {
    alpha(h, b) - alpha(h, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    #[test]
    fn one_dimensional_constant_matches_reference() {
        // ∫_{-1}^{1} exp(1/(x²-1)) dx ≈ 0.443994
        let c = normalization(1);
        assert!((c - 2.25228).abs() < 1e-5, "{c}");
        assert!((1.0 / c - 0.443994).abs() < 1e-6);
    }

    #[test]
    fn kernels_have_unit_mass() {
        for eps in [1.0, 0.1, 0.01] {
            let m = integrate(|s| omega(eps, s), -eps, eps).unwrap();
            assert!((m - 1.0).abs() < 1e-10, "{eps}: {m}");
            let rho = Mollifier::new(2, eps).unwrap();
            let m2 = integrate(
                |x| {
                    let w = (eps * eps - x * x).max(0.0).sqrt();
                    integrate(|y| rho.value(&[x, y]), -w, w).unwrap()
                },
                -eps,
                eps,
            )
            .unwrap();
            assert!((m2 - 1.0).abs() < 1e-10, "2-d {eps}: {m2}");
        }
    }

    #[test]
    fn support_is_the_closed_ball() {
        let rho = Mollifier::new(2, 0.5).unwrap();
        assert_eq!(rho.value(&[0.5, 0.0]), 0.0);
        assert_eq!(rho.value(&[0.4, 0.4]), 0.0);
        assert!(rho.value(&[0.49, 0.0]) > 0.0);
        assert_eq!(rho.value(&[0.0, 0.0]), rho.sup_norm());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let rho = Mollifier::new(2, 0.3).unwrap();
        for z in [[0.1, -0.05], [0.2, 0.1], [-0.01, 0.25]] {
            let g = rho.gradient(&z);
            let h = 1e-6;
            for i in 0..2 {
                let mut zp = z;
                let mut zm = z;
                zp[i] += h;
                zm[i] -= h;
                let fd = (rho.value(&zp) - rho.value(&zm)) / (2.0 * h);
                assert!((fd - g[i]).abs() < 1e-5 * g[i].abs().max(1.0), "{fd} vs {}", g[i]);
            }
        }
    }

    #[test]
    fn alpha_examples_and_endpoints() {
        assert_eq!(alpha(0.1, -0.2), 0.0);
        assert_eq!(alpha(0.1, 0.0), 0.5);
        assert_eq!(alpha(0.1, 0.2), 1.0);
        assert_eq!(alpha(0.1, -0.1), 0.0);
        assert_eq!(alpha(0.1, 0.1), 1.0);
    }

    #[test]
    fn alpha_table_agrees_with_quadrature_and_is_monotone() {
        let mut prev = 0.0;
        for j in 0..=1000 {
            let s = -1.0 + 2.0 * j as f64 / 1000.0;
            let a = alpha(1.0, s);
            let b = alpha_quadrature(1.0, s).unwrap();
            assert!((a - b).abs() < 1e-12, "{s}: {a} vs {b}");
            assert!(a >= prev);
            prev = a;
        }
    }

    #[test]
    fn omega_prime_matches_differences() {
        let h = 0.2;
        for s in [-0.15, -0.05, 0.03, 0.12] {
            let d = 1e-7;
            let fd = (omega(h, s + d) - omega(h, s - d)) / (2.0 * d);
            assert!((fd - omega_prime(h, s)).abs() < 1e-5 * fd.abs().max(1.0));
        }
    }
}
