use crate::{norm, Error, Result, Vector};

use super::{alpha, omega};

/// The truncated cone {(x, t) : 0 < t < t_max, |x| < R − tN}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeSpec {
    pub radius: f64,
    pub speed: f64,
    /// R/N, or the experiment horizon when N = 0.
    pub t_max: f64,
}

impl ConeSpec {
    /// Cone with vertex time R/N. For N = 0 the cone is a cylinder and
    /// `t_max` is infinite until capped by [`ConeSpec::with_horizon`].
    pub fn new(radius: f64, speed: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("cone radius must be > 0, got {radius}")));
        }
        if !(speed >= 0.0) || !speed.is_finite() {
            return Err(Error::InvalidArgument(format!("cone speed must be >= 0, got {speed}")));
        }
        let t_max = if speed > 0.0 { radius / speed } else { f64::INFINITY };
        Ok(Self {
            radius,
            speed,
            t_max,
        })
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        if self.speed == 0.0 {
            self.t_max = horizon;
        }
        self
    }

    /// R − tN, clamped at zero past the vertex.
    #[inline]
    pub fn ball_radius(&self, t: f64) -> f64 {
        (self.radius - t * self.speed).max(0.0)
    }

    pub fn contains(&self, x: &Vector, t: f64) -> bool {
        t > 0.0 && t < self.t_max && norm(x) < self.radius - t * self.speed
    }
}

/// χ_ε(x, t) = 1 − α_ε(|x| − [R − tN] + ε).
#[inline]
pub fn chi_epsilon(cone: &ConeSpec, eps: f64, x: &Vector, t: f64) -> f64 {
    1.0 - alpha(eps, cutoff_argument(cone, eps, x, t))
}

/// ∂ₜχ_ε = −ω_ε(|x| − [R − tN] + ε) N.
#[inline]
pub fn chi_epsilon_dt(cone: &ConeSpec, eps: f64, x: &Vector, t: f64) -> f64 {
    -omega(eps, cutoff_argument(cone, eps, x, t)) * cone.speed
}

/// ∇ₓχ_ε = −ω_ε(|x| − [R − tN] + ε) x/|x|, set to 0 at x = 0.
#[inline]
pub fn chi_epsilon_grad(cone: &ConeSpec, eps: f64, x: &Vector, t: f64) -> Vector {
    let r = norm(x);
    if r == 0.0 {
        return [0.0; 2];
    }
    let w = omega(eps, cutoff_argument(cone, eps, x, t));
    [-w * x[0] / r, -w * x[1] / r]
}

#[inline]
fn cutoff_argument(cone: &ConeSpec, eps: f64, x: &Vector, t: f64) -> f64 {
    // unclamped R - tN: past the vertex the argument only grows
    norm(x) - (cone.radius - t * cone.speed) + eps
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone() -> ConeSpec {
        ConeSpec::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn cone_geometry() {
        let c = cone();
        assert_eq!(c.t_max, 1.0);
        assert_eq!(c.ball_radius(0.0), 1.0);
        assert_eq!(c.ball_radius(1.0), 0.0);
        assert!(c.ball_radius(0.3) >= c.ball_radius(0.6));
        let flat = ConeSpec::new(2.0, 0.0).unwrap();
        assert!(flat.t_max.is_infinite());
        assert_eq!(flat.with_horizon(3.0).t_max, 3.0);
        assert!(ConeSpec::new(0.0, 1.0).is_err());
    }

    #[test]
    fn chi_examples() {
        let c = cone();
        assert_eq!(chi_epsilon(&c, 0.1, &[0.0, 0.0], 0.1), 1.0);
        assert_eq!(chi_epsilon(&c, 0.1, &[2.0, 0.0], 0.1), 0.0);
        let vals: Vec<f64> = [0.2, 0.1, 0.05, 0.01]
            .iter()
            .map(|&e| chi_epsilon(&c, e, &[0.5, 0.0], 0.25))
            .collect();
        assert!(vals.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(*vals.last().unwrap(), 1.0);
    }

    #[test]
    fn chi_is_bounded_and_vanishes_outside_the_cone() {
        let c = ConeSpec::new(1.5, 0.7).unwrap();
        for i in 0..60 {
            for j in 0..60 {
                let x = [-2.0 + 4.0 * i as f64 / 59.0, 0.0];
                let t = 0.01 + 3.0 * j as f64 / 59.0;
                for eps in [0.3, 0.05] {
                    let v = chi_epsilon(&c, eps, &x, t);
                    assert!((0.0..=1.0).contains(&v));
                    if !c.contains(&x, t) {
                        assert_eq!(v, 0.0, "x = {x:?}, t = {t}");
                    }
                }
            }
        }
    }

    #[test]
    fn chi_converges_to_the_cone_indicator() {
        let c = ConeSpec::new(1.0, 1.0).unwrap();
        let pts = [([0.2, 0.0], 0.1), ([0.6, 0.0], 0.3), ([0.9, 0.0], 0.2), ([0.1, 0.0], 0.95)];
        for (x, t) in pts {
            let target = if c.contains(&x, t) { 1.0 } else { 0.0 };
            let last = chi_epsilon(&c, 1e-3, &x, t);
            assert_eq!(last, target, "x = {x:?}, t = {t}");
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let c = ConeSpec::new(1.0, 0.8).unwrap();
        let eps = 0.2;
        for (x, t) in [([0.55, 0.1], 0.3), ([-0.3, 0.45], 0.2)] {
            let h = 1e-6;
            let fd_t = (chi_epsilon(&c, eps, &x, t + h) - chi_epsilon(&c, eps, &x, t - h)) / (2.0 * h);
            assert!((fd_t - chi_epsilon_dt(&c, eps, &x, t)).abs() < 1e-5);
            let g = chi_epsilon_grad(&c, eps, &x, t);
            for i in 0..2 {
                let mut xp = x;
                let mut xm = x;
                xp[i] += h;
                xm[i] -= h;
                let fd = (chi_epsilon(&c, eps, &xp, t) - chi_epsilon(&c, eps, &xm, t)) / (2.0 * h);
                assert!((fd - g[i]).abs() < 1e-5);
            }
        }
        assert_eq!(chi_epsilon_grad(&c, eps, &[0.0, 0.0], 0.1), [0.0, 0.0]);
    }
}
