//! Adaptive composite Gauss–Legendre quadrature.
//!
//! Panels use the 16-point rule. A panel is accepted when its value agrees
//! with the sum of its two halves within the local tolerance; otherwise both
//! halves are refined with half the tolerance each, so the accepted panels
//! carry a total error estimate below the requested absolute tolerance.

use std::sync::OnceLock;

use crate::{Error, Result};

/// Default absolute tolerance for entropy-flux integrals.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default bisection depth limit.
pub const DEFAULT_MAX_DEPTH: u32 = 30;

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Applies the rule on `[a, b]`.
    #[inline]
    pub fn apply<F: FnMut(f64) -> f64>(&self, f: &mut F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The shared 16-point rule.
pub fn gl16() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(16))
}

/// A cheaper rule used for per-cell integration of smooth kernels.
pub fn gl4() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(4))
}

/// Signed integral of `f` over `[a, b]` with the default tolerance and depth.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    integrate_with(f, a, b, DEFAULT_TOL, DEFAULT_MAX_DEPTH)
}

/// Signed integral of `f` over `[a, b]`; `b < a` flips the sign.
pub fn integrate_with<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "integration bounds must be finite, got [{a}, {b}]"
        )));
    }
    let (lo, hi, sgn) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let rule = gl16();
    let whole = rule.apply(&mut f, lo, hi);
    let value = refine(&mut f, rule, lo, hi, whole, tol, 0, max_depth)?;
    Ok(sgn * value)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: FnMut(f64) -> f64>(
    f: &mut F,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    max_depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let left = rule.apply(f, a, m);
    let right = rule.apply(f, m, b);
    let halves = left + right;
    if !halves.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }
    // Rounding floor: a tolerance below a few ulps of the panel value is unattainable.
    let floor = 64.0 * f64::EPSILON * halves.abs();
    if (whole - halves).abs() <= tol.max(floor) {
        return Ok(halves);
    }
    if depth >= max_depth {
        return Err(Error::QuadratureNonConvergent {
            a,
            b,
            tol,
            depth,
        });
    }
    let l = refine(f, rule, a, m, left, 0.5 * tol, depth + 1, max_depth)?;
    let r = refine(f, rule, m, b, right, 0.5 * tol, depth + 1, max_depth)?;
    Ok(l + r)
}

/// Integral over `[a, b]` with the interval split at interior break points.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
) -> Result<f64> {
    let (lo, hi, sgn) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut pts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|p| *p > lo && *p < hi)
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut total = 0.0;
    let mut left = lo;
    let n = pts.len();
    for p in pts.into_iter().chain(std::iter::once(hi)) {
        total += integrate(&mut f, left, p)?;
        left = p;
    }
    debug_assert!(n == 0 || left == hi);
    Ok(sgn * total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl16_integrates_degree_31_exactly() {
        let rule = gl16();
        let v = rule.apply(&mut |x: f64| x.powi(30) + x.powi(31), -1.0, 1.0);
        assert!((v - 2.0 / 31.0).abs() < 1e-14, "{v}");
        let wsum: f64 = rule.weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn odd_rules_have_center_node() {
        let rule = GaussLegendre::new(5);
        assert_eq!(rule.nodes[2], 0.0);
        let v = rule.apply(&mut |x: f64| x.powi(8), -1.0, 1.0);
        assert!((v - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn orientation_and_empty_interval() {
        let fwd = integrate(|x| x * x, 0.0, 2.0).unwrap();
        let back = integrate(|x| x * x, 2.0, 0.0).unwrap();
        assert!((fwd - 8.0 / 3.0).abs() < 1e-12);
        assert_eq!(fwd, -back);
        assert_eq!(integrate(|x| x, 1.5, 1.5).unwrap(), 0.0);
    }

    #[test]
    fn kinked_integrand_converges() {
        let v = integrate(|x: f64| (x - 0.3).abs(), -1.0, 1.0).unwrap();
        let exact = 0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7;
        assert!((v - exact).abs() < 1e-10, "{v} vs {exact}");
    }

    #[test]
    fn interior_jump_stalls_without_breaks() {
        let err = integrate(|x: f64| if x < 0.123 { 0.0 } else { 1.0 }, 0.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergent { .. }));
        let v = integrate_with_breaks(|x: f64| if x < 0.123 { 0.0 } else { 1.0 }, 0.0, 1.0, &[0.123])
            .unwrap();
        assert!((v - 0.877).abs() < 1e-12);
    }
}
