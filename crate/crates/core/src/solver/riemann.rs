//! Exact entropy solution of the Burgers Riemann problem, f(u) = u²/2.

/// u(x, t) for data u_left | u_right at x = 0. At the shock itself the
/// left state is returned.
pub fn exact_riemann_burgers(u_left: f64, u_right: f64, x: f64, t: f64) -> f64 {
    assert!(t > 0.0, "exact_riemann_burgers needs t > 0");
    if u_left == u_right {
        return u_left;
    }
    if u_left > u_right {
        let s = 0.5 * (u_left + u_right);
        if x <= s * t {
            u_left
        } else {
            u_right
        }
    } else {
        (x / t).clamp(u_left, u_right)
    }
}

/// Antiderivative X ↦ ∫_0^X u(x, t) dx of the exact solution.
fn antiderivative(u_left: f64, u_right: f64, x: f64, t: f64) -> f64 {
    if u_left >= u_right {
        let s = if u_left == u_right { 0.0 } else { 0.5 * (u_left + u_right) } * t;
        // piecewise constant with one jump at s
        if x <= s {
            u_left * x
        } else {
            u_left * s + u_right * (x - s)
        }
    } else {
        // u = u_left for x < u_left t, x/t inside the fan, u_right beyond
        let a = u_left * t;
        let b = u_right * t;
        let prim = |y: f64| -> f64 {
            if y <= a {
                u_left * y
            } else if y <= b {
                u_left * a + (y * y - a * a) / (2.0 * t)
            } else {
                u_left * a + (b * b - a * a) / (2.0 * t) + u_right * (y - b)
            }
        };
        prim(x) - prim(0.0)
    }
}

/// Exact average of u(·, t) over [a, b].
pub fn exact_riemann_burgers_average(u_left: f64, u_right: f64, a: f64, b: f64, t: f64) -> f64 {
    assert!(t > 0.0 && b > a);
    (antiderivative(u_left, u_right, b, t) - antiderivative(u_left, u_right, a, t)) / (b - a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_with_breaks;

    #[test]
    fn examples() {
        assert_eq!(exact_riemann_burgers(1.0, 0.0, 0.4, 1.0), 1.0);
        assert_eq!(exact_riemann_burgers(1.0, 0.0, 0.6, 1.0), 0.0);
        assert_eq!(exact_riemann_burgers(0.0, 1.0, 0.5, 1.0), 0.5);
        assert_eq!(exact_riemann_burgers(0.0, 1.0, -0.5, 1.0), 0.0);
        assert_eq!(exact_riemann_burgers(0.0, 1.0, 1.5, 1.0), 1.0);
        for x in [-3.0, 0.0, 2.0] {
            assert_eq!(exact_riemann_burgers(0.7, 0.7, x, 0.3), 0.7);
        }
    }

    #[test]
    fn averages_match_quadrature() {
        let cases = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.5), (0.5, -1.0), (2.0, 2.0)];
        for (ul, ur) in cases {
            for (a, b) in [(-1.0, -0.2), (-0.3, 0.45), (0.1, 0.2), (0.2, 1.3)] {
                let t = 0.8;
                let s = 0.5 * (ul + ur) * t;
                let breaks = [s, ul * t, ur * t];
                let q = integrate_with_breaks(
                    |x| exact_riemann_burgers(ul, ur, x, t),
                    a,
                    b,
                    &breaks,
                )
                .unwrap()
                    / (b - a);
                let e = exact_riemann_burgers_average(ul, ur, a, b, t);
                assert!((q - e).abs() < 1e-12, "{ul},{ur} on [{a},{b}]: {q} vs {e}");
            }
        }
    }
}
