//! Grid fields synthesized from closed-form solutions.

use crate::solver::{exact_riemann_burgers_average, Grid, GridField};
use crate::Result;

/// Stored levels 0, Δt, 2Δt, … up to t_end (last level exactly t_end).
pub fn uniform_times(t_end: f64, dt: f64) -> Vec<f64> {
    let n = (t_end / dt).ceil() as usize;
    let mut times: Vec<f64> = (0..n).map(|j| j as f64 * dt).collect();
    if times.last().is_some_and(|&t| t_end - t < 1e-12 * dt) {
        times.pop();
    }
    times.push(t_end);
    times
}

/// Cell averages of a field given by its exact average over [a, b] at time t.
pub fn from_cell_averages(
    grid: &Grid,
    times: &[f64],
    avg: impl Fn(f64, f64, f64) -> f64,
) -> Result<GridField> {
    let dx = grid.dx();
    let data = times
        .iter()
        .map(|&t| {
            (0..grid.n_cells())
                .map(|idx| {
                    let a = grid.interface(idx % grid.nx);
                    avg(a, a + dx, t)
                })
                .collect()
        })
        .collect();
    GridField::new(*grid, times.to_vec(), data)
}

/// Exact average over [a, b] of a single jump u_left | u_right located at x0 + s t.
pub fn moving_jump_average(u_left: f64, u_right: f64, x0: f64, speed: f64, a: f64, b: f64, t: f64) -> f64 {
    let p = x0 + speed * t;
    if b <= p {
        u_left
    } else if a >= p {
        u_right
    } else {
        ((p - a) * u_left + (b - p) * u_right) / (b - a)
    }
}

/// A jump travelling at `speed`, whether or not it is admissible.
pub fn moving_jump_field(u_left: f64, u_right: f64, x0: f64, speed: f64, grid: &Grid, times: &[f64]) -> Result<GridField> {
    from_cell_averages(grid, times, |a, b, t| {
        moving_jump_average(u_left, u_right, x0, speed, a, b, t)
    })
}

/// Exact Burgers entropy solution of Riemann data at x0.
pub fn burgers_riemann_field(u_left: f64, u_right: f64, x0: f64, grid: &Grid, times: &[f64]) -> Result<GridField> {
    from_cell_averages(grid, times, |a, b, t| {
        if t > 0.0 {
            exact_riemann_burgers_average(u_left, u_right, a - x0, b - x0, t)
        } else {
            moving_jump_average(u_left, u_right, x0, 0.0, a, b, 0.0)
        }
    })
}

/// The field equal to `c` on the grid and levels of `like`.
pub fn constant_like(like: &GridField, c: f64) -> GridField {
    like.map(|_, _, _| c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn times_end_exactly() {
        let t = uniform_times(1.0, 0.3);
        assert_eq!(t.len(), 5);
        assert_eq!(*t.last().unwrap(), 1.0);
        let t = uniform_times(1.0, 0.25);
        assert_eq!(t, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn shock_field_matches_moving_jump() {
        let g = Grid::line(-1.0, 1.0, 40).unwrap();
        let times = uniform_times(0.5, 0.05);
        let a = burgers_riemann_field(1.0, 0.0, 0.0, &g, &times).unwrap();
        let b = moving_jump_field(1.0, 0.0, 0.0, 0.5, &g, &times).unwrap();
        for (sa, sb) in a.data.iter().zip(&b.data) {
            for (x, y) in sa.iter().zip(sb) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
