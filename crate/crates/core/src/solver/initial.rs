use std::f64::consts::PI;

use super::field::Grid;
use crate::{Error, Result};

/// Initial data u₀, sampled as exact cell averages.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    /// u_left for x₁ < x0, u_right for x₁ > x0.
    Riemann { u_left: f64, u_right: f64, x0: f64 },
    /// `height` on [lower, upper]^dim, zero elsewhere.
    Box { height: f64, lower: f64, upper: f64 },
    /// offset + amplitude·Π_i sin(2π·frequency·x_i).
    Sine { amplitude: f64, frequency: f64, offset: f64 },
    Constant { value: f64 },
    /// Explicit cell averages, x-axis fastest.
    Cells(Vec<f64>),
}

/// Length of [a, b] ∩ [c, d].
#[inline]
fn overlap(a: f64, b: f64, c: f64, d: f64) -> f64 {
    (b.min(d) - a.max(c)).max(0.0)
}

impl InitialData {
    /// Cell averages of u₀ on `grid`.
    pub fn cell_averages(&self, grid: &Grid) -> Result<Vec<f64>> {
        grid.validate()?;
        let n = grid.n_cells();
        let dx = grid.dx();
        let axis_bounds = |idx: usize, axis: usize| {
            let i = if axis == 0 { idx % grid.nx } else { idx / grid.nx };
            let lo = grid.lower + i as f64 * dx;
            (lo, lo + dx)
        };
        let values = match *self {
            InitialData::Riemann {
                u_left,
                u_right,
                x0,
            } => (0..n)
                .map(|idx| {
                    let (a, b) = axis_bounds(idx, 0);
                    if b <= x0 {
                        u_left
                    } else if a >= x0 {
                        u_right
                    } else {
                        let wl = (x0 - a) / dx;
                        wl * u_left + (1.0 - wl) * u_right
                    }
                })
                .collect(),
            InitialData::Box {
                height,
                lower,
                upper,
            } => (0..n)
                .map(|idx| {
                    let mut frac = 1.0;
                    for axis in 0..grid.dim {
                        let (a, b) = axis_bounds(idx, axis);
                        frac *= (overlap(a, b, lower, upper) / dx).min(1.0);
                    }
                    if frac == 1.0 {
                        height
                    } else {
                        height * frac
                    }
                })
                .collect(),
            InitialData::Sine {
                amplitude,
                frequency,
                offset,
            } => {
                let w = 2.0 * PI * frequency;
                (0..n)
                    .map(|idx| {
                        let mut prod = 1.0;
                        for axis in 0..grid.dim {
                            let (a, b) = axis_bounds(idx, axis);
                            prod *= if w == 0.0 {
                                0.0
                            } else {
                                ((w * a).cos() - (w * b).cos()) / (w * dx)
                            };
                        }
                        offset + amplitude * prod
                    })
                    .collect()
            }
            InitialData::Constant { value } => vec![value; n],
            InitialData::Cells(ref v) => {
                if v.len() != n {
                    return Err(Error::GridMismatch(format!(
                        "initial data has {} cells, grid has {n}",
                        v.len()
                    )));
                }
                v.clone()
            }
        };
        if let Some(bad) = values.iter().find(|v: &&f64| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite initial value {bad}")));
        }
        Ok(values)
    }

    /// Pointwise value u₀(x₁) for 1-d data; `None` for tabulated cells.
    pub fn point_value(&self, x: f64) -> Option<f64> {
        match *self {
            InitialData::Riemann {
                u_left,
                u_right,
                x0,
            } => Some(if x < x0 { u_left } else { u_right }),
            InitialData::Box {
                height,
                lower,
                upper,
            } => Some(if (lower..=upper).contains(&x) { height } else { 0.0 }),
            InitialData::Sine {
                amplitude,
                frequency,
                offset,
            } => Some(offset + amplitude * (2.0 * PI * frequency * x).sin()),
            InitialData::Constant { value } => Some(value),
            InitialData::Cells(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    #[test]
    fn riemann_and_box_averages() {
        let g = Grid::line(-1.0, 1.0, 8).unwrap();
        let r = InitialData::Riemann {
            u_left: 1.0,
            u_right: 0.0,
            x0: 0.1,
        }
        .cell_averages(&g)
        .unwrap();
        // cell [0, 0.25] holds 0.1 of left state
        assert!((r[4] - 0.4).abs() < 1e-15);
        assert_eq!(r[3], 1.0);
        assert_eq!(r[5], 0.0);
        let b = InitialData::Box {
            height: 2.0,
            lower: -0.5,
            upper: 0.1,
        }
        .cell_averages(&g)
        .unwrap();
        let mass: f64 = b.iter().sum::<f64>() * g.dx();
        assert!((mass - 1.2).abs() < 1e-14);
        assert_eq!(b[2], 2.0);
    }

    #[test]
    fn sine_averages_match_quadrature() {
        let g = Grid::line(0.0, 1.0, 16).unwrap();
        let data = InitialData::Sine {
            amplitude: 0.5,
            frequency: 1.0,
            offset: 0.2,
        };
        let v = data.cell_averages(&g).unwrap();
        for (i, vi) in v.iter().enumerate() {
            let a = g.interface(i);
            let q = integrate(|x| data.point_value(x).unwrap(), a, a + g.dx()).unwrap() / g.dx();
            assert!((q - vi).abs() < 1e-13);
        }
        let g2 = Grid::new(2, 0.0, 1.0, 8).unwrap();
        let v2 = data.cell_averages(&g2).unwrap();
        let total: f64 = v2.iter().sum::<f64>() * g2.dx().powi(2);
        assert!((total - 0.2).abs() < 1e-14);
    }

    #[test]
    fn tabulated_cells_must_match_grid() {
        let g = Grid::line(0.0, 1.0, 4).unwrap();
        assert!(InitialData::Cells(vec![0.0; 3]).cell_averages(&g).is_err());
        assert_eq!(InitialData::Cells(vec![1.0; 4]).cell_averages(&g).unwrap(), vec![1.0; 4]);
    }
}
