use crate::{Error, Result, Vector};

/// Uniform Cartesian grid on the box [lower, upper]^dim.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub dim: usize,
    pub lower: f64,
    pub upper: f64,
    /// Cells per axis.
    pub nx: usize,
}

/// Grids are equal when they have the same cells: dimension, cell count,
/// and origin and width up to 1e-9 of a cell (file formats store dx or cell
/// centers, not the upper corner).
impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        let dx = self.dx();
        self.dim == other.dim
            && self.nx == other.nx
            && (self.lower - other.lower).abs() <= 1e-9 * dx
            && (dx - other.dx()).abs() <= 1e-9 * dx
    }
}

impl Grid {
    pub fn new(dim: usize, lower: f64, upper: f64, nx: usize) -> Result<Self> {
        let g = Self {
            dim,
            lower,
            upper,
            nx,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn line(lower: f64, upper: f64, nx: usize) -> Result<Self> {
        Self::new(1, lower, upper, nx)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.dim) {
            return Err(Error::InvalidArgument(format!("dimension {} not supported", self.dim)));
        }
        if !(self.lower < self.upper) || !self.lower.is_finite() || !self.upper.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "empty domain [{}, {}]",
                self.lower, self.upper
            )));
        }
        if self.nx < 2 {
            return Err(Error::InvalidArgument("need at least 2 cells per axis".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        (self.upper - self.lower) / self.nx as f64
    }

    pub fn n_cells(&self) -> usize {
        self.nx.pow(self.dim as u32)
    }

    /// Same grid with `factor` times as many cells per axis.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            nx: self.nx * factor,
            ..*self
        }
    }

    /// Center of the cell with flat index `idx` (x-axis fastest).
    #[inline]
    pub fn center(&self, idx: usize) -> Vector {
        let dx = self.dx();
        let i = idx % self.nx;
        let mut c = [self.lower + (i as f64 + 0.5) * dx, 0.0];
        if self.dim == 2 {
            let j = idx / self.nx;
            c[1] = self.lower + (j as f64 + 0.5) * dx;
        }
        c
    }

    /// Position of interface `i` (between cells i−1 and i) along an axis.
    #[inline]
    pub fn interface(&self, i: usize) -> f64 {
        self.lower + i as f64 * self.dx()
    }

    /// Flat index of the cell containing `x`, if inside the domain.
    pub fn locate(&self, x: &Vector) -> Option<usize> {
        let dx = self.dx();
        let mut idx = 0;
        let mut stride = 1;
        for &xi in x.iter().take(self.dim) {
            if xi < self.lower || xi > self.upper {
                return None;
            }
            let i = (((xi - self.lower) / dx).floor() as usize).min(self.nx - 1);
            idx += i * stride;
            stride *= self.nx;
        }
        Some(idx)
    }
}

/// Cell averages u_i^n on a uniform grid at a list of stored time levels.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub grid: Grid,
    pub times: Vec<f64>,
    /// One slab of `grid.n_cells()` values per stored level.
    pub data: Vec<Vec<f64>>,
    /// max |u| over all stored slabs.
    pub bound_m: f64,
}

/// Relative tolerance used to match a requested time to a stored level.
const TIME_MATCH: f64 = 1e-12;

impl GridField {
    pub fn new(grid: Grid, times: Vec<f64>, data: Vec<Vec<f64>>) -> Result<Self> {
        grid.validate()?;
        if times.len() != data.len() || times.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "{} time levels but {} slabs",
                times.len(),
                data.len()
            )));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("time levels must increase strictly".into()));
        }
        let n = grid.n_cells();
        if let Some(bad) = data.iter().find(|s| s.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "slab has {} values, grid has {n} cells",
                bad.len()
            )));
        }
        let bound_m = data
            .iter()
            .flat_map(|s| s.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(Self {
            grid,
            times,
            data,
            bound_m,
        })
    }

    /// A single-level field from explicit cell values.
    pub fn from_slab(grid: Grid, t: f64, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, vec![t], vec![values])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.grid.dx()
    }

    pub fn n_levels(&self) -> usize {
        self.times.len()
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("field has at least one level")
    }

    /// Largest spacing between consecutive stored levels.
    pub fn max_dt(&self) -> f64 {
        self.times
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// Index of the stored level equal to `t` up to rounding.
    pub fn level_index(&self, t: f64) -> Result<usize> {
        let tol = TIME_MATCH * t.abs().max(1.0);
        let pos = self.times.partition_point(|&s| s < t - tol);
        if pos < self.times.len() && (self.times[pos] - t).abs() <= tol {
            Ok(pos)
        } else {
            Err(Error::MissingTimeLevels(format!("no stored level at t = {t}")))
        }
    }

    /// Index of the stored level nearest to `t` (ties go to the earlier one).
    pub fn nearest_level(&self, t: f64) -> usize {
        let pos = self.times.partition_point(|&s| s < t);
        if pos == 0 {
            return 0;
        }
        if pos == self.times.len() {
            return pos - 1;
        }
        if t - self.times[pos - 1] <= self.times[pos] - t {
            pos - 1
        } else {
            pos
        }
    }

    /// Index of the last stored level ≤ t (the level whose slab covers t).
    pub fn slab_containing(&self, t: f64) -> Option<usize> {
        let pos = self.times.partition_point(|&s| s <= t);
        pos.checked_sub(1)
    }

    pub fn slab(&self, level: usize) -> &[f64] {
        &self.data[level]
    }

    /// Value of the cell containing `x` at stored level `level`.
    pub fn value_at(&self, level: usize, x: &Vector) -> Option<f64> {
        self.grid.locate(x).map(|i| self.data[level][i])
    }

    pub fn same_grid(&self, other: &GridField) -> bool {
        self.grid == other.grid
    }

    /// Errors unless both fields share the grid and the stored time levels.
    pub fn check_compatible(&self, other: &GridField) -> Result<()> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch(format!(
                "grids differ: {:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        if self.times.len() != other.times.len()
            || self
                .times
                .iter()
                .zip(&other.times)
                .any(|(a, b)| (a - b).abs() > TIME_MATCH * a.abs().max(1.0))
        {
            return Err(Error::GridMismatch(format!(
                "time levels differ ({} vs {} levels)",
                self.times.len(),
                other.times.len()
            )));
        }
        Ok(())
    }

    /// Cell-wise transform into a new field on the same grid and levels.
    pub fn map(&self, mut f: impl FnMut(&Vector, f64, f64) -> f64) -> GridField {
        let data = self
            .data
            .iter()
            .zip(&self.times)
            .map(|(slab, &t)| {
                slab.iter()
                    .enumerate()
                    .map(|(i, &u)| f(&self.grid.center(i), t, u))
                    .collect()
            })
            .collect();
        GridField::new(self.grid, self.times.clone(), data).expect("same shape")
    }

    /// ∫|u| over the whole domain at a stored level.
    pub fn l1_norm(&self, level: usize) -> f64 {
        let vol = self.dx().powi(self.dim() as i32);
        self.data[level].iter().map(|u| u.abs()).sum::<f64>() * vol
    }

    /// ∫u over the whole domain at a stored level.
    pub fn mass(&self, level: usize) -> f64 {
        let vol = self.dx().powi(self.dim() as i32);
        self.data[level].iter().sum::<f64>() * vol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_geometry() {
        let g = Grid::line(-1.0, 1.0, 4).unwrap();
        assert_eq!(g.dx(), 0.5);
        assert_eq!(g.center(0), [-0.75, 0.0]);
        assert_eq!(g.interface(4), 1.0);
        assert_eq!(g.locate(&[0.1, 0.0]), Some(2));
        assert_eq!(g.locate(&[1.0, 0.0]), Some(3));
        assert_eq!(g.locate(&[1.5, 0.0]), None);
        let g2 = Grid::new(2, 0.0, 1.0, 10).unwrap();
        assert_eq!(g2.n_cells(), 100);
        assert_eq!(g2.locate(&[0.05, 0.95]), Some(90));
        let c = g2.center(90);
        assert!((c[0] - 0.05).abs() < 1e-15 && (c[1] - 0.95).abs() < 1e-15);
        assert!(Grid::line(1.0, 0.0, 4).is_err());
    }

    #[test]
    fn level_lookup() {
        let g = Grid::line(0.0, 1.0, 2).unwrap();
        let f = GridField::new(g, vec![0.0, 0.1, 0.3], vec![vec![0.0; 2]; 3]).unwrap();
        assert_eq!(f.level_index(0.1 + 1e-15).unwrap(), 1);
        assert!(matches!(f.level_index(0.2), Err(Error::MissingTimeLevels(_))));
        assert_eq!(f.nearest_level(0.19), 1);
        assert_eq!(f.nearest_level(0.21), 2);
        assert_eq!(f.nearest_level(5.0), 2);
        assert_eq!(f.slab_containing(0.15), Some(1));
        assert_eq!(f.slab_containing(-0.1), None);
        assert!((f.max_dt() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn bound_is_max_abs_over_slabs() {
        let g = Grid::line(0.0, 1.0, 2).unwrap();
        let f = GridField::new(g, vec![0.0, 1.0], vec![vec![0.5, -2.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(f.bound_m, 2.0);
        assert!(GridField::new(g, vec![1.0, 0.0], vec![vec![0.0; 2]; 2]).is_err());
        assert!(GridField::new(g, vec![0.0], vec![vec![0.0; 3]]).is_err());
    }
}
