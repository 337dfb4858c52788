//! Uniform periodic grids and sampled functions on them.
//!
//! A [`Grid`] models the torus `[-L/2, L/2)^d` for `d` in {1, 2} with `N`
//! points per axis. Nodes sit at `-L/2 + j h` or, for half-offset grids, at
//! `-L/2 + (j + 1/2) h`, which keeps the origin off the node set. Values are
//! stored row-major with axis 0 outermost.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{pairwise_sum_by, weighted_lp};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    extent: f64,
    points_per_dim: usize,
    half_offset: bool,
}

/// Builds the standard (node at the origin) grid.
pub fn make_grid(dim: usize, extent: f64, points_per_dim: usize) -> Result<Grid> {
    Grid::new(dim, extent, points_per_dim)
}

impl Grid {
    pub fn new(dim: usize, extent: f64, points_per_dim: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dimension must be 1 or 2, got {dim}")));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::InvalidGrid(format!("extent must be positive, got {extent}")));
        }
        if points_per_dim < 8 || !points_per_dim.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per dimension must be a power of two >= 8, got {points_per_dim}"
            )));
        }
        Ok(Grid { dim, extent, points_per_dim, half_offset: false })
    }

    /// Same grid with nodes shifted by half a cell, so no node lies on an axis.
    pub fn with_half_offset(mut self) -> Self {
        self.half_offset = true;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn points_per_dim(&self) -> usize {
        self.points_per_dim
    }

    pub fn is_half_offset(&self) -> bool {
        self.half_offset
    }

    pub fn spacing(&self) -> f64 {
        self.extent / self.points_per_dim as f64
    }

    pub fn freq_spacing(&self) -> f64 {
        1.0 / self.extent
    }

    /// Measure of one grid cell, `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Total number of nodes, `N^d`.
    pub fn len(&self) -> usize {
        self.points_per_dim.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of the first node along each axis.
    pub fn origin(&self) -> f64 {
        let x0 = -0.5 * self.extent;
        if self.half_offset {
            x0 + 0.5 * self.spacing()
        } else {
            x0
        }
    }

    pub fn axis_coord(&self, j: usize) -> f64 {
        self.origin() + j as f64 * self.spacing()
    }

    /// Per-axis indices of a flat index.
    pub fn unflatten(&self, flat: usize) -> [usize; 2] {
        let n = self.points_per_dim;
        if self.dim == 1 {
            [flat, 0]
        } else {
            [flat / n, flat % n]
        }
    }

    pub fn flatten(&self, idx: [usize; 2]) -> usize {
        if self.dim == 1 {
            idx[0]
        } else {
            idx[0] * self.points_per_dim + idx[1]
        }
    }

    /// Node coordinates; the second entry is 0 in one dimension.
    pub fn node(&self, flat: usize) -> [f64; 2] {
        let [i, j] = self.unflatten(flat);
        if self.dim == 1 {
            [self.axis_coord(i), 0.0]
        } else {
            [self.axis_coord(i), self.axis_coord(j)]
        }
    }

    /// The frequency grid `{k / L : k = -N/2, ..., N/2 - 1}^d`.
    pub fn dual(&self) -> Grid {
        Grid {
            dim: self.dim,
            extent: self.points_per_dim as f64 / self.extent,
            points_per_dim: self.points_per_dim,
            half_offset: false,
        }
    }

    /// Signed frequency index of FFT output slot `k` (unshifted layout).
    pub(crate) fn signed_index(&self, k: usize) -> i64 {
        let n = self.points_per_dim as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

/// Complex samples on a [`Grid`]; all entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(format!("sample {i} is {}", values[i])));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        GridFunction { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// Evaluates `f` at every node.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> Complex64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.node(i))).collect();
        Self::new(grid, values)
    }

    /// Wraps values that the caller guarantees are finite and correctly sized.
    pub(crate) fn from_raw(grid: Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        GridFunction { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> GridFunction {
        GridFunction::from_raw(self.grid, self.values.iter().map(|v| v * c).collect())
    }

    /// Pointwise product; both functions must share the grid.
    pub fn mul(&self, other: &GridFunction) -> Result<GridFunction> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(GridFunction::from_raw(self.grid, values))
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(GridFunction::from_raw(self.grid, values))
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(GridFunction::from_raw(self.grid, values))
    }

    /// Riemann-sum L^p norm, `(sum |f|^p h^d)^(1/p)`; the maximum for `p = inf`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm(self, p)
    }

    /// `||self - other||_2 / ||other||_2` (absolute when `other` vanishes).
    pub fn rel_l2_error(&self, reference: &GridFunction) -> f64 {
        let diff: f64 = pairwise_sum_by(
            &self.values.iter().zip(&reference.values).collect::<Vec<_>>(),
            |(a, b)| (*a - *b).norm_sqr(),
        );
        let base: f64 = pairwise_sum_by(&reference.values, |b| b.norm_sqr());
        if base == 0.0 {
            diff.sqrt()
        } else {
            (diff / base).sqrt()
        }
    }

    pub fn translate(&self, shift: &[i64]) -> GridFunction {
        translate(self, shift)
    }

    /// Multiplies by `e^{2 pi i omega . x}` with `omega = k / L` on the frequency lattice.
    pub fn modulate(&self, k: &[i64]) -> GridFunction {
        let grid = self.grid;
        let w = grid.freq_spacing();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let x = grid.node(i);
                let mut phase = 0.0;
                for (axis, kk) in k.iter().take(grid.dim()).enumerate() {
                    phase += *kk as f64 * w * x[axis];
                }
                v * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase)
            })
            .collect();
        GridFunction::from_raw(grid, values)
    }
}

/// Riemann-sum L^p norm `(sum |f_j|^p h^d)^(1/p)`, or `max |f_j|` for `p = inf`.
///
/// Panics if `p < 1`.
pub fn lp_norm(f: &GridFunction, p: f64) -> f64 {
    let mags = f.magnitudes();
    weighted_lp(&mags, p, f.grid.cell_volume())
}

/// Discrete pairing `sum f conj(g) h^d`.
pub fn inner_product(f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    f.grid.check_same(&g.grid)?;
    let pairs: Vec<Complex64> = f.values.iter().zip(&g.values).map(|(a, b)| a * b.conj()).collect();
    let re = pairwise_sum_by(&pairs, |z| z.re);
    let im = pairwise_sum_by(&pairs, |z| z.im);
    Ok(Complex64::new(re, im) * f.grid.cell_volume())
}

/// Circular shift by whole cells: `(T f)(x_j) = f(x_{j - shift})`.
pub fn translate(f: &GridFunction, shift: &[i64]) -> GridFunction {
    let grid = f.grid;
    let n = grid.points_per_dim() as i64;
    let wrap = |j: usize, s: i64| ((j as i64 - s).rem_euclid(n)) as usize;
    let s0 = shift.first().copied().unwrap_or(0);
    let s1 = shift.get(1).copied().unwrap_or(0);
    let values = (0..grid.len())
        .map(|i| {
            let [a, b] = grid.unflatten(i);
            let src = if grid.dim() == 1 {
                [wrap(a, s0), 0]
            } else {
                [wrap(a, s0), wrap(b, s1)]
            };
            f.values[grid.flatten(src)]
        })
        .collect();
    GridFunction::from_raw(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn grid_spacings() {
        let g = make_grid(1, 32.0, 1024).unwrap();
        assert_eq!(g.spacing(), 0.03125);
        assert_eq!(g.freq_spacing(), 0.03125);
        let g2 = make_grid(2, 16.0, 256).unwrap();
        assert_eq!(g2.spacing(), 0.0625);
        assert_eq!(g2.len(), 65536);
        assert_eq!(g2.spacing() * 256.0, 16.0);
    }

    #[test]
    fn grid_rejects_bad_parameters() {
        assert!(matches!(make_grid(1, 32.0, 1000), Err(Error::InvalidGrid(_))));
        assert!(make_grid(3, 32.0, 1024).is_err());
        assert!(make_grid(1, 0.0, 1024).is_err());
        assert!(make_grid(1, -1.0, 1024).is_err());
        assert!(make_grid(1, 1.0, 4).is_err());
    }

    #[test]
    fn dual_grid_is_frequency_lattice() {
        let g = make_grid(1, 8.0, 16).unwrap();
        let d = g.dual();
        assert_eq!(d.spacing(), g.freq_spacing());
        assert_eq!(d.axis_coord(0), -8.0 / 8.0);
        assert_eq!(d.axis_coord(8), 0.0);
    }

    #[test]
    fn half_offset_avoids_origin() {
        let g = make_grid(1, 4.0, 8).unwrap().with_half_offset();
        assert!((0..8).all(|j| g.axis_coord(j).abs() >= 0.25 - 1e-15));
        assert_eq!(g.axis_coord(4), 0.25);
    }

    #[test]
    fn indicator_norm_counts_cells() {
        let g = make_grid(1, 8.0, 64).unwrap();
        // [-1, 1) holds the 16 nodes -1, -7/8, ..., 7/8
        let f = GridFunction::from_fn(g, |x| c(if (-1.0..1.0).contains(&x[0]) { 1.0 } else { 0.0 })).unwrap();
        assert_eq!(f.lp_norm(2.0), 2f64.sqrt());
        assert_eq!(f.lp_norm(1.0), 2.0);
        assert_eq!(f.lp_norm(f64::INFINITY), 1.0);
    }

    #[test]
    fn inner_product_symmetry_and_norm() {
        let g = make_grid(1, 4.0, 32).unwrap();
        let f = GridFunction::from_fn(g, |x| Complex64::new(x[0].cos(), x[0])).unwrap();
        let h = GridFunction::from_fn(g, |x| Complex64::new(1.0, -x[0] * x[0])).unwrap();
        let fh = inner_product(&f, &h).unwrap();
        let hf = inner_product(&h, &f).unwrap();
        assert!((fh - hf.conj()).norm() < 1e-14);
        let ff = inner_product(&f, &f).unwrap();
        assert!((ff.re - f.lp_norm(2.0).powi(2)).abs() < 1e-12);
        assert!(ff.im.abs() < 1e-14);
    }

    #[test]
    fn inner_product_rejects_grid_mismatch() {
        let a = GridFunction::zeros(make_grid(1, 4.0, 32).unwrap());
        let b = GridFunction::zeros(make_grid(1, 8.0, 32).unwrap());
        assert!(matches!(inner_product(&a, &b), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn translate_periodicity() {
        let g = make_grid(2, 4.0, 8).unwrap();
        let f = GridFunction::from_fn(g, |x| Complex64::new(x[0], x[1] * x[1])).unwrap();
        assert_eq!(translate(&f, &[0, 0]), f);
        assert_eq!(translate(&f, &[8, -8]), f);
        let t = translate(&f, &[3, 5]);
        assert_eq!(t.lp_norm(3.0), f.lp_norm(3.0));
        assert_eq!(translate(&t, &[-3, -5]), f);
    }

    #[test]
    fn non_finite_rejected() {
        let g = make_grid(1, 4.0, 8).unwrap();
        let mut v = vec![c(1.0); 8];
        v[3] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(GridFunction::new(g, v), Err(Error::NonFinite(_))));
    }
}
