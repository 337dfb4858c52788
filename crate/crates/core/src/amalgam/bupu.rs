//! Bounded uniform partition of unity and the lattice-sum amalgam norm.
//!
//! `chi` equals 1 on `[-1,1]^d` and vanishes outside `(-2,2)^d`; the companion
//! `psi` equals 1 on `[-2,2]^d` and vanishes outside `(-4,4)^d`. Both are
//! dilated by the lattice spacing `s` and translated to the points `alpha s`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::fourier_transform;
use crate::grid::{Grid, GridFunction};
use crate::numeric::weighted_lp;
use crate::par;

use super::{LocalNormSpec, LocalTransform};

/// `0` for `u <= 0`, `1` for `u >= 1`, smooth in between.
fn smooth_step(u: f64) -> f64 {
    let e = |v: f64| if v <= 0.0 { 0.0 } else { (-1.0 / v).exp() };
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        e(u) / (e(u) + e(1.0 - u))
    }
}

fn chi(y: f64) -> f64 {
    smooth_step(2.0 - y.abs())
}

fn psi(y: f64) -> f64 {
    smooth_step((4.0 - y.abs()) / 2.0)
}

#[derive(Debug, Clone)]
pub struct Bupu {
    grid: Grid,
    spacing: f64,
    per_axis: usize,
    phis: Vec<GridFunction>,
    psis: Vec<GridFunction>,
}

/// Overlap statistics of a partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OverlapCounts {
    /// `max_alpha #{beta : supp psi_beta meets supp phi_alpha}`.
    pub per_member: usize,
    /// `max_x #{beta : x in supp psi_beta}`.
    pub per_node: usize,
}

fn wrap(y: f64, l: f64) -> f64 {
    (y + l / 2.0).rem_euclid(l) - l / 2.0
}

/// Builds the partition with translates stepping by `spacing`.
pub fn build_bupu(grid: &Grid, spacing: f64) -> Result<Bupu> {
    let l = grid.extent();
    let h = grid.spacing();
    if !(spacing > 0.0) {
        return Err(Error::InvalidSpec(format!("partition spacing must be positive, got {spacing}")));
    }
    let k = (l / spacing).round() as usize;
    if k == 0 || (k as f64 * spacing - l).abs() > 1e-9 * l {
        return Err(Error::InvalidSpec(format!("partition spacing {spacing} does not divide the extent {l}")));
    }
    if 4.0 * spacing < 8.0 * h * (1.0 - 1e-12) {
        return Err(Error::InvalidSpec(format!("partition spacing {spacing} gives supports under 8 grid cells")));
    }
    if k < 8 {
        return Err(Error::InvalidSpec(format!("partition spacing {spacing} is too coarse for the extent {l}")));
    }
    let dim = grid.dim();
    let count = k.pow(dim as u32);
    let index = |a: usize| if dim == 1 { [a, 0] } else { [a / k, a % k] };
    let axis_profile = |bump: fn(f64) -> f64, member: usize, axis: usize, x: f64| {
        let center = index(member)[axis] as f64 * spacing;
        bump(wrap(x - center, l) / spacing)
    };
    let tensor = |bump: fn(f64) -> f64, member: usize, x: [f64; 2]| -> f64 {
        (0..dim).map(|a| axis_profile(bump, member, a, x[a])).product()
    };
    let chis: Vec<Vec<f64>> = par::map_range(count, |a| (0..grid.len()).map(|j| tensor(chi, a, grid.node(j))).collect());
    let total: Vec<f64> = (0..grid.len()).map(|j| chis.iter().map(|c| c[j]).sum()).collect();
    if total.iter().any(|t| *t < 1.0 - 1e-12) {
        return Err(Error::InvalidSpec("partition does not cover the grid".into()));
    }
    let phis = chis
        .iter()
        .map(|c| {
            let vals = c.iter().zip(&total).map(|(v, t)| Complex64::new(v / t, 0.0)).collect();
            GridFunction::new(*grid, vals)
        })
        .collect::<Result<Vec<_>>>()?;
    let psis = par::map_range(count, |a| GridFunction::from_fn(*grid, |x| Complex64::new(tensor(psi, a, x), 0.0)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(Bupu { grid: *grid, spacing, per_axis: k, phis, psis })
}

impl Bupu {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.phis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phis.is_empty()
    }

    /// Translates per axis, `L / spacing`.
    pub fn per_axis(&self) -> usize {
        self.per_axis
    }

    pub fn phis(&self) -> &[GridFunction] {
        &self.phis
    }

    pub fn psis(&self) -> &[GridFunction] {
        &self.psis
    }

    /// Counts overlaps from the sampled supports.
    pub fn overlap_counts(&self) -> OverlapCounts {
        let support = |f: &GridFunction| -> Vec<bool> { f.values().iter().map(|v| v.re != 0.0).collect() };
        let phi_s: Vec<Vec<bool>> = self.phis.iter().map(support).collect();
        let psi_s: Vec<Vec<bool>> = self.psis.iter().map(support).collect();
        let per_member = par::map(&phi_s, |p| {
            psi_s.iter().filter(|q| p.iter().zip(q.iter()).any(|(a, b)| *a && *b)).count()
        })
        .into_iter()
        .max()
        .unwrap_or(0);
        let per_node = (0..self.grid.len()).map(|j| psi_s.iter().filter(|q| q[j]).count()).max().unwrap_or(0);
        OverlapCounts { per_member, per_node }
    }
}

/// `S f = {f phi_alpha}`.
pub fn analysis_s(f: &GridFunction, b: &Bupu) -> Result<Vec<GridFunction>> {
    b.grid.check_same(f.grid())?;
    b.phis.iter().map(|phi| f.mul(phi)).collect()
}

/// `R {u_alpha} = sum_alpha u_alpha psi_alpha`.
pub fn synthesis_r(u: &[GridFunction], b: &Bupu) -> Result<GridFunction> {
    if u.len() != b.len() {
        return Err(Error::InvalidInput(format!("family has {} members, partition has {}", u.len(), b.len())));
    }
    let mut acc = vec![Complex64::new(0.0, 0.0); b.grid.len()];
    for (ua, psi) in u.iter().zip(&b.psis) {
        b.grid.check_same(ua.grid())?;
        for ((a, x), w) in acc.iter_mut().zip(ua.values()).zip(psi.values()) {
            *a += x * w.re;
        }
    }
    GridFunction::new(b.grid, acc)
}

/// `||f||_B` of a whole grid function (Fourier side on the dual grid).
pub fn component_norm(f: &GridFunction, local: &LocalNormSpec) -> Result<f64> {
    local.validate()?;
    match local.transform {
        LocalTransform::None => local.eval(&f.magnitudes(), f.grid().cell_volume()),
        LocalTransform::Fourier => {
            let fh = fourier_transform(f);
            local.eval(&fh.magnitudes(), fh.grid().cell_volume())
        }
    }
}

/// `(sum_alpha ||f phi_alpha||_B^p)^{1/p}`.
pub fn bupu_amalgam_norm(f: &GridFunction, local: &LocalNormSpec, p: f64, b: &Bupu) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidSpec(format!("lattice exponent must be >= 1, got {p}")));
    }
    b.grid.check_same(f.grid())?;
    let parts = par::map(&b.phis, |phi| component_norm(&f.mul(phi)?, local))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(weighted_lp(&parts, p, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn smooth_step_limits() {
        assert_eq!(smooth_step(-0.1), 0.0);
        assert_eq!(smooth_step(1.2), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        assert_eq!(chi(1.0), 1.0);
        assert_eq!(chi(2.0), 0.0);
        assert_eq!(psi(2.0), 1.0);
        assert_eq!(psi(4.0), 0.0);
    }

    #[test]
    fn partition_sums_to_one_1d_and_2d() {
        for g in [make_grid(1, 16.0, 256).unwrap(), make_grid(2, 8.0, 32).unwrap()] {
            let b = build_bupu(&g, g.extent() / 8.0).unwrap();
            for j in 0..g.len() {
                let s: f64 = b.phis().iter().map(|p| p.values()[j].re).sum();
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_spacings() {
        let g = make_grid(1, 16.0, 64).unwrap();
        assert!(build_bupu(&g, 0.3).is_err());
        assert!(build_bupu(&g, 0.25).is_err()); // support of 4 cells
        assert!(build_bupu(&g, 4.0).is_err()); // only 4 translates
    }

    #[test]
    fn size_mismatch_rejected() {
        let g = make_grid(1, 16.0, 256).unwrap();
        let b = build_bupu(&g, 1.0).unwrap();
        assert!(synthesis_r(&[GridFunction::zeros(g)], &b).is_err());
    }
}
