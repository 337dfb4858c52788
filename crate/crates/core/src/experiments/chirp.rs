use serde::{Deserialize, Serialize};

use crate::amalgam::{AmalgamPlan, AmalgamSpec, CenterRegion};
use crate::analytic::{sample, AnalyticFunction};
use crate::error::{Error, Result};
use crate::grid::{make_grid, Grid};

use super::report::{Check, Comparison, ExperimentReport, Provenance};

/// Grid size of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    pub extent: f64,
    pub points_per_dim: usize,
}

impl GridParams {
    pub fn new(extent: f64, points_per_dim: usize) -> Self {
        GridParams { extent, points_per_dim }
    }

    pub fn build(&self, dim: usize) -> Result<Grid> {
        make_grid(dim, self.extent, self.points_per_dim)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChirpNormParams {
    pub dim: usize,
    pub a_values: Vec<f64>,
    pub grid: GridParams,
    pub tol: f64,
}

impl ChirpNormParams {
    /// d=1: `a in {0.5,1,2,4,8}` on `L=32, N=16384`; d=2: `a in {1,2}` on `L=16, N=512`.
    pub fn standard(dim: usize) -> Self {
        if dim == 2 {
            ChirpNormParams { dim, a_values: vec![1.0, 2.0], grid: GridParams::new(16.0, 512), tol: 0.03 }
        } else {
            ChirpNormParams { dim: 1, a_values: vec![0.5, 1.0, 2.0, 4.0, 8.0], grid: GridParams::new(32.0, 16384), tol: 0.02 }
        }
    }
}

/// `((1 + a^2)/a^4)^{d/4}`.
pub fn chirp_norm_closed_form(a: f64, dim: usize) -> f64 {
    ((1.0 + a * a) / a.powi(4)).powf(dim as f64 / 4.0)
}

/// `N >= L^2/|a|`: the chirp's frequency `|x|/|a|` stays below Nyquist on the torus.
pub fn check_chirp_resolution(grid: &Grid, a: f64) -> Result<()> {
    let need = grid.extent() * grid.extent() / a.abs();
    if (grid.points_per_dim() as f64) < need * (1.0 - 1e-12) {
        return Err(Error::Aliasing(format!(
            "chirp a = {a} needs at least {need} points per axis on extent {}",
            grid.extent()
        )));
    }
    Ok(())
}

/// `W(FL^1, L^inf)` with the peak-one Gaussian window, over the central half.
pub fn chirp_spec(grid: &Grid) -> AmalgamSpec {
    AmalgamSpec::fl1_linf(grid).with_centers(CenterRegion::CentralHalf)
}

pub fn verify_chirp_norm(params: &ChirpNormParams) -> Result<ExperimentReport> {
    let grid = params.grid.build(params.dim)?;
    for &a in &params.a_values {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::InvalidSpec(format!("chirp parameter must be nonzero, got {a}")));
        }
        check_chirp_resolution(&grid, a)?;
    }
    let plan = AmalgamPlan::new(&grid, &chirp_spec(&grid))?;
    let mut report = ExperimentReport::new("chirp-norm", params);
    for &a in &params.a_values {
        let f = sample(&AnalyticFunction::Chirp { a }, &grid)?;
        let profile = plan.profile(&f)?;
        let norm = profile.iter().copied().fold(0.0, f64::max);
        let low = profile.iter().copied().fold(f64::INFINITY, f64::min);
        let reference = chirp_norm_closed_form(a, params.dim);
        report.check(Check::new(format!("chirp_norm[a={a}]"), norm, reference, Provenance::Paper, params.tol, Comparison::Relative));
        report.observe(format!("rel_err[a={a}]"), (norm - reference).abs() / reference, "relative error of the lattice maximum");
        report.observe(format!("profile_spread[a={a}]"), norm / low - 1.0, "max/min - 1 of the local norms over the centers");
    }
    report.observe("centers", plan.centers().len() as f64, "lattice centers in the central half");
    report.observe("patch", plan.patch_size() as f64, "patch side in nodes");
    Ok(report)
}
