use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amalgam::{AmalgamPlan, AmalgamSpec, CenterRegion, GlobalNormSpec, LocalNormSpec, WindowSpec};
use crate::analytic::{sample, AnalyticFunction};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::numeric::conjugate_exponent;
use crate::par;
use crate::schrodinger::{boundary_mass_fraction, evolved_gaussian_closed_form, kernel, propagate};

use super::chirp::{chirp_norm_closed_form, chirp_spec, GridParams};
use super::fit::{fit_decay, log_spaced};
use super::report::{Check, Comparison, ExperimentReport, Provenance};

/// How the large-time states are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolvedData {
    /// FFT propagation of the sampled Gaussian.
    Propagate,
    /// Sampling the exact evolved Gaussian (lets small grids reach large t).
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersiveParams {
    pub dim: usize,
    /// Kernel-norm fit window; `None` skips the small-time regime.
    pub small_t: Option<(f64, f64)>,
    pub large_t: (f64, f64),
    pub n_points: usize,
    pub small_grid: GridParams,
    pub large_grid: GridParams,
    pub data: EvolvedData,
    /// Restrict lattice centers to `|x_i| <= half_width` (the profile peaks at the origin).
    pub center_box: Option<f64>,
}

impl DispersiveParams {
    pub fn standard(dim: usize) -> Self {
        if dim == 2 {
            DispersiveParams {
                dim: 2,
                small_t: None,
                large_t: (8.0, 64.0),
                n_points: 8,
                small_grid: GridParams::new(16.0, 1024),
                large_grid: GridParams::new(32.0, 256),
                data: EvolvedData::ClosedForm,
                center_box: Some(2.0),
            }
        } else {
            DispersiveParams {
                dim: 1,
                small_t: Some((0.02, 0.2)),
                large_t: (8.0, 64.0),
                n_points: 8,
                small_grid: GridParams::new(16.0, 4096),
                large_grid: GridParams::new(4096.0, 32768),
                data: EvolvedData::Propagate,
                center_box: None,
            }
        }
    }

    fn slope_tol(&self) -> f64 {
        if self.dim == 2 { 0.1 } else { 0.05 }
    }
}

fn check_range(name: &str, (lo, hi): (f64, f64)) -> Result<()> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidSpec(format!("{name} range ({lo}, {hi}) must satisfy 0 < lo < hi")));
    }
    Ok(())
}

/// `e^{itΔ}` of the unit Gaussian at each `t`.
fn evolved_states(grid: &Grid, ts: &[f64], data: EvolvedData) -> Result<Vec<GridFunction>> {
    let one = Complex64::new(1.0, 0.0);
    match data {
        EvolvedData::ClosedForm => ts.iter().map(|&t| evolved_gaussian_closed_form(one, t, grid)).collect(),
        EvolvedData::Propagate => {
            let u0 = sample(&AnalyticFunction::gaussian(1.0), grid)?;
            Ok(par::map(ts, |&t| propagate(&u0, t)))
        }
    }
}

fn data_diagnostics(report: &mut ExperimentReport, grid: &Grid, t: f64, last: &GridFunction, data: EvolvedData) -> Result<()> {
    if data == EvolvedData::Propagate {
        let exact = evolved_gaussian_closed_form(Complex64::new(1.0, 0.0), t, grid)?;
        report.check(Check::new(
            format!("flow_vs_closed_form[t={t:.4}]"),
            last.rel_l2_error(&exact),
            1e-6,
            Provenance::Derived,
            0.0,
            Comparison::AtMost,
        ));
        report.check(Check::new(
            format!("boundary_mass[t={t:.4}]"),
            boundary_mass_fraction(last),
            1e-6,
            Provenance::Derived,
            0.0,
            Comparison::AtMost,
        ));
    }
    Ok(())
}

pub fn dispersive_experiment(params: &DispersiveParams) -> Result<ExperimentReport> {
    let d = params.dim as f64;
    if params.n_points < 4 {
        return Err(Error::InvalidSpec("a decay fit needs at least 4 times".into()));
    }
    check_range("large_t", params.large_t)?;
    let mut report = ExperimentReport::new("dispersive", params);

    if let Some(range) = params.small_t {
        check_range("small_t", range)?;
        let grid = params.small_grid.build(params.dim)?;
        let ts = log_spaced(range.0, range.1, params.n_points);
        let plan = AmalgamPlan::new(&grid, &chirp_spec(&grid))?;
        let mut norms = Vec::new();
        for &t in &ts {
            let k = kernel(t, &grid)?;
            let v = plan.norm(&k)?;
            let reference = chirp_norm_closed_form(4.0 * PI * t, params.dim);
            report.check(Check::new(format!("kernel_norm[t={t:.4}]"), v, reference, Provenance::Paper, 0.02, Comparison::Relative));
            norms.push(v);
        }
        let fit = fit_decay(&ts, &norms)?;
        report.check(Check::new("kernel_slope_small_t", fit.slope, -d, Provenance::Paper, 0.05, Comparison::Absolute));
        let exact: Vec<f64> = ts.iter().map(|t| chirp_norm_closed_form(4.0 * PI * t, params.dim)).collect();
        report.observe("closed_form_slope_small_t", fit_decay(&ts, &exact)?.slope, "slope of the exact kernel norm on the same times");
        report.observe("kernel_fit_residual", fit.residual, "max log deviation from the fitted line");
    }

    let grid = params.large_grid.build(params.dim)?;
    let ts = log_spaced(params.large_t.0, params.large_t.1, params.n_points);
    let states = evolved_states(&grid, &ts, params.data)?;
    data_diagnostics(&mut report, &grid, ts[ts.len() - 1], &states[states.len() - 1], params.data)?;
    let mut spec = AmalgamSpec::fl1_linf(&grid);
    if let Some(hw) = params.center_box {
        spec = spec.with_centers(CenterRegion::Box { half_width: hw });
    }
    let plan = AmalgamPlan::new(&grid, &spec)?;
    let amalgam: Vec<f64> = states.iter().map(|s| plan.norm(s)).collect::<Result<_>>()?;
    let sup: Vec<f64> = states.iter().map(|s| s.max_abs()).collect();
    let fit = fit_decay(&ts, &amalgam)?;
    report.check(Check::new("evolved_slope_large_t", fit.slope, -d / 2.0, Provenance::Paper, params.slope_tol(), Comparison::Absolute));
    let fit_sup = fit_decay(&ts, &sup)?;
    report.check(Check::new("linf_slope_large_t", fit_sup.slope, -d / 2.0, Provenance::Paper, params.slope_tol(), Comparison::Absolute));
    // max |e^{itΔ}u0| <= (4 pi t)^{-d/2} ||u0||_1, with ||u0||_1 = 1 for the unit Gaussian
    for (t, m) in ts.iter().zip(&sup) {
        let bound = 1.05 * (4.0 * PI * t).powf(-d / 2.0);
        report.check(Check::new(format!("classic_bound[t={t:.4}]"), *m, bound, Provenance::Derived, 0.0, Comparison::AtMost));
    }
    report.observe("evolved_fit_residual", fit.residual, "max log deviation from the fitted line");
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedTimeParams {
    pub dim: usize,
    pub r_values: Vec<f64>,
    pub t_range: (f64, f64),
    pub n_points: usize,
    pub grid: GridParams,
    pub data: EvolvedData,
}

impl Default for FixedTimeParams {
    fn default() -> Self {
        FixedTimeParams {
            dim: 1,
            r_values: vec![2.0, 4.0, f64::INFINITY],
            t_range: (8.0, 64.0),
            n_points: 8,
            grid: GridParams::new(4096.0, 32768),
            data: EvolvedData::Propagate,
        }
    }
}

/// `W(FL^{r'}, L^r)` with the peak-one Gaussian window.
pub fn fixed_time_spec(grid: &Grid, r: f64) -> AmalgamSpec {
    AmalgamSpec::new(grid, WindowSpec::gaussian_unit(), LocalNormSpec::fourier_lp(conjugate_exponent(r)), GlobalNormSpec::lp(r))
}

pub fn fixed_time_amalgam_experiment(params: &FixedTimeParams) -> Result<ExperimentReport> {
    check_range("t", params.t_range)?;
    if params.n_points < 4 {
        return Err(Error::InvalidSpec("a decay fit needs at least 4 times".into()));
    }
    if let Some(r) = params.r_values.iter().find(|r| !(**r >= 2.0)) {
        return Err(Error::InvalidSpec(format!("fixed-time exponent r must be >= 2, got {r}")));
    }
    let d = params.dim as f64;
    let grid = params.grid.build(params.dim)?;
    let ts = log_spaced(params.t_range.0, params.t_range.1, params.n_points);
    let states = evolved_states(&grid, &ts, params.data)?;
    let mut report = ExperimentReport::new("fixed-time", params);
    data_diagnostics(&mut report, &grid, ts[ts.len() - 1], &states[states.len() - 1], params.data)?;
    for &r in &params.r_values {
        let plan = AmalgamPlan::new(&grid, &fixed_time_spec(&grid, r))?;
        let norms: Vec<f64> = states.iter().map(|s| plan.norm(s)).collect::<Result<_>>()?;
        let fit = fit_decay(&ts, &norms)?;
        let expect = -d * (0.5 - 1.0 / r);
        let tol = if r == 2.0 { 0.02 } else { 0.05 };
        report.check(Check::new(format!("slope[r={r}]"), fit.slope, expect, Provenance::Paper, tol, Comparison::Absolute));
        report.observe(format!("norm_at_t_lo[r={r}]"), norms[0], "space amalgam norm at the first time");
    }
    Ok(report)
}
