use serde::{Deserialize, Serialize};

use crate::analytic::{sample_shifted, AnalyticFunction};
use crate::error::{Error, Result};
use crate::grid::make_grid;
use crate::lorentz::lorentz_quasinorm;
use crate::par;

use super::fit::fit_decay;
use super::report::{Check, Comparison, ExperimentReport, Provenance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailParams {
    pub alpha: f64,
    pub x_values: Vec<f64>,
    /// Samples across each interval `[x-1, x+1]` (power of two).
    pub points: usize,
}

impl TailParams {
    pub fn standard(alpha: f64) -> Self {
        TailParams { alpha, x_values: vec![4.0, 8.0, 16.0, 32.0, 64.0], points: 16384 }
    }
}

/// `G(x) = || phi_alpha 1_{[x-1, x+1]} ||_{L^{1/(2 alpha), inf}}`.
pub fn tail_local_norm(alpha: f64, x: f64, points: usize) -> Result<f64> {
    let grid = make_grid(1, 2.0, points)?.with_half_offset();
    let f = sample_shifted(&AnalyticFunction::TailPhi { alpha }, &grid, [x, 0.0])?;
    lorentz_quasinorm(&f, 1.0 / (2.0 * alpha), f64::INFINITY)
}

pub fn phi_alpha_tail_experiment(params: &TailParams) -> Result<ExperimentReport> {
    let alpha = params.alpha;
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::InvalidSpec(format!("alpha must lie in (0, 1/2), got {alpha}")));
    }
    if let Some(x) = params.x_values.iter().find(|x| !(**x > 2.0)) {
        return Err(Error::InvalidInput(format!("tail points must exceed 2, got {x}")));
    }
    let mut xs = params.x_values.clone();
    xs.sort_by(f64::total_cmp);
    let g: Vec<f64> = par::map(&xs, |&x| tail_local_norm(alpha, x, params.points)).into_iter().collect::<Result<_>>()?;
    let mut report = ExperimentReport::new("phi-alpha-tail", params);
    let fit = fit_decay(&xs, &g)?;
    report.check(Check::new("tail_slope", fit.slope, -alpha, Provenance::Paper, 0.05, Comparison::Absolute));
    let rise = g.windows(2).map(|w| w[1] / w[0] - 1.0).fold(f64::NEG_INFINITY, f64::max);
    report.check(Check::new("tail_monotone", rise, 0.0, Provenance::Derived, 1e-9, Comparison::AtMost));
    // G(x) |x|^alpha bounded is the weak L^{1/alpha} membership of the local profile
    let scaled: Vec<f64> = xs.iter().zip(&g).map(|(x, v)| v * x.powf(alpha)).collect();
    let hi = scaled.iter().copied().fold(0.0, f64::max);
    let lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    report.check(Check::new("scaled_profile_finite", hi, 0.0, Provenance::Derived, 0.0, Comparison::Finite));
    for (x, v) in xs.iter().zip(&g) {
        report.observe(format!("G[x={x}]"), *v, "local weak-Lorentz norm on [x-1, x+1]");
    }
    report.observe("scaled_profile_ratio", hi / lo, "max/min of x^alpha G(x)");
    report.observe("fit_residual", fit.residual, "max log deviation from the fitted line");
    let local_slopes: Vec<f64> = xs.windows(2).zip(g.windows(2)).map(|(x, v)| (v[1] / v[0]).ln() / (x[1] / x[0]).ln()).collect();
    if let Some(last) = local_slopes.last() {
        report.observe("last_local_slope", *last, "log-slope between the two largest x");
    }
    Ok(report)
}
