//! Split-step solutions with a time-dependent potential.

use serde::{Deserialize, Serialize};

use crate::analytic::{sample, AnalyticFunction};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::numeric::weighted_lp;
use crate::schrodinger::{propagate, split_step_solve, PotentialSpec, Trajectory};

use super::chirp::GridParams;
use super::fit::AdmissiblePair;
use super::report::{Check, Comparison, ExperimentReport, Provenance};
use super::strichartz::strichartz_space_spec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    Zero,
    /// `cos(t) e^{-|x|^2}`.
    CosGaussian,
}

impl PotentialKind {
    pub fn spec(&self) -> PotentialSpec {
        match self {
            PotentialKind::Zero => PotentialSpec::zero(),
            PotentialKind::CosGaussian => PotentialSpec::cos_gaussian(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    pub dim: usize,
    pub potential: PotentialKind,
    /// Initial datum `e^{-pi |x|^2 / c}`.
    pub c: f64,
    pub t_final: f64,
    pub dt: f64,
    pub q: f64,
    pub r: f64,
    pub grid: GridParams,
}

impl PotentialParams {
    pub fn standard() -> Self {
        PotentialParams {
            dim: 1,
            potential: PotentialKind::CosGaussian,
            c: 1.0,
            t_final: 2.0,
            dt: 1.0 / 16.0,
            q: 8.0,
            r: 4.0,
            grid: GridParams::new(64.0, 1024),
        }
    }
}

/// `|| ||u(t)||_{W(FL^{r'}, L^r)} ||_{L^{q/2}(0, T)}` by the rectangle rule.
pub fn trajectory_strichartz_norm(traj: &Trajectory, pair: &AdmissiblePair, dt: f64) -> Result<f64> {
    let grid = *traj.states()[0].grid();
    let norms = traj.space_norms(&strichartz_space_spec(&grid, pair, 1e-12))?;
    let v = weighted_lp(&norms, pair.q / 2.0, dt);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite("trajectory norm".into()))
    }
}

/// Order `log2(e(dt) / e(dt/2))` of the final-state error against a `dt/8` run.
pub fn strang_order(u0: &GridFunction, v: &PotentialSpec, t_final: f64, dt: f64) -> Result<(f64, f64, f64)> {
    let last = |step: f64| -> Result<GridFunction> {
        let traj = split_step_solve(u0, v, t_final, step)?;
        Ok(traj.states()[traj.len() - 1].clone())
    };
    let reference = last(dt / 8.0)?;
    let e1 = last(dt)?.rel_l2_error(&reference);
    let e2 = last(dt / 2.0)?.rel_l2_error(&reference);
    Ok(((e1 / e2).log2(), e1, e2))
}

pub fn potential_experiment(params: &PotentialParams) -> Result<ExperimentReport> {
    let pair = AdmissiblePair::new(params.q, params.r, params.dim)?;
    let v = params.potential.spec();
    let grid = params.grid.build(params.dim)?;
    let u0 = sample(&AnalyticFunction::gaussian(params.c), &grid)?;
    let mut report = ExperimentReport::new("potential", params);

    let traj = split_step_solve(&u0, &v, params.t_final, params.dt)?;
    report.check(Check::new("l2_drift", traj.l2_drift(), 1e-10, Provenance::Derived, 0.0, Comparison::AtMost));
    let norm = trajectory_strichartz_norm(&traj, &pair, params.dt)?;
    report.check(Check::new("strichartz_norm", norm, 0.0, Provenance::Derived, 0.0, Comparison::Finite));

    let free = split_step_solve(&u0, &PotentialSpec::zero(), params.t_final, params.dt)?;
    let degeneracy = free
        .times()
        .iter()
        .zip(free.states())
        .map(|(&t, s)| s.rel_l2_error(&propagate(&u0, t)))
        .fold(0.0, f64::max);
    report.check(Check::new("zero_potential_vs_free", degeneracy, 1e-10, Provenance::Trivial, 0.0, Comparison::AtMost));
    let free_norm = trajectory_strichartz_norm(&free, &pair, params.dt)?;
    let free_states: Vec<GridFunction> = free.times().iter().map(|&t| propagate(&u0, t)).collect();
    let exact = trajectory_strichartz_norm(&Trajectory::new(free.times().to_vec(), free_states)?, &pair, params.dt)?;
    report.check(Check::new(
        "zero_potential_norm_vs_free",
        free_norm,
        exact,
        Provenance::Trivial,
        1e-10,
        Comparison::Relative,
    ));

    let (order, e1, e2) = strang_order(&u0, &v, params.t_final, params.dt)?;
    report.check(Check::new("strang_order", order, 2.0, Provenance::Derived, 0.2, Comparison::Absolute));
    report.observe("error_dt", e1, "final-state error at dt against dt/8");
    report.observe("error_half_dt", e2, "final-state error at dt/2 against dt/8");
    Ok(report)
}
