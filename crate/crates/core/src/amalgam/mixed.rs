//! Amalgam norms in the time variable, `W(L^{q1}, L^{q2})_t`.
//!
//! A trajectory is a uniformly sampled scalar (or state-valued) function that
//! is zero outside its sample range. Time lattice centers extend past both
//! ends by the window cutoff radius so no window mass is lost.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::numeric::{pairwise_sum, weighted_lp};
use crate::par;

use super::{AmalgamPlan, AmalgamSpec, WindowSpec};

/// Samples `values[k]` at `start + k * step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub start: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(start: f64, step: f64, values: Vec<f64>) -> Self {
        TimeSeries { start, step, values }
    }

    pub fn time(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    /// Share of `sum |v|^e` carried by samples farther than a quarter of the
    /// sampled span from its midpoint.
    pub fn outside_half_fraction(&self, exponent: f64) -> f64 {
        let n = self.values.len();
        if n == 0 {
            return 0.0;
        }
        let mid = 0.5 * (self.time(0) + self.time(n - 1));
        let quarter = 0.25 * (self.time(n - 1) - self.time(0));
        let pw: Vec<f64> = self.values.iter().map(|v| v.abs().powf(exponent)).collect();
        let outside: Vec<f64> =
            pw.iter().enumerate().filter(|(k, _)| (self.time(*k) - mid).abs() > quarter + 1e-12).map(|(_, v)| *v).collect();
        let total = pairwise_sum(&pw);
        if total == 0.0 {
            0.0
        } else {
            pairwise_sum(&outside) / total
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedTimeNorm {
    pub value: f64,
    pub lattice_step: f64,
    pub centers: usize,
    /// Trajectory mass (in the global exponent, or `L^2` when that is infinite)
    /// outside the middle half of the sampled interval.
    pub outside_half_fraction: f64,
}

struct TimeLattice {
    stride: usize,
    reach: usize,
    centers: Vec<i64>,
    weights: Vec<f64>,
}

impl TimeLattice {
    fn new(n: usize, dt: f64, window: &WindowSpec, lattice_step: Option<f64>) -> Result<Self> {
        window.validate()?;
        if n == 0 {
            return Err(Error::InvalidInput("empty trajectory".into()));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidInput(format!("time step must be positive, got {dt}")));
        }
        let quarter = window.effective_width() / 4.0;
        let stride = match lattice_step {
            Some(step) => {
                let m = (step / dt).round() as usize;
                if m == 0 || ((m as f64) * dt - step).abs() > 1e-9 * step {
                    return Err(Error::InvalidSpec(format!("time lattice step {step} is not a multiple of {dt}")));
                }
                m
            }
            None => {
                let target = quarter.min(8.0 * dt);
                let mut m = 1usize;
                while (2 * m) as f64 * dt <= target * (1.0 + 1e-12) {
                    m *= 2;
                }
                m
            }
        };
        if stride as f64 * dt > quarter * (1.0 + 1e-12) {
            return Err(Error::InvalidSpec(format!(
                "time lattice step {} exceeds a quarter of the window width {}",
                stride as f64 * dt,
                window.effective_width()
            )));
        }
        let reach = (window.cutoff_radius() / dt).floor() as usize;
        let lo = -(reach.div_ceil(stride) as i64);
        let hi = (n - 1 + reach).div_ceil(stride) as i64;
        let centers = (lo..=hi).map(|i| i * stride as i64).collect();
        let weights = (0..=2 * reach).map(|j| window.eval_axis((j as f64 - reach as f64) * dt).abs()).collect();
        Ok(TimeLattice { stride, reach, centers, weights })
    }

    /// Sample indices inside the window around `center`, with the window weight.
    fn support(&self, center: i64, n: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.reach as i64;
        let lo = (center - r).max(0);
        let hi = (center + r).min(n as i64 - 1);
        (lo..=hi).map(move |k| (k as usize, self.weights[(k - center + r) as usize]))
    }
}

fn check_exponents(q1: f64, q2: f64) -> Result<()> {
    if !(q1 >= 1.0 && q2 >= 1.0) {
        return Err(Error::InvalidSpec(format!("time exponents must be >= 1, got ({q1}, {q2})")));
    }
    Ok(())
}

/// `W(L^{q1}, L^{q2})` norm of `t -> |traj(t)|` with the given time window.
///
/// `lattice_step = None` picks `min(width/4, 8 dt)`, rounded to a power-of-two
/// multiple of the time step.
pub fn mixed_time_norm(
    traj: &TimeSeries,
    q1: f64,
    q2: f64,
    window: &WindowSpec,
    lattice_step: Option<f64>,
) -> Result<MixedTimeNorm> {
    check_exponents(q1, q2)?;
    if traj.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("trajectory".into()));
    }
    let n = traj.values.len();
    let lat = TimeLattice::new(n, traj.step, window, lattice_step)?;
    let dt = traj.step;
    let profile: Vec<f64> = lat
        .centers
        .iter()
        .map(|&c| {
            let local: Vec<f64> = lat.support(c, n).map(|(k, w)| traj.values[k].abs() * w).collect();
            weighted_lp(&local, q1, dt)
        })
        .collect();
    let step = lat.stride as f64 * dt;
    let exponent = if q2.is_finite() { q2 } else { 2.0 };
    Ok(MixedTimeNorm {
        value: weighted_lp(&profile, q2, step),
        lattice_step: step,
        centers: lat.centers.len(),
        outside_half_fraction: traj.outside_half_fraction(exponent),
    })
}

/// The same norm read with the time window applied to the states first:
/// each local time norm integrates `||g(t - u) F(t)||_{W_x}` over `t`.
#[allow(clippy::too_many_arguments)]
pub fn mixed_time_norm_of_states(
    states: &[GridFunction],
    dt: f64,
    space: &AmalgamSpec,
    q1: f64,
    q2: f64,
    window: &WindowSpec,
    lattice_step: Option<f64>,
) -> Result<f64> {
    check_exponents(q1, q2)?;
    let n = states.len();
    let lat = TimeLattice::new(n, dt, window, lattice_step)?;
    let grid = *states[0].grid();
    let plan = AmalgamPlan::new(&grid, space)?;
    let profile = par::map(&lat.centers, |&c| -> Result<f64> {
        let local = lat
            .support(c, n)
            .map(|(k, w)| plan.norm(&states[k].scale(num_complex::Complex64::new(w, 0.0))))
            .collect::<Result<Vec<f64>>>()?;
        Ok(weighted_lp(&local, q1, dt))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    Ok(weighted_lp(&profile, q2, lat.stride as f64 * dt))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trajectory() {
        let t = TimeSeries::new(-1.0, 0.01, vec![0.0; 201]);
        assert_eq!(mixed_time_norm(&t, 2.0, 4.0, &WindowSpec::gaussian_unit(), None).unwrap().value, 0.0);
    }

    #[test]
    fn sup_norm_is_max() {
        let vals: Vec<f64> = (0..101).map(|k| ((k as f64) * 0.1).sin()).collect();
        let max = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let t = TimeSeries::new(0.0, 0.05, vals);
        // a center on every sample puts g(0) = 1 on the maximizer
        let v = mixed_time_norm(&t, f64::INFINITY, f64::INFINITY, &WindowSpec::gaussian_unit(), Some(0.05)).unwrap().value;
        assert!((v - max).abs() < 1e-12);
    }

    #[test]
    fn empty_rejected() {
        let t = TimeSeries::new(0.0, 0.1, vec![]);
        assert!(mixed_time_norm(&t, 2.0, 2.0, &WindowSpec::gaussian_unit(), None).is_err());
    }

    #[test]
    fn outside_fraction_of_constant_is_half() {
        let t = TimeSeries::new(-1.0, 0.001, vec![1.0; 2001]);
        assert!((t.outside_half_fraction(2.0) - 0.5).abs() < 1e-3);
    }
}
