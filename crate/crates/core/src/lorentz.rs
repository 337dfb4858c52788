//! Distribution functions, decreasing rearrangements and Lorentz quasinorms.
//!
//! A sampled function is a step function with one value per cell, so its
//! decreasing rearrangement `f*` is again a step function. The quasinorm
//!
//! ```text
//! ||f||*_{pq} = ( (q/p) int_0^inf [t^{1/p} f*(t)]^q dt/t )^{1/q}
//! ```
//!
//! is integrated exactly on each step: `v^q (t_i^{q/p} - t_{i-1}^{q/p})`.
//! The weak case `q = inf` is `sup_t t^{1/p} f*(t)`, attained at the right
//! end of a step.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::numeric::{pairwise_sum, weighted_lp};

/// `f*` as a step function: level `levels[i]` on `[breakpoints[i], breakpoints[i+1])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRearrangement {
    breakpoints: Vec<f64>,
    levels: Vec<f64>,
    counts: Vec<usize>,
    cell: f64,
}

impl StepRearrangement {
    /// Rearranges `magnitudes`, each carrying measure `cell`. Zero values are
    /// dropped and equal values merged into one step.
    pub fn from_magnitudes(magnitudes: &[f64], cell: f64) -> Self {
        // nonnegative floats order like their bit patterns
        let mut keys: Vec<u64> = magnitudes.iter().filter(|v| **v > 0.0).map(|v| v.to_bits()).collect();
        keys.sort_unstable_by(|a, b| b.cmp(a));
        let sorted = keys.into_iter().map(f64::from_bits);
        let mut levels = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for v in sorted {
            match levels.last() {
                Some(&last) if last == v => *counts.last_mut().unwrap() += 1,
                _ => {
                    levels.push(v);
                    counts.push(1);
                }
            }
        }
        let mut breakpoints = Vec::with_capacity(levels.len() + 1);
        breakpoints.push(0.0);
        let mut cumulative = 0usize;
        for c in &counts {
            cumulative += c;
            breakpoints.push(cumulative as f64 * cell);
        }
        StepRearrangement { breakpoints, levels, counts, cell }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Measure of the support.
    pub fn total_measure(&self) -> f64 {
        *self.breakpoints.last().unwrap_or(&0.0)
    }

    /// `f*(t)`.
    pub fn value_at(&self, t: f64) -> f64 {
        // first breakpoint strictly greater than t
        let i = self.breakpoints.partition_point(|b| *b <= t);
        if i == 0 || i > self.levels.len() {
            0.0
        } else {
            self.levels[i - 1]
        }
    }

    /// L^p norm of the step function, summed cell by cell like the grid norm
    /// so the two agree bit for bit.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let cells: Vec<f64> =
            self.levels.iter().zip(&self.counts).flat_map(|(v, c)| std::iter::repeat_n(*v, *c)).collect();
        weighted_lp(&cells, p, self.cell)
    }

    /// Lorentz quasinorm `||f||*_{pq}`; `p` in (1, inf), `q` in [1, inf].
    pub fn quasinorm(&self, p: f64, q: f64) -> Result<f64> {
        check_exponents(p, q)?;
        if q.is_infinite() {
            let sup = self
                .levels
                .iter()
                .zip(&self.breakpoints[1..])
                .map(|(v, t)| v * t.powf(1.0 / p))
                .fold(0.0, f64::max);
            return Ok(sup);
        }
        let e = q / p;
        let scale = self.cell.powf(e);
        let mut k = 0usize;
        let mut prev = 0.0;
        let terms: Vec<f64> = with_powers(e, self.counts.iter().sum(), |pow| {
            self.levels
                .iter()
                .zip(&self.counts)
                .map(|(v, c)| {
                    k += c;
                    let next = scale * pow[k];
                    let t = int_pow(*v, q) * (next - prev);
                    prev = next;
                    t
                })
                .collect()
        });
        Ok(pairwise_sum(&terms).powf(1.0 / q))
    }
}

/// `v^q`, by repeated products when `q` is a small integer.
fn int_pow(v: f64, q: f64) -> f64 {
    if q == 2.0 {
        v * v
    } else if q == q.trunc() && q <= 8.0 {
        v.powi(q as i32)
    } else {
        v.powf(q)
    }
}

thread_local! {
    static POWERS: RefCell<(f64, Vec<f64>)> = const { RefCell::new((f64::NAN, Vec::new())) };
}

/// Runs `f` on the table `k^e` for `k = 0..=n`, cached per thread.
fn with_powers<R>(e: f64, n: usize, f: impl FnOnce(&[f64]) -> R) -> R {
    POWERS.with(|cell| {
        let mut table = cell.borrow_mut();
        if table.0 != e {
            *table = (e, Vec::new());
        }
        let start = table.1.len();
        table.1.extend((start..=n).map(|k| (k as f64).powf(e)));
        f(&table.1)
    })
}

fn check_exponents(p: f64, q: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidSpec(format!("Lorentz exponent p must lie in (1, inf), got {p}")));
    }
    if !(q >= 1.0) {
        return Err(Error::InvalidSpec(format!("Lorentz exponent q must lie in [1, inf], got {q}")));
    }
    Ok(())
}

/// `lambda(s) = |{ |f| > s }|`.
pub fn distribution_function(f: &GridFunction, s: f64) -> f64 {
    let count = f.values().iter().filter(|v| v.norm() > s).count();
    count as f64 * f.grid().cell_volume()
}

pub fn decreasing_rearrangement(f: &GridFunction) -> StepRearrangement {
    StepRearrangement::from_magnitudes(&f.magnitudes(), f.grid().cell_volume())
}

/// Lorentz quasinorm of a grid function.
pub fn lorentz_quasinorm(f: &GridFunction, p: f64, q: f64) -> Result<f64> {
    decreasing_rearrangement(f).quasinorm(p, q)
}

/// Weak quasinorm through the distribution function, `sup_s s lambda(s)^{1/p}`.
///
/// On a step function the supremum is reached as `s` increases to a level
/// value, where `lambda(s-) = |{ |f| >= s }|`. This route never builds `f*`.
pub fn weak_quasinorm_via_distribution(magnitudes: &[f64], cell: f64, p: f64) -> Result<f64> {
    check_exponents(p, f64::INFINITY)?;
    let mut ascending: Vec<f64> = magnitudes.to_vec();
    ascending.sort_unstable_by(f64::total_cmp);
    let n = ascending.len();
    let mut best: f64 = 0.0;
    let mut i = 0;
    while i < n {
        let s = ascending[i];
        if s > 0.0 {
            // entries from i on are >= s
            let measure = (n - i) as f64 * cell;
            best = best.max(s * measure.powf(1.0 / p));
        }
        while i < n && ascending[i] == s {
            i += 1;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{sample, AnalyticFunction};
    use crate::grid::make_grid;
    use num_complex::Complex64;

    fn indicator(lo: f64, hi: f64) -> GridFunction {
        let g = make_grid(1, 16.0, 256).unwrap();
        sample(&AnalyticFunction::Indicator { lower: [lo, 0.0], upper: [hi, 0.0] }, &g).unwrap()
    }

    #[test]
    fn indicator_level_set() {
        let f = indicator(-1.0, 2.0);
        let vol = 3.0;
        assert!((distribution_function(&f, 0.5) - vol).abs() < 1e-12);
        assert_eq!(distribution_function(&f, 1.0), 0.0);
        let r = decreasing_rearrangement(&f);
        assert_eq!(r.levels(), &[1.0]);
        assert!((r.total_measure() - vol).abs() < 1e-12);
    }

    #[test]
    fn indicator_lorentz_is_measure_power() {
        let f = indicator(-1.0, 2.0);
        for (p, q) in [(2.0, 1.0), (2.0, 2.0), (1.5, 4.0), (3.0, f64::INFINITY)] {
            let v = lorentz_quasinorm(&f, p, q).unwrap();
            assert!((v - 3.0f64.powf(1.0 / p)).abs() < 1e-12, "p={p} q={q} v={v}");
        }
    }

    #[test]
    fn two_level_function_steps() {
        let g = make_grid(1, 8.0, 8).unwrap(); // cells of measure 1
        let mut vals = vec![Complex64::new(0.0, 0.0); 8];
        vals[1] = Complex64::new(2.0, 0.0);
        vals[4] = Complex64::new(-1.0, 0.0);
        vals[5] = Complex64::new(0.0, 1.0);
        vals[7] = Complex64::new(1.0, 0.0);
        let f = GridFunction::new(g, vals).unwrap();
        let r = decreasing_rearrangement(&f);
        assert_eq!(r.levels(), &[2.0, 1.0]);
        assert_eq!(r.breakpoints(), &[0.0, 1.0, 4.0]);
        assert_eq!(r.value_at(0.5), 2.0);
        assert_eq!(r.value_at(3.9), 1.0);
        assert_eq!(r.value_at(4.0), 0.0);
    }

    #[test]
    fn translation_invariant() {
        let g = make_grid(1, 8.0, 64).unwrap();
        let f = GridFunction::from_fn(g, |x| Complex64::new((-x[0] * x[0]).exp(), x[0].sin())).unwrap();
        assert_eq!(decreasing_rearrangement(&f), decreasing_rearrangement(&f.translate(&[13])));
    }

    #[test]
    fn power_level_set_counts_cells() {
        let g = make_grid(1, 16.0, 4096).unwrap().with_half_offset();
        let f = sample(&AnalyticFunction::Power { exponent: 0.5 }, &g).unwrap();
        // |x|^{-1/2} > 1 exactly on |x| < 1; the two cells ending at |x| = 1
        // take the boundary value 1 and drop out
        let lambda = distribution_function(&f, 1.0);
        let h = g.spacing();
        assert!(lambda <= 2.0 && lambda >= 2.0 - 2.0 * h - 1e-12, "lambda={lambda}");
    }

    #[test]
    fn exponent_validation() {
        let f = indicator(0.0, 1.0);
        assert!(lorentz_quasinorm(&f, 1.0, 2.0).is_err());
        assert!(lorentz_quasinorm(&f, f64::INFINITY, 2.0).is_err());
        assert!(lorentz_quasinorm(&f, 2.0, 0.5).is_err());
    }
}
