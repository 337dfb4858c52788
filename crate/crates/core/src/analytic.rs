//! Closed-form reference functions and their sampling on grids.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};

/// Reference functions with known transforms, norms or level sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalyticFunction {
    /// `e^{-pi |x|^2 / c}` with `Re c >= 0`, `c != 0`.
    Gaussian { c: Complex64 },
    /// `(a i)^{-d/2} e^{-pi |x|^2 / (a i)}`, principal square root.
    Chirp { a: f64 },
    /// `|t|^{-alpha} + |t|^{-2 alpha}` on the line, `0 < alpha < 1/2`.
    TailPhi { alpha: f64 },
    /// `|x|^{-exponent}`.
    Power { exponent: f64 },
    /// Indicator of the half-open box `[lower, upper)` (per axis).
    Indicator { lower: [f64; 2], upper: [f64; 2] },
    /// Free Schrödinger evolution of `Gaussian { c }` to time `t`.
    EvolvedGaussian { c: Complex64, t: f64 },
}

fn principal_pow_half(z: Complex64, dim: usize) -> Complex64 {
    // z^{d/2} with the root of positive real part
    let r = z.sqrt();
    if dim == 1 {
        r
    } else {
        r * r
    }
}

impl AnalyticFunction {
    pub fn gaussian(c: f64) -> Self {
        AnalyticFunction::Gaussian { c: Complex64::new(c, 0.0) }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match *self {
            AnalyticFunction::Gaussian { c } | AnalyticFunction::EvolvedGaussian { c, .. } => {
                if c.re < 0.0 || c.norm() == 0.0 {
                    return Err(Error::InvalidSpec(format!("gaussian parameter {c} needs Re c >= 0, c != 0")));
                }
                if let AnalyticFunction::EvolvedGaussian { t, .. } = *self {
                    if c.re == 0.0 || !t.is_finite() {
                        return Err(Error::InvalidSpec("evolved gaussian needs Re c > 0 and finite t".into()));
                    }
                }
            }
            AnalyticFunction::Chirp { a } => {
                if a == 0.0 || !a.is_finite() {
                    return Err(Error::InvalidSpec(format!("chirp parameter must be nonzero, got {a}")));
                }
            }
            AnalyticFunction::TailPhi { alpha } => {
                if !(alpha > 0.0 && alpha < 0.5) {
                    return Err(Error::InvalidSpec(format!("tail_phi needs 0 < alpha < 1/2, got {alpha}")));
                }
                if dim != 1 {
                    return Err(Error::InvalidSpec("tail_phi is defined on the line".into()));
                }
            }
            AnalyticFunction::Power { exponent } => {
                if !(exponent > 0.0) {
                    return Err(Error::InvalidSpec(format!("power exponent must be positive, got {exponent}")));
                }
            }
            AnalyticFunction::Indicator { .. } => {}
        }
        Ok(())
    }

    /// Functions that blow up at the origin and need half-offset grids.
    pub fn is_singular(&self) -> bool {
        matches!(self, AnalyticFunction::TailPhi { .. } | AnalyticFunction::Power { .. })
    }

    /// Pointwise value at `x` (only the first `dim` coordinates are used).
    pub fn evaluate(&self, x: [f64; 2], dim: usize) -> Complex64 {
        let r2 = if dim == 1 { x[0] * x[0] } else { x[0] * x[0] + x[1] * x[1] };
        match *self {
            AnalyticFunction::Gaussian { c } => (-PI * r2 / c).exp(),
            AnalyticFunction::Chirp { a } => {
                let amp = principal_pow_half(Complex64::new(0.0, a), dim).inv();
                amp * Complex64::from_polar(1.0, PI * r2 / a)
            }
            AnalyticFunction::TailPhi { alpha } => {
                let t = x[0].abs();
                Complex64::new(t.powf(-alpha) + t.powf(-2.0 * alpha), 0.0)
            }
            AnalyticFunction::Power { exponent } => Complex64::new(r2.sqrt().powf(-exponent), 0.0),
            AnalyticFunction::Indicator { lower, upper } => {
                let inside = (0..dim).all(|i| x[i] >= lower[i] && x[i] < upper[i]);
                Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
            }
            AnalyticFunction::EvolvedGaussian { c, t } => evolved_gaussian_value(c, t, r2, dim),
        }
    }
}

/// `(c / (c + 4 pi i t))^{d/2} e^{-pi |x|^2 / (c + 4 pi i t)}`.
pub(crate) fn evolved_gaussian_value(c: Complex64, t: f64, r2: f64, dim: usize) -> Complex64 {
    let ct = c + Complex64::new(0.0, 4.0 * PI * t);
    let amp = principal_pow_half(c, dim) / principal_pow_half(ct, dim);
    amp * (-PI * r2 / ct).exp()
}

/// Samples `f(x + center)` at the nodes of `grid`.
///
/// Singular functions are only sampled on half-offset grids, and each cell
/// takes the value at its point farthest from the singularity (the cell
/// infimum of a radially decreasing function), so the discrete distribution
/// function never exceeds the continuous one.
pub fn sample_shifted(f: &AnalyticFunction, grid: &Grid, center: [f64; 2]) -> Result<GridFunction> {
    let dim = grid.dim();
    f.validate(dim)?;
    if f.is_singular() {
        if !grid.is_half_offset() {
            return Err(Error::InvalidSpec("singular functions need a half-offset grid".into()));
        }
        let half = 0.5 * grid.spacing();
        GridFunction::from_fn(*grid, |x| {
            let mut p = [x[0] + center[0], x[1] + center[1]];
            for coord in p.iter_mut().take(dim) {
                if coord.abs() < half * (1.0 - 1e-9) {
                    // the cell straddles the singularity: no finite infimum rule applies
                    *coord = f64::NAN;
                } else {
                    *coord += half * coord.signum();
                }
            }
            f.evaluate(p, dim)
        })
    } else {
        GridFunction::from_fn(*grid, |x| f.evaluate([x[0] + center[0], x[1] + center[1]], dim))
    }
}

/// Samples `f` at the grid nodes.
pub fn sample(f: &AnalyticFunction, grid: &Grid) -> Result<GridFunction> {
    sample_shifted(f, grid, [0.0, 0.0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn gaussian_at_origin() {
        let v = AnalyticFunction::gaussian(1.0).evaluate([0.0, 0.0], 1);
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn chirp_at_origin_is_eighth_turn() {
        let v = AnalyticFunction::Chirp { a: 1.0 }.evaluate([0.0, 0.0], 1);
        let expect = Complex64::from_polar(1.0, -PI / 4.0);
        assert!((v - expect).norm() < 1e-15);
        assert!((v.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tail_phi_at_one() {
        let v = AnalyticFunction::TailPhi { alpha: 0.4 }.evaluate([1.0, 0.0], 1);
        assert_eq!(v.re, 2.0);
    }

    #[test]
    fn evolved_gaussian_at_time_zero_is_gaussian() {
        let c = Complex64::new(1.5, 0.5);
        let g = AnalyticFunction::Gaussian { c };
        let e = AnalyticFunction::EvolvedGaussian { c, t: 0.0 };
        for x in [0.0, 0.3, 1.7] {
            assert!((g.evaluate([x, 0.2], 2) - e.evaluate([x, 0.2], 2)).norm() < 1e-15);
        }
    }

    #[test]
    fn singular_sampling_requires_offset_grid() {
        let g = make_grid(1, 4.0, 16).unwrap();
        let f = AnalyticFunction::TailPhi { alpha: 0.25 };
        assert!(sample(&f, &g).is_err());
        let s = sample(&f, &g.with_half_offset()).unwrap();
        // first cell to the right of 0 is [0, h]: sampled at h
        let h = g.spacing();
        let expect = h.powf(-0.25) + h.powf(-0.5);
        assert!((s.values()[8].re - expect).abs() < 1e-12);
    }

    #[test]
    fn invalid_parameters_rejected() {
        let g = make_grid(1, 4.0, 16).unwrap();
        assert!(sample(&AnalyticFunction::Chirp { a: 0.0 }, &g).is_err());
        assert!(sample(&AnalyticFunction::gaussian(-1.0), &g).is_err());
        assert!(sample(&AnalyticFunction::TailPhi { alpha: 0.6 }, &g.with_half_offset()).is_err());
    }
}
