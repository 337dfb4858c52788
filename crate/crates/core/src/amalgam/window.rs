use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum WindowShape {
    /// `e^{-pi |x|^2}`.
    Gaussian,
    /// Product of `exp(1 - 1/(1 - (x/w)^2))` bumps supported on `|x| < w`.
    Bump { half_width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowNormalization {
    /// `g(0) = 1`.
    Peak,
    /// `||g||_{L^2} = 1`.
    UnitL2,
}

/// Window `g` used to localize `f` around lattice points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub shape: WindowShape,
    pub normalization: WindowNormalization,
    /// Relative window level below which the window is cut off.
    pub truncation_tol: f64,
}

const DEFAULT_TOL: f64 = 1e-12;

fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

/// `int_{-1}^{1} bump(s)^k ds` by the midpoint rule (the integrand is smooth and flat at the ends).
fn bump_moment(k: i32) -> f64 {
    static MOMENTS: OnceLock<[f64; 2]> = OnceLock::new();
    let m = MOMENTS.get_or_init(|| [bump_moment_quadrature(1), bump_moment_quadrature(2)]);
    match k {
        1 => m[0],
        2 => m[1],
        _ => bump_moment_quadrature(k),
    }
}

fn bump_moment_quadrature(k: i32) -> f64 {
    let n = 20_000;
    let h = 2.0 / n as f64;
    (0..n).map(|i| bump(-1.0 + (i as f64 + 0.5) * h).powi(k)).sum::<f64>() * h
}

impl WindowSpec {
    /// `g(x) = e^{-pi |x|^2}`, so `g(0) = 1` and `||g||_2 = 2^{-d/4}`.
    pub fn gaussian_unit() -> Self {
        WindowSpec { shape: WindowShape::Gaussian, normalization: WindowNormalization::Peak, truncation_tol: DEFAULT_TOL }
    }

    /// `g(x) = 2^{d/4} e^{-pi |x|^2}`, so `||g||_2 = 1`.
    pub fn gaussian_l2() -> Self {
        WindowSpec { shape: WindowShape::Gaussian, normalization: WindowNormalization::UnitL2, truncation_tol: DEFAULT_TOL }
    }

    pub fn bump(half_width: f64) -> Self {
        WindowSpec { shape: WindowShape::Bump { half_width }, normalization: WindowNormalization::Peak, truncation_tol: DEFAULT_TOL }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.truncation_tol = tol;
        self
    }

    pub fn with_normalization(mut self, normalization: WindowNormalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.truncation_tol > 0.0 && self.truncation_tol < 1.0) {
            return Err(Error::InvalidSpec(format!("window tolerance must lie in (0, 1), got {}", self.truncation_tol)));
        }
        if let WindowShape::Bump { half_width } = self.shape {
            if !(half_width > 0.0 && half_width.is_finite()) {
                return Err(Error::InvalidSpec(format!("bump half width must be positive, got {half_width}")));
            }
        }
        Ok(())
    }

    /// Per-axis factor of the normalization constant.
    fn axis_amplitude(&self) -> f64 {
        match (self.normalization, self.shape) {
            (WindowNormalization::Peak, _) => 1.0,
            (WindowNormalization::UnitL2, WindowShape::Gaussian) => 2f64.powf(0.25),
            (WindowNormalization::UnitL2, WindowShape::Bump { half_width }) => (half_width * bump_moment(2)).powf(-0.5),
        }
    }

    /// One-dimensional profile including the per-axis normalization.
    pub fn eval_axis(&self, y: f64) -> f64 {
        let shape = match self.shape {
            WindowShape::Gaussian => (-std::f64::consts::PI * y * y).exp(),
            WindowShape::Bump { half_width } => bump(y / half_width),
        };
        self.axis_amplitude() * shape
    }

    /// `g(y)` for a displacement `y` in `dim` dimensions.
    pub fn eval(&self, y: [f64; 2], dim: usize) -> f64 {
        (0..dim).map(|a| self.eval_axis(y[a])).product()
    }

    /// Per-axis radius beyond which the window is treated as zero.
    pub fn cutoff_radius(&self) -> f64 {
        match self.shape {
            WindowShape::Gaussian => ((1.0 / self.truncation_tol).ln() / std::f64::consts::PI).sqrt(),
            WindowShape::Bump { half_width } => half_width,
        }
    }

    /// Equivalent width `int g / g(0)` along one axis.
    pub fn effective_width(&self) -> f64 {
        match self.shape {
            WindowShape::Gaussian => 1.0,
            WindowShape::Bump { half_width } => half_width * bump_moment(1),
        }
    }

    /// `||g||_{L^p}` along one axis (the d-dimensional norm is its d-th power).
    pub fn axis_lp_norm(&self, p: f64) -> f64 {
        let a = self.axis_amplitude();
        if p.is_infinite() {
            return a;
        }
        match self.shape {
            WindowShape::Gaussian => a * p.powf(-0.5 / p),
            WindowShape::Bump { half_width } => {
                let n = 20_000;
                let h = 2.0 / n as f64;
                let s: f64 = (0..n).map(|i| bump(-1.0 + (i as f64 + 0.5) * h).powf(p)).sum::<f64>() * h;
                a * (half_width * s).powf(1.0 / p)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_unit_normalization() {
        let w = WindowSpec::gaussian_unit();
        assert_eq!(w.eval([0.0, 0.0], 2), 1.0);
        assert!((w.axis_lp_norm(2.0) - 2f64.powf(-0.25)).abs() < 1e-15);
    }

    #[test]
    fn l2_windows_have_unit_norm() {
        for w in [WindowSpec::gaussian_l2(), WindowSpec::bump(1.5).with_normalization(WindowNormalization::UnitL2)] {
            let r = w.cutoff_radius();
            let n = 200_000;
            let h = 2.0 * r / n as f64;
            let s: f64 = (0..n).map(|i| w.eval_axis(-r + (i as f64 + 0.5) * h).powi(2)).sum::<f64>() * h;
            assert!((s - 1.0).abs() < 1e-9, "{w:?}: {s}");
        }
    }

    #[test]
    fn cutoff_matches_tolerance() {
        let w = WindowSpec::gaussian_unit().with_tolerance(1e-8);
        assert!((w.eval_axis(w.cutoff_radius()) - 1e-8).abs() < 1e-20);
    }
}
