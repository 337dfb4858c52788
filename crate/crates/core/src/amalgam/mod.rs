//! Wiener amalgam norms `||f||_{W(B,C)} = || x -> ||f T_x g||_B ||_C`.
//!
//! The local norm is evaluated on a patch of `M^d` nodes around each lattice
//! center, where `M` is the smallest power of two covering the window's cutoff
//! diameter. Fourier local components use the patch DFT, whose frequency cells
//! have measure `(1/(M h))^d`; zero padding (`pad > 1`) refines that grid.

mod bupu;
mod mixed;
mod window;

pub use bupu::{build_bupu, analysis_s, bupu_amalgam_norm, component_norm, synthesis_r, Bupu, OverlapCounts};
pub use mixed::{mixed_time_norm, mixed_time_norm_of_states, MixedTimeNorm, TimeSeries};
pub use window::{WindowNormalization, WindowShape, WindowSpec};

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::Fft;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::plan;
use crate::grid::{Grid, GridFunction};
use crate::lorentz::StepRearrangement;
use crate::numeric::weighted_lp;
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalTransform {
    None,
    Fourier,
}

/// The local component `B`: `L^p`, `FL^p`, `L^{p,q}` or `FL^{p,q}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalNormSpec {
    pub transform: LocalTransform,
    pub p: f64,
    pub lorentz_q: Option<f64>,
}

impl LocalNormSpec {
    pub fn lp(p: f64) -> Self {
        LocalNormSpec { transform: LocalTransform::None, p, lorentz_q: None }
    }

    pub fn fourier_lp(p: f64) -> Self {
        LocalNormSpec { transform: LocalTransform::Fourier, p, lorentz_q: None }
    }

    pub fn lorentz(p: f64, q: f64) -> Self {
        LocalNormSpec { transform: LocalTransform::None, p, lorentz_q: Some(q) }
    }

    pub fn fourier_lorentz(p: f64, q: f64) -> Self {
        LocalNormSpec { transform: LocalTransform::Fourier, p, lorentz_q: Some(q) }
    }

    pub fn validate(&self) -> Result<()> {
        match self.lorentz_q {
            None if !(self.p >= 1.0) => Err(Error::InvalidSpec(format!("local exponent must be >= 1, got {}", self.p))),
            Some(q) if !(self.p > 1.0 && self.p.is_finite() && q >= 1.0) => Err(Error::InvalidSpec(format!(
                "local Lorentz exponents need p in (1, inf), q >= 1, got ({}, {q})",
                self.p
            ))),
            _ => Ok(()),
        }
    }

    /// Norm of a step function with values `mags`, each carrying measure `cell`.
    pub(crate) fn eval(&self, mags: &[f64], cell: f64) -> Result<f64> {
        match self.lorentz_q {
            None => Ok(weighted_lp(mags, self.p, cell)),
            Some(q) => StepRearrangement::from_magnitudes(mags, cell).quasinorm(self.p, q),
        }
    }
}

/// The global component `C`: `L^p` or weak `L^{p,inf}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalNormSpec {
    pub p: f64,
    pub weak: bool,
}

impl GlobalNormSpec {
    pub fn lp(p: f64) -> Self {
        GlobalNormSpec { p, weak: false }
    }

    pub fn weak(p: f64) -> Self {
        GlobalNormSpec { p, weak: true }
    }

    pub fn validate(&self) -> Result<()> {
        if self.weak && !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidSpec(format!("weak global norm needs p in (1, inf), got {}", self.p)));
        }
        if !(self.p >= 1.0) {
            return Err(Error::InvalidSpec(format!("global exponent must be >= 1, got {}", self.p)));
        }
        Ok(())
    }

    pub(crate) fn eval(&self, profile: &[f64], cell: f64) -> Result<f64> {
        if self.weak {
            StepRearrangement::from_magnitudes(profile, cell).quasinorm(self.p, f64::INFINITY)
        } else {
            Ok(weighted_lp(profile, self.p, cell))
        }
    }
}

/// Which lattice centers enter the global norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "region", rename_all = "snake_case")]
pub enum CenterRegion {
    Full,
    /// Centers with every coordinate in `[-L/4, L/4)`.
    CentralHalf,
    /// Centers with every coordinate in `[-half_width, half_width]`.
    Box { half_width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmalgamSpec {
    pub window: WindowSpec,
    pub lattice_step: f64,
    pub local: LocalNormSpec,
    pub global: GlobalNormSpec,
    pub centers: CenterRegion,
    /// Zero-padding factor for the patch DFT (power of two).
    pub pad: usize,
}

/// `min(width/4, 8h)` rounded down to `m h` with `m` a power of two.
pub fn default_lattice_step(grid: &Grid, window: &WindowSpec) -> f64 {
    let h = grid.spacing();
    let target = (window.effective_width() / 4.0).min(8.0 * h);
    let mut m = 1usize;
    while (2 * m) as f64 * h <= target * (1.0 + 1e-12) && 2 * m <= grid.points_per_dim() {
        m *= 2;
    }
    m as f64 * h
}

impl AmalgamSpec {
    /// Spec with the default lattice step for `grid`, all centers and no padding.
    pub fn new(grid: &Grid, window: WindowSpec, local: LocalNormSpec, global: GlobalNormSpec) -> Self {
        AmalgamSpec { window, lattice_step: default_lattice_step(grid, &window), local, global, centers: CenterRegion::Full, pad: 1 }
    }

    /// `W(FL^1, L^inf)` with the peak-one Gaussian window.
    pub fn fl1_linf(grid: &Grid) -> Self {
        Self::new(grid, WindowSpec::gaussian_unit(), LocalNormSpec::fourier_lp(1.0), GlobalNormSpec::lp(f64::INFINITY))
    }

    pub fn with_lattice_step(mut self, step: f64) -> Self {
        self.lattice_step = step;
        self
    }

    pub fn with_centers(mut self, centers: CenterRegion) -> Self {
        self.centers = centers;
        self
    }

    pub fn with_pad(mut self, pad: usize) -> Self {
        self.pad = pad;
        self
    }

    pub fn with_window(mut self, window: WindowSpec) -> Self {
        self.window = window;
        self
    }
}

/// Everything about a spec that depends only on the grid.
pub struct AmalgamPlan {
    grid: Grid,
    spec: AmalgamSpec,
    stride: usize,
    patch: usize,
    window_patch: Vec<f64>,
    fft: Option<Arc<dyn Fft<f64>>>,
    centers: Vec<[usize; 2]>,
}

impl AmalgamPlan {
    pub fn new(grid: &Grid, spec: &AmalgamSpec) -> Result<Self> {
        spec.window.validate()?;
        spec.local.validate()?;
        spec.global.validate()?;
        let h = grid.spacing();
        let n = grid.points_per_dim();
        let step = spec.lattice_step;
        if !(step > 0.0) {
            return Err(Error::InvalidSpec(format!("lattice step must be positive, got {step}")));
        }
        let stride = (step / h).round() as usize;
        if stride == 0 || ((stride as f64) * h - step).abs() > 1e-9 * step || !n.is_multiple_of(stride) {
            return Err(Error::InvalidSpec(format!("lattice step {step} is not a divisor-compatible multiple of the spacing {h}")));
        }
        if step > spec.window.effective_width() / 4.0 * (1.0 + 1e-12) {
            return Err(Error::InvalidSpec(format!(
                "lattice step {step} exceeds a quarter of the window width {}",
                spec.window.effective_width()
            )));
        }
        if !spec.pad.is_power_of_two() {
            return Err(Error::InvalidSpec(format!("pad factor must be a power of two, got {}", spec.pad)));
        }
        let radius = spec.window.cutoff_radius();
        if 2.0 * radius >= grid.extent() {
            return Err(Error::WindowTruncation(format!(
                "window cutoff diameter {} does not fit in the extent {}",
                2.0 * radius,
                grid.extent()
            )));
        }
        let reach = (radius / h).floor() as usize;
        let patch = ((2 * reach + 1).next_power_of_two() * spec.pad).min(n);
        let dim = grid.dim();
        let half = patch / 2;
        let axis: Vec<f64> = (0..patch)
            .map(|j| {
                let y = (j as f64 - half as f64) * h;
                if y.abs() <= radius { spec.window.eval_axis(y) } else { 0.0 }
            })
            .collect();
        let window_patch: Vec<f64> = if dim == 1 {
            axis.clone()
        } else {
            (0..patch * patch).map(|k| axis[k / patch] * axis[k % patch]).collect()
        };
        let fft = match spec.local.transform {
            LocalTransform::Fourier => Some(plan(patch, false)),
            LocalTransform::None => None,
        };
        let l = grid.extent();
        let keep = |j: usize| {
            let x = grid.axis_coord(j);
            match spec.centers {
                CenterRegion::Full => true,
                CenterRegion::CentralHalf => x >= -l / 4.0 && x < l / 4.0,
                CenterRegion::Box { half_width } => x.abs() <= half_width + 1e-12,
            }
        };
        let axis_centers: Vec<usize> = (0..n).step_by(stride).filter(|&j| keep(j)).collect();
        if axis_centers.is_empty() {
            return Err(Error::InvalidSpec("center region contains no lattice points".into()));
        }
        let centers = if dim == 1 {
            axis_centers.iter().map(|&j| [j, 0]).collect()
        } else {
            axis_centers.iter().flat_map(|&a| axis_centers.iter().map(move |&b| [a, b])).collect()
        };
        Ok(AmalgamPlan { grid: *grid, spec: *spec, stride, patch, window_patch, fft, centers })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn spec(&self) -> &AmalgamSpec {
        &self.spec
    }

    /// Patch side length in nodes.
    pub fn patch_size(&self) -> usize {
        self.patch
    }

    /// Lattice centers as node multi-indices.
    pub fn centers(&self) -> &[[usize; 2]] {
        &self.centers
    }

    fn check_center(&self, center: [usize; 2]) -> Result<()> {
        let n = self.grid.points_per_dim();
        let ok = (0..self.grid.dim()).all(|a| center[a] < n && center[a].is_multiple_of(self.stride));
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("node {center:?} is not on the window lattice")))
        }
    }

    /// `||f T_x g||_B` at the lattice node `center`.
    pub fn local_norm(&self, f: &GridFunction, center: [usize; 2]) -> Result<f64> {
        self.grid.check_same(f.grid())?;
        self.check_center(center)?;
        self.local_unchecked(f, center)
    }

    fn local_unchecked(&self, f: &GridFunction, center: [usize; 2]) -> Result<f64> {
        let n = self.grid.points_per_dim();
        let m = self.patch;
        let half = m / 2;
        let dim = self.grid.dim();
        let vals = f.values();
        let wrap = |c: usize, j: usize| (c + n + j - half) % n;
        let mut buf: Vec<Complex64> = Vec::with_capacity(self.window_patch.len());
        if dim == 1 {
            for j in 0..m {
                buf.push(vals[wrap(center[0], j)] * self.window_patch[j]);
            }
        } else {
            for i in 0..m {
                let row = wrap(center[0], i) * n;
                for j in 0..m {
                    buf.push(vals[row + wrap(center[1], j)] * self.window_patch[i * m + j]);
                }
            }
        }
        let h = self.grid.spacing();
        let d = dim as i32;
        match &self.fft {
            None => {
                let mags: Vec<f64> = buf.iter().map(|v| v.norm()).collect();
                self.spec.local.eval(&mags, h.powi(d))
            }
            Some(fft) => {
                let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
                if dim == 1 {
                    fft.process_with_scratch(&mut buf, &mut scratch);
                } else {
                    fft.process_with_scratch(&mut buf, &mut scratch);
                    transpose(&mut buf, m);
                    fft.process_with_scratch(&mut buf, &mut scratch);
                }
                let scale = h.powi(d);
                let mags: Vec<f64> = buf.iter().map(|v| v.norm_sqr().sqrt() * scale).collect();
                self.spec.local.eval(&mags, (1.0 / (m as f64 * h)).powi(d))
            }
        }
    }

    /// Local norms at every center, in center order.
    pub fn profile(&self, f: &GridFunction) -> Result<Vec<f64>> {
        self.grid.check_same(f.grid())?;
        par::map(&self.centers, |&c| self.local_unchecked(f, c)).into_iter().collect()
    }

    /// The global norm of the profile.
    pub fn norm(&self, f: &GridFunction) -> Result<f64> {
        let profile = self.profile(f)?;
        let cell = self.spec.lattice_step.powi(self.grid.dim() as i32);
        let v = self.spec.global.eval(&profile, cell)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite("amalgam norm".into()))
        }
    }
}

fn transpose(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

/// `||f T_center g||_B` for a lattice node `center`.
pub fn local_norm(f: &GridFunction, center: [usize; 2], spec: &AmalgamSpec) -> Result<f64> {
    AmalgamPlan::new(f.grid(), spec)?.local_norm(f, center)
}

/// `||f||_{W(B,C)}`.
pub fn amalgam_norm(f: &GridFunction, spec: &AmalgamSpec) -> Result<f64> {
    AmalgamPlan::new(f.grid(), spec)?.norm(f)
}

/// Lattice centers (coordinates) paired with their local norms.
pub fn local_profile(f: &GridFunction, spec: &AmalgamSpec) -> Result<Vec<([f64; 2], f64)>> {
    let plan = AmalgamPlan::new(f.grid(), spec)?;
    let values = plan.profile(f)?;
    let g = f.grid();
    Ok(plan
        .centers()
        .iter()
        .zip(values)
        .map(|(c, v)| ([g.axis_coord(c[0]), if g.dim() == 2 { g.axis_coord(c[1]) } else { 0.0 }], v))
        .collect())
}
