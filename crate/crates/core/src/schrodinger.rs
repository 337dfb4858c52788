//! Free Schrödinger flow `i u_t + Δu = 0` and a split-step solver for
//! `i u_t + Δu = V u`.
//!
//! With `f^(w) = int f e^{-2 pi i x w}`, the free flow multiplies `u^` by
//! `e^{-4 pi^2 i t |w|^2}`. Its kernel is `K_t(x) = (4 pi i t)^{-d/2} e^{i|x|^2/(4t)}`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::amalgam::{AmalgamPlan, AmalgamSpec};
use crate::analytic::{sample, AnalyticFunction};
use crate::error::{Error, Result};
use crate::fourier::dft_nd;
use crate::grid::{Grid, GridFunction};
use crate::numeric::pairwise_sum;
use crate::par;

/// `e^{-4 pi^2 i t |w|^2}` in FFT slot order.
fn free_multiplier(grid: &Grid, t: f64) -> Vec<Complex64> {
    let n = grid.points_per_dim();
    let l = grid.extent();
    // 4 pi^2 t k^2 / L^2 = 2 pi * (2 pi t k^2 / L^2); reduce the turns first
    let axis: Vec<f64> = (0..n)
        .map(|s| {
            let k = grid.signed_index(s) as f64;
            (2.0 * PI * t * k * k / (l * l)).rem_euclid(1.0)
        })
        .collect();
    (0..grid.len())
        .map(|flat| {
            let [a, b] = grid.unflatten(flat);
            let turns = if grid.dim() == 1 { axis[a] } else { axis[a] + axis[b] };
            Complex64::from_polar(1.0, -2.0 * PI * turns)
        })
        .collect()
}

fn apply_multiplier(values: &mut [Complex64], grid: &Grid, multiplier: &[Complex64]) {
    let n = grid.points_per_dim();
    let dim = grid.dim();
    dft_nd(values, n, dim, false, true);
    let scale = 1.0 / grid.len() as f64;
    for (v, m) in values.iter_mut().zip(multiplier) {
        *v *= m * scale;
    }
    dft_nd(values, n, dim, true, true);
}

/// `e^{it Δ} u0` on the torus.
pub fn propagate(u0: &GridFunction, t: f64) -> GridFunction {
    if t == 0.0 {
        return u0.clone();
    }
    let grid = *u0.grid();
    let mut values = u0.values().to_vec();
    apply_multiplier(&mut values, &grid, &free_multiplier(&grid, t));
    GridFunction::from_raw(grid, values)
}

/// `e^{it Δ} u0` for every `t`, each computed directly from `u0`.
pub fn propagate_many(u0: &GridFunction, ts: &[f64]) -> Vec<GridFunction> {
    par::map(ts, |&t| propagate(u0, t))
}

/// Smallest `|t|` whose kernel is resolved on `grid`: the kernel is the chirp
/// with `a = 4 pi t`, which needs `N >= L^2 / |a|`.
pub fn min_resolved_time(grid: &Grid) -> f64 {
    let l = grid.extent();
    l * l / (4.0 * PI * grid.points_per_dim() as f64)
}

/// `K_t` sampled on `grid`.
pub fn kernel(t: f64, grid: &Grid) -> Result<GridFunction> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::InvalidInput(format!("kernel time must be finite and nonzero, got {t}")));
    }
    let tmin = min_resolved_time(grid);
    if t.abs() < tmin * (1.0 - 1e-12) {
        return Err(Error::Aliasing(format!("kernel at t = {t} needs |t| >= {tmin} on this grid")));
    }
    let dim = grid.dim();
    let root = Complex64::new(0.0, 4.0 * PI * t).sqrt();
    let amp = if dim == 1 { root } else { root * root }.inv();
    GridFunction::from_fn(*grid, |x| {
        let r2 = x[0] * x[0] + if dim == 2 { x[1] * x[1] } else { 0.0 };
        amp * Complex64::from_polar(1.0, r2 / (4.0 * t))
    })
}

/// `(c/(c + 4 pi i t))^{d/2} e^{-pi |x|^2 / (c + 4 pi i t)}` on `grid`.
pub fn evolved_gaussian_closed_form(c: Complex64, t: f64, grid: &Grid) -> Result<GridFunction> {
    sample(&AnalyticFunction::EvolvedGaussian { c, t }, grid)
}

/// Share of `|f|^2` mass in the outer sixteenth of the torus on either side of
/// any axis, where periodic images start to interact.
pub fn boundary_mass_fraction(f: &GridFunction) -> f64 {
    let grid = f.grid();
    let edge = 7.0 * grid.extent() / 16.0;
    let dim = grid.dim();
    let mut outer = Vec::new();
    let mut all = Vec::with_capacity(grid.len());
    for (flat, v) in f.values().iter().enumerate() {
        let x = grid.node(flat);
        let m = v.norm_sqr();
        all.push(m);
        if (0..dim).any(|a| x[a].abs() > edge) {
            outer.push(m);
        }
    }
    let total = pairwise_sum(&all);
    if total == 0.0 {
        0.0
    } else {
        pairwise_sum(&outer) / total
    }
}

/// Potential `V(t, x)` with the exponents `(alpha, p)` of a claimed class
/// `L^alpha_t L^p_x`.
#[derive(Clone)]
pub struct PotentialSpec {
    pub name: String,
    pub alpha: f64,
    pub p: f64,
    evaluator: Arc<dyn Fn(f64, [f64; 2]) -> f64 + Send + Sync>,
}

impl fmt::Debug for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialSpec").field("name", &self.name).field("alpha", &self.alpha).field("p", &self.p).finish()
    }
}

impl PotentialSpec {
    pub fn new(
        name: impl Into<String>,
        alpha: f64,
        p: f64,
        evaluator: impl Fn(f64, [f64; 2]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        PotentialSpec { name: name.into(), alpha, p, evaluator: Arc::new(evaluator) }
    }

    pub fn zero() -> Self {
        Self::new("zero", f64::INFINITY, f64::INFINITY, |_, _| 0.0)
    }

    /// `cos(t) e^{-|x|^2}`, bounded in time and Schwartz in space.
    pub fn cos_gaussian() -> Self {
        Self::new("cos(t) exp(-|x|^2)", f64::INFINITY, f64::INFINITY, |t, x| t.cos() * (-(x[0] * x[0] + x[1] * x[1])).exp())
    }

    pub fn eval(&self, t: f64, x: [f64; 2]) -> f64 {
        (self.evaluator)(t, x)
    }

    /// `1/alpha + d/p <= 1` with `d < p`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        let d = dim as f64;
        let ok = self.alpha >= 1.0 && self.p > d && 1.0 / self.alpha + d / self.p <= 1.0 + 1e-12;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!(
                "potential class (alpha, p) = ({}, {}) needs 1/alpha + d/p <= 1 and p > d",
                self.alpha, self.p
            )))
        }
    }

    fn phase(&self, grid: &Grid, t: f64, tau: f64) -> Result<Vec<Complex64>> {
        let dim = grid.dim();
        (0..grid.len())
            .map(|flat| {
                let mut x = grid.node(flat);
                if dim == 1 {
                    x[1] = 0.0;
                }
                let v = self.eval(t, x);
                if v.is_finite() {
                    Ok(Complex64::from_polar(1.0, -v * tau))
                } else {
                    Err(Error::NonFinite(format!("potential {} at t = {t}, x = {x:?}", self.name)))
                }
            })
            .collect()
    }
}

/// States `u(t_k)` at increasing times.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<GridFunction>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<GridFunction>) -> Result<Self> {
        if times.len() != states.len() || times.is_empty() {
            return Err(Error::InvalidInput(format!("{} times for {} states", times.len(), states.len())));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("trajectory times must increase".into()));
        }
        let grid = *states[0].grid();
        for s in &states {
            grid.check_same(s.grid())?;
        }
        Ok(Trajectory { times, states })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[GridFunction] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max_k | ||u(t_k)||_2 / ||u(t_0)||_2 - 1 |`.
    pub fn l2_drift(&self) -> f64 {
        let base = self.states[0].lp_norm(2.0);
        self.states.iter().map(|s| (s.lp_norm(2.0) / base - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Space amalgam norm of every state.
    pub fn space_norms(&self, spec: &AmalgamSpec) -> Result<Vec<f64>> {
        let plan = AmalgamPlan::new(self.states[0].grid(), spec)?;
        self.states.iter().map(|s| plan.norm(s)).collect()
    }
}

/// Strang splitting for `i u_t + Δu = V u` on `[0, T]` with step `dt`.
///
/// One step is `e^{-i V(t_n) dt/2}`, the free flow over `dt`, then
/// `e^{-i V(t_{n+1}) dt/2}`.
pub fn split_step_solve(u0: &GridFunction, v: &PotentialSpec, t_final: f64, dt: f64) -> Result<Trajectory> {
    if !(dt > 0.0 && t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidInput(format!("need dt > 0 and finite T >= 0, got dt = {dt}, T = {t_final}")));
    }
    let steps = (t_final / dt).round() as usize;
    if ((steps as f64) * dt - t_final).abs() > 1e-9 * t_final.max(dt) {
        return Err(Error::InvalidInput(format!("T = {t_final} is not a whole number of steps {dt}")));
    }
    let grid = *u0.grid();
    let free = free_multiplier(&grid, dt);
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(u0.clone());
    let mut u = u0.values().to_vec();
    let mut half = v.phase(&grid, 0.0, 0.5 * dt)?;
    for k in 0..steps {
        let t_next = (k + 1) as f64 * dt;
        for (x, p) in u.iter_mut().zip(&half) {
            *x *= p;
        }
        apply_multiplier(&mut u, &grid, &free);
        half = v.phase(&grid, t_next, 0.5 * dt)?;
        for (x, p) in u.iter_mut().zip(&half) {
            *x *= p;
        }
        times.push(t_next);
        states.push(GridFunction::new(grid, u.clone())?);
    }
    Trajectory::new(times, states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::periodic_convolve;
    use crate::grid::make_grid;

    fn gauss(grid: Grid, c: f64) -> GridFunction {
        sample(&AnalyticFunction::gaussian(c), &grid).unwrap()
    }

    #[test]
    fn time_zero_is_identity() {
        let g = make_grid(1, 16.0, 128).unwrap();
        let u = gauss(g, 1.0);
        assert_eq!(propagate(&u, 0.0), u);
    }

    #[test]
    fn closed_form_matches_flow() {
        let g = make_grid(1, 64.0, 1024).unwrap();
        let u = propagate(&gauss(g, 1.0), 1.0);
        let e = evolved_gaussian_closed_form(Complex64::new(1.0, 0.0), 1.0, &g).unwrap();
        assert!(u.rel_l2_error(&e) < 1e-6);
    }

    #[test]
    fn kernel_modulus_and_chirp_identity() {
        let g = make_grid(1, 16.0, 4096).unwrap();
        let t = 0.05;
        let k = kernel(t, &g).unwrap();
        let c = sample(&AnalyticFunction::Chirp { a: 4.0 * PI * t }, &g).unwrap();
        let m = (4.0 * PI * t).powf(-0.5);
        for (a, b) in k.values().iter().zip(c.values()) {
            assert!((a.norm() - m).abs() < 1e-12);
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn kernel_aliasing_rejected() {
        let g = make_grid(1, 16.0, 256).unwrap();
        assert!(matches!(kernel(0.01, &g), Err(Error::Aliasing(_))));
        assert!(kernel(0.0, &g).is_err());
    }

    #[test]
    fn kernel_convolution_matches_multiplier() {
        // |K_t| is constant, so the truncated kernel misreads displacements
        // past L/2; compare where x - supp(u0) stays inside (-L/2, L/2).
        let g = make_grid(1, 64.0, 4096).unwrap();
        let u0 = gauss(g, 1.0);
        let t = 0.5;
        let direct = propagate(&u0, t);
        let conv = periodic_convolve(&kernel(t, &g).unwrap(), &u0).unwrap();
        assert!(boundary_mass_fraction(&direct) < 1e-6);
        let (mut num, mut den) = (0.0, 0.0);
        for (j, (a, b)) in conv.values().iter().zip(direct.values()).enumerate() {
            if g.node(j)[0].abs() < 16.0 {
                num += (a - b).norm_sqr();
                den += b.norm_sqr();
            }
        }
        assert!((num / den).sqrt() < 1e-6, "{}", (num / den).sqrt());
    }

    #[test]
    fn zero_potential_reduces_to_free_flow() {
        let g = make_grid(1, 32.0, 256).unwrap();
        let u0 = gauss(g, 0.7);
        let tr = split_step_solve(&u0, &PotentialSpec::zero(), 1.0, 0.125).unwrap();
        for (t, s) in tr.times().iter().zip(tr.states()) {
            assert!(s.rel_l2_error(&propagate(&u0, *t)) < 1e-12);
        }
    }

    #[test]
    fn potential_class_validation() {
        assert!(PotentialSpec::cos_gaussian().validate(2).is_ok());
        assert!(PotentialSpec::new("bad", 2.0, 1.5, |_, _| 0.0).validate(1).is_err());
        assert!(PotentialSpec::new("ok", 4.0, 2.0, |_, _| 0.0).validate(1).is_ok());
    }

    #[test]
    fn nan_potential_rejected() {
        let g = make_grid(1, 8.0, 64).unwrap();
        let v = PotentialSpec::new("nan", f64::INFINITY, f64::INFINITY, |_, _| f64::NAN);
        assert!(matches!(split_step_solve(&gauss(g, 1.0), &v, 1.0, 0.5), Err(Error::NonFinite(_))));
    }

    #[test]
    fn uneven_step_rejected() {
        let g = make_grid(1, 8.0, 64).unwrap();
        assert!(split_step_solve(&gauss(g, 1.0), &PotentialSpec::zero(), 1.0, 0.3).is_err());
    }
}
