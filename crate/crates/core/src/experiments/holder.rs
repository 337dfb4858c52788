//! Hölder pairing between dual space-time amalgam norms, and the pointwise
//! control `sup |f| <= ||f||_{W(FL^1, L^inf)}`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::amalgam::{
    amalgam_norm, mixed_time_norm, AmalgamPlan, AmalgamSpec, GlobalNormSpec, LocalNormSpec, TimeSeries, WindowSpec,
};
use crate::error::{Error, Result};
use crate::grid::{inner_product, make_grid, Grid, GridFunction};
use crate::numeric::conjugate_exponent;
use crate::par;

use super::chirp::GridParams;
use super::corpus::{band_limited, gaussian_corpus, random_band_limited, Sample};
use super::report::{Check, Comparison, ExperimentReport, Provenance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderParams {
    pub n_samples: usize,
    pub seed: u64,
    /// Local time exponent of `F`.
    pub s: f64,
    /// Global time exponent of `F`.
    pub q: f64,
    /// Space exponent: `F` is measured in `W(FL^{r'}, L^r)`.
    pub r: f64,
    /// Space-time grid, axis 0 is time.
    pub grid: GridParams,
}

impl HolderParams {
    pub fn standard() -> Self {
        HolderParams { n_samples: 100, seed: 7, s: 2.0, q: 4.0, r: 8.0 / 3.0, grid: GridParams::new(16.0, 64) }
    }
}

/// A space-time function stored as one state per time sample.
#[derive(Debug, Clone)]
pub struct SpaceTime {
    pub start: f64,
    pub dt: f64,
    pub states: Vec<GridFunction>,
}

impl SpaceTime {
    /// Splits a 2-d grid function into 1-d states along axis 0.
    pub fn from_plane(f: &GridFunction) -> Result<Self> {
        let g = f.grid();
        if g.dim() != 2 {
            return Err(Error::InvalidInput("space-time data must live on a 2-d grid".into()));
        }
        let n = g.points_per_dim();
        let line = make_grid(1, g.extent(), n)?;
        let line = if g.is_half_offset() { line.with_half_offset() } else { line };
        let states = f.values().chunks(n).map(|row| GridFunction::new(line, row.to_vec())).collect::<Result<Vec<_>>>()?;
        Ok(SpaceTime { start: g.axis_coord(0), dt: g.spacing(), states })
    }
}

/// `|| ||F(t)||_{space} ||_{W(L^{q1}, L^{q2})_t}` with a unit-`L^2` time window.
pub fn space_time_norm(f: &SpaceTime, space: &AmalgamSpec, q1: f64, q2: f64) -> Result<f64> {
    let grid = *f.states[0].grid();
    let plan = AmalgamPlan::new(&grid, space)?;
    let values = par::map(&f.states, |u| plan.norm(u)).into_iter().collect::<Result<Vec<f64>>>()?;
    let series = TimeSeries::new(f.start, f.dt, values);
    Ok(mixed_time_norm(&series, q1, q2, &WindowSpec::gaussian_l2(), None)?.value)
}

struct DualNorms {
    space: AmalgamSpec,
    dual_space: AmalgamSpec,
    s: f64,
    q: f64,
}

impl DualNorms {
    fn new(line: &Grid, p: &HolderParams) -> Self {
        let w = WindowSpec::gaussian_l2();
        let rc = conjugate_exponent(p.r);
        DualNorms {
            space: AmalgamSpec::new(line, w, LocalNormSpec::fourier_lp(rc), GlobalNormSpec::lp(p.r)),
            dual_space: AmalgamSpec::new(line, w, LocalNormSpec::fourier_lp(p.r), GlobalNormSpec::lp(rc)),
            s: p.s,
            q: p.q,
        }
    }

    fn norm(&self, f: &SpaceTime) -> Result<f64> {
        space_time_norm(f, &self.space, self.s, self.q)
    }

    fn dual_norm(&self, g: &SpaceTime) -> Result<f64> {
        space_time_norm(g, &self.dual_space, conjugate_exponent(self.s), conjugate_exponent(self.q))
    }

    /// `|<F, G>| / (||F|| ||G||_*)`, zero when `G = 0`.
    fn ratio(&self, f: &GridFunction, g: &GridFunction) -> Result<f64> {
        let pairing = inner_product(f, g)?.norm();
        if pairing == 0.0 {
            return Ok(0.0);
        }
        let nf = self.norm(&SpaceTime::from_plane(f)?)?;
        let ng = self.dual_norm(&SpaceTime::from_plane(g)?)?;
        Ok(pairing / (nf * ng))
    }
}

pub fn holder_duality_experiment(params: &HolderParams) -> Result<ExperimentReport> {
    if params.n_samples == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    if !(params.s >= 1.0 && params.q >= 1.0 && params.r >= 1.0) {
        return Err(Error::InvalidSpec(format!("exponents must be >= 1, got ({}, {}, {})", params.s, params.q, params.r)));
    }
    let plane = params.grid.build(2)?;
    let line = make_grid(1, plane.extent(), plane.points_per_dim())?;
    let norms = DualNorms::new(&line, params);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let pairs = (0..params.n_samples)
        .map(|_| Ok((band_limited(&plane, &mut rng)?, band_limited(&plane, &mut rng)?)))
        .collect::<Result<Vec<_>>>()?;
    let ratios = pairs.iter().map(|(f, g)| norms.ratio(f, g)).collect::<Result<Vec<f64>>>()?;
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    let self_ratio = norms.ratio(&pairs[0].0, &pairs[0].0)?;
    let zero = norms.ratio(&pairs[0].0, &GridFunction::zeros(plane))?;

    let mut report = ExperimentReport::new("holder", params);
    report.check(Check::new("max_pair_ratio", worst, 1.05, Provenance::Derived, 0.0, Comparison::AtMost));
    report.check(Check::new("self_pair_ratio", self_ratio, 1.05, Provenance::Derived, 0.0, Comparison::AtMost));
    report.check(Check::new("zero_pair_ratio", zero, 0.0, Provenance::Trivial, 0.0, Comparison::Absolute));
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    report.observe("mean_pair_ratio", mean, "average over the random pairs");
    Ok(report)
}

/// `max |f| / ||f||_{W(FL^1, L^inf)}` with the peak-one window.
pub fn pointwise_ratio(f: &GridFunction) -> Result<f64> {
    let spec = AmalgamSpec::fl1_linf(f.grid());
    let n = amalgam_norm(f, &spec)?;
    Ok(if n == 0.0 { 0.0 } else { f.max_abs() / n })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingParams {
    pub seed: u64,
    pub random_count: usize,
    pub grid_1d: GridParams,
    pub grid_2d: GridParams,
}

impl Default for EmbeddingParams {
    fn default() -> Self {
        EmbeddingParams { seed: 11, random_count: 8, grid_1d: GridParams::new(32.0, 1024), grid_2d: GridParams::new(8.0, 64) }
    }
}

pub fn pointwise_embedding_experiment(params: &EmbeddingParams) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("pointwise-embedding", params);
    for (dim, gp) in [(1, params.grid_1d), (2, params.grid_2d)] {
        let grid = gp.build(dim)?;
        let mut corpus: Vec<Sample> = gaussian_corpus(&grid)?;
        corpus.extend(random_band_limited(&grid, params.seed, params.random_count)?);
        let ratios = par::map(&corpus, |s| pointwise_ratio(&s.f)).into_iter().collect::<Result<Vec<f64>>>()?;
        let worst = ratios.iter().copied().fold(0.0, f64::max);
        report.check(Check::new(format!("sup_over_norm[d={dim}]"), worst, 1.02, Provenance::Paper, 0.0, Comparison::AtMost));
    }
    Ok(report)
}
