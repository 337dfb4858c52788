use std::path::{Path, PathBuf};
use std::str::FromStr;

use amalgam::experiments::{
    AdmissiblePair, BupuParams, ChirpNormParams, DispersiveParams, EmbeddingParams, EvolvedData, FixedTimeParams, GridParams,
    HolderParams, PotentialKind, PotentialParams, StrichartzParams, TailParams,
};
use clap::Args;
use serde::{Deserialize, Serialize};

use crate::run::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    ChirpNorm,
    Dispersive,
    FixedTime,
    PhiAlphaTail,
    Strichartz,
    Holder,
    BupuCheck,
    Potential,
}

const COMMON_KEYS: &[&str] = &["experiment", "out"];

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::ChirpNorm,
        Experiment::Dispersive,
        Experiment::FixedTime,
        Experiment::PhiAlphaTail,
        Experiment::Strichartz,
        Experiment::Holder,
        Experiment::BupuCheck,
        Experiment::Potential,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::ChirpNorm => "chirp-norm",
            Experiment::Dispersive => "dispersive",
            Experiment::FixedTime => "fixed-time",
            Experiment::PhiAlphaTail => "phi-alpha-tail",
            Experiment::Strichartz => "strichartz",
            Experiment::Holder => "holder",
            Experiment::BupuCheck => "bupu-check",
            Experiment::Potential => "potential",
        }
    }

    pub fn anchor(&self) -> &'static str {
        match self {
            Experiment::ChirpNorm => "Eq. chirpnorm",
            Experiment::Dispersive => "Eq. dispersive",
            Experiment::FixedTime => "Eq. est2",
            Experiment::PhiAlphaTail => "Lemma 4.1",
            Experiment::Strichartz => "Theorems 1.1/1.2",
            Experiment::Holder => "Eq. holder",
            Experiment::BupuCheck => "Prop. inter2",
            Experiment::Potential => "Section 6",
        }
    }

    /// Config keys the experiment reads, besides `experiment` and `out`.
    pub fn keys(&self) -> &'static [&'static str] {
        match self {
            Experiment::ChirpNorm => &["dim", "extent", "points_per_dim", "a", "tol"],
            Experiment::Dispersive => &["dim", "extent", "points_per_dim", "small_t", "large_t", "fit_points", "data"],
            Experiment::FixedTime => &["dim", "extent", "points_per_dim", "r", "t_range", "fit_points", "data"],
            Experiment::PhiAlphaTail => &["points_per_dim", "alpha", "x"],
            Experiment::Strichartz => &[
                "dim", "extent", "points_per_dim", "q", "r", "t_max", "dt", "family", "space_tol", "endpoint", "anchor", "exploratory",
            ],
            Experiment::Holder => &["extent", "points_per_dim", "seed", "samples", "s", "q", "r"],
            Experiment::BupuCheck => &["spacing", "p"],
            Experiment::Potential => &["dim", "extent", "points_per_dim", "potential", "c", "t_max", "dt", "q", "r"],
        }
    }
}

/// A closed interval written `lo:hi` on the command line and `[lo, hi]` in a file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Span(pub f64, pub f64);

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
        let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
        Ok(Span(parse(lo)?, parse(hi)?))
    }
}

/// Every option of every experiment. Flags and config-file keys share these
/// names; a key the chosen experiment does not read is an error.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// TOML file with the same keys as the flags; flags take precedence
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Experiment named in a config file; must match the subcommand
    #[arg(skip)]
    pub experiment: Option<String>,
    /// Directory for report.json and report.csv
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Spatial dimension (1 or 2)
    #[arg(long)]
    pub dim: Option<usize>,
    /// Torus side length L
    #[arg(long)]
    pub extent: Option<f64>,
    /// Grid points per axis
    #[arg(long = "n", value_name = "N")]
    #[serde(alias = "n")]
    pub points_per_dim: Option<usize>,
    /// Random seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Chirp parameters, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(alias = "a_values")]
    pub a: Option<Vec<f64>>,
    /// Relative tolerance of the chirp-norm check
    #[arg(long)]
    pub tol: Option<f64>,
    /// Small-time fit window lo:hi
    #[arg(long)]
    pub small_t: Option<Span>,
    /// Large-time fit window lo:hi
    #[arg(long)]
    pub large_t: Option<Span>,
    /// Fit window lo:hi of the fixed-time family
    #[arg(long)]
    pub t_range: Option<Span>,
    /// Log-spaced times per fit window
    #[arg(long)]
    pub fit_points: Option<usize>,
    /// Large-time data: propagate or closed-form
    #[arg(long)]
    pub data: Option<String>,
    /// Space exponent(s) r
    #[arg(long, value_delimiter = ',')]
    pub r: Option<Vec<f64>>,
    /// Time exponent q
    #[arg(long)]
    pub q: Option<f64>,
    /// Tail exponents, comma separated
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    /// Tail sample positions, comma separated
    #[arg(long, value_delimiter = ',')]
    pub x: Option<Vec<f64>>,
    /// Time horizon T
    #[arg(long = "T", value_name = "T")]
    #[serde(alias = "T")]
    pub t_max: Option<f64>,
    /// Time step
    #[arg(long)]
    pub dt: Option<f64>,
    /// Gaussian widths c of the data family, comma separated
    #[arg(long, value_delimiter = ',')]
    pub family: Option<Vec<f64>>,
    /// Truncation level of the space window
    #[arg(long)]
    pub space_tol: Option<f64>,
    /// Use the endpoint pair (4, 4) in d = 2
    #[arg(long)]
    #[serde(default)]
    pub endpoint: bool,
    /// Use the (inf, 2) pair, whose norm is the L2 mass
    #[arg(long)]
    #[serde(default)]
    pub anchor: bool,
    /// Allow 2 <= q < 4; values are reported, nothing is asserted
    #[arg(long)]
    #[serde(default)]
    pub exploratory: bool,
    /// Number of random pairs
    #[arg(long)]
    pub samples: Option<usize>,
    /// Local time exponent of the Hölder test function
    #[arg(long)]
    pub s: Option<f64>,
    /// Partition spacing
    #[arg(long)]
    pub spacing: Option<f64>,
    /// Global exponent of the partition norms
    #[arg(long)]
    pub p: Option<f64>,
    /// Potential: zero or cos-gaussian
    #[arg(long)]
    pub potential: Option<String>,
    /// Width c of the initial Gaussian
    #[arg(long)]
    pub c: Option<f64>,
}

/// Validated parameters of one run.
#[derive(Debug, Clone)]
pub enum Plan {
    ChirpNorm(ChirpNormParams),
    Dispersive(DispersiveParams),
    FixedTime(FixedTimeParams),
    PhiAlphaTail(Vec<TailParams>),
    Strichartz(StrichartzParams),
    Holder(HolderParams, EmbeddingParams),
    BupuCheck(BupuParams),
    Potential(PotentialParams),
}

fn config_err(msg: impl Into<String>) -> RunError {
    RunError::Config(msg.into())
}

impl RunConfig {
    /// Reads `self.config` (if any) and overlays the flags on it.
    pub fn resolve(self, exp: Experiment) -> Result<RunConfig, RunError> {
        let merged = match &self.config {
            None => self,
            Some(path) => overlay(load_file(path)?, self)?,
        };
        if let Some(name) = &merged.experiment {
            if name != exp.name() {
                return Err(config_err(format!("config file is for `{name}`, not `{}`", exp.name())));
            }
        }
        merged.check_keys(exp)?;
        Ok(merged)
    }

    /// Names of the keys that are set.
    pub fn given_keys(&self) -> Vec<String> {
        match serde_json::to_value(self) {
            Ok(serde_json::Value::Object(map)) => map
                .into_iter()
                .filter(|(_, v)| !(v.is_null() || *v == serde_json::Value::Bool(false)))
                .map(|(k, _)| k)
                .collect(),
            _ => Vec::new(),
        }
    }

    fn check_keys(&self, exp: Experiment) -> Result<(), RunError> {
        let stray: Vec<String> =
            self.given_keys().into_iter().filter(|k| !COMMON_KEYS.contains(&k.as_str()) && !exp.keys().contains(&k.as_str())).collect();
        if stray.is_empty() {
            Ok(())
        } else {
            Err(config_err(format!("{} does not take: {}", exp.name(), stray.join(", "))))
        }
    }

    fn grid(&self, base: GridParams) -> Result<GridParams, RunError> {
        let g = GridParams::new(self.extent.unwrap_or(base.extent), self.points_per_dim.unwrap_or(base.points_per_dim));
        if !(g.extent > 0.0 && g.extent.is_finite()) {
            return Err(config_err(format!("extent must be positive, got {}", g.extent)));
        }
        if !g.points_per_dim.is_power_of_two() || g.points_per_dim < 2 {
            return Err(config_err(format!("points per axis must be a power of two >= 2, got {}", g.points_per_dim)));
        }
        Ok(g)
    }

    fn dim(&self, default: usize) -> Result<usize, RunError> {
        match self.dim.unwrap_or(default) {
            d @ (1 | 2) => Ok(d),
            d => Err(config_err(format!("dimension must be 1 or 2, got {d}"))),
        }
    }

    fn single_r(&self) -> Result<Option<f64>, RunError> {
        match self.r.as_deref() {
            None => Ok(None),
            Some([r]) => Ok(Some(*r)),
            Some(rs) => Err(config_err(format!("expected one value of r, got {}", rs.len()))),
        }
    }

    fn data(&self, default: EvolvedData) -> Result<EvolvedData, RunError> {
        match self.data.as_deref() {
            None => Ok(default),
            Some("propagate") => Ok(EvolvedData::Propagate),
            Some("closed-form" | "closed_form") => Ok(EvolvedData::ClosedForm),
            Some(other) => Err(config_err(format!("data must be propagate or closed-form, got `{other}`"))),
        }
    }

    /// The admissible pair from `q` and/or `r`, completing the missing one.
    fn pair(&self, dim: usize, default: (f64, f64), exploratory: bool) -> Result<(f64, f64), RunError> {
        let d = dim as f64;
        let (q, r) = match (self.q, self.single_r()?) {
            (None, None) => default,
            (Some(q), Some(r)) => (q, r),
            (Some(q), None) => {
                let inv_r = (d / 2.0 - 2.0 / q) / d;
                (q, if inv_r == 0.0 { f64::INFINITY } else { 1.0 / inv_r })
            }
            (None, Some(r)) => {
                let half_inv_q = (d / 2.0 - d / r) / 2.0;
                (if half_inv_q == 0.0 { f64::INFINITY } else { 1.0 / half_inv_q }, r)
            }
        };
        let checked = if exploratory { AdmissiblePair::exploratory(q, r, dim) } else { AdmissiblePair::new(q, r, dim) };
        checked.map_err(|e| config_err(e.to_string()))?;
        Ok((q, r))
    }

    pub fn plan(&self, exp: Experiment) -> Result<Plan, RunError> {
        for (key, v) in [("tol", self.tol), ("dt", self.dt), ("t_max", self.t_max), ("space_tol", self.space_tol), ("c", self.c)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(config_err(format!("{key} must be positive, got {v}")));
                }
            }
        }
        Ok(match exp {
            Experiment::ChirpNorm => {
                let base = ChirpNormParams::standard(self.dim(1)?);
                let a_values = self.a.clone().unwrap_or(base.a_values);
                if a_values.is_empty() || a_values.iter().any(|a| *a == 0.0 || !a.is_finite()) {
                    return Err(config_err("chirp parameters must be finite and nonzero"));
                }
                Plan::ChirpNorm(ChirpNormParams { dim: base.dim, a_values, grid: self.grid(base.grid)?, tol: self.tol.unwrap_or(base.tol) })
            }
            Experiment::Dispersive => {
                let base = DispersiveParams::standard(self.dim(1)?);
                Plan::Dispersive(DispersiveParams {
                    small_t: self.small_t.map(|s| (s.0, s.1)).or(base.small_t),
                    large_t: self.large_t.map(|s| (s.0, s.1)).unwrap_or(base.large_t),
                    n_points: fit_points(self.fit_points, base.n_points)?,
                    large_grid: self.grid(base.large_grid)?,
                    data: self.data(base.data)?,
                    ..base
                })
            }
            Experiment::FixedTime => {
                let base = FixedTimeParams::default();
                Plan::FixedTime(FixedTimeParams {
                    dim: self.dim(base.dim)?,
                    r_values: self.r.clone().unwrap_or(base.r_values),
                    t_range: self.t_range.map(|s| (s.0, s.1)).unwrap_or(base.t_range),
                    n_points: fit_points(self.fit_points, base.n_points)?,
                    grid: self.grid(base.grid)?,
                    data: self.data(base.data)?,
                })
            }
            Experiment::PhiAlphaTail => {
                let alphas = self.alpha.clone().unwrap_or_else(|| vec![0.25, 0.4]);
                if alphas.is_empty() {
                    return Err(config_err("alpha list is empty"));
                }
                let mut runs = Vec::new();
                for alpha in alphas {
                    if !(alpha > 0.0 && alpha < 0.5) {
                        return Err(config_err(format!("alpha must lie in (0, 1/2), got {alpha}")));
                    }
                    let base = TailParams::standard(alpha);
                    let points = self.points_per_dim.unwrap_or(base.points);
                    if !points.is_power_of_two() {
                        return Err(config_err(format!("points per interval must be a power of two, got {points}")));
                    }
                    runs.push(TailParams { alpha, x_values: self.x.clone().unwrap_or(base.x_values), points });
                }
                Plan::PhiAlphaTail(runs)
            }
            Experiment::Strichartz => Plan::Strichartz(self.strichartz()?),
            Experiment::Holder => {
                let base = HolderParams::standard();
                let (q, r) = (self.q.unwrap_or(base.q), self.single_r()?.unwrap_or(base.r));
                let s = self.s.unwrap_or(base.s);
                for (key, v) in [("q", q), ("r", r), ("s", s)] {
                    if !(v >= 1.0) {
                        return Err(config_err(format!("{key} must be >= 1, got {v}")));
                    }
                }
                let params = HolderParams {
                    n_samples: self.samples.unwrap_or(base.n_samples),
                    seed: self.seed.unwrap_or(base.seed),
                    s,
                    q,
                    r,
                    grid: self.grid(base.grid)?,
                };
                Plan::Holder(params, EmbeddingParams::default())
            }
            Experiment::BupuCheck => {
                let base = BupuParams::default();
                let params = BupuParams { spacing: self.spacing.unwrap_or(base.spacing), p: self.p.unwrap_or(base.p), ..base };
                if !(params.spacing > 0.0 && params.spacing.is_finite()) || !(params.p >= 1.0) {
                    return Err(config_err("spacing must be positive and p >= 1"));
                }
                Plan::BupuCheck(params)
            }
            Experiment::Potential => {
                let base = PotentialParams::standard();
                let dim = self.dim(base.dim)?;
                let potential = match self.potential.as_deref() {
                    None => base.potential,
                    Some("zero") => PotentialKind::Zero,
                    Some("cos-gaussian" | "cos_gaussian") => PotentialKind::CosGaussian,
                    Some(other) => return Err(config_err(format!("potential must be zero or cos-gaussian, got `{other}`"))),
                };
                let (q, r) = self.pair(dim, (base.q, base.r), false)?;
                Plan::Potential(PotentialParams {
                    dim,
                    potential,
                    c: self.c.unwrap_or(base.c),
                    t_final: self.t_max.unwrap_or(base.t_final),
                    dt: self.dt.unwrap_or(base.dt),
                    q,
                    r,
                    grid: self.grid(base.grid)?,
                })
            }
        })
    }

    fn strichartz(&self) -> Result<StrichartzParams, RunError> {
        if self.endpoint && self.anchor {
            return Err(config_err("endpoint and anchor exclude each other"));
        }
        let dim = self.dim(if self.endpoint { 2 } else { 1 })?;
        if self.endpoint && dim != 2 {
            return Err(config_err("the endpoint pair exists only for d = 2"));
        }
        let base = if self.anchor {
            StrichartzParams::anchor(dim)
        } else if dim == 2 {
            StrichartzParams::endpoint_2d()
        } else {
            StrichartzParams::standard_1d()
        };
        let (q, r) = self.pair(dim, (base.q, base.r), self.exploratory)?;
        if self.endpoint && (q, r) != (4.0, 4.0) {
            return Err(config_err(format!("the endpoint pair is (4, 4), got ({q}, {r})")));
        }
        let family = self.family.clone().unwrap_or(base.family);
        if family.is_empty() || family.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
            return Err(config_err("family widths must be positive"));
        }
        Ok(StrichartzParams {
            dim,
            q,
            r,
            family,
            t_max: self.t_max.unwrap_or(base.t_max),
            dt: self.dt.unwrap_or(base.dt),
            grid: self.grid(base.grid)?,
            space_tol: self.space_tol.unwrap_or(base.space_tol),
            exploratory: self.exploratory,
        })
    }
}

fn fit_points(given: Option<usize>, default: usize) -> Result<usize, RunError> {
    match given.unwrap_or(default) {
        n if n >= 2 => Ok(n),
        n => Err(config_err(format!("a fit needs at least 2 points, got {n}"))),
    }
}

fn load_file(path: &Path) -> Result<RunConfig, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

/// `flags` over `file`, key by key.
fn overlay(file: RunConfig, flags: RunConfig) -> Result<RunConfig, RunError> {
    let to_map = |c: &RunConfig| match serde_json::to_value(c) {
        Ok(serde_json::Value::Object(m)) => Ok(m),
        _ => Err(config_err("cannot merge configuration")),
    };
    let mut merged = to_map(&file)?;
    for (k, v) in to_map(&flags)? {
        if !(v.is_null() || v == serde_json::Value::Bool(false)) {
            merged.insert(k, v);
        }
    }
    serde_json::from_value(serde_json::Value::Object(merged)).map_err(|e| config_err(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn span_parses() {
        assert_eq!("0.02:0.2".parse::<Span>().unwrap(), Span(0.02, 0.2));
        assert!("0.02".parse::<Span>().is_err());
    }

    #[test]
    fn flags_override_file() {
        let file: RunConfig = toml::from_str("dim = 2\na = [1.0, 2.0]\nextent = 16.0").unwrap();
        let flags = RunConfig { a: Some(vec![4.0]), ..Default::default() };
        let m = overlay(file, flags).unwrap();
        assert_eq!(m.dim, Some(2));
        assert_eq!(m.a, Some(vec![4.0]));
        assert_eq!(m.extent, Some(16.0));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<RunConfig>("dimension = 2").is_err());
    }

    #[test]
    fn stray_keys_rejected() {
        let c = RunConfig { alpha: Some(vec![0.25]), ..Default::default() };
        assert!(c.check_keys(Experiment::ChirpNorm).is_err());
        assert!(c.check_keys(Experiment::PhiAlphaTail).is_ok());
    }

    #[test]
    fn pair_completion() {
        let c = RunConfig { q: Some(8.0), ..Default::default() };
        assert_eq!(c.pair(1, (0.0, 0.0), false).unwrap(), (8.0, 4.0));
        let c = RunConfig { r: Some(vec![4.0]), ..Default::default() };
        assert_eq!(c.pair(2, (0.0, 0.0), false).unwrap(), (4.0, 4.0));
        let c = RunConfig { q: Some(3.0), ..Default::default() };
        assert!(c.pair(2, (0.0, 0.0), false).is_err());
        assert!(c.pair(2, (0.0, 0.0), true).is_ok());
    }

    #[test]
    fn endpoint_defaults() {
        let c = RunConfig { endpoint: true, t_max: Some(16.0), ..Default::default() };
        let p = c.strichartz().unwrap();
        assert_eq!((p.dim, p.q, p.r, p.t_max), (2, 4.0, 4.0, 16.0));
        let c = RunConfig { endpoint: true, dim: Some(1), ..Default::default() };
        assert!(c.strichartz().is_err());
    }
}
