//! Partition-of-unity identities and the comparison between the lattice-sum
//! and sliding-window amalgam norms.

use serde::{Deserialize, Serialize};

use crate::amalgam::{
    amalgam_norm, analysis_s, build_bupu, bupu_amalgam_norm, synthesis_r, AmalgamSpec, Bupu, GlobalNormSpec,
    LocalNormSpec, WindowSpec,
};
use crate::error::Result;
use crate::par;

use super::chirp::GridParams;
use super::corpus::gaussian_corpus;
use super::report::{Check, Comparison, ExperimentReport, Provenance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BupuParams {
    pub spacing: f64,
    /// Global exponent of both norms.
    pub p: f64,
    pub grid_1d: GridParams,
    pub grid_2d: GridParams,
}

impl Default for BupuParams {
    fn default() -> Self {
        BupuParams { spacing: 1.0, p: 2.0, grid_1d: GridParams::new(32.0, 1024), grid_2d: GridParams::new(8.0, 64) }
    }
}

/// `max_x |sum_alpha phi_alpha(x) - 1|`.
pub fn partition_defect(b: &Bupu) -> f64 {
    (0..b.grid().len())
        .map(|j| (b.phis().iter().map(|p| p.values()[j].re).sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max)
}

/// `max_x phi_alpha(x)` outside `[0, 1]`, as a distance.
fn range_defect(b: &Bupu) -> f64 {
    b.phis()
        .iter()
        .flat_map(|p| p.values().iter().map(|v| (-v.re).max(v.re - 1.0).max(v.im.abs()).max(0.0)))
        .fold(0.0, f64::max)
}

pub fn bupu_check_experiment(params: &BupuParams) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("bupu-check", params);
    for (dim, gp) in [(1usize, params.grid_1d), (2, params.grid_2d)] {
        let grid = gp.build(dim)?;
        let b = build_bupu(&grid, params.spacing)?;
        let id = |what: &str| format!("{what}[d={dim}]");
        report.check(Check::new(id("partition_sum"), partition_defect(&b), 0.0, Provenance::Paper, 1e-12, Comparison::Absolute));
        report.check(Check::new(id("partition_range"), range_defect(&b), 0.0, Provenance::Trivial, 0.0, Comparison::Absolute));

        let corpus = gaussian_corpus(&grid)?;
        let rs = corpus
            .iter()
            .map(|s| Ok(synthesis_r(&analysis_s(&s.f, &b)?, &b)?.sub(&s.f)?.max_abs() / s.f.max_abs()))
            .collect::<Result<Vec<f64>>>()?;
        let worst = rs.iter().copied().fold(0.0, f64::max);
        report.check(Check::new(id("rs_identity"), worst, 0.0, Provenance::Paper, 1e-12, Comparison::Absolute));

        // Supports of psi cover 8 spacings per axis, those of phi 4, so a phi
        // meets min(11, K) translates of psi and a point lies in 8 of them.
        let counts = b.overlap_counts();
        let k = b.per_axis();
        let member = 11usize.min(k).pow(dim as u32) as f64;
        let node = 8usize.pow(dim as u32) as f64;
        report.check(Check::new(id("overlap_per_member"), counts.per_member as f64, member, Provenance::Derived, 0.0, Comparison::Absolute));
        report.check(Check::new(id("overlap_per_node"), counts.per_node as f64, node, Provenance::Derived, 0.0, Comparison::Absolute));
        report.observe(id("overlap_claimed"), 5f64.powi(dim as i32), "5^d overlap bound stated for the partition");

        let local = LocalNormSpec::fourier_lp(1.0);
        let sliding = AmalgamSpec::new(&grid, WindowSpec::gaussian_unit(), local, GlobalNormSpec::lp(params.p));
        let ratios = par::map(&corpus, |s| -> Result<f64> {
            Ok(bupu_amalgam_norm(&s.f, &local, params.p, &b)? / amalgam_norm(&s.f, &sliding)?)
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        report.check(Check::new(id("norm_ratio_max"), hi, 4.0, Provenance::Derived, 0.0, Comparison::AtMost));
        report.check(Check::new(id("norm_ratio_min"), lo, 0.25, Provenance::Derived, 0.0, Comparison::AtLeast));
    }
    Ok(report)
}
