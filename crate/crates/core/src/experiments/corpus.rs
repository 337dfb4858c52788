//! Test functions shared by the experiments and the test suites.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::analytic::{sample, sample_shifted, AnalyticFunction};
use crate::error::Result;
use crate::fourier::inverse_fourier_transform;
use crate::grid::{Grid, GridFunction};

/// A named corpus member.
#[derive(Debug, Clone)]
pub struct Sample {
    pub name: String,
    pub f: GridFunction,
}

fn named(name: String, f: GridFunction) -> Sample {
    Sample { name, f }
}

/// Gaussians with real and complex widths, plus translates and modulations.
pub fn gaussian_corpus(grid: &Grid) -> Result<Vec<Sample>> {
    let widths = [
        Complex64::new(0.5, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(2.0, 0.0),
        Complex64::new(1.0, 1.0),
        Complex64::new(0.5, 0.5),
    ];
    let mut out = Vec::new();
    for c in widths {
        out.push(named(format!("gaussian(c={c})"), sample(&AnalyticFunction::Gaussian { c }, grid)?));
    }
    let g1 = AnalyticFunction::gaussian(1.0);
    out.push(named("gaussian(c=1) shifted by 1.5".into(), sample_shifted(&g1, grid, [-1.5, -1.5])?));
    let k = (grid.extent() / 2.0).round() as i64; // frequency 1/2
    let modulated = sample(&g1, grid)?.modulate(&[k, 0]);
    out.push(named("gaussian(c=1) modulated by 1/2".into(), modulated));
    Ok(out)
}

/// Complex standard normal coefficients on the central quarter of the
/// frequency grid (`|k| < N/8` on every axis), zero elsewhere.
pub fn band_limited(grid: &Grid, rng: &mut ChaCha8Rng) -> Result<GridFunction> {
    let dual = grid.dual();
    let n = grid.points_per_dim() as i64;
    let inside = |j: usize| ((j as i64) - n / 2).abs() < n / 8;
    let mut vals = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (flat, v) in vals.iter_mut().enumerate() {
        let [a, b] = dual.unflatten(flat);
        if inside(a) && (grid.dim() == 1 || inside(b)) {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            *v = Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2;
        }
    }
    inverse_fourier_transform(&GridFunction::new(dual, vals)?, grid)
}

/// `count` band-limited functions from a seeded ChaCha stream.
pub fn random_band_limited(grid: &Grid, seed: u64, count: usize) -> Result<Vec<Sample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| Ok(named(format!("band_limited(seed={seed}, #{i})"), band_limited(grid, &mut rng)?))).collect()
}

/// Fifty functions: the Gaussian corpus, box indicators and band-limited noise.
pub fn lorentz_corpus(grid: &Grid, seed: u64) -> Result<Vec<Sample>> {
    let mut out = gaussian_corpus(grid)?;
    for (lo, hi) in [(-1.0, 1.0), (-0.5, 2.0), (0.0, 0.25)] {
        let f = sample(&AnalyticFunction::Indicator { lower: [lo, lo], upper: [hi, hi] }, grid)?;
        out.push(named(format!("indicator[{lo},{hi})"), f));
    }
    let rest = 50 - out.len();
    out.extend(random_band_limited(grid, seed, rest)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::fourier_transform;
    use crate::grid::make_grid;

    #[test]
    fn band_limited_spectrum_is_central() {
        let g = make_grid(1, 16.0, 128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = band_limited(&g, &mut rng).unwrap();
        let fh = fourier_transform(&f);
        for (j, v) in fh.values().iter().enumerate() {
            let k = j as i64 - 64;
            if k.abs() >= 16 {
                assert!(v.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn seeded_corpus_is_reproducible() {
        let g = make_grid(2, 8.0, 32).unwrap();
        let a = random_band_limited(&g, 3, 2).unwrap();
        let b = random_band_limited(&g, 3, 2).unwrap();
        assert_eq!(a[1].f, b[1].f);
    }

    #[test]
    fn lorentz_corpus_has_fifty() {
        let g = make_grid(1, 16.0, 256).unwrap();
        assert_eq!(lorentz_corpus(&g, 1).unwrap().len(), 50);
    }
}
