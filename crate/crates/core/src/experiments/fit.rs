use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares line through `(log t, log norm)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub log_t: Vec<f64>,
    pub log_norm: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute deviation from the line in log coordinates.
    pub residual: f64,
}

impl DecayFit {
    pub fn predict(&self, t: f64) -> f64 {
        (self.intercept + self.slope * t.ln()).exp()
    }
}

pub fn fit_decay(ts: &[f64], norms: &[f64]) -> Result<DecayFit> {
    if ts.len() != norms.len() {
        return Err(Error::InvalidInput(format!("{} times for {} norms", ts.len(), norms.len())));
    }
    if ts.len() < 4 {
        return Err(Error::InvalidInput(format!("a decay fit needs at least 4 points, got {}", ts.len())));
    }
    if ts.iter().chain(norms).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidInput("decay fit needs positive finite inputs".into()));
    }
    let x: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("decay fit needs distinct times".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = x.iter().zip(&y).map(|(a, b)| (b - intercept - slope * a).abs()).fold(0.0, f64::max);
    Ok(DecayFit { log_t: x, log_norm: y, slope, intercept, residual })
}

/// `n` points spaced evenly in `log t` over `[lo, hi]`.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Exponent pair `(q, r)` with `2/q + d/r = d/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissiblePair {
    pub q: f64,
    pub r: f64,
    pub dim: usize,
    /// `(q, r) = (4, 2d/(d-1))` with `d > 1`.
    pub endpoint: bool,
    /// `2 <= q < 4`: allowed for exploration, never asserted.
    pub exploratory: bool,
}

impl AdmissiblePair {
    pub fn new(q: f64, r: f64, dim: usize) -> Result<Self> {
        let p = Self::build(q, r, dim)?;
        if p.exploratory {
            return Err(Error::InvalidSpec(format!("q = {q} < 4 is outside the proven range")));
        }
        Ok(p)
    }

    /// Like [`AdmissiblePair::new`] but also accepts `2 <= q < 4`.
    pub fn exploratory(q: f64, r: f64, dim: usize) -> Result<Self> {
        Self::build(q, r, dim)
    }

    /// The pair with time exponent `q` in dimension `dim`.
    pub fn from_q(q: f64, dim: usize) -> Result<Self> {
        let d = dim as f64;
        let inv_r = (d / 2.0 - 2.0 / q) / d;
        Self::new(q, if inv_r == 0.0 { f64::INFINITY } else { 1.0 / inv_r }, dim)
    }

    fn build(q: f64, r: f64, dim: usize) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::InvalidSpec(format!("dimension must be 1 or 2, got {dim}")));
        }
        let d = dim as f64;
        if !(q >= 2.0 && r >= 2.0) {
            return Err(Error::InvalidSpec(format!("pair ({q}, {r}) needs q, r >= 2")));
        }
        if ((2.0 / q + d / r) - d / 2.0).abs() > 1e-12 {
            return Err(Error::InvalidSpec(format!("pair ({q}, {r}) is not admissible in dimension {dim}")));
        }
        let endpoint = dim > 1 && q == 4.0 && (r - 2.0 * d / (d - 1.0)).abs() < 1e-12;
        Ok(AdmissiblePair { q, r, dim, endpoint, exploratory: q < 4.0 })
    }

    /// `r' = r / (r - 1)`.
    pub fn r_conjugate(&self) -> f64 {
        crate::numeric::conjugate_exponent(self.r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let ts = log_spaced(1.0, 100.0, 6);
        let ns: Vec<f64> = ts.iter().map(|t| 3.0 * t.powf(-0.5)).collect();
        let f = fit_decay(&ts, &ns).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-10);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn constant_has_zero_slope() {
        let f = fit_decay(&[1.0, 2.0, 3.0, 4.0], &[2.0; 4]).unwrap();
        assert!(f.slope.abs() < 1e-14);
    }

    #[test]
    fn closed_form_kernel_norm_large_t() {
        let ts = log_spaced(8.0, 64.0, 8);
        let ns: Vec<f64> = ts
            .iter()
            .map(|t| {
                let a = 4.0 * std::f64::consts::PI * t;
                ((1.0 + a * a) / a.powi(4)).powf(0.25)
            })
            .collect();
        assert!((fit_decay(&ts, &ns).unwrap().slope + 0.5).abs() < 0.03);
    }

    #[test]
    fn bad_inputs() {
        assert!(fit_decay(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]).is_err());
        assert!(fit_decay(&[1.0, 2.0, 3.0, 4.0], &[1.0, 0.0, 1.0, 1.0]).is_err());
        assert!(fit_decay(&[1.0, 2.0, 3.0, -4.0], &[1.0, 1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn pairs() {
        let p = AdmissiblePair::new(8.0, 4.0, 1).unwrap();
        assert!(!p.endpoint);
        assert!(AdmissiblePair::new(4.0, 4.0, 2).unwrap().endpoint);
        assert!(AdmissiblePair::new(f64::INFINITY, 2.0, 1).is_ok());
        assert!(AdmissiblePair::new(8.0, 3.0, 1).is_err());
        assert!(AdmissiblePair::new(3.0, 6.0, 2).is_err());
        assert!(AdmissiblePair::exploratory(3.0, 6.0, 2).unwrap().exploratory);
        assert_eq!(AdmissiblePair::from_q(8.0, 1).unwrap().r, 4.0);
    }
}
