//! One-dimensional Gaussian kernel density estimation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::length::quantile_sorted;
use crate::error::{Error, Result};

pub const GRID_POINTS: usize = 512;
/// Grid extends this many bandwidths beyond the sample extremes.
pub const GRID_SPAN: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdeCurve {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub bandwidth: f64,
}

impl KdeCurve {
    /// Trapezoidal integral of the density over the grid.
    pub fn integral(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum()
    }
}

/// Silverman's rule: `0.9 · min(σ, IQR/1.34) · n^(-1/5)` with the sample
/// (n−1) standard deviation. Returns 1.0 when that is zero.
pub fn silverman_bandwidth(samples: &[f64]) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 1.0;
    }
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let sd = (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let h = 0.9 * sd.min(iqr / 1.34) * nf.powf(-0.2);
    if h > 0.0 && h.is_finite() {
        h
    } else {
        1.0
    }
}

fn gaussian(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * PI).sqrt()
}

/// Density at `x`, summing kernels in sample order.
pub fn density_at(samples: &[f64], bandwidth: f64, x: f64) -> f64 {
    let mut acc = 0.0;
    for s in samples {
        acc += gaussian((x - s) / bandwidth);
    }
    acc / (samples.len() as f64 * bandwidth)
}

pub fn kde(samples: &[f64], bandwidth: Option<f64>) -> Result<KdeCurve> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("kde needs at least one sample"));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("kde samples must be finite".into()));
    }
    let h = match bandwidth {
        Some(h) if h > 0.0 && h.is_finite() => h,
        Some(h) => return Err(Error::Argument(format!("bandwidth must be positive, got {h}"))),
        None => silverman_bandwidth(samples),
    };
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min) - GRID_SPAN * h;
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max) + GRID_SPAN * h;
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| lo + step * i as f64).collect();
    let density = grid.iter().map(|&x| density_at(samples, h, x)).collect();
    Ok(KdeCurve {
        grid,
        density,
        bandwidth: h,
    })
}
