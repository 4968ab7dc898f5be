//! Goodness-of-fit statistics against model densities.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::histogram::Histogram;
use crate::error::{precondition, Error, Result};
use crate::numerics::gauss_legendre;

/// Kolmogorov–Smirnov distance between samples and a model distribution function.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs())
    }))
}

/// Distribution function tabulated from a density by cumulative trapezoids.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    xs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl TabulatedCdf {
    pub fn from_density(xs: Vec<f64>, density: &[f64]) -> Result<Self> {
        if xs.len() < 2 || xs.len() != density.len() || xs.windows(2).any(|w| !(w[1] > w[0])) {
            return precondition("need at least two increasing abscissae with matching densities");
        }
        let mut cumulative = vec![0.0; xs.len()];
        for i in 1..xs.len() {
            cumulative[i] = cumulative[i - 1] + 0.5 * (xs[i] - xs[i - 1]) * (density[i] + density[i - 1]);
        }
        Ok(TabulatedCdf { xs, cumulative })
    }

    /// Total mass of the tabulated density.
    pub fn mass(&self) -> f64 {
        *self.cumulative.last().expect("non-empty")
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.xs[0] {
            return 0.0;
        }
        let last = self.xs.len() - 1;
        if x >= self.xs[last] {
            return self.cumulative[last];
        }
        let i = self.xs.partition_point(|&v| v <= x) - 1;
        let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.cumulative[i] + t * (self.cumulative[i + 1] - self.cumulative[i])
    }
}

/// Bin averages of a model density over the histogram bins.
pub fn bin_averages(hist: &Histogram, density: impl Fn(f64) -> f64) -> Vec<f64> {
    let gl = gauss_legendre(8);
    (0..hist.bins())
        .map(|i| {
            let (a, b) = (hist.bin_edges[i], hist.bin_edges[i + 1]);
            gl.mapped(a, b).map(|(x, w)| w * density(x)).sum::<f64>() / (b - a)
        })
        .collect()
}

/// Pearson χ² test of histogram counts against expected bin-averaged densities.
#[derive(Debug, Clone, Copy)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

pub fn chi_square(hist: &Histogram, expected_density: &[f64]) -> Result<ChiSquareResult> {
    if expected_density.len() != hist.bins() {
        return precondition("expected densities must match the bins");
    }
    if hist.total_samples == 0 {
        return Err(Error::EmptySamples);
    }
    let scale = hist.total_samples as f64 * hist.values_per_sample;
    let mut statistic = 0.0;
    let mut used = 0;
    for (i, &d) in expected_density.iter().enumerate() {
        let e = d * hist.bin_width(i) * scale;
        if e > 0.0 {
            statistic += (hist.counts[i] as f64 - e).powi(2) / e;
            used += 1;
        }
    }
    if used < 2 {
        return precondition("fewer than two bins with positive expectation");
    }
    let dof = used - 1;
    let p_value = ChiSquared::new(dof as f64).expect("positive dof").sf(statistic);
    Ok(ChiSquareResult { statistic, dof, p_value })
}

/// Per-bin deviations `(observed − expected)/stderr`; bins with zero spread give ±∞ unless they agree.
pub fn standardized_residuals(hist: &Histogram, expected_density: &[f64]) -> Vec<f64> {
    hist.densities()
        .iter()
        .zip(hist.stderr())
        .zip(expected_density)
        .map(|((o, s), e)| {
            let d = o - e;
            if s > 0.0 {
                d / s
            } else if d == 0.0 {
                0.0
            } else {
                d.signum() * f64::INFINITY
            }
        })
        .collect()
}
