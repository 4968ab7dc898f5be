//! Monte Carlo spectra of GUE matrices and empirical near-maximum statistics.

pub mod eigen;
pub mod histogram;
pub mod sampler;
pub mod stats;

pub use eigen::{eigenvalues_ql, sturm_count, top_eigenvalues_within, top_k_eigenvalues, SymTridiagonal};
pub use histogram::Histogram;
pub use sampler::{Batch, DenseSpectrumSampler, TridiagonalSpectrumSampler};
pub use stats::{bin_averages, chi_square, ks_distance, standardized_residuals, ChiSquareResult, TabulatedCdf};

use crate::error::{precondition, Error, Result};

/// Default number of histogram bins.
pub const DEFAULT_BINS: usize = 80;

/// Distance variable used for the density below the maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DosScaling {
    /// `r/√N`
    Bulk,
    /// `√2 N^{1/6} r`
    Edge,
}

/// Factor mapping raw distances near the edge to the edge scale.
pub fn edge_factor(n: usize) -> f64 {
    2f64.sqrt() * (n as f64).powf(1.0 / 6.0)
}

fn check_spectra(spectra: &[Vec<f64>], min_len: usize) -> Result<()> {
    if spectra.is_empty() {
        return Err(Error::EmptySamples);
    }
    for s in spectra {
        if s.len() < min_len {
            return precondition(format!("each draw needs at least {min_len} eigenvalues"));
        }
        if s.windows(2).any(|w| w[0] < w[1]) {
            return precondition("eigenvalues must be sorted descending");
        }
    }
    Ok(())
}

/// Histogram of distances `λ_max − λ_i` over the other eigenvalues.
///
/// Bulk densities are per eigenvalue (weight `1/(N − 1)`) in `r/√N`; edge densities are in `r̃` and
/// normalized to compare directly with the edge scaling function.
/// Draws may be truncated to the eigenvalues near the maximum as long as the histogram range stays inside.
pub fn empirical_dos(
    spectra: &[Vec<f64>],
    scaling: DosScaling,
    n: usize,
    range: (f64, f64),
    bins: usize,
) -> Result<Histogram> {
    if n < 2 {
        return precondition("the density below the maximum needs n ≥ 2");
    }
    check_spectra(spectra, 1)?;
    let nf = n as f64;
    // on the edge scale the density of r̃ is ρ̃/N, so each draw counts (N − 1)/N values
    let (factor, per_draw) = match scaling {
        DosScaling::Bulk => (1.0 / nf.sqrt(), nf - 1.0),
        DosScaling::Edge => (edge_factor(n), (nf - 1.0) / nf),
    };
    let mut hist = Histogram::new(range.0, range.1, bins, per_draw)?;
    for s in spectra {
        hist.add_sample(s[1..].iter().map(|v| factor * (s[0] - v)));
    }
    Ok(hist)
}

/// Edge-scaled gaps `√2 N^{1/6}(λ₁ − λ₂)`.
pub fn scaled_gaps(spectra: &[Vec<f64>], n: usize) -> Result<Vec<f64>> {
    check_spectra(spectra, 2)?;
    let f = edge_factor(n);
    Ok(spectra.iter().map(|s| f * (s[0] - s[1])).collect())
}

/// Histogram of the edge-scaled first gap.
pub fn empirical_gap(spectra: &[Vec<f64>], n: usize, range: (f64, f64), bins: usize) -> Result<Histogram> {
    let gaps = scaled_gaps(spectra, n)?;
    let mut hist = Histogram::new(range.0, range.1, bins, 1.0)?;
    for g in gaps {
        hist.add_sample([g]);
    }
    Ok(hist)
}

/// Edge-scaled largest eigenvalues `√2 N^{1/6}(λ_max − √(2N))`.
pub fn scaled_lambda_max(spectra: &[Vec<f64>], n: usize) -> Result<Vec<f64>> {
    check_spectra(spectra, 1)?;
    let edge = (2.0 * n as f64).sqrt();
    let f = edge_factor(n);
    Ok(spectra.iter().map(|s| f * (s[0] - edge)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_n::gap_pdf_two;
    use crate::numerics::quad_adaptive;
    use std::f64::consts::PI;

    #[test]
    fn two_by_two_gap_distribution() {
        let s = TridiagonalSpectrumSampler::new(2, 21).unwrap();
        let spectra = s.sample_spectrum(100_000).unwrap().draws;
        let gaps: Vec<f64> = spectra.iter().map(|d| d[0] - d[1]).collect();
        let cdf = |x: f64| if x <= 0.0 { 0.0 } else { quad_adaptive(gap_pdf_two, 0.0, x, 1e-12).unwrap() };
        let d = ks_distance(&gaps, cdf).unwrap();
        assert!(d < 0.005, "{d}");
    }

    #[test]
    fn semicircle_at_moderate_size() {
        let n = 200;
        let s = TridiagonalSpectrumSampler::new(n, 8).unwrap();
        let spectra = s.sample_spectrum(500).unwrap().draws;
        let r = 2f64.sqrt();
        let mut hist = Histogram::new(-r, r, 40, n as f64).unwrap();
        let scale = 1.0 / (n as f64).sqrt();
        for sp in &spectra {
            hist.add_sample(sp.iter().map(|v| v * scale));
        }
        let expected = bin_averages(&hist, |x| (2.0 - x * x).max(0.0).sqrt() / PI);
        let res = chi_square(&hist, &expected).unwrap();
        assert!(res.p_value > 0.01, "{res:?}");
    }

    #[test]
    fn empirical_estimators_validate_input() {
        assert!(matches!(empirical_gap(&[], 10, (0.0, 1.0), 4), Err(Error::EmptySamples)));
        let unsorted = vec![vec![0.0, 1.0]];
        assert!(empirical_dos(&unsorted, DosScaling::Edge, 2, (0.0, 1.0), 4).is_err());
        assert!(scaled_gaps(&[vec![1.0]], 2).is_err());
    }

    #[test]
    fn dos_normalization() {
        let n = 10;
        let spectra = TridiagonalSpectrumSampler::new(n, 3).unwrap().sample_spectrum(2000).unwrap().draws;
        let h = empirical_dos(&spectra, DosScaling::Bulk, n, (0.0, 10.0), 50).unwrap();
        let mass: f64 = h.densities().iter().enumerate().map(|(i, d)| d * h.bin_width(i)).sum();
        assert!((mass - 1.0).abs() < 1e-12);
    }
}
