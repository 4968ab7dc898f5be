//! GUE spectra from the tridiagonal model and from dense Hermitian matrices.

use nalgebra::{Complex, DMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal};
use rayon::prelude::*;

use super::eigen::{eigenvalues_ql, top_eigenvalues_within, SymTridiagonal};
use crate::error::{precondition, Error, Result};

/// Largest size accepted by the dense reference sampler.
pub const DENSE_MAX_N: usize = 64;

/// Successful draws in index order plus the draws the eigensolver rejected.
#[derive(Debug, Clone)]
pub struct Batch<T> {
    pub draws: Vec<T>,
    pub rejected: Vec<(u64, Error)>,
}

/// Every draw owns ChaCha stream `index` of the seed, so results do not depend on the thread count.
fn draw_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn run_batch<T: Send>(count: usize, draw: impl Fn(u64) -> Result<T> + Sync) -> Result<Batch<T>> {
    if count < 1 {
        return precondition("sample count must be at least 1");
    }
    let results: Vec<(u64, Result<T>)> = (0..count as u64).into_par_iter().map(|i| (i, draw(i))).collect();
    let mut batch = Batch { draws: Vec::with_capacity(count), rejected: Vec::new() };
    for (i, r) in results {
        match r {
            Ok(v) => batch.draws.push(v),
            Err(e @ Error::Eigen(_)) => batch.rejected.push((i, e)),
            Err(e) => return Err(e),
        }
    }
    Ok(batch)
}

/// Tridiagonal model of an N×N GUE matrix with weight `e^{−Tr H²}`.
#[derive(Debug, Clone, Copy)]
pub struct TridiagonalSpectrumSampler {
    n: usize,
    seed: u64,
}

impl TridiagonalSpectrumSampler {
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        if n < 1 {
            return precondition("matrix size must be at least 1");
        }
        Ok(TridiagonalSpectrumSampler { n, seed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Draw number `index`: diagonal Normal(0, ½), coupling k equal to √(G_k/2) with G_k ~ Gamma(n − k, 1).
    pub fn matrix(&self, index: u64) -> SymTridiagonal {
        let mut rng = draw_rng(self.seed, index);
        let normal = Normal::new(0.0, 0.5f64.sqrt()).expect("valid normal");
        let diag = (0..self.n).map(|_| normal.sample(&mut rng)).collect();
        let off = (1..self.n)
            .map(|k| {
                let g = Gamma::new((self.n - k) as f64, 1.0).expect("positive shape");
                (0.5 * g.sample(&mut rng)).sqrt()
            })
            .collect();
        SymTridiagonal { diag, off }
    }

    /// Full spectrum of draw `index`, descending.
    pub fn spectrum(&self, index: u64) -> Result<Vec<f64>> {
        eigenvalues_ql(&self.matrix(index))
    }

    /// Full spectra of draws `0..count`, in parallel.
    pub fn sample_spectrum(&self, count: usize) -> Result<Batch<Vec<f64>>> {
        run_batch(count, |i| self.spectrum(i))
    }

    /// Eigenvalues within `width` of the maximum (at least `min_count`) of draws `0..count`.
    pub fn sample_top(&self, count: usize, width: f64, min_count: usize) -> Result<Batch<Vec<f64>>> {
        run_batch(count, |i| top_eigenvalues_within(&self.matrix(i), width, min_count))
    }

    /// Apply `f` to the matrices of draws `0..count`, in parallel.
    pub fn sample_with<T: Send>(
        &self,
        count: usize,
        f: impl Fn(&SymTridiagonal) -> Result<T> + Sync,
    ) -> Result<Batch<T>> {
        run_batch(count, |i| f(&self.matrix(i)))
    }
}

/// Dense Hermitian reference sampler for small sizes.
#[derive(Debug, Clone, Copy)]
pub struct DenseSpectrumSampler {
    n: usize,
    seed: u64,
}

impl DenseSpectrumSampler {
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        if !(1..=DENSE_MAX_N).contains(&n) {
            return precondition(format!("dense sampler supports 1 ≤ n ≤ {DENSE_MAX_N}"));
        }
        Ok(DenseSpectrumSampler { n, seed })
    }

    /// Draw `index`: H_ii ~ Normal(0, ½), real and imaginary parts of H_ij ~ Normal(0, ¼).
    pub fn matrix(&self, index: u64) -> DMatrix<Complex<f64>> {
        let mut rng = draw_rng(self.seed, index);
        let diag = Normal::new(0.0, 0.5f64.sqrt()).expect("valid normal");
        let part = Normal::new(0.0, 0.5).expect("valid normal");
        let mut h = DMatrix::from_element(self.n, self.n, Complex::new(0.0, 0.0));
        for i in 0..self.n {
            h[(i, i)] = Complex::new(diag.sample(&mut rng), 0.0);
            for j in i + 1..self.n {
                let z = Complex::new(part.sample(&mut rng), part.sample(&mut rng));
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        h
    }

    pub fn spectrum(&self, index: u64) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix(index).symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    pub fn sample_spectrum(&self, count: usize) -> Result<Batch<Vec<f64>>> {
        run_batch(count, |i| Ok(self.spectrum(i)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_streams() {
        let s = TridiagonalSpectrumSampler::new(30, 11).unwrap();
        let a = s.sample_spectrum(20).unwrap();
        let b = s.sample_spectrum(20).unwrap();
        assert_eq!(a.draws, b.draws);
        assert_ne!(s.spectrum(0).unwrap(), s.spectrum(1).unwrap());
        let other = TridiagonalSpectrumSampler::new(30, 12).unwrap();
        assert_ne!(s.spectrum(0).unwrap(), other.spectrum(0).unwrap());
    }

    #[test]
    fn single_eigenvalue_variance() {
        let s = TridiagonalSpectrumSampler::new(1, 5).unwrap();
        let draws = s.sample_spectrum(1_000_000).unwrap().draws;
        let n = draws.len() as f64;
        let mean = draws.iter().map(|d| d[0]).sum::<f64>() / n;
        let var = draws.iter().map(|d| (d[0] - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var - 0.5).abs() < 0.002, "{var}");
    }

    #[test]
    fn moments_match_dense_sampler() {
        // E Tr H² = n²/2 and E Tr H⁴ = n(2n² + 1)/4 under e^{−Tr H²}
        let n = 6;
        let count = 20_000;
        let tri = TridiagonalSpectrumSampler::new(n, 1).unwrap().sample_spectrum(count).unwrap().draws;
        let dense = DenseSpectrumSampler::new(n, 2).unwrap().sample_spectrum(count).unwrap().draws;
        let moment = |d: &[Vec<f64>], p: i32| {
            d.iter().map(|s| s.iter().map(|v| v.powi(p)).sum::<f64>()).sum::<f64>() / count as f64
        };
        let nf = n as f64;
        for draws in [&tri, &dense] {
            assert!((moment(draws, 2) / (nf * nf / 2.0) - 1.0).abs() < 0.02);
            assert!((moment(draws, 4) / (nf * (2.0 * nf * nf + 1.0) / 4.0) - 1.0).abs() < 0.04);
        }
    }

    #[test]
    fn top_window_matches_full_spectrum() {
        let s = TridiagonalSpectrumSampler::new(200, 9).unwrap();
        for i in 0..5 {
            let full = s.spectrum(i).unwrap();
            let top = top_eigenvalues_within(&s.matrix(i), 2.0, 2).unwrap();
            for (a, b) in full.iter().zip(&top) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn preconditions() {
        assert!(TridiagonalSpectrumSampler::new(0, 1).is_err());
        assert!(DenseSpectrumSampler::new(65, 1).is_err());
        assert!(TridiagonalSpectrumSampler::new(3, 1).unwrap().sample_spectrum(0).is_err());
    }
}
