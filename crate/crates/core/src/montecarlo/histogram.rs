//! Fixed-bin histograms with per-draw variance tracking.

use crate::error::{precondition, Result};

/// Counts over equal-width bins; each draw may contribute several correlated values.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Per-bin sum over draws of the squared per-draw count.
    pub count_squares: Vec<f64>,
    pub total_samples: u64,
    /// Values each draw contributes to the normalization (N − 1 for the DOS, 1 for a gap).
    pub values_per_sample: f64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize, values_per_sample: f64) -> Result<Self> {
        if !(lo < hi) || bins == 0 || !(values_per_sample > 0.0) {
            return precondition("need lo < hi, at least one bin and positive values per sample");
        }
        let w = (hi - lo) / bins as f64;
        let mut bin_edges: Vec<f64> = (0..=bins).map(|i| lo + w * i as f64).collect();
        bin_edges[bins] = hi;
        Ok(Histogram {
            bin_edges,
            counts: vec![0; bins],
            count_squares: vec![0.0; bins],
            total_samples: 0,
            values_per_sample,
        })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    fn bin_of(&self, x: f64) -> Option<usize> {
        let lo = self.bin_edges[0];
        let hi = self.bin_edges[self.bins()];
        if !(x >= lo && x < hi) {
            return None;
        }
        let i = ((x - lo) / (hi - lo) * self.bins() as f64) as usize;
        Some(i.min(self.bins() - 1))
    }

    /// Record one draw.
    pub fn add_sample(&mut self, values: impl IntoIterator<Item = f64>) {
        let mut local: Vec<(usize, u64)> = Vec::new();
        for x in values {
            if let Some(i) = self.bin_of(x) {
                match local.iter_mut().find(|(b, _)| *b == i) {
                    Some((_, c)) => *c += 1,
                    None => local.push((i, 1)),
                }
            }
        }
        for (i, c) in local {
            self.counts[i] += c;
            self.count_squares[i] += (c * c) as f64;
        }
        self.total_samples += 1;
    }

    /// Combine two histograms over the same bins; associative and order independent.
    pub fn merge(mut self, other: &Histogram) -> Result<Self> {
        if self.bin_edges != other.bin_edges || self.values_per_sample != other.values_per_sample {
            return precondition("histograms have different binning");
        }
        for i in 0..self.bins() {
            self.counts[i] += other.counts[i];
            self.count_squares[i] += other.count_squares[i];
        }
        self.total_samples += other.total_samples;
        Ok(self)
    }

    pub fn bin_width(&self, i: usize) -> f64 {
        self.bin_edges[i + 1] - self.bin_edges[i]
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    fn norm(&self, i: usize) -> f64 {
        1.0 / (self.total_samples as f64 * self.values_per_sample * self.bin_width(i))
    }

    /// Density estimate per bin.
    pub fn densities(&self) -> Vec<f64> {
        (0..self.bins()).map(|i| self.counts[i] as f64 * self.norm(i)).collect()
    }

    /// Standard error of each density from the spread of per-draw counts.
    pub fn stderr(&self) -> Vec<f64> {
        let t = self.total_samples as f64;
        (0..self.bins())
            .map(|i| {
                if self.total_samples < 2 {
                    return f64::NAN;
                }
                let mean = self.counts[i] as f64 / t;
                let var = (self.count_squares[i] / t - mean * mean).max(0.0) * t / (t - 1.0);
                (var / t).sqrt() * t * self.norm(i)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn density_of_uniform_values() {
        let mut h = Histogram::new(0.0, 1.0, 4, 1.0).unwrap();
        for i in 0..400 {
            h.add_sample([(i as f64 + 0.5) / 400.0]);
        }
        for d in h.densities() {
            assert!((d - 1.0).abs() < 1e-12);
        }
        assert_eq!(h.counts.iter().sum::<u64>(), 400);
        assert_eq!(h.bin_centers(), vec![0.125, 0.375, 0.625, 0.875]);
    }

    #[test]
    fn out_of_range_values_are_dropped() {
        let mut h = Histogram::new(0.0, 1.0, 2, 3.0).unwrap();
        h.add_sample([-0.1, 0.2, 1.0, 0.7]);
        assert_eq!(h.counts, vec![1, 1]);
        assert_eq!(h.total_samples, 1);
    }

    #[test]
    fn correlated_counts_have_zero_spread() {
        // every draw puts exactly one value in each bin
        let mut h = Histogram::new(0.0, 2.0, 2, 2.0).unwrap();
        for _ in 0..50 {
            h.add_sample([0.5, 1.5]);
        }
        assert!(h.stderr().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn rejects_mismatched_merge() {
        let a = Histogram::new(0.0, 1.0, 2, 1.0).unwrap();
        let b = Histogram::new(0.0, 1.0, 3, 1.0).unwrap();
        assert!(a.merge(&b).is_err());
        assert!(Histogram::new(1.0, 0.0, 2, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn merge_is_order_independent(xs in proptest::collection::vec(-0.5f64..1.5, 0..60), split in 0usize..60) {
            let split = split.min(xs.len());
            let fill = |vals: &[f64]| {
                let mut h = Histogram::new(0.0, 1.0, 7, 1.0).unwrap();
                for &x in vals { h.add_sample([x]); }
                h
            };
            let whole = fill(&xs);
            let (a, b) = (fill(&xs[..split]), fill(&xs[split..]));
            let ab = a.clone().merge(&b).unwrap();
            let ba = b.merge(&a).unwrap();
            prop_assert_eq!(&ab, &whole);
            prop_assert_eq!(&ba, &whole);
            prop_assert!(whole.counts.iter().sum::<u64>() <= whole.total_samples);
        }
    }
}
