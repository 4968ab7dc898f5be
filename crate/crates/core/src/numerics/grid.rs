use std::fmt;
use std::sync::Arc;

use crate::airy;
use crate::error::{precondition, Error, Result};

/// Uniform grid on `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return precondition(format!("grid needs finite x_min < x_max, got [{x_min}, {x_max}]"));
        }
        if n_points < 2 {
            return precondition("grid needs at least two points");
        }
        Ok(Self { x_min, x_max, n_points })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    /// Node `i`; the last node is exactly `x_max`.
    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    /// Same range with twice the resolution.
    pub fn refined(&self) -> Grid {
        Grid { n_points: 2 * self.n_points - 1, ..*self }
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction::new(*self, self.nodes().into_iter().map(f).collect()).expect("sample length matches grid")
    }
}

type Extension = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Function sampled on a [`Grid`], evaluated between nodes by cubic interpolation.
#[derive(Clone)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
    extension: Option<Extension>,
}

impl fmt::Debug for GridFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridFunction")
            .field("grid", &self.grid)
            .field("values", &format_args!("[{} values]", self.values.len()))
            .field("extension", &self.extension.is_some())
            .finish()
    }
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return precondition(format!("{} values for a grid of {} points", values.len(), grid.n_points()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return precondition(format!("non-finite value at node {i}"));
        }
        Ok(Self { grid, values, extension: None })
    }

    /// Attach a model used for evaluation outside the grid.
    pub fn with_extension(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.extension = Some(Arc::new(f));
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if self.grid.contains(x) {
            Ok(self.interp(x))
        } else if let Some(ext) = &self.extension {
            Ok(ext(x))
        } else {
            Err(Error::OutOfDomain { x, lo: self.grid.x_min(), hi: self.grid.x_max() })
        }
    }

    /// Cubic Lagrange interpolation through the four nearest nodes; clamps to the grid range.
    pub fn interp(&self, x: f64) -> f64 {
        let v = &self.values;
        let n = v.len();
        let h = self.grid.step();
        let t = ((x - self.grid.x_min()) / h).clamp(0.0, (n - 1) as f64);
        if n < 4 {
            let i = (t.floor() as usize).min(n - 2);
            let s = t - i as f64;
            return v[i] * (1.0 - s) + v[i + 1] * s;
        }
        let i = (t.floor() as usize).clamp(1, n - 3);
        let s = t - i as f64;
        let (a, b, c, d) = (v[i - 1], v[i], v[i + 1], v[i + 2]);
        let sm = s - 1.0;
        let sp = s + 1.0;
        let s2 = s - 2.0;
        -a * s * sm * s2 / 6.0 + b * sp * sm * s2 / 2.0 - c * sp * s * s2 / 2.0 + d * sp * s * sm / 6.0
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> GridFunction {
        let values = self.values.iter().enumerate().map(|(i, &v)| f(self.grid.x(i), v)).collect();
        GridFunction { grid: self.grid, values, extension: None }
    }

    pub fn zip(&self, other: &GridFunction, f: impl Fn(f64, f64, f64) -> f64) -> GridFunction {
        assert_eq!(self.grid, other.grid, "grid functions live on different grids");
        let values = (0..self.values.len()).map(|i| f(self.grid.x(i), self.values[i], other.values[i])).collect();
        GridFunction { grid: self.grid, values, extension: None }
    }

    /// Fourth-order finite-difference derivative (one-sided stencils at the ends).
    pub fn derivative(&self) -> GridFunction {
        let v = &self.values;
        let n = v.len();
        let h = self.grid.step();
        assert!(n >= 5, "derivative needs at least five nodes");
        let mut d = vec![0.0; n];
        for i in 2..n - 2 {
            d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
        }
        d[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h);
        d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / (12.0 * h);
        d[n - 2] = (3.0 * v[n - 1] + 10.0 * v[n - 2] - 18.0 * v[n - 3] + 6.0 * v[n - 4] - v[n - 5]) / (12.0 * h);
        d[n - 1] =
            (25.0 * v[n - 1] - 48.0 * v[n - 2] + 36.0 * v[n - 3] - 16.0 * v[n - 4] + 3.0 * v[n - 5]) / (12.0 * h);
        GridFunction { grid: self.grid, values: d, extension: None }
    }

    /// Fourth-order second derivative at interior nodes `2..n-2`; the two outer nodes on each side are NaN.
    pub fn second_derivative_interior(&self) -> Vec<f64> {
        let v = &self.values;
        let n = v.len();
        let h2 = self.grid.step().powi(2);
        let mut d = vec![f64::NAN; n];
        for i in 2..n.saturating_sub(2) {
            d[i] = (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] + 16.0 * v[i + 1] - v[i + 2]) / (12.0 * h2);
        }
        d
    }

    /// Integral over the whole grid (sixth order).
    pub fn integral(&self) -> f64 {
        (0..self.values.len() - 1).map(|i| self.segment(i)).sum()
    }

    /// Integral over `[x_i, x_{i+1}]` from the interpolating quintic through six nearby nodes.
    fn segment(&self, i: usize) -> f64 {
        const INNER: [f64; 6] = [11.0, -93.0, 802.0, 802.0, -93.0, 11.0];
        const FIRST: [f64; 6] = [475.0, 1427.0, -798.0, 482.0, -173.0, 27.0];
        const SECOND: [f64; 6] = [-27.0, 637.0, 1022.0, -258.0, 77.0, -11.0];
        let v = &self.values;
        let n = v.len();
        let h = self.grid.step();
        if n < 6 {
            return 0.5 * h * (v[i] + v[i + 1]);
        }
        let dot = |w: &[f64; 6], start: usize, reversed: bool| -> f64 {
            (0..6).map(|k| if reversed { w[k] * v[start - k] } else { w[k] * v[start + k] }).sum::<f64>()
        };
        let w = if i == 0 {
            dot(&FIRST, 0, false)
        } else if i == 1 {
            dot(&SECOND, 0, false)
        } else if i == n - 2 {
            dot(&FIRST, n - 1, true)
        } else if i == n - 3 {
            dot(&SECOND, n - 1, true)
        } else {
            dot(&INNER, i - 2, false)
        };
        h * w / 1440.0
    }
}

/// Analytic remainder of an integrand beyond the right end of its grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// Integrand behaves like `c·e^{−rate·x}` beyond `x_max`.
    Exponential { rate: f64 },
    /// Integrand behaves like `c·Ai(x)²` beyond `x_max`.
    AirySquared,
    /// Integrand behaves like `c·x^{−exponent}` beyond `x_max` (exponent > 1, x_max > 0).
    Power { exponent: f64 },
    /// The remainder is known in closed form.
    Explicit(f64),
}

impl Tail {
    fn remainder(&self, x_max: f64, end_value: f64) -> Result<f64> {
        match *self {
            Tail::Exponential { rate } if rate > 0.0 => Ok(end_value / rate),
            Tail::Exponential { rate } => precondition(format!("exponential tail with rate {rate}")),
            Tail::AirySquared => {
                let a = airy::airy(x_max).ai;
                if end_value == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(end_value / (a * a) * airy::edge_density(x_max))
                }
            }
            Tail::Power { exponent } if exponent > 1.0 && x_max > 0.0 => Ok(end_value * x_max / (exponent - 1.0)),
            Tail::Power { exponent } => {
                precondition(format!("power tail x^-{exponent} is not integrable from {x_max}"))
            }
            Tail::Explicit(v) => Ok(v),
        }
    }
}

/// `G(x) = ∫_x^{x_max} gf + remainder`, where the remainder comes from `tail`.
///
/// Without a tail model the integrand must already be negligible at `x_max`.
pub fn cumulative_tail_integral(gf: &GridFunction, tail: Option<Tail>) -> Result<GridFunction> {
    let end = gf.last();
    let remainder = match tail {
        Some(t) => t.remainder(gf.grid.x_max(), end)?,
        None => {
            let scale = gf.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if end.abs() > 1e-14 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::Truncation { value: end });
            }
            0.0
        }
    };
    let n = gf.values.len();
    let mut out = vec![0.0; n];
    out[n - 1] = remainder;
    for i in (0..n - 1).rev() {
        out[i] = out[i + 1] + gf.segment(i);
    }
    GridFunction::new(gf.grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grid_rejects_degenerate_ranges() {
        assert!(Grid::new(1.0, 1.0, 10).is_err());
        assert!(Grid::new(0.0, 1.0, 1).is_err());
        let g = Grid::new(-1.0, 1.0, 5).unwrap();
        assert_eq!(g.step(), 0.5);
        assert_eq!(g.x(4), 1.0);
    }

    #[test]
    fn zero_integrand_has_zero_integral() {
        let g = Grid::new(0.0, 5.0, 101).unwrap();
        let gf = g.sample(|_| 0.0);
        let out = cumulative_tail_integral(&gf, None).unwrap();
        assert!(out.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn exponential_tail_closes_the_integral() {
        let g = Grid::new(0.0, 40.0, 4001).unwrap();
        let gf = g.sample(|x| (-x).exp());
        let out = cumulative_tail_integral(&gf, Some(Tail::Exponential { rate: 1.0 })).unwrap();
        assert!((out.first() - 1.0).abs() < 1e-10, "{}", out.first());
    }

    #[test]
    fn short_grid_exponential_tail() {
        let g = Grid::new(0.0, 3.0, 601).unwrap();
        let gf = g.sample(|x| (-2.0 * x).exp());
        let out = cumulative_tail_integral(&gf, Some(Tail::Exponential { rate: 2.0 })).unwrap();
        assert!((out.first() - 0.5).abs() < 1e-11);
    }

    #[test]
    fn power_tail() {
        let g = Grid::new(1.0, 10.0, 2001).unwrap();
        let gf = g.sample(|x| x.powi(-3));
        let out = cumulative_tail_integral(&gf, Some(Tail::Power { exponent: 3.0 })).unwrap();
        assert!((out.first() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn missing_tail_is_reported() {
        let g = Grid::new(0.0, 1.0, 11).unwrap();
        let gf = g.sample(|x| 1.0 + x);
        assert!(matches!(cumulative_tail_integral(&gf, None), Err(Error::Truncation { .. })));
    }

    #[test]
    fn evaluation_outside_needs_extension() {
        let g = Grid::new(0.0, 1.0, 11).unwrap();
        let gf = g.sample(|x| x);
        assert!(gf.eval(2.0).is_err());
        let gf = gf.with_extension(|x| x);
        assert_eq!(gf.eval(2.0).unwrap(), 2.0);
    }

    #[test]
    fn cubic_interpolation_is_exact_on_cubics() {
        let g = Grid::new(-1.0, 2.0, 13).unwrap();
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x - 0.3 * x * x * x;
        let gf = g.sample(p);
        for &x in &[-1.0, -0.93, 0.1, 0.77, 1.99, 2.0] {
            assert!((gf.interp(x) - p(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn derivative_of_cumulative_recovers_integrand() {
        let g = Grid::new(0.0, 12.0, 1201).unwrap();
        let gf = g.sample(|x| (-x).exp() * (1.0 + x.sin()));
        let cum = cumulative_tail_integral(&gf, Some(Tail::Exponential { rate: 1.0 })).unwrap();
        let d = cum.derivative();
        let h = g.step();
        for i in 1..g.n_points() - 1 {
            assert!((d.values()[i] + gf.values()[i]).abs() < 10.0 * h * h);
        }
    }

    proptest! {
        #[test]
        fn integral_is_exact_on_cubics(a in -3.0..3.0f64, b in -3.0..3.0f64, c in -3.0..3.0f64, d in -3.0..3.0f64) {
            let g = Grid::new(0.0, 2.0, 11).unwrap();
            let gf = g.sample(|x| a + b * x + c * x * x + d * x * x * x);
            let exact = 2.0 * a + 2.0 * b + 8.0 / 3.0 * c + 4.0 * d;
            prop_assert!((gf.integral() - exact).abs() < 1e-12 * (1.0 + exact.abs()));
        }

        #[test]
        fn cumulative_is_non_increasing_for_non_negative_input(k in 0.1..3.0f64, w in 0.0..5.0f64) {
            let g = Grid::new(0.0, 10.0, 401).unwrap();
            let gf = g.sample(|x| (-k * x).exp() * (1.0 + (w * x).cos()) );
            let cum = cumulative_tail_integral(&gf, Some(Tail::Exponential { rate: k })).unwrap();
            for pair in cum.values().windows(2) {
                prop_assert!(pair[1] <= pair[0] + 1e-15);
            }
        }
    }
}
