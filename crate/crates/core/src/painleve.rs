//! Hastings–McLeod solution of q″ = 2q³ + x·q, its tail integral and the Tracy–Widom GUE CDF.

use std::sync::OnceLock;

use crate::airy;
use crate::error::{precondition, Error, Result};
use crate::numerics::special::tw2_tail_constant;
use crate::numerics::{cumulative_tail_integral, quad_adaptive, Grid, GridFunction, Tail};

pub const DEFAULT_X_MIN: f64 = -12.0;
pub const DEFAULT_X_MAX: f64 = 10.0;
pub const DEFAULT_NODES: usize = 4401;
pub const DEFAULT_TOL: f64 = 1e-12;
const MAX_NEWTON: usize = 60;

/// Jointly tabulated Hastings–McLeod data on one grid.
#[derive(Debug, Clone)]
pub struct PainleveTable {
    pub grid: Grid,
    /// The Hastings–McLeod transcendent q.
    pub q: GridFunction,
    pub q_prime: GridFunction,
    /// `∫_x^∞ q(u)² du`, which is also the logarithmic derivative of the CDF.
    pub q_sq_tail: GridFunction,
    /// Tracy–Widom GUE distribution function.
    pub tw_cdf: GridFunction,
    pub log_tw_cdf: GridFunction,
    /// Max-norm Newton residual after each iteration (empty for tables built from given q).
    pub newton_history: Vec<f64>,
}

/// Left boundary asymptote `√(−x/2)(1 + 1/(8x³))`.
pub fn left_asymptote(x: f64) -> f64 {
    (-x / 2.0).sqrt() * (1.0 + 1.0 / (8.0 * x * x * x))
}

/// Tracy–Widom left tail `τ₂|x|^{−1/8} e^{−|x|³/12}(1 + 3/(64|x|³))`.
pub fn tw_left_tail(x: f64) -> f64 {
    let t = -x;
    tw2_tail_constant() * t.powf(-0.125) * (-t * t * t / 12.0).exp() * (1.0 + 3.0 / (64.0 * t * t * t))
}

fn force(x: f64, q: f64) -> f64 {
    2.0 * q * q * q + x * q
}

/// Solve the Hastings–McLeod boundary-value problem on `domain`.
///
/// Damped Newton on the fourth-order Numerov discretization; `tol` bounds the max-norm of
/// the discrete residual.
pub fn solve_hastings_mcleod(domain: Grid, tol: f64) -> Result<PainleveTable> {
    if domain.x_min() > -10.0 || domain.x_max() < 8.0 {
        return precondition(format!("domain [{}, {}] must cover [-10, 8]", domain.x_min(), domain.x_max()));
    }
    if !(tol >= 1e-12) {
        return precondition(format!("tolerance {tol} below 1e-12"));
    }
    if domain.n_points() < 16 {
        return precondition("domain needs at least 16 nodes");
    }
    let n = domain.n_points();
    let h = domain.step();
    let xs = domain.nodes();
    let c = h * h / 12.0;

    let mut q: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let w = 0.5 * (1.0 + x.tanh());
            let left = (((x * x + 1.0).sqrt() - x) / 4.0).sqrt();
            w * airy::airy(x).ai + (1.0 - w) * left
        })
        .collect();
    q[0] = left_asymptote(xs[0]);
    q[n - 1] = airy::airy(xs[n - 1]).ai;

    let residual = |q: &[f64], out: &mut [f64]| -> f64 {
        let mut worst = 0.0f64;
        for i in 1..n - 1 {
            let g = q[i + 1] - 2.0 * q[i] + q[i - 1]
                - c * (force(xs[i + 1], q[i + 1]) + 10.0 * force(xs[i], q[i]) + force(xs[i - 1], q[i - 1]));
            out[i] = g;
            worst = worst.max(g.abs());
        }
        worst
    };

    let mut g = vec![0.0; n];
    let mut norm = residual(&q, &mut g);
    let mut history = Vec::new();
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut delta = vec![0.0; n];
    let mut trial = q.clone();
    let mut trial_g = vec![0.0; n];
    let mut polished = false;

    for _ in 0..MAX_NEWTON {
        for i in 1..n - 1 {
            let dfm = 6.0 * q[i - 1] * q[i - 1] + xs[i - 1];
            let df = 6.0 * q[i] * q[i] + xs[i];
            let dfp = 6.0 * q[i + 1] * q[i + 1] + xs[i + 1];
            sub[i] = 1.0 - c * dfm;
            diag[i] = -2.0 - 10.0 * c * df;
            sup[i] = 1.0 - c * dfp;
            delta[i] = -g[i];
        }
        solve_interior_tridiagonal(&sub, &mut diag, &sup, &mut delta);

        let mut lambda = 1.0;
        let mut trial_norm;
        loop {
            for i in 1..n - 1 {
                trial[i] = q[i] + lambda * delta[i];
            }
            trial_norm = residual(&trial, &mut trial_g);
            if trial_norm < (1.0 - 1e-4 * lambda) * norm || lambda < 1e-3 || norm < 1e-14 {
                break;
            }
            lambda *= 0.5;
        }
        if !trial_norm.is_finite() {
            history.push(trial_norm);
            return Err(Error::Solver { history });
        }
        if polished && trial_norm >= norm {
            break;
        }
        q.copy_from_slice(&trial);
        g.copy_from_slice(&trial_g);
        norm = trial_norm;
        history.push(norm);
        if polished {
            break;
        }
        if norm <= tol {
            polished = true;
        }
    }
    if norm > tol {
        return Err(Error::Solver { history });
    }

    let mut table = PainleveTable::from_q(domain, q)?;
    table.newton_history = history;
    Ok(table)
}

/// Thomas algorithm on rows `1..n-1`; the boundary unknowns are fixed at zero.
fn solve_interior_tridiagonal(sub: &[f64], diag: &mut [f64], sup: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    for i in 2..n - 1 {
        let m = sub[i] / diag[i - 1];
        diag[i] -= m * sup[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 2] /= diag[n - 2];
    for i in (1..n - 2).rev() {
        rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
    }
    rhs[0] = 0.0;
    rhs[n - 1] = 0.0;
}

impl PainleveTable {
    /// Table on the default domain [−12, 10] with 4401 nodes.
    pub fn solve_default() -> Result<Self> {
        let grid = Grid::new(DEFAULT_X_MIN, DEFAULT_X_MAX, DEFAULT_NODES)?;
        solve_hastings_mcleod(grid, DEFAULT_TOL)
    }

    /// Process-wide default table, solved on first use.
    pub fn shared() -> &'static PainleveTable {
        static TABLE: OnceLock<PainleveTable> = OnceLock::new();
        TABLE.get_or_init(|| Self::solve_default().expect("default Hastings–McLeod solve"))
    }

    /// Derive q′, the tail integral and the CDF from nodal values of q.
    pub fn from_q(grid: Grid, q: Vec<f64>) -> Result<Self> {
        let n = grid.n_points();
        if q.len() != n || n < 16 {
            return precondition("q must have one value per node and at least 16 nodes");
        }
        let h = grid.step();
        let xs = grid.nodes();
        let f: Vec<f64> = xs.iter().zip(&q).map(|(&x, &v)| force(x, v)).collect();
        let mut dq = vec![0.0; n];
        for i in 1..n - 1 {
            dq[i] = (q[i + 1] - q[i - 1]) / (2.0 * h) - h * (f[i + 1] - f[i - 1]) / 12.0;
        }
        dq[0] = (q[1] - q[0]) / h - h * (7.0 * f[0] + 6.0 * f[1] - f[2]) / 24.0;
        let x_max = grid.x_max();
        let a = airy::airy(x_max);
        dq[n - 1] = q[n - 1] * a.ai_prime / a.ai;

        let q = GridFunction::new(grid, q)?;
        let q_prime = GridFunction::new(grid, dq)?;
        let q_sq = q.map(|_, v| v * v);
        let q_sq_tail = cumulative_tail_integral(&q_sq, Some(Tail::AirySquared))?;
        let amp = (q.last() / a.ai).powi(2);
        let outer = Tail::Explicit(amp * airy::edge_density_integral(x_max));
        let log_tw_cdf = cumulative_tail_integral(&q_sq_tail, Some(outer))?.map(|_, v| -v);
        let tw_cdf = log_tw_cdf.map(|_, v| v.exp());
        Ok(Self { grid, q, q_prime, q_sq_tail, tw_cdf, log_tw_cdf, newton_history: Vec::new() })
    }

    /// Max-norm diagnostics of the table invariants.
    pub fn invariants(&self) -> TableInvariants {
        let xs = self.grid.nodes();
        let q = self.q.values();
        let n = xs.len();
        let d2 = self.q.second_derivative_interior();
        let mut ode = 0.0f64;
        for i in 2..n - 2 {
            let scale = 1.0 + force(xs[i], q[i]).abs();
            ode = ode.max((d2[i] - force(xs[i], q[i])).abs() / scale);
        }
        let mut identity = 0.0f64;
        for i in 0..n {
            let qp = self.q_prime.values()[i];
            let rhs = qp * qp - q[i].powi(4) - xs[i] * q[i] * q[i];
            identity = identity.max((self.q_sq_tail.values()[i] - rhs).abs());
        }
        let dlog = self.log_tw_cdf.derivative();
        let mut log_derivative = 0.0f64;
        for i in 2..n - 2 {
            let r = self.q_sq_tail.values()[i];
            log_derivative = log_derivative.max((dlog.values()[i] - r).abs() / (1.0 + r.abs()));
        }
        let f2 = self.tw_cdf.values();
        TableInvariants {
            min_q: q.iter().copied().fold(f64::INFINITY, f64::min),
            ode_residual: ode,
            identity_residual: identity,
            cdf_monotone: f2.windows(2).all(|w| w[1] >= w[0]),
            cdf_at_right_end: f2[n - 1],
            cdf_interior_in_unit_interval: f2[1..n - 1].iter().all(|&v| v > 0.0)
                && self.log_tw_cdf.values()[1..n - 1].iter().all(|&v| v < 0.0),
            log_derivative_residual: log_derivative,
        }
    }

    /// Integral over the grid of `integrand(x, i)·F₂(x)` for nodal integrands.
    pub fn integrate_against_cdf(&self, integrand: impl Fn(usize) -> f64) -> f64 {
        let values: Vec<f64> = (0..self.grid.n_points()).map(|i| integrand(i) * self.tw_cdf.values()[i]).collect();
        GridFunction::new(self.grid, values).expect("finite integrand").integral()
    }

    pub fn x_min(&self) -> f64 {
        self.grid.x_min()
    }

    pub fn x_max(&self) -> f64 {
        self.grid.x_max()
    }
}

/// Table invariant diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct TableInvariants {
    pub min_q: f64,
    /// Fourth-order finite-difference residual of q″ = 2q³ + xq, relative to 1 + |2q³ + xq|.
    pub ode_residual: f64,
    /// Max |R − (q′² − q⁴ − xq²)|.
    pub identity_residual: f64,
    pub cdf_monotone: bool,
    pub cdf_at_right_end: f64,
    /// F₂ > 0 and ln F₂ < 0 at interior nodes (F₂ itself rounds to 1 near x_max).
    pub cdf_interior_in_unit_interval: bool,
    /// Max |(ln F₂)′ − R|/(1 + R).
    pub log_derivative_residual: f64,
}

impl TableInvariants {
    pub fn all_hold(&self) -> bool {
        self.min_q > 0.0
            && self.ode_residual < 1e-6
            && self.identity_residual < 1e-8
            && self.cdf_monotone
            && (self.cdf_at_right_end - 1.0).abs() < 1e-10
            && self.cdf_interior_in_unit_interval
            && self.log_derivative_residual < 1e-6
    }
}

/// `F₂(x) = exp(−∫_x^∞ (u − x) q(u)² du)` by adaptive quadrature on the interpolated table.
///
/// Left of the table the closed-form tail is used; right of it the Airy-squared remainder.
pub fn tracy_widom_f2(table: &PainleveTable, x: f64) -> f64 {
    let x_max = table.x_max();
    let a = airy::airy(x_max);
    let amp = (table.q.last() / a.ai).powi(2);
    if x < table.x_min() {
        return tw_left_tail(x);
    }
    if x >= x_max {
        return (-amp * airy::edge_density_integral(x)).exp();
    }
    let inner = quad_adaptive(
        |u| {
            let qu = table.q.interp(u);
            (u - x) * qu * qu
        },
        x,
        x_max,
        1e-14,
    )
    .unwrap_or_else(|e| match e {
        Error::Accuracy { estimate, .. } => estimate,
        _ => f64::NAN,
    });
    let outer = amp * (airy::edge_density_integral(x_max) + (x_max - x) * airy::edge_density(x_max));
    (-(inner + outer)).exp()
}

/// Mean of the Tracy–Widom GUE distribution, `∫ x dF₂`, integrated by parts over the table.
///
/// The mass outside the table (below 1e-19 on any admissible domain) is dropped.
pub fn tracy_widom_mean(table: &PainleveTable) -> f64 {
    let f = &table.tw_cdf;
    table.x_max() * f.last() - table.x_min() * f.first() - f.integral()
}

/// The α = 1/2 transcendent `−2^{−1/3} q′(−2^{−1/3}s)/q(−2^{−1/3}s)`.
pub fn q_half(table: &PainleveTable, s: f64) -> Result<f64> {
    let k = 2f64.powf(-1.0 / 3.0);
    let x = -k * s;
    if !table.grid.contains(x) {
        return Err(Error::OutOfDomain { x, lo: table.x_min(), hi: table.x_max() });
    }
    Ok(-k * table.q_prime.interp(x) / table.q.interp(x))
}

/// Max-norm residuals of the two quadratic identities linking q_{1/2} to q and R.
#[derive(Debug, Clone, Copy)]
pub struct IdentityReport {
    /// `q½² + q½′ + s/2 − 2^{1/3} q²(x)`.
    pub first: f64,
    /// `−q½² + q½′ − s/2 + 2^{1/3} R(x)/q²(x)`.
    pub second: f64,
    pub samples: usize,
}

/// Check both identities for `s` in `[s_lo, s_hi]` (q½′ by finite differences of q½).
pub fn check_appendix_a_identities(table: &PainleveTable, s_lo: f64, s_hi: f64) -> Result<IdentityReport> {
    let k = 2f64.powf(-1.0 / 3.0);
    let delta = 0.01;
    // x = −k s must stay inside the table for s ± 2δ.
    let s_dom_lo = -table.x_max() / k + 2.0 * delta;
    let s_dom_hi = -table.x_min() / k - 2.0 * delta;
    let lo = s_lo.max(s_dom_lo);
    let hi = s_hi.min(s_dom_hi);
    if !(lo < hi) {
        return precondition(format!("no overlap between s-range [{s_lo}, {s_hi}] and the table"));
    }
    let steps = ((hi - lo) / 0.01).ceil() as usize;
    let (mut first, mut second) = (0.0f64, 0.0f64);
    let c = 2f64.powf(1.0 / 3.0);
    for j in 0..=steps {
        let s = lo + (hi - lo) * j as f64 / steps as f64;
        let v = q_half(table, s)?;
        let d = (q_half(table, s - 2.0 * delta)? - 8.0 * q_half(table, s - delta)? + 8.0 * q_half(table, s + delta)?
            - q_half(table, s + 2.0 * delta)?)
            / (12.0 * delta);
        let x = -k * s;
        let qx = table.q.interp(x);
        let rx = table.q_sq_tail.interp(x);
        first = first.max((v * v + d + s / 2.0 - c * qx * qx).abs());
        second = second.max((-v * v + d - s / 2.0 + c * rx / (qx * qx)).abs());
    }
    Ok(IdentityReport { first, second, samples: steps + 1 })
}

/// `∫[(q′ + qR)² − ¼(q² − R²)²] F₂ dx`, equal to 1/2.
pub fn a2_integral(table: &PainleveTable) -> f64 {
    let q = table.q.values();
    let dq = table.q_prime.values();
    let r = table.q_sq_tail.values();
    table.integrate_against_cdf(|i| {
        let a = dq[i] + q[i] * r[i];
        let b = q[i] * q[i] - r[i] * r[i];
        a * a - 0.25 * b * b
    })
}
