//! Edge scaling functions of the near-maximum density and of the first gap, with their
//! small- and large-distance asymptotics.

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;

use crate::airy;
use crate::error::{precondition, Result};
use crate::laxpair::{solve_psi, PsiPair, MAX_ABS_R};
use crate::numerics::special::{psi_amplitude, ZETA_PRIME_MINUS_ONE};
use crate::numerics::{cumulative_tail_integral, gauss_legendre, quad_adaptive, GridFunction, Tail};
use crate::painleve::PainleveTable;

/// Default upper end of the exactly computed part of a curve.
pub const DEFAULT_EXACT_LIMIT: f64 = 12.0;

fn prefactor() -> f64 {
    2f64.powf(1.0 / 3.0) / PI
}

/// `∫[f² − (∫_x^∞ q f)²] F₂ dx` over the table plus analytic tails.
fn kernel_integral(psi: &PsiPair<'_>, use_x_equation: bool) -> f64 {
    let t = psi.table;
    let f = psi.f.values();
    let ov = psi.overlap.values();
    let gx = use_x_equation.then(|| psi.g_from_x_equation());
    let q = t.q.values();
    let r = psi.r_tilde;
    let n = t.grid.n_points();
    let values: Vec<f64> = (0..n)
        .map(|i| {
            let second = match &gx {
                Some(g) => (q[i] * g.values()[i] / r).powi(2),
                None => ov[i] * ov[i],
            };
            (f[i] * f[i] - second) * t.tw_cdf.values()[i]
        })
        .collect();
    let body = GridFunction::new(t.grid, values.clone()).expect("finite").integral();

    // beyond x_max: q is negligible, so f = c·Ai(x − r̃) and the overlap term vanishes
    let right = psi_amplitude().powi(2) * airy::edge_density(t.x_max() - r);

    // below x_min the integrand decays with F₂; close it with an exponential model
    let h = t.grid.step();
    let (v0, v1) = (values[0], values[1]);
    let left = if v0 != 0.0 && v1 != 0.0 && v0.signum() == v1.signum() {
        let slope = (v1.abs().ln() - v0.abs().ln()) / h;
        if slope > 0.0 {
            v0 / slope
        } else {
            0.0
        }
    } else {
        0.0
    };
    let left = if left.abs() > 1e-12 { left } else { 0.0 };
    body + right + left
}

/// Edge scaling function of the density of eigenvalues at distance r̃ below the maximum.
pub fn rho_edge_scaling(r_tilde: f64, table: &PainleveTable) -> Result<f64> {
    if !(0.0..=MAX_ABS_R).contains(&r_tilde) {
        return precondition(format!("r̃ = {r_tilde} outside [0, {MAX_ABS_R}]"));
    }
    let psi = solve_psi(r_tilde, table)?;
    Ok((prefactor() * kernel_integral(&psi, false)).max(0.0))
}

/// Edge scaling function of the first-gap density.
pub fn p_typ(r_tilde: f64, table: &PainleveTable) -> Result<f64> {
    if !(0.0..=MAX_ABS_R).contains(&r_tilde) {
        return precondition(format!("r̃ = {r_tilde} outside [0, {MAX_ABS_R}]"));
    }
    let psi = solve_psi(-r_tilde, table)?;
    Ok((prefactor() * kernel_integral(&psi, false)).max(0.0))
}

/// The same gap density with the overlap term written as q²g²/r̃², g taken from the
/// x-equation of the Lax pair (independent cross-check of [`p_typ`]).
pub fn p_typ_g_form(r_tilde: f64, table: &PainleveTable) -> Result<f64> {
    if !(r_tilde > 0.0 && r_tilde <= MAX_ABS_R) {
        return precondition(format!("r̃ = {r_tilde} outside (0, {MAX_ABS_R}]"));
    }
    let psi = solve_psi(-r_tilde, table)?;
    Ok(prefactor() * kernel_integral(&psi, true))
}

/// Density near the maximum with the large-r̃ form √r̃/π past the solvable window.
pub fn rho_edge_or_asymptotic(r_tilde: f64, table: &PainleveTable) -> Result<f64> {
    if r_tilde > MAX_ABS_R {
        Ok(r_tilde.sqrt() / PI)
    } else {
        rho_edge_scaling(r_tilde, table)
    }
}

/// Gap density with the stretched-exponential tail past the solvable window.
pub fn p_typ_or_asymptotic(r_tilde: f64, table: &PainleveTable) -> Result<f64> {
    if r_tilde > MAX_ABS_R {
        Ok(gap_tail_asymptotic(r_tilde))
    } else {
        p_typ(r_tilde, table)
    }
}

/// Semicircle seen from the spectral edge: `(1/π)√(x̂(2√2 − x̂))` on `(0, 2√2)`.
pub fn rho_bulk_shifted(x_hat: f64) -> f64 {
    let w = 2.0 * SQRT_2;
    if x_hat > 0.0 && x_hat < w {
        (x_hat * (w - x_hat)).sqrt() / PI
    } else {
        0.0
    }
}

/// Amplitude of the stretched-exponential gap tail, `2^{−91/48} e^{ζ′(−1)}/√π`.
pub fn gap_tail_constant() -> f64 {
    2f64.powf(-91.0 / 48.0) * ZETA_PRIME_MINUS_ONE.exp() / PI.sqrt()
}

/// Large-r̃ form of the gap density including its first correction.
pub fn gap_tail_asymptotic(r_tilde: f64) -> f64 {
    let r = r_tilde;
    let r34 = r.powf(0.75);
    gap_tail_constant()
        * (-(4.0 / 3.0) * r.powf(1.5) + (8.0 / 3.0) * SQRT_2 * r34).exp()
        * r.powf(-21.0 / 32.0)
        * (1.0 - 1405.0 * SQRT_2 / 1536.0 / r34)
}

/// Quartic coefficient of the common small-r̃ expansion and its auxiliary function H.
#[derive(Debug, Clone)]
pub struct QuarticCoefficient {
    pub value: f64,
    /// `H = −½q²R + R³/6 + ∫_x^∞ (q⁴ + u q²) du`.
    pub h: GridFunction,
}

/// `½∫[H + ½(T² − H²)] F₂ dx` with `T = H′/q = −(q′R + ½q³ + ½qR² + xq)`.
pub fn a4_integral(table: &PainleveTable) -> QuarticCoefficient {
    let x_max = table.x_max();
    let a = airy::airy(x_max);
    let amp = (table.q.last() / a.ai).powi(2);
    // ∫_{x_max}^∞ u Ai² du = (x Ai′² − x² Ai² − Ai Ai′)/3 ; the q⁴ part is far below rounding
    let tail = amp * (x_max * a.ai_prime * a.ai_prime - x_max * x_max * a.ai * a.ai - a.ai * a.ai_prime) / 3.0;
    let integrand = table.q.map(|x, q| q.powi(4) + x * q * q);
    let k = cumulative_tail_integral(&integrand, Some(Tail::Explicit(tail))).expect("explicit tail");
    let q = table.q.values();
    let dq = table.q_prime.values();
    let r = table.q_sq_tail.values();
    let xs = table.grid.nodes();
    let h: Vec<f64> = (0..xs.len()).map(|i| -0.5 * q[i] * q[i] * r[i] + r[i].powi(3) / 6.0 + k.values()[i]).collect();
    let value = 0.5
        * table.integrate_against_cdf(|i| {
            let t = -(dq[i] * r[i] + 0.5 * q[i].powi(3) + 0.5 * q[i] * r[i] * r[i] + xs[i] * q[i]);
            h[i] + 0.5 * (t * t - h[i] * h[i])
        });
    QuarticCoefficient { value, h: GridFunction::new(table.grid, h).expect("finite") }
}

/// Finite-N density of eigenvalues at distance `r` below the maximum, from the edge scaling form.
pub fn dos_finite_n_edge(r: f64, n: usize, table: &PainleveTable) -> Result<f64> {
    if n < 1 || !(r >= 0.0) {
        return precondition("need n ≥ 1 and r ≥ 0");
    }
    let nf = n as f64;
    let s = SQRT_2 * nf.powf(1.0 / 6.0);
    Ok(SQRT_2 * nf.powf(-5.0 / 6.0) * rho_edge_or_asymptotic(s * r, table)?)
}

/// Finite-N first-gap density from the edge scaling form.
pub fn gap_finite_n(r: f64, n: usize, table: &PainleveTable) -> Result<f64> {
    if n < 1 || !(r >= 0.0) {
        return precondition("need n ≥ 1 and r ≥ 0");
    }
    let s = SQRT_2 * (n as f64).powf(1.0 / 6.0);
    Ok(s * p_typ_or_asymptotic(s * r, table)?)
}

/// Which scaling function a curve holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    DosEdge,
    GapTyp,
    DosBulk,
}

/// Tabulated scaling function with its small- and large-r̃ approximations.
#[derive(Debug, Clone)]
pub struct ScalingCurve {
    pub kind: CurveKind,
    pub r_values: Vec<f64>,
    pub values: Vec<f64>,
    pub asymptotic_small: Vec<f64>,
    pub asymptotic_large: Vec<f64>,
}

impl ScalingCurve {
    /// Trapezoid integral of the tabulated values plus, for the gap, the asymptotic remainder.
    pub fn trapezoid_mass(&self) -> f64 {
        let body: f64 = self
            .r_values
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(r, v)| 0.5 * (r[1] - r[0]) * (v[0] + v[1]))
            .sum();
        let end = *self.r_values.last().unwrap_or(&0.0);
        let tail = match self.kind {
            CurveKind::GapTyp if end > 0.0 => quad_adaptive(gap_tail_asymptotic, end, end + 30.0, 1e-12).unwrap_or(0.0),
            _ => 0.0,
        };
        body + tail
    }
}

/// Tabulate a scaling function on `[0, r_max]` with spacing `step`.
///
/// Points up to `exact_limit` are computed from the Lax pair; beyond it the large-r̃ forms are used.
pub fn tabulate_curve(
    kind: CurveKind,
    r_max: f64,
    step: f64,
    exact_limit: f64,
    table: &PainleveTable,
) -> Result<ScalingCurve> {
    if !(r_max > 0.0 && step > 0.0 && step <= r_max) {
        return precondition("need 0 < step ≤ r_max");
    }
    if !(0.0..=MAX_ABS_R).contains(&exact_limit) {
        return precondition(format!("exact limit must lie in [0, {MAX_ABS_R}]"));
    }
    let count = (r_max / step + 1e-9).floor() as usize + 1;
    let r_values: Vec<f64> = (0..count).map(|i| i as f64 * step).collect();
    let a4 = match kind {
        CurveKind::DosBulk => 0.0,
        _ => a4_integral(table).value,
    };
    let values = r_values
        .par_iter()
        .map(|&r| -> Result<f64> {
            match kind {
                CurveKind::DosBulk => Ok(rho_bulk_shifted(r)),
                CurveKind::DosEdge if r <= exact_limit => rho_edge_scaling(r, table),
                CurveKind::DosEdge => Ok(r.sqrt() / PI),
                CurveKind::GapTyp if r <= exact_limit => p_typ(r, table),
                CurveKind::GapTyp => Ok(gap_tail_asymptotic(r)),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let asymptotic_small = r_values
        .iter()
        .map(|&r| match kind {
            CurveKind::DosBulk => (2.0 * SQRT_2 * r).sqrt() / PI,
            _ => 0.5 * r * r + a4 * r.powi(4),
        })
        .collect();
    let asymptotic_large = r_values
        .iter()
        .map(|&r| match kind {
            CurveKind::DosEdge => r.sqrt() / PI,
            // the correction factor turns negative near the origin, where the form is meaningless
            CurveKind::GapTyp if gap_tail_asymptotic(r) > 0.0 => gap_tail_asymptotic(r),
            CurveKind::GapTyp => f64::NAN,
            CurveKind::DosBulk => f64::NAN,
        })
        .collect();
    Ok(ScalingCurve { kind, r_values, values, asymptotic_small, asymptotic_large })
}

/// Least-squares coefficients of `y ≈ c₂r² + c₄r⁴ + c₆r⁶`.
pub fn fit_even_coefficients(r: &[f64], y: &[f64]) -> Result<[f64; 3]> {
    if r.len() != y.len() || r.len() < 3 {
        return precondition("need at least three (r, y) pairs of equal length");
    }
    // normal equations in the basis r², r⁴, r⁶, scaled by the largest r to stay well conditioned
    let scale = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return precondition("all abscissae are zero");
    }
    let mut m = [[0.0f64; 4]; 3];
    for (&ri, &yi) in r.iter().zip(y) {
        let u = (ri / scale).powi(2);
        let basis = [u, u * u, u * u * u];
        for a in 0..3 {
            for b in 0..3 {
                m[a][b] += basis[a] * basis[b];
            }
            m[a][3] += basis[a] * yi;
        }
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
        m.swap(col, pivot);
        for row in 0..3 {
            if row != col {
                let factor = m[row][col] / m[col][col];
                #[allow(clippy::needless_range_loop)]
                for k in col..4 {
                    m[row][k] -= factor * m[col][k];
                }
            }
        }
    }
    let c = [m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]];
    Ok([c[0] / scale.powi(2), c[1] / scale.powi(4), c[2] / scale.powi(6)])
}

/// `∫₀^∞ p̃_typ`: Gauss–Legendre panels over the solvable window plus the asymptotic remainder.
pub fn gap_normalization(table: &PainleveTable, upper: f64) -> Result<f64> {
    let upper = upper.min(MAX_ABS_R);
    let gl = gauss_legendre(10);
    let panels = (upper / 0.5).ceil() as usize;
    let nodes = gl.composite(0.0, upper, panels);
    let body: f64 =
        nodes.par_iter().map(|&(r, w)| p_typ(r, table).map(|v| w * v)).collect::<Result<Vec<_>>>()?.into_iter().sum();
    let tail = quad_adaptive(gap_tail_asymptotic, upper, upper + 30.0, 1e-12)?;
    Ok(body + tail)
}
