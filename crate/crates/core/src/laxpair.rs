//! Lax-pair functions (f, g) of the scaled near-edge kernel at spectral parameter r̃.
//!
//! f solves f″ = (x + 2q² − r̃) f with f ~ 2^{−1/6}√π·Ai(x − r̃) as x → ∞, and g follows from
//! q·g = −r̃ ∫_x^∞ q f. Positive r̃ is the density branch, negative r̃ the gap branch.

use crate::airy;
use crate::error::{precondition, Error, Result};
use crate::numerics::ode::integrate_on_grid;
use crate::numerics::special::psi_amplitude;
use crate::numerics::{cumulative_tail_integral, GridFunction, OdeOptions, Tail};
use crate::painleve::PainleveTable;

/// Largest |r̃| accepted by [`solve_psi`].
pub const MAX_ABS_R: f64 = 30.0;

const REL_TOL: f64 = 1e-12;

/// Solution of the Lax pair at one spectral parameter, tabulated on the table grid.
#[derive(Debug, Clone)]
pub struct PsiPair<'t> {
    pub r_tilde: f64,
    pub f: GridFunction,
    /// ∂ₓf from the integrator.
    pub f_prime: GridFunction,
    pub g: GridFunction,
    /// `∫_x^∞ q(u) f(u) du`.
    pub overlap: GridFunction,
    pub table: &'t PainleveTable,
}

/// Integrate the Schrödinger equation downward from `x_max` and build g from the overlap integral.
pub fn solve_psi(r_tilde: f64, table: &PainleveTable) -> Result<PsiPair<'_>> {
    if !r_tilde.is_finite() || r_tilde.abs() > MAX_ABS_R {
        return precondition(format!("|r̃| = {} outside the admissible window [0, {MAX_ABS_R}]", r_tilde.abs()));
    }
    let grid = table.grid;
    let x_max = grid.x_max();
    let potential = table.q.map(|x, q| x + 2.0 * q * q - r_tilde);
    let seed = airy::airy(x_max - r_tilde);
    let norm = seed.ai.abs().max(seed.ai_prime.abs());
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::Diverged { x: x_max });
    }
    let opts = OdeOptions::with_tolerances(REL_TOL, 1e-14);
    let traj = integrate_on_grid(
        |x, y, dy| {
            dy[0] = y[1];
            dy[1] = potential.interp(x) * y[0];
        },
        &grid,
        true,
        &[seed.ai / norm, seed.ai_prime / norm],
        &opts,
    )?;
    let scale = psi_amplitude() * norm;
    let f = traj.components[0].map(|_, v| v * scale);
    let f_prime = traj.components[1].map(|_, v| v * scale);

    let q_amp = table.q.last() / airy::airy(x_max).ai;
    let tail = psi_amplitude() * q_amp * airy::shifted_product_integral(x_max, r_tilde);
    let qf = f.zip(&table.q, |_, a, b| a * b);
    let overlap = cumulative_tail_integral(&qf, Some(Tail::Explicit(tail)))?;
    let g = overlap.zip(&table.q, |_, i, q| -r_tilde * i / q);
    Ok(PsiPair { r_tilde, f, f_prime, g, overlap, table })
}

impl<'t> PsiPair<'t> {
    /// g from the x-equation of the pair, `(q′/q) f − ∂ₓf`, independent of the overlap integral.
    pub fn g_from_x_equation(&self) -> GridFunction {
        let t = self.table;
        let n = t.grid.n_points();
        let values = (0..n)
            .map(|i| {
                let ratio = t.q_prime.values()[i] / t.q.values()[i];
                ratio * self.f.values()[i] - self.f_prime.values()[i]
            })
            .collect();
        GridFunction::new(t.grid, values).expect("finite nodal values")
    }

    /// Invariant diagnostics (max-norm, locally scaled).
    pub fn residuals(&self) -> PsiResiduals {
        let t = self.table;
        let n = t.grid.n_points();
        let xs = t.grid.nodes();
        let q = t.q.values();
        let dq = t.q_prime.values();
        let rt = t.q_sq_tail.values();
        let f = self.f.values();
        let df = self.f_prime.values();
        let g = self.g.values();
        let ov = self.overlap.values();
        let r = self.r_tilde;

        let d2 = self.f.second_derivative_interior();
        let pot: Vec<f64> = (0..n).map(|i| xs[i] + 2.0 * q[i] * q[i] - r).collect();
        let mut schrodinger = 0.0f64;
        for i in 2..n - 2 {
            let local = (i - 2..=i + 2).map(|j| f[j].abs() * (1.0 + pot[j].abs())).fold(0.0, f64::max);
            schrodinger = schrodinger.max((d2[i] - pot[i] * f[i]).abs() / (1.0 + local));
        }

        let mut relation = 0.0f64;
        for i in 0..n {
            let a = dq[i] * f[i];
            let b = q[i] * df[i];
            let c = r * ov[i];
            let scale = a.abs() + b.abs() + c.abs();
            if scale > 0.0 {
                relation = relation.max((a - b + c).abs() / scale);
            }
        }

        let mut conserved = 0.0f64;
        if r != 0.0 {
            let comb: Vec<f64> = (0..n)
                .map(|i| {
                    (r + rt[i] / (q[i] * q[i])) * f[i] * f[i] - 2.0 * dq[i] / q[i] * f[i] * g[i]
                        + (1.0 + q[i] * q[i] / r) * g[i] * g[i]
                })
                .collect();
            let comb = GridFunction::new(t.grid, comb).expect("finite combination");
            let dc = comb.derivative();
            #[allow(clippy::needless_range_loop)]
            for i in 2..n - 2 {
                let scale = f[i] * f[i] + comb.values()[i].abs();
                if scale > 0.0 {
                    conserved = conserved.max((dc.values()[i] + f[i] * f[i]).abs() / scale);
                }
            }
        }

        let a = airy::airy(t.x_max());
        let far = -psi_amplitude() * r * airy::shifted_product_integral(t.x_max(), r) / a.ai;
        PsiResiduals {
            schrodinger,
            relation_fg: relation,
            conserved,
            right_end_g: self.g.last(),
            right_end_g_far_field: far,
        }
    }
}

/// Locally scaled max-norm residuals of a [`PsiPair`].
#[derive(Debug, Clone, Copy)]
pub struct PsiResiduals {
    /// f″ − (x + 2q² − r̃)f by fourth-order differences.
    pub schrodinger: f64,
    /// q·g_x + r̃∫q f with g_x from the x-equation.
    pub relation_fg: f64,
    /// Derivative of the conserved combination plus f² (zero when r̃ = 0, where it is undefined).
    pub conserved: f64,
    pub right_end_g: f64,
    /// −2^{−1/6}√π r̃ ∫_{x_max}^∞ Ai(u)Ai(u − r̃)du / Ai(x_max), the value of g at x_max when q = Ai there.
    pub right_end_g_far_field: f64,
}

/// Residuals of the x-equation and of the r̃-equation of the Lax pair.
#[derive(Debug, Clone, Copy)]
pub struct LaxResiduals {
    pub x_equation: f64,
    pub r_equation: f64,
}

/// Check both Lax equations; `shifted` must be the solution at r̃ + δ on the same table.
///
/// The r̃-derivative is the forward difference, compared with the average of the right-hand
/// sides at r̃ and r̃ + δ (second order at the midpoint).
pub fn lax_residuals(psi: &PsiPair<'_>, shifted: &PsiPair<'_>) -> Result<LaxResiduals> {
    if !std::ptr::eq(psi.table, shifted.table) {
        return precondition("psi pairs were computed on different tables");
    }
    let (r0, r1) = (psi.r_tilde, shifted.r_tilde);
    if r0 == 0.0 || r1 == 0.0 || r0 == r1 {
        return precondition("lax residuals need two distinct non-zero spectral parameters");
    }
    let t = psi.table;
    let n = t.grid.n_points();
    let q = t.q.values();
    let dq = t.q_prime.values();
    let rt = t.q_sq_tail.values();

    let dg = psi.g.derivative();
    let mut x_eq = 0.0f64;
    for i in 0..n {
        let ratio = dq[i] / q[i];
        let (f, df, g) = (psi.f.values()[i], psi.f_prime.values()[i], psi.g.values()[i]);
        let rhs = ratio * f - g;
        let s1 = df.abs() + (ratio * f).abs() + g.abs();
        if s1 > 0.0 {
            x_eq = x_eq.max((df - rhs).abs() / s1);
        }
        let rhs_g = r0 * f - ratio * g;
        let lhs_g = dg.values()[i];
        let s2 = lhs_g.abs() + (r0 * f).abs() + (ratio * g).abs();
        if s2 > 0.0 {
            x_eq = x_eq.max((lhs_g - rhs_g).abs() / s2);
        }
    }

    let delta = r1 - r0;
    let a_rhs = |p: &PsiPair<'_>, i: usize| -> (f64, f64) {
        let r = p.r_tilde;
        let ratio = dq[i] / q[i];
        let (f, g) = (p.f.values()[i], p.g.values()[i]);
        (-ratio * f + (1.0 + q[i] * q[i] / r) * g, (-r - rt[i] / (q[i] * q[i])) * f + ratio * g)
    };
    let mut r_eq = 0.0f64;
    for i in 0..n {
        let (fa, ga) = a_rhs(psi, i);
        let (fb, gb) = a_rhs(shifted, i);
        let df = (shifted.f.values()[i] - psi.f.values()[i]) / delta;
        let dg = (shifted.g.values()[i] - psi.g.values()[i]) / delta;
        let (rf, rg) = (0.5 * (fa + fb), 0.5 * (ga + gb));
        let sf = df.abs() + fa.abs().max(fb.abs());
        let sg = dg.abs() + ga.abs().max(gb.abs());
        if sf > 0.0 {
            r_eq = r_eq.max((df - rf).abs() / sf);
        }
        if sg > 0.0 {
            r_eq = r_eq.max((dg - rg).abs() / sg);
        }
    }
    Ok(LaxResiduals { x_equation: x_eq, r_equation: r_eq })
}

/// Coefficients of f(r̃, x) = f₀(x) + r̃ f₁(x) + r̃² f₂(x) + O(r̃³).
#[derive(Debug, Clone)]
pub struct SmallRExpansion {
    pub f0: GridFunction,
    pub f1: GridFunction,
    pub f2: GridFunction,
}

pub fn small_r_expansion(table: &PainleveTable) -> SmallRExpansion {
    let c = psi_amplitude();
    let q = &table.q;
    let dq = table.q_prime.values();
    let rt = table.q_sq_tail.values();
    let f0 = q.map(|_, v| c * v);
    let f1 = GridFunction::new(
        table.grid,
        (0..table.grid.n_points()).map(|i| -c * (dq[i] + q.values()[i] * rt[i])).collect(),
    )
    .expect("finite");
    let c2 = 2f64.powf(-7.0 / 6.0) * std::f64::consts::PI.sqrt();
    let f2 = GridFunction::new(
        table.grid,
        (0..table.grid.n_points())
            .map(|i| {
                let (qv, d, r) = (q.values()[i], dq[i], rt[i]);
                c2 * (d * d / qv + d * r - r / qv - qv * qv * qv / 2.0 + qv * r * r / 2.0)
            })
            .collect(),
    )
    .expect("finite");
    SmallRExpansion { f0, f1, f2 }
}
