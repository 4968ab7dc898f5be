//! Self-check suite: table invariants, identities, closed forms and normalizations.

use std::f64::consts::SQRT_2;

use crate::error::Result;
use crate::finite_n::{self, closed_form, ExactModel};
use crate::laxpair::{lax_residuals, solve_psi};
use crate::numerics::quad_adaptive;
use crate::painleve::{self, PainleveTable};
use crate::scaling;

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, result: Result<(bool, String)>) -> CheckOutcome {
    match result {
        Ok((passed, detail)) => CheckOutcome { name, passed, detail },
        Err(e) => CheckOutcome { name, passed: false, detail: format!("error: {e}") },
    }
}

fn table_invariants(t: &PainleveTable) -> Result<(bool, String)> {
    let inv = t.invariants();
    Ok((inv.all_hold(), format!("{inv:?}")))
}

fn a2(t: &PainleveTable) -> Result<(bool, String)> {
    let v = painleve::a2_integral(t);
    Ok(((v - 0.5).abs() < 1e-4, format!("a2 = {v:.10}")))
}

fn identities(t: &PainleveTable) -> Result<(bool, String)> {
    let r = painleve::check_appendix_a_identities(t, -6.0, 6.0)?;
    Ok((r.first < 1e-5 && r.second < 1e-5, format!("max residuals {:.2e}, {:.2e}", r.first, r.second)))
}

fn psi_invariants(t: &PainleveTable) -> Result<(bool, String)> {
    let mut worst = [0.0f64; 3];
    for &r in &[0.5, 2.0, 5.0, -0.5, -2.0, -5.0] {
        let res = solve_psi(r, t)?.residuals();
        worst[0] = worst[0].max(res.schrodinger);
        worst[1] = worst[1].max(res.relation_fg);
        worst[2] = worst[2].max(res.conserved);
    }
    let ok = worst[0] < 1e-5 && worst[1] < 1e-5 && worst[2] < 1e-4;
    Ok((ok, format!("schrodinger {:.2e}, relation {:.2e}, conserved {:.2e}", worst[0], worst[1], worst[2])))
}

fn lax(t: &PainleveTable) -> Result<(bool, String)> {
    let (mut x_eq, mut r_eq) = (0.0f64, 0.0f64);
    for &r in &[2.0, 5.0, -2.0, -5.0] {
        let a = solve_psi(r, t)?;
        let b = solve_psi(r + 1e-4, t)?;
        let res = lax_residuals(&a, &b)?;
        x_eq = x_eq.max(res.x_equation);
        r_eq = r_eq.max(res.r_equation);
    }
    Ok((x_eq < 1e-5 && r_eq < 1e-3, format!("x-equation {x_eq:.2e}, r-equation {r_eq:.2e}")))
}

fn op_closed_forms() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for &y in &[-1.0, 0.0, 0.7, 2.0] {
        let sys = finite_n::build_ortho_system(y, 4)?;
        for k in 0..4 {
            let h = closed_form::h(k, y).expect("k ≤ 3");
            worst = worst.max((sys.h[k] - h).abs() / h.max(1.0));
            for &l in &[-1.2, 0.3, 1.7] {
                let p = closed_form::pi(k, l, y).expect("k ≤ 3");
                worst = worst.max((sys.pi_k(k, l)? - p).abs());
            }
        }
        worst = worst.max(finite_n::recurrence_consistency(&sys));
    }
    Ok((worst < 1e-8, format!("max deviation {worst:.2e}")))
}

fn kernel_identities() -> Result<(bool, String)> {
    let (y, n) = (0.5, 4);
    let sys = finite_n::build_ortho_system(y, n)?;
    let trace = quad_adaptive(|x| finite_n::kernel(&sys, x, x), y - 14.0, y, 1e-12)?;
    let repro = quad_adaptive(|r| finite_n::kernel(&sys, y, y - r).powi(2), 0.0, 14.0, 1e-12)?;
    let k_yy = finite_n::kernel(&sys, y, y);
    let d = 1e-5;
    let dlog = (finite_n::cdf_lambda_max(y + d, n)?.ln() - finite_n::cdf_lambda_max(y - d, n)?.ln()) / (2.0 * d);
    let e = [(trace - n as f64).abs(), (repro - k_yy).abs(), (dlog - k_yy).abs()];
    Ok((
        e[0] < 1e-6 && e[1] < 1e-6 && e[2] < 1e-5,
        format!("trace {:.2e}, reproducing {:.2e}, log-derivative {:.2e}", e[0], e[1], e[2]),
    ))
}

fn finite_n_normalizations() -> Result<(bool, String)> {
    let model = ExactModel::new(4)?;
    let dos = quad_adaptive(|r| model.dos(r), 0.0, 14.0, 1e-10)?;
    let gap = quad_adaptive(|r| model.gap_pdf(r), 0.0, 10.0, 1e-10)?;
    let two = ExactModel::new(2)?;
    let worst_two = [0.2, 0.8, 1.5, 2.5, 4.0]
        .iter()
        .map(|&s| (two.gap_pdf(s) - finite_n::gap_pdf_two(s)).abs())
        .fold(0.0, f64::max);
    let ok = (dos - 1.0).abs() < 1e-4 && (gap - 1.0).abs() < 1e-4 && worst_two < 1e-6;
    Ok((ok, format!("∫dos = {dos:.8}, ∫gap = {gap:.8}, N = 2 gap deviation {worst_two:.2e}")))
}

fn scaling_normalizations(t: &PainleveTable) -> Result<(bool, String)> {
    let gap = scaling::gap_normalization(t, 30.0)?;
    let bulk = quad_adaptive(scaling::rho_bulk_shifted, 0.0, 2.0 * SQRT_2, 1e-12)?;
    Ok(((gap - 1.0).abs() < 1e-3 && (bulk - 1.0).abs() < 1e-9, format!("∫p̃ = {gap:.8}, ∫ρ̃_bulk = {bulk:.10}")))
}

fn tw_left_tail(t: &PainleveTable) -> Result<(bool, String)> {
    let f = painleve::tracy_widom_f2(t, -8.0);
    let a = painleve::tw_left_tail(-8.0);
    Ok(((f / a - 1.0).abs() < 0.01, format!("F2(−8) = {f:.6e}, tail form {a:.6e}")))
}

/// Run every check against `table`.
pub fn run_checks(table: &PainleveTable) -> Vec<CheckOutcome> {
    vec![
        outcome("painleve table invariants", table_invariants(table)),
        outcome("a2 = 1/2", a2(table)),
        outcome("q identities on [-6, 6]", identities(table)),
        outcome("psi pair invariants", psi_invariants(table)),
        outcome("lax residuals", lax(table)),
        outcome("orthogonal polynomial closed forms", op_closed_forms()),
        outcome("kernel identities (N = 4)", kernel_identities()),
        outcome("finite-N normalizations", finite_n_normalizations()),
        outcome("scaling normalizations", scaling_normalizations(table)),
        outcome("F2 left tail", tw_left_tail(table)),
    ]
}
