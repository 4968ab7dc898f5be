//! Dormand–Prince 5(4) integrator with continuous output.

use crate::error::{precondition, Error, Result};
use crate::numerics::grid::{Grid, GridFunction};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Initial step magnitude; picked automatically when `None`.
    pub initial_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-12, initial_step: None, max_steps: 1_000_000 }
    }
}

impl OdeOptions {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, ..Self::default() }
    }
}

/// Solution sampled on a grid: `components[j]` holds the j-th state variable.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub components: Vec<GridFunction>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integrate `y' = rhs(x, y)` from `x_start` to `x_end` (either direction) and report
/// the solution at every `samples` point, which must lie in the integration range and be
/// ordered along the direction of integration.
pub fn integrate_ode<F>(
    mut rhs: F,
    x_start: f64,
    x_end: f64,
    y_start: &[f64],
    samples: &[f64],
    opts: &OdeOptions,
) -> Result<(Vec<Vec<f64>>, usize, usize)>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if !(opts.rel_tol > 0.0 && opts.rel_tol < 1.0 && opts.abs_tol > 0.0 && opts.abs_tol < 1.0) {
        return precondition("tolerances must lie in (0, 1)");
    }
    if x_start == x_end || !x_start.is_finite() || !x_end.is_finite() {
        return precondition("integration range must be finite and non-empty");
    }
    let dir = (x_end - x_start).signum();
    let lo = x_start.min(x_end);
    let hi = x_start.max(x_end);
    for w in samples.windows(2) {
        if (w[1] - w[0]) * dir < 0.0 {
            return precondition("sample points must follow the integration direction");
        }
    }
    if samples.iter().any(|&s| s < lo || s > hi) {
        return precondition("sample points outside the integration range");
    }

    let dim = y_start.len();
    let mut y = y_start.to_vec();
    let mut x = x_start;
    let span = (x_end - x_start).abs();
    let mut k = vec![vec![0.0; dim]; 7];
    let mut tmp = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    let mut out = Vec::with_capacity(samples.len());
    let mut next = 0usize;

    while next < samples.len() && samples[next] == x_start {
        out.push(y.clone());
        next += 1;
    }

    rhs(x, &y, &mut k[0]);
    let mut h = opts.initial_step.unwrap_or_else(|| initial_step(&y, &k[0], span, opts)) * dir;
    let (mut accepted, mut rejected) = (0usize, 0usize);
    let mut steps = 0usize;
    let mut cont = vec![vec![0.0; dim]; 5];

    while (x_end - x) * dir > 0.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Diverged { x });
        }
        if (x + h - x_end) * dir > 0.0 {
            h = x_end - x;
        }
        if h.abs() < 1e-14 * x.abs().max(1.0) {
            return Err(Error::Diverged { x });
        }

        let (k1, rest) = k.split_first_mut().unwrap();
        let [k2, k3, k4, k5, k6, k7] = rest else { unreachable!() };
        for i in 0..dim {
            tmp[i] = y[i] + h * A21 * k1[i];
        }
        rhs(x + C2 * h, &tmp, k2);
        for i in 0..dim {
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        rhs(x + C3 * h, &tmp, k3);
        for i in 0..dim {
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        rhs(x + C4 * h, &tmp, k4);
        for i in 0..dim {
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        rhs(x + C5 * h, &tmp, k5);
        for i in 0..dim {
            tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        rhs(x + h, &tmp, k6);
        for i in 0..dim {
            y_new[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        rhs(x + h, &y_new, k7);

        let mut err = 0.0;
        for i in 0..dim {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / dim as f64).sqrt();
        if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            h *= 0.2;
            rejected += 1;
            continue;
        }

        if err <= 1.0 {
            let x_new = x + h;
            if next < samples.len() && (x_new - samples[next]) * dir >= 0.0 {
                for i in 0..dim {
                    let ydiff = y_new[i] - y[i];
                    let bspl = h * k1[i] - ydiff;
                    cont[0][i] = y[i];
                    cont[1][i] = ydiff;
                    cont[2][i] = bspl;
                    cont[3][i] = ydiff - h * k7[i] - bspl;
                    cont[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                while next < samples.len() && (x_new - samples[next]) * dir >= 0.0 {
                    let s = (samples[next] - x) / h;
                    let s1 = 1.0 - s;
                    out.push(
                        (0..dim)
                            .map(|i| {
                                cont[0][i] + s * (cont[1][i] + s1 * (cont[2][i] + s * (cont[3][i] + s1 * cont[4][i])))
                            })
                            .collect(),
                    );
                    next += 1;
                }
            }
            x = x_new;
            y.copy_from_slice(&y_new);
            let (first, last) = k.split_at_mut(6);
            first[0].copy_from_slice(&last[0]);
            accepted += 1;
            let fac = if err == 0.0 { 10.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 10.0) };
            h *= fac;
        } else {
            rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
    }
    while next < samples.len() {
        out.push(y.clone());
        next += 1;
    }
    Ok((out, accepted, rejected))
}

fn initial_step(y: &[f64], dy: &[f64], span: f64, opts: &OdeOptions) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..y.len() {
        let sc = opts.abs_tol + opts.rel_tol * y[i].abs();
        d0 += (y[i] / sc).powi(2);
        d1 += (dy[i] / sc).powi(2);
    }
    let h = if d0 < 1e-10 || d1 < 1e-10 { 1e-6 } else { 0.01 * (d0 / d1).sqrt() };
    h.min(span).max(1e-12 * span)
}

/// Integrate across a whole grid, either upward (`backward = false`) or downward from `x_max`.
pub fn integrate_on_grid<F>(
    rhs: F,
    grid: &Grid,
    backward: bool,
    y_start: &[f64],
    opts: &OdeOptions,
) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let mut nodes = grid.nodes();
    if backward {
        nodes.reverse();
    }
    let (x0, x1) = (nodes[0], nodes[nodes.len() - 1]);
    let (states, accepted, rejected) = integrate_ode(rhs, x0, x1, y_start, &nodes, opts)?;
    let dim = y_start.len();
    let mut columns = vec![Vec::with_capacity(states.len()); dim];
    for s in &states {
        for (j, c) in columns.iter_mut().enumerate() {
            c.push(s[j]);
        }
    }
    if backward {
        columns.iter_mut().for_each(|c| c.reverse());
    }
    let components = columns.into_iter().map(|c| GridFunction::new(*grid, c)).collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { components, accepted_steps: accepted, rejected_steps: rejected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exponential_growth() {
        let opts = OdeOptions::with_tolerances(1e-10, 1e-12);
        let (out, _, _) = integrate_ode(|_, y, dy| dy[0] = y[0], 0.0, 1.0, &[1.0], &[0.5, 1.0], &opts).unwrap();
        assert!((out[1][0] - 1f64.exp()).abs() < 1e-10 * 1f64.exp() * 10.0);
        assert!((out[0][0] - 0.5f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn constant_solution() {
        let g = Grid::new(-2.0, 3.0, 11).unwrap();
        let t = integrate_on_grid(|_, _, dy| dy[0] = 0.0, &g, false, &[4.2], &OdeOptions::default()).unwrap();
        assert!(t.components[0].values().iter().all(|&v| v == 4.2));
    }

    #[test]
    fn airy_downward_from_eight() {
        let a = crate::airy::airy(8.0);
        let opts = OdeOptions::with_tolerances(1e-12, 1e-30);
        let (out, _, _) = integrate_ode(
            |x, y, dy| {
                dy[0] = y[1];
                dy[1] = x * y[0];
            },
            8.0,
            0.0,
            &[a.ai, a.ai_prime],
            &[0.0],
            &opts,
        )
        .unwrap();
        assert!((out[0][0] - 0.355_028_053_887_817_2).abs() < 1e-9);
    }

    #[test]
    fn bad_tolerances_rejected() {
        let opts = OdeOptions::with_tolerances(0.0, 1e-3);
        assert!(integrate_ode(|_, _, _| {}, 0.0, 1.0, &[1.0], &[], &opts).is_err());
    }

    #[test]
    fn blow_up_reports_last_good_x() {
        let opts = OdeOptions { max_steps: 100_000, ..OdeOptions::default() };
        let r = integrate_ode(|_, y, dy| dy[0] = y[0] * y[0], 0.0, 2.0, &[1.0], &[2.0], &opts);
        match r {
            Err(Error::Diverged { x }) => assert!(x > 0.9 && x <= 1.0, "{x}"),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    proptest! {
        // y' = A y with A = [[a, b], [-b, a]] has the closed-form solution e^{ax} R(bx) y0.
        #[test]
        fn linear_system_matches_matrix_exponential(a in -1.0..1.0f64, b in -3.0..3.0f64,
                                                    y0 in -2.0..2.0f64, y1 in -2.0..2.0f64,
                                                    backward in any::<bool>()) {
            let rel = 1e-9;
            let opts = OdeOptions::with_tolerances(rel, 1e-14);
            let end = if backward { -2.0 } else { 2.0 };
            let (out, _, _) = integrate_ode(
                |_, y, dy| { dy[0] = a * y[0] + b * y[1]; dy[1] = -b * y[0] + a * y[1]; },
                0.0, end, &[y0, y1], &[end], &opts).unwrap();
            let (s, c) = (b * end).sin_cos();
            let e = (a * end).exp();
            let ex = [e * (c * y0 + s * y1), e * (-s * y0 + c * y1)];
            let norm = (ex[0].powi(2) + ex[1].powi(2)).sqrt().max(1e-3);
            for j in 0..2 {
                prop_assert!((out[0][j] - ex[j]).abs() <= 10.0 * rel * norm,
                    "{} vs {}", out[0][j], ex[j]);
            }
        }
    }
}
