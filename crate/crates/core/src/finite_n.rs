//! Exact finite-N statistics from orthogonal polynomials on a half-line: the largest-eigenvalue
//! CDF, the density of eigenvalues below the maximum and the first-gap density.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{precondition, Result};
use crate::numerics::gauss_legendre;

/// Largest matrix size for which the recurrence stays well conditioned in double precision.
pub const MAX_N: usize = 12;

/// Quadrature extent below the truncation point, in units of the weight width.
const WEIGHT_REACH: f64 = 12.0;
const WEIGHT_PANEL: f64 = 0.5;
const WEIGHT_ORDER: usize = 20;
/// Separation below which the kernel is summed term by term instead of the two-term form.
const NEAR_DIAGONAL: f64 = 1e-3;
/// Mass of the largest-eigenvalue law left above the y-window.
const WINDOW_MASS: f64 = 1e-12;
/// Lower cut; the continuation to negative `r` grows like `e^{2|y r|}` there, so it sits much deeper.
const WINDOW_MASS_LOW: f64 = 1e-40;
const Y_PANEL: f64 = 0.25;
const Y_ORDER: usize = 12;

/// Monic polynomials orthogonal against `e^{−λ²}` on `(−∞, y]`.
///
/// Degrees `0..=n` are kept so that the two-term kernel of size `n` is available.
#[derive(Debug, Clone)]
pub struct OrthoSystem {
    pub y: f64,
    pub n: usize,
    /// Squared norms `h_0..h_n`.
    pub h: Vec<f64>,
    /// `ln h_k`, finite even where `h_k` underflows.
    pub ln_h: Vec<f64>,
    /// Diagonal recurrence coefficients `S_0..S_n`.
    pub s_coef: Vec<f64>,
    /// Off-diagonal coefficients; `r_coef[k − 1] = R_k` for `k = 1..=n`.
    pub r_coef: Vec<f64>,
}

fn weight_nodes(y: f64) -> (Vec<f64>, Vec<f64>, f64) {
    let reach = y.max(0.0) + WEIGHT_REACH;
    let panels = (reach / WEIGHT_PANEL).ceil() as usize;
    // weights are scaled by e^{y²} below the origin so that they never underflow
    let shift = if y < 0.0 { y * y } else { 0.0 };
    let gl = gauss_legendre(WEIGHT_ORDER);
    let (lam, w) = gl
        .composite(0.0, reach, panels)
        .into_iter()
        .map(|(t, wt)| {
            let l = y - t;
            (l, wt * (shift - l * l).exp())
        })
        .unzip();
    (lam, w, shift)
}

/// Build the recurrence for `n` polynomials at truncation point `y` by the Stieltjes procedure.
pub fn build_ortho_system(y: f64, n: usize) -> Result<OrthoSystem> {
    if !(1..=MAX_N).contains(&n) {
        return precondition(format!("n = {n} outside [1, {MAX_N}]"));
    }
    if !y.is_finite() {
        return precondition("truncation point must be finite");
    }
    let (lam, w, shift) = weight_nodes(y);
    let mut prev = vec![0.0; lam.len()];
    let mut cur = vec![1.0; lam.len()];
    let mut scaled_h: Vec<f64> = Vec::with_capacity(n + 1);
    let mut s_coef = Vec::with_capacity(n + 1);
    let mut r_coef = Vec::with_capacity(n);
    for k in 0..=n {
        let (mut hk, mut first, mut cross) = (0.0, 0.0, 0.0);
        for i in 0..lam.len() {
            let wp = w[i] * cur[i];
            hk += wp * cur[i];
            first += wp * lam[i] * cur[i];
            cross += wp * lam[i] * prev[i];
        }
        if !(hk > 0.0) {
            return precondition(format!("norm h_{k} lost positivity at y = {y}"));
        }
        let sk = first / hk;
        let rk = if k == 0 { 0.0 } else { cross / scaled_h[k - 1] };
        if k > 0 {
            r_coef.push(rk);
        }
        scaled_h.push(hk);
        s_coef.push(sk);
        if k < n {
            let next: Vec<f64> = (0..lam.len()).map(|i| (lam[i] - sk) * cur[i] - rk * prev[i]).collect();
            prev = std::mem::replace(&mut cur, next);
        }
    }
    let ln_h: Vec<f64> = scaled_h.iter().map(|h| h.ln() - shift).collect();
    let h = ln_h.iter().map(|l| l.exp()).collect();
    Ok(OrthoSystem { y, n, h, ln_h, s_coef, r_coef })
}

impl OrthoSystem {
    /// Monic polynomials `π_0..π_n` and their derivatives at `λ`.
    fn polynomials(&self, lambda: f64) -> (Vec<f64>, Vec<f64>) {
        let mut p = Vec::with_capacity(self.n + 1);
        let mut dp = Vec::with_capacity(self.n + 1);
        p.push(1.0);
        dp.push(0.0);
        for k in 0..self.n {
            let (pk, dpk) = (p[k], dp[k]);
            let (pm, dpm, rk) = if k == 0 { (0.0, 0.0, 0.0) } else { (p[k - 1], dp[k - 1], self.r_coef[k - 1]) };
            p.push((lambda - self.s_coef[k]) * pk - rk * pm);
            dp.push(pk + (lambda - self.s_coef[k]) * dpk - rk * dpm);
        }
        (p, dp)
    }

    /// Monic polynomial `π_k(λ)`.
    pub fn pi_k(&self, k: usize, lambda: f64) -> Result<f64> {
        if k > self.n {
            return precondition(format!("degree {k} exceeds {}", self.n));
        }
        Ok(self.polynomials(lambda).0[k])
    }

    /// Normalized wave functions `ψ_0..ψ_n` and derivatives at `λ`.
    fn waves(&self, lambda: f64) -> (Vec<f64>, Vec<f64>) {
        let (p, dp) = self.polynomials(lambda);
        let (psi, dpsi) = (0..=self.n)
            .map(|k| {
                let e = (-0.5 * lambda * lambda - 0.5 * self.ln_h[k]).exp();
                (p[k] * e, (dp[k] - lambda * p[k]) * e)
            })
            .unzip();
        (psi, dpsi)
    }

    /// Kernel on the diagonal from the derivative form of the two-term expression.
    fn kernel_diagonal(&self, lambda: f64) -> f64 {
        let (psi, dpsi) = self.waves(lambda);
        let n = self.n;
        self.r_coef[n - 1].sqrt() * (dpsi[n] * psi[n - 1] - dpsi[n - 1] * psi[n])
    }

    /// Term-by-term kernel `Σ_{k<n} ψ_k(λ₁)ψ_k(λ₂)`.
    pub fn kernel_sum(&self, lambda1: f64, lambda2: f64) -> f64 {
        let (a, _) = self.waves(lambda1);
        let (b, _) = self.waves(lambda2);
        (0..self.n).map(|k| a[k] * b[k]).sum()
    }
}

/// Normalized wave function `ψ_k(λ) = π_k(λ) e^{−λ²/2}/√h_k`.
pub fn psi_k(sys: &OrthoSystem, k: usize, lambda: f64) -> Result<f64> {
    if k >= sys.n {
        return precondition(format!("index {k} not below n = {}", sys.n));
    }
    Ok(sys.waves(lambda).0[k])
}

/// Christoffel–Darboux kernel of size `n`, symmetric in its arguments.
pub fn kernel(sys: &OrthoSystem, lambda1: f64, lambda2: f64) -> f64 {
    let d = lambda1 - lambda2;
    if d == 0.0 {
        return sys.kernel_diagonal(lambda1);
    }
    if d.abs() < NEAR_DIAGONAL * (1.0 + lambda1.abs()) {
        return sys.kernel_sum(lambda1, lambda2);
    }
    let n = sys.n;
    let (a, _) = sys.waves(lambda1);
    let (b, _) = sys.waves(lambda2);
    sys.r_coef[n - 1].sqrt() * (a[n] * b[n - 1] - a[n - 1] * b[n]) / d
}

/// `ln(N!/Z_N)` with `Z_N = 2^{−N²/2}(2π)^{N/2} ∏_{j=1}^N j!`.
fn ln_cdf_prefactor(n: usize) -> f64 {
    let ln_fact = |m: usize| (1..=m).map(|j| (j as f64).ln()).sum::<f64>();
    let nf = n as f64;
    let ln_z = -0.5 * nf * nf * 2f64.ln() + 0.5 * nf * (2.0 * PI).ln() + (1..=n).map(ln_fact).sum::<f64>();
    ln_fact(n) - ln_z
}

fn cdf_from_system(sys: &OrthoSystem) -> f64 {
    let ln_f = ln_cdf_prefactor(sys.n) + sys.ln_h[..sys.n].iter().sum::<f64>();
    ln_f.exp().clamp(0.0, 1.0)
}

/// Distribution function of the largest eigenvalue, `F_N(y) = (N!/Z_N) ∏ h_j(y)`.
pub fn cdf_lambda_max(y: f64, n: usize) -> Result<f64> {
    Ok(cdf_from_system(&build_ortho_system(y, n)?))
}

struct YNode {
    y: f64,
    /// Quadrature weight times `F_N(y)`.
    weight: f64,
    k_yy: f64,
    sys: OrthoSystem,
}

/// Precomputed y-quadrature for the exact density below the maximum at fixed N.
pub struct ExactModel {
    n: usize,
    nodes: Vec<YNode>,
    window: (f64, f64),
}

fn bisect(mut lo: f64, mut hi: f64, below: impl Fn(f64) -> Result<bool>) -> Result<f64> {
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if below(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-6 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

impl ExactModel {
    pub fn new(n: usize) -> Result<Self> {
        if !(2..=MAX_N).contains(&n) {
            return precondition(format!("n = {n} outside [2, {MAX_N}]"));
        }
        let edge = (2.0 * n as f64).sqrt();
        let y_lo = bisect(-edge - 20.0, edge, |y| Ok(cdf_lambda_max(y, n)? < WINDOW_MASS_LOW))?;
        let y_hi = bisect(-edge, edge + 20.0, |y| Ok(1.0 - cdf_lambda_max(y, n)? > WINDOW_MASS))?;
        let panels = ((y_hi - y_lo) / Y_PANEL).ceil() as usize;
        let nodes = gauss_legendre(Y_ORDER)
            .composite(y_lo, y_hi, panels)
            .into_par_iter()
            .map(|(y, w)| {
                let sys = build_ortho_system(y, n)?;
                let k_yy = kernel(&sys, y, y);
                Ok(YNode { y, weight: w * cdf_from_system(&sys), k_yy, sys })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExactModel { n, nodes, window: (y_lo, y_hi) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Integration window in the truncation point.
    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    /// Density of eigenvalues at distance `r` below the maximum; negative `r` continues it analytically.
    pub fn dos(&self, r: f64) -> f64 {
        let sum: f64 = self
            .nodes
            .iter()
            .map(|nd| {
                let shifted = nd.y - r;
                let k_rr = kernel(&nd.sys, shifted, shifted);
                let k_yr = kernel(&nd.sys, nd.y, shifted);
                nd.weight * (nd.k_yy * k_rr - k_yr * k_yr)
            })
            .sum();
        sum / (self.n - 1) as f64
    }

    /// First-gap density, `(N − 1)·dos(−r)`.
    pub fn gap_pdf(&self, r: f64) -> f64 {
        if r < 0.0 {
            return 0.0;
        }
        (self.n - 1) as f64 * self.dos(-r)
    }
}

/// Exact density of eigenvalues at distance `r` below the maximum of an N×N matrix.
pub fn dos_exact(r: f64, n: usize) -> Result<f64> {
    Ok(ExactModel::new(n)?.dos(r))
}

/// Exact density of the gap between the two largest eigenvalues.
pub fn gap_pdf_exact(r: f64, n: usize) -> Result<f64> {
    if r < 0.0 {
        return precondition("gap must be non-negative");
    }
    Ok(ExactModel::new(n)?.gap_pdf(r))
}

/// Density of the N = 2 gap, `√(2/π) s² e^{−s²/2}`.
pub fn gap_pdf_two(s: f64) -> f64 {
    if s < 0.0 {
        0.0
    } else {
        (2.0 / PI).sqrt() * s * s * (-0.5 * s * s).exp()
    }
}

/// Maximum of `|R_k − h_k/h_{k−1}|/R_k` over the system.
pub fn recurrence_consistency(sys: &OrthoSystem) -> f64 {
    (1..=sys.n)
        .map(|k| ((sys.r_coef[k - 1] - (sys.ln_h[k] - sys.ln_h[k - 1]).exp()) / sys.r_coef[k - 1]).abs())
        .fold(0.0, f64::max)
}

/// Closed forms of the first norms and polynomials at truncation point `y`, used as oracles.
pub mod closed_form {
    use crate::numerics::erf;
    use std::f64::consts::PI;

    /// `a(y) = e^{−y²}/(√π(1 + erf y))`.
    pub fn a(y: f64) -> f64 {
        (-y * y).exp() / (PI.sqrt() * (1.0 + erf(y)))
    }

    fn d3(a: f64, y: f64) -> f64 {
        2.0 * a.powi(3) * y + 3.0 * a * a + 4.0 * a * a * y * y + 3.0 * a * y + 2.0 * a * y.powi(3) - 1.0
    }

    /// Squared norm `h_k(y)` for `k ≤ 3`.
    pub fn h(k: usize, y: f64) -> Option<f64> {
        let a = a(y);
        let e = (-y * y).exp();
        let v = match k {
            0 => e / (2.0 * a),
            1 => e * (1.0 / a - 2.0 * a - 2.0 * y) / 4.0,
            2 => e * d3(a, y) / (4.0 * a * (2.0 * a * a + 2.0 * a * y - 1.0)),
            3 => {
                e * (-32.0 * a.powi(4) + 4.0 * a.powi(4) * y * y - 60.0 * a.powi(3) * y
                    + 16.0 * a.powi(3) * y.powi(3)
                    + 29.0 * a * a
                    - 20.0 * a * a * y * y
                    + 20.0 * a * a * y.powi(4)
                    + 30.0 * a * y
                    + 8.0 * a * y.powi(3)
                    + 8.0 * a * y.powi(5)
                    - 6.0)
                    / (16.0 * a * d3(a, y))
            }
            _ => return None,
        };
        Some(v)
    }

    /// Monic polynomial `π_k(λ, y)` for `k ≤ 3`.
    pub fn pi(k: usize, lambda: f64, y: f64) -> Option<f64> {
        let (a, l) = (a(y), lambda);
        let v = match k {
            0 => 1.0,
            1 => l + a,
            2 => l * l + l * ((a + y) / (1.0 - 2.0 * a * (a + y)) - y) - 1.0 + 1.0 / (2.0 - 4.0 * a * (a + y)),
            3 => {
                let num = l
                    * l
                    * 2.0
                    * a
                    * (8.0 * a * a - 4.0 * a * a * y * y + 8.0 * a * y - 8.0 * a * y.powi(3) - 3.0 - 4.0 * y.powi(4))
                    + 2.0
                        * l
                        * (-12.0 * a.powi(3) * y
                            - 10.0 * a * a
                            - 22.0 * a * a * y * y
                            - 9.0 * a * y
                            - 10.0 * a * y.powi(3)
                            + 3.0)
                    + a * (-16.0 * a * a + 4.0 * a * a * y * y - 20.0 * a * y + 8.0 * a * y.powi(3) + 5.0
                        - 4.0 * y * y
                        + 4.0 * y.powi(4));
                l.powi(3) + num / (4.0 * d3(a, y))
            }
            _ => return None,
        };
        Some(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{erf, quad_adaptive};
    use proptest::prelude::*;

    #[test]
    fn first_norms() {
        for &y in &[-1.0, 0.0, 2.0] {
            let sys = build_ortho_system(y, 3).unwrap();
            let exact = PI.sqrt() * (1.0 + erf(y)) / 2.0;
            assert!((sys.h[0] - exact).abs() < 1e-12, "y = {y}");
            let a = closed_form::a(y);
            assert!((sys.s_coef[0] + a).abs() < 1e-10);
        }
        let h1 = closed_form::h(1, 0.0).unwrap();
        assert!((build_ortho_system(0.0, 2).unwrap().h[1] - h1).abs() < 1e-10);
    }

    #[test]
    fn closed_forms_through_degree_three() {
        for &y in &[-1.0f64, 0.0, 0.7, 2.0] {
            let sys = build_ortho_system(y, 4).unwrap();
            for k in 0..4 {
                let h = closed_form::h(k, y).unwrap();
                assert!((sys.h[k] - h).abs() < 1e-8 * h.max(1.0), "h{k} at y = {y}");
                for &l in &[0.3, -1.2, 1.7] {
                    let p = closed_form::pi(k, l, y).unwrap();
                    assert!((sys.pi_k(k, l).unwrap() - p).abs() < 1e-8, "π{k} at y = {y}, λ = {l}");
                }
            }
        }
        assert!(closed_form::h(4, 0.0).is_none());
    }

    #[test]
    fn hermite_limit() {
        let sys = build_ortho_system(8.0, 6).unwrap();
        let mut fact = 1.0;
        for k in 0..6 {
            if k > 0 {
                fact *= k as f64;
            }
            let hk = PI.sqrt() * fact / 2f64.powi(k as i32);
            assert!((sys.h[k] / hk - 1.0).abs() < 1e-6, "k = {k}");
        }
        let herm = 2.0 * (-0.5f64).exp() / (PI.powf(0.25) * 2.0 * 2f64.sqrt());
        assert!((psi_k(&sys, 2, 1.0).unwrap() - herm).abs() < 1e-6);
    }

    #[test]
    fn recurrence_matches_norm_ratios() {
        for &y in &[-3.0, -1.0, 0.5, 2.0, 6.0] {
            let sys = build_ortho_system(y, MAX_N).unwrap();
            assert!(sys.h.iter().all(|&h| h > 0.0));
            assert!(recurrence_consistency(&sys) < 1e-10, "y = {y}");
        }
    }

    #[test]
    fn orthonormal_wave_functions() {
        let y = 0.7;
        let sys = build_ortho_system(y, 4).unwrap();
        for k in 0..4 {
            let norm = quad_adaptive(|l| psi_k(&sys, k, l).unwrap().powi(2), y - 14.0, y, 1e-12).unwrap();
            assert!((norm - 1.0).abs() < 1e-8, "k = {k}");
        }
        let cross =
            quad_adaptive(|l| psi_k(&sys, 0, l).unwrap() * psi_k(&sys, 1, l).unwrap(), y - 14.0, y, 1e-12).unwrap();
        assert!(cross.abs() < 1e-8);
        assert!(psi_k(&sys, 4, 0.0).is_err());
    }

    #[test]
    fn kernel_identities() {
        let (y, n) = (0.5, 4);
        let sys = build_ortho_system(y, n).unwrap();
        let trace = quad_adaptive(|x| kernel(&sys, x, x), y - 14.0, y, 1e-12).unwrap();
        assert!((trace - n as f64).abs() < 1e-6);
        let reproduce = quad_adaptive(|r| kernel(&sys, y, y - r).powi(2), 0.0, 14.0, 1e-12).unwrap();
        assert!((reproduce - kernel(&sys, y, y)).abs() < 1e-6);
        let d = 1e-5;
        let dlog = (cdf_lambda_max(y + d, n).unwrap().ln() - cdf_lambda_max(y - d, n).unwrap().ln()) / (2.0 * d);
        assert!((dlog - kernel(&sys, y, y)).abs() < 1e-5, "{dlog}");
        for &x in &[-1.0, 0.2, 0.5] {
            assert!((kernel(&sys, x, x) - sys.kernel_sum(x, x)).abs() < 1e-12);
            assert!((kernel(&sys, x, x + 0.01) - sys.kernel_sum(x, x + 0.01)).abs() < 1e-11);
        }
    }

    #[test]
    fn cdf_limits() {
        for n in 1..=MAX_N {
            assert!((cdf_lambda_max(8.0, n).unwrap() - 1.0).abs() < 1e-10, "n = {n}");
        }
        for &y in &[-2.0, -0.5, 0.0, 1.3] {
            let f = cdf_lambda_max(y, 1).unwrap();
            assert!((f - 0.5 * (1.0 + erf(y))).abs() < 1e-12);
        }
        let mut last = 0.0;
        for i in 0..60 {
            let f = cdf_lambda_max(-2.0 + 0.1 * i as f64, 5).unwrap();
            assert!(f >= last && (0.0..=1.0).contains(&f));
            last = f;
        }
    }

    #[test]
    fn two_by_two_gap() {
        let model = ExactModel::new(2).unwrap();
        for &s in &[0.1, 0.5, 1.0, 1.7, 3.0] {
            assert!(
                (model.gap_pdf(s) - gap_pdf_two(s)).abs() < 1e-6,
                "s = {s}: {} vs {}",
                model.gap_pdf(s),
                gap_pdf_two(s)
            );
            assert!((model.dos(-s) - gap_pdf_two(s)).abs() < 1e-6);
        }
    }

    #[test]
    fn four_by_four_normalizations() {
        let model = ExactModel::new(4).unwrap();
        let dos = quad_adaptive(|r| model.dos(r), 0.0, 14.0, 1e-10).unwrap();
        assert!((dos - 1.0).abs() < 1e-4, "{dos}");
        let gap = quad_adaptive(|r| model.gap_pdf(r), 0.0, 10.0, 1e-10).unwrap();
        assert!((gap - 1.0).abs() < 1e-4, "{gap}");
        assert!(model.dos(0.0).abs() < 1e-12);
    }

    #[test]
    fn size_limits() {
        assert!(build_ortho_system(0.0, 0).is_err());
        assert!(build_ortho_system(0.0, MAX_N + 1).is_err());
        assert!(build_ortho_system(f64::NAN, 3).is_err());
        assert!(ExactModel::new(1).is_err());
        assert!(gap_pdf_exact(-1.0, 3).is_err());
    }

    proptest! {
        #[test]
        fn kernel_symmetric(a in -3.0f64..2.0, b in -3.0f64..2.0, y in -1.0f64..3.0) {
            let sys = build_ortho_system(y, 5).unwrap();
            prop_assert!((kernel(&sys, a, b) - kernel(&sys, b, a)).abs() < 1e-12);
        }
    }
}
