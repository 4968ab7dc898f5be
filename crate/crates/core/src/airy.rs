//! Airy functions of real argument and the soft-edge eigenvalue density.
//!
//! For |x| ≥ 8 the standard asymptotic expansions are summed to their smallest term.
//! Inside (−8, 8) values are propagated from an anchor by Taylor re-expansion of
//! y″ = x·y, always in the direction in which the wanted solution does not decay:
//! Ai on x > 0 is carried down from the x = 8 asymptotics, everything else is
//! carried out from the exact values at the origin.

use std::f64::consts::{FRAC_PI_4, PI};

/// Ai, Ai′, Bi and Bi′ at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValues {
    pub ai: f64,
    pub ai_prime: f64,
    pub bi: f64,
    pub bi_prime: f64,
}

const ASYMPTOTIC_FROM: f64 = 8.0;
const MAX_TAYLOR_STEP: f64 = 0.5;

// Ai(0), −Ai′(0); Bi(0) = √3 Ai(0), Bi′(0) = −√3 Ai′(0).
const AI0: f64 = 0.355_028_053_887_817_2;
const AIP0: f64 = -0.258_819_403_792_806_8;

pub fn airy(x: f64) -> AiryValues {
    if x >= ASYMPTOTIC_FROM {
        let (ai, ai_prime) = ai_decaying(x);
        let (bi, bi_prime) = bi_growing(x);
        AiryValues { ai, ai_prime, bi, bi_prime }
    } else if x <= -ASYMPTOTIC_FROM {
        oscillatory(-x)
    } else {
        let s3 = 3f64.sqrt();
        let (bi, bi_prime) = taylor_transport(0.0, s3 * AI0, -s3 * AIP0, x);
        let (ai, ai_prime) = if x > 0.0 {
            let (a, ap) = ai_decaying(ASYMPTOTIC_FROM);
            taylor_transport(ASYMPTOTIC_FROM, a, ap, x)
        } else {
            taylor_transport(0.0, AI0, AIP0, x)
        };
        AiryValues { ai, ai_prime, bi, bi_prime }
    }
}

/// `∫_x^∞ Ai(u)² du = Ai′(x)² − x·Ai(x)²`, the GUE soft-edge density at `x`.
pub fn edge_density(x: f64) -> f64 {
    if x >= ASYMPTOTIC_FROM {
        // Ai′² − x Ai² = √x e^{−2ζ}/(4π) (Q − P)(Q + P), with P, Q the Ai and −Ai′ series.
        let z = zeta(x);
        let (p, q, qmp) = decaying_series(z);
        x.sqrt() * (-2.0 * z).exp() / (4.0 * PI) * qmp * (q + p)
    } else {
        let a = airy(x);
        a.ai_prime * a.ai_prime - x * a.ai * a.ai
    }
}

/// `∫_x^∞ ∫_u^∞ Ai(v)² dv du = (2x²Ai² − 2x Ai′² − Ai·Ai′)/3`.
pub fn edge_density_integral(x: f64) -> f64 {
    let a = airy(x);
    (2.0 * x * x * a.ai * a.ai - 2.0 * x * a.ai_prime * a.ai_prime - a.ai * a.ai_prime) / 3.0
}

/// `∫_x^∞ Ai(u)·Ai(u − r) du`, with the `r → 0` limit handled.
pub fn shifted_product_integral(x: f64, r: f64) -> f64 {
    if r.abs() < 1e-10 {
        return edge_density(x);
    }
    let a = airy(x);
    let b = airy(x - r);
    (a.ai * b.ai_prime - a.ai_prime * b.ai) / r
}

fn zeta(x: f64) -> f64 {
    2.0 / 3.0 * x * x.sqrt()
}

/// Coefficients u_k, v_k of the Airy asymptotic series.
fn uv(k: usize, u_prev: f64) -> (f64, f64) {
    if k == 0 {
        return (1.0, 1.0);
    }
    let kf = k as f64;
    let u = u_prev * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
    let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
    (u, v)
}

/// Sums (P, Q, Q − P) with P = Σ(−1)^k u_k ζ^{−k}, Q = Σ(−1)^k v_k ζ^{−k}, truncated at the smallest term.
fn decaying_series(z: f64) -> (f64, f64, f64) {
    let (mut p, mut q, mut qmp) = (1.0, 1.0, 0.0);
    let mut u = 1.0;
    let mut zk = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let (uk, vk) = uv(k, u);
        u = uk;
        zk *= -1.0 / z;
        let tu = uk * zk;
        let tv = vk * zk;
        let size = tu.abs().max(tv.abs());
        if size > last {
            break;
        }
        last = size;
        p += tu;
        q += tv;
        qmp += tv - tu;
        if size < 1e-17 {
            break;
        }
    }
    (p, q, qmp)
}

fn ai_decaying(x: f64) -> (f64, f64) {
    let z = zeta(x);
    let (p, q, _) = decaying_series(z);
    let e = (-z).exp() / (2.0 * PI.sqrt());
    let x4 = x.powf(0.25);
    (e * p / x4, -e * x4 * q)
}

fn bi_growing(x: f64) -> (f64, f64) {
    let z = zeta(x);
    if z > 700.0 {
        return (f64::INFINITY, f64::INFINITY);
    }
    let (mut p, mut q) = (1.0, 1.0);
    let mut u = 1.0;
    let mut zk = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let (uk, vk) = uv(k, u);
        u = uk;
        zk /= z;
        let size = (uk * zk).abs().max((vk * zk).abs());
        if size > last {
            break;
        }
        last = size;
        p += uk * zk;
        q += vk * zk;
        if size < 1e-17 {
            break;
        }
    }
    let e = z.exp() / PI.sqrt();
    let x4 = x.powf(0.25);
    (e * p / x4, e * x4 * q)
}

fn oscillatory(t: f64) -> AiryValues {
    // x = −t, t ≥ 8.
    let z = zeta(t);
    let (mut pe, mut po, mut qe, mut qo) = (1.0, 0.0, 1.0, 0.0);
    let mut u = 1.0;
    let mut zk = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let (uk, vk) = uv(k, u);
        u = uk;
        zk /= z;
        let size = (uk * zk).abs().max((vk * zk).abs());
        if size > last {
            break;
        }
        last = size;
        // sign (−1)^{⌊k/2⌋}
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            pe += sign * uk * zk;
            qe += sign * vk * zk;
        } else {
            po += sign * uk * zk;
            qo += sign * vk * zk;
        }
        if size < 1e-17 {
            break;
        }
    }
    let (s, c) = (z + FRAC_PI_4).sin_cos();
    let t4 = t.powf(0.25);
    let sp = PI.sqrt();
    AiryValues {
        ai: (s * pe - c * po) / (sp * t4),
        ai_prime: -t4 / sp * (c * qe + s * qo),
        bi: (c * pe + s * po) / (sp * t4),
        bi_prime: t4 / sp * (s * qe - c * qo),
    }
}

/// Carry (y, y′) of a solution of y″ = x·y from `x0` to `x1`.
fn taylor_transport(x0: f64, y0: f64, dy0: f64, x1: f64) -> (f64, f64) {
    let span = x1 - x0;
    if span == 0.0 {
        return (y0, dy0);
    }
    let steps = (span.abs() / MAX_TAYLOR_STEP).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let (mut y, mut dy) = (y0, dy0);
    let mut x = x0;
    for i in 0..steps {
        (y, dy) = taylor_step(x, y, dy, h);
        x = if i + 1 == steps { x1 } else { x0 + (i + 1) as f64 * h };
    }
    (y, dy)
}

fn taylor_step(x: f64, y: f64, dy: f64, h: f64) -> (f64, f64) {
    // y(x + t) = Σ a_k t^k with a_{k+2} = (x a_k + a_{k−1}) / ((k+2)(k+1)).
    let mut a = [y, dy, 0.5 * x * y];
    let mut val = a[0] + h * (a[1] + h * a[2]);
    let mut der = a[1] + 2.0 * h * a[2];
    let mut hk = h * h;
    let mut small = 0;
    for k in 1..120usize {
        let next = (x * a[1] + a[0]) / (((k + 2) * (k + 1)) as f64);
        a = [a[1], a[2], next];
        let hk1 = hk;
        hk *= h;
        let term = next * hk;
        val += term;
        der += (k + 2) as f64 * next * hk1;
        if term.abs() <= 1e-18 * val.abs() && ((k + 2) as f64 * next * hk1).abs() <= 1e-18 * der.abs() {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    (val, der)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Reference values from 30-digit arbitrary-precision evaluation.
    #[allow(clippy::excessive_precision)]
    const REFERENCE: &[(f64, f64, f64, f64)] = &[
        (-15.0, 0.278_217_490_870_828_93, 0.272_374_204_308_642_02, -0.069_126_594_531_010_061),
        (-9.5, 0.319_103_247_719_128_2, -0.108_095_318_811_871_24, 0.037_785_432_489_466_502),
        (-7.3, 0.335_770_370_515_147_28, -0.180_095_804_483_293_66, 0.070_874_113_769_896_474),
        (-2.0, 0.227_407_428_201_685_58, 0.618_259_020_741_691_04, -0.412_302_587_956_398_49),
        (-0.4, 0.454_225_613_888_667_4, -0.225_031_409_302_415_03, 0.430_020_939_948_503_36),
        (1.3, 0.093_474_665_771_502_705, -0.120_333_865_590_183_58, 1.552_284_162_344_543_8),
        (3.7, 1.745_572_000_609_978_5e-3, -3.466_940_749_027_627_1e-3, 47.560_747_499_589_458),
        (6.0, 9.947_694_360_252_889_6e-6, -2.476_520_039_703_495_5e-5, 6_536.446_104_809_863_5),
        (7.99, 4.828_245_647_298_711_2e-8, -1.379_494_661_055_830_7e-7, 1_166_517.777_585_684),
        (10.0, 1.104_753_255_289_868_6e-10, -3.520_633_676_738_923_6e-10, 455_641_153.548_225_14),
        (15.0, 2.164_962_520_737_992_3e-18, -8.420_567_954_017_772_8e-18, 1.898_209_956_749_359e16),
    ];

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn matches_reference_values() {
        for &(x, ai, aip, bi) in REFERENCE {
            let v = airy(x);
            assert!(rel(v.ai, ai) < 1e-12, "Ai({x}) = {} vs {ai}", v.ai);
            assert!(rel(v.ai_prime, aip) < 1e-12, "Ai'({x}) = {} vs {aip}", v.ai_prime);
            assert!(rel(v.bi, bi) < 1e-12, "Bi({x}) = {} vs {bi}", v.bi);
        }
    }

    #[test]
    fn values_at_origin() {
        let g13 = 2.678_938_534_707_747_6; // Γ(1/3)
        let g23 = 1.354_117_939_426_400_5; // Γ(2/3)
        let v = airy(0.0);
        assert!((v.ai - 3f64.powf(-2.0 / 3.0) / g23).abs() < 1e-15);
        assert!((v.ai_prime + 3f64.powf(-1.0 / 3.0) / g13).abs() < 1e-15);
        assert!((v.ai - 0.355_028_053_9).abs() < 1e-10);
        assert!((v.ai_prime + 0.258_819_403_8).abs() < 1e-10);
    }

    #[test]
    fn leading_asymptotic_at_ten() {
        let lead = (-(2.0 / 3.0) * 10f64.powf(1.5)).exp() / (2.0 * PI.sqrt() * 10f64.powf(0.25));
        assert!(rel(airy(10.0).ai, lead) < 0.01);
    }

    #[test]
    fn wronskian() {
        for &x in &[-10.0, -5.0, -1.0, 0.0, 2.5, 5.0, 9.0, 10.0] {
            let v = airy(x);
            let w = v.ai * v.bi_prime - v.ai_prime * v.bi;
            assert!((w * PI - 1.0).abs() < 1e-12, "x = {x}: {w}");
        }
    }

    #[test]
    fn expansion_and_transport_agree_across_the_switch() {
        // Transport from the origin past the switch point and compare with the expansions.
        for &x in &[-8.0, -9.0, -10.0] {
            let (ai, aip) = taylor_transport(0.0, AI0, AIP0, x);
            let v = airy(x);
            assert!((ai - v.ai).abs() < 1e-12 && (aip - v.ai_prime).abs() < 1e-11);
        }
        for &x in &[8.0, 9.0, 10.0] {
            let (bi, _) = taylor_transport(0.0, 3f64.sqrt() * AI0, -3f64.sqrt() * AIP0, x);
            assert!(rel(bi, airy(x).bi) < 1e-12);
        }
        let (a9, ap9) = ai_decaying(9.0);
        let (ai, _) = taylor_transport(9.0, a9, ap9, 7.9);
        assert!(rel(ai, airy(7.9).ai) < 1e-12);
    }

    #[test]
    fn ode_holds_by_finite_differences() {
        let h = 1e-3;
        for i in 0..60 {
            let x = -14.5 + 0.5 * i as f64;
            let d2 = (airy(x + h).ai - 2.0 * airy(x).ai + airy(x - h).ai) / (h * h);
            let scale = airy(x).ai.abs().max(airy(x).ai_prime.abs());
            assert!((d2 - x * airy(x).ai).abs() < 1e-5 * scale * (1.0 + x * x), "x = {x}");
        }
    }

    #[test]
    fn edge_density_examples() {
        assert!((edge_density(0.0) - 0.066_987_5).abs() < 1e-7);
        assert!((edge_density(-25.0) * PI / 5.0 - 1.0).abs() < 0.02);
        let x = 8.0f64;
        let tail = (-(4.0 / 3.0) * x.powf(1.5)).exp() / (8.0 * PI * x);
        assert!(rel(edge_density(x), tail) < 0.05);
    }

    #[test]
    fn edge_density_is_continuous_at_the_switch() {
        let a = airy(8.0);
        let direct = a.ai_prime * a.ai_prime - 8.0 * a.ai * a.ai;
        assert!(rel(edge_density(8.0), direct) < 1e-10);
        let lo = edge_density(8.0 - 1e-12);
        assert!(rel(lo, edge_density(8.0)) < 1e-9);
    }

    #[test]
    fn edge_density_left_tail_ratio_monotone() {
        let mut prev = f64::INFINITY;
        // sampled at successive local maxima of the oscillating correction
        for k in 0..12 {
            let x = -10.0 - 5.0 * k as f64;
            let ratio = (edge_density(x) * PI / (-x).sqrt() - 1.0).abs();
            assert!(ratio < 0.02);
            let envelope = 1.0 / (4.0 * (-x).powf(1.5));
            assert!(ratio <= envelope * 1.01 + 1e-6);
            assert!(envelope < prev);
            prev = envelope;
        }
    }

    #[test]
    fn bulk_edge_matching() {
        let n = 1e6f64;
        let edge = 2f64.sqrt() * n.powf(1.0 / 6.0);
        for i in 0..=30 {
            let d = (5.0 + 0.5 * i as f64) * n.powf(-1.0 / 6.0);
            let lhs = 2f64.sqrt() * n.powf(-5.0 / 6.0) * edge_density(-edge * d);
            let rhs = 2f64.powf(0.75) / PI * n.powf(-0.75) * d.sqrt();
            assert!(rel(lhs, rhs) < 0.03, "d = {d}");
        }
    }

    #[test]
    fn shifted_product_integral_limits() {
        let x = 3.0;
        assert!(rel(shifted_product_integral(x, 1e-12), edge_density(x)) < 1e-12);
        let r = 1e-4;
        assert!(rel(shifted_product_integral(x, r), edge_density(x)) < 1e-3);
        let q = crate::numerics::quad_adaptive(|u| airy(u).ai * airy(u - 1.5).ai, x, 40.0, 1e-14).unwrap();
        assert!(rel(shifted_product_integral(x, 1.5), q) < 1e-10);
        let q2 = crate::numerics::quad_adaptive(edge_density, 2.0, 40.0, 1e-14).unwrap();
        assert!(rel(edge_density_integral(2.0), q2) < 1e-10);
    }

    proptest! {
        #[test]
        fn wronskian_everywhere(x in -15.0..15.0f64) {
            let v = airy(x);
            let w = v.ai * v.bi_prime - v.ai_prime * v.bi;
            prop_assert!((w * PI - 1.0).abs() < 2e-12, "x = {}: {}", x, w * PI);
        }

        #[test]
        fn edge_density_positive(x in -40.0..30.0f64) {
            prop_assert!(edge_density(x) > 0.0);
        }
    }
}
