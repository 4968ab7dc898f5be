use std::f64::consts::PI;

use gue_crowding::montecarlo::edge_factor;
use gue_crowding::numerics::quad_adaptive;
use gue_crowding::painleve::PainleveTable;
use gue_crowding::scaling::{self, CurveKind};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scaling_functions_are_non_negative(r in 0.0f64..30.0) {
        let t = PainleveTable::shared();
        prop_assert!(scaling::rho_edge_scaling(r, t).unwrap() >= -1e-12);
        prop_assert!(scaling::p_typ(r, t).unwrap() >= -1e-12);
    }
}

/// Least-squares coefficients of `y ≈ Σ c_k x^{2k}`, k < terms.
fn even_polyfit(x: &[f64], y: &[f64], terms: usize) -> Vec<f64> {
    let a = DMatrix::from_fn(x.len(), terms, |i, k| x[i].powi(2 * k as i32));
    let b = DVector::from_column_slice(y);
    a.svd(true, true).solve(&b, 1e-14).unwrap().iter().copied().collect()
}

#[test]
fn quartic_coefficient_matches_fit() {
    let t = PainleveTable::shared();
    let r: Vec<f64> = (0..=35).map(|i| 0.05 + 0.01 * i as f64).collect();
    let g: Vec<f64> = r.iter().map(|&x| (scaling::rho_edge_scaling(x, t).unwrap() - 0.5 * x * x) / x.powi(4)).collect();
    let fit = even_polyfit(&r, &g, 3)[0];
    let a4 = scaling::a4_integral(t).value;
    assert!(((fit - a4) / a4).abs() < 0.01, "fit {fit}, integral {a4}");
}

#[test]
fn finite_n_gap_is_normalized() {
    let t = PainleveTable::shared();
    let n = 1000;
    let upper = 30.0 / edge_factor(n);
    let mass = quad_adaptive(|r| scaling::gap_finite_n(r, n, t).unwrap(), 0.0, upper, 1e-9).unwrap();
    assert!((mass - 1.0).abs() < 1e-2, "{mass}");
}

#[test]
fn tabulated_gap_curve_has_unit_mass() {
    let t = PainleveTable::shared();
    let curve = scaling::tabulate_curve(CurveKind::GapTyp, 20.0, 0.05, 12.0, t).unwrap();
    let mass = curve.trapezoid_mass();
    assert!((0.99..=1.01).contains(&mass), "{mass}");
}

#[test]
fn edge_density_joins_the_bulk_as_inverse_distance() {
    // ρ̃π/√r̃ − 1 decays like c/r̃ on the way to the square-root law
    let t = PainleveTable::shared();
    let excess: Vec<f64> = [6.0, 9.0, 12.0, 16.0]
        .iter()
        .map(|&r| (scaling::rho_edge_scaling(r, t).unwrap() * PI / f64::sqrt(r) - 1.0) * r)
        .collect();
    let mean = excess.iter().sum::<f64>() / excess.len() as f64;
    for e in &excess {
        assert!((e / mean - 1.0).abs() < 0.15, "{excess:?}");
    }
}
