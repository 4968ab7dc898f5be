use gue_crowding::finite_n::{self, ExactModel};
use gue_crowding::montecarlo::{edge_factor, top_k_eigenvalues, TridiagonalSpectrumSampler};
use gue_crowding::painleve::PainleveTable;
use gue_crowding::scaling;

#[test]
fn largest_eigenvalue_cdf_matches_sampling() {
    let n = 4;
    let draws = 400_000;
    let batch =
        TridiagonalSpectrumSampler::new(n, 7).unwrap().sample_with(draws, |t| Ok(top_k_eigenvalues(t, 1)?[0])).unwrap();
    assert!(batch.rejected.is_empty());
    for &y in &[1.0, 1.5, 2.0] {
        let exact = finite_n::cdf_lambda_max(y, n).unwrap();
        let frac = batch.draws.iter().filter(|&&l| l <= y).count() as f64 / draws as f64;
        let sigma = (exact * (1.0 - exact) / draws as f64).sqrt();
        assert!((frac - exact).abs() < 3.0 * sigma, "y = {y}: {frac} vs {exact} (σ = {sigma:.1e})");
    }
}

fn worst_gap_discrepancy(n: usize, table: &PainleveTable) -> f64 {
    let model = ExactModel::new(n).unwrap();
    let f = edge_factor(n);
    (1..=25)
        .map(|i| {
            let rt = 0.2 * i as f64;
            (model.gap_pdf(rt / f) / f - scaling::p_typ(rt, table).unwrap()).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn exact_gap_approaches_edge_scaling() {
    let table = PainleveTable::shared();
    let d6 = worst_gap_discrepancy(6, table);
    let d12 = worst_gap_discrepancy(12, table);
    assert!(d12 < d6, "N = 6: {d6:.3e}, N = 12: {d12:.3e}");
    assert!(d12 < 0.05, "N = 12: {d12:.3e}");
}

#[test]
fn exact_density_approaches_edge_scaling() {
    let table = PainleveTable::shared();
    let worst = |n: usize| {
        let model = ExactModel::new(n).unwrap();
        let f = edge_factor(n);
        let nf = n as f64;
        (1..=20)
            .map(|i| {
                let rt = 0.2 * i as f64;
                // ρ̃(r̃) = N·ρ_N(r)/edge factor
                (nf * model.dos(rt / f) / f - scaling::rho_edge_scaling(rt, table).unwrap()).abs()
            })
            .fold(0.0, f64::max)
    };
    assert!(worst(12) < worst(6));
}
