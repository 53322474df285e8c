use proptest::prelude::*;
use rodeo_core::rng::StreamId;
use rodeo_core::rra::{
    best_over_continuous_n, fraction_below, geometric_log_integral, monte_carlo_log_suppressions,
    monte_carlo_statistics, rra_geometric_mean, rra_mean_per_iteration, rra_mean_total, rra_rms,
    sample_schedule, separatrix_fit_for, EnsembleStatistics, HalfNormalTimeDistribution, Statistic,
};

use std::f64::consts::PI;

/// `∫ ln cos²(πTζ) p(T) dT` from the half-normal characteristic function:
/// `−ln 4 − 2 Σ_k (−1)^k e^{−k² π³ ζ²} / k`.
fn log_integral_series(zeta: f64) -> f64 {
    let a = PI.powi(3) * zeta * zeta;
    let mut sum = 0.0;
    for k in 1..10_000 {
        let term = (-(k as f64).powi(2) * a).exp() / k as f64;
        sum += if k % 2 == 0 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    -(4f64.ln()) - 2.0 * sum
}

#[test]
fn geometric_quadrature_matches_series() {
    for &z in &[0.05, 0.1, 0.2, 0.35, 0.5, 1.0, 1.7, 3.0, 10.0] {
        let q = geometric_log_integral(z).unwrap();
        let s = log_integral_series(z);
        assert!(
            (q - s).abs() < 1e-9 * s.abs().max(1e-3),
            "ζ = {z}: {q} vs {s}"
        );
    }
}

#[test]
fn geometric_asymptote() {
    assert!((rra_geometric_mean(50.0, 1).unwrap() - 0.25).abs() < 1e-6);
    let g1 = geometric_log_integral(2.5).unwrap();
    assert!((rra_geometric_mean(2.5, 4).unwrap() - (4.0 * g1).exp()).abs() < 1e-15);
}

proptest! {
    #[test]
    fn closed_forms_are_ordered(zeta in 0.01f64..12.0, n in 1u32..40) {
        let s = EnsembleStatistics::closed_form(zeta, n).unwrap();
        prop_assert!(s.geometric_mean <= s.arithmetic_mean * (1.0 + 1e-12));
        prop_assert!(s.arithmetic_mean <= s.rms * (1.0 + 1e-12));
    }

    #[test]
    fn fluctuations_grow_with_n(zeta in 1.0f64..20.0, n in 1u32..60) {
        use rodeo_core::rra::rra_sigma_over_mean;
        prop_assert!(rra_sigma_over_mean(zeta, n + 1) > rra_sigma_over_mean(zeta, n));
    }
}

#[test]
fn monte_carlo_is_ordered() {
    for &(z, n) in &[(0.5, 1), (1.0, 3), (2.0, 6), (5.0, 6)] {
        let mc = monte_carlo_statistics(z, n, 20_000, 8).unwrap();
        assert!(mc.stats.geometric_mean <= mc.stats.arithmetic_mean);
        assert!(mc.stats.arithmetic_mean <= mc.stats.rms);
    }
}

#[test]
fn monte_carlo_matches_closed_forms() {
    for &z in &[0.5, 1.0, 2.0, 5.0] {
        for &n in &[1u32, 3, 6] {
            let mc = monte_carlo_statistics(z, n, 200_000, 21).unwrap();
            let mean = rra_mean_per_iteration(z, n);
            let rms = rra_rms(z, n);
            assert!(
                (mc.stats.arithmetic_mean - mean).abs() <= 3.0 * mc.mean_std_error,
                "mean ({z}, {n})"
            );
            assert!(
                (mc.stats.rms - rms).abs() <= 3.0 * mc.rms_std_error,
                "rms ({z}, {n})"
            );
        }
    }
}

#[test]
fn total_phase_form_matches_monte_carlo() {
    let n = 13;
    let mc = monte_carlo_statistics(3.0 / n as f64, n, 200_000, 5).unwrap();
    let want = rra_mean_total(3.0, n);
    assert!((mc.stats.arithmetic_mean - want).abs() <= 3.0 * mc.mean_std_error);
}

#[test]
fn large_phase_statistics() {
    let mc = monte_carlo_statistics(50.0, 6, 1_000_000, 7).unwrap();
    let mean = 2f64.powi(-6);
    assert!((mc.stats.arithmetic_mean - mean).abs() <= 3.0 * mc.mean_std_error);
    let typical = 4f64.powi(-6);
    assert!((mc.stats.geometric_mean / typical - 1.0).abs() < 0.2);
}

#[test]
fn large_phase_median_is_quarter_power() {
    let mc = monte_carlo_statistics(50.0, 6, 1_000_000, 7).unwrap();
    let typical = 4f64.powi(-6);
    assert!(
        (mc.median / typical - 1.0).abs() < 0.2,
        "median / 4^-6 = {}",
        mc.median / typical
    );
}

#[test]
fn sampled_totals_have_mean_n() {
    let d = HalfNormalTimeDistribution::new(1.0).unwrap();
    let draws = 1_000_000u64;
    let total: f64 = (0..draws)
        .map(|i| {
            sample_schedule(3, &d, StreamId::new(99, i))
                .unwrap()
                .total()
        })
        .sum();
    let mean = total / draws as f64;
    let sd = d.scale() * (1.0 - 2.0 / PI).sqrt() * 3f64.sqrt();
    assert!(
        (mean - 3.0).abs() <= 3.0 * sd / (draws as f64).sqrt(),
        "{mean}"
    );
}

#[test]
fn log_suppression_is_nearly_symmetric() {
    for &n in &[20u32, 50] {
        let mc = monte_carlo_statistics(3.0, n, 100_000, 13).unwrap();
        assert!(
            mc.log_skewness.abs() <= 5.0 / (n as f64).sqrt(),
            "n = {n}: {}",
            mc.log_skewness
        );
    }
}

#[test]
fn runs_are_reproducible() {
    let a = monte_carlo_log_suppressions(1.1, 4, 3_000, 77).unwrap();
    let b = monte_carlo_log_suppressions(1.1, 4, 3_000, 77).unwrap();
    assert_eq!(a, b);
    let c = monte_carlo_log_suppressions(1.1, 4, 3_000, 78).unwrap();
    assert_ne!(a, c);
}

#[test]
fn single_run_fraction_below_quarter_power() {
    let d = HalfNormalTimeDistribution::new(1.0).unwrap();
    let grid: Vec<f64> = (0..=800).map(|i| 2.0 + i as f64 * 0.01).collect();
    let runs = 1_000u64;
    let inside = (0..runs)
        .filter(|&seed| {
            let s = sample_schedule(6, &d, StreamId::new(seed, 0)).unwrap();
            let f = fraction_below(&s, &grid, 4f64.powi(-6));
            (0.35..=0.75).contains(&f)
        })
        .count();
    let p = inside as f64 / runs as f64;
    assert!(p >= 0.95, "fraction inside [0.35, 0.75] for {p:.3} of runs");
}

#[test]
fn continuous_n_minima_at_zeta_tot_five() {
    let (_, mean) = best_over_continuous_n(Statistic::Arithmetic, 5.0).unwrap();
    assert!((mean / 1.34e-5 - 1.0).abs() < 0.03, "{mean:e}");
    let (_, rms) = best_over_continuous_n(Statistic::Rms, 5.0).unwrap();
    assert!((rms / 2.79e-4 - 1.0).abs() < 0.03, "{rms:e}");
    // integer n never beats the continuous minimum
    let best_int = (1..60)
        .map(|n| rra_mean_total(5.0, n))
        .fold(f64::INFINITY, f64::min);
    assert!(best_int >= mean * (1.0 - 1e-12));
}

#[test]
fn geometric_separatrix_constant() {
    let fit = separatrix_fit_for(Statistic::Geometric).unwrap();
    assert!((fit.beta - 4.46).abs() < 1e-2, "β = {}", fit.beta);
}

#[test]
fn geometric_minimum_at_zeta_tot_five() {
    let (_, g) = best_over_continuous_n(Statistic::Geometric, 5.0).unwrap();
    assert!((g / 2.07e-10 - 1.0).abs() < 0.03, "{g:e}");
}
