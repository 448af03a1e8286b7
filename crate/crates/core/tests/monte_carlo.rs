use std::sync::Arc;

use rayon::prelude::*;
use riccati_spectra::point_process::rescale_stationary;
use riccati_spectra::riccati::{simulate_coupled_family, simulate_explosions};
use riccati_spectra::stationary::{mckean_count, mean_exit_time};
use riccati_spectra::{DiffusionParams, NumericsConfig};

const STATIONARY_1: DiffusionParams = DiffusionParams::Stationary { a: 1.0 };

fn rate(dt0: f64, horizon: f64, seed: u64) -> (f64, f64) {
    let numerics = NumericsConfig { dt0, ..NumericsConfig::default() }.with_horizon(horizon);
    let log = simulate_explosions(&STATIONARY_1, &numerics, seed).unwrap();
    let n = log.count() as f64;
    (n / horizon, n.sqrt() / horizon)
}

#[test]
fn halving_the_step_keeps_the_rate() {
    let (r1, s1) = rate(2e-3, 5e4, 1);
    let (r2, s2) = rate(1e-3, 5e4, 2);
    let m = mean_exit_time(1.0).unwrap().value;
    assert!((r1 - r2).abs() < 3.0 * (s1 * s1 + s2 * s2).sqrt(), "{r1} vs {r2}");
    assert!((r2 * m - 1.0).abs() < 4.0 * s2 * m + 0.03, "rate·m = {}", r2 * m);
}

#[test]
fn doubling_the_cutoff_moves_explosions_little() {
    // noise is shared by step index, so offsets accumulate across cycles; compare first explosions
    let base = NumericsConfig::default().with_horizon(200.0);
    let wide = NumericsConfig { cutoff: 200.0, entry: 200.0, ..base };
    let shifts: Vec<Option<f64>> = (0..200u64)
        .into_par_iter()
        .map(|seed| {
            let a = simulate_explosions(&STATIONARY_1, &base, seed).unwrap();
            let b = simulate_explosions(&STATIONARY_1, &wide, seed).unwrap();
            assert_eq!(a.count(), b.count(), "seed {seed}");
            a.times.first().map(|t| (t - b.times[0]).abs())
        })
        .collect();
    let mut shifts: Vec<f64> = shifts.into_iter().flatten().collect();
    shifts.sort_by(f64::total_cmp);
    let bound = 2.0 / base.cutoff;
    let within = shifts.iter().filter(|&&d| d < bound).count() as f64 / shifts.len() as f64;
    assert!(shifts[shifts.len() / 2] < 0.5 / base.cutoff, "median {}", shifts[shifts.len() / 2]);
    assert!(within > 0.9, "{within}");
}

#[test]
fn airy_counts_are_monotone_in_lambda() {
    let template = DiffusionParams::Airy { lambda: 6.0, beta: 4.0 };
    let numerics = NumericsConfig::default().with_horizon(30.0);
    let violations: usize = (0..40u64)
        .into_par_iter()
        .map(|seed| {
            let logs = simulate_coupled_family(&[6.0, 8.0], &template, &numerics, seed).unwrap();
            usize::from(logs[0].count() > logs[1].count())
        })
        .sum();
    assert_eq!(violations, 0);
}

#[test]
fn linear_counts_are_monotone_in_level() {
    let template = DiffusionParams::Linear { ell: 0.0, beta: 0.05 };
    let levels = [-2.0, -1.5, -1.0, -0.5, 0.0];
    let numerics = NumericsConfig { dt0: 2e-3, ..NumericsConfig::default() }.with_horizon(200.0);
    let mut total = vec![0usize; levels.len()];
    for seed in 0..30u64 {
        let logs = simulate_coupled_family(&levels, &template, &numerics, seed).unwrap();
        let counts: Vec<usize> = logs.iter().map(|l| l.count()).collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]), "seed {seed}: {counts:?}");
        for (t, c) in total.iter_mut().zip(&counts) {
            *t += c;
        }
    }
    assert!(total[4] > total[0]);
}

#[test]
fn hill_counts_follow_the_integrated_density() {
    let length = 1000.0;
    let numerics = NumericsConfig { dt0: 2e-3, ..NumericsConfig::default() }.with_horizon(length);
    let counts: Vec<f64> = (0..60u64)
        .into_par_iter()
        .map(|seed| simulate_explosions(&STATIONARY_1, &numerics, 100 + seed).unwrap().count() as f64)
        .collect();
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    let expected = mckean_count(length, 1.0).unwrap();
    let se = (expected / counts.len() as f64).sqrt();
    assert!((mean - expected).abs() < 4.0 * se + 0.03 * expected, "{mean} vs {expected}");
}

#[test]
fn stationary_gaps_have_unit_mean() {
    let numerics = NumericsConfig { dt0: 2e-3, ..NumericsConfig::default() }.with_horizon(2e4);
    let log = Arc::new(simulate_explosions(&STATIONARY_1, &numerics, 9).unwrap());
    let pp = rescale_stationary(log, 1.0).unwrap();
    let gaps = pp.interarrivals();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    assert!((mean - 1.0).abs() < 4.0 / (gaps.len() as f64).sqrt() + 0.03, "{mean} over {}", gaps.len());
}
