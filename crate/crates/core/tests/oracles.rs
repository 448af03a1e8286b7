mod common;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use riccati_spectra::airy::{
    ell_beta, ell_beta_inverse, fourfold_integrals, gamma1_correction, macroscopic_density, scale_h_to_l,
    tw_right_tail_leading, Gamma1Config,
};
use riccati_spectra::quad::{integrate, QuadratureConfig};
use riccati_spectra::rng;
use riccati_spectra::stats::{ks_distance, poisson_dispersion};
use riccati_spectra::tridiag::{sample_matrix, top_k_eigenvalues};
use riccati_spectra::EnsembleParams;

#[test]
fn grid_oracle_reproduces_frozen_values() {
    // frozen from an independent SciPy evaluation (sinh grid, adaptive inner integrals)
    let (i, k) = common::fourfold_by_quadrature(-2.0, 4001);
    let shift = (8.0 / 3.0 * 2f64.powf(1.5)).exp();
    assert!((i * shift / 3336.54 - 1.0).abs() < 5e-3, "{}", i * shift);
    assert!((k * shift / 4428.84 - 1.0).abs() < 5e-3, "{}", k * shift);
}

#[test]
fn importance_sampler_agrees_with_quadrature() {
    for lambda in [-1.671, -2.5, -3.5] {
        let (i, k) = common::fourfold_by_quadrature(lambda, 4001);
        let mc = fourfold_integrals(lambda, 200_000, 17).unwrap();
        let tol_i = 4.0 * mc.i_std_error + 0.01 * i;
        let tol_k = 4.0 * mc.k_std_error + 0.01 * k;
        assert!((mc.i - i).abs() < tol_i, "lambda={lambda}: I {} vs {i}", mc.i);
        assert!((mc.k - k).abs() < tol_k, "lambda={lambda}: K {} vs {k}", mc.k);
    }
}

#[test]
fn correction_agrees_with_quadrature() {
    let det = common::gamma1_by_quadrature(-2.5, 24, 2001);
    let mc = gamma1_correction(-2.5, &Gamma1Config::default()).unwrap();
    assert!(mc.converged);
    assert!(det < 0.0);
    let v = mc.result.value;
    assert!((v / det - 1.0).abs() < 4.0 * mc.rel_std_error + 0.02, "{v} vs {det}");
}

#[test]
fn bisection_matches_dense_oracle_on_ensemble_draws() {
    let p = EnsembleParams::new(40, 0.5).unwrap();
    for seed in 0..20 {
        let m = sample_matrix(&p, seed).unwrap();
        let dense = common::jacobi_eigenvalues(common::dense(&m));
        let top = top_k_eigenvalues(&m, 5).unwrap();
        for (j, ev) in top.iter().enumerate() {
            let want = dense[dense.len() - 1 - j];
            assert!((ev - want).abs() < 1e-8 * (1.0 + want.abs()), "seed={seed} j={j}: {ev} vs {want}");
        }
    }
}

#[test]
fn ks_critical_value_on_exponential_draws() {
    let mut r = rng::stream(42);
    let xs: Vec<f64> = (0..10_000).map(|_| Exp1.sample(&mut r)).collect();
    let rep = ks_distance(&xs, |x| 1.0 - (-x).exp(), 1.63 / 100.0).unwrap();
    assert!(rep.pass, "{}", rep.statistic);
}

#[test]
fn poisson_dispersion_on_poisson_draws() {
    let mut r = rng::stream(7);
    let pois = Poisson::new(1.0).unwrap();
    let counts: Vec<u64> = (0..10_000).map(|_| pois.sample(&mut r) as u64).collect();
    let d = poisson_dispersion(&counts).unwrap();
    assert!((0.94..=1.06).contains(&d.index), "{}", d.index);
    // uniforms are not Poisson
    let flat: Vec<u64> = (0..10_000).map(|_| r.random_range(0..3u64)).collect();
    assert!(!poisson_dispersion(&flat).unwrap().report(0.06).pass);
}

#[test]
fn integrated_density_is_the_running_integral() {
    let beta = 0.01;
    let cfg = QuadratureConfig::default().with_rel_tol(1e-7);
    let levels = [-2.5, -1.0, 0.0, 1.5, 3.0];
    let pts: Vec<_> = levels.iter().map(|&l| macroscopic_density(l, beta).unwrap()).collect();
    for w in pts.windows(2) {
        let inc = integrate(|l| macroscopic_density(l, beta).unwrap().density, w[0].level, w[1].level, &cfg).unwrap();
        let diff = w[1].integrated - w[0].integrated;
        assert!((inc.value / diff - 1.0).abs() < 1e-6, "{} vs {diff}", inc.value);
        assert!(w[1].integrated > w[0].integrated);
    }
}

#[test]
fn left_tail_ratio_of_the_density() {
    let beta = 1e-3;
    let ell: f64 = -3.0;
    let p = macroscopic_density(ell, beta).unwrap();
    let tail = 4.0 / (std::f64::consts::PI * beta) * ell.abs().sqrt() * (-(8.0 / 3.0) * ell.abs().powf(1.5)).exp();
    assert!((p.density / tail - 1.0).abs() < 0.03, "{}", p.density / tail);
}

#[test]
fn right_tail_half_point_sits_in_the_edge_window() {
    let beta = 1e-4;
    let f = |lam: f64| tw_right_tail_leading(lam, beta).unwrap() - 0.5f64.ln();
    let (mut lo, mut hi) = (1.0, 1e6);
    for _ in 0..200 {
        let mid = (lo * hi as f64).sqrt();
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = ell_beta_inverse(-scale_h_to_l(lo, beta).unwrap(), beta).unwrap();
    assert!(x.abs() < 3.0, "x = {x}");
    assert!(ell_beta(x, beta).unwrap() < 0.0);
}
