use std::io::Write;
use std::sync::Arc;

use anyhow::{ensure, Result};
use rayon::prelude::*;
use riccati_spectra::airy::{
    estimate_tw_cdf, macroscopic_density, write_density_csv, TwCdfConfig, TwCdfEstimate,
};
use riccati_spectra::point_process::rescale_stationary;
use riccati_spectra::riccati::{simulate_coupled_family, simulate_explosions};
use riccati_spectra::stationary::{
    flux_j0, flux_j0_prime, hill_ground_cdf, hill_ground_level, mckean_count, mean_exit_time, mean_exit_time_asymptotic,
};
use riccati_spectra::stats::{ks_distance, poisson_dispersion, wilson_interval};
use riccati_spectra::tridiag::{edge_rescale, gumbel_center_scale, gumbel_prediction, sample_matrix, top_k_eigenvalues};
use riccati_spectra::{DiffusionParams, EnsembleParams, NumericsConfig};

use crate::artifacts::{opt, Artifacts};
use crate::config::ExperimentConfig;

/// 95% Kolmogorov–Smirnov critical value.
fn ks_threshold(n: usize) -> f64 {
    1.36 / (n as f64).sqrt()
}

pub fn stationary_exit(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<()> {
    let s = &cfg.stationary_exit;
    let m = mean_exit_time(s.a)?.value;
    ensure!(m.is_finite(), "m({}) overflows; choose a smaller a", s.a);
    let numerics = cfg.numerics.with_horizon(s.horizon_means * m);
    let runs = (0..cfg.replicas() as u64)
        .into_par_iter()
        .map(|i| {
            let log = simulate_explosions(&DiffusionParams::Stationary { a: s.a }, &numerics, cfg.seed + i)?;
            rescale_stationary(Arc::new(log), s.a)
        })
        .collect::<riccati_spectra::Result<Vec<_>>>()?;

    out.csv("stationary_exit_gaps.csv", |w| {
        writeln!(w, "replica,index,gap_over_m")?;
        for (i, pp) in runs.iter().enumerate() {
            for (j, g) in pp.interarrivals().iter().enumerate() {
                writeln!(w, "{i},{j},{g}")?;
            }
        }
        Ok(())
    })?;
    out.csv("stationary_exit.csv", |w| {
        writeln!(w, "replica,seed,explosions,gaps_used,ks_statistic,ks_threshold,mean_gap,dispersion_index,interval_mean")?;
        for (i, pp) in runs.iter().enumerate() {
            let mut gaps = pp.interarrivals();
            if s.gaps > 0 {
                gaps.truncate(s.gaps);
            }
            let (ks, mean) = if gaps.is_empty() {
                (None, None)
            } else {
                let ks = ks_distance(&gaps, |x| -(-x).exp_m1(), ks_threshold(gaps.len()))?.statistic;
                (Some(ks), Some(gaps.iter().sum::<f64>() / gaps.len() as f64))
            };
            let counts: Vec<u64> = (0..s.intervals).map(|k| pp.count(k as f64, k as f64 + 1.0) as u64).collect();
            let disp = if counts.len() >= 2 { Some(poisson_dispersion(&counts)?) } else { None };
            writeln!(
                w,
                "{i},{},{},{},{},{},{},{},{}",
                cfg.seed + i as u64,
                pp.points.len(),
                gaps.len(),
                opt(ks),
                ks_threshold(gaps.len().max(1)),
                opt(mean),
                opt(disp.as_ref().map(|d| d.index)),
                opt(disp.as_ref().map(|d| d.mean)),
            )?;
        }
        Ok(())
    })
}

fn tw_estimate(cfg: &ExperimentConfig, beta: f64, x_grid: &[f64], t_resc: f64, max_k: u32, ci: f64) -> Result<TwCdfEstimate> {
    let tw = TwCdfConfig {
        beta,
        x_grid: x_grid.to_vec(),
        n_samples: cfg.replicas(),
        t_resc,
        max_k,
        seed_base: cfg.seed,
        ci_level: ci,
    };
    Ok(estimate_tw_cdf(&tw, &cfg.numerics)?)
}

pub fn tw_gumbel(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<()> {
    let t = &cfg.tw_gumbel;
    let est = tw_estimate(cfg, t.beta, &t.x_grid, t.t_resc, 0, t.ci_level)?;
    out.csv("tw_gumbel.csv", |w| Ok(est.write_csv(0, w)?))?;
    out.csv("tw_gumbel_intensity.csv", |w| {
        writeln!(w, "x,level,mean_unit_count,predicted_unit_count")?;
        for r in &est.rows {
            writeln!(w, "{},{},{},{}", r.x, r.level, r.mean_unit_count, r.x.exp() * (1.0 - (-1.0f64).exp()))?;
        }
        Ok(())
    })
}

pub fn kth_marginal(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<()> {
    let k = &cfg.kth_marginal;
    let est = tw_estimate(cfg, k.beta, &k.x_grid, k.t_resc, k.k, k.ci_level)?;
    out.csv("kth_marginal.csv", |w| Ok(est.write_csv(k.k, w)?))
}

pub fn hill(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<()> {
    let h = &cfg.hill;
    let mut xs = h.x_grid.clone();
    ensure!(!xs.is_empty(), "hill.x_grid is empty");
    xs.sort_by(f64::total_cmp);
    // lower ground-state level means larger drift constant a = −level
    let mut a: Vec<f64> = xs.iter().map(|&x| -hill_ground_level(h.length, x)).collect();
    a.reverse();
    let numerics = cfg.numerics.with_horizon(h.length);
    let template = DiffusionParams::Stationary { a: a[0] };
    let counts = (0..cfg.replicas() as u64)
        .into_par_iter()
        .map(|i| {
            let logs = simulate_coupled_family(&a, &template, &numerics, cfg.seed + i)?;
            Ok(logs.iter().rev().map(|l| l.count()).collect::<Vec<usize>>())
        })
        .collect::<riccati_spectra::Result<Vec<_>>>()?;
    let n = counts.len() as u64;
    out.csv("hill.csv", |w| {
        writeln!(w, "x,level,a,predicted_cdf,estimated_cdf,ci_low,ci_high,mean_count,mckean_count")?;
        for (j, &x) in xs.iter().enumerate() {
            let aj = a[a.len() - 1 - j];
            let hits = counts.iter().filter(|c| c[j] > 0).count() as u64;
            let (lo, hi) = wilson_interval(hits, n, h.ci_level)?;
            let mean = counts.iter().map(|c| c[j]).sum::<usize>() as f64 / n as f64;
            writeln!(
                w,
                "{x},{},{aj},{},{},{lo},{hi},{mean},{}",
                -aj,
                hill_ground_cdf(h.length, x),
                hits as f64 / n as f64,
                mckean_count(h.length, aj)?
            )?;
        }
        Ok(())
    })
}

pub fn density(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<()> {
    let d = &cfg.density;
    ensure!(d.points >= 2 && d.ell_min < d.ell_max, "density needs points >= 2 and ell_min < ell_max");
    let points = (0..d.points)
        .map(|i| {
            let n = (d.points - 1) as f64;
            let ell = (d.ell_min * (n - i as f64) + d.ell_max * i as f64) / n;
            macroscopic_density(ell, d.beta)
        })
        .collect::<riccati_spectra::Result<Vec<_>>>()?;
    out.csv("density.csv", |w| Ok(write_density_csv(&points, w)?))
}

pub fn quadrature_tables(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<()> {
    let rows = cfg
        .quadrature_tables
        .a
        .iter()
        .map(|&a| {
            let m = mean_exit_time(a)?;
            let ratio = if a > 0.0 { Some((mean_exit_time_asymptotic(a) - m.log_value).exp()) } else { None };
            Ok((a, m.value, flux_j0(a)?.value, flux_j0_prime(a)?.value, ratio))
        })
        .collect::<riccati_spectra::Result<Vec<_>>>()?;
    out.csv("quadrature_tables.csv", |w| {
        writeln!(w, "a,m,J0,J0_prime,asymptotic_ratio")?;
        for (a, m, j0, j0p, ratio) in &rows {
            writeln!(w, "{a},{m},{j0},{j0p},{}", opt(*ratio))?;
        }
        Ok(())
    })
}

pub fn tridiag(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<()> {
    let t = &cfg.tridiag;
    let mut samples = Vec::new();
    let mut summary = Vec::new();
    for &n in &t.n {
        let beta_n = t.beta_coefficient * (n as f64).powf(-t.beta_exponent);
        let params = EnsembleParams::new(n, beta_n)?;
        let rescaled = (0..cfg.replicas() as u64)
            .into_par_iter()
            .map(|i| {
                let m = sample_matrix(&params, cfg.seed + i)?;
                let l0 = top_k_eigenvalues(&m, 1)?[0];
                Ok((l0, edge_rescale(l0, n, beta_n)))
            })
            .collect::<riccati_spectra::Result<Vec<_>>>()?;
        let xs: Vec<f64> = rescaled.iter().map(|r| r.1).collect();
        let ks = ks_distance(&xs, |x| gumbel_prediction(beta_n, x), ks_threshold(xs.len()))?;
        let (center, scale) = gumbel_center_scale(beta_n);
        summary.push((n, beta_n, center, scale, ks.statistic, ks.threshold));
        samples.extend(rescaled.into_iter().enumerate().map(|(i, (l0, x))| (n, i, l0, x)));
    }
    out.csv("tridiag_samples.csv", |w| {
        writeln!(w, "n,replica,seed,lambda0,rescaled")?;
        for (n, i, l0, x) in &samples {
            writeln!(w, "{n},{i},{},{l0},{x}", cfg.seed + *i as u64)?;
        }
        Ok(())
    })?;
    out.csv("tridiag_summary.csv", |w| {
        writeln!(w, "n,beta_n,replicas,gumbel_center,gumbel_scale,ks_statistic,ks_threshold")?;
        for (n, b, c, s, ks, thr) in &summary {
            writeln!(w, "{n},{b},{},{c},{s},{ks},{thr}", cfg.replicas())?;
        }
        Ok(())
    })
}

pub fn coupled_paths(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<()> {
    let c = &cfg.coupled_paths;
    let mut levels = c.levels.clone();
    levels.sort_by(f64::total_cmp);
    let numerics = NumericsConfig { record_path: true, record_dt: c.record_dt, ..cfg.numerics }.with_horizon(c.horizon);
    let runs = (0..cfg.replicas() as u64)
        .into_par_iter()
        .map(|i| simulate_coupled_family(&levels, &c.params, &numerics, cfg.seed + i))
        .collect::<riccati_spectra::Result<Vec<_>>>()?;
    for (i, logs) in runs.iter().enumerate() {
        for (j, log) in logs.iter().enumerate() {
            let path = log.path.as_ref().expect("paths were recorded");
            out.csv(&format!("coupled_paths_r{i}_l{j}.csv"), |w| Ok(path.write_csv(w)?))?;
        }
    }
    out.csv("coupled_paths_explosions.csv", |w| {
        writeln!(w, "replica,level_index,level,time")?;
        for (i, logs) in runs.iter().enumerate() {
            for (j, log) in logs.iter().enumerate() {
                for t in &log.times {
                    writeln!(w, "{i},{j},{},{t}", levels[j])?;
                }
            }
        }
        Ok(())
    })
}
