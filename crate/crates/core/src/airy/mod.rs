//! Small-β edge scaling: the level map `ℓ_β`, the Tracy–Widom → Gumbel
//! transform, Poisson predictions for the lowest levels, the macroscopic density
//! and its first correction, and the Monte Carlo estimate of the edge CDF.

mod correction;
mod special;

pub use correction::{
    fourfold_integrals, gamma1_correction, gamma1_integrand, gamma1_tail, FourfoldIntegrals, Gamma1Config, Gamma1Estimate,
};
pub use special::{airy_ai, airy_ai_prime, airy_kernel_density};

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::point_process::{airy_time_factor, rescale_airy};
use crate::riccati::{simulate_coupled_family, DiffusionParams, NumericsConfig};
use crate::stationary::{flux_j0, integrated_j0};
use crate::stats::wilson_interval;

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(invalid("beta", format!("need 0 < beta < 1, got {beta}")))
    }
}

/// The centre `−(⅜ ln(1/(βπ)))^{2/3}` needs `βπ < 1`.
fn check_edge_beta(beta: f64) -> Result<()> {
    check_beta(beta)?;
    if beta * std::f64::consts::PI < 1.0 {
        Ok(())
    } else {
        Err(invalid("beta", format!("the edge scaling needs beta < 1/pi, got {beta}")))
    }
}

/// The affine map `x ↦ ℓ_β(x) = center + scale·x` onto the scaling window of
/// the lowest level at temperature `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeScalingMap {
    pub beta: f64,
    pub center: f64,
    pub scale: f64,
}

impl EdgeScalingMap {
    pub fn new(beta: f64) -> Result<Self> {
        check_edge_beta(beta)?;
        let center = -(0.375 * (1.0 / (beta * std::f64::consts::PI)).ln()).powf(2.0 / 3.0);
        let scale = 1.0 / (2.0 * 3f64.cbrt() * (1.0 / beta).ln().cbrt());
        Ok(EdgeScalingMap { beta, center, scale })
    }

    pub fn level(&self, x: f64) -> f64 {
        self.center + self.scale * x
    }

    pub fn inverse(&self, ell: f64) -> f64 {
        (ell - self.center) / self.scale
    }
}

pub fn ell_beta(x: f64, beta: f64) -> Result<f64> {
    Ok(EdgeScalingMap::new(beta)?.level(x))
}

pub fn ell_beta_inverse(ell: f64, beta: f64) -> Result<f64> {
    Ok(EdgeScalingMap::new(beta)?.inverse(ell))
}

/// `(β/4)^{2/3} λ`: a level of the Airy-family operator expressed on the Linear scale.
pub fn scale_h_to_l(lambda_h: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(invalid("beta", "must be positive"));
    }
    Ok((beta / 4.0).powf(2.0 / 3.0) * lambda_h)
}

/// Gumbel CDF `exp(−e^{−x})`.
pub fn tw_gumbel_cdf_prediction(x: f64) -> f64 {
    (-(-x).exp()).exp()
}

/// `2·3^{1/3}(ln 1/β)^{1/3} [(β/4)^{2/3} tw − (⅜)^{2/3}(ln 1/(βπ))^{2/3}]`.
pub fn gumbel_transform(tw_value: f64, beta: f64) -> Result<f64> {
    check_edge_beta(beta)?;
    let lb = (1.0 / beta).ln();
    let lpb = (1.0 / (beta * std::f64::consts::PI)).ln();
    Ok(2.0 * 3f64.cbrt() * lb.cbrt() * ((beta / 4.0).powf(2.0 / 3.0) * tw_value - (0.375 * lpb).powf(2.0 / 3.0)))
}

/// `P[N ≥ k+1]` for `N ~ Poisson(mu)`.
pub fn poisson_tail(k: u32, mu: f64) -> f64 {
    if mu <= 0.0 {
        return 0.0;
    }
    let log_term = |i: u32| i as f64 * mu.ln() - mu - statrs::function::gamma::ln_gamma(i as f64 + 1.0);
    if mu < (k + 1) as f64 {
        // the tail is small: sum it directly
        let mut sum = 0.0;
        let mut i = k + 1;
        loop {
            let t = log_term(i).exp();
            sum += t;
            if t < 1e-17 * sum || i > k + 1000 {
                break;
            }
            i += 1;
        }
        sum.min(1.0)
    } else {
        let head: f64 = (0..=k).map(|i| log_term(i).exp()).sum();
        (1.0 - head).max(0.0)
    }
}

/// Limit CDF `1 − e^{−eˣ} Σ_{i≤k} e^{ix}/i!` of the rescaled `k`-th lowest level.
pub fn kth_marginal_limit_cdf(k: u32, x: f64) -> f64 {
    poisson_tail(k, x.exp())
}

/// The same with the Poisson mass of `[0, T]` only, `μ = eˣ(1 − e^{−T})`.
pub fn kth_marginal_finite_horizon_cdf(k: u32, x: f64, t_resc: f64) -> f64 {
    poisson_tail(k, x.exp() * -(-t_resc).exp_m1())
}

/// Log of the leading right-tail factors
/// `Γ(β/2)/((4β)^{β/2} 2π) · λ^{−3β/4} · exp(−⅔βλ^{3/2})`.
pub fn tw_right_tail_leading(lambda: f64, beta: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(invalid("lambda", "the right-tail form needs lambda > 0"));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(invalid("beta", "must be positive"));
    }
    let pre = statrs::function::gamma::ln_gamma(beta / 2.0)
        - (beta / 2.0 * (4.0 * beta).ln() + (2.0 * std::f64::consts::PI).ln());
    Ok(pre - 0.75 * beta * lambda.ln() - 2.0 / 3.0 * beta * lambda.powf(1.5))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityPoint {
    pub level: f64,
    /// `4 J₀(ℓ)/β`.
    pub density: f64,
    /// `(4/β) ∫_{−∞}^ℓ J₀`.
    pub integrated: f64,
}

/// Leading small-β eigenvalue density at level `ℓ`, where `J₀(ℓ)` is the
/// stationary flux at drift constant `a = −ℓ`.
pub fn macroscopic_density(ell: f64, beta: f64) -> Result<DensityPoint> {
    check_beta(beta)?;
    let j0 = flux_j0(-ell)?.value;
    let int = integrated_j0(ell)?.value;
    Ok(DensityPoint { level: ell, density: 4.0 * j0 / beta, integrated: 4.0 * int / beta })
}

/// CSV with columns `ell,density_4J0_over_beta,airy_kernel_density`; the Airy
/// kernel is evaluated at `−ℓ` (its bulk lies at `−∞`) and left empty outside
/// its range.
pub fn write_density_csv<W: Write>(points: &[DensityPoint], mut w: W) -> std::io::Result<()> {
    writeln!(w, "ell,density_4J0_over_beta,airy_kernel_density")?;
    for p in points {
        match airy_kernel_density(-p.level) {
            Ok(k) => writeln!(w, "{},{},{}", p.level, p.density, k)?,
            Err(_) => writeln!(w, "{},{},", p.level, p.density)?,
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TwCdfConfig {
    pub beta: f64,
    pub x_grid: Vec<f64>,
    pub n_samples: usize,
    /// Horizon in rescaled time.
    pub t_resc: f64,
    /// Highest marginal index tracked: row counts cover `≥ 1 … ≥ max_k+1` explosions.
    pub max_k: u32,
    pub seed_base: u64,
    pub ci_level: f64,
}

impl Default for TwCdfConfig {
    fn default() -> Self {
        TwCdfConfig {
            beta: 1e-4,
            x_grid: vec![-1.0, 0.0, 1.0],
            n_samples: 400,
            t_resc: 8.0,
            max_k: 1,
            seed_base: 0,
            ci_level: 0.95,
        }
    }
}

impl TwCdfConfig {
    pub fn validate(&self) -> Result<()> {
        check_beta(self.beta)?;
        if self.x_grid.is_empty() || self.x_grid.iter().any(|x| !x.is_finite()) {
            return Err(invalid("x_grid", "need at least one finite point"));
        }
        if self.n_samples == 0 {
            return Err(invalid("n_samples", "must be positive"));
        }
        if !(self.t_resc > 0.0 && self.t_resc.is_finite()) {
            return Err(invalid("t_resc", "must be positive"));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(invalid("ci_level", "must lie in (0, 1)"));
        }
        // mass e^{x−T} beyond the horizon must stay below the sampling error
        let x_max = self.x_grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let bias = (x_max - self.t_resc).exp();
        let noise = 0.5 / (self.n_samples as f64).sqrt();
        if bias > noise {
            return Err(invalid(
                "t_resc",
                format!("horizon too short: neglected mass {bias:.3e} exceeds half the sampling error {noise:.3e}"),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwCdfRow {
    pub x: f64,
    pub level: f64,
    pub n: u64,
    /// `at_least[j]`: replicas with at least `j+1` explosions on the horizon.
    pub at_least: Vec<u64>,
    /// Mean number of explosions in rescaled time `[0, 1)`.
    pub mean_unit_count: f64,
    ci_level: f64,
    t_resc: f64,
}

impl TwCdfRow {
    /// Estimate of `P[k-th level ≤ ℓ_β(x)]`.
    pub fn estimate(&self, k: u32) -> f64 {
        self.at_least[k as usize] as f64 / self.n as f64
    }

    pub fn interval(&self, k: u32) -> Result<(f64, f64)> {
        wilson_interval(self.at_least[k as usize], self.n, self.ci_level)
    }

    /// Poisson prediction with the same horizon.
    pub fn predicted(&self, k: u32) -> f64 {
        kth_marginal_finite_horizon_cdf(k, self.x, self.t_resc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwCdfEstimate {
    pub config: TwCdfConfig,
    pub horizon: f64,
    pub rows: Vec<TwCdfRow>,
    pub steps_taken: u64,
}

impl TwCdfEstimate {
    /// CSV with columns `x,predicted_cdf,estimated_cdf,ci_low,ci_high` for marginal `k`.
    pub fn write_csv<W: Write>(&self, k: u32, mut w: W) -> Result<()> {
        if k > self.config.max_k {
            return Err(invalid("k", format!("only marginals up to {} were tracked", self.config.max_k)));
        }
        writeln!(w, "x,predicted_cdf,estimated_cdf,ci_low,ci_high")?;
        for r in &self.rows {
            let (lo, hi) = r.interval(k)?;
            writeln!(w, "{},{},{},{},{}", r.x, r.predicted(k), r.estimate(k), lo, hi)?;
        }
        Ok(())
    }
}

struct Replica {
    counts: Vec<usize>,
    unit: Vec<usize>,
    steps: u64,
}

/// Monte Carlo estimate of the CDFs of the lowest levels at `ℓ_β(x)`.
///
/// Each replica runs the coupled Linear family at all grid levels with seed
/// `seed_base + i` up to rescaled time `t_resc`; `numerics.horizon` is ignored.
pub fn estimate_tw_cdf(cfg: &TwCdfConfig, numerics: &NumericsConfig) -> Result<TwCdfEstimate> {
    cfg.validate()?;
    let map = EdgeScalingMap::new(cfg.beta)?;
    let factor = airy_time_factor(cfg.beta)?;
    let horizon = cfg.t_resc / factor;
    let numerics = numerics.with_horizon(horizon);
    numerics.validate()?;

    let mut xs = cfg.x_grid.clone();
    xs.sort_by(f64::total_cmp);
    let levels: Vec<f64> = xs.iter().map(|&x| map.level(x)).collect();
    let template = DiffusionParams::Linear { ell: levels[0], beta: cfg.beta };

    let replicas = (0..cfg.n_samples as u64)
        .into_par_iter()
        .map(|i| -> Result<Replica> {
            let logs = simulate_coupled_family(&levels, &template, &numerics, cfg.seed_base.wrapping_add(i))?;
            let steps = logs.first().map_or(0, |l| l.steps_taken);
            let counts = logs.iter().map(|l| l.count()).collect();
            let unit = logs
                .into_iter()
                .map(|l| Ok(rescale_airy(Arc::new(l), cfg.beta)?.count(0.0, 1.0)))
                .collect::<Result<Vec<usize>>>()?;
            Ok(Replica { counts, unit, steps })
        })
        .collect::<Result<Vec<Replica>>>()?;

    let n = cfg.n_samples as u64;
    let rows = xs
        .iter()
        .zip(&levels)
        .enumerate()
        .map(|(j, (&x, &level))| {
            let at_least = (0..=cfg.max_k as usize)
                .map(|k| replicas.iter().filter(|r| r.counts[j] > k).count() as u64)
                .collect();
            let unit: usize = replicas.iter().map(|r| r.unit[j]).sum();
            TwCdfRow {
                x,
                level,
                n,
                at_least,
                mean_unit_count: unit as f64 / n as f64,
                ci_level: cfg.ci_level,
                t_resc: cfg.t_resc,
            }
        })
        .collect();
    Ok(TwCdfEstimate {
        config: cfg.clone(),
        horizon,
        rows,
        steps_taken: replicas.iter().map(|r| r.steps).sum(),
    })
}
