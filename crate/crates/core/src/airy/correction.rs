//! First correction `Γ¹(ℓ)` to the integrated eigenvalue density.
//!
//! `Γ¹(ℓ) = ∫_{−∞}^ℓ [4 J₀′ J₀ I(λ) − 8 J₀² K(λ)] dλ`, where `J₀`, `J₀′ = dJ₀/da`
//! are taken at `a = −λ`, and `I`, `K` are the fourfold integrals of
//! `exp(φ(z) − φ(u) + φ(v) − φ(w))` (times `v − w` for `K`) over
//! `z ≥ u ≥ v ≥ w`, with `φ(x) = 2ax − ⅔x³`.
//!
//! The exponent is maximal, equal to `2φ(√a)`, on the segment `u = v ∈ [−√a, √a]`,
//! `z = √a`, `w = −√a`, and on two rays leaving its ends, along which the
//! integrand decays only algebraically. The proposal below follows that set.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{invalid, Result};
use crate::quad::{gauss_legendre, QuadratureResult};
use crate::rng;
use crate::stationary::{flux_j0, flux_j0_prime};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Gamma1Config {
    pub samples_per_node: usize,
    /// Gauss–Legendre nodes of the outer integral.
    pub nodes: usize,
    pub seed: u64,
    pub target_rel_error: f64,
}

impl Default for Gamma1Config {
    fn default() -> Self {
        Gamma1Config { samples_per_node: 200_000, nodes: 24, seed: 0, target_rel_error: 0.05 }
    }
}

impl Gamma1Config {
    pub fn validate(&self) -> Result<()> {
        if self.samples_per_node < 1000 {
            return Err(invalid("samples_per_node", "need at least 1000 samples"));
        }
        if !(2..=64).contains(&self.nodes) {
            return Err(invalid("nodes", "need 2 to 64 nodes"));
        }
        if !(self.target_rel_error > 0.0) {
            return Err(invalid("target_rel_error", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gamma1Estimate {
    /// Error bar is twice the standard error, inflated by `rel/target` when the
    /// target was missed.
    pub result: QuadratureResult,
    pub rel_std_error: f64,
    pub converged: bool,
}

/// `I(λ)` and `K(λ)` scaled by `exp(−(8/3)a^{3/2})`, with standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourfoldIntegrals {
    pub lambda: f64,
    pub log_scale: f64,
    pub i: f64,
    pub i_std_error: f64,
    pub k: f64,
    pub k_std_error: f64,
}

/// Normal law with mean `mu ≥ 0` truncated to `[0, ∞)`.
struct HalfLineNormal {
    mu: f64,
    sd: f64,
    lo: f64,
}

impl HalfLineNormal {
    fn new(std: &Normal, mu: f64, sd: f64) -> Self {
        HalfLineNormal { mu, sd, lo: std.cdf(-mu / sd) }
    }

    fn sample(&self, std: &Normal, rng: &mut ChaCha8Rng) -> f64 {
        let p = self.lo + (1.0 - self.lo) * rng.random::<f64>();
        (self.mu + self.sd * std.inverse_cdf(p)).max(0.0)
    }

    fn pdf(&self, std: &Normal, x: f64) -> f64 {
        std.pdf((x - self.mu) / self.sd) / (self.sd * (1.0 - self.lo))
    }
}

const CELLS: usize = 2048;

/// Importance-sampling estimate of the fourfold integrals at `λ < 0`.
pub fn fourfold_integrals(lambda: f64, samples: usize, seed: u64) -> Result<FourfoldIntegrals> {
    if !(lambda < 0.0) {
        return Err(invalid("lambda", "the fourfold integrals are estimated for lambda < 0"));
    }
    let a = -lambda;
    let s = a.sqrt();
    let sd = 1.5 / (4.0 * s).sqrt();
    let std = Normal::standard();
    let phi = |x: f64| 2.0 * a * x - 2.0 / 3.0 * x * x * x;
    let shift = 8.0 / 3.0 * a * s;

    // u: tabulated 1/(2|a − u²| + 2√s) on [−R, R] mixed with a Cauchy(0, s)
    let r = s + 4.0;
    let cw = 2.0 * r / CELLS as f64;
    let dens: Vec<f64> = (0..CELLS)
        .map(|j| {
            let m = -r + (j as f64 + 0.5) * cw;
            1.0 / (2.0 * (a - m * m).abs() + 2.0 * s.sqrt())
        })
        .collect();
    let total: f64 = dens.iter().sum();
    let mut cdf = Vec::with_capacity(CELLS);
    let mut acc = 0.0;
    for d in &dens {
        acc += d / total;
        cdf.push(acc);
    }
    let q_u = |u: f64| {
        let table = if u > -r && u < r {
            let j = (((u + r) / cw) as usize).min(CELLS - 1);
            dens[j] / total / cw
        } else {
            0.0
        };
        0.8 * table + 0.2 * s / (std::f64::consts::PI * (s * s + u * u))
    };

    let mut rng = rng::stream(seed);
    let (mut si, mut si2, mut sk, mut sk2) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..samples {
        let u = if rng.random::<f64>() < 0.8 {
            let target = rng.random::<f64>();
            let j = cdf.partition_point(|&c| c < target).min(CELLS - 1);
            -r + cw * (j as f64 + rng.random::<f64>())
        } else {
            s * (std::f64::consts::PI * (rng.random::<f64>() - 0.5)).tan()
        };
        let pz = HalfLineNormal::new(&std, (s - u).max(0.0), sd);
        let p = pz.sample(&std, &mut rng);

        // u − v: exponential escape rate, ray-following normal, heavy half-Cauchy
        let rate = (2.0 * (a - u * u)).max(2.0 * s.sqrt());
        let pd = HalfLineNormal::new(&std, (u - s).max(0.0), sd);
        let pick = rng.random::<f64>();
        let d = if pick < 0.4 {
            -(1.0 - rng.random::<f64>()).ln() / rate
        } else if pick < 0.7 {
            pd.sample(&std, &mut rng)
        } else {
            (s * (std::f64::consts::PI * (rng.random::<f64>() - 0.5)).tan()).abs()
        };
        let q_d = 0.4 * rate * (-rate * d).exp()
            + 0.3 * pd.pdf(&std, d)
            + 0.3 * 2.0 * s / (std::f64::consts::PI * (s * s + d * d));
        let v = u - d;
        let pw = HalfLineNormal::new(&std, (v + s).max(0.0), sd);
        let q = pw.sample(&std, &mut rng);

        let (z, w) = (u + p, v - q);
        let e = phi(z) - phi(u) + phi(v) - phi(w) - shift;
        let dens = q_u(u) * pz.pdf(&std, p) * q_d * pw.pdf(&std, q);
        let wi = if dens > 0.0 { e.exp() / dens } else { 0.0 };
        let wk = wi * q;
        si += wi;
        si2 += wi * wi;
        sk += wk;
        sk2 += wk * wk;
    }
    let n = samples as f64;
    let se = |s1: f64, s2: f64| ((s2 / n - (s1 / n).powi(2)).max(0.0) / (n - 1.0)).sqrt();
    Ok(FourfoldIntegrals {
        lambda,
        log_scale: shift,
        i: si / n,
        i_std_error: se(si, si2),
        k: sk / n,
        k_std_error: se(sk, sk2),
    })
}

/// The integrand `4 J₀′ J₀ I − 8 J₀² K` at `λ < 0` and its standard error.
pub fn gamma1_integrand(lambda: f64, samples: usize, seed: u64) -> Result<(f64, f64)> {
    let ints = fourfold_integrals(lambda, samples, seed)?;
    let a = -lambda;
    let j0 = flux_j0(a)?;
    let j0p = flux_j0_prime(a)?;
    // J₀′ < 0; both terms are negative
    let c_i = 4.0 * (j0p.log_value + j0.log_value + ints.log_scale).exp();
    let c_k = 8.0 * (2.0 * j0.log_value + ints.log_scale).exp();
    let value = -c_i * ints.i - c_k * ints.k;
    let se = c_i * ints.i_std_error + c_k * ints.k_std_error;
    Ok((value, se))
}

/// `Γ¹(ℓ)` for `ℓ < −1`: Gauss–Legendre in `λ` over the range where the
/// integrand is within `e^{−35}` of its value at `ℓ`, with importance-sampled
/// inner integrals at each node.
pub fn gamma1_correction(ell: f64, cfg: &Gamma1Config) -> Result<Gamma1Estimate> {
    cfg.validate()?;
    if !(ell < -1.0) {
        return Err(invalid("ell", "the sampler is tuned to deep wells: need ell < -1"));
    }
    let l32 = (-ell).powf(1.5);
    let lambda_min = -(l32 + 35.0 * 3.0 / 8.0).powf(2.0 / 3.0);
    let (x, w) = gauss_legendre(cfg.nodes);
    let half = 0.5 * (ell - lambda_min);
    let mid = 0.5 * (ell + lambda_min);
    let terms = (0..cfg.nodes)
        .into_par_iter()
        .map(|j| {
            let (f, se) = gamma1_integrand(mid + half * x[j], cfg.samples_per_node, cfg.seed.wrapping_add(j as u64))?;
            Ok((half * w[j] * f, half * w[j] * se))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let value: f64 = terms.iter().map(|t| t.0).sum();
    let se = terms.iter().map(|t| t.1 * t.1).sum::<f64>().sqrt();
    let rel = se / value.abs();
    let converged = rel <= cfg.target_rel_error;
    if !converged {
        log::warn!("gamma1_correction({ell}): relative standard error {rel:.3} above target {}", cfg.target_rel_error);
    }
    let abs_err = 2.0 * se * (rel / cfg.target_rel_error).max(1.0);
    Ok(Gamma1Estimate { result: QuadratureResult::from_value(value, abs_err), rel_std_error: rel, converged })
}

/// Asymptotic form `−(3/π) ln|ℓ| e^{−4|ℓ|^{3/2}}`; NaN for `ℓ ≥ 0`.
pub fn gamma1_tail(ell: f64) -> f64 {
    if !(ell < 0.0) {
        return f64::NAN;
    }
    -3.0 / std::f64::consts::PI * (-ell).ln() * (-4.0 * (-ell).powf(1.5)).exp()
}
