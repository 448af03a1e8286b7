//! The stationary well: diffusion `dY = (a − Y²) dt + dB` restarted at `+∞`.
//!
//! Mean exit times, the stationary flux `J₀ = 1/m`, the stationary density, the
//! series for the Laplace transform of the exit time, and the integrated flux
//! that becomes the macroscopic eigenvalue density at small β.

mod rn;

pub use rn::{compute_rn, exit_time_moment, laplace_g, RnTable, MAX_RN_DEPTH};

use std::f64::consts::{LN_2, PI};

use crate::error::{invalid, Result};
use crate::quad::{integrate_exp, QuadratureConfig, QuadratureResult};

fn inner_cfg(cfg: &QuadratureConfig) -> QuadratureConfig {
    cfg.with_rel_tol((cfg.rel_tol * 1e-2).max(1e-14))
}

/// Exponent of `exp(2a(u−x) + ⅔(x³−u³))` written in `s = u − x ≥ 0`.
#[inline]
fn well_exponent(a: f64, x: f64, s: f64) -> f64 {
    s * (2.0 * (a - x * x) - s * (2.0 * x + s * (2.0 / 3.0)))
}

/// Peak location (in `s`) and local width of `well_exponent(a, x, ·)` on `s ≥ 0`.
///
/// The exponent rises while `|x + s| < √a`, so the candidates are the boundary
/// `s = 0` and the interior point `s = √a − x`.
fn well_peak(a: f64, x: f64) -> (f64, f64) {
    let boundary_width = 1.0 / (1.0 + 2.0 * (a - x * x).abs() + (4.0 * x.abs()).sqrt());
    if a <= 0.0 || x >= a.sqrt() {
        return (0.0, boundary_width);
    }
    let s_star = a.sqrt() - x;
    let interior_width = 1.0 / (1.0 + (4.0 * a.sqrt()).sqrt());
    if x < -a.sqrt() && well_exponent(a, x, s_star) < 0.0 {
        (0.0, boundary_width)
    } else {
        (s_star, interior_width)
    }
}

/// `ln ∫_x^∞ exp(2a(u−x) + ⅔(x³−u³)) du`.
pub(crate) fn log_inner(a: f64, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let (hint, width) = well_peak(a, x);
    let r = integrate_exp(|s| well_exponent(a, x, s), 0.0, f64::INFINITY, hint, width, cfg)?;
    Ok(r.log_value)
}

fn barrier_scale(a: f64) -> (f64, f64) {
    let a_pos = a.max(0.0);
    (-a_pos.sqrt(), 0.5 / (1.0 + a_pos).powf(0.25))
}

/// Mean exit time `m(a, y)` started from `y`:
/// `2 ∫_{−∞}^y dx ∫_x^∞ du exp(2a(u−x) + ⅔(x³−u³))`.
pub fn mean_exit_time_from(a: f64, y: f64) -> Result<QuadratureResult> {
    mean_exit_time_from_with(a, y, &QuadratureConfig::default())
}

pub fn mean_exit_time_from_with(a: f64, y: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    finite("a", a)?;
    if y.is_nan() {
        return Err(invalid("y", "must not be NaN"));
    }
    let inner = inner_cfg(cfg);
    let (x_star, width) = barrier_scale(a);
    let log_f = |x: f64| LN_2 + log_inner(a, x, &inner).unwrap_or(f64::NAN);
    integrate_exp(log_f, f64::NEG_INFINITY, y, x_star.min(y), width, cfg)
}

/// Mean exit time from `+∞`: `√(2π) ∫₀^∞ v^{−1/2} exp(2av − v³/6) dv`,
/// evaluated as `2√(2π) ∫₀^∞ exp(2as² − s⁶/6) ds`.
pub fn mean_exit_time(a: f64) -> Result<QuadratureResult> {
    mean_exit_time_with(a, &QuadratureConfig::default())
}

pub fn mean_exit_time_with(a: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    finite("a", a)?;
    let (hint, width) = if a > 0.0 {
        ((4.0 * a).powf(0.25), 1.0 / (1.0 + 4.0 * a.sqrt()))
    } else {
        (0.0, 1.0 / (1.0 + 2.0 * (-a).sqrt()))
    };
    let log_f = |s: f64| 2.0 * a * s * s - s.powi(6) / 6.0;
    let r = integrate_exp(log_f, 0.0, f64::INFINITY, hint, width, cfg)?;
    let log_m = r.log_value + (2.0 * (2.0 * PI).sqrt()).ln();
    Ok(QuadratureResult::from_log(log_m, rel_err(&r), false, r.used_log_domain))
}

fn finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, "must be finite"))
    }
}

fn rel_err(r: &QuadratureResult) -> f64 {
    if r.value.is_finite() && r.value != 0.0 {
        r.abs_error_estimate / r.value.abs()
    } else {
        // overflowed: error was computed relative to the shifted integral
        1e-8
    }
}

/// Large-`a` expansion `ln m(a) ≈ ln π − ½ ln a + (8/3)a^{3/2} + ln(1 + 5/(48 a^{3/2}))`.
///
/// Returns NaN for `a ≤ 0`.
pub fn mean_exit_time_asymptotic(a: f64) -> f64 {
    if !(a > 0.0) {
        return f64::NAN;
    }
    let a32 = a.powf(1.5);
    PI.ln() - 0.5 * a.ln() + 8.0 / 3.0 * a32 + (5.0 / (48.0 * a32)).ln_1p()
}

/// Stationary flux `J₀(a) = 1/m(a)`.
pub fn flux_j0(a: f64) -> Result<QuadratureResult> {
    flux_j0_with(a, &QuadratureConfig::default())
}

pub fn flux_j0_with(a: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    let m = mean_exit_time_with(a, cfg)?;
    Ok(QuadratureResult::from_log(-m.log_value, rel_err(&m), false, m.used_log_domain))
}

/// `dJ₀/da = −J₀² · 2√(2π) ∫₀^∞ 2s² exp(2as² − s⁶/6) ds`.
pub fn flux_j0_prime(a: f64) -> Result<QuadratureResult> {
    let cfg = QuadratureConfig::default();
    let m = mean_exit_time_with(a, &cfg)?;
    let hint = if a > 0.0 { (4.0 * a).powf(0.25) } else { 1.0 };
    let width = 1.0 / (1.0 + 4.0 * a.abs().sqrt());
    let log_f = |s: f64| (2.0 * s * s).ln() + 2.0 * a * s * s - s.powi(6) / 6.0;
    let d = integrate_exp(log_f, 0.0, f64::INFINITY, hint, width, &cfg)?;
    let log_dm = d.log_value + (2.0 * (2.0 * PI).sqrt()).ln();
    let log_val = log_dm - 2.0 * m.log_value;
    let rel = rel_err(&d) + 2.0 * rel_err(&m);
    Ok(QuadratureResult::from_log(log_val, rel, true, d.used_log_domain || m.used_log_domain))
}

/// Stationary density `p₀(y) = 2J₀(a) ∫_{−∞}^y exp(2a(y−u) + ⅔(u³−y³)) du`.
pub fn stationary_density_p0(y: f64, a: f64) -> Result<f64> {
    let cfg = QuadratureConfig::default();
    let j0 = flux_j0_with(a, &cfg)?;
    // u = y − s turns the integrand into the inner well integrand at x = −y
    let li = log_inner(a, -y, &inner_cfg(&cfg))?;
    Ok((LN_2 + j0.log_value + li).exp())
}

/// `∫_{−∞}^{ℓ} J₀(−u) du`, the integrated flux in level notation.
pub fn integrated_j0(ell: f64) -> Result<QuadratureResult> {
    finite("ell", ell)?;
    let cfg = QuadratureConfig::default();
    let inner = inner_cfg(&cfg);
    let log_f = |u: f64| match mean_exit_time_with(-u, &inner) {
        Ok(m) => -m.log_value,
        Err(_) => f64::NAN,
    };
    let width = 1.0 / (1.0 + 4.0 * ell.abs().sqrt());
    integrate_exp(log_f, f64::NEG_INFINITY, ell, ell, width, &cfg)
}

/// Left-tail form `(1/4π) e^{−(8/3)|ℓ|^{3/2}} (1 − 5/(48|ℓ|^{3/2}))` of
/// [`integrated_j0`]; NaN for `ℓ ≥ 0`.
pub fn integrated_j0_tail(ell: f64) -> f64 {
    if !(ell < 0.0) {
        return f64::NAN;
    }
    let l32 = (-ell).powf(1.5);
    (-(8.0 / 3.0) * l32).exp() * (1.0 - 5.0 / (48.0 * l32)) / (4.0 * PI)
}

/// McKean's expected eigenvalue count of the Hill operator on `[0, L]` below
/// level `−a`: `L · J₀(a)`.
pub fn mckean_count(length: f64, a: f64) -> Result<f64> {
    Ok(length * flux_j0(a)?.value)
}

/// Limiting CDF of the centred, scaled Hill ground state: `1 − e^{−eˣ}`.
pub fn hill_ground_cdf(_length: f64, x: f64) -> f64 {
    -(-x.exp()).exp_m1()
}

/// Level `−(⅜ ln(L/π))^{2/3} + x / (2·3^{1/3}(ln L)^{1/3})` at which the ground
/// state of the Hill operator on `[0, L]` has CDF [`hill_ground_cdf`]`(L, x)`.
pub fn hill_ground_level(length: f64, x: f64) -> f64 {
    let center = -(0.375 * (length / PI).ln()).powf(2.0 / 3.0);
    let scale = 1.0 / (2.0 * 3f64.cbrt() * length.ln().cbrt());
    center + scale * x
}

/// The drift constant `a` of the stationary diffusion counting Hill eigenvalues
/// below `level`.
pub fn hill_drift_for_level(level: f64) -> f64 {
    -level
}
