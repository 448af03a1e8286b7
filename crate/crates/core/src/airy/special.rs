//! The Airy function `Ai` and its derivative on `[−15, 15]`.
//!
//! Maclaurin series on `[−7, 5]`, the standard asymptotic expansions outside.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};

const AI0: f64 = 0.355_028_053_887_817_239;
const AIP0: f64 = 0.258_819_403_792_806_798;

const MAX_ABS: f64 = 15.0;
const SERIES_LO: f64 = -7.0;
const SERIES_HI: f64 = 5.0;

fn check(x: f64) -> Result<()> {
    if x.abs() <= MAX_ABS {
        Ok(())
    } else {
        Err(Error::OutOfRange { x, lo: -MAX_ABS, hi: MAX_ABS })
    }
}

/// `(Ai, Ai′)` from the Maclaurin series `Ai = c₁f − c₂g`.
fn series(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    // f = Σ a_k x^{3k}, g = x Σ b_k x^{3k}
    let (mut f, mut g0) = (1.0, 1.0);
    let (mut df, mut dg) = (0.0, 1.0);
    let (mut tf, mut tg) = (1.0, 1.0);
    for k in 1..200 {
        let kf = k as f64;
        // d/dx a_k x^{3k} = a_{k−1} x^{3k−1} / (3k−1)
        df += tf * x * x / (3.0 * kf - 1.0);
        tf *= x3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        tg *= x3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        f += tf;
        g0 += tg;
        dg += (3.0 * kf + 1.0) * tg;
        if tf.abs() < 1e-18 * f.abs().max(1.0) && tg.abs() < 1e-18 * g0.abs().max(1.0) {
            break;
        }
    }
    let g = x * g0;
    (AI0 * f - AIP0 * g, AI0 * df - AIP0 * dg)
}

/// Coefficients `u_k` of the asymptotic expansions and `v_k = −(6k+1)/(6k−1) u_k`.
fn asymptotic_coeffs(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0];
    let mut v = vec![1.0];
    for k in 1..n {
        let kf = k as f64;
        let uk = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        u.push(uk);
        v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk);
    }
    (u, v)
}

/// Sum `Σ sign^k c_k / ζ^k` over `k ≡ parity (mod 2)`, stopping at the smallest term.
fn asym_sum(c: &[f64], zeta: f64, step: usize, start: usize, alternate: bool) -> f64 {
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    let mut sign = 1.0;
    let mut k = start;
    while k < c.len() {
        let term = c[k] / zeta.powi(k as i32);
        if term.abs() > last {
            break;
        }
        sum += sign * term;
        last = term.abs();
        if alternate {
            sign = -sign;
        }
        k += step;
    }
    sum
}

fn asymptotic_positive(x: f64) -> (f64, f64) {
    let (u, v) = asymptotic_coeffs(40);
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let pre = (-zeta).exp() / (2.0 * PI.sqrt());
    let q = x.powf(0.25);
    let su = asym_sum(&u, zeta, 1, 0, true);
    let sv = asym_sum(&v, zeta, 1, 0, true);
    (pre / q * su, -pre * q * sv)
}

fn asymptotic_negative(x: f64) -> (f64, f64) {
    let (u, v) = asymptotic_coeffs(40);
    let z = -x;
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let q = z.powf(0.25);
    let (s, c) = (zeta + FRAC_PI_4).sin_cos();
    let u_even = asym_sum(&u, zeta, 2, 0, true);
    let u_odd = asym_sum(&u, zeta, 2, 1, true);
    let v_even = asym_sum(&v, zeta, 2, 0, true);
    let v_odd = asym_sum(&v, zeta, 2, 1, true);
    let ai = (s * u_even - c * u_odd) / (PI.sqrt() * q);
    let aip = -q / PI.sqrt() * (c * v_even + s * v_odd);
    (ai, aip)
}

fn both(x: f64) -> Result<(f64, f64)> {
    check(x)?;
    Ok(if x > SERIES_HI {
        asymptotic_positive(x)
    } else if x < SERIES_LO {
        asymptotic_negative(x)
    } else {
        series(x)
    })
}

pub fn airy_ai(x: f64) -> Result<f64> {
    Ok(both(x)?.0)
}

pub fn airy_ai_prime(x: f64) -> Result<f64> {
    Ok(both(x)?.1)
}

/// Edge density of the Airy kernel, `Ai′(x)² − x·Ai(x)²`.
pub fn airy_kernel_density(x: f64) -> Result<f64> {
    let (ai, aip) = both(x)?;
    Ok(aip * aip - x * ai * ai)
}
