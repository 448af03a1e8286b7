//! The functions `R_n` whose alternating series gives the Laplace transform of
//! the exit time, and the exit-time moments `n! mⁿ R_n`.
//!
//! `R₀ = 1` and
//! `R_n(y) = (2/m) ∫_{−∞}^y dx ∫_x^∞ du exp(2a(u−x) + ⅔(x³−u³)) R_{n−1}(u)`.
//! Each `R_n` is stored as a Chebyshev series in `s ∈ [−1, 1]` with
//! `x = c + L·tan(πs/2)`, so `y = ±∞` are the endpoints.

use std::f64::consts::{FRAC_PI_2, LN_2};

use super::{inner_cfg, mean_exit_time_with, well_exponent, well_peak};
use crate::error::{invalid, Error, Result};
use crate::quad::{integrate_exp, QuadratureConfig, QuadratureResult};

pub const MAX_RN_DEPTH: usize = 4;

const NODES: usize = 257;

struct Cheb {
    c: Vec<f64>,
}

impl Cheb {
    fn fit(values: &[f64]) -> Cheb {
        let n = values.len();
        let c = (0..n)
            .map(|j| {
                let s: f64 = values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * (std::f64::consts::PI * j as f64 * (k as f64 + 0.5) / n as f64).cos())
                    .sum();
                2.0 * s / n as f64
            })
            .collect();
        Cheb { c }
    }

    fn integral(&self) -> Cheb {
        let n = self.c.len();
        let mut b = vec![0.0; n];
        let mut sum = 0.0;
        let mut fac = 1.0;
        for j in 1..n {
            let next = if j + 1 < n { self.c[j + 1] } else { 0.0 };
            b[j] = (self.c[j - 1] - next) / (2.0 * j as f64);
            sum += fac * b[j];
            fac = -fac;
        }
        b[0] = 2.0 * sum;
        Cheb { c: b }
    }

    fn eval(&self, s: f64) -> f64 {
        let (mut d, mut dd) = (0.0, 0.0);
        for &cj in self.c[1..].iter().rev() {
            let sv = d;
            d = 2.0 * s * d - dd + cj;
            dd = sv;
        }
        s * d - dd + 0.5 * self.c[0]
    }

    fn tail_size(&self) -> f64 {
        self.c.iter().rev().take(8).map(|c| c.abs()).sum()
    }
}

/// `R_1 … R_depth` for one value of `a`, reusable across `y`.
pub struct RnTable {
    a: f64,
    log_m: f64,
    center: f64,
    scale: f64,
    levels: Vec<Cheb>,
    errors: Vec<f64>,
}

impl RnTable {
    pub fn new(a: f64, depth: usize) -> Result<RnTable> {
        if depth > MAX_RN_DEPTH {
            return Err(invalid("n", format!("depth {depth} exceeds the supported maximum {MAX_RN_DEPTH}")));
        }
        let cfg = QuadratureConfig::default();
        let inner = cfg.with_rel_tol(1e-9);
        let log_m = mean_exit_time_with(a, &inner_cfg(&cfg))?.log_value;
        let center = -a.max(0.0).sqrt();
        let scale = 1.0;
        let mut table = RnTable { a, log_m, center, scale, levels: Vec::new(), errors: Vec::new() };
        let nodes: Vec<f64> = (0..NODES)
            .map(|k| (std::f64::consts::PI * (k as f64 + 0.5) / NODES as f64).cos())
            .collect();
        for n in 1..=depth {
            let mut vals = Vec::with_capacity(NODES);
            for &s in &nodes {
                let t = (FRAC_PI_2 * s).tan();
                let x = center + scale * t;
                let dxds = scale * FRAC_PI_2 * (1.0 + t * t);
                let (hint, width) = well_peak(a, x);
                let prev = |u: f64| -> f64 {
                    if n == 1 {
                        0.0
                    } else {
                        table.eval_level(n - 1, u).max(1e-300).ln()
                    }
                };
                let log_g = match integrate_exp(
                    |s2| well_exponent(a, x, s2) + prev(x + s2),
                    0.0,
                    f64::INFINITY,
                    hint,
                    width,
                    &inner,
                ) {
                    Ok(g) => g.log_value,
                    // the previous level carries series roundoff; accept a near miss
                    Err(Error::Quadrature { partial, error })
                        if partial > 0.0
                            && (error < 1e-6 * partial || (LN_2 - log_m + error.ln()).exp() * dxds < 1e-12) =>
                    {
                        partial.ln()
                    }
                    Err(e) => return Err(e),
                };
                vals.push((LN_2 - log_m + log_g).exp() * dxds);
            }
            let cheb = Cheb::fit(&vals).integral();
            let err = cheb.tail_size() + 1e-9;
            table.errors.push(err);
            table.levels.push(cheb);
        }
        Ok(table)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// `ln m(a)`.
    pub fn log_mean_exit_time(&self) -> f64 {
        self.log_m
    }

    fn to_s(&self, y: f64) -> f64 {
        if y == f64::INFINITY {
            1.0
        } else if y == f64::NEG_INFINITY {
            -1.0
        } else {
            ((y - self.center) / self.scale).atan() / FRAC_PI_2
        }
    }

    fn eval_level(&self, n: usize, y: f64) -> f64 {
        if n == 0 {
            1.0
        } else {
            self.levels[n - 1].eval(self.to_s(y))
        }
    }

    /// `R_n(y)` for `n ≤ depth`; `y` may be `+∞`.
    pub fn r(&self, n: usize, y: f64) -> Result<QuadratureResult> {
        if n > self.depth() {
            return Err(invalid("n", format!("table holds R_n only up to n = {}", self.depth())));
        }
        let err = if n == 0 { 0.0 } else { self.errors[n - 1] };
        Ok(QuadratureResult::from_value(self.eval_level(n, y), err))
    }
}

/// `R_n(y)` at drift `a`; `n ≤ 4`.
pub fn compute_rn(n: usize, y: f64, a: f64) -> Result<QuadratureResult> {
    if n > MAX_RN_DEPTH {
        return Err(invalid("n", format!("depth {n} exceeds the supported maximum {MAX_RN_DEPTH}")));
    }
    RnTable::new(a, n)?.r(n, y)
}

/// `E_y[ζⁿ] = n! m(a)ⁿ R_n(y)`.
pub fn exit_time_moment(n: usize, y: f64, a: f64) -> Result<f64> {
    let table = RnTable::new(a, n)?;
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    Ok(fact * (n as f64 * table.log_m).exp() * table.r(n, y)?.value)
}

/// Laplace transform `E_y[exp(−α ζ / m(a))]` of the exit time in units of
/// `m(a)`, from the alternating series `Σ_{n≤3} (−α)ⁿ R_n(y)`; the truncation
/// error is at most `α⁴`.
pub fn laplace_g(alpha: f64, a: f64, y: f64) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(invalid("alpha", "must be nonnegative"));
    }
    if alpha >= 1.0 {
        return Err(invalid("alpha", "series converges only for alpha < 1"));
    }
    if alpha == 0.0 {
        return Ok(1.0);
    }
    let table = RnTable::new(a, 3)?;
    laplace_from_table(&table, alpha, y)
}

pub(crate) fn laplace_from_table(table: &RnTable, alpha: f64, y: f64) -> Result<f64> {
    let mut g = 0.0;
    let mut p = 1.0;
    for n in 0..=3 {
        g += p * table.r(n, y)?.value;
        p *= -alpha;
    }
    Ok(g)
}
