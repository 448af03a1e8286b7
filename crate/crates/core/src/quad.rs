//! Adaptive Gauss–Kronrod quadrature with log-domain shifting.
//!
//! The stationary-well integrands are of the form `exp(φ(x))` where `φ` has a
//! cubic term, so they decay super-exponentially on one side and can peak at
//! `exp(±10^3)`. Integrals are evaluated as `exp(shift) · ∫ exp(φ − shift)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Natural log of `|value|`; finite even when `value` overflows.
    pub log_value: f64,
    pub abs_error_estimate: f64,
    pub used_log_domain: bool,
}

impl QuadratureResult {
    pub(crate) fn from_log(log_value: f64, rel_err: f64, negative: bool, used_log_domain: bool) -> Self {
        let mag = log_value.exp();
        QuadratureResult {
            value: if negative { -mag } else { mag },
            log_value,
            abs_error_estimate: rel_err * mag,
            used_log_domain,
        }
    }

    pub(crate) fn from_value(value: f64, abs_err: f64) -> Self {
        QuadratureResult {
            value,
            log_value: value.abs().ln(),
            abs_error_estimate: abs_err,
            used_log_domain: false,
        }
    }

    /// Relative error estimate, meaningful even when `value` is not representable.
    pub fn rel_error(&self) -> f64 {
        if self.value.is_finite() && self.value != 0.0 {
            self.abs_error_estimate / self.value.abs()
        } else {
            f64::NAN
        }
    }

    pub fn is_negative(&self) -> bool {
        self.value.is_sign_negative()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Extra log-units beyond `ln(1/rel_tol)` before an infinite tail is cut off.
    pub truncation_margin: f64,
    /// Peak exponents with magnitude above this are integrated after shift-by-max.
    pub log_threshold: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-8,
            max_subdivisions: 4000,
            truncation_margin: 12.0,
            log_threshold: 300.0,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(invalid("rel_tol", "tolerance must be positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(invalid("max_subdivisions", "must be at least 1"));
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    fn tail_drop(&self) -> f64 {
        -self.rel_tol.ln() + self.truncation_margin
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 15-point Kronrod panel with the QUADPACK error heuristic.
fn gk15<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        rk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            rg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * rk;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = rk * h;
    let asc = asc * h.abs();
    let mut err = ((rk - rg) * h).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    (result, err)
}

struct Panel {
    lo: f64,
    hi: f64,
    piece: usize,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Globally adaptive integration of a sum of pieces `∫_{lo}^{hi} f`.
///
/// Returns `(value, error)`; on budget exhaustion the partial sum is carried
/// in the error.
pub(crate) fn adaptive(
    pieces: &[(&dyn Fn(f64) -> f64, f64, f64)],
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<(f64, f64)> {
    let mut heap = BinaryHeap::new();
    let (mut total, mut total_err) = (0.0, 0.0);
    for (i, &(f, lo, hi)) in pieces.iter().enumerate() {
        if hi <= lo {
            continue;
        }
        let (v, e) = gk15(f, lo, hi);
        total += v;
        total_err += e;
        heap.push(Panel { lo, hi, piece: i, value: v, err: e });
    }
    let mut splits = 0;
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::Quadrature { partial: total, error: total_err });
        }
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok((total, total_err));
        }
        if splits >= max_subdivisions {
            return Err(Error::Quadrature { partial: total, error: total_err });
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => return Ok((total, total_err)),
        };
        let f = pieces[worst.piece].0;
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // panel below floating resolution: accept as is
            heap.push(Panel { err: 0.0, ..worst });
            total_err = heap.iter().map(|p| p.err).sum();
            splits += 1;
            continue;
        }
        let (v1, e1) = gk15(f, worst.lo, mid);
        let (v2, e2) = gk15(f, mid, worst.hi);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel { lo: worst.lo, hi: mid, piece: worst.piece, value: v1, err: e1 });
        heap.push(Panel { lo: mid, hi: worst.hi, piece: worst.piece, value: v2, err: e2 });
        splits += 1;
        if splits % 64 == 0 {
            // refresh running sums to shed accumulated cancellation
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }
}

/// Plain adaptive quadrature of `f` on a finite interval.
pub fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    cfg.validate()?;
    let (v, e) = adaptive(&[(&f, lo, hi)], 0.0, cfg.rel_tol, cfg.max_subdivisions)?;
    Ok(QuadratureResult::from_value(v, e))
}

/// Find the largest value of `log_f` on a probe lattice around `hint`.
fn locate_peak(log_f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, hint: f64, width: f64) -> (f64, f64) {
    let mut best = (hint.clamp(lo, hi), f64::NEG_INFINITY);
    let mut probe = |x: f64| {
        if x >= lo && x <= hi {
            let v = log_f(x);
            if v > best.1 {
                best = (x, v);
            }
        }
    };
    probe(hint.clamp(lo, hi));
    for k in 1..=24 {
        let d = width * k as f64 / 4.0;
        probe(hint + d);
        probe(hint - d);
    }
    if lo.is_finite() {
        probe(lo);
    }
    if hi.is_finite() {
        probe(hi);
    }
    // golden-section polish on the bracketing cells
    let (mut a, mut b) = ((best.0 - width / 4.0).max(lo), (best.0 + width / 4.0).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..40 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if log_f(c) >= log_f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let x = 0.5 * (a + b);
    let v = log_f(x);
    if v > best.1 {
        (x, v)
    } else {
        best
    }
}

/// Integrate `exp(log_f)` over `[lo, hi]` (either end may be infinite).
///
/// `hint` is a guess for the location of the maximum and `width` the scale over
/// which `log_f` changes by O(1). Infinite ends are cut where `log_f` has dropped
/// by `ln(1/rel_tol) + margin` below the peak; if that does not happen within
/// `4096·width`, the remainder is mapped onto a finite interval instead.
pub fn integrate_exp(
    log_f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    hint: f64,
    width: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    cfg.validate()?;
    if !(lo < hi) {
        return Ok(QuadratureResult::from_log(f64::NEG_INFINITY, 0.0, false, false));
    }
    let log_f = |x: f64| {
        let v = log_f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let (split, peak) = locate_peak(&log_f, lo, hi, hint, width);
    if peak == f64::NEG_INFINITY {
        return Ok(QuadratureResult::from_log(f64::NEG_INFINITY, 0.0, false, false));
    }
    let used_log_domain = peak.abs() > cfg.log_threshold;
    let shift = if used_log_domain { peak } else { 0.0 };
    let floor = peak - cfg.tail_drop();

    let f = |x: f64| (log_f(x) - shift).exp();

    // Each side either ends at a finite cut or continues through a mapped tail.
    let mut cuts: Vec<(f64, f64)> = Vec::new();
    let mut tails: Vec<(f64, f64)> = Vec::new(); // (start, signed scale)
    for dir in [-1.0, 1.0] {
        let end = if dir < 0.0 { lo } else { hi };
        if end.is_finite() {
            cuts.push(if dir < 0.0 { (lo, split) } else { (split, hi) });
            continue;
        }
        let mut d = width / 4.0;
        let mut done = false;
        while d <= 4096.0 * width {
            if log_f(split + dir * d) < floor {
                done = true;
                break;
            }
            d *= 2.0;
        }
        let x = split + dir * d;
        cuts.push(if dir < 0.0 { (x, split) } else { (split, x) });
        if !done {
            tails.push((x, dir * d));
        }
    }

    let mapped: Vec<Box<dyn Fn(f64) -> f64 + '_>> = tails
        .iter()
        .map(|&(start, scale)| {
            let f = &f;
            Box::new(move |s: f64| {
                let r = 1.0 - s;
                f(start + scale * s / r) * scale.abs() / (r * r)
            }) as Box<dyn Fn(f64) -> f64>
        })
        .collect();
    let mut pieces: Vec<(&dyn Fn(f64) -> f64, f64, f64)> = Vec::new();
    for &(a, b) in &cuts {
        pieces.push((&f, a, b));
    }
    for m in &mapped {
        pieces.push((m.as_ref(), 0.0, 1.0));
    }
    let scale = (peak - shift).exp() * width;
    let abs_floor = 1e-3 * cfg.rel_tol * scale * (-cfg.truncation_margin).exp();
    let (v, e) = adaptive(&pieces, abs_floor, cfg.rel_tol, cfg.max_subdivisions).map_err(|err| match err {
        Error::Quadrature { partial, error } => Error::Quadrature {
            partial: partial * shift.exp(),
            error: error * shift.exp(),
        },
        other => other,
    })?;
    if v <= 0.0 {
        return Ok(QuadratureResult::from_log(f64::NEG_INFINITY, 0.0, false, used_log_domain));
    }
    Ok(QuadratureResult::from_log(shift + v.ln(), e / v, false, used_log_domain))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_integral() {
        let cfg = QuadratureConfig::default();
        let r = integrate_exp(|x| -x * x, f64::NEG_INFINITY, f64::INFINITY, 0.3, 1.0, &cfg).unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!(!r.used_log_domain);
    }

    #[test]
    fn algebraic_tail_is_mapped() {
        // ∫_1^∞ x^-2 = 1
        let cfg = QuadratureConfig::default();
        let r = integrate_exp(|x| -2.0 * x.ln(), 1.0, f64::INFINITY, 1.0, 1.0, &cfg).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn shift_by_max_handles_huge_exponents() {
        // ∫ exp(1000 - (x-3)^2) = sqrt(pi) e^1000
        let cfg = QuadratureConfig::default();
        let r = integrate_exp(|x| 1000.0 - (x - 3.0).powi(2), f64::NEG_INFINITY, f64::INFINITY, 0.0, 1.0, &cfg)
            .unwrap();
        assert!(r.used_log_domain);
        assert!(r.value.is_infinite());
        assert!((r.log_value - (1000.0 + 0.5 * std::f64::consts::PI.ln())).abs() < 1e-10);
    }

    #[test]
    fn finite_interval_polynomial() {
        let r = integrate(|x| x * x * x, 0.0, 2.0, &QuadratureConfig::default()).unwrap();
        assert!((r.value - 4.0).abs() < 1e-13);
    }

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        for n in [1, 2, 5, 16, 33] {
            let (x, w) = gauss_legendre(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}");
            let deg = 2 * n - 1;
            let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((m - exact).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        let cfg = QuadratureConfig { rel_tol: 0.0, ..Default::default() };
        assert!(integrate(|x| x, 0.0, 1.0, &cfg).is_err());
    }
}
