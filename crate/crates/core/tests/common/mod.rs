//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use riccati_spectra::quad::{integrate_exp, QuadratureConfig};
use riccati_spectra::stationary::{flux_j0, flux_j0_prime};
use riccati_spectra::TridiagMatrix;

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn dense(m: &TridiagMatrix) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        a[i][i] = m.diag[i];
        if i + 1 < n {
            a[i][i + 1] = m.offdiag[i];
            a[i + 1][i] = m.offdiag[i];
        }
    }
    a
}

/// `ln ∫₀^∞ w(s) exp(φ(x+s) − φ(x)) ds`, `φ(x) = 2ax − ⅔x³`, with `w = 1` or `w = s`.
fn log_ray(a: f64, x: f64, weighted: bool) -> f64 {
    let phi = |y: f64| 2.0 * a * y - 2.0 / 3.0 * y * y * y;
    let base = phi(x);
    let f = move |s: f64| {
        // φ(x+s) − φ(x), expanded to avoid cancellation at large |x|
        let e = s * (2.0 * (a - x * x) - s * (2.0 * x + s * (2.0 / 3.0)));
        if weighted {
            e + s.ln()
        } else {
            e
        }
    };
    let sa = a.sqrt();
    let hint = if x < sa && (x > -sa || phi(sa) > base) { sa - x } else if weighted { 1.0 / (2.0 * x * x + 1.0) } else { 0.0 };
    let width = 1.0 / (1.0 + (x * x - a).abs() + (4.0 * x.abs()).sqrt());
    let cfg = QuadratureConfig::default().with_rel_tol(1e-10);
    integrate_exp(f, 0.0, f64::INFINITY, hint, width, &cfg).unwrap().log_value
}

/// The fourfold integrals `(I, K)` at `λ < 0` by nested quadrature on the grid
/// `x = 2 tan t`, with `1/(2|x|)` corrections for the algebraic tails, all scaled
/// by `exp(−(8/3)a^{3/2})`.
pub fn fourfold_by_quadrature(lambda: f64, points: usize) -> (f64, f64) {
    let a = -lambda;
    let shift = 8.0 / 3.0 * a.powf(1.5);
    let half = 0.999 * std::f64::consts::FRAC_PI_2;
    let ts: Vec<f64> = (0..points).map(|i| -half + 2.0 * half * i as f64 / (points - 1) as f64).collect();
    let xs: Vec<f64> = ts.iter().map(|t| 2.0 * t.tan()).collect();
    let jac: Vec<f64> = ts.iter().map(|t| 2.0 / t.cos().powi(2)).collect();
    let dt = ts[1] - ts[0];
    // g(u) = ∫_u^∞ e^{φ(z)−φ(u)}dz; h(v) = ∫_{−∞}^v e^{φ(v)−φ(w)}dw = g(−v)
    let half_shift = 0.5 * shift;
    let g: Vec<f64> = xs.iter().map(|&u| (log_ray(a, u, false) - half_shift).exp()).collect();
    let h: Vec<f64> = xs.iter().map(|&v| (log_ray(a, -v, false) - half_shift).exp()).collect();
    let hk: Vec<f64> = xs.iter().map(|&v| (log_ray(a, -v, true) - half_shift).exp()).collect();
    let cumulative = |f: &[f64], start: f64| {
        let mut out = vec![start; points];
        for i in 1..points {
            out[i] = out[i - 1] + 0.5 * dt * (f[i - 1] * jac[i - 1] + f[i] * jac[i]);
        }
        out
    };
    let x0 = xs[0].abs();
    let tail0 = (-half_shift).exp() / (2.0 * x0);
    let big_h = cumulative(&h, tail0);
    let big_hk = cumulative(&hk, 0.0);
    let trap = |f: &dyn Fn(usize) -> f64| {
        (0..points).map(|i| f(i) * jac[i] * if i == 0 || i == points - 1 { 0.5 } else { 1.0 }).sum::<f64>() * dt
    };
    let end = points - 1;
    let g_tail = (-half_shift).exp() / (2.0 * xs[end]);
    let i_val = trap(&|i| g[i] * big_h[i]) + big_h[end] * g_tail;
    let k_val = trap(&|i| g[i] * big_hk[i]) + big_hk[end] * g_tail;
    (i_val, k_val)
}

/// `Γ¹(ℓ)` by Gauss–Legendre over `λ` with deterministic inner integrals.
pub fn gamma1_by_quadrature(ell: f64, nodes: usize, points: usize) -> f64 {
    let l32 = (-ell).powf(1.5);
    let lambda_min = -(l32 + 35.0 * 3.0 / 8.0).powf(2.0 / 3.0);
    let (x, w) = riccati_spectra::quad::gauss_legendre(nodes);
    let half = 0.5 * (ell - lambda_min);
    let mid = 0.5 * (ell + lambda_min);
    (0..nodes)
        .map(|j| {
            let lambda = mid + half * x[j];
            let a = -lambda;
            let (i, k) = fourfold_by_quadrature(lambda, points);
            let shift = 8.0 / 3.0 * a.powf(1.5);
            let j0 = flux_j0(a).unwrap().log_value;
            let j0p = flux_j0_prime(a).unwrap().log_value;
            let f = -4.0 * (j0p + j0 + shift).exp() * i - 8.0 * (2.0 * j0 + shift).exp() * k;
            half * w[j] * f
        })
        .sum()
}
