//! Tridiagonal β-ensembles: sampling, Sturm counts, extreme eigenvalues by
//! bisection, and the edge rescaling of the top eigenvalue.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct EnsembleParams {
    pub n: usize,
    pub beta_n: f64,
}

impl EnsembleParams {
    pub fn new(n: usize, beta_n: f64) -> Result<Self> {
        let p = EnsembleParams { n, beta_n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(invalid("n", "matrix size must be at least 2"));
        }
        if !(self.beta_n > 0.0) || !(self.n as f64 * self.beta_n).is_finite() {
            return Err(invalid("beta_n", "must be positive and finite"));
        }
        if (self.n as f64) * self.beta_n < 10.0 {
            log::warn!(
                "N*beta_N = {} < 10: the edge is far from the stochastic-operator regime",
                self.n as f64 * self.beta_n
            );
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TridiagMatrix {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl TridiagMatrix {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(invalid("offdiag", "need N diagonal and N-1 off-diagonal entries"));
        }
        if offdiag.iter().any(|&b| !(b >= 0.0)) {
            return Err(invalid("offdiag", "off-diagonal entries must be nonnegative"));
        }
        Ok(TridiagMatrix { diag, offdiag })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Gershgorin enclosure `[lo, hi]` of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }
}

/// Draw `diag_i = √2·g_i` and `offdiag_k = χ_{(N−k)β_N}` (`k = 1..N−1`), the
/// χ variate being the square root of a Gamma(shape m/2, scale 2) draw.
pub fn sample_matrix(params: &EnsembleParams, seed: u64) -> Result<TridiagMatrix> {
    params.validate()?;
    let mut rng = rng::stream(seed);
    let n = params.n;
    let diag: Vec<f64> = (0..n)
        .map(|_| std::f64::consts::SQRT_2 * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let offdiag = (1..n)
        .map(|k| {
            let shape = 0.5 * (n - k) as f64 * params.beta_n;
            let g = Gamma::new(shape, 2.0).map_err(|e| invalid("beta_n", e.to_string()))?;
            Ok(g.sample(&mut rng).sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(TridiagMatrix { diag, offdiag })
}

/// Number of eigenvalues strictly below `x`, from the signs of the pivots of
/// the LDLᵀ factorisation of `T − xI`.
pub fn sturm_count(m: &TridiagMatrix, x: f64) -> usize {
    let max_b2 = m.offdiag.iter().fold(1.0f64, |acc, b| acc.max(b * b));
    let pivmin = f64::MIN_POSITIVE * max_b2;
    let mut count = 0;
    let mut d = m.diag[0] - x;
    for i in 0.. {
        if d.abs() < pivmin {
            // an exact zero pivot moves to the side it takes for x − 0
            d = pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
        if i + 1 == m.len() {
            break;
        }
        let b = m.offdiag[i];
        d = m.diag[i + 1] - x - b * b / d;
    }
    count
}

/// The `k` largest eigenvalues, in decreasing order, to absolute accuracy
/// `1e-10` times the Gershgorin radius.
pub fn top_k_eigenvalues(m: &TridiagMatrix, k: usize) -> Result<Vec<f64>> {
    let n = m.len();
    if k == 0 || k > n {
        return Err(invalid("k", format!("need 1 <= k <= {n}, got {k}")));
    }
    let (glo, ghi) = m.gershgorin();
    let radius = glo.abs().max(ghi.abs()).max(f64::MIN_POSITIVE);
    let tol = 1e-10 * radius;
    let mut out = Vec::with_capacity(k);
    let mut upper = ghi;
    for j in 0..k {
        // eigenvalue with ascending index i is where the count passes i → i + 1
        let i = n - 1 - j;
        let (mut lo, mut hi) = (glo - tol, upper + tol);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(m, mid) <= i {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let ev = 0.5 * (lo + hi);
        out.push(ev);
        upper = ev;
    }
    Ok(out)
}

/// `(Nβ)^{2/3} (λ₀/(Nβ)^{1/2} − 2)`.
pub fn edge_rescale(lambda0: f64, n: usize, beta_n: f64) -> f64 {
    let s = n as f64 * beta_n;
    s.powf(2.0 / 3.0) * (lambda0 / s.sqrt() - 2.0)
}

/// Centre `(3/2)^{2/3} L^{2/3}` and scale `(2/3)^{1/3} L^{−1/3}`, `L = ln(1/(πβ_N))`,
/// of the Gumbel law predicted for the edge-rescaled top eigenvalue.
pub fn gumbel_center_scale(beta_n: f64) -> (f64, f64) {
    let l = (1.0 / (std::f64::consts::PI * beta_n)).ln();
    (1.5f64.powf(2.0 / 3.0) * l.powf(2.0 / 3.0), (2.0f64 / 3.0).cbrt() / l.cbrt())
}

/// Predicted CDF `exp(−e^{−(x−centre)/scale})` of the edge-rescaled top eigenvalue.
pub fn gumbel_prediction(beta_n: f64, x: f64) -> f64 {
    let (c, s) = gumbel_center_scale(beta_n);
    (-(-(x - c) / s).exp()).exp()
}
