//! Python module `riccati_spectra`.

use std::cell::RefCell;
use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use riccati_spectra::{airy, point_process, riccati, stationary, stats, tridiag};

fn err(e: riccati_spectra::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A Riccati family with its spectral parameter.
#[pyclass(name = "DiffusionParams", frozen, from_py_object)]
#[derive(Clone)]
struct PyParams(riccati::DiffusionParams);

#[pymethods]
impl PyParams {
    #[staticmethod]
    fn stationary(a: f64) -> PyResult<Self> {
        let p = riccati::DiffusionParams::Stationary { a };
        p.validate().map_err(err)?;
        Ok(PyParams(p))
    }

    #[staticmethod]
    fn airy(lam: f64, beta: f64) -> PyResult<Self> {
        let p = riccati::DiffusionParams::Airy { lambda: lam, beta };
        p.validate().map_err(err)?;
        Ok(PyParams(p))
    }

    #[staticmethod]
    fn linear(ell: f64, beta: f64) -> PyResult<Self> {
        let p = riccati::DiffusionParams::Linear { ell, beta };
        p.validate().map_err(err)?;
        Ok(PyParams(p))
    }

    #[getter]
    fn level(&self) -> f64 {
        self.0.level()
    }

    #[getter]
    fn beta(&self) -> Option<f64> {
        self.0.beta()
    }

    fn drift(&self, x: f64, t: f64) -> f64 {
        riccati::drift_at(&self.0, x, t)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

#[pyclass(name = "NumericsConfig", frozen, from_py_object)]
#[derive(Clone)]
struct PyNumerics(riccati::NumericsConfig);

#[pymethods]
impl PyNumerics {
    #[new]
    #[pyo3(signature = (horizon, dt0 = 1e-3, cutoff = 100.0, entry = 100.0, record_dt = None))]
    fn new(horizon: f64, dt0: f64, cutoff: f64, entry: f64, record_dt: Option<f64>) -> PyResult<Self> {
        let cfg = riccati::NumericsConfig {
            dt0,
            cutoff,
            entry,
            horizon,
            record_path: record_dt.is_some(),
            record_dt: record_dt.unwrap_or(0.0),
        };
        cfg.validate().map_err(err)?;
        Ok(PyNumerics(cfg))
    }

    #[getter]
    fn horizon(&self) -> f64 {
        self.0.horizon
    }

    #[getter]
    fn dt0(&self) -> f64 {
        self.0.dt0
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

/// Explosion times of one trajectory, with the recorded path if requested.
#[pyclass(name = "ExplosionLog", frozen)]
struct PyLog(Arc<riccati::ExplosionLog>);

#[pymethods]
impl PyLog {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.0.times.clone()
    }

    #[getter]
    fn horizon(&self) -> f64 {
        self.0.horizon
    }

    #[getter]
    fn steps_taken(&self) -> u64 {
        self.0.steps_taken
    }

    #[getter]
    fn params(&self) -> PyParams {
        PyParams(self.0.params)
    }

    /// `(t, x, exploded)` triples, or None when no path was recorded.
    #[getter]
    fn path(&self) -> Option<Vec<(f64, f64, bool)>> {
        self.0.path.as_ref().map(|p| {
            p.points.iter().map(|q| (q.t, q.x, q.kind == riccati::PointKind::Explosion)).collect()
        })
    }

    fn count(&self) -> usize {
        self.0.count()
    }

    fn count_before(&self, t: f64) -> usize {
        self.0.count_before(t)
    }

    /// Explosion times divided by `m(a)`.
    fn rescale_stationary(&self, a: f64) -> PyResult<Vec<f64>> {
        Ok(point_process::rescale_stationary(self.0.clone(), a).map_err(err)?.points)
    }

    /// Explosion times on the small-β scale.
    fn rescale_airy(&self, beta: f64) -> PyResult<Vec<f64>> {
        Ok(point_process::rescale_airy(self.0.clone(), beta).map_err(err)?.points)
    }

    fn __len__(&self) -> usize {
        self.0.count()
    }
}

#[pyclass(name = "TridiagMatrix", frozen)]
struct PyTridiag(riccati_spectra::TridiagMatrix);

#[pymethods]
impl PyTridiag {
    #[new]
    fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> PyResult<Self> {
        Ok(PyTridiag(riccati_spectra::TridiagMatrix::new(diag, offdiag).map_err(err)?))
    }

    #[staticmethod]
    fn sample(n: usize, beta_n: f64, seed: u64) -> PyResult<Self> {
        let p = riccati_spectra::EnsembleParams::new(n, beta_n).map_err(err)?;
        Ok(PyTridiag(tridiag::sample_matrix(&p, seed).map_err(err)?))
    }

    #[getter]
    fn diag(&self) -> Vec<f64> {
        self.0.diag.clone()
    }

    #[getter]
    fn offdiag(&self) -> Vec<f64> {
        self.0.offdiag.clone()
    }

    fn sturm_count(&self, x: f64) -> usize {
        tridiag::sturm_count(&self.0, x)
    }

    /// The `k` largest eigenvalues, decreasing.
    fn top_k(&self, k: usize) -> PyResult<Vec<f64>> {
        tridiag::top_k_eigenvalues(&self.0, k).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyfunction]
fn simulate_explosions(py: Python<'_>, params: PyParams, numerics: PyNumerics, seed: u64) -> PyResult<PyLog> {
    let log = py.detach(|| riccati::simulate_explosions(&params.0, &numerics.0, seed)).map_err(err)?;
    Ok(PyLog(Arc::new(log)))
}

/// Shared-noise runs at each of the nondecreasing `levels`.
#[pyfunction]
fn simulate_coupled_family(
    py: Python<'_>,
    levels: Vec<f64>,
    template: PyParams,
    numerics: PyNumerics,
    seed: u64,
) -> PyResult<Vec<PyLog>> {
    let logs = py
        .detach(|| riccati::simulate_coupled_family(&levels, &template.0, &numerics.0, seed))
        .map_err(err)?;
    Ok(logs.into_iter().map(|l| PyLog(Arc::new(l))).collect())
}

/// `(value, log_value)` of the mean exit time.
#[pyfunction]
fn mean_exit_time(a: f64) -> PyResult<(f64, f64)> {
    let m = stationary::mean_exit_time(a).map_err(err)?;
    Ok((m.value, m.log_value))
}

#[pyfunction]
fn mean_exit_time_asymptotic(a: f64) -> f64 {
    stationary::mean_exit_time_asymptotic(a)
}

#[pyfunction]
fn flux_j0(a: f64) -> PyResult<f64> {
    Ok(stationary::flux_j0(a).map_err(err)?.value)
}

#[pyfunction]
fn flux_j0_prime(a: f64) -> PyResult<f64> {
    Ok(stationary::flux_j0_prime(a).map_err(err)?.value)
}

#[pyfunction]
fn stationary_density_p0(y: f64, a: f64) -> PyResult<f64> {
    stationary::stationary_density_p0(y, a).map_err(err)
}

#[pyfunction]
fn laplace_g(alpha: f64, a: f64, y: f64) -> PyResult<f64> {
    stationary::laplace_g(alpha, a, y).map_err(err)
}

#[pyfunction]
fn integrated_j0(ell: f64) -> PyResult<f64> {
    Ok(stationary::integrated_j0(ell).map_err(err)?.value)
}

#[pyfunction]
fn mckean_count(length: f64, a: f64) -> PyResult<f64> {
    stationary::mckean_count(length, a).map_err(err)
}

#[pyfunction]
fn ell_beta(x: f64, beta: f64) -> PyResult<f64> {
    airy::ell_beta(x, beta).map_err(err)
}

#[pyfunction]
fn ell_beta_inverse(ell: f64, beta: f64) -> PyResult<f64> {
    airy::ell_beta_inverse(ell, beta).map_err(err)
}

#[pyfunction]
fn tw_gumbel_cdf_prediction(x: f64) -> f64 {
    airy::tw_gumbel_cdf_prediction(x)
}

#[pyfunction]
fn gumbel_transform(tw_value: f64, beta: f64) -> PyResult<f64> {
    airy::gumbel_transform(tw_value, beta).map_err(err)
}

#[pyfunction]
fn kth_marginal_limit_cdf(k: u32, x: f64) -> f64 {
    airy::kth_marginal_limit_cdf(k, x)
}

/// `(4J₀/β, (4/β)∫J₀)` at level `ell`.
#[pyfunction]
fn macroscopic_density(ell: f64, beta: f64) -> PyResult<(f64, f64)> {
    let d = airy::macroscopic_density(ell, beta).map_err(err)?;
    Ok((d.density, d.integrated))
}

#[pyfunction]
fn airy_ai(x: f64) -> PyResult<f64> {
    airy::airy_ai(x).map_err(err)
}

#[pyfunction]
fn airy_ai_prime(x: f64) -> PyResult<f64> {
    airy::airy_ai_prime(x).map_err(err)
}

#[pyfunction]
fn airy_kernel_density(x: f64) -> PyResult<f64> {
    airy::airy_kernel_density(x).map_err(err)
}

/// `(value, relative standard error)` of the first-order correction.
#[pyfunction]
#[pyo3(signature = (ell, samples_per_node = 200_000, nodes = 24, seed = 0))]
fn gamma1_correction(py: Python<'_>, ell: f64, samples_per_node: usize, nodes: usize, seed: u64) -> PyResult<(f64, f64)> {
    let cfg = airy::Gamma1Config { samples_per_node, nodes, seed, ..airy::Gamma1Config::default() };
    let g = py.detach(|| airy::gamma1_correction(ell, &cfg)).map_err(err)?;
    Ok((g.result.value, g.rel_std_error))
}

#[pyfunction]
fn gamma1_tail(ell: f64) -> f64 {
    airy::gamma1_tail(ell)
}

/// Rows `(x, level, estimated, predicted, ci_low, ci_high)` for marginal `k`.
#[pyfunction]
#[pyo3(signature = (beta, x_grid, n_samples, t_resc = 8.0, k = 0, seed_base = 0, dt0 = 1e-3))]
fn estimate_tw_cdf(
    py: Python<'_>,
    beta: f64,
    x_grid: Vec<f64>,
    n_samples: usize,
    t_resc: f64,
    k: u32,
    seed_base: u64,
    dt0: f64,
) -> PyResult<Vec<(f64, f64, f64, f64, f64, f64)>> {
    let cfg = airy::TwCdfConfig { beta, x_grid, n_samples, t_resc, max_k: k, seed_base, ci_level: 0.95 };
    let numerics = riccati::NumericsConfig { dt0, ..riccati::NumericsConfig::default() };
    let est = py.detach(|| airy::estimate_tw_cdf(&cfg, &numerics)).map_err(err)?;
    est.rows
        .iter()
        .map(|r| {
            let (lo, hi) = r.interval(k).map_err(err)?;
            Ok((r.x, r.level, r.estimate(k), r.predicted(k), lo, hi))
        })
        .collect()
}

#[pyfunction]
fn edge_rescale(lambda0: f64, n: usize, beta_n: f64) -> f64 {
    tridiag::edge_rescale(lambda0, n, beta_n)
}

#[pyfunction]
fn gumbel_prediction(beta_n: f64, x: f64) -> f64 {
    tridiag::gumbel_prediction(beta_n, x)
}

/// Kolmogorov–Smirnov distance of `samples` against the callable `cdf`.
#[pyfunction]
fn ks_distance(samples: Vec<f64>, cdf: Bound<'_, PyAny>) -> PyResult<f64> {
    let failure = RefCell::new(None);
    let eval = |x: f64| match cdf.call1((x,)).and_then(|v| v.extract::<f64>()) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let report = stats::ks_distance(&samples, eval, 1.0);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(report.map_err(err)?.statistic)
}

/// `(mean, variance, index)` of counts.
#[pyfunction]
fn poisson_dispersion(counts: Vec<u64>) -> PyResult<(f64, f64, f64)> {
    let d = stats::poisson_dispersion(&counts).map_err(err)?;
    Ok((d.mean, d.variance, d.index))
}

#[pyfunction]
#[pyo3(signature = (k, n, level = 0.95))]
fn wilson_interval(k: u64, n: u64, level: f64) -> PyResult<(f64, f64)> {
    stats::wilson_interval(k, n, level).map_err(err)
}

#[pymodule]
#[pyo3(name = "riccati_spectra")]
fn riccati_spectra_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PyNumerics>()?;
    m.add_class::<PyLog>()?;
    m.add_class::<PyTridiag>()?;
    m.add_function(wrap_pyfunction!(simulate_explosions, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_coupled_family, m)?)?;
    m.add_function(wrap_pyfunction!(mean_exit_time, m)?)?;
    m.add_function(wrap_pyfunction!(mean_exit_time_asymptotic, m)?)?;
    m.add_function(wrap_pyfunction!(flux_j0, m)?)?;
    m.add_function(wrap_pyfunction!(flux_j0_prime, m)?)?;
    m.add_function(wrap_pyfunction!(stationary_density_p0, m)?)?;
    m.add_function(wrap_pyfunction!(laplace_g, m)?)?;
    m.add_function(wrap_pyfunction!(integrated_j0, m)?)?;
    m.add_function(wrap_pyfunction!(mckean_count, m)?)?;
    m.add_function(wrap_pyfunction!(ell_beta, m)?)?;
    m.add_function(wrap_pyfunction!(ell_beta_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(tw_gumbel_cdf_prediction, m)?)?;
    m.add_function(wrap_pyfunction!(gumbel_transform, m)?)?;
    m.add_function(wrap_pyfunction!(kth_marginal_limit_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(macroscopic_density, m)?)?;
    m.add_function(wrap_pyfunction!(airy_ai, m)?)?;
    m.add_function(wrap_pyfunction!(airy_ai_prime, m)?)?;
    m.add_function(wrap_pyfunction!(airy_kernel_density, m)?)?;
    m.add_function(wrap_pyfunction!(gamma1_correction, m)?)?;
    m.add_function(wrap_pyfunction!(gamma1_tail, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_tw_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(edge_rescale, m)?)?;
    m.add_function(wrap_pyfunction!(gumbel_prediction, m)?)?;
    m.add_function(wrap_pyfunction!(ks_distance, m)?)?;
    m.add_function(wrap_pyfunction!(poisson_dispersion, m)?)?;
    m.add_function(wrap_pyfunction!(wilson_interval, m)?)?;
    Ok(())
}
