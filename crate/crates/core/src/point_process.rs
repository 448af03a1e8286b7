//! Rescaled explosion times as point processes on the half-line.

use std::io::Write;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::riccati::ExplosionLog;
use crate::stationary::mean_exit_time;

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalPointProcess {
    pub points: Vec<f64>,
    pub rescale_factor: f64,
    pub source: Arc<ExplosionLog>,
}

impl EmpiricalPointProcess {
    pub fn new(source: Arc<ExplosionLog>, rescale_factor: f64) -> Self {
        let points = source.times.iter().map(|z| z * rescale_factor).collect();
        EmpiricalPointProcess { points, rescale_factor, source }
    }

    /// Number of points in `[t, t′)`.
    pub fn count(&self, t: f64, t_end: f64) -> usize {
        if !(t < t_end) {
            return 0;
        }
        self.points.partition_point(|&p| p < t_end) - self.points.partition_point(|&p| p < t)
    }

    /// First point followed by successive gaps.
    pub fn interarrivals(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.points
            .iter()
            .map(|&p| {
                let d = p - prev;
                prev = p;
                d
            })
            .collect()
    }

    /// Rescaled horizon of the source log.
    pub fn horizon(&self) -> f64 {
        self.source.horizon * self.rescale_factor
    }

    /// CSV with one point per row.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "point")?;
        for p in &self.points {
            writeln!(w, "{p}")?;
        }
        Ok(())
    }
}

/// Explosion times in units of the mean exit time `m(a)`.
pub fn rescale_stationary(log: Arc<ExplosionLog>, a: f64) -> Result<EmpiricalPointProcess> {
    let m = mean_exit_time(a)?;
    if !m.value.is_finite() || m.value == 0.0 {
        return Err(Error::Overflow(format!(
            "m({a}) = exp({:.1}) is not representable; compare on the log scale using mean_exit_time(a).log_value",
            m.log_value
        )));
    }
    Ok(EmpiricalPointProcess::new(log, 1.0 / m.value))
}

/// The factor `β(⅜ ln(1/β))^{1/3}` mapping Linear-family time to the small-β scale.
pub fn airy_time_factor(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(invalid("beta", "rescaling needs 0 < beta < 1"));
    }
    Ok(beta * (0.375 * (1.0 / beta).ln()).cbrt())
}

pub fn rescale_airy(log: Arc<ExplosionLog>, beta: f64) -> Result<EmpiricalPointProcess> {
    Ok(EmpiricalPointProcess::new(log, airy_time_factor(beta)?))
}
