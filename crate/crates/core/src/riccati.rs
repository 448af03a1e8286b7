//! Riccati diffusions `dX = (c₀ + c₁t − X²) dt + σ dB` with explosion to `−∞`
//! and restart from `+∞`.
//!
//! Blow-up is detected when the state crosses `−M`; the remaining noiseless
//! transit time `1/M` is added to the logged explosion time, and the process
//! re-enters at `+M′` after the transit time `1/M′` from `+∞`.

use std::io::Write;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng;

/// Which Riccati family, with its spectral and temperature parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DiffusionParams {
    /// Drift `a − x²`, unit noise.
    Stationary { a: f64 },
    /// Drift `t − λ − x²`, noise `2/√β`.
    Airy { lambda: f64, beta: f64 },
    /// Drift `(β/4)t − ℓ − x²`, unit noise.
    Linear { ell: f64, beta: f64 },
}

impl DiffusionParams {
    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64, name| if v.is_finite() { Ok(()) } else { Err(invalid(name, "must be finite")) };
        match *self {
            DiffusionParams::Stationary { a } => finite(a, "a"),
            DiffusionParams::Airy { lambda, beta } | DiffusionParams::Linear { ell: lambda, beta } => {
                finite(lambda, "level")?;
                if beta > 0.0 && beta.is_finite() {
                    Ok(())
                } else {
                    Err(invalid("beta", "must be positive"))
                }
            }
        }
    }

    /// The spectral parameter: `a`, `λ` or `ℓ`.
    pub fn level(&self) -> f64 {
        match *self {
            DiffusionParams::Stationary { a } => a,
            DiffusionParams::Airy { lambda, .. } => lambda,
            DiffusionParams::Linear { ell, .. } => ell,
        }
    }

    pub fn with_level(&self, level: f64) -> Self {
        match *self {
            DiffusionParams::Stationary { .. } => DiffusionParams::Stationary { a: level },
            DiffusionParams::Airy { beta, .. } => DiffusionParams::Airy { lambda: level, beta },
            DiffusionParams::Linear { beta, .. } => DiffusionParams::Linear { ell: level, beta },
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match *self {
            DiffusionParams::Stationary { .. } => None,
            DiffusionParams::Airy { beta, .. } | DiffusionParams::Linear { beta, .. } => Some(beta),
        }
    }

    /// `c₀` in the drift `c₀ + c₁t − x²`.
    pub fn drift_constant(&self) -> f64 {
        match *self {
            DiffusionParams::Stationary { a } => a,
            DiffusionParams::Airy { lambda, .. } => -lambda,
            DiffusionParams::Linear { ell, .. } => -ell,
        }
    }

    /// `c₁` in the drift `c₀ + c₁t − x²`.
    pub fn time_slope(&self) -> f64 {
        match *self {
            DiffusionParams::Stationary { .. } => 0.0,
            DiffusionParams::Airy { .. } => 1.0,
            DiffusionParams::Linear { beta, .. } => 0.25 * beta,
        }
    }

    pub fn noise(&self) -> f64 {
        match *self {
            DiffusionParams::Airy { beta, .. } => 2.0 / beta.sqrt(),
            _ => 1.0,
        }
    }

    fn same_family(&self, other: &Self) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other) && self.beta() == other.beta()
    }
}

pub fn drift_at(params: &DiffusionParams, x: f64, t: f64) -> f64 {
    params.drift_constant() + params.time_slope() * t - x * x
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    /// Base step; the step at state `x` is about `dt0/(1 + x²)`.
    pub dt0: f64,
    /// Explosion threshold `M`: crossing `−M` counts as blow-up.
    pub cutoff: f64,
    /// Restart level `M′`.
    pub entry: f64,
    /// Simulated physical time `T`.
    pub horizon: f64,
    pub record_path: bool,
    /// Minimum spacing of recorded path points (0 records every step).
    pub record_dt: f64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig {
            dt0: 1e-3,
            cutoff: 100.0,
            entry: 100.0,
            horizon: 1.0,
            record_path: false,
            record_dt: 0.0,
        }
    }
}

impl NumericsConfig {
    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt0 > 0.0 && self.dt0.is_finite()) {
            return Err(invalid("dt0", "must be positive"));
        }
        if !(self.cutoff >= 10.0 && self.cutoff.is_finite()) {
            return Err(invalid("cutoff", "must be at least 10"));
        }
        if !(self.cutoff <= 1e8) {
            return Err(invalid("cutoff", "must not exceed 1e8"));
        }
        if !(self.entry > 0.0 && self.entry <= 1e8) {
            return Err(invalid("entry", "must lie in (0, 1e8]"));
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(invalid("horizon", "must be finite and nonnegative"));
        }
        if !(self.record_dt >= 0.0) {
            return Err(invalid("record_dt", "must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PointKind {
    Regular,
    /// Last point before a blow-up; the path resumes at the next `Restart`.
    Explosion,
    Restart,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathPoint {
    pub t: f64,
    pub x: f64,
    pub kind: PointKind,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PathSample {
    pub points: Vec<PathPoint>,
}

impl PathSample {
    /// CSV with columns `t,x,exploded_flag`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,x,exploded_flag")?;
        for p in &self.points {
            writeln!(w, "{},{},{}", p.t, p.x, u8::from(p.kind == PointKind::Explosion))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplosionLog {
    pub times: Vec<f64>,
    pub horizon: f64,
    pub params: DiffusionParams,
    pub steps_taken: u64,
    pub path: Option<PathSample>,
}

impl ExplosionLog {
    pub fn count(&self) -> usize {
        self.times.len()
    }

    /// Number of explosions in `[0, t)`.
    pub fn count_before(&self, t: f64) -> usize {
        self.times.partition_point(|&z| z < t)
    }
}

/// States with `|x|` above this draw from the secondary noise lane (see [`rng::lane`]).
const TAIL_STATE: f64 = 10.0;

/// Quarter-octave step table indexed by the bits of `1 + x²`.
struct StepTable {
    dt: Vec<f64>,
    scaled_sqrt: Vec<f64>,
}

impl StepTable {
    fn new(dt0: f64, sigma: f64) -> Self {
        let (mut dt, mut scaled_sqrt) = (Vec::with_capacity(4096), Vec::with_capacity(4096));
        for idx in 0..4096 {
            let e = (idx / 4) as i32;
            let upper = 2f64.powi(e) * (1.0 + ((idx % 4) + 1) as f64 / 4.0);
            let h = dt0 / upper;
            dt.push(h);
            scaled_sqrt.push(sigma * h.sqrt());
        }
        StepTable { dt, scaled_sqrt }
    }

    #[inline]
    fn index(y: f64) -> usize {
        ((y.to_bits() >> 50) - (1023 << 2)) as usize
    }
}

struct Level {
    c0: f64,
    x: f64,
    active: bool,
    restart_at: f64,
    times: Vec<f64>,
    path: Option<PathSample>,
    last_recorded: f64,
}

impl Level {
    fn record(&mut self, t: f64, x: f64, kind: PointKind, every: f64) {
        if let Some(path) = self.path.as_mut() {
            if kind != PointKind::Regular || t - self.last_recorded >= every {
                path.points.push(PathPoint { t, x, kind });
                self.last_recorded = t;
            }
        }
    }
}

/// Simulate one Riccati trajectory on `[0, T]` and log its explosion times.
pub fn simulate_explosions(params: &DiffusionParams, numerics: &NumericsConfig, seed: u64) -> Result<ExplosionLog> {
    let mut logs = run(&[params.level()], params, numerics, seed)?;
    Ok(logs.pop().expect("one level"))
}

/// Simulate one trajectory per level, all driven by the same Brownian increments
/// on a shared step schedule (the finest required by any level).
///
/// Levels must share the template's family and β and be nondecreasing.
pub fn simulate_coupled_family(
    levels: &[f64],
    template: &DiffusionParams,
    numerics: &NumericsConfig,
    seed: u64,
) -> Result<Vec<ExplosionLog>> {
    if levels.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(invalid("levels", "spectral levels must be nondecreasing"));
    }
    run(levels, template, numerics, seed)
}

/// Coupled runs over a list of parameter sets, which must differ only in level.
pub fn simulate_coupled_params(
    params: &[DiffusionParams],
    numerics: &NumericsConfig,
    seed: u64,
) -> Result<Vec<ExplosionLog>> {
    let first = params.first().ok_or_else(|| invalid("params", "need at least one level"))?;
    if params.iter().any(|p| !p.same_family(first)) {
        return Err(invalid("params", "coupled levels must share family and beta"));
    }
    let levels: Vec<f64> = params.iter().map(|p| p.level()).collect();
    simulate_coupled_family(&levels, first, numerics, seed)
}

fn run(levels: &[f64], template: &DiffusionParams, numerics: &NumericsConfig, seed: u64) -> Result<Vec<ExplosionLog>> {
    template.validate()?;
    numerics.validate()?;
    if levels.is_empty() {
        return Err(invalid("levels", "need at least one level"));
    }
    if levels.iter().any(|l| !l.is_finite()) {
        return Err(invalid("levels", "levels must be finite"));
    }
    let horizon = numerics.horizon;
    let cutoff = numerics.cutoff;
    let inv_entry = 1.0 / numerics.entry;
    let c1 = template.time_slope();
    let table = StepTable::new(numerics.dt0, template.noise());
    let mut bulk: ChaCha8Rng = rng::stream(seed);
    let mut tail: ChaCha8Rng = rng::lane(seed, 1);

    let mut lv: Vec<Level> = levels
        .iter()
        .map(|&l| Level {
            c0: template.with_level(l).drift_constant(),
            x: numerics.entry,
            active: false,
            restart_at: inv_entry,
            times: Vec::new(),
            path: numerics.record_path.then(PathSample::default),
            last_recorded: f64::NEG_INFINITY,
        })
        .collect();

    let mut t = 0.0f64;
    let mut steps: u64 = 0;
    loop {
        let mut any = false;
        let mut ymax = 1.0f64;
        let mut all_tail = true;
        for l in lv.iter_mut() {
            if !l.active && l.restart_at <= t {
                l.active = true;
                l.x = 1.0 / (inv_entry + (t - l.restart_at));
                l.record(t, l.x, PointKind::Restart, numerics.record_dt);
            }
            if l.active {
                any = true;
                ymax = ymax.max(1.0 + l.x * l.x);
                all_tail &= l.x.abs() >= TAIL_STATE;
            }
        }
        if !any {
            let next = lv.iter().map(|l| l.restart_at).fold(f64::INFINITY, f64::min);
            if next > horizon {
                break;
            }
            t = next;
            continue;
        }
        if t >= horizon {
            break;
        }
        let idx = StepTable::index(ymax);
        let (dt, sq) = (table.dt[idx], table.scaled_sqrt[idx]);
        let z: f64 = if all_tail { tail.sample(StandardNormal) } else { bulk.sample(StandardNormal) };
        let noise = sq * z;
        let t_next = t + dt;
        for l in lv.iter_mut().filter(|l| l.active) {
            let x = l.x;
            let xn = x + (l.c0 + c1 * t - x * x) * dt + noise;
            if xn <= -cutoff {
                let zeta = t_next + 1.0 / cutoff;
                l.record(t_next, -cutoff, PointKind::Explosion, numerics.record_dt);
                l.active = false;
                if zeta <= horizon {
                    l.times.push(zeta);
                    l.restart_at = zeta + inv_entry;
                } else {
                    l.restart_at = f64::INFINITY;
                }
            } else if xn.is_finite() {
                l.x = xn;
                l.record(t_next, xn, PointKind::Regular, numerics.record_dt);
            } else {
                return Err(Error::NonFiniteState { t, x });
            }
        }
        t = t_next;
        steps += 1;
    }

    Ok(lv
        .into_iter()
        .zip(levels)
        .map(|(l, &level)| ExplosionLog {
            times: l.times,
            horizon,
            params: template.with_level(level),
            steps_taken: steps,
            path: l.path,
        })
        .collect())
}

/// Time spent by a recorded path in the well region `x ≤ −√a + (ln a)^{1/4}/a^{1/4}`,
/// linear between recorded points and excluding explosion–restart gaps.
pub fn occupation_time(path: &PathSample, a: f64) -> Result<f64> {
    if !(a > 1.0) {
        return Err(invalid("a", "the region is defined only for a > 1"));
    }
    let theta = -a.sqrt() + a.ln().powf(0.25) / a.powf(0.25);
    let mut total = 0.0;
    for w in path.points.windows(2) {
        let (p, q) = (w[0], w[1]);
        if p.kind == PointKind::Explosion {
            continue;
        }
        let dt = q.t - p.t;
        let (bp, bq) = (p.x <= theta, q.x <= theta);
        total += match (bp, bq) {
            (true, true) => dt,
            (false, false) => 0.0,
            _ => {
                let frac = (theta - p.x) / (q.x - p.x);
                if bp {
                    dt * frac
                } else {
                    dt * (1.0 - frac)
                }
            }
        };
    }
    Ok(total)
}
