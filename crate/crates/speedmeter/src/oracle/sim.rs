//! Euler-Maruyama integration of the optomechanical Langevin equations.
//!
//! Vacuum quadrature inputs are drawn per step as independent Gaussians with
//! variance 1/dt (the discrete stand-in for delta-correlated white noise);
//! the thermal force likewise with variance N_BM/dt. The delay line is a
//! circular buffer of past first-cavity outputs mixed with fresh vacuum as
//! sqrt(1-L) * delayed + sqrt(L) * fresh. Identical seeds give bit-identical
//! traces; trajectories are keyed by (seed, trajectory index) through the
//! ChaCha stream counter.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::noise::thermal_force_psd;
use crate::response::DetectorParams;
use crate::units::HBAR;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Topology {
    /// Position meter: one cavity, phase readout.
    SingleSided,
    /// Velocity meter: two ring cavities joined by the delay line.
    DoubleRing,
}

/// Instantaneous momentum kick injected into the mechanics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InjectedImpulse {
    pub momentum: f64,
    /// Event time measured from the start of the analysis window (s).
    pub event_time: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    /// Analysis-window length (s), excluding warmup.
    pub duration: f64,
    /// Settling time discarded before the analysis window (s).
    pub warmup: f64,
    pub seed: u64,
    pub topology: Topology,
    pub injected: Option<InjectedImpulse>,
}

impl SimConfig {
    pub fn validate(&self, p: &DetectorParams) -> Result<(), SimError> {
        p.validate()?;
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(SimError::InvalidConfig("dt must be > 0".into()));
        }
        let dt_kappa = self.dt * p.kappa;
        if dt_kappa > 0.05 {
            return Err(SimError::UnstableTimestep { dt_kappa });
        }
        if !(self.duration > 0.0) || self.warmup < 0.0 {
            return Err(SimError::InvalidConfig(
                "duration must be > 0 and warmup >= 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceMeta {
    pub params: DetectorParams,
    pub topology: Topology,
    pub seed: u64,
    pub trajectory: u64,
    pub rng: &'static str,
    pub dt: f64,
    pub duration: f64,
    pub warmup: f64,
    /// Delay time snapped to an integer number of steps; analytic
    /// comparisons must use this value, not the requested one.
    pub delay_time_snapped: Option<f64>,
}

/// Readout record of one trajectory: the watched phase quadrature and, for
/// diagnostics, the mechanical position.
#[derive(Debug, Clone)]
pub struct TimeTrace {
    pub y_out: Vec<f64>,
    pub position: Vec<f64>,
    pub dt: f64,
    pub meta: TraceMeta,
}

impl TimeTrace {
    /// Detector parameters with the delay time replaced by its snapped value.
    pub fn effective_params(&self) -> DetectorParams {
        let mut p = self.meta.params;
        if let Some(td) = self.meta.delay_time_snapped {
            p.delay_time = td;
        }
        p
    }

    /// CSV export: `# key = value` header lines, then one sample per row.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        let meta = serde_json::to_string(&self.meta).expect("trace metadata serializes");
        writeln!(w, "# meta = {meta}")?;
        writeln!(w, "# seed = {}", self.meta.seed)?;
        writeln!(w, "# dt = {:e}", self.dt)?;
        writeln!(w, "# duration = {:e}", self.meta.duration)?;
        writeln!(w, "t_s,y_out,position_m")?;
        for (k, (y, x)) in self.y_out.iter().zip(&self.position).enumerate() {
            writeln!(w, "{:e},{:e},{:e}", k as f64 * self.dt, y, x)?;
        }
        Ok(())
    }
}

struct Rng {
    inner: ChaCha12Rng,
    scale_vacuum: f64,
    scale_thermal: f64,
}

impl Rng {
    fn new(seed: u64, trajectory: u64, dt: f64, n_bm: f64) -> Self {
        let mut inner = ChaCha12Rng::seed_from_u64(seed);
        inner.set_stream(trajectory);
        Self {
            inner,
            scale_vacuum: (1.0 / dt).sqrt(),
            scale_thermal: (n_bm / dt).sqrt(),
        }
    }

    fn vacuum(&mut self) -> f64 {
        let z: f64 = StandardNormal.sample(&mut self.inner);
        z * self.scale_vacuum
    }

    fn thermal(&mut self) -> f64 {
        let z: f64 = StandardNormal.sample(&mut self.inner);
        z * self.scale_thermal
    }
}

/// Integrate one trajectory. `trajectory` selects an independent noise
/// stream under the same seed.
pub fn simulate(
    p: &DetectorParams,
    cfg: &SimConfig,
    trajectory: u64,
) -> Result<TimeTrace, SimError> {
    cfg.validate(p)?;
    match cfg.topology {
        Topology::SingleSided => simulate_single(p, cfg, trajectory),
        Topology::DoubleRing => simulate_double(p, cfg, trajectory),
    }
}

fn window_counts(cfg: &SimConfig) -> (usize, usize) {
    let warm = (cfg.warmup / cfg.dt).round() as usize;
    let keep = (cfg.duration / cfg.dt).round() as usize;
    (warm, keep)
}

fn impulse_step(cfg: &SimConfig, warm: usize) -> Option<(usize, f64)> {
    cfg.injected.map(|imp| {
        let k = warm + (imp.event_time / cfg.dt).round() as usize;
        (k, imp.momentum / cfg.dt)
    })
}

fn simulate_single(
    p: &DetectorParams,
    cfg: &SimConfig,
    trajectory: u64,
) -> Result<TimeTrace, SimError> {
    let n_bm = thermal_force_psd(p);
    let mut rng = Rng::new(cfg.seed, trajectory, cfg.dt, n_bm);
    let (warm, keep) = window_counts(cfg);
    let total = warm + keep;
    let kick = impulse_step(cfg, warm);

    let dt = cfg.dt;
    let sk = p.kappa.sqrt();
    let g = p.coupling;
    let mut xq = 0.0f64; // cavity amplitude quadrature
    let mut yq = 0.0f64; // cavity phase quadrature
    let mut x = 0.0f64;
    let mut mom = 0.0f64;
    let mut y_out = Vec::with_capacity(keep);
    let mut pos = Vec::with_capacity(keep);

    for k in 0..total {
        let x_in = rng.vacuum();
        let y_in = rng.vacuum();
        let mut force = rng.thermal();
        if let Some((kk, f)) = kick {
            if k == kk {
                force += f;
            }
        }
        if k >= warm {
            y_out.push(y_in - sk * yq);
            pos.push(x);
        }
        let dxq = dt * (-0.5 * p.kappa * xq + sk * x_in);
        let dyq = dt * (-g * x - 0.5 * p.kappa * yq + sk * y_in);
        let dmom = dt * (-HBAR * g * xq - p.mass * p.omega_m * p.omega_m * x - p.gamma * mom
            + force);
        let dx = dt * (mom / p.mass);
        xq += dxq;
        yq += dyq;
        mom += dmom;
        x += dx;
    }

    Ok(TimeTrace {
        y_out,
        position: pos,
        dt,
        meta: TraceMeta {
            params: *p,
            topology: Topology::SingleSided,
            seed: cfg.seed,
            trajectory,
            rng: "chacha12",
            dt,
            duration: cfg.duration,
            warmup: cfg.warmup,
            delay_time_snapped: None,
        },
    })
}

fn simulate_double(
    p: &DetectorParams,
    cfg: &SimConfig,
    trajectory: u64,
) -> Result<TimeTrace, SimError> {
    let n_bm = thermal_force_psd(p);
    let mut rng = Rng::new(cfg.seed, trajectory, cfg.dt, n_bm);
    let (warm, keep) = window_counts(cfg);
    let total = warm + keep;
    let kick = impulse_step(cfg, warm);

    let dt = cfg.dt;
    let n_delay = (p.delay_time / dt).round().max(1.0) as usize;
    let td_snapped = n_delay as f64 * dt;
    if warm < n_delay {
        return Err(SimError::InvalidConfig(format!(
            "warmup must cover the delay line ({} steps needed, {} given)",
            n_delay, warm
        )));
    }

    let sk = p.kappa.sqrt();
    let g = p.coupling;
    let g2 = -(1.0 - p.delay_loss).sqrt() * g; // second-cavity coupling
    let t_mix = (1.0 - p.delay_loss).sqrt();
    let l_mix = p.delay_loss.sqrt();

    let mut xq = 0.0f64;
    let mut yq = 0.0f64;
    let mut xq2 = 0.0f64;
    let mut yq2 = 0.0f64;
    let mut x = 0.0f64;
    let mut mom = 0.0f64;
    let mut xout_buf = vec![0.0f64; n_delay];
    let mut yout_buf = vec![0.0f64; n_delay];
    let mut y_out = Vec::with_capacity(keep);
    let mut pos = Vec::with_capacity(keep);

    for k in 0..total {
        let x_in = rng.vacuum();
        let y_in = rng.vacuum();
        let x_fresh = rng.vacuum();
        let y_fresh = rng.vacuum();
        let mut force = rng.thermal();
        if let Some((kk, f)) = kick {
            if k == kk {
                force += f;
            }
        }

        let x_out = x_in - sk * xq;
        let yq_out = y_in - sk * yq;
        let slot = k % n_delay;
        // Buffer holds outputs from n_delay steps ago once k >= n_delay.
        let (x_delayed, y_delayed) = (xout_buf[slot], yout_buf[slot]);
        xout_buf[slot] = x_out;
        yout_buf[slot] = yq_out;

        let x2_in = t_mix * x_delayed + l_mix * x_fresh;
        let y2_in = t_mix * y_delayed + l_mix * y_fresh;

        if k >= warm {
            y_out.push(y2_in - sk * yq2);
            pos.push(x);
        }

        let dxq = dt * (-0.5 * p.kappa * xq + sk * x_in);
        let dyq = dt * (-g * x - 0.5 * p.kappa * yq + sk * y_in);
        let dxq2 = dt * (-0.5 * p.kappa * xq2 + sk * x2_in);
        let dyq2 = dt * (g2 * x - 0.5 * p.kappa * yq2 + sk * y2_in);
        let dmom = dt * (-HBAR * g * xq + HBAR * g2 * xq2
            - p.mass * p.omega_m * p.omega_m * x
            - p.gamma * mom
            + force);
        let dx = dt * (mom / p.mass);
        xq += dxq;
        yq += dyq;
        xq2 += dxq2;
        yq2 += dyq2;
        mom += dmom;
        x += dx;
    }

    Ok(TimeTrace {
        y_out,
        position: pos,
        dt,
        meta: TraceMeta {
            params: *p,
            topology: Topology::DoubleRing,
            seed: cfg.seed,
            trajectory,
            rng: "chacha12",
            dt,
            duration: cfg.duration,
            warmup: cfg.warmup,
            delay_time_snapped: Some(td_snapped),
        },
    })
}

/// Desk-scale single-sided detector for oracle runs: kappa = 1e3 rad/s,
/// thermal floor 1e-30 N^2 s, coupling optimized for a 10 ms signal.
pub fn toy_single_params() -> DetectorParams {
    let mut p = DetectorParams {
        mass: 1e-6,
        omega_m: 10.0,
        gamma: 1.0,
        kappa: 1e3,
        temperature: 0.0,
        coupling: 0.0,
        delay_time: 0.0,
        delay_loss: 0.0,
    };
    // Bath temperature giving a 1e-30 N^2 s thermal floor.
    p.temperature = 1e-30 / (4.0 * p.mass * p.gamma * crate::units::K_B);
    p.coupling = crate::noise::optimal_coupling_position(&p, 0.01).unwrap();
    p
}

/// Desk-scale double-ring detector for oracle runs; delay line snaps to 200
/// steps at dt = 5e-5 s.
pub fn toy_double_params() -> DetectorParams {
    let mut p = DetectorParams {
        mass: 1e-6,
        omega_m: 10.0,
        gamma: 1.0,
        kappa: 1e3,
        temperature: 0.0,
        coupling: 0.0,
        delay_time: 0.01,
        delay_loss: 1e-3,
    };
    p.temperature = 1e-30 / (4.0 * p.mass * p.gamma * crate::units::K_B);
    p.coupling = crate::noise::optimal_coupling_velocity(&p);
    p
}
