//! `snr`: flyby-time sweep comparing the velocity meter's exact and
//! closed-form SNRs against the per-timescale-optimized position meter.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use speedmeter::filter::{default_band, flyby_snr, snr_optimal};
use speedmeter::noise::PositionMeter;
use speedmeter::signal::FlybySignal;
use speedmeter::units::G_NEWTON;

use crate::commands::{position_detector, velocity_detector};
use crate::config::{ScenarioConfig, SignalConfig};

struct SweepRow {
    tau: f64,
    velocity_exact: f64,
    velocity_closed: f64,
    position_exact: f64,
}

pub fn run(cfg: &ScenarioConfig, out: Option<&Path>) -> anyhow::Result<()> {
    let (m_chi, b) = match cfg.signal {
        SignalConfig::Flyby {
            m_chi,
            impact_parameter,
            ..
        } => (m_chi, impact_parameter),
        SignalConfig::Impulse { .. } => {
            anyhow::bail!("the snr sweep needs a flyby signal (set `signal = flyby`)")
        }
    };
    let (tau_lo, tau_hi, n) = cfg.tau_sweep.unwrap_or((1e-8, 3e-3, 30));
    let p_vel = velocity_detector(cfg);
    let beta = G_NEWTON * m_chi * p_vel.mass;
    let band = cfg.band().unwrap_or_else(|| default_band(&p_vel, None));

    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let tau = if n == 1 {
            tau_lo
        } else {
            tau_lo * (tau_hi / tau_lo).powf(i as f64 / (n - 1) as f64)
        };
        let signal = FlybySignal {
            force_constant: beta,
            impact_parameter: b,
            speed: b / tau,
        };
        let vel = flyby_snr(&signal, &p_vel, &band)?;
        let p_pos = position_detector(cfg, tau)?;
        let pos = snr_optimal(&signal, &PositionMeter(p_pos), &band, &[1.0 / tau])?;
        rows.push(SweepRow {
            tau,
            velocity_exact: vel.snr,
            velocity_closed: vel.closed_form.unwrap_or(f64::NAN),
            position_exact: pos.snr,
        });
    }

    let monotone = rows
        .windows(2)
        .all(|w| w[1].velocity_exact >= w[0].velocity_exact * (1.0 - 1e-9));
    let crossover = rows
        .iter()
        .find(|r| r.velocity_exact / r.position_exact < 1.25)
        .map(|r| r.tau);

    let path = out
        .map(|p| p.to_path_buf())
        .unwrap_or_else(|| std::path::PathBuf::from("snr_sweep.csv"));
    let mut file = std::fs::File::create(&path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    writeln!(file, "# config = {}", cfg.resolved_json())?;
    writeln!(
        file,
        "tau_s,snr_velocity_exact,snr_velocity_closed_form,snr_position_exact"
    )?;
    for r in &rows {
        writeln!(
            file,
            "{:e},{:e},{:e},{:e}",
            r.tau, r.velocity_exact, r.velocity_closed, r.position_exact
        )?;
    }
    writeln!(
        file,
        "# diagnostics: snr_velocity_exact monotone nondecreasing in tau = {monotone}"
    )?;
    match crossover {
        Some(tau) => writeln!(
            file,
            "# diagnostics: velocity/position ratio first drops below 1.25 at tau = {tau:e} s"
        )?,
        None => writeln!(file, "# diagnostics: velocity/position ratio stays above 1.25")?,
    }
    println!("wrote {} ({} rows)", path.display(), rows.len());
    Ok(())
}
