pub mod oracle;
pub mod psd;
pub mod scenario;
pub mod snr;

use speedmeter::noise::{optimal_coupling_position, optimal_coupling_velocity};
use speedmeter::response::DetectorParams;

use crate::config::ScenarioConfig;

/// Detector with the coupling resolved for the velocity meter.
pub fn velocity_detector(cfg: &ScenarioConfig) -> DetectorParams {
    let mut p = cfg.detector();
    if cfg.coupling.is_none() {
        p.coupling = optimal_coupling_velocity(&p);
    }
    p
}

/// Detector with the coupling resolved for the position meter at the given
/// optimization timescale.
pub fn position_detector(cfg: &ScenarioConfig, tau: f64) -> anyhow::Result<DetectorParams> {
    let mut p = cfg.detector();
    if cfg.coupling.is_none() {
        p.coupling = optimal_coupling_position(&p, tau)?;
    }
    Ok(p)
}
