//! Flat key = value configuration files.
//!
//! One assignment per line, `#` comments, whitespace-insensitive. Parse
//! errors carry line numbers. The resolved configuration serializes to JSON
//! and is embedded in every output for provenance.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use speedmeter::detuning::DetuningParams;
use speedmeter::filter::Band;
use speedmeter::response::DetectorParams;
use speedmeter::units::HZ_TO_ANGULAR;

#[derive(Debug)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "config line {n}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: Option<usize>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyUnit {
    RadS,
    Hz,
}

impl std::str::FromStr for FrequencyUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rad_s" | "rad/s" => Ok(Self::RadS),
            "hz" => Ok(Self::Hz),
            other => Err(format!("unknown frequency unit '{other}' (rad_s | hz)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeterKind {
    Velocity,
    Position,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SignalConfig {
    Impulse {
        /// keV/c.
        momentum_kev: f64,
        event_time: f64,
    },
    Flyby {
        /// Passing mass (kg); force constant is G m_chi m_sensor.
        m_chi: f64,
        impact_parameter: f64,
        speed: f64,
    },
}

/// Fully resolved run configuration. Frequencies are stored as given in the
/// file; [`ScenarioConfig::detector`] applies the unit conversion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub mass: f64,
    pub omega_m: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub temperature: f64,
    /// "auto" resolves to the meter's optimal coupling.
    pub coupling: Option<f64>,
    pub delay_time: f64,
    pub delay_loss: f64,
    pub freq_unit: FrequencyUnit,
    pub meter: MeterKind,
    pub signal: SignalConfig,
    pub band: Option<(f64, f64)>,
    /// Position-meter optimization timescale (s).
    pub tau_position: f64,
    pub detuning: Option<DetuningConfig>,
    pub seed: u64,
    /// Log-spaced flyby-time sweep for the snr command.
    pub tau_sweep: Option<(f64, f64, usize)>,
    pub grid_per_decade: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetuningConfig {
    pub delta: f64,
    pub delta_prime: f64,
    pub kappa_prime: f64,
    pub g_ratio: f64,
    pub omega_sig: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        // Figure-style detector defaults; frequencies under the rad/s reading.
        Self {
            mass: 1e-3,
            omega_m: 1.0,
            gamma: 1e-4,
            kappa: 1e7,
            temperature: 1e-2,
            coupling: None,
            delay_time: 1e-5,
            delay_loss: 1e-4,
            freq_unit: FrequencyUnit::RadS,
            meter: MeterKind::Both,
            signal: SignalConfig::Flyby {
                m_chi: 1e-5,
                impact_parameter: 1e-3,
                speed: 2.2e5,
            },
            band: None,
            tau_position: 1e-6,
            detuning: None,
            seed: 42,
            tau_sweep: None,
            grid_per_decade: 50,
        }
    }
}

impl ScenarioConfig {
    /// Detector parameters in internal units (rad/s), coupling unresolved
    /// (0 when "auto").
    pub fn detector(&self) -> DetectorParams {
        let p = DetectorParams {
            mass: self.mass,
            omega_m: self.omega_m,
            gamma: self.gamma,
            kappa: self.kappa,
            temperature: self.temperature,
            coupling: self.coupling.unwrap_or(0.0),
            delay_time: self.delay_time,
            delay_loss: self.delay_loss,
        };
        match self.freq_unit {
            FrequencyUnit::RadS => p,
            FrequencyUnit::Hz => p.with_frequencies_in_hz(),
        }
    }

    /// Analysis band in rad/s, if configured.
    pub fn band(&self) -> Option<Band> {
        self.band.map(|(lo, hi)| {
            let f = match self.freq_unit {
                FrequencyUnit::RadS => 1.0,
                FrequencyUnit::Hz => HZ_TO_ANGULAR,
            };
            Band {
                lo: lo * f,
                hi: hi * f,
            }
        })
    }

    pub fn detuning_params(&self) -> Option<DetuningParams> {
        self.detuning.map(|d| {
            let dp = DetuningParams {
                delta: d.delta,
                delta_prime: d.delta_prime,
                kappa_prime: d.kappa_prime,
                g_ratio: d.g_ratio,
                omega_sig: d.omega_sig,
            };
            match self.freq_unit {
                FrequencyUnit::RadS => dp,
                FrequencyUnit::Hz => dp.with_frequencies_in_hz(),
            }
        })
    }

    pub fn resolved_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| err(None, format!("cannot read {}: {e}", path.display())))?;
        Self::from_str_with_lines(&text)
    }

    pub fn from_str_with_lines(text: &str) -> Result<Self, ConfigError> {
        let mut kv: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(Some(line_no), "expected 'key = value'"))?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(err(Some(line_no), "empty key"));
            }
            if kv.insert(key.clone(), (line_no, value.trim().to_string())).is_some() {
                return Err(err(Some(line_no), format!("duplicate key '{key}'")));
            }
        }
        Self::from_map(kv)
    }

    fn from_map(mut kv: BTreeMap<String, (usize, String)>) -> Result<Self, ConfigError> {
        let mut cfg = ScenarioConfig::default();
        let mut take = |key: &str| kv.remove(key);
        let parse_f64 = |key: &str, (line, v): (usize, String)| -> Result<f64, ConfigError> {
            v.parse::<f64>()
                .map_err(|_| err(Some(line), format!("'{key}' must be a number, got '{v}'")))
        };

        macro_rules! num_field {
            ($key:literal, $slot:expr) => {
                if let Some(entry) = take($key) {
                    $slot = parse_f64($key, entry)?;
                }
            };
        }

        num_field!("mass", cfg.mass);
        num_field!("omega_m", cfg.omega_m);
        num_field!("gamma", cfg.gamma);
        num_field!("kappa", cfg.kappa);
        num_field!("temperature", cfg.temperature);
        num_field!("delay_time", cfg.delay_time);
        num_field!("delay_loss", cfg.delay_loss);
        num_field!("tau_position", cfg.tau_position);

        if let Some((line, v)) = take("coupling") {
            cfg.coupling = if v == "auto" {
                None
            } else {
                Some(parse_f64("coupling", (line, v))?)
            };
        }
        if let Some((line, v)) = take("freq_unit") {
            cfg.freq_unit = v.parse().map_err(|e| err(Some(line), e))?;
        }
        if let Some((line, v)) = take("meter") {
            cfg.meter = match v.as_str() {
                "velocity" => MeterKind::Velocity,
                "position" => MeterKind::Position,
                "both" => MeterKind::Both,
                other => {
                    return Err(err(
                        Some(line),
                        format!("unknown meter '{other}' (velocity | position | both)"),
                    ))
                }
            };
        }
        if let Some((line, v)) = take("seed") {
            cfg.seed = v
                .parse::<u64>()
                .map_err(|_| err(Some(line), format!("'seed' must be an integer, got '{v}'")))?;
        }
        if let Some((line, v)) = take("grid_per_decade") {
            cfg.grid_per_decade = v.parse::<usize>().map_err(|_| {
                err(Some(line), format!("'grid_per_decade' must be an integer, got '{v}'"))
            })?;
        }

        let band_lo = take("band_lo");
        let band_hi = take("band_hi");
        match (band_lo, band_hi) {
            (Some(lo), Some(hi)) => {
                cfg.band = Some((parse_f64("band_lo", lo)?, parse_f64("band_hi", hi)?));
            }
            (None, None) => {}
            (Some((line, _)), None) | (None, Some((line, _))) => {
                return Err(err(Some(line), "band_lo and band_hi must appear together"));
            }
        }

        if let Some((line, v)) = take("signal") {
            cfg.signal = match v.as_str() {
                "impulse" => {
                    let momentum_kev = match take("momentum_kev") {
                        Some(entry) => parse_f64("momentum_kev", entry)?,
                        None => 10.0,
                    };
                    let event_time = match take("event_time") {
                        Some(entry) => parse_f64("event_time", entry)?,
                        None => 0.0,
                    };
                    SignalConfig::Impulse {
                        momentum_kev,
                        event_time,
                    }
                }
                "flyby" => {
                    let m_chi = match take("m_chi") {
                        Some(entry) => parse_f64("m_chi", entry)?,
                        None => 1e-5,
                    };
                    let impact_parameter = match take("impact_parameter") {
                        Some(entry) => parse_f64("impact_parameter", entry)?,
                        None => 1e-3,
                    };
                    let speed = match take("speed") {
                        Some(entry) => parse_f64("speed", entry)?,
                        None => 2.2e5,
                    };
                    SignalConfig::Flyby {
                        m_chi,
                        impact_parameter,
                        speed,
                    }
                }
                other => {
                    return Err(err(
                        Some(line),
                        format!("unknown signal '{other}' (impulse | flyby)"),
                    ))
                }
            };
        }

        let sweep_lo = take("tau_sweep_lo");
        let sweep_hi = take("tau_sweep_hi");
        let sweep_n = take("tau_sweep_points");
        match (sweep_lo, sweep_hi, sweep_n) {
            (Some(lo), Some(hi), Some((nline, n))) => {
                let n = n.parse::<usize>().map_err(|_| {
                    err(Some(nline), format!("'tau_sweep_points' must be an integer, got '{n}'"))
                })?;
                cfg.tau_sweep = Some((
                    parse_f64("tau_sweep_lo", lo)?,
                    parse_f64("tau_sweep_hi", hi)?,
                    n,
                ));
            }
            (None, None, None) => {}
            (lo, hi, n) => {
                let line = lo
                    .map(|e| e.0)
                    .or(hi.map(|e| e.0))
                    .or(n.map(|e| e.0));
                return Err(err(
                    line,
                    "tau_sweep_lo, tau_sweep_hi, tau_sweep_points must appear together",
                ));
            }
        }

        let det_entries = [
            ("delta", take("delta")),
            ("delta_prime", take("delta_prime")),
            ("kappa_prime", take("kappa_prime")),
            ("g_ratio", take("g_ratio")),
            ("omega_sig", take("omega_sig")),
        ];
        if det_entries.iter().any(|(_, e)| e.is_some()) {
            let mut vals = [0.0; 5];
            for (slot, (key, entry)) in vals.iter_mut().zip(det_entries) {
                let entry =
                    entry.ok_or_else(|| err(None, format!("detuning requires '{key}'")))?;
                *slot = parse_f64(key, entry)?;
            }
            cfg.detuning = Some(DetuningConfig {
                delta: vals[0],
                delta_prime: vals[1],
                kappa_prime: vals[2],
                g_ratio: vals[3],
                omega_sig: vals[4],
            });
        }

        if let Some((key, (line, _))) = kv.into_iter().next() {
            return Err(err(Some(line), format!("unknown key '{key}'")));
        }

        let det = cfg.detector();
        det.validate()
            .map_err(|e| err(None, format!("invalid detector: {e}")))?;
        if let Some((lo, hi)) = cfg.band {
            if !(lo >= 0.0) || lo > hi {
                return Err(err(None, format!("invalid band [{lo}, {hi}]")));
            }
        }
        Ok(cfg)
    }

    /// Serialize in the same flat key = value format; backs the parse
    /// round-trip invariant.
    #[cfg(test)]
    pub fn to_config_text(&self) -> String {
        let mut out = String::new();
        let mut push = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        push("mass", format!("{:e}", self.mass));
        push("omega_m", format!("{:e}", self.omega_m));
        push("gamma", format!("{:e}", self.gamma));
        push("kappa", format!("{:e}", self.kappa));
        push("temperature", format!("{:e}", self.temperature));
        match self.coupling {
            Some(g) => push("coupling", format!("{g:e}")),
            None => push("coupling", "auto".into()),
        }
        push("delay_time", format!("{:e}", self.delay_time));
        push("delay_loss", format!("{:e}", self.delay_loss));
        push(
            "freq_unit",
            match self.freq_unit {
                FrequencyUnit::RadS => "rad_s".into(),
                FrequencyUnit::Hz => "hz".into(),
            },
        );
        push(
            "meter",
            match self.meter {
                MeterKind::Velocity => "velocity".into(),
                MeterKind::Position => "position".into(),
                MeterKind::Both => "both".into(),
            },
        );
        push("tau_position", format!("{:e}", self.tau_position));
        push("seed", format!("{}", self.seed));
        push("grid_per_decade", format!("{}", self.grid_per_decade));
        if let Some((lo, hi)) = self.band {
            push("band_lo", format!("{lo:e}"));
            push("band_hi", format!("{hi:e}"));
        }
        match self.signal {
            SignalConfig::Impulse {
                momentum_kev,
                event_time,
            } => {
                push("signal", "impulse".into());
                push("momentum_kev", format!("{momentum_kev:e}"));
                push("event_time", format!("{event_time:e}"));
            }
            SignalConfig::Flyby {
                m_chi,
                impact_parameter,
                speed,
            } => {
                push("signal", "flyby".into());
                push("m_chi", format!("{m_chi:e}"));
                push("impact_parameter", format!("{impact_parameter:e}"));
                push("speed", format!("{speed:e}"));
            }
        }
        if let Some((lo, hi, n)) = self.tau_sweep {
            push("tau_sweep_lo", format!("{lo:e}"));
            push("tau_sweep_hi", format!("{hi:e}"));
            push("tau_sweep_points", format!("{n}"));
        }
        if let Some(d) = self.detuning {
            push("delta", format!("{:e}", d.delta));
            push("delta_prime", format!("{:e}", d.delta_prime));
            push("kappa_prime", format!("{:e}", d.kappa_prime));
            push("g_ratio", format!("{:e}", d.g_ratio));
            push("omega_sig", format!("{:e}", d.omega_sig));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_text() {
        let mut cfg = ScenarioConfig::default();
        cfg.band = Some((10.0, 7e5));
        cfg.tau_sweep = Some((1e-8, 3e-3, 30));
        cfg.detuning = Some(DetuningConfig {
            delta: -1e7,
            delta_prime: 1e7,
            kappa_prime: 1e7,
            g_ratio: -1.0,
            omega_sig: 1e5,
        });
        let text = cfg.to_config_text();
        let back = ScenarioConfig::from_str_with_lines(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "mass = 1e-3\nkappa == 1e7\n";
        let e = ScenarioConfig::from_str_with_lines(bad).unwrap_err();
        assert_eq!(e.line, Some(2));
        let bad = "mass = 1e-3\n\n# comment\nbogus_key = 3\n";
        let e = ScenarioConfig::from_str_with_lines(bad).unwrap_err();
        assert_eq!(e.line, Some(4));
        let bad = "gamma = fast\n";
        let e = ScenarioConfig::from_str_with_lines(bad).unwrap_err();
        assert_eq!(e.line, Some(1));
    }

    #[test]
    fn hz_unit_scales_detector() {
        let text = "kappa = 1e7\nfreq_unit = hz\n";
        let cfg = ScenarioConfig::from_str_with_lines(text).unwrap();
        let det = cfg.detector();
        assert!((det.kappa / (1e7 * HZ_TO_ANGULAR) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_detector_is_rejected() {
        let text = "delay_loss = 1.5\n";
        assert!(ScenarioConfig::from_str_with_lines(text).is_err());
    }
}
