//! Cavity and mechanical transfer functions shared by every noise model.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Parameters of one detector: the mechanical element, the (first) cavity,
/// its thermal bath, and — for the velocity meter — the delay line between
/// the two ring cavities.
///
/// All rates and frequencies are angular (rad/s). `delay_time` and
/// `delay_loss` are ignored by the position-meter formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorParams {
    /// Sensor mass (kg).
    pub mass: f64,
    /// Mechanical resonance frequency (rad/s).
    pub omega_m: f64,
    /// Mechanical energy damping rate (rad/s).
    pub gamma: f64,
    /// Cavity energy loss rate (rad/s).
    pub kappa: f64,
    /// Bath temperature (K).
    pub temperature: f64,
    /// Driven optomechanical coupling G ((rad/s)/m), real and >= 0 by gauge choice.
    pub coupling: f64,
    /// Delay-line transit time (s); velocity meter only.
    pub delay_time: f64,
    /// Delay-line photon loss fraction in [0, 1]; velocity meter only.
    pub delay_loss: f64,
}

impl DetectorParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let fields = [
            ("mass", self.mass),
            ("omega_m", self.omega_m),
            ("gamma", self.gamma),
            ("kappa", self.kappa),
            ("temperature", self.temperature),
            ("coupling", self.coupling),
            ("delay_time", self.delay_time),
            ("delay_loss", self.delay_loss),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(ModelError::NonFinite(name.into()));
            }
        }
        if self.mass <= 0.0 {
            return Err(ModelError::InvalidParams("mass must be > 0".into()));
        }
        if self.kappa <= 0.0 {
            return Err(ModelError::InvalidParams("kappa must be > 0".into()));
        }
        if self.gamma < 0.0 || self.omega_m < 0.0 || self.temperature < 0.0 {
            return Err(ModelError::InvalidParams(
                "gamma, omega_m, temperature must be >= 0".into(),
            ));
        }
        if self.coupling < 0.0 {
            return Err(ModelError::InvalidParams("coupling must be >= 0".into()));
        }
        if self.delay_time < 0.0 {
            return Err(ModelError::InvalidParams("delay_time must be >= 0".into()));
        }
        if !(0.0..=1.0).contains(&self.delay_loss) {
            return Err(ModelError::InvalidParams(
                "delay_loss must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }

    /// Scales all angular-frequency fields by 2*pi, for inputs given in
    /// ordinary Hz. Times, masses and temperatures are untouched.
    pub fn with_frequencies_in_hz(mut self) -> Self {
        let f = crate::units::HZ_TO_ANGULAR;
        self.omega_m *= f;
        self.gamma *= f;
        self.kappa *= f;
        self
    }
}

/// The cavity response, mechanical response, and the unit-modulus cavity
/// phase factor at one frequency.
///
/// The cavity phase is never extracted as a real angle; formulas use the
/// complex factor directly to stay clear of branch cuts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseSet {
    /// sqrt(kappa) / (-i nu + kappa/2), units s^(1/2).
    pub cavity: Complex64,
    /// -1 / (m (nu^2 - omega_m^2 + i gamma nu)), units s^2/kg.
    pub mechanical: Complex64,
    /// e^{i phi_c} = 1 - sqrt(kappa) chi_c = (-i nu - kappa/2)/(-i nu + kappa/2).
    pub phase_factor: Complex64,
}

pub fn cavity_response(nu: f64, kappa: f64) -> Complex64 {
    Complex64::new(kappa / 2.0, -nu).inv() * kappa.sqrt()
}

/// Unit-modulus reflection phase of the cavity.
pub fn cavity_phase_factor(nu: f64, kappa: f64) -> Complex64 {
    Complex64::new(-kappa / 2.0, -nu) / Complex64::new(kappa / 2.0, -nu)
}

pub fn mechanical_response(nu: f64, p: &DetectorParams) -> Result<Complex64, ModelError> {
    let denom = Complex64::new(nu * nu - p.omega_m * p.omega_m, p.gamma * nu) * p.mass;
    // With gamma = 0 the susceptibility has a real pole at nu = +-omega_m.
    let scale = p.mass * (nu * nu).max(p.omega_m * p.omega_m).max(1.0);
    if denom.norm() <= 1e-300 * scale {
        return Err(ModelError::MechanicalPole { nu });
    }
    Ok(-denom.inv())
}

/// All three transfer functions at `nu`.
pub fn response(nu: f64, p: &DetectorParams) -> Result<ResponseSet, ModelError> {
    if !nu.is_finite() {
        return Err(ModelError::NonFinite("nu".into()));
    }
    Ok(ResponseSet {
        cavity: cavity_response(nu, p.kappa),
        mechanical: mechanical_response(nu, p)?,
        phase_factor: cavity_phase_factor(nu, p.kappa),
    })
}

/// Two-cavity interference factor e^{i(nu t_d + phi_c)}.
pub fn delay_interference_factor(nu: f64, p: &DetectorParams) -> Complex64 {
    Complex64::from_polar(1.0, nu * p.delay_time) * cavity_phase_factor(nu, p.kappa)
}

/// Magnitude-safe cos^2((nu t_d + phi_c)/2) = |1 + e^{i(nu t_d + phi_c)}|^2 / 4.
pub fn interference_cos2(nu: f64, p: &DetectorParams) -> f64 {
    let z = Complex64::new(1.0, 0.0) + delay_interference_factor(nu, p);
    z.norm_sqr() / 4.0
}

#[cfg(test)]
pub(crate) fn test_params() -> DetectorParams {
    // Figure-style defaults under the rad/s reading of the labels.
    DetectorParams {
        mass: 1e-3,
        omega_m: 1.0,
        gamma: 1e-4,
        kappa: 1e7,
        temperature: 1e-2,
        coupling: 4.681646139720972e23,
        delay_time: 1e-5,
        delay_loss: 1e-4,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn cavity_response_at_dc() {
        // sqrt(4)/(4/2) = 1
        let c = cavity_response(0.0, 4.0);
        assert_relative_eq!(c.re, 1.0, max_relative = 1e-14);
        assert_relative_eq!(c.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn phase_factor_limits() {
        let p = test_params();
        let low = cavity_phase_factor(0.0, p.kappa);
        assert_relative_eq!(low.re, -1.0, max_relative = 1e-12);
        let high = cavity_phase_factor(1e15, p.kappa);
        assert_relative_eq!(high.re, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn mechanical_response_at_dc() {
        let mut p = test_params();
        p.mass = 1.0;
        p.omega_m = 1.0;
        p.gamma = 0.0;
        let m = mechanical_response(0.0, &p).unwrap();
        assert_relative_eq!(m.re, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn undamped_resonance_is_a_pole_error() {
        let mut p = test_params();
        p.gamma = 0.0;
        assert!(matches!(
            mechanical_response(p.omega_m, &p),
            Err(ModelError::MechanicalPole { .. })
        ));
        // With damping the same point is fine and peaks at 1/(m gamma omega_m).
        p.gamma = 1e-4;
        let peak = mechanical_response(p.omega_m, &p).unwrap().norm();
        assert_relative_eq!(
            peak,
            1.0 / (p.mass * p.gamma * p.omega_m),
            max_relative = 1e-10
        );
    }

    #[test]
    fn phase_factor_unit_modulus_over_log_grid() {
        let p = test_params();
        for i in 0..=200 {
            let nu = 10f64.powf(-2.0 + 12.0 * i as f64 / 200.0);
            let r = response(nu, &p).unwrap();
            assert!((r.phase_factor.norm() - 1.0).abs() < 1e-12, "nu = {nu}");
        }
    }

    proptest! {
        #[test]
        fn conjugation_symmetry(log_nu in -3f64..10f64) {
            let p = test_params();
            let nu = 10f64.powf(log_nu);
            let pos = response(nu, &p).unwrap();
            let neg = response(-nu, &p).unwrap();
            prop_assert!((neg.cavity - pos.cavity.conj()).norm() <= 1e-12 * pos.cavity.norm());
            prop_assert!((neg.mechanical - pos.mechanical.conj()).norm() <= 1e-12 * pos.mechanical.norm());
            prop_assert!((neg.phase_factor - pos.phase_factor.conj()).norm() <= 1e-12);
        }
    }

    #[test]
    fn validation_catches_bad_fields() {
        let mut p = test_params();
        p.delay_loss = 1.5;
        assert!(p.validate().is_err());
        let mut p = test_params();
        p.mass = 0.0;
        assert!(p.validate().is_err());
        assert!(test_params().validate().is_ok());
    }

    #[test]
    fn hz_conversion_scales_only_frequencies() {
        let p = test_params().with_frequencies_in_hz();
        let tau = std::f64::consts::TAU;
        assert_relative_eq!(p.omega_m, tau, max_relative = 1e-15);
        assert_relative_eq!(p.kappa, 1e7 * tau, max_relative = 1e-15);
        assert_relative_eq!(p.gamma, 1e-4 * tau, max_relative = 1e-15);
        assert_eq!(p.delay_time, 1e-5);
        assert_eq!(p.temperature, 1e-2);
    }
}
