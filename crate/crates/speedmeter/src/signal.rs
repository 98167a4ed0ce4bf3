//! Force signal templates in time and frequency domain.
//!
//! Fourier convention: unitary transform with forward kernel e^{+i nu t},
//! F(nu) = (1/sqrt(2 pi)) integral F(t) e^{+i nu t} dt. This choice
//! reproduces the sqrt(2/pi) prefactor of the flyby spectrum exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bessel::k1;

/// A force signal with a known frequency-domain template.
pub trait SignalModel: Sync {
    /// Complex spectrum F(nu) in N s^(1/2).
    fn spectrum(&self, nu: f64) -> Complex64;

    /// |F(nu)|^2.
    fn power(&self, nu: f64) -> f64 {
        self.spectrum(nu).norm_sqr()
    }
}

/// Instantaneous momentum kick: F(t) = dp * delta(t - t0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpulseSignal {
    /// Transferred momentum (kg m/s), >= 0.
    pub momentum: f64,
    /// Event time (s).
    pub event_time: f64,
}

impl SignalModel for ImpulseSignal {
    fn spectrum(&self, nu: f64) -> Complex64 {
        Complex64::from_polar(
            self.momentum / (2.0 * std::f64::consts::PI).sqrt(),
            nu * self.event_time,
        )
    }
}

/// Transverse force pulse from a particle passing on a straight line under a
/// 1/r potential: impact parameter `b`, speed `v`, force constant `beta`
/// (J m; G m1 m2 for gravity, Q1 Q2 / 4 pi eps0 for Coulomb).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlybySignal {
    /// Force constant beta (J m).
    pub force_constant: f64,
    /// Impact parameter (m), > 0.
    pub impact_parameter: f64,
    /// Speed (m/s), > 0.
    pub speed: f64,
}

impl FlybySignal {
    /// Effective interaction time tau = b / v.
    pub fn transit_time(&self) -> f64 {
        self.impact_parameter / self.speed
    }

    /// Perpendicular force at time t (closest approach at t = 0):
    /// beta b / (b^2 + v^2 t^2)^(3/2).
    pub fn force(&self, t: f64) -> f64 {
        let b = self.impact_parameter;
        let r2 = b * b + self.speed * self.speed * t * t;
        self.force_constant * b / (r2 * r2.sqrt())
    }

    /// Exact spectrum sqrt(2/pi) beta |nu| / v^2 * K1(b |nu| / v), real and even.
    pub fn spectrum_exact(&self, nu: f64) -> f64 {
        let b = self.impact_parameter;
        let v = self.speed;
        let peak = (2.0 / std::f64::consts::PI).sqrt() * self.force_constant / (b * v);
        let x = b * nu.abs() / v;
        // x K1(x) -> 1 as x -> 0; the correction is O(x^2 ln x).
        if x < 1e-8 {
            peak
        } else {
            peak * x * k1(x)
        }
    }

    /// Exponential estimate sqrt(2/pi) (beta/(b v)) e^{-tau |nu| / 2}.
    ///
    /// An underestimate of the exact spectrum for |nu| below roughly 0.96/tau
    /// (the region that dominates SNR integrals); slightly above it beyond.
    pub fn spectrum_approx(&self, nu: f64) -> f64 {
        let peak =
            (2.0 / std::f64::consts::PI).sqrt() * self.force_constant
                / (self.impact_parameter * self.speed);
        peak * (-self.transit_time() * nu.abs() / 2.0).exp()
    }
}

impl SignalModel for FlybySignal {
    fn spectrum(&self, nu: f64) -> Complex64 {
        Complex64::new(self.spectrum_exact(nu), 0.0)
    }
}

/// Flyby signal with the exponential spectrum standing in for the exact one.
#[derive(Debug, Clone, Copy)]
pub struct FlybySignalApprox(pub FlybySignal);

impl SignalModel for FlybySignalApprox {
    fn spectrum(&self, nu: f64) -> Complex64 {
        Complex64::new(self.0.spectrum_approx(nu), 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn flyby() -> FlybySignal {
        FlybySignal {
            force_constant: 6.6743e-19,
            impact_parameter: 1e-3,
            speed: 2.2e5,
        }
    }

    #[test]
    fn impulse_spectrum_is_flat() {
        let s = ImpulseSignal { momentum: 3.7e-24, event_time: 1.3e-4 };
        let m0 = s.spectrum(10.0).norm();
        for nu in [0.0, 1e3, 1e7, 1e9] {
            assert_relative_eq!(s.spectrum(nu).norm(), m0, max_relative = 1e-12);
        }
        let zero = ImpulseSignal { momentum: 0.0, event_time: 0.0 };
        assert_eq!(zero.spectrum(123.0).norm(), 0.0);
        let unit = ImpulseSignal {
            momentum: (2.0 * std::f64::consts::PI).sqrt(),
            event_time: 0.0,
        };
        assert_relative_eq!(unit.spectrum(42.0).re, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn flyby_force_reference_points() {
        let s = flyby();
        let b = s.impact_parameter;
        assert_relative_eq!(
            s.force(0.0),
            s.force_constant / (b * b),
            max_relative = 1e-12
        );
        let tau = s.transit_time();
        assert_relative_eq!(
            s.force(tau),
            s.force_constant / (b * b) / 8f64.sqrt(),
            max_relative = 1e-12
        );
        assert_relative_eq!(s.force(tau), s.force(-tau), max_relative = 1e-14);
    }

    #[test]
    fn flyby_force_time_integral() {
        // Simpson quadrature of the time-domain pulse against 2 beta / (b v).
        let s = flyby();
        let tau = s.transit_time();
        let half = 4000.0 * tau;
        let n = 400_001usize;
        let dt = 2.0 * half / (n - 1) as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let t = -half + i as f64 * dt;
            let w = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * s.force(t);
        }
        let integral = acc * dt / 3.0;
        let expected = 2.0 * s.force_constant / (s.impact_parameter * s.speed);
        assert_relative_eq!(integral, expected, max_relative = 1e-6);
    }

    #[test]
    fn flyby_spectrum_zero_frequency_limit() {
        let s = flyby();
        let peak = (2.0 / std::f64::consts::PI).sqrt() * s.force_constant
            / (s.impact_parameter * s.speed);
        assert_relative_eq!(s.spectrum_exact(0.0), peak, max_relative = 1e-12);
        assert_relative_eq!(s.spectrum_approx(0.0), s.spectrum_exact(0.0), max_relative = 1e-12);
    }

    #[test]
    fn flyby_approx_at_two_over_tau() {
        let s = flyby();
        let tau = s.transit_time();
        let peak = s.spectrum_approx(0.0);
        assert_relative_eq!(
            s.spectrum_approx(2.0 / tau),
            peak / std::f64::consts::E,
            max_relative = 1e-12
        );
    }

    #[test]
    fn approx_underestimates_in_band() {
        // Holds for tau |nu| up to ~0.96; checked on [0, 0.9/tau].
        let s = flyby();
        let tau = s.transit_time();
        for i in 0..=500 {
            let nu = 0.9 / tau * i as f64 / 500.0;
            assert!(
                s.spectrum_approx(nu) <= s.spectrum_exact(nu) * (1.0 + 1e-12),
                "nu tau = {}",
                nu * tau
            );
        }
    }

    proptest! {
        #[test]
        fn hermitian_symmetry(log_nu in -2f64..9f64) {
            let s = flyby();
            let nu = 10f64.powf(log_nu);
            let pos = s.spectrum(nu);
            let neg = s.spectrum(-nu);
            prop_assert!((neg - pos.conj()).norm() <= 1e-12 * pos.norm().max(1e-300));
            let imp = ImpulseSignal { momentum: 1e-20, event_time: 2.2e-3 };
            let p = imp.spectrum(nu);
            let n = imp.spectrum(-nu);
            prop_assert!((n - p.conj()).norm() <= 1e-12 * p.norm());
        }
    }

    #[test]
    fn spectrum_matches_dft_of_time_domain() {
        // Unitary e^{+i nu t} DFT of the sampled pulse, Simpson weights.
        // The acceptance suite runs the fine version; this is a quick check
        // at a few frequencies.
        let s = flyby();
        let tau = s.transit_time();
        let half = 400.0 * tau;
        let n = 160_001usize;
        let dt = 2.0 * half / (n - 1) as f64;
        for &x in &[0.3, 1.0, 3.0] {
            let nu = x / tau;
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                let t = -half + i as f64 * dt;
                let w = if i == 0 || i == n - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc += Complex64::from_polar(w * s.force(t), nu * t);
            }
            let dft = acc * dt / 3.0 / (2.0 * std::f64::consts::PI).sqrt();
            let analytic = s.spectrum_exact(nu);
            assert_relative_eq!(dft.re, analytic, max_relative = 1e-3);
            assert!(dft.im.abs() < 1e-6 * analytic);
        }
    }
}
