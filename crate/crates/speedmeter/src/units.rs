//! Physical constants (CODATA 2018) and the few unit conversions the rest of
//! the crate relies on.
//!
//! Everything internal is SI with angular frequencies in rad/s. Figure-style
//! inputs labelled in ordinary Hz are converted once at the boundary with
//! [`HZ_TO_ANGULAR`].

use crate::error::ModelError;

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant (J/K), exact in the 2019 SI.
pub const K_B: f64 = 1.380_649e-23;

/// Newtonian gravitational constant (m^3 kg^-1 s^-2).
pub const G_NEWTON: f64 = 6.674_30e-11;

/// Speed of light (m/s), exact.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Elementary charge (C), exact.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// rad/s per ordinary Hz.
pub const HZ_TO_ANGULAR: f64 = std::f64::consts::TAU;

/// kg m/s per keV/c: 1000 e / c.
pub const KEV_PER_C_TO_SI: f64 = 1e3 * ELEMENTARY_CHARGE / SPEED_OF_LIGHT;

/// Bundle of the constants above, for code that wants to carry them as a value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub k_b: f64,
    pub g_newton: f64,
    pub speed_of_light: f64,
}

impl PhysicalConstants {
    pub const fn standard() -> Self {
        Self {
            hbar: HBAR,
            k_b: K_B,
            g_newton: G_NEWTON,
            speed_of_light: SPEED_OF_LIGHT,
        }
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::standard()
    }
}

/// Conversion factors between user-facing units and SI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitConversion {
    /// kg m/s per keV/c.
    pub kev_per_c_to_si: f64,
    /// rad/s per Hz.
    pub hz_to_angular: f64,
}

impl Default for UnitConversion {
    fn default() -> Self {
        Self {
            kev_per_c_to_si: KEV_PER_C_TO_SI,
            hz_to_angular: HZ_TO_ANGULAR,
        }
    }
}

/// Momentum in keV/c to kg m/s.
pub fn convert_momentum(kev_per_c: f64) -> Result<f64, ModelError> {
    if !kev_per_c.is_finite() {
        return Err(ModelError::NonFinite("momentum in keV/c".into()));
    }
    if kev_per_c < 0.0 {
        return Err(ModelError::InvalidParams(
            "momentum magnitude must be >= 0".into(),
        ));
    }
    Ok(kev_per_c * KEV_PER_C_TO_SI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn constants_match_codata_2018() {
        assert_relative_eq!(HBAR, 1.054571817e-34, max_relative = 1e-12);
        assert_relative_eq!(K_B, 1.380649e-23, max_relative = 0.0);
        assert_relative_eq!(G_NEWTON, 6.67430e-11, max_relative = 0.0);
        assert_relative_eq!(SPEED_OF_LIGHT, 2.99792458e8, max_relative = 0.0);
        assert_relative_eq!(HZ_TO_ANGULAR, 2.0 * std::f64::consts::PI, max_relative = 0.0);
    }

    #[test]
    fn momentum_conversion_reference_points() {
        assert_eq!(convert_momentum(0.0).unwrap(), 0.0);
        // 10 keV/c and 1 keV/c, direct evaluation with exact e and c
        assert_relative_eq!(
            convert_momentum(10.0).unwrap(),
            5.344285992678309e-24,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            convert_momentum(1.0).unwrap(),
            5.344285992678309e-25,
            max_relative = 1e-12
        );
    }

    #[test]
    fn momentum_conversion_rejects_bad_input() {
        assert!(convert_momentum(f64::NAN).is_err());
        assert!(convert_momentum(f64::INFINITY).is_err());
        assert!(convert_momentum(-1.0).is_err());
    }

    #[test]
    fn round_trip_is_identity() {
        for v in [1e-3, 1.0, 17.3, 1e4] {
            let si = convert_momentum(v).unwrap();
            assert_relative_eq!(si / KEV_PER_C_TO_SI, v, max_relative = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn conversion_is_linear(a in 1e-6f64..1e6, x in 1e-6f64..1e6) {
            let lhs = convert_momentum(a * x).unwrap();
            let rhs = a * convert_momentum(x).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()));
        }
    }
}
