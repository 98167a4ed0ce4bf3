//! Time-domain stochastic oracle.
//!
//! Integrates the detector's Langevin equations as classical linear SDEs with
//! white-noise inputs (all observables checked here are symmetrized two-point
//! functions of a linear system, so the classical simulation is exact in
//! distribution), estimates the force-noise PSD of the readout by Welch
//! averaging, and measures matched-filter SNRs by Monte Carlo. Runs at
//! toy-scale parameters: the analytic formulas are scale-free, so validating
//! at kappa ~ 1e3 rad/s validates the algebra the figure-scale evaluations
//! use.

mod sim;
mod snr;
mod welch;

pub use sim::{
    simulate, toy_double_params, toy_single_params, InjectedImpulse, SimConfig, TimeTrace,
    Topology, TraceMeta,
};
pub use snr::{detection_statistic_from_snr, empirical_snr, EmpiricalSnrConfig};
pub use welch::{
    compare_psd_to_analytic, estimate_force_psd, estimate_raw_psd, ComparisonReport,
    SpectralEstimate, WelchConfig,
};
